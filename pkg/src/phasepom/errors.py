class PhasePomError(Exception):
    """Base class for library errors."""


class DimensionMismatch(PhasePomError, ValueError):
    pass


class GridMismatch(PhasePomError, ValueError):
    pass


class InvalidState(PhasePomError, ValueError):
    pass


class RegionEscapesGrid(PhasePomError, ValueError):
    def __init__(self, msg="region-escapes-grid"):
        super().__init__(msg)


class NotInformationallyComplete(PhasePomError, ValueError):
    def __init__(self, msg="not-informationally-complete"):
        super().__init__(msg)
