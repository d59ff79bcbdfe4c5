"""Run configuration shared by the command-line tools.

All defaults live in :data:`DEFAULTS`:

    L = 7.0, M = 141        phase-space window [-L, L]^2 with M nodes per axis
    N = 60, nphys = 12      Fock cutoff and trusted leading block
    d = 5                   modulus of the finite model
    seed = 1234             base seed for random states
    effect_L = 8.0, effect_M = 161
                            window for effect-level checks (Q_T(X) = I, tomography);
                            the tail of higher Fock levels needs the wider box
    orth_index_max = 2      largest Fock index in the default orthogonality check;
                            index 3 already leaks ~2e-5 through the L = 7 window

Tolerances are keyed by check name and can be overridden individually.
"""

from __future__ import annotations

import copy
from dataclasses import asdict, dataclass, field, fields

from .finite import MAX_MODULUS

DEFAULT_TOLERANCES = {
    "formal_degree": 1e-6,
    "orthogonality": 1e-5,
    "normalization": 1e-5,
    "covariance": 1e-5,
    "neumark": 1e-10,
    "resolution": 1e-4,
    "finite_resolution": 1e-12,
    "finite_orthogonality": 1e-12,
    "finite_intertwining": 1e-13,
    "finite_imprimitivity": 1e-12,
    "finite_multiplicity": 1e-12,
    "finite_minimality": 0.5,
    "proof_identity": 1e-12,
    "finite_round_trip": 1e-10,
}


@dataclass
class RunConfig:
    L: float = 7.0
    M: int = 141
    N: int = 60
    nphys: int = 12
    d: int = 5
    seed: int = 1234
    effect_L: float = 8.0
    effect_M: int = 161
    orth_index_max: int = 2
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def validate(self) -> RunConfig:
        """Raise ``ValueError`` for anything a module precondition would reject."""
        for name in ("L", "effect_L"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("M", "effect_M"):
            if getattr(self, name) < 3 or getattr(self, name) % 2 == 0:
                raise ValueError(f"{name} must be an odd integer >= 3 (the origin is a node)")
        if not 0 <= self.orth_index_max <= self.nphys:
            raise ValueError(f"orth_index_max must lie in [0, nphys={self.nphys}]")
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if not 1 <= self.nphys <= self.N:
            raise ValueError(f"nphys must lie in [1, N={self.N}]")
        if self.d % 2 == 0 or not 3 <= self.d <= MAX_MODULUS:
            raise ValueError(f"d must be odd and in [3, {MAX_MODULUS}], got {self.d}")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
        for k, v in self.tolerances.items():
            if not v >= 0:
                raise ValueError(f"tolerance {k} must be non-negative")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict, base: RunConfig | None = None) -> RunConfig:
        cfg = copy.deepcopy(base) if base is not None else cls()
        names = {f.name for f in fields(cls)}
        for key, value in data.items():
            if key not in names:
                raise ValueError(f"unknown config key {key!r}")
            if key == "tolerances":
                cfg.tolerances = {**cfg.tolerances, **value}
            else:
                setattr(cfg, key, type(getattr(cfg, key))(value))
        return cfg
