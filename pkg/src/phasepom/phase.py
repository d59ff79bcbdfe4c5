"""Phase space of the continuous Heisenberg group.

Everything is sampled on a uniform square grid carrying the measure
alpha = dq dp / (2 pi). Regions are node masks, so effects of node-disjoint
regions add exactly and translations by whole grid steps map masks onto masks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import DimensionMismatch, GridMismatch, RegionEscapesGrid
from .fock import FockSpace, GroupElementCont, amplitude, displacement_batch, pi_cont

log = logging.getLogger(__name__)

CHUNK = 2048
# relative slack for node membership, absorbs rounding in translated regions
_MEMBERSHIP_SLACK = 1e-9


@dataclass(frozen=True)
class PhaseGrid:
    """Square grid on [-L, L]^2 with ``points`` nodes per axis.

    Weights follow the trapezoidal rule (edge nodes halved, corners
    quartered) and include the 1/(2 pi) of alpha, so they sum to
    (2L)^2 / (2 pi).
    """

    extent: float = 7.0
    points: int = 141

    def __post_init__(self):
        if not self.extent > 0:
            raise ValueError(f"extent must be positive, got {self.extent}")
        if self.points < 3 or self.points % 2 == 0:
            raise ValueError(f"points must be odd and >= 3, got {self.points}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / (self.points - 1)

    @property
    def axis(self) -> np.ndarray:
        return self.spacing * (np.arange(self.points) - (self.points - 1) // 2)

    @property
    def weights(self) -> np.ndarray:
        w = np.full(self.points, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        return np.outer(w, w) / (2.0 * np.pi)

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    def amplitudes(self) -> np.ndarray:
        q, p = self.nodes()
        return amplitude(q, p)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.points, self.points)

    def snap_shift(self, q: float, p: float) -> tuple[int, int]:
        """Round a phase-space shift to whole grid steps."""
        return int(round(q / self.spacing)), int(round(p / self.spacing))

    def node_index(self, q: float, p: float) -> tuple[int, int]:
        c = (self.points - 1) // 2
        i, j = self.snap_shift(q, p)
        return i + c, j + c


@dataclass(frozen=True)
class Region:
    """A Borel set of phase space realised as a node mask.

    ``kind`` is ``"full"``, ``"rectangle"`` with ``params = (q0, q1, p0, p1)``
    or ``"disk"`` with ``params = (qc, pc, radius)``.
    """

    kind: str = "full"
    params: tuple = ()

    def __post_init__(self):
        if self.kind == "rectangle":
            q0, q1, p0, p1 = self.params
            if q0 > q1 or p0 > p1:
                raise ValueError("rectangle bounds must be ordered")
        elif self.kind == "disk":
            if not self.params[2] > 0:
                raise ValueError("disk radius must be positive")
        elif self.kind != "full":
            raise ValueError(f"unknown region kind {self.kind!r}")

    @classmethod
    def full(cls) -> Region:
        return cls("full")

    @classmethod
    def rectangle(cls, q0, q1, p0, p1) -> Region:
        return cls("rectangle", (float(q0), float(q1), float(p0), float(p1)))

    @classmethod
    def disk(cls, center=(0.0, 0.0), radius=1.0) -> Region:
        return cls("disk", (float(center[0]), float(center[1]), float(radius)))

    def mask(self, grid: PhaseGrid) -> np.ndarray:
        q, p = grid.nodes()
        tol = _MEMBERSHIP_SLACK * grid.spacing
        if self.kind == "full":
            return np.ones(grid.shape, dtype=bool)
        if self.kind == "rectangle":
            q0, q1, p0, p1 = self.params
            return (q >= q0 - tol) & (q <= q1 + tol) & (p >= p0 - tol) & (p <= p1 + tol)
        qc, pc, r = self.params
        return (q - qc) ** 2 + (p - pc) ** 2 <= r * r + tol * r

    def translate(self, dq: float, dp: float) -> Region:
        if self.kind == "full":
            return self
        if self.kind == "rectangle":
            q0, q1, p0, p1 = self.params
            return Region("rectangle", (q0 + dq, q1 + dq, p0 + dp, p1 + dp))
        qc, pc, r = self.params
        return Region("disk", (qc + dq, pc + dp, r))

    def bounds(self):
        """Bounding box (q0, q1, p0, p1), or None for the full plane."""
        if self.kind == "full":
            return None
        if self.kind == "rectangle":
            return self.params
        qc, pc, r = self.params
        return (qc - r, qc + r, pc - r, pc + r)

    def area(self, grid: PhaseGrid) -> float:
        """alpha-measure of the region as seen by the quadrature."""
        return float(grid.weights[self.mask(grid)].sum())


@dataclass
class CoefficientField:
    """Samples of a function on phase space, indexed ``values[i, j]`` at (q_i, p_j)."""

    values: np.ndarray
    grid: PhaseGrid
    labels: tuple | None = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.shape:
            raise GridMismatch(
                f"field has shape {self.values.shape}, grid expects {self.grid.shape}"
            )

    def __add__(self, other: CoefficientField) -> CoefficientField:
        _same_grid(self.grid, other.grid)
        return CoefficientField(self.values + other.values, self.grid)

    def __mul__(self, c) -> CoefficientField:
        return CoefficientField(self.values * c, self.grid)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.sqrt(field_inner(self, self).real))


def _same_grid(a: PhaseGrid, b: PhaseGrid):
    if a != b:
        raise GridMismatch(f"grids differ: {a} vs {b}")


def _support(v: np.ndarray) -> int:
    nz = np.flatnonzero(v)
    return int(nz[-1]) + 1 if nz.size else 1


def iter_displacements(
    z: np.ndarray, dim: int, chunk: int = CHUNK
) -> Iterator[tuple[slice, np.ndarray]]:
    """Yield ``(slice, D)`` with D the displacement matrices of ``z[slice]``."""
    z = np.asarray(z).reshape(-1)
    for start in range(0, z.size, chunk):
        sl = slice(start, min(start + chunk, z.size))
        yield sl, displacement_batch(z[sl], dim)


def _as_vector(u) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 1:
        raise DimensionMismatch("state vectors must be one-dimensional")
    return u


def coeff_field(u, v, grid: PhaseGrid) -> CoefficientField:
    """Matrix coefficient c_{u,v}(s(x)) = <pi(s(x)) u, v> sampled on the grid.

    Only the leading levels on which ``u`` and ``v`` are supported enter, and
    the displacement entries are exact there, so no truncation error arises.
    """
    u, v = _as_vector(u), _as_vector(v)
    if u.shape != v.shape:
        raise DimensionMismatch(f"u has dimension {u.size}, v has {v.size}")
    dim = max(_support(u), _support(v))
    u, v = u[:dim], v[:dim]
    z = grid.amplitudes().reshape(-1)
    out = np.empty(z.size, dtype=complex)
    for sl, d in iter_displacements(z, dim):
        out[sl] = (d @ u).conj() @ v
    return CoefficientField(out.reshape(grid.shape), grid)


def w_transform(u, v, grid: PhaseGrid) -> CoefficientField:
    """The map W_u applied to v. Its image satisfies <W_u v, W_u w> = |u|^2 <v, w>."""
    return coeff_field(u, v, grid)


def field_inner(f: CoefficientField, g: CoefficientField) -> complex:
    """Quadrature of conj(f) g against alpha."""
    _same_grid(f.grid, g.grid)
    return complex(np.sum(f.grid.weights * f.values.conj() * g.values))


def _coefficient_block(grid: PhaseGrid, size: int) -> np.ndarray:
    """All displacement entries D[m, n], m, n < size, at every node: shape (nodes, size, size)."""
    z = grid.amplitudes().reshape(-1)
    out = np.empty((z.size, size, size), dtype=complex)
    for sl, d in iter_displacements(z, size):
        out[sl] = d
    return out


def check_orthogonality(index_max: int, grid: PhaseGrid, space: FockSpace) -> float:
    """max |<c_{e_i,e_j}, c_{e_k,e_l}> - delta_ik delta_jl| over indices <= index_max."""
    if index_max > space.physical_block:
        raise ValueError(
            f"index_max {index_max} exceeds physical block {space.physical_block}"
        )
    size = index_max + 1
    d = _coefficient_block(grid, size)
    # c_{e_i,e_j} = conj(D[j, i]); column (i, j) of the sample matrix
    c = d.conj().transpose(0, 2, 1).reshape(d.shape[0], size * size)
    w = grid.weights.reshape(-1)
    gram = (c.conj().T * w) @ c
    return float(np.abs(gram - np.eye(size * size)).max())


def _signed_factor(T: np.ndarray):
    """Factor a Hermitian T as V diag(s) V^* with s = +-1, dropping null directions."""
    lam, vec = np.linalg.eigh(0.5 * (T + T.conj().T))
    keep = np.abs(lam) > 1e-15 * max(1.0, np.abs(lam).max())
    lam, vec = lam[keep], vec[:, keep]
    return vec * np.sqrt(np.abs(lam)), np.sign(lam)


def qt_effect(T, E: Region, grid: PhaseGrid) -> np.ndarray:
    """Q_T(E) = sum over nodes of E of w pi(s(x)) T pi(s(x))^{-1}."""
    T = np.asarray(T, dtype=complex)
    dim = T.shape[0]
    mask = E.mask(grid).reshape(-1)
    z = grid.amplitudes().reshape(-1)[mask]
    w = grid.weights.reshape(-1)[mask]
    factor, sign = _signed_factor(T)
    acc = np.zeros((dim, dim), dtype=complex)
    r = factor.shape[1]
    if r == 0:
        return acc
    for sl, d in iter_displacements(z, dim):
        u = (d @ factor) * np.sqrt(w[sl])[:, None, None]
        y = u.transpose(1, 0, 2).reshape(dim, -1)
        acc += (y * np.tile(sign, u.shape[0])) @ y.conj().T
    return 0.5 * (acc + acc.conj().T)


def effect_spectrum(effect: np.ndarray, block: int) -> tuple[float, float]:
    """Smallest and largest eigenvalue of the leading block."""
    ev = np.linalg.eigvalsh(effect[:block, :block])
    return float(ev[0]), float(ev[-1])


def _check_inside(region: Region, grid: PhaseGrid):
    b = region.bounds()
    limit = grid.extent - grid.spacing
    if b is None or min(b[0], b[2]) < -limit or max(b[1], b[3]) > limit:
        raise RegionEscapesGrid()


def covariance_defect(
    T, E: Region, g: GroupElementCont, grid: PhaseGrid, space: FockSpace
) -> float:
    """|| pi(g) Q_T(E) pi(g)^{-1} - Q_T(g.E) || on the physical block.

    The translation part of g is rounded to whole grid steps first; the
    rounded shift is logged.
    """
    iq, ip = grid.snap_shift(g.q, g.p)
    h = grid.spacing
    g = GroupElementCont(g.t, iq * h, ip * h)
    if (iq, ip) != (0, 0):
        log.info("covariance shift rounded to (%.17g, %.17g)", g.q, g.p)
        _check_inside(E, grid)
    moved = E.translate(g.q, g.p)
    if (iq, ip) != (0, 0):
        _check_inside(moved, grid)
    T = np.asarray(T, dtype=complex)
    sub = FockSpace(T.shape[0], space.physical_block)
    u = pi_cont(g, sub)
    lhs = u @ qt_effect(T, E, grid) @ u.conj().T
    rhs = qt_effect(T, moved, grid)
    b = space.physical_block
    return float(np.linalg.norm((lhs - rhs)[:b, :b], 2))


def neumark_defect(u, E: Region, v, w, grid: PhaseGrid) -> float:
    """|<W_u v, P(E) W_u w> - <v, Q_u(E) w>| with P(E) multiplication by the mask."""
    u, v, w = _as_vector(u), _as_vector(v), _as_vector(w)
    mask = E.mask(grid)
    fv, fw = coeff_field(u, v, grid), coeff_field(u, w, grid)
    lhs = np.sum((grid.weights * mask) * fv.values.conj() * fw.values)
    rhs = v.conj() @ qt_effect(np.outer(u, u.conj()), E, grid) @ w
    return float(abs(lhs - rhs))


def f_basis(n: int, p: int, grid: PhaseGrid, space: FockSpace | None = None) -> CoefficientField:
    """The orthonormal family f_{n,p} = c_{e_n, e_p} o s under alpha (no extra prefactor)."""
    limit = space.physical_block if space is not None else None
    if n < 0 or p < 0 or (limit is not None and max(n, p) > limit):
        raise IndexError(f"index ({n}, {p}) outside the physical block")
    size = max(n, p) + 1
    en = np.zeros(size, dtype=complex)
    ep = np.zeros(size, dtype=complex)
    en[n] = ep[p] = 1.0
    field_ = coeff_field(en, ep, grid)
    field_.labels = (n, p)
    return field_


def parseval_sums(n_max: int, test: CoefficientField) -> tuple[float, np.ndarray]:
    """Return ||test||^2 and the cumulative sums S(n) = sum_{i,j<=n} |<f_{i,j}, test>|^2.

    The sums are accumulated shell by shell so that S is non-decreasing in n.
    """
    grid = test.grid
    size = n_max + 1
    z = grid.amplitudes().reshape(-1)
    wt = (grid.weights * test.values).reshape(-1)
    # <f_{i,j}, test> = sum_x w D_x[j, i] test(x)
    amp = np.zeros((size, size), dtype=complex)
    for sl, d in iter_displacements(z, size):
        amp += np.tensordot(wt[sl], d, axes=(0, 0))
    sq = np.abs(amp) ** 2
    shells = np.array([sq[k, : k + 1].sum() + sq[:k, k].sum() for k in range(size)])
    return field_inner(test, test).real, np.cumsum(shells)


def resolution_defect(n_max: int, test: CoefficientField, grid: PhaseGrid | None = None) -> float:
    """Relative Parseval defect |‖t‖^2 - S(n_max)| / ‖t‖^2 of ``test`` against f_{n,p}."""
    if grid is not None:
        _same_grid(grid, test.grid)
    norm2, sums = parseval_sums(n_max, test)
    if norm2 == 0:
        raise ValueError("test field is zero")
    return float(abs(norm2 - sums[-1]) / norm2)


def translate_field(f: CoefficientField, g: GroupElementCont) -> CoefficientField:
    """Left-regular action on L^2(X, alpha):

        (l(t,q,p) f)(x, y) = e^{i(t + (x p - y q)/2)} f(x - q, y - p).

    (q, p) is rounded to whole grid steps; nodes whose pre-image falls off the
    grid are NaN.
    """
    grid = f.grid
    iq, ip = grid.snap_shift(g.q, g.p)
    dq, dp = iq * grid.spacing, ip * grid.spacing
    x, y = grid.nodes()
    out = np.full(grid.shape, np.nan, dtype=complex)
    m = grid.points
    src = f.values[max(0, -iq) : m - max(0, iq), max(0, -ip) : m - max(0, ip)]
    out[max(0, iq) : m - max(0, -iq), max(0, ip) : m - max(0, -ip)] = src
    out *= np.exp(1j * (g.t + 0.5 * (x * dp - y * dq)))
    return CoefficientField(out, grid)
