"""Truncated Fock space: ladder operators, quadratures, displacements, states.

Basis vectors are indexed from 0, so the number state ``e_n`` with n quanta is
column ``n`` of the identity. Operators are plain ``numpy`` complex arrays.

Representation convention. The Heisenberg group acts through

    pi(t, q, p) = exp(i(t + qQ + pP)) = e^{it} D(z),   z = (-p + i q) / sqrt(2),

which is a homomorphism for the product
``(t1,q1,p1)(t2,q2,p2) = (t1+t2+(p1 q2 - q1 p2)/2, q1+q2, p1+p2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionMismatch, InvalidState

HERMITIAN_TOL = 1e-12
POSITIVITY_TOL = 1e-12
TRACE_TOL = 1e-12


@dataclass(frozen=True)
class FockSpace:
    """Truncated Fock space of dimension ``cutoff``.

    Results are trusted on the leading ``physical_block`` levels only; the
    default keeps the cutoff at least three times the trusted block.
    """

    cutoff: int
    physical_block: int | None = None

    def __post_init__(self):
        if self.cutoff < 2:
            raise ValueError(f"cutoff must be >= 2, got {self.cutoff}")
        if self.physical_block is None:
            object.__setattr__(self, "physical_block", max(1, self.cutoff // 3))
        if not 1 <= self.physical_block <= self.cutoff:
            raise ValueError(
                f"physical_block must lie in [1, {self.cutoff}], got {self.physical_block}"
            )

    @property
    def dim(self) -> int:
        return self.cutoff

    def basis(self, n: int) -> np.ndarray:
        if not 0 <= n < self.cutoff:
            raise IndexError(f"level {n} outside cutoff {self.cutoff}")
        v = np.zeros(self.cutoff, dtype=complex)
        v[n] = 1.0
        return v


@dataclass(frozen=True)
class GroupElementCont:
    """Element (t, q, p) of the Heisenberg group H^1."""

    t: float = 0.0
    q: float = 0.0
    p: float = 0.0

    def __mul__(self, other: GroupElementCont) -> GroupElementCont:
        return GroupElementCont(
            self.t + other.t + 0.5 * (self.p * other.q - self.q * other.p),
            self.q + other.q,
            self.p + other.p,
        )

    def inverse(self) -> GroupElementCont:
        return GroupElementCont(-self.t, -self.q, -self.p)


def amplitude(q, p):
    """Displacement amplitude z = (-p + iq)/sqrt(2) of the phase-space point (q, p)."""
    return (-np.asarray(p) + 1j * np.asarray(q)) / np.sqrt(2.0)


def ladder_ops(space: FockSpace) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(a, a_dag)`` truncated at ``space.cutoff``."""
    a = np.diag(np.sqrt(np.arange(1, space.cutoff, dtype=float)), 1).astype(complex)
    return a, a.T.copy()


def quadratures(space: FockSpace) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(Q, P)`` with Q = (a + a*)/sqrt2 and P = (a - a*)/(sqrt2 i)."""
    a, ad = ladder_ops(space)
    s = np.sqrt(2.0)
    return (a + ad) / s, 1j * (ad - a) / s


def displacement(beta: complex, space: FockSpace) -> np.ndarray:
    """Closed-form displacement operator D(beta) = exp(beta a* - conj(beta) a).

    Entries are the matrix elements of the untruncated operator, so each one
    is exact; only products of truncated matrices suffer from the cutoff.
    """
    beta = complex(beta)
    if not np.isfinite(beta):
        raise ValueError("beta must be finite")
    if beta == 0:
        return np.eye(space.cutoff, dtype=complex)
    return kernels.displacement_batch(np.array([beta]), space.cutoff)[0]


def displacement_batch(betas, dim: int) -> np.ndarray:
    """Stack of displacement matrices, shape ``betas.shape + (dim, dim)``."""
    betas = np.asarray(betas, dtype=complex)
    out = kernels.displacement_batch(betas.reshape(-1), dim)
    return out.reshape(betas.shape + (dim, dim))


def pi_cont(g: GroupElementCont, space: FockSpace) -> np.ndarray:
    """Schrodinger representation e^{it} D(z(q, p)) on the truncated space."""
    phase = np.exp(1j * g.t)
    if g.q == 0 and g.p == 0:
        return phase * np.eye(space.cutoff, dtype=complex)
    return phase * displacement(amplitude(g.q, g.p), space)


def weyl_phase(beta1: complex, beta2: complex) -> complex:
    """Phase in D(b1) D(b2) = phase * D(b1 + b2)."""
    return np.exp(1j * np.imag(beta1 * np.conj(beta2)))


def fock_state(n: int, space: FockSpace) -> np.ndarray:
    return space.basis(n)


def coherent_state(alpha: complex, space: FockSpace) -> np.ndarray:
    """Truncated coherent state with Fock coefficients e^{-|a|^2/2} a^n / sqrt(n!)."""
    n = np.arange(space.cutoff)
    coeff = np.empty(space.cutoff, dtype=complex)
    coeff[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for k in n[1:]:
        coeff[k] = coeff[k - 1] * alpha / np.sqrt(k)
    return coeff


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def random_density(
    space: FockSpace, rank: int, seed: int, support: int | None = None
) -> np.ndarray:
    """Seeded random density operator of the given rank.

    The eigenvectors are orthonormalised complex Gaussian columns living on the
    lowest ``support`` levels (default: the whole space); the eigenvalues are
    Dirichlet-distributed convex weights.
    """
    support = space.cutoff if support is None else support
    if not 1 <= support <= space.cutoff:
        raise ValueError(f"support must lie in [1, {space.cutoff}], got {support}")
    if not 1 <= rank <= support:
        raise ValueError(f"rank must lie in [1, {support}], got {rank}")
    rng = np.random.default_rng(seed)
    cols = rng.normal(size=(support, rank)) + 1j * rng.normal(size=(support, rank))
    vecs, _ = np.linalg.qr(cols)
    weights = rng.dirichlet(np.ones(rank))
    rho = np.zeros((space.cutoff, space.cutoff), dtype=complex)
    rho[:support, :support] = (vecs * weights) @ vecs.conj().T
    return 0.5 * (rho + rho.conj().T)


def validate_density(rho, dim: int | None = None) -> np.ndarray:
    """Return ``rho`` as a complex array or raise :class:`InvalidState`."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidState(f"density operator must be square, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {rho.shape[0]}")
    if not np.all(np.isfinite(rho)):
        raise InvalidState("density operator has non-finite entries")
    if np.abs(rho - rho.conj().T).max() > HERMITIAN_TOL:
        raise InvalidState("not a state: operator is not Hermitian")
    if abs(np.trace(rho) - 1) > TRACE_TOL:
        raise InvalidState(f"not a state: trace is {np.trace(rho).real:.6g}")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -POSITIVITY_TOL:
        raise InvalidState("not a state: operator has a negative eigenvalue")
    return rho


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    ``sigma`` is Hermitised first. Eigenvalues below 1e-14 of the largest are
    treated as zero, so that rounding noise is not amplified by the square
    roots (which would otherwise push pure-state fidelities above one).
    """
    rho = 0.5 * (rho + rho.conj().T)
    sigma = 0.5 * (sigma + sigma.conj().T)
    w, v = np.linalg.eigh(rho)
    keep = w > 1e-14 * max(w.max(), 0.0)
    v = v[:, keep] * np.sqrt(w[keep])
    inner = np.linalg.eigvalsh(v.conj().T @ sigma @ v)
    inner = inner[inner > 1e-14 * max(inner.max(initial=0.0), 0.0)]
    return float(np.sum(np.sqrt(inner)) ** 2)
