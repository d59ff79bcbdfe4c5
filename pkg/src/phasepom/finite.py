"""Heisenberg group over Z_d (d odd) and its induced imprimitivity system.

Everything here is exact up to floating-point round-off, so the identities of
the continuous theory (orthogonality relations, Neumark dilation, resolution
of the identity by the Neumark projections, isotypic decomposition) are checked
at machine precision by brute force.

Conventions
-----------
* Elements are triples (t, q, p) of residues with product
  ``(t1 + t2 + h(p1 q2 - q1 p2), q1 + q2, p1 + p2)``, h the inverse of 2 mod d.
* The central character is chi(t) = omega^t with omega = e^{2 pi i / d}.
* pi(t, q, p) e_k = omega^(t + h q p + p k) e_{k+q}.
* Phase-space points x = (q, p) are flattened to the index q * d + p, and
  functions on X carry the weight 1/d (formal degree one).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch

MAX_MODULUS = 31


@dataclass(frozen=True)
class FiniteHeisenberg:
    modulus: int
    character: int = 1

    def __post_init__(self):
        d = self.modulus
        if d < 3 or d % 2 == 0:
            raise ValueError(f"modulus must be odd and >= 3, got {d}")
        if d > MAX_MODULUS:
            raise ValueError(f"modulus {d} exceeds the supported maximum {MAX_MODULUS}")
        if gcd(self.character, d) != 1:
            raise ValueError(
                f"central character omega^({self.character} t) is not primitive for d={d}"
            )
        if self.character % d != 1:
            raise ValueError("only the character omega^t is supported")

    @property
    def omega(self) -> complex:
        return np.exp(2j * np.pi / self.modulus)

    @property
    def half_inv(self) -> int:
        return (self.modulus + 1) // 2

    @property
    def weight(self) -> float:
        return 1.0 / self.modulus

    def chi(self, t) -> complex:
        return np.exp(2j * np.pi * (np.asarray(t) % self.modulus) / self.modulus)

    def element(self, t=0, q=0, p=0) -> FiniteGroupElement:
        return FiniteGroupElement(t, q, p, self.modulus)

    def elements(self):
        d = self.modulus
        return [self.element(t, q, p) for t in range(d) for q in range(d) for p in range(d)]

    def points(self):
        """Phase-space points (q, p) in flattened order."""
        d = self.modulus
        return [(q, p) for q in range(d) for p in range(d)]

    def section(self, q, p) -> FiniteGroupElement:
        return self.element(0, q, p)

    def index(self, q, p) -> int:
        d = self.modulus
        return (q % d) * d + (p % d)


@dataclass(frozen=True)
class FiniteGroupElement:
    t: int
    q: int
    p: int
    modulus: int

    def __post_init__(self):
        d = self.modulus
        object.__setattr__(self, "t", self.t % d)
        object.__setattr__(self, "q", self.q % d)
        object.__setattr__(self, "p", self.p % d)

    def __mul__(self, other: FiniteGroupElement) -> FiniteGroupElement:
        return group_mul(self, other)

    def inverse(self) -> FiniteGroupElement:
        return FiniteGroupElement(-self.t, -self.q, -self.p, self.modulus)

    @property
    def point(self) -> tuple[int, int]:
        return (self.q, self.p)


def group_mul(a: FiniteGroupElement, b: FiniteGroupElement) -> FiniteGroupElement:
    if a.modulus != b.modulus:
        raise ValueError(f"modulus mismatch: {a.modulus} vs {b.modulus}")
    d = a.modulus
    h = (d + 1) // 2
    return FiniteGroupElement(
        a.t + b.t + h * (a.p * b.q - a.q * b.p), a.q + b.q, a.p + b.p, d
    )


def commutator(a: FiniteGroupElement, b: FiniteGroupElement) -> FiniteGroupElement:
    return a * b * a.inverse() * b.inverse()


def act(a: FiniteGroupElement, q: int, p: int) -> tuple[int, int]:
    """a.x, the image of x = (q, p) under left multiplication."""
    d = a.modulus
    return ((a.q + q) % d, (a.p + p) % d)


@dataclass(frozen=True)
class SchrodingerRep:
    """The irreducible representation pi with central character omega^t.

    ``section[q, p]`` holds pi(0, q, p); other elements differ by the
    central phase.
    """

    group: FiniteHeisenberg
    section: np.ndarray

    def __call__(self, a: FiniteGroupElement) -> np.ndarray:
        return self.group.chi(a.t) * self.section[a.q, a.p]

    def at(self, q: int, p: int) -> np.ndarray:
        d = self.group.modulus
        return self.section[q % d, p % d]


def schrodinger_rep(grp: FiniteHeisenberg) -> SchrodingerRep:
    d, h = grp.modulus, grp.half_inv
    k = np.arange(d)
    table = np.zeros((d, d, d, d), dtype=complex)
    for q in range(d):
        for p in range(d):
            phase = np.exp(2j * np.pi * ((h * q * p + p * k) % d) / d)
            table[q, p, (k + q) % d, k] = phase
    return SchrodingerRep(grp, table)


def induced_rep(grp: FiniteHeisenberg, a: FiniteGroupElement) -> np.ndarray:
    """Matrix of l(a) on functions over X:

        (l(a) f)(x) = chi(s(x)^{-1} a s(a^{-1}.x)) f(a^{-1}.x).
    """
    d = grp.modulus
    out = np.zeros((d * d, d * d), dtype=complex)
    ainv = a.inverse()
    for q, p in grp.points():
        src = act(ainv, q, p)
        h = grp.section(q, p).inverse() * a * grp.section(*src)
        assert h.q == 0 and h.p == 0
        out[grp.index(q, p), grp.index(*src)] = grp.chi(h.t)
    return out


def induced_function(grp: FiniteHeisenberg, phi: np.ndarray) -> np.ndarray:
    """f_phi(g) = sum_t chi(t) phi(g (t,0,0)) as a (d, d, d) table indexed [t, q, p]."""
    d = grp.modulus
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (d, d, d):
        raise DimensionMismatch(f"phi must be a ({d}, {d}, {d}) table indexed [t, q, p]")
    # g (s, 0, 0) = (t + s, q, p)
    f = np.zeros_like(phi)
    for s in range(d):
        f += grp.chi(s) * np.roll(phi, -s, axis=0)
    return f


def induce_from_function(grp: FiniteHeisenberg, phi: np.ndarray) -> np.ndarray:
    """f_phi o s as a length-d^2 vector over X."""
    return induced_function(grp, phi)[0].reshape(-1)


def induced_inner(f: np.ndarray, g: np.ndarray, grp: FiniteHeisenberg) -> complex:
    return complex(grp.weight * np.vdot(f, g))


def intertwiner(grp: FiniteHeisenberg, u, rep: SchrodingerRep | None = None) -> np.ndarray:
    """W_u as a d^2 x d matrix; row x is the conjugate of pi(s(x)) u."""
    u = np.asarray(u, dtype=complex)
    d = grp.modulus
    if u.shape != (d,):
        raise DimensionMismatch(f"u must have dimension {d}")
    if not np.any(u):
        raise ValueError("u must be nonzero")
    rep = rep or schrodinger_rep(grp)
    moved = np.einsum("qpij,j->qpi", rep.section, u).reshape(d * d, d)
    return moved.conj()


def neumark_projection(grp: FiniteHeisenberg, u, rep=None) -> np.ndarray:
    """P_u = W_u W_u^*, the adjoint taken with respect to the 1/d-weighted product."""
    w = intertwiner(grp, u, rep)
    return grp.weight * w @ w.conj().T


def finite_qu(grp: FiniteHeisenberg, u, mask=None, rep=None) -> np.ndarray:
    """Q_u(E) = (1/d) sum_{x in E} pi(s(x)) |u><u| pi(s(x))^{-1}."""
    d = grp.modulus
    rep = rep or schrodinger_rep(grp)
    moved = np.einsum("qpij,j->qpi", rep.section, np.asarray(u, dtype=complex)).reshape(d * d, d)
    if mask is not None:
        moved = moved[np.asarray(mask, dtype=bool).reshape(-1)]
    return grp.weight * moved.T @ moved.conj()


def neumark_defect_finite(grp: FiniteHeisenberg, u, mask, v, w, rep=None) -> float:
    """|<W_u v, P(E) W_u w> - <v, Q_u(E) w>| for a node mask E over X."""
    rep = rep or schrodinger_rep(grp)
    W = intertwiner(grp, u, rep)
    m = np.asarray(mask, dtype=float).reshape(-1)
    lhs = grp.weight * np.vdot(W @ v, m * (W @ w))
    rhs = np.vdot(v, finite_qu(grp, u, mask, rep) @ w)
    return float(abs(lhs - rhs))


def orthogonality_gram(grp: FiniteHeisenberg, rep=None) -> np.ndarray:
    """Gram matrix of all coefficients c_{e_i, e_j} under the 1/d weight."""
    d = grp.modulus
    rep = rep or schrodinger_rep(grp)
    # c_{e_i,e_j}(x) = conj(pi(s(x))[j, i]); column index i*d + j
    c = rep.section.conj().transpose(0, 1, 3, 2).reshape(d * d, d * d)
    return grp.weight * c.conj().T @ c


def resolution_identity(grp: FiniteHeisenberg, vectors=None, rep=None) -> float:
    """|| sum_i W_{u_i} W_{u_i}^* - I ||_F, by default over the basis e_0 .. e_{d-1}."""
    d = grp.modulus
    rep = rep or schrodinger_rep(grp)
    vectors = np.eye(d, dtype=complex) if vectors is None else np.asarray(vectors, dtype=complex)
    total = sum(neumark_projection(grp, v, rep) for v in vectors)
    return float(np.linalg.norm(total - np.eye(d * d)))


@dataclass
class MultiplicityReport:
    multiplicity: complex
    range_overlap: float

    @property
    def integer(self) -> int:
        return int(round(self.multiplicity.real))


def isotypic_decompose(grp: FiniteHeisenberg, rep=None) -> MultiplicityReport:
    """Multiplicity of pi in l from the character inner product, plus the
    largest overlap || W_{e_i}^* W_{e_j} || between distinct ranges."""
    d = grp.modulus
    rep = rep or schrodinger_rep(grp)
    acc = 0j
    for a in grp.elements():
        acc += np.trace(induced_rep(grp, a)) * np.conj(np.trace(rep(a)))
    mult = acc / d**3
    ws = [intertwiner(grp, e, rep) for e in np.eye(d, dtype=complex)]
    overlap = 0.0
    for i in range(d):
        for j in range(d):
            if i != j:
                overlap = max(overlap, np.linalg.norm(grp.weight * ws[i].conj().T @ ws[j], 2))
    return MultiplicityReport(complex(mult), float(overlap))


def minimality_rank(grp: FiniteHeisenberg, u, points=None, rep=None) -> int:
    """Rank of {1_x . W_u v : x in points, v in basis} via pivoted QR."""
    d = grp.modulus
    W = intertwiner(grp, u, rep)
    idx = [grp.index(q, p) for q, p in (points if points is not None else grp.points())]
    cols = []
    for x in idx:
        for v in range(d):
            c = np.zeros(d * d, dtype=complex)
            c[x] = W[x, v]
            cols.append(c)
    mat = np.array(cols).T
    _, r, _ = scipy.linalg.qr(mat, pivoting=True, mode="economic")
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0:
        return 0
    return int(np.sum(diag > diag[0] * max(mat.shape) * np.finfo(float).eps))


def imprimitivity_check(grp: FiniteHeisenberg, elements=None) -> float:
    """max over a and singletons {x} of || l(a) P({x}) l(a)^{-1} - P({a.x}) ||."""
    d = grp.modulus
    worst = 0.0
    for a in elements if elements is not None else grp.elements():
        L = induced_rep(grp, a)
        for q, p in grp.points():
            P = np.zeros((d * d, d * d))
            P[grp.index(q, p), grp.index(q, p)] = 1.0
            j = grp.index(*act(a, q, p))
            target = np.zeros_like(P)
            target[j, j] = 1.0
            worst = max(worst, np.abs(L @ P @ L.conj().T - target).max())
    return float(worst)


def intertwining_defect(grp: FiniteHeisenberg, u, rep=None) -> float:
    """max over all group elements of || W_u pi(a) - l(a) W_u ||."""
    rep = rep or schrodinger_rep(grp)
    W = intertwiner(grp, u, rep)
    return float(
        max(np.abs(W @ rep(a) - induced_rep(grp, a) @ W).max() for a in grp.elements())
    )


def random_state_vector(d: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)
