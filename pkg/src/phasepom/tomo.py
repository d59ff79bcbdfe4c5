"""Informational completeness and state reconstruction.

Both regimes share one pipeline. For the measured density

    phi(x) = tr[W pi(s(x)) T pi(s(x))^{-1}]

the twisted transform with the commutator character gives

    tr[T pi(g)] tr[W pi(g^{-1})] = int c(s(x)^{-1} g^{-1} s(x) g) phi(x) dalpha(x).

Dividing by the characteristic function of T and pairing with the
orthonormal family of displacement matrix elements returns W.

A *domain* is either a :class:`~phasepom.phase.PhaseGrid` (continuous
Heisenberg group on truncated Fock space) or a
:class:`~phasepom.finite.FiniteHeisenberg` (exact finite model over Z_d^2).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, GridMismatch, NotInformationallyComplete
from .finite import FiniteHeisenberg, commutator, schrodinger_rep
from .fock import fidelity
from .phase import PhaseGrid, _signed_factor, iter_displacements

log = logging.getLogger(__name__)

FINITE_ZERO_TOL = 1e-12
CONT_ZERO_TOL = 1e-15  # relative to max |char|
CONT_ZERO_FRACTION = 1e-3
FINITE_EPS_REG = 1e-8
CONT_EPS_REG = 1e-6  # relative to max |char|


@dataclass
class CharField:
    """Samples of x -> tr[A pi(s(x))]."""

    values: np.ndarray
    domain: PhaseGrid | FiniteHeisenberg
    label: str = "A"


@dataclass
class MeasurementData:
    """Samples of the density x -> tr[W pi(s(x)) T pi(s(x))^{-1}] with respect to alpha."""

    values: np.ndarray
    domain: PhaseGrid | FiniteHeisenberg
    labels: tuple = ("W", "T")

    def total(self) -> complex:
        return complex(np.sum(_weights(self.domain) * self.values))


@dataclass
class ICReport:
    min_abs: float
    zero_nodes: int
    zero_fraction: float
    verdict: str
    rationale: str

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


@dataclass
class Reconstruction:
    operator: np.ndarray
    report: dict = field(default_factory=dict)


def _is_finite(domain) -> bool:
    if isinstance(domain, FiniteHeisenberg):
        return True
    if isinstance(domain, PhaseGrid):
        return False
    raise TypeError(f"unsupported domain {type(domain).__name__}")


def _weights(domain) -> np.ndarray:
    if _is_finite(domain):
        d = domain.modulus
        return np.full((d, d), domain.weight)
    return domain.weights


def _coords(domain) -> tuple[np.ndarray, np.ndarray]:
    if _is_finite(domain):
        k = np.arange(domain.modulus)
        return np.meshgrid(k, k, indexing="ij")
    return domain.nodes()


def _finite_section(domain: FiniteHeisenberg) -> np.ndarray:
    d = domain.modulus
    return schrodinger_rep(domain).section.reshape(d * d, d, d)


def char_function(A, domain) -> CharField:
    """x -> tr[A pi(s(x))] on every node of the domain."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch("operator must be square")
    if _is_finite(domain):
        if A.shape[0] != domain.modulus:
            raise DimensionMismatch(f"operator must act on C^{domain.modulus}")
        vals = np.einsum("xmn,nm->x", _finite_section(domain), A)
        return CharField(vals.reshape(domain.modulus, domain.modulus), domain)
    z = domain.amplitudes().reshape(-1)
    vals = np.empty(z.size, dtype=complex)
    for sl, d in iter_displacements(z, A.shape[0]):
        vals[sl] = np.einsum("xmn,nm->x", d, A)
    return CharField(vals.reshape(domain.shape), domain)


def ic_condition(T, domain) -> ICReport:
    """Check that tr[T pi(g)] vanishes nowhere (finite) or on a negligible
    alpha-measure of nodes (continuous)."""
    chi = np.abs(char_function(T, domain).values)
    if _is_finite(domain):
        zero = chi < FINITE_ZERO_TOL
        frac = zero.sum() / zero.size
        ok = not zero.any()
        why = (
            "characteristic function nonzero at every point of Z_d^2"
            if ok
            else f"characteristic function vanishes at {int(zero.sum())} of {zero.size} points"
        )
    else:
        zero = chi < CONT_ZERO_TOL * chi.max()
        w = domain.weights
        frac = float(w[zero].sum() / w.sum())
        ok = frac <= CONT_ZERO_FRACTION
        why = (
            f"numerically zero on alpha-fraction {frac:.3g} of the grid "
            f"(threshold {CONT_ZERO_FRACTION:g})"
        )
    log.info("ic_condition: %s", why)
    return ICReport(float(chi.min()), int(zero.sum()), float(frac), "pass" if ok else "fail", why)


def _conjugated_blocks(T: np.ndarray, domain, cutoff: int):
    """Yield (slice, rho) with rho[x] = (pi(s(x)) T pi(s(x))^{-1})[:cutoff, :cutoff]."""
    if _is_finite(domain):
        sec = _finite_section(domain)
        rho = sec @ T @ sec.conj().transpose(0, 2, 1)
        yield slice(0, rho.shape[0]), rho[:, :cutoff, :cutoff]
        return
    factor, sign = _signed_factor(T)
    z = domain.amplitudes().reshape(-1)
    for sl, d in iter_displacements(z, T.shape[0]):
        u = d[:, :cutoff, :] @ factor
        yield sl, np.einsum("xnr,r,xmr->xnm", u, sign, u.conj())


def _check_pair(W, T, domain):
    W, T = np.asarray(W, dtype=complex), np.asarray(T, dtype=complex)
    if _is_finite(domain) and T.shape[0] != domain.modulus:
        raise DimensionMismatch(f"operators must act on C^{domain.modulus}")
    if W.shape[0] > T.shape[0]:
        raise DimensionMismatch(
            f"W has dimension {W.shape[0]}, larger than the reference state ({T.shape[0]})"
        )
    return W, T


def forward_model(W, T, domain, noise: float = 0.0, seed: int | None = None) -> MeasurementData:
    """Samples of tr[W pi(s(x)) T pi(s(x))^{-1}] at every node.

    ``W`` may act on the leading block of T's space. ``noise`` adds seeded
    Gaussian noise of that standard deviation and carries no accuracy contract.
    """
    W, T = _check_pair(W, T, domain)
    k = W.shape[0]
    n_nodes = int(np.prod(_weights(domain).shape))
    out = np.empty(n_nodes, dtype=complex)
    for sl, rho in _conjugated_blocks(T, domain, k):
        out[sl] = np.einsum("mn,xnm->x", W, rho)
    out = out.reshape(_weights(domain).shape)
    if noise:
        out = out + np.random.default_rng(seed).normal(scale=noise, size=out.shape)
    return MeasurementData(out, domain)


def filter_character(x, g, domain) -> np.ndarray:
    """c(s(x)^{-1} g^{-1} s(x) g) for phase-space points x = (q, p) and g = (q', p').

    The commutator is central, (xi, 0, 0) with xi = p q' - q p', so the
    character is e^{i xi} (continuous) or omega^xi (finite).
    """
    (qx, px), (qg, pg) = x, g
    xi = np.asarray(px) * np.asarray(qg) - np.asarray(qx) * np.asarray(pg)
    if _is_finite(domain):
        return domain.chi(xi)
    return np.exp(1j * xi)


def _kernel_matrix(domain) -> np.ndarray:
    """A[a, j] = c-phase factor exp(i * axis_a * axis_j), shared by both axes."""
    if _is_finite(domain):
        k = np.arange(domain.modulus)
        return domain.chi(np.outer(k, k))
    ax = domain.axis
    return np.exp(1j * np.outer(ax, ax))


def symplectic_transform(values: np.ndarray, domain) -> np.ndarray:
    """Phi(g) = int c(s(x)^{-1} g^{-1} s(x) g) phi(x) dalpha(x) at every node g.

    The character factorises as exp(i p_x q_g) exp(-i q_x p_g), so the direct
    quadrature is two matrix products. Extra trailing axes are transformed
    independently.
    """
    a = _kernel_matrix(domain)
    w = _weights(domain)
    wv = values * w.reshape(w.shape + (1,) * (values.ndim - 2))
    # Phi[a, b] = sum_{i, j} A[a, j] wv[i, j] conj(A)[i, b]
    tmp = np.tensordot(a, wv, axes=([1], [1]))  # (a, i, ...)
    return np.moveaxis(np.tensordot(tmp, a.conj(), axes=([1], [0])), -1, 1)


def _pairing_blocks(domain, cutoff: int):
    """Yield (slice, P) with P[x, n, p] = pi(s(x))[n, p] for n, p < cutoff."""
    if _is_finite(domain):
        sec = _finite_section(domain)
        yield slice(0, sec.shape[0]), sec[:, :cutoff, :cutoff]
        return
    for sl, d in iter_displacements(domain.amplitudes().reshape(-1), cutoff):
        yield sl, d


def _pair(f_weighted: np.ndarray, domain, cutoff: int) -> np.ndarray:
    """sum_x w F(x) pi(s(x))[n, p] for each trailing column of F: result (cutoff, cutoff, ...)."""
    flat = f_weighted.reshape((-1,) + f_weighted.shape[2:])
    out = None
    for sl, p in _pairing_blocks(domain, cutoff):
        part = np.tensordot(p, flat[sl], axes=([0], [0]))
        out = part if out is None else out + part
    return out


def pairing_gram_defect(domain, cutoff: int) -> float:
    """max |<c_{e_p,e_n}, c_{e_p',e_n'}> - delta| over n, p < cutoff on the domain."""
    w = _weights(domain).reshape(-1)
    gram = np.zeros((cutoff * cutoff, cutoff * cutoff), dtype=complex)
    for sl, p in _pairing_blocks(domain, cutoff):
        c = p.reshape(p.shape[0], -1)
        gram += (c.T * w[sl]) @ c.conj()
    return float(np.abs(gram - np.eye(cutoff * cutoff)).max())


def _deconvolve(values, chi, domain, threshold):
    phi = symplectic_transform(values, domain)
    keep = np.abs(chi) >= threshold
    safe = np.where(keep, chi, 1.0)
    keep_b = keep.reshape(keep.shape + (1,) * (phi.ndim - 2))
    safe_b = safe.reshape(safe.shape + (1,) * (phi.ndim - 2))
    return np.where(keep_b, phi / safe_b, 0.0), int((~keep).sum())


def reconstruct(
    data: MeasurementData,
    T,
    domain=None,
    cutoff: int | None = None,
    eps_reg: float | None = None,
    calibrate: bool | None = None,
    truth=None,
) -> Reconstruction:
    """Recover W on its leading ``cutoff`` levels from measured densities.

    Steps: twisted transform of the data, division by tr[T pi(g)] with modes
    below the regularisation threshold zeroed and counted, and pairing with
    the displacement matrix elements under alpha.

    With ``calibrate`` (default for the continuous domain) the pairing result
    is corrected by the transfer matrix of the same discrete pipeline applied
    to the basis operators |m><n|, which removes the bias of the finite grid
    window. The finite pipeline is exact and needs no correction.
    """
    domain = data.domain if domain is None else domain
    if domain != data.domain:
        raise GridMismatch("data were sampled on a different domain")
    T = np.asarray(T, dtype=complex)
    finite = _is_finite(domain)
    if finite:
        cutoff = domain.modulus if cutoff is None else cutoff
    elif cutoff is None:
        raise ValueError("cutoff is required for the continuous domain")
    if not 1 <= cutoff <= T.shape[0]:
        raise ValueError(f"cutoff must lie in [1, {T.shape[0]}]")
    calibrate = (not finite) if calibrate is None else calibrate

    ic = ic_condition(T, domain)
    if not ic.passed:
        raise NotInformationallyComplete()

    chi = char_function(T, domain).values
    if eps_reg is None:
        threshold = FINITE_EPS_REG if finite else CONT_EPS_REG * np.abs(chi).max()
    else:
        threshold = eps_reg if finite else eps_reg * np.abs(chi).max()
    w = _weights(domain)
    f, damped = _deconvolve(data.values, chi, domain, threshold)
    raw = _pair(w * f, domain, cutoff)

    report = {
        "damped_modes": damped,
        "damped_fraction": damped / chi.size,
        "pairing_gram_defect": pairing_gram_defect(domain, cutoff),
        "calibrated": bool(calibrate),
    }
    if calibrate:
        k2 = cutoff * cutoff
        basis = np.empty(w.shape + (k2,), dtype=complex)
        flat = basis.reshape(-1, k2)
        # data of |m><n| is rho_x[n, m]; column index m * cutoff + n
        for sl, rho in _conjugated_blocks(T, domain, cutoff):
            flat[sl] = rho.transpose(0, 2, 1).reshape(rho.shape[0], k2)
        fb, _ = _deconvolve(basis, chi, domain, threshold)
        transfer = _pair(w[..., None] * fb, domain, cutoff).reshape(k2, k2)
        report["transfer_condition"] = float(np.linalg.cond(transfer))
        est = np.linalg.solve(transfer, raw.reshape(k2)).reshape(cutoff, cutoff)
    else:
        est = raw
    report["verdict"] = "pass" if damped == 0 else "damped"
    if truth is not None:
        truth = np.asarray(truth, dtype=complex)[:cutoff, :cutoff]
        report["defect"] = float(np.linalg.norm(est - truth))
        report["fidelity"] = fidelity(truth, est)
    else:
        report["defect"] = None
    return Reconstruction(est, report)


def separation_test(W1, W2, T, domain) -> float:
    """Largest nodewise difference between the measured densities of W1 and W2."""
    a = forward_model(W1, T, domain).values
    b = forward_model(W2, T, domain).values
    return float(np.abs(a - b).max())


def proof_identity_defect(grp: FiniteHeisenberg, T, W) -> float:
    """Brute-force check, over every g in G, of

        tr[T pi(g)] tr[W pi(g^{-1})]
            = (1/d) sum_x c(s(x)^{-1} g^{-1} s(x) g) tr[T pi(s(x))^{-1} W pi(s(x))].

    Commutators are formed with the group law, not the closed-form phase.
    """
    rep = schrodinger_rep(grp)
    T, W = np.asarray(T, dtype=complex), np.asarray(W, dtype=complex)
    sandwiched = {
        (q, p): np.trace(T @ rep.at(q, p).conj().T @ W @ rep.at(q, p)) for q, p in grp.points()
    }
    worst = 0.0
    for g in grp.elements():
        lhs = np.trace(T @ rep(g)) * np.trace(W @ rep(g.inverse()))
        rhs = 0j
        for q, p in grp.points():
            sx = grp.section(q, p)
            k = commutator(sx.inverse(), g.inverse())
            assert k.q == 0 and k.p == 0
            rhs += grp.chi(k.t) * sandwiched[(q, p)]
        worst = max(worst, abs(lhs - grp.weight * rhs))
    return float(worst)
