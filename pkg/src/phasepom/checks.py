"""Aggregated defect checks for both regimes.

Every check returns ``{"name", "class", "defect", "tolerance", "pass"}``;
``class`` is one of "construction", "truncation", "quadrature" and tells which
kind of error limits the defect.
"""

from __future__ import annotations

import logging

import numpy as np

from . import finite as fin
from .config import RunConfig
from .fock import FockSpace, GroupElementCont, coherent_state, projector, random_density
from .phase import (
    PhaseGrid,
    Region,
    check_orthogonality,
    coeff_field,
    covariance_defect,
    field_inner,
    neumark_defect,
    qt_effect,
    resolution_defect,
)
from .tomo import forward_model, proof_identity_defect, reconstruct

log = logging.getLogger(__name__)


class CheckError(RuntimeError):
    """A module error raised inside a named check."""

    def __init__(self, name: str, exc: Exception):
        super().__init__(f"check {name!r} failed: {exc}")
        self.name = name
        self.original = exc


def _entry(name, kind, defect, tol, **extra):
    out = {
        "name": name,
        "class": kind,
        "defect": float(defect),
        "tolerance": float(tol),
        "pass": bool(defect <= tol),
    }
    out.update(extra)
    return out


def _vacuum(dim):
    e = np.zeros(dim, dtype=complex)
    e[0] = 1.0
    return e


def continuous_checks(cfg: RunConfig) -> list[dict]:
    tol = cfg.tolerances
    space = FockSpace(cfg.N, cfg.nphys)
    grid = PhaseGrid(cfg.L, cfg.M)
    egrid = PhaseGrid(cfg.effect_L, cfg.effect_M)
    rng = np.random.default_rng(cfg.seed)
    vac = _vacuum(cfg.N)
    out = []

    f = coeff_field(vac, vac, grid)
    out.append(_entry("formal_degree", "quadrature", abs(field_inner(f, f).real - 1), tol["formal_degree"],
                      grid=[cfg.L, cfg.M]))

    out.append(_entry("orthogonality", "quadrature", check_orthogonality(cfg.orth_index_max, grid, space),
                      tol["orthogonality"], index_max=cfg.orth_index_max, grid=[cfg.L, cfg.M]))

    T = projector(vac)
    eff = qt_effect(T, Region.full(), egrid)
    b = cfg.nphys
    out.append(_entry("normalization", "quadrature", np.linalg.norm(eff[:b, :b] - np.eye(b), 2),
                      tol["normalization"], grid=[cfg.effect_L, cfg.effect_M]))

    g = GroupElementCont(0.0, 0.7, -0.3)
    cov = covariance_defect(T, Region.disk((0.0, 0.0), 2.0), g, egrid, space)
    out.append(_entry("covariance", "construction" if cov < 1e-12 else "quadrature", cov, tol["covariance"],
                      shift=[0.7, -0.3], grid=[cfg.effect_L, cfg.effect_M]))

    worst = 0.0
    for _ in range(3):
        u, v, w = (_random_vector(rng, cfg.nphys) for _ in range(3))
        u /= np.linalg.norm(u)
        worst = max(worst, neumark_defect(u, Region.disk((0.3, -0.2), 1.5), v, w, grid))
    out.append(_entry("neumark", "construction", worst, tol["neumark"]))

    test = coeff_field(coherent_state(1.0, space), vac, grid)
    out.append(_entry("resolution", "truncation", resolution_defect(30, test), tol["resolution"], n_max=30))
    return out


def _random_vector(rng, dim):
    return rng.normal(size=dim) + 1j * rng.normal(size=dim)


def finite_checks(cfg: RunConfig) -> list[dict]:
    tol = cfg.tolerances
    grp = fin.FiniteHeisenberg(cfg.d)
    rep = fin.schrodinger_rep(grp)
    d = cfg.d
    rng = np.random.default_rng(cfg.seed)
    out = [
        _entry("finite_resolution", "construction", fin.resolution_identity(grp, rep=rep),
               tol["finite_resolution"], d=d),
        _entry("finite_orthogonality", "construction",
               np.abs(fin.orthogonality_gram(grp, rep=rep) - np.eye(d * d)).max(),
               tol["finite_orthogonality"], d=d),
    ]
    u = fin.random_state_vector(d, int(rng.integers(2**31)))
    out.append(_entry("finite_intertwining", "construction", fin.intertwining_defect(grp, u, rep=rep),
                      tol["finite_intertwining"], d=d))
    out.append(_entry("finite_imprimitivity", "construction", fin.imprimitivity_check(grp),
                      tol["finite_imprimitivity"], d=d))
    mult = fin.isotypic_decompose(grp, rep=rep)
    out.append(_entry("finite_multiplicity", "construction", abs(mult.multiplicity - d),
                      tol["finite_multiplicity"], d=d, multiplicity=mult.integer))
    rank = fin.minimality_rank(grp, u, rep=rep)
    out.append(_entry("finite_minimality", "construction", abs(rank - d * d), tol["finite_minimality"],
                      d=d, rank=rank))

    small = fin.FiniteHeisenberg(3)
    t = projector(fin.random_state_vector(3, int(rng.integers(2**31))))
    w = projector(fin.random_state_vector(3, int(rng.integers(2**31))))
    out.append(_entry("proof_identity", "construction", proof_identity_defect(small, t, w),
                      tol["proof_identity"], d=3))

    T = projector(fin.random_state_vector(d, int(rng.integers(2**31))))
    W = random_density(FockSpace(d, d), min(2, d), int(rng.integers(2**31)))
    rec = reconstruct(forward_model(W, T, grp), T, truth=W)
    out.append(_entry("finite_round_trip", "construction", rec.report["defect"], tol["finite_round_trip"], d=d))
    return out


def run_checks(cfg: RunConfig, regime: str = "all") -> dict:
    """Run the suite and return ``{"checks": [...], "passed": bool}``."""
    cfg.validate()
    groups = {"continuous": continuous_checks, "finite": finite_checks}
    if regime not in (*groups, "all"):
        raise ValueError(f"unknown regime {regime!r}")
    checks = []
    for key, fn in groups.items():
        if regime in (key, "all"):
            try:
                checks.extend(fn(cfg))
            except Exception as exc:  # surface the failing group by name
                raise CheckError(key, exc) from exc
    for c in checks:
        log.info("%-22s %-12s defect=%.3e tol=%.1e %s", c["name"], c["class"], c["defect"],
                 c["tolerance"], "pass" if c["pass"] else "FAIL")
    return {"checks": checks, "passed": all(c["pass"] for c in checks)}
