import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasepom import kernels
from phasepom._fallback import displacement_batch as fallback_batch
from phasepom.fock import FockSpace, displacement, weyl_phase

from oracles import expm_displacement, laguerre_element

compiled = pytest.mark.skipif("compiled" not in kernels.BACKENDS, reason="extension not built")

finite_floats = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)
betas = st.builds(complex, finite_floats, finite_floats)


def test_python_backend_always_available():
    assert "python" in kernels.BACKENDS
    assert kernels.BACKEND in kernels.BACKENDS


@compiled
def test_compiled_matches_fallback_on_random_batch():
    rng = np.random.default_rng(0)
    b = rng.normal(size=300) + 1j * rng.normal(size=300)
    fast = kernels.displacement_batch(b, 40, backend="compiled")
    slow = kernels.displacement_batch(b, 40, backend="python")
    np.testing.assert_allclose(fast, slow, rtol=0, atol=1e-13)


@compiled
@settings(max_examples=40, deadline=None)
@given(beta=betas, dim=st.integers(1, 30))
def test_compiled_matches_fallback_property(beta, dim):
    b = np.array([beta])
    np.testing.assert_allclose(
        kernels.displacement_batch(b, dim, backend="compiled"),
        fallback_batch(b, dim),
        rtol=0,
        atol=1e-13,
    )


def test_backend_env_var_forces_fallback():
    code = "import phasepom.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, PHASEPOM_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_thread_count_from_environment(monkeypatch):
    monkeypatch.setenv("PHASEPOM_THREADS", "3")
    assert kernels.num_threads() == 3
    monkeypatch.setenv("PHASEPOM_THREADS", "0")
    assert kernels.num_threads() == 1


@pytest.mark.parametrize("backend", sorted(kernels.BACKENDS))
def test_matches_matrix_exponential(backend):
    rng = np.random.default_rng(7)
    for _ in range(5):
        beta = 1.5 * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1))
        d = kernels.displacement_batch(np.array([beta]), 60, backend=backend)[0]
        np.testing.assert_allclose(d[:20, :20], expm_displacement(beta, 20), atol=1e-12)


def test_matches_laguerre_closed_form():
    beta = 0.8 - 1.3j
    d = displacement(beta, FockSpace(12, 4))
    expected = np.array([[laguerre_element(beta, m, n) for n in range(12)] for m in range(12)])
    np.testing.assert_allclose(d, expected, atol=1e-14)


def test_unit_amplitude_ground_entry():
    d = displacement(1.0, FockSpace(10))
    assert d[0, 0] == pytest.approx(np.exp(-0.5), abs=1e-16)


def test_zero_amplitude_is_identity_exactly():
    assert np.array_equal(displacement(0.0, FockSpace(8)), np.eye(8))


def test_non_finite_amplitude_rejected():
    with pytest.raises(ValueError):
        displacement(complex(np.inf, 0), FockSpace(5))


def test_large_amplitude_stays_finite():
    d = displacement(8.0 + 3.0j, FockSpace(200))
    assert np.all(np.isfinite(d))
    # the first column is a coherent state of amplitude beta; mass leaks above N=200 only marginally
    assert np.linalg.norm(d[:, 0]) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(beta=betas)
def test_adjoint_is_negated_amplitude(beta):
    space = FockSpace(25)
    np.testing.assert_allclose(displacement(-beta, space), displacement(beta, space).conj().T, atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(b1=betas, b2=betas)
def test_weyl_relation_on_leading_block(b1, b2):
    space = FockSpace(90)
    lhs = displacement(b1, space) @ displacement(b2, space)
    rhs = weyl_phase(b1, b2) * displacement(b1 + b2, space)
    np.testing.assert_allclose(lhs[:12, :12], rhs[:12, :12], atol=1e-10)
