import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasepom.errors import DimensionMismatch
from phasepom.finite import (
    FiniteGroupElement,
    FiniteHeisenberg,
    act,
    commutator,
    finite_qu,
    group_mul,
    imprimitivity_check,
    induce_from_function,
    induced_function,
    induced_inner,
    induced_rep,
    intertwiner,
    intertwining_defect,
    isotypic_decompose,
    minimality_rank,
    neumark_defect_finite,
    neumark_projection,
    orthogonality_gram,
    random_state_vector,
    resolution_identity,
    schrodinger_rep,
)

MODULI = [3, 5, 7]


def elements_of(d):
    r = st.integers(0, d - 1)
    return st.builds(lambda t, q, p: FiniteGroupElement(t, q, p, d), r, r, r)


@pytest.fixture(scope="module", params=MODULI)
def grp(request):
    return FiniteHeisenberg(request.param)


# ---- group and representation ------------------------------------------------


@pytest.mark.parametrize("d", [0, 1, 2, 4, 10, 33])
def test_modulus_validation(d):
    with pytest.raises(ValueError):
        FiniteHeisenberg(d)


@pytest.mark.parametrize("d,c", [(9, 3), (5, 0), (15, 5)])
def test_non_primitive_character_rejected(d, c):
    with pytest.raises(ValueError, match="primitive"):
        FiniteHeisenberg(d, character=c)


def test_modulus_mismatch_in_product():
    with pytest.raises(ValueError):
        group_mul(FiniteGroupElement(0, 1, 1, 3), FiniteGroupElement(0, 1, 1, 5))


def test_elements_reduce_mod_d():
    assert FiniteGroupElement(7, -1, 12, 5) == FiniteGroupElement(2, 4, 2, 5)


@settings(max_examples=50, deadline=None)
@given(data=st.data(), d=st.sampled_from(MODULI))
def test_group_axioms(data, d):
    a, b, c = (data.draw(elements_of(d)) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    e = FiniteGroupElement(0, 0, 0, d)
    assert a * a.inverse() == e and a.inverse() * a == e


@settings(max_examples=50, deadline=None)
@given(data=st.data(), d=st.sampled_from(MODULI))
def test_commutators_are_central(data, d):
    a, b = data.draw(elements_of(d)), data.draw(elements_of(d))
    k = commutator(a, b)
    assert (k.q, k.p) == (0, 0)
    assert k.t == (2 * (a.p * b.q - a.q * b.p) * (d + 1) // 2) % d


@settings(max_examples=50, deadline=None)
@given(data=st.data(), d=st.sampled_from(MODULI))
def test_schrodinger_is_homomorphism(data, d):
    grp = FiniteHeisenberg(d)
    rep = schrodinger_rep(grp)
    a, b = data.draw(elements_of(d)), data.draw(elements_of(d))
    np.testing.assert_allclose(rep(a) @ rep(b), rep(a * b), atol=1e-13)


def test_schrodinger_unitary_and_traceless_off_identity(grp):
    rep = schrodinger_rep(grp)
    d = grp.modulus
    for q, p in grp.points():
        m = rep.at(q, p)
        np.testing.assert_allclose(m @ m.conj().T, np.eye(d), atol=1e-14)
        expected = d if (q, p) == (0, 0) else 0
        assert abs(np.trace(m) - expected) < 1e-12


@settings(max_examples=30, deadline=None)
@given(data=st.data(), d=st.sampled_from([3, 5]))
def test_induced_rep_is_homomorphism(data, d):
    grp = FiniteHeisenberg(d)
    a, b = data.draw(elements_of(d)), data.draw(elements_of(d))
    np.testing.assert_allclose(induced_rep(grp, a) @ induced_rep(grp, b), induced_rep(grp, a * b), atol=1e-13)


def test_action_on_phase_space(grp):
    a = grp.element(2, 1, 2)
    assert act(a, 0, 0) == (1, 2)


def test_induced_function_is_equivariant():
    grp = FiniteHeisenberg(5)
    rng = np.random.default_rng(1)
    phi = rng.normal(size=(5, 5, 5)) + 1j * rng.normal(size=(5, 5, 5))
    f = induced_function(grp, phi)
    # f(g (t, 0, 0)) = conj(chi(t)) f(g)
    for t in range(5):
        np.testing.assert_allclose(np.roll(f, -t, axis=0), np.conj(grp.chi(t)) * f, atol=1e-12)
    assert induce_from_function(grp, phi).shape == (25,)


# ---- acceptance-level identities --------------------------------------------


def test_resolution_of_identity(grp):
    assert resolution_identity(grp) <= 1e-12


def test_resolution_with_other_orthonormal_basis(grp):
    d = grp.modulus
    rng = np.random.default_rng(d)
    q, _ = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    assert resolution_identity(grp, vectors=q.T) <= 1e-12


def test_resolution_fails_for_repeated_vector(grp):
    e0 = np.eye(grp.modulus)[0]
    assert resolution_identity(grp, vectors=[e0] * grp.modulus) >= 0.5


def test_orthogonality_relations(grp):
    d = grp.modulus
    np.testing.assert_allclose(orthogonality_gram(grp), np.eye(d * d), atol=1e-12)


def test_formal_degree_fixes_weight(grp):
    # unweighted counting measure would give formal degree 1/d
    d = grp.modulus
    assert np.allclose(d * orthogonality_gram(grp), d * np.eye(d * d))
    w = intertwiner(grp, np.eye(d)[0])
    assert induced_inner(w[:, 0], w[:, 0], grp) == pytest.approx(1.0, abs=1e-13)
    assert np.vdot(w[:, 0], w[:, 0]).real == pytest.approx(d, abs=1e-12)


def test_isotypic_multiplicity(grp):
    rep = isotypic_decompose(grp)
    assert rep.integer == grp.modulus
    assert abs(rep.multiplicity - grp.modulus) <= 1e-12
    assert rep.range_overlap <= 1e-12


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("d", [3, 5])
def test_minimality_full_rank(d, seed):
    grp = FiniteHeisenberg(d)
    assert minimality_rank(grp, random_state_vector(d, seed)) == d * d


def test_minimality_drops_on_fewer_points():
    grp = FiniteHeisenberg(5)
    u = random_state_vector(5, 0)
    assert minimality_rank(grp, u, points=grp.points()[:7]) == 7


@pytest.mark.parametrize("seed", range(3))
def test_intertwining(seed):
    grp = FiniteHeisenberg(5)
    assert intertwining_defect(grp, random_state_vector(5, seed)) <= 1e-13


def test_imprimitivity(grp):
    assert imprimitivity_check(grp) <= 1e-12


def test_neumark_projection_is_projection(grp):
    u = random_state_vector(grp.modulus, 2)
    P = neumark_projection(grp, u)
    np.testing.assert_allclose(P @ P, P, atol=1e-13)
    np.testing.assert_allclose(P, P.conj().T, atol=1e-14)
    assert np.trace(P).real == pytest.approx(grp.modulus, abs=1e-12)


def test_finite_neumark_and_normalization(grp):
    d = grp.modulus
    rng = np.random.default_rng(4)
    u = random_state_vector(d, 5)
    mask = rng.random((d, d)) < 0.4
    v, w = random_state_vector(d, 6), random_state_vector(d, 7)
    assert neumark_defect_finite(grp, u, mask, v, w) <= 1e-13
    np.testing.assert_allclose(finite_qu(grp, u), np.eye(d), atol=1e-13)


def test_intertwiner_input_validation():
    grp = FiniteHeisenberg(3)
    with pytest.raises(DimensionMismatch):
        intertwiner(grp, np.ones(4))
    with pytest.raises(ValueError):
        intertwiner(grp, np.zeros(3))
