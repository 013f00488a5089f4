import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusharmonic import (
    EdgeWeights,
    NotClosedError,
    OneForm,
    SideMismatchError,
    bracket,
    build_operators,
    exterior_derivative,
    harmonic_form,
    hodge_star,
    integrate,
    is_closed,
    is_coclosed,
    is_exact,
    label_form,
    one_vertex_triangulation,
    pairing,
    periods,
    square_grid,
)
from torusharmonic.forms import as_dual

from conftest import log_uniform, named_complexes

COMPLEXES = named_complexes()


def test_derivative_of_constant_is_zero():
    cx = square_grid(3)
    assert np.all(exterior_derivative(cx, np.full(9, 2.5)).values == 0)


def test_derivative_on_one_vertex_triangulation_vanishes():
    cx = one_vertex_triangulation()
    assert np.all(exterior_derivative(cx, [7.0]).values == 0)


def test_derivative_of_indicator_on_two_by_two_grid():
    cx = square_grid(2)
    f = np.zeros(4)
    f[0] = 1.0
    df = exterior_derivative(cx, f).values
    touching = (cx.tails == 0) | (cx.heads == 0)
    assert touching.sum() == 4
    assert np.all(np.abs(df[touching]) == 1)
    assert np.all(df[~touching] == 0)
    # +1 into the vertex, -1 out of it
    assert np.all(df[cx.heads == 0] == 1) and np.all(df[cx.tails == 0] == -1)


@pytest.mark.parametrize("name", list(COMPLEXES))
def test_label_forms_have_unit_periods(name):
    cx = COMPLEXES[name]
    assert is_closed(label_form(cx, 0))
    assert periods(label_form(cx, 0)) == (1.0, 0.0)
    assert periods(label_form(cx, 1)) == (0.0, 1.0)


@pytest.mark.parametrize("name", list(COMPLEXES))
def test_periods_linearity_with_exact_part(name):
    cx = COMPLEXES[name]
    f = np.random.default_rng(1).normal(size=cx.num_vertices)
    omega = 3 * label_form(cx, 0) - 2 * label_form(cx, 1) + exterior_derivative(cx, f)
    A, B = periods(omega)
    assert A == pytest.approx(3, abs=1e-12) and B == pytest.approx(-2, abs=1e-12)
    assert periods(exterior_derivative(cx, f)) == pytest.approx((0, 0), abs=1e-12)


def test_non_closed_form_is_detected():
    cx = square_grid(3)
    vals = np.zeros(cx.num_edges)
    vals[4] = 1.0
    omega = OneForm(cx, vals)
    chk = is_closed(omega)
    assert not chk and len(chk.offenders()) == 2
    with pytest.raises(NotClosedError, match="not closed"):
        periods(omega)
    with pytest.raises(NotClosedError, match="inconsistent integration"):
        integrate(cx, vals)


def test_any_form_on_one_vertex_is_coclosed():
    cx = one_vertex_triangulation()
    omega = OneForm(cx, np.random.default_rng(0).normal(size=3))
    assert is_coclosed(omega)
    assert is_coclosed(omega, EdgeWeights([1.0, -3.0, 2.0]))


def test_exact_form_is_coclosed_iff_potential_is_harmonic():
    cx = square_grid(3)
    rng = np.random.default_rng(2)
    f = rng.normal(size=9)
    assert not is_coclosed(exterior_derivative(cx, f))
    assert is_coclosed(exterior_derivative(cx, np.ones(9)))


@pytest.mark.parametrize("name", list(COMPLEXES))
def test_exactness_criterion(name):
    cx = COMPLEXES[name]
    rng = np.random.default_rng(3)
    f = rng.normal(size=cx.num_vertices)
    assert is_exact(exterior_derivative(cx, f))
    assert not is_exact(exterior_derivative(cx, f) + label_form(cx, 1) * 1e-3)
    g, (A, B) = integrate(cx, exterior_derivative(cx, f).values)
    assert np.allclose(g, f - f[0], atol=1e-12) and abs(A) < 1e-12 and abs(B) < 1e-12


def test_integrate_accepts_complex_values():
    cx = square_grid(3, 2)
    rng = np.random.default_rng(4)
    f = rng.normal(size=6) + 1j * rng.normal(size=6)
    vals = f[cx.heads] - f[cx.tails] + cx.labels @ np.array([1 + 2j, -0.5 + 1j])
    g, (A, B) = integrate(cx, vals)
    assert A == pytest.approx(1 + 2j) and B == pytest.approx(-0.5 + 1j)
    assert np.allclose(g[cx.heads] - g[cx.tails] + A * cx.labels[:, 0] + B * cx.labels[:, 1], vals)


def test_hodge_star_identity_weights_copies_values():
    cx = square_grid(2)
    omega = label_form(cx, 0)
    star = hodge_star(omega, EdgeWeights.uniform(8))
    assert star.side == "dual" and star.complex is cx.dual
    assert np.array_equal(star.values, omega.values)


@pytest.mark.parametrize("name", list(COMPLEXES))
def test_double_star_is_minus_identity(name):
    cx = COMPLEXES[name]
    rng = np.random.default_rng(5)
    w = EdgeWeights(log_uniform(rng, cx.num_edges) * rng.choice([-1, 1], cx.num_edges))
    omega = OneForm(cx, rng.normal(size=cx.num_edges))
    back = hodge_star(hodge_star(omega, w), w)
    assert back.complex is cx and back.side == "primal"
    assert np.allclose(back.values, -omega.values, rtol=1e-14)


def test_hodge_star_rejects_zero_weight():
    cx = one_vertex_triangulation()
    with pytest.raises(ValueError):
        hodge_star(label_form(cx, 0), EdgeWeights([1.0, 0.0, 1.0]))


def test_star_of_harmonic_form_on_one_vertex_is_closed_on_hexagon():
    cx = one_vertex_triangulation()
    w = EdgeWeights([1.0, 2.0, 3.0])
    omega = harmonic_form(build_operators(cx, w), (0.7, -1.3))
    star = hodge_star(omega, w)
    assert star.complex.num_faces == 1 and len(star.complex.faces[0]) == 6
    assert is_closed(star)


def test_pairing_side_checks():
    cx = square_grid(2)
    omega = label_form(cx, 0)
    with pytest.raises(SideMismatchError):
        pairing(omega, omega)
    with pytest.raises(SideMismatchError):
        pairing(as_dual(omega), as_dual(omega))
    with pytest.raises(SideMismatchError):
        pairing(omega, as_dual(label_form(square_grid(2), 0)))
    with pytest.raises(SideMismatchError):
        is_coclosed(as_dual(omega))


def test_bracket_of_standard_basis():
    assert bracket((1, 0), (0, 1)) == 1
    assert bracket((0, 1), (1, 0)) == -1


def _stokes_case(cx, rng, weights=None):
    """Random closed primal form and the star of a random harmonic form."""
    w = weights or EdgeWeights(log_uniform(rng, cx.num_edges))
    bundle = build_operators(cx, w)
    P = rng.normal(size=2)
    f = rng.normal(size=cx.num_vertices)
    omega = exterior_derivative(cx, f) + P[0] * label_form(cx, 0) + P[1] * label_form(cx, 1)
    Q = rng.normal(size=2)
    eta = hodge_star(harmonic_form(bundle, Q), w)
    return omega, eta, P


@pytest.mark.parametrize("name", list(COMPLEXES))
def test_stokes_pairing_identity(name):
    cx = COMPLEXES[name]
    rng = np.random.default_rng(6)
    for _ in range(10):
        omega, eta, P = _stokes_case(cx, rng)
        Pt = periods(eta)
        lhs = pairing(omega, eta)
        rhs = bracket(P, Pt)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9 * np.abs(eta.values).max())


def test_stokes_exact_form_pairs_to_zero():
    cx = square_grid(3)
    rng = np.random.default_rng(7)
    w = EdgeWeights(log_uniform(rng, cx.num_edges))
    eta = hodge_star(harmonic_form(build_operators(cx, w), (1.0, 2.0)), w)
    omega = exterior_derivative(cx, rng.normal(size=9))
    assert abs(pairing(omega, eta)) < 1e-10


def test_stokes_unit_periods_pair_to_one():
    # primal periods (1, 0) against a dual form with periods (0, 1)
    cx = square_grid(2)
    w = EdgeWeights.uniform(cx.num_edges)
    bundle = build_operators(cx, w)
    omega = label_form(cx, 0)
    # harmonic form whose star has periods (0, 1): solve with the response matrix
    from torusharmonic import response_matrix

    L = response_matrix(bundle).matrix
    U = np.linalg.solve(L, [0.0, 1.0])
    eta = hodge_star(harmonic_form(bundle, U), w)
    assert periods(eta) == pytest.approx((0.0, 1.0), abs=1e-12)
    assert pairing(omega, eta) == pytest.approx(1.0, abs=1e-12)


def test_stokes_brute_force_on_two_by_two_grid():
    cx = square_grid(2)
    rng = np.random.default_rng(8)
    omega, eta, P = _stokes_case(cx, rng)
    brute = sum(omega.values[e] * eta.values[e] for e in range(cx.num_edges))
    assert brute == pytest.approx(bracket(P, periods(eta)), rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(
    a=st.floats(-5, 5),
    b=st.floats(-5, 5),
    p=st.tuples(st.floats(-3, 3), st.floats(-3, 3)),
    q=st.tuples(st.floats(-3, 3), st.floats(-3, 3)),
    seed=st.integers(0, 2**16),
)
def test_period_linearity_property(a, b, p, q, seed):
    cx = COMPLEXES["tri2x3"]
    rng = np.random.default_rng(seed)

    def closed(P):
        f = rng.normal(size=cx.num_vertices)
        return exterior_derivative(cx, f) + P[0] * label_form(cx, 0) + P[1] * label_form(cx, 1)

    omega, eta = closed(p), closed(q)
    got = periods(a * omega + b * eta)
    want = a * np.array(periods(omega)) + b * np.array(periods(eta))
    assert np.allclose(got, want, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**16), which=st.sampled_from(list(COMPLEXES)))
def test_stokes_property(seed, which):
    cx = COMPLEXES[which]
    rng = np.random.default_rng(seed)
    omega, eta, P = _stokes_case(cx, rng)
    scale = max(1.0, np.abs(omega.values).max() * np.abs(eta.values).max())
    assert abs(pairing(omega, eta) - bracket(P, periods(eta))) <= 1e-9 * scale
