import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from hypercount.constants import (AssemblyConfig, MCEstimate,
                                  QuadratureEstimate, assemble_constant,
                                  beta_inner_volume, beta_tilde, edge_count,
                                  euler_product, eulerian_polynomial,
                                  excedance_polynomial, local_density,
                                  local_factor_from_graph, mu_infinity,
                                  mu_infinity_scale, polytope_constraints,
                                  polytope_feasible, polytope_volume,
                                  free_indices, zeta_value, _cube_slab_vec)
from hypercount.errors import ContractViolation, ResourceLimit
from hypercount.lattice import slab_volume_float
from hypercount.toric import enumerate_variety

from oracles import dilation_volume_n3, eulerian_by_series

# closed form of the n = 3 weighted-slab integral: split off the region
# where the band covers the whole square and integrate the corner-cut
# term exactly (dilogarithm at 2 contributes pi^2/6)
BETA3 = 4 * math.log(2) + math.pi ** 2 / 6 - 0.5


def test_eulerian_examples_and_recurrence():
    assert eulerian_polynomial(1) == [1]
    assert eulerian_polynomial(2) == [1, 1]
    assert eulerian_polynomial(3) == [1, 4, 1]
    assert eulerian_polynomial(4) == [1, 11, 11, 1]
    assert eulerian_polynomial(5) == [1, 26, 66, 26, 1]


@pytest.mark.parametrize("n", range(1, 9))
def test_eulerian_matches_series_closed_form(n):
    assert eulerian_polynomial(n) == eulerian_by_series(n)


@pytest.mark.parametrize("n", range(1, 11))
def test_eulerian_shape(n):
    p = eulerian_polynomial(n)
    assert len(p) == n
    assert p == p[::-1]
    assert p[0] == 1
    assert sum(p) == math.factorial(n)
    if n >= 2:
        assert p[1] == 2 ** n - n - 1


def test_excedance_examples_and_equality():
    assert excedance_polynomial(2) == [1, 1]
    assert excedance_polynomial(3) == [1, 4, 1]
    assert excedance_polynomial(5) == [1, 26, 66, 26, 1]
    for n in range(1, 8):
        assert excedance_polynomial(n) == eulerian_polynomial(n)
    with pytest.raises(ResourceLimit):
        excedance_polynomial(9)


def test_local_factor_from_graph():
    b = local_factor_from_graph(3)
    assert b == [1, 0, -9, 16, -9, 0, 1]
    assert b[0] == 1 and b[1] == 0
    assert sum(b) == 0
    assert b[2] == -edge_count(3) == -(2 ** 2 * (2 ** 3 + 1)) + 3 ** 3
    expansion = [0] * 7
    for i, c in enumerate([1, -4, 6, -4, 1]):
        for j, d in enumerate([1, 4, 1]):
            expansion[i + j] += c * d
    assert b == expansion
    with pytest.raises(ResourceLimit):
        local_factor_from_graph(4)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_zeta_against_mpmath(n):
    value, err = zeta_value(n)
    assert err <= 1e-12
    assert abs(value - float(mpmath.zeta(n))) <= err


def test_local_density_examples():
    assert local_density(3, 2) == Fraction(91, 512)
    assert local_density(3, 2) == (Fraction(1, 2) ** 4 * Fraction(13, 4)
                                   * Fraction(7, 8))
    # the same factor through the finite-field count
    c32 = enumerate_variety("C", 3, 2).count
    assert c32 == 13
    assert local_density(3, 2) == (Fraction(1, 2) ** 4 * Fraction(7, 8)
                                   * Fraction(c32, 4))


@pytest.mark.parametrize("n,p", [(3, 2), (3, 3), (3, 5), (3, 7),
                                 (4, 2), (4, 3), (4, 5), (4, 7)])
def test_padic_identity(n, p):
    from hypercount.constants import poly_eval
    lhs = Fraction(p) ** (n - 1) * poly_eval(eulerian_polynomial(n), Fraction(1, p))
    assert lhs == enumerate_variety("C", n, p).count


def test_euler_product_examples_and_monotonicity():
    ep = euler_product(3, 2)
    assert ep.value == pytest.approx(91 / 512, abs=1e-14)
    assert ep.lower <= 91 / 512 <= ep.upper
    vals = [euler_product(3, pl).value for pl in (2, 3, 5, 7, 11, 13, 100)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    for p in (2, 3, 5, 7, 11):
        assert 0 < float(local_density(3, p)) < 1
        assert 0 < float(local_density(4, p)) < 1


def test_euler_product_tail_shrinks():
    widths = {}
    for pl in (10 ** 3, 10 ** 4, 10 ** 5):
        ep = euler_product(3, pl)
        widths[pl] = (ep.upper - ep.lower) / ep.value
        assert ep.lower < ep.value < ep.upper
    assert widths[10 ** 4] < widths[10 ** 3] / 5
    assert widths[10 ** 5] < widths[10 ** 4] / 5
    best = euler_product(3, 10 ** 6)
    for pl in (10 ** 3, 10 ** 4, 10 ** 5):
        ep = euler_product(3, pl)
        assert ep.lower <= best.value <= ep.upper


def test_polytope_dimensions_and_constraints():
    assert free_indices(3) == [2, 4, 5, 6]
    assert len(free_indices(4)) == 11
    # frozen n = 4 system, written out from the bit conditions by hand
    expect = [
        ({8: 1, 9: 1, 10: 1, 11: 1, 12: 1, 13: 1, 14: 1}, 1),
        ({1: 1, 9: 1, 11: 1, 4: -1, 6: -1, 12: -1, 14: -1}, 0),
        ({1: 1, 9: 1, 13: 1, 2: -1, 6: -1, 10: -1, 14: -1}, 0),
        # index 10 cancels between the two sum pairs; 12 meets neither
        ({2: 1, 14: 1, 4: 1, 6: 2, 1: -1, 13: -1, 9: -2, 8: -1, 11: -1}, 0),
    ]
    got = polytope_constraints(4)
    assert len(got) == len(expect)
    for (ce, be), (cg, bg) in zip(expect, got):
        ce = {k: v for k, v in ce.items() if v}
        cg = {k: v for k, v in cg.items() if v}
        assert (ce, be) == (cg, bg)


def test_polytope_feasibility_examples():
    assert polytope_feasible(3, (0, 0, 0, 0))
    assert not polytope_feasible(3, (1, 0, 0, 0))  # t2 > t4 + t5
    assert polytope_feasible(3, (0.2, 0.1, 0.1, 0.3))


def test_polytope_volume_exact():
    v = polytope_volume(3, "exact")
    assert isinstance(v, Fraction)
    assert 0 < v <= 1
    assert v == dilation_volume_n3()
    with pytest.raises(ResourceLimit):
        polytope_volume(4, "exact")


def test_polytope_volume_mc_agrees_and_reproduces():
    v = float(polytope_volume(3, "exact"))
    est = polytope_volume(3, "mc", samples=10 ** 6, seed=0)
    assert isinstance(est, MCEstimate)
    assert abs(est.value - v) <= 3 * est.standard_error
    again = polytope_volume(3, "mc", samples=10 ** 6, seed=0)
    assert again == est
    other = polytope_volume(3, "mc", samples=10 ** 6, seed=1)
    assert other.value != est.value
    est4 = polytope_volume(4, "mc", samples=3 * 10 ** 5, seed=0)
    assert 0 < est4.value < 1


def test_cube_slab_vectorized_matches_exact():
    rng = np.random.default_rng(31)
    for m in (2, 3):
        w = rng.uniform(1e-4, 1.0, size=(60, m))
        c = rng.uniform(0.0, 2.5, size=60)
        got = _cube_slab_vec(w, c)
        # the m = 3 corner expansion loses ~eps * t^3/(6 prod w) to
        # cancellation; weights here are >= 1e-4, so 1e-7 dominates it
        tol_abs = 1e-12 if m == 2 else 1e-7
        for i in range(60):
            exact = slab_volume_float(list(w[i]), float(c[i]))
            assert got[i] == pytest.approx(exact, abs=tol_abs)


def test_beta_tilde_quadrature_n3():
    est = beta_tilde(3, tol=1e-8)
    assert isinstance(est, QuadratureEstimate)
    assert est.error_bound <= 1e-7
    assert abs(est.value - BETA3) <= max(est.error_bound, 1e-8)


def test_beta_inner_volume_examples():
    assert beta_inner_volume(3, (1.0, 1.0)) == 3.0
    assert beta_inner_volume(3, (1e-12, 0.5)) == 4.0
    assert beta_inner_volume(3, (0.0, 0.5)) == 4.0
    for n in (3, 4):
        rng = np.random.default_rng(n)
        for _ in range(20):
            u = [float(v) for v in rng.random(n - 1)]
            assert 0 < beta_inner_volume(n, u) <= 2 ** (n - 1)


def test_beta_tilde_mc_n4_consistent():
    est = beta_tilde(4, samples=2 * 10 ** 5, seed=0)
    assert isinstance(est, MCEstimate)
    assert 0 < est.value <= 8
    again = beta_tilde(4, samples=2 * 10 ** 5, seed=0)
    assert again == est


def test_mu_infinity_scale_and_reproducibility():
    assert mu_infinity_scale(3) == 72
    assert mu_infinity_scale(4) == 768
    est = mu_infinity(3, samples=10 ** 5, seed=0)
    assert mu_infinity(3, samples=10 ** 5, seed=0) == est


def test_mu_infinity_matches_beta_pipeline():
    est = mu_infinity(3, samples=10 ** 6, seed=0)
    target = 72 * BETA3
    assert abs(est.value - target) <= 3 * est.standard_error
    est4 = mu_infinity(4, samples=2 * 10 ** 5, seed=0)
    bt4 = beta_tilde(4, samples=2 * 10 ** 5, seed=1)
    combined = 3 * (est4.standard_error + 768 * bt4.standard_error)
    assert abs(est4.value - 768 * bt4.value) <= combined


def test_assemble_constant_quick():
    cfg = AssemblyConfig(prime_limit=10 ** 4, beta_samples=10 ** 5,
                         mu_samples=3 * 10 ** 5, v_samples=10 ** 5, seed=0)
    br = assemble_constant(3, cfg)
    assert br.beta_brauer == 1
    assert br.alpha == pytest.approx(br.V / 243, abs=1e-15)
    assert br.V_exact == Fraction(1, 16)
    assert 0 < br.euler.value <= 1
    assert br.alpha > 0 and br.omega_infinity.value > 0
    assert br.c_formula == pytest.approx(br.c_peyre, rel=2e-3)
    assert br.discrepancy_within_budget
    with pytest.raises(ResourceLimit):
        assemble_constant(5, cfg)


def test_assemble_constant_mc_alpha_side():
    cfg = AssemblyConfig(prime_limit=10 ** 4, v_method="mc",
                         beta_samples=10 ** 5, mu_samples=3 * 10 ** 5,
                         v_samples=10 ** 6, seed=0)
    br = assemble_constant(3, cfg)
    assert br.discrepancy_within_budget
    assert br.relative_discrepancy < 5e-3


def test_budget_errors():
    with pytest.raises(ContractViolation):
        euler_product(3, 1)
    with pytest.raises(ResourceLimit):
        mu_infinity(5, 100, 0)
    with pytest.raises(ResourceLimit):
        polytope_volume(5, "mc", 100, 0)
