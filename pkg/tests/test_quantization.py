import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stieltjes_cs.errors import DimensionError, DomainError, RangeError
from stieltjes_cs.fock import build_hamiltonian, build_ladder, build_number, cs_truncation, x_values
from stieltjes_cs.quantization import (
    MAX_MOMENT_ORDER,
    RadialPolynomial,
    lower_symbol,
    lower_symbols,
    quantize,
    radial_moment_log,
    resolution_check,
    smoothness_probe,
    time_evolved_symbol,
    time_evolved_symbol_matrix,
    uncertainty_product,
    uncertainty_product_direct,
)

E2 = math.exp(2.0)
ZETA_GRID = [r * u for r in (0.5, 1.0, 2.0) for u in (1, 1j)]


def offdiag(op):
    return op - np.diag(np.diag(op))


class TestPolynomial:
    def test_evaluation(self):
        f = RadialPolynomial.monomial(2, 1, 3.0) + RadialPolynomial.constant(1.0)
        z = 0.5 - 1j
        assert f(z) == pytest.approx(3 * z**2 * z.conjugate() + 1)
        assert f.degree == 2

    @pytest.mark.parametrize("term", [(-1, 0, 1.0), (0.5, 0, 1.0)])
    def test_rejects_bad_exponents(self, term):
        with pytest.raises(DomainError):
            RadialPolynomial((term,))


class TestRadialMoments:
    def test_undeformed_is_factorial(self):
        for k in range(30):
            assert radial_moment_log(k, 1.0) == pytest.approx(math.lgamma(k + 1), abs=1e-12)

    def test_order_limit(self):
        with pytest.raises(RangeError) as info:
            radial_moment_log(MAX_MOMENT_ORDER + 1, E2)
        assert info.value.where == {"n": MAX_MOMENT_ORDER + 1}


class TestResolution:
    def test_undeformed(self):
        op = quantize(1.0, 1.0, 10)
        assert not np.any(offdiag(op))
        assert resolution_check(1.0, 10) < 1e-8

    def test_flagship(self):
        op = quantize(1.0, E2, 8)
        assert not np.any(offdiag(op))
        assert resolution_check(E2, 8) < 1e-6

    @pytest.mark.parametrize("q", [1.5, 20.0])
    def test_quadrature_route(self, q):
        assert resolution_check(q, 6, method="quadrature") < 1e-6


class TestQuantizedOperators:
    @pytest.mark.parametrize("q", [1.0, 1.5, E2])
    def test_zeta_gives_lowering(self, q):
        a, a_dag = build_ladder(q, 12)
        low = quantize(RadialPolynomial.monomial(1, 0), q, 12)
        up = quantize(RadialPolynomial.monomial(0, 1), q, 12)
        np.testing.assert_allclose(low, a, rtol=1e-10, atol=0)
        np.testing.assert_allclose(up, a_dag, rtol=1e-10, atol=0)
        np.testing.assert_array_equal(up, low.conj().T)

    @pytest.mark.parametrize("q", [1.0, E2])
    def test_modulus_squared_gives_shifted_number(self, q):
        op = quantize(RadialPolynomial.monomial(1, 1), q, 10)
        assert not np.any(offdiag(op))
        np.testing.assert_allclose(op.real, build_hamiltonian(q, 10), rtol=1e-10, atol=0)

    def test_single_diagonal_support(self):
        op = quantize(RadialPolynomial.monomial(3, 1), E2, 10)
        m, n = np.nonzero(op)
        assert np.all(n - m == 2)


class TestLowerSymbols:
    @pytest.mark.parametrize("q", [1.0, 1.5, E2, 20.0])
    @pytest.mark.parametrize("zeta", [0.0, 0.3 + 0.4j, -1.5j, 2.5])
    def test_basic_symbols(self, q, zeta):
        n_trunc = cs_truncation(zeta, q) + 1
        a, _ = build_ladder(q, n_trunc)
        assert abs(lower_symbol(a, zeta, q) - zeta) < 1e-10
        assert abs(lower_symbol(np.eye(n_trunc + 1), zeta, q) - 1) < 1e-12
        x = build_number(q, n_trunc)
        assert abs(lower_symbol(x, zeta, q) - abs(zeta) ** 2) < 1e-10 * max(1.0, abs(zeta) ** 2)

    def test_batch(self):
        a, _ = build_ladder(E2, 20)
        reports = lower_symbols(a, [0.1, 0.2j], E2)
        assert [r.zeta for r in reports] == [0.1, 0.2j]
        assert abs(reports[1].value - 0.2j) < 1e-10

    def test_support_too_large(self):
        a, _ = build_ladder(1.0, 4)
        with pytest.raises(DimensionError):
            lower_symbol(a, 3.0, 1.0)

    def test_non_square(self):
        with pytest.raises(DimensionError):
            lower_symbol(np.zeros((3, 4)), 0.1, 2.0)


class TestUncertainty:
    @pytest.mark.parametrize("q", [1.0, 1.5, E2, 20.0])
    def test_vacuum_value(self, q):
        assert uncertainty_product(0.0, q) == pytest.approx(q / 2, rel=1e-14)
        assert uncertainty_product_direct(0.0, q) == pytest.approx(q / 2, rel=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(r=st.floats(0.0, 5.0), theta=st.floats(0.0, 2 * math.pi))
    def test_undeformed_is_minimal_everywhere(self, r, theta):
        zeta = cmath.rect(r, theta)
        assert abs(uncertainty_product(zeta, 1.0) - 0.5) < 1e-12
        assert abs(uncertainty_product_direct(zeta, 1.0) - 0.5) < 1e-10

    @pytest.mark.parametrize("q", [1.5, E2])
    @pytest.mark.parametrize("zeta", ZETA_GRID)
    def test_routes_agree(self, q, zeta):
        a = uncertainty_product(zeta, q)
        b = uncertainty_product_direct(zeta, q)
        assert abs(a - b) / a < 1e-10

    def test_grows_with_deformation(self):
        assert uncertainty_product(1.0, E2) > uncertainty_product(1.0, 1.5) > 0.5

    def test_explicit_truncation_too_small(self):
        with pytest.raises(DimensionError):
            uncertainty_product(2.0, 1.0, n_trunc=3)


class TestTimeEvolution:
    @pytest.mark.parametrize("q", [1.0, E2])
    @pytest.mark.parametrize("zeta", ZETA_GRID)
    def test_routes_agree(self, q, zeta):
        for t in np.linspace(0.0, 2 * math.pi, 9):
            a = time_evolved_symbol(zeta, t, q)
            b = time_evolved_symbol_matrix(zeta, t, q)
            assert abs(a - b) < 1e-10

    @pytest.mark.parametrize("zeta", ZETA_GRID)
    def test_initial_value(self, zeta):
        assert abs(time_evolved_symbol(zeta, 0.0, E2) - zeta) < 1e-12

    @pytest.mark.parametrize("zeta", ZETA_GRID)
    def test_undeformed_rotation(self, zeta):
        for t in np.linspace(0.0, 2 * math.pi, 33):
            assert abs(time_evolved_symbol(zeta, t, 1.0) - zeta * cmath.exp(-1j * t)) < 1e-10

    @settings(max_examples=40, deadline=None)
    @given(r=st.floats(0.01, 3.0), t=st.floats(0.0, 50.0), q=st.sampled_from([1.5, E2, 20.0]))
    def test_modulus_bound(self, r, t, q):
        assert abs(time_evolved_symbol(r, t, q)) <= r * (1 + 1e-12)

    def test_vacuum(self):
        assert time_evolved_symbol(0.0, 1.0, E2) == 0


class TestSmoothness:
    def test_gradient_settles(self):
        coords = np.linspace(-1.0, 1.0, 3)
        out = smoothness_probe(RadialPolynomial.monomial(1, 1), E2, coords, coords)
        assert all(np.isfinite(out["max_gradient"]))
        assert out["refinement_change"] < 1e-3 * out["max_gradient"][0]

    def test_undeformed_modulus_symbol(self):
        # lower symbol of quantized |zeta|^2 at q = 1 is (q^2 + p^2)/2 + 1
        out = smoothness_probe(RadialPolynomial.monomial(1, 1), 1.0, [1.0], [0.0])
        assert out["max_gradient"] == pytest.approx([1.0, 1.0], rel=1e-6)


def test_x_values_consistent_with_number():
    np.testing.assert_array_equal(np.diag(build_number(E2, 7)), x_values(E2, 7))
