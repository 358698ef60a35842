"""Euler-Frobenius polynomials: exact coefficients, roots and finite differences."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oscquad.efpoly import (
    EFPolynomial,
    delta_zero,
    ef_coefficients,
    ef_roots_inside,
    ef_roots_inside_mp,
    horner,
)


class TestCoefficients:
    def test_degree_zero(self):
        assert ef_coefficients(0) == (1,)

    def test_degree_two(self):
        assert ef_coefficients(2) == (1, 4, 1)

    def test_degree_four(self):
        assert ef_coefficients(4) == (1, 26, 66, 26, 1)

    def test_negative_degree_rejected(self):
        with pytest.raises(ValueError):
            ef_coefficients(-1)

    @given(st.integers(min_value=0, max_value=12))
    def test_palindrome(self, k):
        c = ef_coefficients(k)
        assert c == c[::-1]

    @given(st.integers(min_value=0, max_value=12))
    def test_all_coefficients_positive(self, k):
        assert all(a > 0 for a in ef_coefficients(k))

    def test_value_at_one_is_factorial(self):
        # E_k(1) = (k+1)!  (sum of the Eulerian numbers of degree k+1)
        for k in range(9):
            assert sum(ef_coefficients(k)) == math.factorial(k + 1)

    def test_delta_zero_expansion_reproduces_coefficients(self):
        # E_k(x) = sum_i Delta^i 0^{k+1} (x-1)^{k+1-i}, exact for k <= 8
        for k in range(0, 9):
            expanded = np.zeros(k + 2)
            for i in range(k + 2):
                d = delta_zero(i, k + 1)
                if d == 0:
                    continue
                p = k + 1 - i
                for j in range(p + 1):
                    expanded[j] += d * math.comb(p, j) * (-1) ** (p - j)
            assert np.array_equal(expanded[: k + 1], np.array(ef_coefficients(k), dtype=float))
            assert expanded[k + 1] == 0.0

    def test_reciprocal_identity(self):
        # E_k(x) = x^k E_k(1/x) on (0.1, 0.9)
        rng = np.random.default_rng(7)
        for k in (2, 4, 6, 8):
            c = ef_coefficients(k)
            for x in rng.uniform(0.1, 0.9, 20):
                lhs = horner(c, x)
                rhs = x**k * horner(c, 1.0 / x)
                assert abs(lhs - rhs) <= 1e-9 * abs(lhs)


class TestRoots:
    def test_degree_two_root(self):
        (q1,) = ef_roots_inside(2)
        assert q1 == pytest.approx(math.sqrt(3) - 2, abs=1e-15)

    def test_degree_four_roots(self):
        # quadratic factors give q = (t + sqrt(t^2-4))/2 with t = -13 +- sqrt(105)
        expected = sorted(
            (t + math.sqrt(t * t - 4)) / 2 for t in (-13 - math.sqrt(105), -13 + math.sqrt(105))
        )
        got = ef_roots_inside(4)
        assert got == pytest.approx(expected, rel=1e-14)

    def test_root_count_and_range(self):
        for k in (2, 4, 6, 8, 10):
            roots = ef_roots_inside(k)
            assert len(roots) == k // 2
            assert all(-1.0 < q < 0.0 for q in roots)
            assert list(roots) == sorted(roots)

    def test_roots_satisfy_polynomial(self):
        for k in (2, 4, 6, 8, 10):
            c = ef_coefficients(k)
            scale = 1e-10 * max(abs(a) for a in c)
            for q in ef_roots_inside(k):
                assert abs(horner(c, q)) <= scale

    def test_reciprocal_pairing_full_product(self):
        # the k roots pair up as q * q' = 1, so their product is 1
        for k in (2, 4, 6, 8, 10):
            inside = ef_roots_inside(k)
            product = 1.0
            for q in inside:
                product *= q * (1.0 / q)
            assert product == pytest.approx(1.0, abs=1e-10)

    def test_odd_or_small_degree_rejected(self):
        for bad in (0, 1, 3, 5):
            with pytest.raises(ValueError):
                ef_roots_inside(bad)

    def test_mp_polish_agrees_with_float(self):
        for k in (2, 4, 6):
            for qf, qm in zip(ef_roots_inside(k), ef_roots_inside_mp(k)):
                assert abs(qf - float(qm)) <= 1e-15


class TestDeltaZero:
    @pytest.mark.parametrize(
        "i, j, expected",
        [(0, 0, 1), (1, 1, 1), (2, 3, 6), (3, 2, 0), (0, 5, 0), (4, 4, 24)],
    )
    def test_examples(self, i, j, expected):
        assert delta_zero(i, j) == expected

    @given(st.integers(min_value=1, max_value=10), st.integers(min_value=0, max_value=10))
    def test_vanishes_above_diagonal(self, extra, j):
        assert delta_zero(j + extra, j) == 0

    def test_stirling_factorial_identity(self):
        # Delta^j 0^j = j!
        for j in range(1, 10):
            assert delta_zero(j, j) == math.factorial(j)

    def test_negative_indices_rejected(self):
        with pytest.raises(ValueError):
            delta_zero(-1, 0)


class TestEFPolynomial:
    def test_build_and_call(self):
        p = EFPolynomial.build(4)
        assert p.degree == 4
        assert p.coeffs == (1, 26, 66, 26, 1)
        assert p(1.0) == pytest.approx(120.0)
        for q in p.roots_inside:
            assert abs(p(q)) < 1e-8

    def test_odd_degree_has_no_stored_roots(self):
        assert EFPolynomial.build(3).roots_inside == ()
