"""Quadrature on the classical groups against closed-form Haar expectations.

The closed forms were confirmed with an independent Monte-Carlo / Gauss
quadrature oracle before the build: E|w| = 4/(3 pi) per coordinate on S^3
(so abs-sum integrates to 16/(3 pi)), E[w^2] = 1/4, E[sqrt(w^2+x^2)] = 2/3
(w^2 + x^2 is uniform on [0,1]), trace over SO(3) integrates to 0 by
character theory, and the lift law is the 2/3 factor from radius-phase
independence on S^3.
"""

import math
import random
from fractions import Fraction

import mpmath
import pytest

from haar.exactreal import Dyadic, Interval, NoConvergence, pi_enclosure
from haar.functions import (
    builtin_integrand, invert_circle_integrand, invert_su2_integrand,
    translate_circle_integrand, translate_su2_integrand,
)
from haar.groups import Versor, make_group
from haar.quadrature import (
    IntegrandSpec, InvalidBound, ParamPoint, haar_integral_circle,
    haar_integral_derived, haar_integral_su2, jacobian, lift_circle_function,
    psi,
)

mpmath.mp.prec = 120


def mp_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    v = Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)
    return -v if sign else v


TRUE_VALUES = {
    "abs-sum": mp_fraction(16 / (3 * mpmath.pi)),
    "w2": Fraction(1, 4),
    "one": Fraction(1),
    "trace": Fraction(0),
    "sign": Fraction(0),
    "re": Fraction(0),
    "im": Fraction(0),
    "re2": Fraction(1, 2),
    "abs-re": mp_fraction(2 / mpmath.pi),
}

LIFT_TRUE = {name: Fraction(2, 3) * TRUE_VALUES[name]
             for name in ("one", "re", "re2", "im", "abs-re")}


def check(cv, true: Fraction, n: int):
    assert abs(cv.value.as_fraction() - true) <= Fraction(1, 1 << n), \
        (float(cv.value), float(true))


class TestPsi:
    def zero(self):
        return Interval.point(Dyadic(0))

    def test_at_origin(self):
        q = psi(ParamPoint(self.zero(), self.zero(), self.zero()), 35)
        assert q.a.contains(Fraction(1)) and q.b.contains(Fraction(0))

    def test_quarter_turns(self):
        half_pi = pi_enclosure(45).scale(Dyadic(1, -1))
        q = psi(ParamPoint(half_pi, half_pi, self.zero()), 35)
        assert q.c.contains(Fraction(1))            # j
        q = psi(ParamPoint(half_pi, self.zero(), self.zero()), 35)
        assert q.b.contains(Fraction(1))            # i

    def test_norm_encloses_one(self):
        rng = random.Random(51)
        pi_enc = pi_enclosure(45)
        for _ in range(40):
            pt = ParamPoint(
                pi_enc.scale(Dyadic(rng.randint(0, 255), -8)),
                pi_enc.scale(Dyadic(rng.randint(0, 255), -8)),
                pi_enc.scale(Dyadic(rng.randint(0, 511), -8)))
            q = psi(pt, 40)
            n2 = q.norm2()
            assert n2.lo.as_fraction() <= 1 <= n2.hi.as_fraction()


class TestJacobian:
    def test_peak(self):
        half_pi = pi_enclosure(45).scale(Dyadic(1, -1))
        assert jacobian(half_pi, half_pi, 40).contains(Fraction(1))

    def test_zero_line(self):
        z = Interval.point(Dyadic(0))
        any_theta = pi_enclosure(45).scale(Dyadic(1, -2))
        j = jacobian(z, any_theta, 40)
        assert j.contains(Fraction(0)) and j.lo.sign() >= 0

    def test_quarter(self):
        pi_enc = pi_enclosure(45)
        j = jacobian(pi_enc.scale(Dyadic(1, -2)), pi_enc.scale(Dyadic(1, -1)), 40)
        assert j.contains(Fraction(1, 2))


class TestCircleIntegrals:
    @pytest.mark.parametrize("name", ["one", "re", "re2", "im", "abs-re"])
    def test_closed_forms(self, name):
        spec = builtin_integrand(name, "circle")
        cv = haar_integral_circle(spec, 8)
        check(cv, TRUE_VALUES[name], 8)

    def test_normalization_sweep(self):
        spec = builtin_integrand("one", "circle")
        for n in range(1, 13):
            check(haar_integral_circle(spec, n), Fraction(1), n)


class TestSU2Integrals:
    @pytest.mark.parametrize("name", ["one", "abs-sum", "w2"])
    def test_closed_forms(self, name):
        spec = builtin_integrand(name, "su2")
        cv = haar_integral_su2(spec, 6)
        check(cv, TRUE_VALUES[name], 6)

    def test_abs_sum_scalar_path_agrees(self):
        spec = builtin_integrand("abs-sum", "su2")
        novec = IntegrandSpec(spec.eval, spec.lipschitz, spec.bound,
                              name="abs-sum-scalar")
        v1 = haar_integral_su2(spec, 3)
        v2 = haar_integral_su2(novec, 3)
        check(v1, TRUE_VALUES["abs-sum"], 3)
        check(v2, TRUE_VALUES["abs-sum"], 3)

    def test_normalization_sweep(self):
        spec = builtin_integrand("one", "su2")
        for n in range(1, 13):
            check(haar_integral_su2(spec, n), Fraction(1), n)

    def test_normalization_sweep_derived(self):
        for kind in ("so3", "o3", "u2"):
            spec = builtin_integrand("one", kind)
            for n in range(1, 13):
                check(haar_integral_derived(kind, spec, n), Fraction(1), n)

    def test_invalid_bound_detected(self):
        base = builtin_integrand("abs-sum", "su2")

        def bad_fixed(a, b, c, d, scale, **kw):
            lo, hi = base.fixed_eval(a, b, c, d, scale)
            return lo * 4, hi * 4

        cheat = IntegrandSpec(lambda q, wp: base.eval(q, wp).scale(Dyadic(4)),
                              base.lipschitz.scale2(2), Dyadic(2),
                              name="cheat", fixed_eval=bad_fixed, uses="abcd")
        with pytest.raises(InvalidBound):
            haar_integral_su2(cheat, 4)

    def test_effort_cap(self):
        spec = builtin_integrand("abs-sum", "su2")
        with pytest.raises(NoConvergence):
            haar_integral_su2(spec, 8, max_cells=1000)


class TestDerivedIntegrals:
    def test_so3(self):
        check(haar_integral_derived("so3", builtin_integrand("one", "so3"), 8),
              Fraction(1), 8)
        check(haar_integral_derived("so3", builtin_integrand("trace", "so3"), 6),
              Fraction(0), 6)

    def test_o3(self):
        check(haar_integral_derived("o3", builtin_integrand("one", "o3"), 8),
              Fraction(1), 8)
        check(haar_integral_derived("o3", builtin_integrand("sign", "o3"), 8),
              Fraction(0), 8)

    def test_u2(self):
        check(haar_integral_derived("u2", builtin_integrand("one", "u2"), 10),
              Fraction(1), 10)

    def test_u2_nontrivial_factor_function(self):
        # f((q, t)) = cos(2 pi t): integrates to 0 over the U(1) factor
        base = builtin_integrand("re", "circle")

        def ev(element, wp):
            _q, t = element
            return base.eval(t, wp)

        spec = IntegrandSpec(ev, base.lipschitz, base.bound, name="re-factor",
                             uses="a")
        check(haar_integral_derived("u2", spec, 5), Fraction(0), 5)

    def test_u2_mixed_product_function(self):
        # f((q, t)) = w^2 * cos(2 pi t): product of independent factors -> 0
        w2 = builtin_integrand("w2", "su2")
        re = builtin_integrand("re", "circle")

        def ev(element, wp):
            q, t = element
            return (w2.eval(q, wp) * re.eval(t, wp)).round_out(wp)

        # slope bound: |d(fg)| <= |f||dg| + |g||df| <= 1*13/2 + 1*1
        spec = IntegrandSpec(ev, Dyadic(15, -1), Dyadic(1), name="w2*re",
                             uses="a")
        check(haar_integral_derived("u2", spec, 4), Fraction(0), 4)

    def test_double_cover_consistency(self):
        # SO(3) integration is SU(2) integration of the pulled-back function
        # in this representation; check the two entry points agree on five
        # builtins that are even in q (hence well-defined on the quotient)
        specs = [builtin_integrand("one", "so3"),
                 builtin_integrand("trace", "so3"),
                 builtin_integrand("w2", "su2"),
                 builtin_integrand("abs-sum", "su2"),
                 builtin_integrand("lift:re2", "su2")]
        for spec in specs:
            v1 = haar_integral_derived("so3", spec, 5)
            v2 = haar_integral_su2(spec, 5)
            assert abs(v1.value.as_fraction() - v2.value.as_fraction()) \
                <= 2 * Fraction(1, 32)


class TestLift:
    @pytest.mark.parametrize("name", ["one", "re", "re2", "im", "abs-re"])
    def test_lift_law(self, name):
        """Acceptance criterion 9: int lift(f) = (2/3) int f within the
        combined certificates at n = 6."""
        lifted = builtin_integrand(f"lift:{name}", "su2")
        v_lift = haar_integral_su2(lifted, 6)
        v_circ = haar_integral_circle(builtin_integrand(name, "circle"), 6)
        combined = Fraction(1, 64) + Fraction(2, 3) * Fraction(1, 64)
        assert abs(v_lift.value.as_fraction()
                   - Fraction(2, 3) * v_circ.value.as_fraction()) <= combined
        check(v_lift, LIFT_TRUE[name], 6)

    def test_lift_re_is_projection(self):
        # lift(re)(q) = w: its integral vanishes by symmetry
        lifted = builtin_integrand("lift:re", "su2")
        check(haar_integral_su2(lifted, 7), Fraction(0), 7)

    def test_lift_requires_complex_form(self):
        plain = IntegrandSpec(lambda t, wp: Interval.from_int(1),
                              Dyadic(0), Dyadic(1))
        with pytest.raises(ValueError):
            lift_circle_function(plain)

    def test_scalar_eval_near_zero_radius(self):
        lifted = builtin_integrand("lift:one", "su2")
        q = Versor.exact(Dyadic(0), Dyadic(0), Dyadic(1), Dyadic(0))  # j
        enc = lifted.eval(q, 30)
        assert enc.contains(Fraction(0))
        q2 = Versor.exact(Dyadic(1), Dyadic(0), Dyadic(0), Dyadic(0))
        enc2 = lifted.eval(q2, 30)
        assert enc2.contains(Fraction(1))


class TestInvariance:
    """Acceptance criterion 8 shape: translations and inversion at n = 6."""

    def test_su2_translations(self):
        rng = random.Random(61)
        spec = builtin_integrand("abs-sum", "su2")
        G = make_group("su2")
        base = haar_integral_su2(spec, 6)
        tol = 2 * Fraction(1, 64)
        from test_groups import rand_versor
        for _ in range(3):
            g = rand_versor(rng)
            for side in ("left", "right"):
                moved = translate_su2_integrand(spec, g, G, side)
                v = haar_integral_su2(moved, 6)
                assert abs(v.value.as_fraction() - base.value.as_fraction()) <= tol

    def test_su2_inversion(self):
        spec = builtin_integrand("abs-sum", "su2")
        base = haar_integral_su2(spec, 6)
        v = haar_integral_su2(invert_su2_integrand(spec), 6)
        assert abs(v.value.as_fraction() - base.value.as_fraction()) \
            <= 2 * Fraction(1, 64)

    def test_circle_translations(self):
        rng = random.Random(62)
        for name in ("re2", "abs-re"):
            spec = builtin_integrand(name, "circle")
            base = haar_integral_circle(spec, 8)
            for _ in range(5):
                g = Dyadic(rng.randint(0, 1023), -10)
                v = haar_integral_circle(translate_circle_integrand(spec, g), 8)
                assert abs(v.value.as_fraction() - base.value.as_fraction()) \
                    <= 2 * Fraction(1, 256)

    def test_circle_inversion(self):
        spec = builtin_integrand("im", "circle")
        base = haar_integral_circle(spec, 8)
        v = haar_integral_circle(invert_circle_integrand(spec), 8)
        assert abs(v.value.as_fraction() - base.value.as_fraction()) \
            <= 2 * Fraction(1, 256)


class TestCrossEngine:
    """Generic packing algorithm vs quadrature on U(1)."""

    @pytest.mark.parametrize("name", ["one", "re", "re2", "im", "abs-re"])
    def test_agreement(self, name):
        from haar.generic import ModulusOfContinuity, compute_integral
        from haar.packing import PackingTable
        circle = make_group("circle")
        spec = builtin_integrand(name, "circle")
        n = 4
        vq = haar_integral_circle(spec, n)
        vg = compute_integral(circle, spec.eval,
                              ModulusOfContinuity.from_lipschitz(spec.lipschitz),
                              spec.bound, PackingTable(circle), n)
        assert abs(vq.value.as_fraction() - vg.value.as_fraction()) \
            <= 2 * Fraction(1, 1 << n)
