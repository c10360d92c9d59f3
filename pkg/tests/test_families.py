import cmath
import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.errors import DegreeOverflow, DomainViolation, NoRecurrence, OutsideDisc
from app.services.families import (
    EvalPoint, FamilyId, FamilySpec, Parametrization, chi, chi_algebraic, chi_array,
    estimate_radius, eval_explicit, eval_recurrence, explicit_table, explicit_variants, gen_function_closed,
    gen_function_partial, leading_coefficient, norm_constant, normalization_map,
    orthonormal_qinv_hermite, printed_table, recurrence_table,
)
from app.services.qcore import qpoch_inf_value, qpoch_value

QQ_HALF_INF = 0.28878809508660242


def _close(a, b, rtol=1e-10, atol=1e-12):
    assert abs(a - b) <= atol + rtol * abs(b), f"{a} != {b}"


# (família, parâmetros, ponto, variantes) com graus pequenos bem condicionados
REPRESENTATION_CASES = [
    (FamilyId.CONTINUOUS_Q_HERMITE, {}, EvalPoint.trig(0.7), ["default"]),
    (FamilyId.DISCRETE_Q_HERMITE, {}, EvalPoint.line(0.4), ["default"]),
    (FamilyId.QINV_HERMITE, {}, EvalPoint.hyper(0.3), ["default"]),
    (FamilyId.AS_CARLITZ_U, {"a": -0.6}, EvalPoint.line(0.25), ["default"]),
    (FamilyId.AS_CARLITZ_V, {"a": 0.4}, EvalPoint.line(1.3), ["default"]),
    (FamilyId.AS_CHIHARA, {"t1": 0.3, "t2": 0.2}, EvalPoint.trig(math.pi / 2),
     ["default", "reversed", "pfaff", "cauchy"]),
    (FamilyId.ASKEY_WILSON, {"t1": 0.3, "t2": 0.2, "t3": -0.25, "t4": 0.1}, EvalPoint.trig(1.1), ["default"]),
    (FamilyId.BIG_Q_JACOBI, {"a": -0.8, "t1": 0.4, "t2": -0.3}, EvalPoint.line(0.2),
     ["default", "symmetric", "andrews_askey"]),
    (FamilyId.SZEGO_CIRCLE, {}, EvalPoint.circle_angle(0.9), ["default"]),
    (FamilyId.PASTRO, {"t1": 0.3, "t2": -0.2}, EvalPoint.circle_angle(2.2), ["default", "pastro_tilde"]),
    (FamilyId.AS_CHIHARA_QINV, {"t1": 0.2, "t2": 0.15}, EvalPoint.hyper(-0.4), ["default", "cauchy", "3phi1"]),
]


# ==============================================
# FamilySpec / EvalPoint
# ==============================================

class TestFamilySpec:
    def test_missing_parameters_default_to_zero(self):
        spec = FamilySpec.make("ASChihara", 0.5, t1=0.3)
        assert spec.param("t2") == 0

    def test_unknown_family(self):
        with pytest.raises(DomainViolation):
            FamilySpec.make("Laguerre", 0.5)

    def test_unknown_parameter(self):
        with pytest.raises(DomainViolation):
            FamilySpec.make(FamilyId.CONTINUOUS_Q_HERMITE, 0.5, a=1.0)

    @pytest.mark.parametrize("family, params", [
        (FamilyId.AS_CARLITZ_U, {"a": 0.5}),
        (FamilyId.AS_CARLITZ_V, {"a": -0.5}),
        (FamilyId.BIG_Q_JACOBI, {"a": -0.5, "t1": 0.0, "t2": 0.3}),
        (FamilyId.AS_VERMA_RATIONAL, {"a": -1.0, "t1": 0.1, "t2": 0.1}),
    ])
    def test_sign_conditions(self, family, params):
        with pytest.raises(DomainViolation):
            FamilySpec.make(family, 0.5, **params)

    def test_params_are_sorted(self):
        spec = FamilySpec.make(FamilyId.ASKEY_WILSON, 0.5, t4=0.1, t1=0.2)
        assert [name for name, _ in spec.params] == ["t1", "t2", "t3", "t4"]


class TestEvalPoint:
    def test_trig_range(self):
        with pytest.raises(DomainViolation):
            EvalPoint.trig(4.0)

    def test_circle_requires_unit_modulus(self):
        with pytest.raises(DomainViolation):
            EvalPoint.circle(1.5)
        point = EvalPoint.circle(1j)
        _close(point.z, 1j, atol=1e-15)

    def test_line_point_recovers_w_and_e_xi(self):
        point = EvalPoint.line(0.3)
        w = point.w
        _close((w + 1 / w) / 2, 0.3)
        e = point.e_xi
        _close((e - 1 / e) / 2, 0.3)

    def test_hyper_has_no_w(self):
        with pytest.raises(DomainViolation):
            EvalPoint.hyper(0.1).w


# ==============================================
# Recorrência
# ==============================================

class TestRecurrence:
    def test_degree_zero_is_one(self, base):
        spec = FamilySpec.make(FamilyId.CONTINUOUS_Q_HERMITE, base)
        assert eval_recurrence(spec, 0, EvalPoint.trig(0.4)) == 1

    def test_continuous_hermite_degree_two(self):
        spec = FamilySpec.make(FamilyId.CONTINUOUS_Q_HERMITE, 0.5)
        _close(eval_recurrence(spec, 2, EvalPoint.trig(0.0)), 3.5)

    def test_carlitz_u_degree_one(self):
        spec = FamilySpec.make(FamilyId.AS_CARLITZ_U, 0.5, a=-1.0)
        _close(eval_recurrence(spec, 1, EvalPoint.line(2.0)), 2.0)

    def test_szego_degree_one(self):
        spec = FamilySpec.make(FamilyId.SZEGO_CIRCLE, 0.25)
        _close(eval_recurrence(spec, 1, EvalPoint.circle(1.0)), 3.0)

    def test_discrete_is_carlitz_u_at_minus_one(self, base):
        discrete = FamilySpec.make(FamilyId.DISCRETE_Q_HERMITE, base)
        carlitz = FamilySpec.make(FamilyId.AS_CARLITZ_U, base, a=-1.0)
        point = EvalPoint.line(0.37)
        for n in range(8):
            _close(eval_recurrence(discrete, n, point), eval_recurrence(carlitz, n, point))

    def test_askey_wilson_reduces_to_chihara(self, base):
        aw = FamilySpec.make(FamilyId.ASKEY_WILSON, base, t1=0.3, t2=-0.4)
        asc = FamilySpec.make(FamilyId.AS_CHIHARA, base, t1=0.3, t2=-0.4)
        point = EvalPoint.trig(1.3)
        for n in range(8):
            _close(eval_recurrence(aw, n, point) * 2 ** n, eval_recurrence(asc, n, point))

    def test_table_matches_scalar(self):
        spec = FamilySpec.make(FamilyId.AS_CHIHARA, 0.5, t1=0.3, t2=0.2)
        thetas = np.array([0.2, 1.0, 2.5])
        table = recurrence_table(spec, 6, thetas, Parametrization.TRIG)
        assert table.shape == (7, 3)
        for j, theta in enumerate(thetas):
            _close(table[6, j], eval_recurrence(spec, 6, EvalPoint.trig(theta)))

    def test_rational_family_has_no_recurrence(self):
        spec = FamilySpec.make(FamilyId.AS_VERMA_RATIONAL, 0.5, a=1.2, t1=0.3, t2=0.2)
        with pytest.raises(NoRecurrence):
            eval_recurrence(spec, 2, EvalPoint.line(0.5))

    def test_degree_cap(self):
        spec = FamilySpec.make(FamilyId.CONTINUOUS_Q_HERMITE, 0.5)
        with pytest.raises(DegreeOverflow):
            eval_recurrence(spec, 65, EvalPoint.trig(0.3))

    def test_circle_family_rejects_real_point(self):
        spec = FamilySpec.make(FamilyId.SZEGO_CIRCLE, 0.5)
        with pytest.raises(DomainViolation):
            recurrence_table(spec, 3, np.array([0.1]), Parametrization.LINE)


# ==============================================
# Representações explícitas e mapa de normalização
# ==============================================

class TestRepresentations:
    @pytest.mark.parametrize("family, params, point, variants", REPRESENTATION_CASES,
                             ids=[case[0].value for case in REPRESENTATION_CASES])
    def test_explicit_matches_recurrence(self, family, params, point, variants):
        spec = FamilySpec.make(family, 0.5, **params)
        for n in range(5):
            expected = eval_recurrence(spec, n, point)
            for variant in variants:
                value = eval_explicit(spec, n, point, variant) * normalization_map(spec, n, variant)
                _close(value, expected, rtol=1e-9, atol=1e-11)

    def test_explicit_degree_zero(self):
        spec = FamilySpec.make(FamilyId.ISMAIL_MASSON_RATIONAL, 0.5, t1=0.2, t2=0.3)
        assert eval_explicit(spec, 0, EvalPoint.hyper(0.5)) == 1

    def test_unknown_variant(self):
        spec = FamilySpec.make(FamilyId.CONTINUOUS_Q_HERMITE, 0.5)
        with pytest.raises(DomainViolation):
            eval_explicit(spec, 2, EvalPoint.trig(0.3), "pfaff")

    def test_chihara_leading_coefficient(self):
        spec = FamilySpec.make(FamilyId.AS_CHIHARA, 0.5, t1=0.3, t2=0.2)
        printed = leading_coefficient(spec, 1) / normalization_map(spec, 1)
        _close(printed, 0.6 / 0.94)

    def test_chihara_parameter_symmetry(self):
        point = EvalPoint.trig(0.8)
        spec = FamilySpec.make(FamilyId.AS_CHIHARA, 0.5, t1=0.3, t2=-0.45)
        swapped = FamilySpec.make(FamilyId.AS_CHIHARA, 0.5, t1=-0.45, t2=0.3)
        for n in range(1, 5):
            _close(
                eval_explicit(spec, n, point) * normalization_map(spec, n),
                eval_explicit(swapped, n, point) * normalization_map(swapped, n),
                rtol=1e-9,
            )

    def test_verma_translation(self):
        spec = FamilySpec.make(FamilyId.AS_VERMA_RATIONAL, 0.5, a=1.5, t1=0.3, t2=0.25)
        point = EvalPoint.line(2.0)
        for n in range(4):
            _close(eval_explicit(spec, n, point, "verma"), eval_explicit(spec, n, point))

    def test_ismail_masson_four_parameter_form_reduces(self):
        point = EvalPoint.hyper(0.2)
        three = FamilySpec.make(FamilyId.ISMAIL_MASSON_RATIONAL, 0.5, t1=0.2, t2=0.3)
        tiny = FamilySpec.make(FamilyId.ISMAIL_MASSON_RATIONAL, 0.5, t1=0.2, t2=0.3, t3=1e-9, t4=0.0)
        for n in range(4):
            _close(eval_explicit(tiny, n, point), eval_explicit(three, n, point), rtol=1e-7)

    def test_askey_wilson_symmetric_in_parameters(self, base):
        ts = (0.3, -0.2, 0.25, 0.1)
        point = EvalPoint.trig(1.1)

        def monic_values(params):
            spec = FamilySpec.make(FamilyId.ASKEY_WILSON, base, **dict(zip(("t1", "t2", "t3", "t4"), params)))
            return [eval_explicit(spec, n, point) * normalization_map(spec, n) for n in range(1, 7)]

        reference = monic_values(ts)
        for perm in itertools.permutations(ts):
            for value, expected in zip(monic_values(perm), reference):
                _close(value, expected, rtol=1e-9, atol=0)

    def test_u_qinv_reduces_to_qinv_hermite(self, base):
        point = EvalPoint.hyper(0.35)
        u = FamilySpec.make(FamilyId.AS_CHIHARA_QINV, base, t1=0.0, t2=0.0)
        h = FamilySpec.make(FamilyId.QINV_HERMITE, base)
        for n in range(8):
            u_hat = eval_recurrence(u, n, point) * normalization_map(u, n, "monic")
            _close(u_hat, 2.0 ** -n * eval_recurrence(h, n, point), rtol=1e-10)

    def test_verma_forms_agree_at_high_degree(self):
        spec = FamilySpec.make(FamilyId.AS_VERMA_RATIONAL, 0.3, a=0.7, t1=0.2, t2=-0.3)
        point = EvalPoint.line(1.3)
        for n in (6, 8, 10):
            _close(eval_explicit(spec, n, point, "verma"), eval_explicit(spec, n, point), rtol=1e-9)

    @pytest.mark.parametrize("family, params, point", [
        (FamilyId.AS_CHIHARA, {"t1": 0.4, "t2": -0.3}, EvalPoint.trig(0.8)),
        (FamilyId.BIG_Q_JACOBI, {"a": -0.8, "t1": 0.3, "t2": 0.2}, EvalPoint.line(0.45)),
        (FamilyId.PASTRO, {"t1": 0.4, "t2": -0.3}, EvalPoint.circle_angle(1.1)),
    ], ids=lambda v: v.value if isinstance(v, FamilyId) else None)
    def test_explicit_matches_recurrence_at_degree_twelve(self, base, family, params, point):
        spec = FamilySpec.make(family, base, **params)
        expected = eval_recurrence(spec, 12, point)
        for variant in explicit_variants(spec):
            value = eval_explicit(spec, 12, point, variant) * normalization_map(spec, 12, variant)
            _close(value, expected, rtol=1e-9, atol=0)

    def test_monic_target(self):
        spec = FamilySpec.make(FamilyId.CONTINUOUS_Q_HERMITE, 0.5)
        assert normalization_map(spec, 3, "monic") == pytest.approx(1 / 8)

    def test_orthonormal_qinv_multiplier(self, base):
        spec = FamilySpec.make(FamilyId.QINV_HERMITE, base)
        q = base.q
        assert normalization_map(spec, 0, "orthonormal") == pytest.approx(1)
        for n in range(1, 6):
            expected = q ** (n * (n + 1) / 4) / math.sqrt(qpoch_value(q, q, n).real)
            _close(normalization_map(spec, n, "orthonormal"), expected)

    def test_printed_table_undoes_map(self):
        spec = FamilySpec.make(FamilyId.AS_CHIHARA, 0.5, t1=0.3, t2=0.2)
        thetas = np.array([0.4, 1.9])
        printed = printed_table(spec, 4, thetas, Parametrization.TRIG)
        explicit = explicit_table(spec, 4, thetas, Parametrization.TRIG)
        assert_allclose(printed, explicit, rtol=1e-9, atol=1e-12)


# ==============================================
# Normas
# ==============================================

class TestNormConstant:
    def test_continuous_hermite(self):
        spec = FamilySpec.make(FamilyId.CONTINUOUS_Q_HERMITE, 0.5)
        _close(norm_constant(spec, 0).real, 2 * math.pi / QQ_HALF_INF, rtol=1e-12)

    def test_carlitz_u(self):
        spec = FamilySpec.make(FamilyId.AS_CARLITZ_U, 0.5, a=-1.0)
        _close(norm_constant(spec, 1).real, 0.5, rtol=1e-13)

    def test_qinv_hermite(self):
        spec = FamilySpec.make(FamilyId.QINV_HERMITE, 0.5)
        _close(norm_constant(spec, 2).real, 3.0, rtol=1e-13)

    def test_equation_reference(self):
        spec = FamilySpec.make(FamilyId.BIG_Q_JACOBI, 0.5, a=-0.8, t1=0.4, t2=-0.3)
        assert norm_constant(spec, 2).equation_ref == "Eq. (3.11)"
        assert norm_constant(spec, 2, "symmetric").equation_ref == "Eq. (3.13)"

    def test_askey_wilson_reduces_to_chihara(self):
        # com t3 = t4 = 0 o mapa converte entre as normalizações impressas
        asc = FamilySpec.make(FamilyId.AS_CHIHARA, 0.5, t1=0.3, t2=0.2)
        aw = FamilySpec.make(FamilyId.ASKEY_WILSON, 0.5, t1=0.3, t2=0.2)
        for n in range(4):
            asc_ref = norm_constant(asc, n).value * normalization_map(asc, n) ** 2
            aw_ref = norm_constant(aw, n).value * normalization_map(aw, n) ** 2
            _close(aw_ref * 4 ** n, asc_ref, rtol=1e-11)

    def test_chihara_domain(self):
        spec = FamilySpec.make(FamilyId.AS_CHIHARA, 0.5, t1=1.2, t2=0.2)
        with pytest.raises(DomainViolation):
            norm_constant(spec, 1)

    def test_ismail_masson_general_reduces(self):
        three = FamilySpec.make(FamilyId.ISMAIL_MASSON_RATIONAL, 0.5, t1=0.2, t2=0.3)
        tiny = FamilySpec.make(FamilyId.ISMAIL_MASSON_RATIONAL, 0.5, t1=0.2, t2=0.3, t3=1e-10, t4=1e-10)
        for n in range(4):
            _close(norm_constant(tiny, n).value, norm_constant(three, n).value, rtol=1e-7)


# ==============================================
# Funções geradoras e raio
# ==============================================

class TestGeneratingFunctions:
    @pytest.mark.parametrize("family, params, point, t", [
        (FamilyId.CONTINUOUS_Q_HERMITE, {}, EvalPoint.trig(math.pi / 3), 0.4),
        (FamilyId.AS_CARLITZ_U, {"a": -1.0}, EvalPoint.line(0.7), 0.3),
        (FamilyId.AS_CARLITZ_V, {"a": 0.5}, EvalPoint.line(0.3), 0.2),
        (FamilyId.QINV_HERMITE, {}, EvalPoint.hyper(0.2), 0.4),
        (FamilyId.AS_CHIHARA, {"t1": 0.3, "t2": -0.2}, EvalPoint.trig(1.0), 0.4),
        (FamilyId.ASKEY_WILSON, {"t1": 0.3, "t2": -0.2, "t3": 0.25, "t4": 0.1}, EvalPoint.trig(1.0), 0.3),
        (FamilyId.SZEGO_CIRCLE, {}, EvalPoint.circle_angle(0.7), 0.3),
        (FamilyId.PASTRO, {"t1": 0.3, "t2": 0.2}, EvalPoint.circle_angle(1.7), 0.3),
        (FamilyId.AS_CHIHARA_QINV, {"t1": 0.2, "t2": 0.1}, EvalPoint.hyper(0.1), 0.3),
    ], ids=lambda v: v.value if isinstance(v, FamilyId) else None)
    def test_partial_sum_matches_closed_form(self, family, params, point, t):
        spec = FamilySpec.make(family, 0.5, **params)
        partial = gen_function_partial(spec, t, point, 60)
        closed = gen_function_closed(spec, t, point)
        _close(partial, closed, rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize("family, params, point, t", [
        (FamilyId.CONTINUOUS_Q_HERMITE, {}, EvalPoint.trig(math.pi / 3), 0.6),
        (FamilyId.AS_CHIHARA, {"t1": 0.3, "t2": -0.2}, EvalPoint.trig(1.0), 0.6),
        (FamilyId.ASKEY_WILSON, {"t1": 0.3, "t2": -0.2, "t3": 0.25, "t4": 0.1}, EvalPoint.trig(1.0), 0.5),
        (FamilyId.SZEGO_CIRCLE, {}, EvalPoint.circle_angle(0.7), 0.4),
        (FamilyId.PASTRO, {"t1": 0.3, "t2": 0.2}, EvalPoint.circle_angle(1.7), 0.4),
    ], ids=lambda v: v.value if isinstance(v, FamilyId) else None)
    def test_residual_shrinks_when_terms_double(self, family, params, point, t):
        spec = FamilySpec.make(family, 0.5, **params)
        closed = gen_function_closed(spec, t, point)
        coarse = abs(gen_function_partial(spec, t, point, 8) - closed)
        fine = abs(gen_function_partial(spec, t, point, 16) - closed)
        assert fine * 10 <= coarse

    def test_zero_argument(self):
        spec = FamilySpec.make(FamilyId.AS_CARLITZ_U, 0.5, a=-2.0)
        assert gen_function_partial(spec, 0, EvalPoint.line(0.4), 10) == 1

    def test_outside_disc(self):
        spec = FamilySpec.make(FamilyId.CONTINUOUS_Q_HERMITE, 0.5)
        with pytest.raises(OutsideDisc):
            gen_function_partial(spec, 1.0, EvalPoint.trig(0.3), 20)

    def test_big_q_jacobi_has_no_generating_function(self):
        spec = FamilySpec.make(FamilyId.BIG_Q_JACOBI, 0.5, a=-0.8, t1=0.4, t2=-0.3)
        with pytest.raises(DomainViolation):
            gen_function_partial(spec, 0.1, EvalPoint.line(0.2), 10)


class TestEstimateRadius:
    def test_szego(self, base):
        spec = FamilySpec.make(FamilyId.SZEGO_CIRCLE, base)
        _close(estimate_radius(spec), math.sqrt(base.q), rtol=1e-5)

    def test_carlitz_v(self):
        spec = FamilySpec.make(FamilyId.AS_CARLITZ_V, 0.5, a=2.0)
        _close(estimate_radius(spec), 0.5, rtol=1e-8)

    def test_carlitz_u_is_entire(self):
        spec = FamilySpec.make(FamilyId.AS_CARLITZ_U, 0.5, a=-1.0)
        assert estimate_radius(spec) == math.inf

    def test_continuous_hermite(self):
        spec = FamilySpec.make(FamilyId.CONTINUOUS_Q_HERMITE, 0.5)
        _close(estimate_radius(spec), 1.0, rtol=1e-8)


# ==============================================
# chi_t e h~_n
# ==============================================

class TestChi:
    def test_spot_value(self, q_half):
        expected = qpoch_inf_value(-0.3, 0.5) * qpoch_inf_value(0.3, 0.5)
        _close(chi(0.3, 0.0, q_half), expected, rtol=1e-14)

    def test_vanishing_factor(self, q_half):
        xi = 0.4
        assert abs(chi(-math.exp(-xi), xi, q_half)) < 1e-15

    def test_algebraic_form(self, base):
        for xi in (-1.2, 0.0, 0.8):
            _close(chi_algebraic(0.35, math.sinh(xi), base), chi(0.35, xi, base), rtol=1e-12)

    def test_array(self, q_half):
        xis = np.array([-0.5, 0.1, 1.0])
        values = chi_array(0.2, xis, 0.5)
        for value, xi in zip(values, xis):
            _close(value, chi(0.2, xi, q_half), rtol=1e-13)


class TestOrthonormalQinvHermite:
    def test_matches_scaled_recurrence(self, base):
        spec = FamilySpec.make(FamilyId.QINV_HERMITE, base)
        xi = 0.3
        values = orthonormal_qinv_hermite(6, xi, base)
        for n in range(7):
            expected = eval_recurrence(spec, n, EvalPoint.hyper(xi)) * normalization_map(spec, n, "orthonormal")
            _close(values[n], expected, rtol=1e-11)

    def test_complex_argument(self, q_half):
        values = orthonormal_qinv_hermite(3, 0.2 + 0.5j, q_half)
        assert values[0] == 1
        assert cmath.isfinite(values[3])
