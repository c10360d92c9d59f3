import itertools
import math

import numpy as np
import pytest

from app.errors import DomainViolation, PoleInNormalizer, UnknownCheck
from app.schemas import RunConfig
from app.services.catalog import (
    CATALOG_BY_ID, CHECK_CATALOG, CHECK_MAP, IDENTITY_GRIDS, INTEGRAL_GRIDS, REPR_DEGREE_MAX, REPR_DRAWERS,
    TERMINATING_DEGREE_MAX, _draw_representations, plan_suite, resolve_selector, run_check, t_mu,
)
from app.services.families import FamilyId, FamilySpec
from app.services.measures import big_q_jacobi_measure, carlitz_measure, hermite_trig_weight, qinv_hermite_measure
from app.services.qcore import QBase, qpoch_inf_value
from app.services.verify import (
    check_gram, check_identity, check_integral, check_mass, check_radius, check_representation, gram,
    int_2_16, json_safe, predicted_radius, theorem52_check,
)

Q_GRID = (0.3, 0.5, 0.8)


class TestIntegralChecks:
    def test_asc_mass_at_zero_parameters(self, base):
        result = check_integral("INT_2_2", {"t1": 0.0, "t2": 0.0}, base)
        assert result.rel_err < 1e-10
        assert result.passed
        assert result.equation_ref == "Eq. (2.2)"

    def test_askey_wilson_integral(self, base):
        result = check_integral("INT_2_16", {"t1": 0.3, "t2": -0.2, "t3": 0.25, "t4": 0.1}, base)
        assert result.rel_err < 1e-9

    def test_askey_wilson_permutation_invariance(self, q_half):
        ts = (0.3, -0.2, 0.25, 0.1)
        reference = int_2_16(q_half, *ts)[0]
        for perm in itertools.permutations(ts):
            assert abs(int_2_16(q_half, *perm)[0] - reference) <= 1e-10 * abs(reference)

    def test_askey_wilson_reduces_to_chihara(self, q_half):
        aw = check_integral("INT_2_16", {"t1": 0.3, "t2": -0.2, "t3": 0.0, "t4": 0.0}, q_half)
        asc = check_integral("INT_2_2", {"t1": 0.3, "t2": -0.2}, q_half)
        assert aw.lhs == pytest.approx(asc.lhs, rel=1e-10)
        assert aw.rhs == pytest.approx(asc.rhs, rel=1e-12)

    def test_qinv_two_chi(self, q_half):
        result = check_integral("INT_5_5", {"t": 0.8, "t1": 0.4, "t2": -0.3}, q_half)
        assert result.passed
        assert result.rhs == pytest.approx(qpoch_inf_value(0.24, 0.5))

    def test_carlitz_integral_and_series_agree(self, base):
        params = {"a": -1.0, "t1": 0.3, "t2": -0.4}
        integral = check_integral("INT_3_6", params, base)
        series = check_integral("SUM_3_7", params, base)
        assert integral.passed and series.passed
        assert integral.lhs == pytest.approx(series.lhs, rel=1e-10)

    def test_ramanujan_at_zero(self, base):
        result = check_integral("INT_4_2", {"t1": 0.0, "t2": 0.0}, base)
        assert result.rhs == pytest.approx(1 / qpoch_inf_value(base.q, base.q))
        assert result.passed

    def test_domain_violation(self, q_half):
        with pytest.raises(DomainViolation):
            check_integral("INT_4_2", {"t1": 0.9, "t2": 0.0}, q_half)

    def test_params_record_q(self, q_half):
        result = check_integral("INT_2_2", {"t1": 0.3, "t2": -0.2}, q_half)
        assert result.params == {"q": 0.5, "t1": 0.3, "t2": -0.2}

    def test_unknown(self, q_half):
        with pytest.raises(UnknownCheck):
            check_integral("INT_9_9", {}, q_half)


class TestIdentityChecks:
    def test_sears_at_degree_zero(self, q_half):
        result = check_identity("ID_2_20", {"n": 0, "a": 0.3, "b": -0.4, "c": 0.6, "d": 0.5, "e": -0.7}, q_half)
        assert result.lhs == pytest.approx(1)
        assert result.rhs == pytest.approx(1)
        assert "f" in result.params

    def test_chu_vandermonde_degree_one(self, base):
        a, c = 0.3, 0.7
        result = check_identity("ID_2_7", {"n": 1, "a": a, "c": c}, base)
        assert result.rhs == pytest.approx((a - c) / (1 - c), rel=1e-14)
        assert result.abs_err < 1e-13

    def test_mehler_at_origin(self, base):
        result = check_identity("ID_5_9", {"xi": 0.0, "eta": 0.0, "z": 0.5}, base)
        assert result.passed

    @pytest.mark.parametrize("params", [{"z": 0.5}, {"z": -0.9}, {"z": 3.0}, {"z": 0.2 + 0.7j}])
    def test_euler(self, base, params):
        assert check_identity("ID_3_5", params, base).passed

    @pytest.mark.parametrize("params", [{"a": 0.5, "b": 0.6, "c": 0.2}, {"a": 2.0, "b": 1.5, "c": -0.9}])
    def test_q_gauss(self, base, params):
        assert check_identity("ID_3_20", params, base).passed

    def test_shift_identity_tolerance_override(self, q_half):
        result = check_identity("ID_2_12", {"a": 0.7, "n": 3, "k": 2}, q_half, tolerance=1e-6)
        assert result.tolerance == 1e-6
        assert result.passed

    def test_u_representations_report_worst_variant(self, q_half):
        result = check_identity("ID_5_17", {"n": 3, "t1": 0.3 + 0.2j, "t2": 0.3 - 0.2j, "xi": 0.4}, q_half)
        assert result.params["variant"] in ("default", "cauchy", "3phi1")
        assert result.passed

    def test_unknown(self, q_half):
        with pytest.raises(UnknownCheck):
            check_identity("ID_0_0", {}, q_half)

    @pytest.mark.slow
    @pytest.mark.parametrize("check_id", ["ID_2_3", "ID_2_7", "ID_2_11", "ID_2_14", "ID_2_20", "ID_3_5",
                                          "ID_3_20", "ID_2_12", "ID_3_12", "ID_3_14", "ID_3_28", "ID_4_6"])
    def test_classical_grids_pass(self, base, check_id):
        for params in IDENTITY_GRIDS[check_id](base.q):
            result = check_identity(check_id, params, base)
            assert result.passed, (check_id, params, result.rel_err)


class TestGram:
    def test_continuous_hermite(self, base):
        spec = FamilySpec.make(FamilyId.CONTINUOUS_Q_HERMITE, base)
        report = gram(spec, spec, hermite_trig_weight(base), 8)
        assert report.passes(1e-8)
        matrix = np.asarray(report.matrix)
        assert np.max(np.abs(matrix - matrix.T)) < 1e-11 * report.max_diagonal

    def test_big_q_jacobi(self, q_half):
        spec = FamilySpec.make(FamilyId.BIG_Q_JACOBI, q_half, a=-0.8, t1=0.3, t2=0.2)
        report = gram(spec, spec, big_q_jacobi_measure(-0.8, 0.3, 0.2, q_half), 6)
        assert report.max_diag_rel_err < 1e-8
        assert report.max_offdiag < 1e-8 * report.max_diagonal

    def test_carlitz_u(self, q_half):
        spec = FamilySpec.make(FamilyId.AS_CARLITZ_U, q_half, a=-1.0)
        assert gram(spec, spec, carlitz_measure(-1.0, q_half), 8).passes(1e-8)

    def test_qinv_hermite(self, q_half):
        spec = FamilySpec.make(FamilyId.QINV_HERMITE, q_half)
        assert gram(spec, spec, qinv_hermite_measure(0.8, q_half), 8).passes(1e-8)

    def test_check_gram_records(self, q_half):
        results = check_gram("ORTH_3_2", {"a": -1.0, "N": 5}, q_half)
        assert [r.params["part"] for r in results] == ["diag", "offdiag"]
        assert all(r.passed for r in results)
        assert results[0].params["N"] == 5
        assert results[1].rhs == 0

    def test_size_one(self, q_half):
        results = check_gram("ORTH_2_1", {"N": 1}, q_half)
        assert len(results) == 1

    def test_unknown(self, q_half):
        with pytest.raises(UnknownCheck):
            check_gram("ORTH_9_9", {}, q_half)


class TestRadiusAndTheorem:
    def test_predicted_values(self):
        assert predicted_radius(FamilySpec.make(FamilyId.SZEGO_CIRCLE, 0.5)) == pytest.approx(math.sqrt(0.5))
        assert predicted_radius(FamilySpec.make(FamilyId.AS_CARLITZ_V, 0.5, a=2.0)) == pytest.approx(0.5)
        assert predicted_radius(FamilySpec.make(FamilyId.AS_CARLITZ_U, 0.5, a=-1.0)) == math.inf
        assert predicted_radius(FamilySpec.make(FamilyId.CONTINUOUS_Q_HERMITE, 0.5)) == 1.0

    def test_szego_radius_check(self, base):
        result = check_radius({"family": FamilyId.SZEGO_CIRCLE.value}, base)
        assert result.passed
        assert result.tolerance == pytest.approx(0.07)

    def test_entire_family_flagged_infinite(self, q_half):
        result = check_radius({"family": FamilyId.AS_CARLITZ_U.value, "a": -1.0}, q_half)
        assert result.params["expected"] == "inf"
        assert result.lhs == 0 and result.passed

    def test_theorem_vanishing_integrals(self, q_half):
        mu = qinv_hermite_measure(0.8, q_half)
        result = theorem52_check(0.3 + 0.2j, 0.3 - 0.2j, q_half, mu, 6)
        assert result.passed
        assert result.rhs == 0
        assert 1 <= result.params["n"] <= 6

    def test_theorem_pole(self, q_half):
        with pytest.raises(PoleInNormalizer):
            theorem52_check(0.5, -0.5, q_half, qinv_hermite_measure(0.8, q_half), 4)


class TestMassAndRepresentation:
    @pytest.mark.parametrize("a", [-1.0, -0.4, -2.5])
    def test_carlitz_mass(self, base, a):
        result = check_mass("MASS_3_3", {"a": a}, base)
        assert result.passed
        assert result.params["nonnegative"] is True

    def test_complex_nu_mu_skips_sign_sampling(self, q_half):
        result = check_mass("MASS_5_7", {"t": 0.8, "t1": 0.4, "t2": -0.5}, q_half)
        assert result.params["nonnegative"] is None

    def test_representation_continuous_hermite(self, base):
        params = {"family": FamilyId.CONTINUOUS_Q_HERMITE.value, "variant": "default", "coordinate": 0.7,
                  "n_max": REPR_DEGREE_MAX}
        result = check_representation(params, base)
        assert result.passed
        assert result.equation_ref == "recurrence vs explicit"


class TestCatalog:
    def test_every_entry_has_runner(self):
        assert set(CHECK_MAP) == {entry["id"] for entry in CHECK_CATALOG}
        assert len(CATALOG_BY_ID) == len(CHECK_CATALOG)

    def test_integral_grid_sizes(self):
        for check_id, grid in INTEGRAL_GRIDS.items():
            assert sum(len(grid(q)) for q in Q_GRID) >= 10, check_id

    @pytest.mark.parametrize("check_id", ["ID_2_3", "ID_2_7", "ID_2_11", "ID_2_14", "ID_2_20", "ID_3_5",
                                          "ID_3_7", "ID_3_14", "ID_3_20", "ID_5_9"])
    def test_identity_grid_sizes(self, check_id):
        assert sum(len(IDENTITY_GRIDS[check_id](q)) for q in Q_GRID) >= 20

    def test_terminating_grids_reach_top_degree(self):
        for check_id in ("ID_2_7", "ID_2_20", "ID_3_14"):
            degrees = {params["n"] for params in IDENTITY_GRIDS[check_id](0.8)}
            assert max(degrees) == TERMINATING_DEGREE_MAX, check_id

    def test_measure_parameter_inside_domain(self):
        for q in (0.3, 0.5, 0.8, 0.95):
            assert q < t_mu(q) < 1

    def test_sections(self):
        assert CATALOG_BY_ID["INT_2_2"]["section"] == 2
        assert CATALOG_BY_ID["REPR"]["section"] == 1
        assert CATALOG_BY_ID["THM_5_2"]["section"] == 5


class TestSelector:
    def test_all(self):
        assert len(resolve_selector("all")) == len(CHECK_CATALOG)

    def test_section(self):
        ids = {entry["id"] for entry in resolve_selector("section:2")}
        assert {"INT_2_2", "INT_2_16", "ID_2_20", "ORTH_2_1", "GENFUN_2_15"} <= ids
        assert all(CATALOG_BY_ID[cid]["section"] == 2 for cid in ids)

    def test_check_list(self):
        assert [entry["id"] for entry in resolve_selector("check:INT_4_2, ID_3_5")] == ["INT_4_2", "ID_3_5"]

    @pytest.mark.parametrize("selector", ["check:NOPE", "section:9", "section:x", "everything", "check:"])
    def test_invalid(self, selector):
        with pytest.raises(UnknownCheck):
            resolve_selector(selector)


class TestPlanAndRun:
    def test_plan_uses_grid(self):
        tasks = plan_suite(RunConfig(selector="check:INT_4_2", q_values=[0.3]))
        assert len(tasks) == 4
        assert {task.q for task in tasks} == {0.3}

    def test_random_draws_are_seeded(self):
        config = RunConfig(selector="check:ID_2_3", q_values=[0.5], seed=7, random_draws=5)
        first, second = plan_suite(config), plan_suite(config)
        assert len(first) == 7 + 5
        assert first == second
        other = plan_suite(config.model_copy(update={"seed": 8}))
        assert other[-1] != first[-1]

    def test_run_check_single_record(self):
        results = run_check("INT_4_2", 0.3, {"t1": 0.5 * math.sqrt(0.3), "t2": -0.3 * math.sqrt(0.3)})
        assert len(results) == 1
        assert results[0].passed

    def test_errors_become_failed_records(self):
        results = run_check("INT_2_2", 0.5, {"t1": 1.5, "t2": 0.0})
        assert len(results) == 1
        assert not results[0].passed
        assert "DomainViolation" in results[0].params["error"]

    def test_unknown_check(self):
        with pytest.raises(UnknownCheck):
            run_check("NOPE", 0.5, {})


class TestJsonSafe:
    def test_values(self):
        assert json_safe(0.5 + 0j) == 0.5
        assert json_safe(0.3 + 0.2j) == "(0.3+0.2j)"
        assert json_safe(math.inf) == "inf"
        assert json_safe(np.int64(3)) == 3
        assert json_safe(FamilyId.PASTRO) == FamilyId.PASTRO.value
        assert json_safe(QBase(0.5).q) == 0.5


class TestTerminatingSums:
    @pytest.mark.parametrize("n", range(TERMINATING_DEGREE_MAX + 1))
    def test_chu_vandermonde_to_top_degree(self, base, n):
        result = check_identity("ID_2_7", {"n": n, "a": -2.5, "c": 0.4}, base)
        assert result.tolerance == 1e-11
        assert result.passed, (n, result.rel_err)

    @pytest.mark.parametrize("n", range(TERMINATING_DEGREE_MAX + 1))
    def test_sears_to_top_degree(self, base, n):
        params = {"n": n, "a": 0.3, "b": -0.4, "c": 0.6, "d": 0.5, "e": -0.7}
        result = check_identity("ID_2_20", params, base)
        assert result.tolerance == 1e-11
        assert result.passed, (n, result.rel_err)

    def test_big_q_jacobi_series_top_degree(self, base):
        params = {"n": TERMINATING_DEGREE_MAX, "a": -0.8, "t1": 0.3, "t2": 0.2, "x": 0.45}
        assert check_identity("ID_3_14", params, base).passed

    def test_explicit_tolerance_wins(self, q_half):
        result = check_identity("ID_2_7", {"n": 4, "a": -2.5, "c": 0.4}, q_half, tolerance=1e-6)
        assert result.tolerance == 1e-6


class TestRepresentationDraws:
    def test_one_draw_per_family(self):
        draws = _draw_representations(np.random.default_rng(3), 0.5)
        assert [d["family"] for d in draws] == [family.value for family in REPR_DRAWERS]
        assert all(d["n_max"] == REPR_DEGREE_MAX == 12 for d in draws)

    def test_plan_expands_family_draws(self):
        config = RunConfig(selector="check:REPR", q_values=[0.5], seed=1, random_draws=2)
        tasks = plan_suite(config)
        grid_size = len(plan_suite(config.model_copy(update={"random_draws": 0})))
        assert len(tasks) == grid_size + 2 * len(REPR_DRAWERS)

    def test_default_tolerance(self, q_half):
        params = {"family": FamilyId.SZEGO_CIRCLE.value, "variant": "default", "coordinate": 0.4, "n_max": 3}
        assert check_representation(params, q_half).tolerance == 1e-9

    @pytest.mark.slow
    def test_twenty_draws_at_degree_twelve(self, base):
        rng = np.random.default_rng(20240)
        for _ in range(20):
            for params in _draw_representations(rng, base.q):
                result = check_representation(params, base)
                assert result.passed, (params, result.rel_err)
