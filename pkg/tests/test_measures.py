import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.errors import DomainViolation, PoleInNormalizer
from app.services.integrate import total_mass
from app.services.measures import (
    MeasureShape, asc_weight, attach, aw_weight, big_q_jacobi_measure, build_measure, carlitz_measure,
    circle_weights, hermite_trig_weight, measure_table, measure_table_csv, nu_measure, qinv_atom_location,
    qinv_hermite_measure, qinv_nu_mass, v_measures,
)
from app.services.qcore import QBase, qpoch_inf_value, qpoch_value

THETAS = np.linspace(0.0, math.pi, 1000)


class TestIntervalWeights:
    def test_hermite_at_half_pi(self, q_half):
        mu = hermite_trig_weight(q_half)
        expected = qpoch_inf_value(-1, 0.5).real ** 2
        assert_allclose(mu.density(np.array([math.pi / 2])), [expected], rtol=1e-13)

    def test_hermite_vanishes_at_endpoints(self, q_half):
        values = hermite_trig_weight(q_half).density(np.array([0.0, math.pi]))
        assert np.all(np.abs(values) < 1e-14)

    def test_asc_reduces_to_hermite(self, base):
        hermite = hermite_trig_weight(base).density(THETAS)
        assert_allclose(asc_weight(0.0, 0.0, base).density(THETAS), hermite, rtol=1e-13, atol=1e-15)

    def test_asc_spot_value(self, q_half):
        theta = math.pi / 3
        w = complex(math.cos(theta), math.sin(theta))
        expected = (qpoch_inf_value(w * w, 0.5) * qpoch_inf_value(1 / (w * w), 0.5)
                    / (qpoch_inf_value(0.3 * w, 0.5) * qpoch_inf_value(0.3 / w, 0.5)
                       * qpoch_inf_value(-0.2 * w, 0.5) * qpoch_inf_value(-0.2 / w, 0.5)))
        value = asc_weight(0.3, -0.2, q_half).density(np.array([theta]))[0]
        assert value == pytest.approx(expected.real, rel=1e-12)

    def test_attachment_identity(self, base):
        q = base.q
        t1, t2, k = 0.4, -0.3, 3
        w = np.exp(1j * THETAS)
        factor = np.ones_like(w)
        for j in range(k):
            factor *= (1 - t1 * q ** j * w) * (1 - t1 * q ** j / w)
        lhs = asc_weight(t1, t2, base).density(THETAS) * factor.real
        rhs = asc_weight(t1 * q ** k, t2, base).density(THETAS)
        assert_allclose(lhs, rhs, rtol=1e-11, atol=1e-300)

    def test_aw_reduces_to_asc(self, base):
        assert_allclose(
            aw_weight([0.3, -0.5, 0.0, 0.0], base).density(THETAS),
            asc_weight(0.3, -0.5, base).density(THETAS),
            rtol=1e-13, atol=1e-15,
        )

    @pytest.mark.parametrize("params", [(0.9, -0.9, 0.5, 0.2), (0.3, 0.3, -0.6, 0.1)])
    def test_aw_positive(self, base, params):
        assert np.all(aw_weight(list(params), base).density(THETAS) >= 0)

    def test_domain(self, q_half):
        with pytest.raises(DomainViolation):
            asc_weight(1.0, 0.0, q_half)
        with pytest.raises(DomainViolation):
            aw_weight([0.1, 0.1, 0.1, -1.2], q_half)

    def test_declared_total_mass(self, q_half):
        mu = asc_weight(0.3, 0.2, q_half)
        assert mu.total_mass == pytest.approx(2 * math.pi / (qpoch_inf_value(0.5, 0.5) * qpoch_inf_value(0.06, 0.5)).real)


class TestCarlitz:
    def test_first_atoms(self, q_half):
        mu = carlitz_measure(-1.0, q_half)
        first = [branch.take(1)[0] for branch in mu.branches]
        assert [atom.point for atom in first] == [1.0, -1.0]
        assert first[0].mass == pytest.approx(1 / qpoch_inf_value(-1, 0.5).real, rel=1e-14)

    def test_total_mass(self, base):
        for a in (-1.0, -0.4, -2.5):
            result = total_mass(carlitz_measure(a, base))
            assert abs(result.value - 1) < 1e-12

    def test_tail_bound_decreases(self, q_half):
        mu = carlitz_measure(-0.7, q_half)
        bounds = [mu.tail_bound(k) for k in (4, 8, 16, 32)]
        assert all(b > c for b, c in zip(bounds, bounds[1:]))

    def test_requires_negative_a(self, q_half):
        with pytest.raises(DomainViolation):
            carlitz_measure(0.5, q_half)

    def test_big_q_jacobi_mass(self, q_half):
        mu = big_q_jacobi_measure(-0.8, 0.4, -0.3, q_half)
        assert abs(total_mass(mu).value - mu.total_mass) < 1e-12 * abs(mu.total_mass)

    def test_concurrent_enumeration(self, q_half):
        mu = carlitz_measure(-1.0, q_half)
        with ThreadPoolExecutor(max_workers=4) as pool:
            lists = list(pool.map(lambda count: mu.atoms(count), [40, 40, 40, 40]))
        assert all(atoms == lists[0] for atoms in lists)


class TestVMeasures:
    def test_both_discrete_measures(self, q_half):
        measures = v_measures(0.7, q_half)
        assert [mu.name for mu in measures] == ["m", "sigma"]
        for mu in measures:
            assert abs(total_mass(mu).value - 1) < 1e-10

    def test_only_m_below_q(self, q_half):
        assert [mu.name for mu in v_measures(0.3, q_half)] == ["m"]

    def test_only_sigma_above_inverse_q(self, q_half):
        assert [mu.name for mu in v_measures(2.5, q_half)] == ["sigma"]

    def test_nu_density(self, q_half):
        nu = v_measures(0.7, q_half, gamma=1.3)[-1]
        assert nu.shape is MeasureShape.INTERVAL
        assert nu.on_real_line
        value = nu.density(np.array([0.7]))[0]
        assert math.isfinite(value) and value > 0
        assert abs(total_mass(nu).value - 1) < 1e-9

    def test_domain(self, q_half):
        with pytest.raises(DomainViolation):
            v_measures(-0.5, q_half)
        with pytest.raises(DomainViolation):
            v_measures(1.0, q_half, gamma=1.0)
        with pytest.raises(DomainViolation):
            v_measures(0.7, q_half, gamma=-1.0)


class TestCircleWeights:
    def test_pastro_reduces_to_scaled_szego(self, base):
        szego, pastro = circle_weights(base)
        thetas = np.linspace(0, 2 * math.pi, 200, endpoint=False)
        expected = qpoch_inf_value(base.q, base.q).real * szego.density(thetas)
        assert_allclose(pastro.density(thetas), expected, rtol=1e-13)

    def test_szego_total_mass(self, q_half):
        szego, _ = circle_weights(q_half)
        assert total_mass(szego).value == pytest.approx(1 / qpoch_inf_value(0.5, 0.5).real, rel=1e-11)

    def test_pastro_total_mass(self, base):
        _, pastro = circle_weights(base, 0.3, -0.4)
        assert abs(total_mass(pastro).value - 1) < 1e-10

    def test_positivity_flag(self, q_half):
        assert circle_weights(q_half, 0.4, 0.4)[1].positive
        assert not circle_weights(q_half, 0.4, 0.1)[1].positive

    def test_domain(self, q_half):
        with pytest.raises(DomainViolation):
            circle_weights(q_half, 1.5, 0.0)


class TestQinvHermite:
    def test_first_location(self, q_half):
        assert qinv_atom_location(0, 0.8, q_half) == pytest.approx(0.4875)
        mu = qinv_hermite_measure(0.8, q_half)
        assert math.sinh(mu.branches[0].take(1)[0].point) == pytest.approx(0.4875, rel=1e-14)

    def test_total_mass(self, base):
        t = 0.8 if base.q < 0.7 else 0.9
        assert abs(total_mass(qinv_hermite_measure(t, base)).value - 1) < 1e-10

    def test_domain(self, q_half):
        with pytest.raises(DomainViolation):
            qinv_hermite_measure(0.4, q_half)


class TestNuMeasure:
    def test_total_mass(self, q_half):
        mu = qinv_hermite_measure(0.8, q_half)
        nu = nu_measure(mu, 0.3 + 0.2j, 0.3 - 0.2j)
        assert abs(total_mass(nu).value - 1) < 1e-9

    def test_hermitian_parameters_give_nonnegative_masses(self, q_half):
        nu = nu_measure(qinv_hermite_measure(0.8, q_half), 0.3 + 0.2j, 0.3 - 0.2j)
        masses = np.array([atom.mass for atom in nu.atoms(20)])
        assert np.all(np.abs(masses.imag) <= 1e-12 * np.abs(masses).max())
        assert np.all(masses.real >= -1e-15)
        assert nu.positive

    def test_printed_masses(self, q_half):
        t = 0.8
        nu = nu_measure(qinv_hermite_measure(t, q_half), t, 0.0)
        positive, negative = nu.branches
        for atom in negative.take(10):
            assert abs(atom.mass) <= 1e-12
        for atom in positive.take(8):
            expected = qinv_nu_mass(atom.index, t, q_half)
            assert abs(atom.mass - expected) <= 1e-10 * abs(expected) + 1e-300

    def test_pole_in_normalizer(self, q_half):
        with pytest.raises(PoleInNormalizer):
            nu_measure(qinv_hermite_measure(0.8, q_half), 1.0, -0.5)

    def test_requires_hyperbolic_measure(self, q_half):
        with pytest.raises(DomainViolation):
            nu_measure(carlitz_measure(-1.0, q_half), 0.1, 0.1)


class TestAttachAndTable:
    def test_attach_skips_zero_masses(self, q_half):
        mu = qinv_hermite_measure(0.8, q_half)
        calls = []

        def factor(points):
            calls.append(len(points))
            return np.ones_like(points)

        zeroed = attach(attach(mu, lambda p: np.zeros_like(p)), factor)
        zeroed.atoms(5)
        assert calls == []

    def test_normalizer_zero(self, q_half):
        with pytest.raises(PoleInNormalizer):
            attach(hermite_trig_weight(q_half), lambda t: t, 0)

    def test_csv_dump(self, q_half):
        text = measure_table_csv(carlitz_measure(-1.0, q_half), atoms=4)
        lines = text.strip().splitlines()
        assert lines[0] == "location,mass_or_density,cumulative"
        assert len(lines) == 1 + 8

    def test_density_table_cumulative(self, q_half):
        rows = measure_table(hermite_trig_weight(q_half), samples=2001)
        assert rows[0][2] == 0
        assert rows[-1][2].real == pytest.approx(2 * math.pi / qpoch_inf_value(0.5, 0.5).real, rel=1e-5)

    def test_registry(self, q_half):
        assert build_measure("carlitz", q_half, a=-1.0).name == "carlitz"
        assert build_measure("nu", q_half, a=0.7).name == "nu"
        with pytest.raises(DomainViolation):
            build_measure("laguerre", q_half)
        with pytest.raises(DomainViolation):
            build_measure("m", q_half, a=2.5)
