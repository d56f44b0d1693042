import math

import numpy as np
import pytest

from hypcenter import weights as wt
from hypcenter.errors import (
    DomainError,
    InvalidWeight,
    NotBoundaryCompatible,
    UndefinedAtOne,
)

TANH = math.tanh


def staircase_weight():
    # continuous increasing profile, linear in arclength: s, then 2s-1, then 3
    return wt.clamped_arctanh([(0.0, 1.0, 0.0), (1.0, 2.0, -1.0), (2.0, 0.0, 3.0)])


ALL_WEIGHTS = {
    "identity": wt.identity(),
    "arctanh_power_2": wt.arctanh_power(2.0),
    "arctanh_power_3": wt.arctanh_power(3.0),
    "min_r_arctanh_inv": wt.min_r_arctanh_inv(),
    "clamped_linear": wt.clamped_linear(0.5),
    "staircase": staircase_weight(),
    "log_damped": wt.log_damped(),
    "table": wt.table(
        [0.0, 0.25, 0.5, 0.75, 1.0],
        [0.0, 0.2, 0.55, 0.8, 1.0],
        monotonicity=wt.Monotonicity.STRICTLY_INCREASING,
    ),
}


class TestEvalG:
    def test_identity(self):
        assert wt.eval_g(wt.identity(), 0.7) == 0.7

    def test_dip_weight_at_tanh3(self):
        # min(s, 1/s) evaluated at s = 3
        got = wt.eval_g(wt.min_r_arctanh_inv(), TANH(3.0))
        assert got == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_staircase_plateau(self):
        got = wt.eval_g(staircase_weight(), TANH(2.0))
        assert got == pytest.approx(3.0, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            wt.eval_g(wt.identity(), -0.1)
        with pytest.raises(DomainError):
            wt.eval_g(wt.identity(), 1.5)

    def test_undefined_at_one(self):
        with pytest.raises(UndefinedAtOne):
            wt.eval_g(wt.arctanh_power(2.0), 1.0)

    def test_finite_boundary_values(self):
        assert wt.eval_g(wt.identity(), 1.0) == 1.0
        assert wt.eval_g(wt.clamped_linear(0.5), 1.0) == 0.5
        assert wt.eval_g(staircase_weight(), 1.0) == 3.0
        assert wt.eval_g(wt.min_r_arctanh_inv(), 1.0) == 0.0
        assert wt.eval_g(wt.log_damped(), 1.0) == 0.0


class TestEvalV:
    def test_zero_at_origin(self):
        v = wt.eval_v(wt.identity(), [0.0, 0.0])
        assert np.all(v == 0.0)

    def test_identity_on_sphere(self):
        y = np.array([0.6, 0.8])
        v = wt.eval_v(wt.identity(), y)
        np.testing.assert_allclose(v, y, atol=1e-12)

    def test_dip_weight_at_tanh1(self):
        v = wt.eval_v(wt.min_r_arctanh_inv(), [TANH(1.0), 0.0])
        np.testing.assert_allclose(v, [1.0, 0.0], atol=1e-12)


class TestEvalBigG:
    def test_zero_at_zero(self):
        for w in ALL_WEIGHTS.values():
            assert wt.eval_G(w, 0.0) == 0.0

    def test_identity_closed_form(self):
        r = math.sqrt(1.0 - math.exp(-2.0))
        assert wt.eval_G(wt.identity(), r) == pytest.approx(1.0, abs=1e-13)

    def test_quadratic_arclength(self):
        # G(tanh s) = s^2/2 for the quadratic-energy weight
        assert wt.eval_G(wt.arctanh_power(2.0), TANH(2.0)) == pytest.approx(
            2.0, abs=1e-12
        )

    def test_domain(self):
        with pytest.raises(DomainError):
            wt.eval_G(wt.identity(), 1.0)

    @pytest.mark.parametrize("name", sorted(ALL_WEIGHTS))
    def test_derivative_matches_g(self, name):
        # centered difference of G matches g(r)/(1-r^2); quadrature-backed
        # profiles use a wider step since their G carries ~1e-10 of quad error
        w = ALL_WEIGHTS[name]
        closed_form = name not in ("log_damped", "table")
        h, rtol = (1e-6, 1e-6) if closed_form else (1e-3, 1e-3)
        for r in np.linspace(0.01, 0.95, 12):
            fd = (wt.eval_G(w, r + h) - wt.eval_G(w, r - h)) / (2.0 * h)
            expected = wt.eval_g(w, r) / ((1.0 - r) * (1.0 + r))
            if expected == 0.0:
                assert abs(fd) < 1e-9
            else:
                assert abs(fd - expected) / abs(expected) < rtol

    @pytest.mark.parametrize(
        "name",
        [
            n
            for n, w in ALL_WEIGHTS.items()
            if w.monotonicity is not wt.Monotonicity.NONE
        ],
    )
    def test_arclength_convexity(self, name):
        # s -> G(tanh s) is convex for increasing profiles, strictly so for
        # strictly increasing ones
        w = ALL_WEIGHTS[name]
        h = 1e-3
        for s in np.linspace(0.01, 3.0, 40):
            # consistent (r, s) pairs: the tanh/atanh round trip would inject
            # cosh^2(s) * ulp of parameter noise, swamping the flat segments
            vals = [
                float(wt.eval_G_rs(w, TANH(s + k * h), s + k * h))
                for k in (-1, 0, 1)
            ]
            second = (vals[0] - 2.0 * vals[1] + vals[2]) / h**2
            if w.monotonicity is wt.Monotonicity.STRICTLY_INCREASING:
                assert second > 1e-8
            else:
                assert second >= -1e-8


class TestNormalization:
    def test_identity_unchanged(self):
        w = wt.identity()
        assert wt.normalized_for_boundary(w) is w

    def test_plateau_scaled_to_one(self):
        w = wt.normalized_for_boundary(wt.clamped_linear(0.5))
        assert w.g1 == 1.0
        assert wt.eval_g(w, 1.0) == pytest.approx(1.0, abs=1e-15)
        assert wt.eval_g(w, 0.25) == pytest.approx(0.5, abs=1e-15)

    def test_staircase_scaled(self):
        w = wt.normalized_for_boundary(staircase_weight())
        assert wt.eval_g(w, 1.0) == pytest.approx(1.0, abs=1e-15)
        # breakpoints unchanged: the het kink still sits at s = 1
        assert wt.eval_g(w, TANH(1.0)) == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_zero_set_and_signs_preserved(self):
        base = wt.clamped_linear(0.5)
        scaled = wt.normalized_for_boundary(base)
        for r in np.linspace(0.0, 0.99, 30):
            y = np.array([r, 0.0])
            v0 = wt.eval_v(base, y)
            v1 = wt.eval_v(scaled, y)
            np.testing.assert_allclose(v1, 2.0 * v0, atol=1e-15)

    def test_incompatible_profiles(self):
        with pytest.raises(NotBoundaryCompatible):
            wt.normalized_for_boundary(wt.arctanh_power(2.0))
        with pytest.raises(NotBoundaryCompatible):
            wt.normalized_for_boundary(wt.min_r_arctanh_inv())


class TestConstruction:
    def test_arctanh_power_p1_rejected(self):
        with pytest.raises(InvalidWeight):
            wt.arctanh_power(1.0)

    def test_table_monotonicity_enforced(self):
        with pytest.raises(InvalidWeight):
            wt.table(
                [0.0, 0.5, 1.0],
                [0.0, 0.8, 0.5],
                monotonicity=wt.Monotonicity.INCREASING,
            )

    def test_table_positive_boundary_forces_divergence(self):
        with pytest.raises(InvalidWeight):
            wt.table([0.0, 1.0], [0.0, 1.0], divergent_G=False)

    def test_staircase_must_be_continuous(self):
        with pytest.raises(InvalidWeight):
            wt.clamped_arctanh([(0.0, 1.0, 0.0), (1.0, 2.0, 0.5)])

    def test_metadata_flags(self):
        w = wt.min_r_arctanh_inv()
        assert w.divergent_G
        assert w.g1 == 0.0
        assert w.positive_interior
        assert ALL_WEIGHTS["identity"].monotonicity is wt.Monotonicity.STRICTLY_INCREASING

    def test_divergence_consistency(self):
        for w in ALL_WEIGHTS.values():
            if w.g1 is not None and w.g1 > 0:
                assert w.divergent_G


class TestConfigRoundTrip:
    @pytest.mark.parametrize("name", sorted(ALL_WEIGHTS))
    def test_round_trip(self, name):
        w = ALL_WEIGHTS[name]
        config = w.describe()
        if name == "table":
            config["params"]["monotonicity"] = "strictly_increasing"
        back = wt.weight_from_config(config)
        for r in (0.0, 0.3, 0.77):
            assert wt.eval_g(back, r) == pytest.approx(wt.eval_g(w, r), abs=1e-15)

    def test_scale_round_trip(self):
        w = wt.weight_from_config({"kind": "identity", "params": {}, "scale": 5.0})
        assert wt.eval_g(w, 0.5) == 2.5
        assert w.g1 == 5.0
