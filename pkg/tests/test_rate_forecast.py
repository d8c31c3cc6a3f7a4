import math

import numpy as np
import pytest

from demotrend.core import FERTILE_BANDS, AGE_BANDS, Sex, Variable
from demotrend.errors import NonPositiveGdp, NoWeightData
from demotrend.models import FORM_ORDER, ModelForm, PARAM_COUNT, aicc, raw_prediction
from demotrend.rate_forecast import (
    CapPolicy,
    CountryEnsembles,
    build_country_ensembles,
    build_ensemble,
    forecast_rate,
)

# Long wiggly sample: every candidate form is admissible (n = 14 > 5 + 1).
GDP = np.array([400.0, 550.0, 700.0, 900.0, 1150.0, 1400.0, 1700.0, 2100.0,
                2600.0, 3200.0, 3900.0, 4700.0, 5600.0, 6600.0])
RATE = np.array([0.242, 0.231, 0.204, 0.198, 0.172, 0.169, 0.152, 0.148,
                 0.133, 0.131, 0.120, 0.121, 0.112, 0.114])
POINTS = np.column_stack([GDP, RATE])


class TestCapPolicy:
    def test_default(self):
        assert CapPolicy().fertility_cap_gdp == 30000.0

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_invalid_rejected(self, bad):
        with pytest.raises(ValueError):
            CapPolicy(fertility_cap_gdp=bad)


class TestBuildEnsemble:
    def test_all_forms_join_on_rich_sample(self):
        ensemble = build_ensemble(POINTS, POINTS)
        assert [m.form for m in ensemble.members] == list(FORM_ORDER)
        assert sum(ensemble.weights) == pytest.approx(1.0, abs=1e-9)

    def test_weights_match_criterion_values(self):
        from demotrend.models import akaike_weights

        ensemble = build_ensemble(POINTS, POINTS)
        expected = akaike_weights([m.aicc for m in ensemble.members])
        assert list(ensemble.weights) == pytest.approx(expected, abs=1e-12)

    def test_rescoring_uses_target_points_only(self):
        """Member criterion must reflect target residuals, not the fit sample."""
        donor = np.column_stack([GDP * 3.0, RATE * 0.5])
        fit_points = np.vstack([POINTS, donor])
        ensemble = build_ensemble(fit_points, POINTS)
        n_w = POINTS.shape[0]
        for member in ensemble.members:
            resid = RATE - raw_prediction(member, GDP)
            rss = float(resid @ resid)
            assert member.aicc == pytest.approx(
                aicc(rss, n_w, member.k_params), rel=1e-12)
            assert member.n_fit == n_w
            assert member.sigma == pytest.approx(
                math.sqrt(max(rss, 1e-12) / n_w), rel=1e-12)

    def test_small_scoring_sample_drops_big_forms(self):
        # 5 scoring points: forms with k >= 4 have n <= k+1 -> excluded
        small = POINTS[:5]
        ensemble = build_ensemble(POINTS, small)
        forms = {m.form for m in ensemble.members}
        assert ModelForm.NULL in forms and ModelForm.LINEAR in forms
        assert all(PARAM_COUNT[m.form] + 1 < 5 for m in ensemble.members)

    def test_two_point_sample_falls_back_to_null(self):
        tiny = POINTS[:2]
        ensemble = build_ensemble(tiny, tiny)
        (member,) = ensemble.members
        assert member.form is ModelForm.NULL
        assert ensemble.weights == (1.0,)
        assert member.aicc == math.inf
        assert member.ybar == pytest.approx(tiny[:, 1].mean())

    def test_empty_weight_points_rejected(self):
        with pytest.raises(NoWeightData):
            build_ensemble(POINTS, np.empty((0, 2)))

    def test_deterministic(self):
        a = build_ensemble(POINTS, POINTS)
        b = build_ensemble(POINTS, POINTS)
        assert a.members == b.members
        assert a.weights == b.weights


class TestForecastRate:
    def setup_method(self):
        self.ensemble = build_ensemble(POINTS, POINTS)
        self.cap = CapPolicy()

    def test_weighted_average_of_members(self):
        from demotrend.models import predict

        got = forecast_rate(self.ensemble, 1000.0, Variable.MORTALITY, self.cap)
        expected = sum(w * predict(m, 1000.0)
                       for m, w in zip(self.ensemble.members, self.ensemble.weights))
        assert got == pytest.approx(expected, rel=1e-12)

    def test_forecast_never_negative(self):
        for gdp in (1.0, 10.0, 1e4, 1e6, 1e9):
            assert forecast_rate(self.ensemble, gdp, Variable.MORTALITY,
                                 self.cap) >= 0.0

    def test_fertility_capped_exactly(self):
        cap = CapPolicy(fertility_cap_gdp=5000.0)
        at_cap = forecast_rate(self.ensemble, 5000.0, Variable.FERTILITY, cap)
        for gdp in (5000.0, 5001.0, 50000.0, 1e8):
            assert forecast_rate(self.ensemble, gdp, Variable.FERTILITY,
                                 cap) == at_cap

    def test_below_cap_unaffected(self):
        loose = CapPolicy(fertility_cap_gdp=30000.0)
        tight = CapPolicy(fertility_cap_gdp=5000.0)
        assert forecast_rate(self.ensemble, 4000.0, Variable.FERTILITY, loose) == \
            forecast_rate(self.ensemble, 4000.0, Variable.FERTILITY, tight)

    def test_mortality_ignores_cap(self):
        tight = CapPolicy(fertility_cap_gdp=500.0)
        loose = CapPolicy(fertility_cap_gdp=1e9)
        for gdp in (600.0, 6000.0, 60000.0):
            assert forecast_rate(self.ensemble, gdp, Variable.MORTALITY, tight) == \
                forecast_rate(self.ensemble, gdp, Variable.MORTALITY, loose)

    @pytest.mark.parametrize("bad", [0.0, -100.0, math.nan, math.inf])
    def test_invalid_gdp_rejected(self, bad):
        with pytest.raises(NonPositiveGdp):
            forecast_rate(self.ensemble, bad, Variable.FERTILITY, self.cap)


class TestCountryEnsembles:
    def test_full_coverage(self, tiny_dataset):
        built = build_country_ensembles(tiny_dataset, "AAA", ["BBB"])
        assert sorted(built.fertility) == sorted(FERTILE_BANDS)
        assert len(built.mortality) == len(AGE_BANDS) * 2

    def test_both_sex_mortality_shared(self, tiny_dataset):
        # tiny fixture has Both-sex mortality only -> one build serves both sexes
        assert not tiny_dataset.has_sexed_mortality
        built = build_country_ensembles(tiny_dataset, "AAA", [])
        for band in AGE_BANDS:
            assert built.mortality[(band, Sex.FEMALE)] is built.mortality[(band, Sex.MALE)]

    def test_cache_reuse_and_keying(self, tiny_dataset):
        cache: dict = {}
        first = build_country_ensembles(tiny_dataset, "AAA", ["BBB"], cache=cache)
        size_after_first = len(cache)
        again = build_country_ensembles(tiny_dataset, "AAA", ["BBB"], cache=cache)
        assert len(cache) == size_after_first
        for band in FERTILE_BANDS:
            assert again.fertility[band] is first.fertility[band]
        # a different donor set must not collide in the cache
        build_country_ensembles(tiny_dataset, "AAA", [], cache=cache)
        assert len(cache) > size_after_first

    def test_donor_changes_fertility_fit(self, tiny_dataset):
        alone = build_country_ensembles(tiny_dataset, "AAA", [])
        augmented = build_country_ensembles(tiny_dataset, "AAA", ["BBB"])
        assert alone.fertility["20-24"].members != augmented.fertility["20-24"].members

    def test_ensemble_forms_are_distinct(self, tiny_dataset):
        built = build_country_ensembles(tiny_dataset, "AAA", [])
        for ensemble in built.fertility.values():
            forms = [m.form for m in ensemble.members]
            assert len(forms) == len(set(forms))
