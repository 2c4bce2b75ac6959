import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oipr.interest import OiprParams, build_interest_curve, default_params, episode_starts
from oipr.metrics import (
    PrfScores,
    adjust_predictions,
    auc,
    evaluate,
    f1_score,
    oipr_scores,
    pa_scores,
    pak_scores,
    pointwise_min,
    pw_scores,
    register_evaluator,
    unregister_evaluator,
)
from oracles import pw_ref

P = OiprParams(5, 20, 0.5)


def event(n, start, length):
    y = np.zeros(n, dtype=np.int8)
    y[start : start + length] = 1
    return y


pairs_st = st.integers(1, 64).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(0, 1), min_size=n, max_size=n),
        st.lists(st.integers(0, 1), min_size=n, max_size=n),
    )
)


class TestCurveAlgebra:
    def test_auc(self):
        assert auc(np.zeros(5)) == 0
        assert auc([1, 0.5, 0.25]) == 1.75

    def test_auc_of_two_point_event(self):
        curve = build_interest_curve([0, 0, 1, 1, 0, 0, 0, 0, 0, 0], OiprParams(2, 3, 0.5))
        assert auc(curve) == pytest.approx(2.2612789310427828, abs=1e-12)

    def test_pointwise_min(self):
        c = np.array([0.3, 1.0, 0.2])
        np.testing.assert_array_equal(pointwise_min(c, c), c)
        np.testing.assert_array_equal(pointwise_min(c, np.zeros(3)), np.zeros(3))
        np.testing.assert_array_equal(pointwise_min([1, 0.5], [0.4, 0.6]), [0.4, 0.5])
        with pytest.raises(ValueError, match="mismatch"):
            pointwise_min([1, 2], [1])


class TestF1:
    def test_zero(self):
        assert f1_score(0, 0) == 0

    def test_harmonic_mean(self):
        assert f1_score(1.0, 0.5) == pytest.approx(2 / 3)


class TestPointWise:
    def test_first_point_only(self):
        gt = event(90, 20, 50)
        pred = event(90, 20, 1)
        c, s = pw_scores(gt, pred)
        assert (c.tp, c.fp, c.fn) == (1, 0, 49)
        assert s.fmt() == "1.000/0.020/0.039"

    def test_with_false_positives(self):
        gt = event(200, 20, 20)
        pred = gt.copy()
        pred[100:110] = 1
        assert pw_scores(gt, pred)[1].fmt() == "0.667/1.000/0.800"

    def test_identity(self):
        gt = event(30, 3, 4)
        assert pw_scores(gt, gt)[1].as_tuple() == (1.0, 1.0, 1.0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            pw_scores([0, 1], [0, 1, 0])

    @given(pairs_st)
    def test_matches_oracle(self, pair):
        gt, pred = pair
        got = pw_scores(gt, pred)[1].as_tuple()
        assert got == pytest.approx(pw_ref(gt, pred), abs=1e-15)


class TestPointAdjust:
    def test_first_point_fills_event(self):
        gt = event(90, 20, 50)
        assert pa_scores(gt, event(90, 20, 1))[1].as_tuple() == (1.0, 1.0, 1.0)

    def test_all_zero(self):
        gt = event(30, 5, 5)
        assert pa_scores(gt, np.zeros(30))[1].as_tuple() == (0.0, 0.0, 0.0)

    def test_fps_outside_events_kept(self):
        gt = event(30, 5, 5)
        pred = np.zeros(30, dtype=int)
        pred[[5, 20]] = 1
        adjusted = adjust_predictions(gt, pred)
        assert adjusted[5:10].all() and adjusted[20] == 1 and adjusted.sum() == 6

    def test_pak_above_threshold(self):
        gt = event(90, 20, 50)
        assert pak_scores(gt, event(90, 20, 26), 50)[1].as_tuple() == (1.0, 1.0, 1.0)

    def test_pak_below_threshold_keeps_raw_hits(self):
        gt = event(90, 20, 50)
        assert pak_scores(gt, event(90, 20, 10), 50)[1].fmt() == "1.000/0.200/0.333"

    def test_pak_boundary_is_inclusive(self):
        gt = event(40, 10, 10)
        _, s = pak_scores(gt, event(40, 10, 5), 50)
        assert s.recall == 1.0

    def test_pak_full_threshold(self):
        gt = event(40, 10, 10)
        assert pak_scores(gt, gt, 100)[1].as_tuple() == (1.0, 1.0, 1.0)
        assert pak_scores(gt, event(40, 10, 9), 100)[1].recall == 0.9

    @pytest.mark.parametrize("k", [0, -5, 100.5])
    def test_pak_rejects_bad_k(self, k):
        with pytest.raises(ValueError):
            pak_scores([0, 1], [0, 1], k)

    @given(pairs_st)
    def test_pa_recall_dominates_pw(self, pair):
        gt, pred = pair
        assert pa_scores(gt, pred)[1].recall >= pw_scores(gt, pred)[1].recall

    @given(pairs_st)
    def test_pak_limits(self, pair):
        gt, pred = pair
        assert pak_scores(gt, pred, 1e-9)[1] == pa_scores(gt, pred)[1]
        full = adjust_predictions(gt, pred, 100)
        # K = 100 only fills events that are already complete, a no-op
        np.testing.assert_array_equal(full, np.asarray(pred))


class TestOipr:
    def test_identity(self):
        gt = event(100, 20, 30)
        areas, s = oipr_scores(gt, gt, P)
        assert s.as_tuple() == (1.0, 1.0, 1.0)
        assert areas.fp_oi == 0 and areas.fn_oi == 0

    def test_all_zero_prediction(self):
        gt = event(100, 20, 30)
        areas, s = oipr_scores(gt, np.zeros(100), P)
        assert s.as_tuple() == (0.0, 0.0, 0.0)
        assert areas.tp_oi == 0

    def test_full_detection_of_long_event(self):
        gt = event(90, 20, 50)
        assert oipr_scores(gt, gt.copy(), P)[1].as_tuple() == (1.0, 1.0, 1.0)

    @settings(max_examples=200, deadline=None)
    @given(pairs_st, st.integers(0, 6), st.integers(0, 6), st.sampled_from([0.0, 0.5, 0.9]))
    def test_area_identities(self, pair, l_dis, l_obs, b):
        gt, pred = pair
        p = OiprParams(l_dis, l_obs, b)
        areas, s = oipr_scores(gt, pred, p)
        auc_gt = auc(build_interest_curve(gt, p))
        auc_pred = auc(build_interest_curve(pred, p))
        assert areas.tp_oi + areas.fp_oi == pytest.approx(auc_pred, abs=1e-12)
        assert areas.tp_oi + areas.fn_oi == pytest.approx(auc_gt, abs=1e-12)
        assert areas.tp_oi <= min(auc_gt, auc_pred) + 1e-12
        for v in s.as_tuple():
            assert 0.0 <= v <= 1.0

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(0, 1), min_size=10, max_size=60), st.integers(1, 6))
    def test_isolated_fp_lowers_precision_only(self, labels, l_obs):
        gt = np.array(labels, dtype=np.int8)
        assume(gt.any())
        pred = gt.copy()
        pred[np.flatnonzero(gt)[0]] = 0  # keep precision off the trivial 1.0 ceiling
        assume(pred.any())
        p = OiprParams(2, l_obs, 0.5)
        pad = np.zeros(2 * l_obs + 3, dtype=np.int8)
        gt_x = np.concatenate([gt, pad])
        base = np.concatenate([pred, pad])
        with_fp = base.copy()
        with_fp[len(gt) + l_obs + 1] = 1
        _, s0 = oipr_scores(gt_x, base, p)
        _, s1 = oipr_scores(gt_x, with_fp, p)
        assert s1.precision < s0.precision
        assert s1.recall == s0.recall

    def test_fragment_merging_costs_less_than_dispersed(self):
        n = 400
        gt = event(n, 20, 20)
        pred = gt.copy()
        pred[100] = 1  # an existing FP episode far from the event
        merged = pred.copy()
        merged[110] = 1  # inside that episode's observation window
        isolated = pred.copy()
        isolated[200] = 1  # far from every episode
        base_p = oipr_scores(gt, pred, P)[1].precision
        drop_merged = base_p - oipr_scores(gt, merged, P)[1].precision
        drop_isolated = base_p - oipr_scores(gt, isolated, P)[1].precision
        assert 0 < drop_merged < drop_isolated

    def test_strict_occurrence_configuration(self):
        p = OiprParams(0, 1, 0.0)
        gt = np.zeros(30, dtype=int)
        gt[[3, 4, 5, 12, 20, 21]] = 1
        pred = np.zeros(30, dtype=int)
        pred[[3, 13, 14, 20]] = 1
        areas, _ = oipr_scores(gt, pred, p)
        coinciding = set(episode_starts(gt, 1)) & set(episode_starts(pred, 1))
        assert coinciding == {3, 20}
        assert areas.tp_oi == pytest.approx(2.0)


class TestEvaluate:
    def test_identity_for_builtins(self):
        gt = event(100, 20, 30)
        for name in ("pw", "pa", "pak", "oipr"):
            assert evaluate(gt, gt, name).scores.as_tuple() == (1.0, 1.0, 1.0)

    def test_oipr_all_zero_flags(self):
        gt = event(100, 20, 30)
        r = evaluate(gt, np.zeros(100), "oipr")
        assert r.scores.as_tuple() == (0.0, 0.0, 0.0)
        assert r.flags["precision_denominator_zero"] is True
        assert r.flags["recall_denominator_zero"] is False

    def test_oipr_config_echo(self):
        gt = event(100, 20, 30)
        r = evaluate(gt, gt, "oipr")
        assert r.config == default_params(gt).to_dict()
        assert r.flags["params_derived"] is True
        r = evaluate(gt, gt, "oipr", {"l_obs": 0})
        assert r.config["l_obs"] == 0 and r.flags["params_overridden"] == ["l_obs"]

    def test_oipr_without_gt_events_needs_params(self):
        with pytest.raises(ValueError, match="cannot be derived"):
            evaluate(np.zeros(10), np.zeros(10), "oipr")
        r = evaluate(np.zeros(10), np.zeros(10), "oipr", {"l_dis": 1, "l_obs": 2, "b_dur": 0.5})
        assert r.scores.as_tuple() == (0.0, 0.0, 0.0)
        assert r.flags["recall_denominator_zero"]

    def test_pak_c3(self):
        gt = event(90, 20, 50)
        r = evaluate(gt, event(90, 20, 26), "pak", {"k": 50})
        assert r.scores.as_tuple() == (1.0, 1.0, 1.0)
        assert r.config == {"k": 50.0}

    def test_digest(self):
        r = evaluate([0, 1, 1, 0, 1], [1, 1, 0, 0, 0], "pw")
        assert r.digest == {"length": 5, "gt_events": 2, "pred_events": 1, "gt_points": 3, "pred_points": 2}

    def test_unknown(self):
        with pytest.raises(KeyError, match="unknown evaluator"):
            evaluate([1], [1], "tapr")

    def test_plugin(self):
        def always_half(gt, pred, config):
            assert len(gt) == len(pred)
            return PrfScores(0.5, 0.5, 0.5)

        register_evaluator("half", always_half)
        try:
            r = evaluate([0, 1], [1, 1], "half", {"alpha": 0.3})
            assert r.evaluator == "half"
            assert r.scores.f1 == 0.5
            assert r.config == {"alpha": 0.3}
            with pytest.raises(ValueError, match="already registered"):
                register_evaluator("half", always_half)
        finally:
            unregister_evaluator("half")
        with pytest.raises(KeyError):
            evaluate([1], [1], "half")

    def test_plugin_cannot_shadow_builtin(self):
        with pytest.raises(ValueError):
            register_evaluator("pw", lambda g, p, c: PrfScores(0, 0, 0))

    def test_plugin_must_return_scores(self):
        register_evaluator("bad", lambda g, p, c: (1, 1, 1))
        try:
            with pytest.raises(TypeError):
                evaluate([1], [1], "bad")
        finally:
            unregister_evaluator("bad")
