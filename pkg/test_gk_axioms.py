import math

import pytest

import cs_translation
import gk_axioms
from config import Convention
from config import Family
from config import RunConfig
from constants import CONTINUITY_THRESHOLD
from cs_dilation import DilationParams
from cs_translation import TranslationParams
from errors import OutOfDomainError
from gk_axioms import Verdict
from gk_axioms import continuity_verdict
from gk_axioms import max_verdict
from report_generator import render_json


def small_config(family: Family, **overrides) -> RunConfig:
    values = {"family": family, "s_values": [1.0], "shape_values": [1.0]}
    values.update(overrides)
    return RunConfig(**values)


@pytest.fixture(scope="module")
def translation_report():
    return gk_axioms.run_axiom_suite(RunConfig(family=Family.translation))


@pytest.fixture(scope="module")
def dilation_report():
    return gk_axioms.run_axiom_suite(RunConfig(family=Family.dilation))


class TestDefaultSuites:
    def test_translation_passes(self, translation_report):
        failed = [
            k for k, v in translation_report.verdict.items() if not v.passed
        ]
        assert failed == []
        assert translation_report.passed
        assert translation_report.errors == {}

    def test_dilation_passes(self, dilation_report):
        failed = [
            k for k, v in dilation_report.verdict.items() if not v.passed
        ]
        assert failed == []
        assert dilation_report.conventions_used == {
            "weight": "kernel_consistent",
            "measure": "moment_solution",
        }

    def test_grid_covers_every_point(self, translation_report):
        assert len(translation_report.params_grid) == 9
        assert len(translation_report.eigen_residuals) == 9
        assert len(translation_report.temporal_residuals) == 9 * 4

    def test_verdict_names(self, translation_report):
        assert set(translation_report.verdict) == {
            "continuity",
            "temporal_stability",
            "resolution",
            "action_identity",
            "commutator_limit",
            "eigen_identity",
            "normalization",
            "product_limit",
        }

    def test_commutator_ratio_tends_to_one(self, translation_report):
        worst = translation_report.verdict["commutator_limit"].worst
        assert worst < 1e-4

    def test_dilation_kernel_ratio_is_recorded(self, dilation_report):
        kernel_ratios = [k for *_, k in dilation_report.commutator_ratios]
        assert max(abs(k + 1.0) for k in kernel_ratios) < 1e-4

    def test_notes(self, translation_report, dilation_report):
        assert translation_report.notes[0] == gk_axioms.RESOLUTION_NOTE
        assert any("epsilon" in n for n in translation_report.notes)
        assert not any("epsilon" in n for n in dilation_report.notes)

    def test_to_dict_shape(self, translation_report):
        data = translation_report.to_dict()
        assert data["family"] == "translation"
        assert data["passed"] is True
        assert data["schema_version"] == "1.0"
        assert set(data["continuity_residuals"][0]) == {"delta", "distance"}
        assert set(data["temporal_residuals"][0]) == {
            "s",
            "shape",
            "t",
            "residual",
        }
        assert data["verdict"]["normalization"]["count"] == 9
        assert "dilation_weight" in data["convention_record"]


class TestContinuity:
    def test_translation_distances_shrink(self):
        p = TranslationParams(alpha=1.0, s=1.0, gamma=0.3)
        rows = gk_axioms.continuity_check(
            Family.translation, p, [1e-1, 1e-2, 1e-3, 1e-4]
        )
        distances = [d for _, d in rows]
        assert all(a > b for a, b in zip(distances, distances[1:]))
        assert distances[-1] < CONTINUITY_THRESHOLD
        # ||(E - <E>) psi - i E psi|| = sqrt(1 - 1/pi) at s = 1
        assert distances[-1] == pytest.approx(
            1e-4 * math.sqrt(1 - 1 / math.pi), rel=1e-2
        )
        assert distances[-1] < 1e-4
        assert distances[1] / distances[2] == pytest.approx(10.0, rel=0.1)

    def test_dilation_distances_shrink(self):
        p = DilationParams(beta=1.0, s=1.0, gamma=0.3)
        rows = gk_axioms.continuity_check(
            Family.dilation, p, [1e-1, 1e-2, 1e-3]
        )
        distances = [d for _, d in rows]
        assert all(a > b for a, b in zip(distances, distances[1:]))

    def test_zero_delta(self):
        p = TranslationParams()
        assert gk_axioms.continuity_check(Family.translation, p, [0.0]) == [
            (0.0, 0.0)
        ]


@pytest.mark.parametrize("family", list(Family))
def test_temporal_stability(family):
    config = small_config(family)
    p = gk_axioms.make_params(family, 1.0, 2.0, 0.7, config)
    rows = gk_axioms.temporal_stability_check(family, p, [0.0, 0.5, 2.0])
    assert [t for t, _ in rows] == [0.0, 0.5, 2.0]
    assert rows[0][1] == 0.0
    assert max(r for _, r in rows) < 1e-14


class TestResolution:
    def test_translation_probes(self):
        rows = gk_axioms.resolution_check(
            Family.translation, 1.0, [0.0, 1.0, 5.0]
        )
        assert [e for e, _ in rows] == [0.0, 1.0, 5.0]
        assert max(r for _, r in rows) < 1e-8

    def test_dilation_probes(self):
        rows = gk_axioms.resolution_check(Family.dilation, 1.0, [-1.0, 2.0])
        assert max(r for _, r in rows) < 1e-8


@pytest.mark.parametrize("family", list(Family))
def test_action_identity(family):
    config = small_config(family)
    p = gk_axioms.make_params(family, 1.0, 1.0, 0.3, config)
    rows = gk_axioms.action_identity_check(family, [0.6, 2.0], p)
    assert [j for j, _ in rows] == [0.6, 2.0]
    assert max(r for _, r in rows) < 1e-8


class TestVerdicts:
    def test_empty_fails(self):
        assert max_verdict([], 1e-8) == Verdict(False, 1e-8, None, 0)
        assert not continuity_verdict([]).passed

    def test_max_verdict(self):
        verdict = max_verdict([1e-10, 3e-9], 1e-8)
        assert verdict.passed
        assert verdict.worst == 3e-9
        assert verdict.count == 2

    def test_threshold_is_strict(self):
        assert not max_verdict([1e-8], 1e-8).passed

    @pytest.mark.parametrize("bad", [math.nan, math.inf])
    def test_non_finite_fails(self, bad):
        assert not max_verdict([1e-10, bad], 1e-8).passed

    def test_continuity_needs_strict_decrease(self):
        assert continuity_verdict([(1e-1, 1e-2), (1e-2, 1e-4)]).passed
        assert not continuity_verdict([(1e-1, 1e-4), (1e-2, 1e-4)]).passed

    def test_continuity_needs_small_final_distance(self):
        assert not continuity_verdict([(1e-1, 1e-1), (1e-2, 2e-3)]).passed

    def test_to_dict(self):
        assert max_verdict([0.5], 1.0).to_dict() == {
            "passed": True,
            "threshold": 1.0,
            "worst": 0.5,
            "count": 1,
        }


class TestRunSuite:
    def test_rejects_negative_alpha(self):
        config = small_config(Family.translation, alpha=-1.0)
        with pytest.raises(ValueError, match="alpha"):
            gk_axioms.run_axiom_suite(config)

    def test_forced_paper_convention_fails_dilation(self):
        report = gk_axioms.run_axiom_suite(
            small_config(Family.dilation, convention=Convention.paper)
        )
        assert not report.passed
        assert report.conventions_used["weight"] == "paper"
        assert not report.verdict["eigen_identity"].passed
        assert not report.verdict["resolution"].passed

    def test_failing_check_is_isolated(self, monkeypatch):
        def broken(*args, **kwargs):
            raise OutOfDomainError("s must be > 0")

        monkeypatch.setattr(gk_axioms, "continuity_check", broken)
        report = gk_axioms.run_axiom_suite(small_config(Family.translation))
        assert report.errors == {
            "continuity": "OutOfDomainError: s must be > 0"
        }
        assert report.continuity_residuals == []
        assert not report.verdict["continuity"].passed
        assert report.verdict["normalization"].passed
        assert not report.passed

    def test_report_is_deterministic(self):
        config = small_config(Family.translation)
        first = gk_axioms.run_axiom_suite(config).to_dict()
        second = gk_axioms.run_axiom_suite(config).to_dict()
        assert render_json(first) == render_json(second)

    def test_threads_do_not_change_results(self):
        serial = gk_axioms.run_axiom_suite(small_config(Family.dilation))
        threaded = gk_axioms.run_axiom_suite(
            small_config(Family.dilation, jobs=4)
        )
        assert render_json(serial.to_dict()) == render_json(
            threaded.to_dict()
        )

    def test_arithmetic_error_is_isolated(self, monkeypatch):
        def dividing(*args, **kwargs):
            raise ZeroDivisionError("float division by zero")

        monkeypatch.setattr(gk_axioms, "temporal_stability_check", dividing)
        report = gk_axioms.run_axiom_suite(small_config(Family.dilation))
        assert report.errors == {
            "temporal_stability": "ZeroDivisionError: float division by zero"
        }
        assert report.verdict["resolution"].passed

    @pytest.mark.parametrize("family", list(Family))
    def test_far_label_fails_without_aborting(self, family):
        report = gk_axioms.run_axiom_suite(
            small_config(family, s_values=[1e30])
        )
        assert not report.passed
        assert "eigen_identity" not in report.errors
        assert report.verdict["eigen_identity"].worst == math.inf
        assert not report.verdict["temporal_stability"].passed
        assert report.verdict["resolution"].passed

    def test_tolerance_reaches_every_quadrature(self, monkeypatch):
        seen = []
        original = cs_translation.normalization_residual

        def recording(s, alpha, rel_tol=None):
            seen.append(rel_tol)
            return original(s, alpha, rel_tol)

        monkeypatch.setattr(
            cs_translation, "normalization_residual", recording
        )
        config = small_config(Family.translation, rel_tol=1e-7)
        p = gk_axioms.make_params(Family.translation, 1.0, 1.0, 0.3, config)
        report = gk_axioms.run_axiom_suite(config)
        assert seen == [1e-7]
        assert report.verdict["normalization"].passed
        rows = gk_axioms.action_identity_check(
            Family.translation, [1.0], p, rel_tol=1e-7
        )
        assert rows[0][1] < 1e-6
