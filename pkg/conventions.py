"""Residual oracles that choose between competing closed forms.

Several reference formulas have a sign or an absolute value that does not
follow from their own derivation. Each oracle evaluates every candidate
against an independent computation and keeps the single one below the
threshold; the residuals of the losers stay in the record as evidence.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from dataclasses import field
from typing import Any

import cs_dilation
import cs_translation
from config import Convention
from constants import DILATION_PROBES
from errors import AdjudicationError
from ladder_ops import WeightConvention
from numerics import QuadratureSpec
from numerics import Transform
from numerics import integrate_half_line

logger = logging.getLogger(__name__)

WEIGHT_THRESHOLD = 1e-12
MEASURE_THRESHOLD = 1e-8
NORM_THRESHOLD = 1e-8
MEAN_ENERGY_THRESHOLD = 1e-8
DERIVATIVE_THRESHOLD = 1e-6

NORM_LABELS = (0.5, 2.0, math.e)
MEAN_ENERGY_LABELS = (0.5, 2.0)
DERIVATIVE_LABELS = (0.3, 1.0, 3.0)
FD_STEP = 1e-5


@dataclass(frozen=True)
class ConventionVerdict:
    formula: str
    candidates: dict[str, float]
    selected: str
    threshold: float
    evidence: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "formula": self.formula,
            "candidates": dict(sorted(self.candidates.items())),
            "selected": self.selected,
            "threshold": self.threshold,
            "evidence": dict(sorted(self.evidence.items())),
        }


@dataclass(frozen=True)
class ConventionRecord:
    verdicts: tuple[ConventionVerdict, ...]

    def selected(self) -> dict[str, str]:
        return {v.formula: v.selected for v in self.verdicts}

    def verdict(self, formula: str) -> ConventionVerdict:
        for v in self.verdicts:
            if v.formula == formula:
                return v
        raise KeyError(formula)

    def to_dict(self) -> dict[str, Any]:
        return {v.formula: v.to_dict() for v in self.verdicts}


def _select(
    formula: str,
    candidates: dict[str, float],
    threshold: float,
    evidence: dict[str, float] | None = None,
) -> ConventionVerdict:
    passing = [name for name, r in candidates.items() if r < threshold]
    if len(passing) != 1:
        raise AdjudicationError(
            f"{formula}: expected exactly one candidate below "
            f"{threshold:g}, got {passing or 'none'} from {candidates}"
        )
    for name, residual in candidates.items():
        if name != passing[0]:
            logger.warning(
                f"{formula}: rejected {name} (residual {residual:.3e})"
            )
    logger.info(f"{formula}: selected {passing[0]}")
    return ConventionVerdict(
        formula=formula,
        candidates=candidates,
        selected=passing[0],
        threshold=threshold,
        evidence=evidence or {},
    )


def dilation_weight_verdict(beta: float, lam: float) -> ConventionVerdict:
    """Eigen-iteration residual for each sign of the weight exponent."""
    p = cs_dilation.DilationParams(beta=beta, s=2.0, lam=lam)
    candidates = {
        c.value: cs_dilation.iteration_residual(p, c) for c in WeightConvention
    }
    evidence = {
        f"C(1e-12)_{c.value}": float(cs_dilation.coefficient_C(1e-12, p, c))
        for c in WeightConvention
    }
    return _select("dilation_weight", candidates, WEIGHT_THRESHOLD, evidence)


def dilation_measure_verdict(beta: float) -> ConventionVerdict:
    """Moment-problem residual of rho at the lnE probes."""
    candidates = {
        c.value: max(
            cs_dilation.stieltjes_residual(x, beta, c) for x in DILATION_PROBES
        )
        for c in cs_dilation.MeasureConvention
    }
    return _select("dilation_measure", candidates, MEASURE_THRESHOLD)


def _defining_integral(s: float, alpha: float) -> float:
    log_s = math.log(s)
    spec = QuadratureSpec(
        transform=Transform.gaussian_centering,
        center=max(log_s / alpha, 0.0),
    )

    def integrand(energy: float) -> float:
        return math.exp(2.0 * energy * log_s - alpha * energy * energy)

    return float(integrate_half_line(integrand, spec).value)


def translation_norm_verdict(alpha: float) -> ConventionVerdict:
    integrals = {s: _defining_integral(s, alpha) for s in NORM_LABELS}
    forms = {
        "integral": cs_translation.normalization,
        "paper_abs": cs_translation.normalization_paper,
    }
    candidates = {
        name: max(
            abs(form(s, alpha) ** 2 * i - 1.0) for s, i in integrals.items()
        )
        for name, form in forms.items()
    }
    return _select("translation_norm", candidates, NORM_THRESHOLD)


def translation_mean_energy_verdict(alpha: float) -> ConventionVerdict:
    alphas = sorted({alpha, 2.0})
    oracle = {
        (s, a): cs_translation.mean_energy_quadrature(
            cs_translation.TranslationParams(alpha=a, s=s)
        )
        for s in MEAN_ENERGY_LABELS
        for a in alphas
    }
    forms = {
        "integral": lambda s, a: cs_translation.action_variable(s, a),
        "paper_abs": lambda s, a: cs_translation.mean_energy_paper(s, a, 1.0),
    }
    candidates = {
        name: max(
            abs(form(s, a) / value - 1.0) for (s, a), value in oracle.items()
        )
        for name, form in forms.items()
    }
    return _select(
        "translation_mean_energy", candidates, MEAN_ENERGY_THRESHOLD
    )


def _central_difference(s: float, alpha: float) -> float:
    h = FD_STEP * s
    upper = cs_translation.action_variable(s + h, alpha)
    lower = cs_translation.action_variable(s - h, alpha)
    return (upper - lower) / (2.0 * h)


def translation_derivative_verdict(alpha: float) -> ConventionVerdict:
    differences = {s: _central_difference(s, alpha) for s in DERIVATIVE_LABELS}
    candidates = {
        form.value: max(
            abs(
                cs_translation.mean_energy_derivative(s, alpha, 1.0, form) / fd
                - 1.0
            )
            for s, fd in differences.items()
        )
        for form in cs_translation.DisplayForm
    }
    evidence = {
        "paper_at_s=1": cs_translation.mean_energy_derivative(
            1.0, alpha, 1.0, cs_translation.DisplayForm.paper
        ),
        "fd_at_s=1": differences[1.0],
    }
    return _select(
        "translation_derivative", candidates, DERIVATIVE_THRESHOLD, evidence
    )


@functools.lru_cache(maxsize=32)
def adjudicate(alpha: float, beta: float, lam: float) -> ConventionRecord:
    """Run every oracle once per (alpha, beta, lam)."""
    logger.info(
        f"adjudicating conventions (alpha={alpha:g}, beta={beta:g}, "
        f"lambda={lam:g})"
    )
    return ConventionRecord(
        verdicts=(
            dilation_weight_verdict(beta, lam),
            dilation_measure_verdict(beta),
            translation_norm_verdict(alpha),
            translation_mean_energy_verdict(alpha),
            translation_derivative_verdict(alpha),
        )
    )


def resolve(
    record: ConventionRecord, forced: Convention
) -> tuple[WeightConvention, cs_dilation.MeasureConvention]:
    """Weight and measure conventions for a run.

    auto takes the adjudicated choice, paper and kernel force a side.
    """
    if forced is Convention.paper:
        return WeightConvention.paper, cs_dilation.MeasureConvention.paper
    if forced is Convention.kernel:
        return (
            WeightConvention.kernel_consistent,
            cs_dilation.MeasureConvention.moment_solution,
        )
    selected = record.selected()
    return (
        WeightConvention(selected["dilation_weight"]),
        cs_dilation.MeasureConvention(selected["dilation_measure"]),
    )

