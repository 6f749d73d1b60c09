"""Weighted affine-shift operators on the energy half-line.

An operator a acts on the basis as a|E> = w(E)|uE + v>. Everything here is
computed at the kernel level in closed form: application, adjoint,
composition and (q-deformed) commutators, which come out diagonal in E.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
import polars as pl

from config import Family
from kernelstate import EnergyKernel
from numerics import QuadratureSpec
from numerics import Transform

logger = logging.getLogger(__name__)

Weight = Callable[[Any], Any]


class Provenance(str, Enum):
    paper_formula = "paper_formula"
    kernel_calculus = "kernel_calculus"


class WeightConvention(str, Enum):
    """Sign convention of the dilation weight exponent."""

    paper = "paper"
    kernel_consistent = "kernel_consistent"


@dataclass(frozen=True)
class LadderOp:
    """a|E> = w(E)|uE + v>, with w forced to zero below `cutoff`."""

    scale: float
    shift: float
    weight: Weight
    cutoff: float = 0.0
    label: str = ""
    paper_multiplier: Weight | None = None

    def __post_init__(self) -> None:
        if not self.scale > 0:
            raise ValueError(f"scale u must be > 0, got {self.scale}")
        if self.cutoff < 0:
            raise ValueError(f"cutoff must be >= 0, got {self.cutoff}")

    def forward(self, energy: Any) -> Any:
        return self.scale * np.asarray(energy, dtype=float) + self.shift

    def inverse(self, energy: Any) -> Any:
        return (np.asarray(energy, dtype=float) - self.shift) / self.scale

    def masked_weight(self, energy: Any) -> Any:
        e = np.asarray(energy, dtype=float)
        valid = (e > 0) & (e >= self.cutoff)
        safe = np.where(valid, e, max(self.cutoff, 1.0))
        with np.errstate(over="ignore", invalid="ignore"):
            values = np.asarray(self.weight(safe))
        return np.where(valid, values, 0.0)[()]


@dataclass(frozen=True)
class DiagonalMultiplier:
    """psi(E) -> d(E) psi(E)."""

    d: Weight
    provenance: Provenance

    def __call__(self, energy: Any) -> Any:
        return self.d(energy)


def _mapped_spec(spec: QuadratureSpec, to_point: Callable) -> QuadratureSpec:
    points = tuple(p for p in (to_point(x) for x in spec.points) if p > 0)
    return dataclasses.replace(spec, points=points)


def _moved_center(spec: QuadratureSpec, op: LadderOp, forward: bool) -> float:
    if spec.transform is Transform.log_substitution:
        if op.shift != 0:
            return spec.center
        step = math.log(op.scale)
        return spec.center + step if forward else spec.center - step
    moved = (
        float(op.forward(spec.center))
        if forward
        else float(op.inverse(spec.center))
    )
    return max(moved, 0.0)


def apply(op: LadderOp, psi: EnergyKernel) -> EnergyKernel:
    """(a psi)(E) = (1/u) w(x) psi(x) with x = (E - v)/u, zero for x <= 0."""

    def amplitude(energy: Any) -> Any:
        x = op.inverse(energy)
        valid = x > 0
        safe = np.where(valid, x, 1.0)
        values = op.masked_weight(safe) * psi(safe) / op.scale
        return np.where(valid, values, 0.0)[()]

    lo, hi = psi.support_hint
    new_lo = max(0.0, float(op.forward(max(lo, op.cutoff))))
    new_hi = float(op.forward(hi)) if math.isfinite(hi) else math.inf
    spec = _mapped_spec(psi.quadrature, lambda p: float(op.forward(p)))
    spec = spec.centered(_moved_center(spec, op, forward=True))
    if op.cutoff > 0:
        spec = spec.with_points(float(op.forward(op.cutoff)))
    spec = dataclasses.replace(
        spec, points=tuple(p for p in spec.points if p > 0)
    )
    return dataclasses.replace(
        psi,
        amplitude=amplitude,
        support_hint=(new_lo, max(new_lo, new_hi)),
        label=f"{op.label}[{psi.label}]",
        quadrature=spec,
        phase_rate=psi.phase_rate / op.scale,
        verify_square_integrable=False,
    )


def adjoint_apply(op: LadderOp, psi: EnergyKernel) -> EnergyKernel:
    """(a^dagger psi)(E) = conj(w(E)) psi(uE + v), zero where uE + v <= 0."""

    def amplitude(energy: Any) -> Any:
        y = op.forward(energy)
        valid = y > 0
        safe = np.where(valid, y, 1.0)
        values = np.conj(op.masked_weight(energy)) * psi(safe)
        return np.where(valid, values, 0.0)[()]

    lo, hi = psi.support_hint
    new_lo = max(0.0, op.cutoff, float(op.inverse(lo)))
    new_hi = float(op.inverse(hi)) if math.isfinite(hi) else math.inf
    spec = _mapped_spec(psi.quadrature, lambda p: float(op.inverse(p)))
    spec = spec.centered(_moved_center(spec, op, forward=False))
    if op.cutoff > 0:
        spec = spec.with_points(op.cutoff)
    return dataclasses.replace(
        psi,
        amplitude=amplitude,
        support_hint=(new_lo, max(new_lo, new_hi)),
        label=f"{op.label}^+[{psi.label}]",
        quadrature=spec,
        phase_rate=psi.phase_rate * op.scale,
        verify_square_integrable=False,
    )


def compose(op1: LadderOp, op2: LadderOp) -> LadderOp:
    """The operator op1 op2 (op2 acts first), again a weighted affine shift."""

    def weight(energy: Any) -> Any:
        return op2.masked_weight(energy) * op1.masked_weight(
            op2.forward(energy)
        )

    return LadderOp(
        scale=op1.scale * op2.scale,
        shift=op1.scale * op2.shift + op1.shift,
        weight=weight,
        cutoff=op2.cutoff,
        label=f"{op1.label}{op2.label}",
    )


def q_commutator_multiplier(
    op: LadderOp,
    q: float,
    provenance: Provenance = Provenance.kernel_calculus,
) -> DiagonalMultiplier:
    """[a, a^dagger]_q = a a^dagger - q a^dagger a as a diagonal multiplier.

    Kernel calculus gives d(E) = (1/u)[|w(m^-1 E)|^2 - q |w(E)|^2 [m(E) > 0]].
    The paper_formula provenance returns the closed form attached to the
    operator by its family.
    """
    if not q > 0:
        raise ValueError(f"q must be > 0, got {q}")

    if provenance is Provenance.paper_formula:
        if op.paper_multiplier is None:
            raise ValueError(f"operator {op.label!r} has no closed form")
        return DiagonalMultiplier(op.paper_multiplier, provenance)

    def d(energy: Any) -> Any:
        e = np.asarray(energy, dtype=float)
        raised = np.abs(op.masked_weight(op.inverse(e))) ** 2
        lowered = np.abs(op.masked_weight(e)) ** 2
        lowered = np.where(op.forward(e) > 0, lowered, 0.0)
        return ((raised - q * lowered) / op.scale)[()]

    return DiagonalMultiplier(d, provenance)


def translation_paper_multiplier(alpha: float, epsilon: float) -> Weight:
    """e^{2 alpha E eps - alpha eps^2} (e^{2 alpha eps^2} - 1)."""
    growth = math.expm1(2.0 * alpha * epsilon**2)

    def d(energy: Any) -> Any:
        e = np.asarray(energy, dtype=float)
        exponent = 2 * alpha * e * epsilon - alpha * epsilon**2
        return (np.exp(exponent) * growth)[()]

    return d


def _log_energy(energy: Any) -> Any:
    e = np.asarray(energy, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(e > 0, np.log(np.where(e > 0, e, 1.0)), np.nan)


def dilation_paper_multiplier(beta: float, lam: float) -> Weight:
    """Reference integrand e^{2b lnE ln l - b ln^2 l}(1 - e^{2b ln^2 l}) / l.

    Undefined (NaN) at E <= 0.
    """
    ell = math.log(lam)
    factor = -math.expm1(2.0 * beta * ell**2) / lam

    def d(energy: Any) -> Any:
        log_e = _log_energy(energy)
        with np.errstate(over="ignore", invalid="ignore"):
            return (np.exp(2 * beta * log_e * ell - beta * ell**2) * factor)[()]

    return d


def dilation_commutator_closed_form(
    beta: float, lam: float, convention: WeightConvention
) -> Weight:
    """Ordinary commutator of the dilation operator under either weight sign."""
    ell = math.log(lam)

    if convention is WeightConvention.paper:
        factor = math.expm1(-2.0 * beta * ell**2) / lam
        sign = 1.0
    else:
        factor = math.expm1(2.0 * beta * ell**2) / lam
        sign = -1.0

    def d(energy: Any) -> Any:
        log_e = _log_energy(energy)
        with np.errstate(over="ignore", invalid="ignore"):
            exponent = sign * 2 * beta * log_e * ell - beta * ell**2
            return (np.exp(exponent) * factor)[()]

    return d


def commutator_limit_ratio(
    family: Family,
    deform_param: float,
    struct_param: float,
    provenance: Provenance = Provenance.paper_formula,
    op: LadderOp | None = None,
) -> Callable[[Any], Any]:
    """Commutator multiplier divided by its leading small-deformation term.

    Translation: d(E) / (2 alpha eps^2).
    Dilation: lam d(E) / (-2 beta ln^2 lam).
    Both tend to 1 pointwise as alpha (resp. beta) -> 0 under the reference
    closed forms. For kernel_calculus the operator must be supplied.
    """
    if not deform_param > 0:
        raise ValueError(
            f"deformation parameter must be > 0, got {deform_param}"
        )

    if provenance is Provenance.kernel_calculus:
        if op is None:
            raise ValueError("kernel_calculus ratio needs the operator")
        multiplier = q_commutator_multiplier(op, 1.0, provenance).d
    elif family is Family.translation:
        multiplier = translation_paper_multiplier(deform_param, struct_param)
    else:
        multiplier = dilation_paper_multiplier(deform_param, struct_param)

    if family is Family.translation:
        epsilon = struct_param
        if not epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {epsilon}")
        scale = 2.0 * deform_param * epsilon**2

        def ratio(energy: Any) -> Any:
            return np.asarray(multiplier(energy)) / scale

        return ratio

    lam = struct_param
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    scale = -2.0 * deform_param * math.log(lam) ** 2

    def dilation_ratio(energy: Any) -> Any:
        return lam * np.asarray(multiplier(energy)) / scale

    return dilation_ratio


def multiplier_table(
    op: LadderOp, grid: Any, ratio: Callable[[Any], Any]
) -> pl.DataFrame:
    """Both commutator provenances side by side on an E grid.

    d_kernel_deformed uses q = 1/u, the deformed bracket a a^+ - (1/u) a^+ a.
    """
    energies = np.asarray(grid, dtype=float)
    ones = np.ones_like(energies)
    paper = q_commutator_multiplier(op, 1.0, Provenance.paper_formula)
    kernel = q_commutator_multiplier(op, 1.0, Provenance.kernel_calculus)
    deformed = q_commutator_multiplier(
        op, 1.0 / op.scale, Provenance.kernel_calculus
    )
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return pl.DataFrame(
            {
                "E": energies,
                "d_paper": np.asarray(paper(energies), dtype=float) * ones,
                "d_kernel_calculus": np.asarray(kernel(energies), dtype=float)
                * ones,
                "d_kernel_deformed": np.asarray(
                    deformed(energies), dtype=float
                )
                * ones,
                "ratio": np.asarray(ratio(energies), dtype=float) * ones,
            }
        )
