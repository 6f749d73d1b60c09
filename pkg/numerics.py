"""Special functions and adaptive quadrature on the energy half-line."""

from __future__ import annotations

import dataclasses
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum
from typing import Any
from typing import Final

import numpy as np
from scipy import integrate
from scipy import special

from constants import DEFAULT_ABS_TOL
from constants import DEFAULT_MAX_SUBDIVISIONS
from constants import DEFAULT_REL_TOL
from errors import NonConvergenceError

logger = logging.getLogger(__name__)

SQRT_PI: Final[float] = math.sqrt(math.pi)

# erfc switches to the scaled form above this argument
ERFC_SCALED_CUTOFF: Final[float] = 3.0

# exp(u) under- or overflows past this; integrands vanish there
LOG_CLAMP: Final[float] = 700.0

Integrand = Callable[[float], Any]


class Transform(str, Enum):
    none = "none"
    log_substitution = "log_substitution"
    gaussian_centering = "gaussian_centering"


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and variable transform for one adaptive integration.

    `center` is the peak of the integrand: in E for gaussian_centering,
    in u = ln E for log_substitution. `points` are extra break points in
    E, typically weight cutoffs where the integrand jumps.
    """

    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL
    max_subdivisions: int = DEFAULT_MAX_SUBDIVISIONS
    transform: Transform = Transform.none
    center: float = 0.0
    points: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be > 0")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    def with_rel_tol(self, rel_tol: float | None) -> QuadratureSpec:
        if rel_tol is None:
            return self
        return dataclasses.replace(self, rel_tol=rel_tol)

    def with_points(self, *points: float) -> QuadratureSpec:
        merged = tuple(sorted(set(self.points) | set(points)))
        return dataclasses.replace(self, points=merged)

    def centered(
        self, center: float, transform: Transform | None = None
    ) -> QuadratureSpec:
        return dataclasses.replace(
            self, center=center, transform=transform or self.transform
        )


@dataclass(frozen=True)
class QuadratureResult:
    value: complex | float
    error: float


DEFAULT_SPEC: Final[QuadratureSpec] = QuadratureSpec()


def erf(x: Any) -> Any:
    """Gaussian error function, 2/sqrt(pi) * int_0^x exp(-t^2) dt."""
    return special.erf(x)


def erfc(x: Any) -> Any:
    """Complementary error function without cancellation for large x."""
    x = np.asarray(x, dtype=float)
    with np.errstate(under="ignore", over="ignore"):
        scaled = special.erfcx(x) * np.exp(-x * x)
        out = np.where(x > ERFC_SCALED_CUTOFF, scaled, special.erfc(x))
    return out[()]


def log_erfcx(x: Any) -> Any:
    """log(exp(x^2) erfc(x)), finite for any real x."""
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        positive = np.log(special.erfcx(np.abs(x)))
        negative = x * x + np.log(special.erfc(x))
    return np.where(x >= 0, positive, negative)[()]


def _check_width(a: float) -> None:
    if not a > 0:
        raise ValueError(f"a must be > 0, got {a}")


def gauss_m0(a: float, b: float) -> float:
    """M0(a, b) = int_0^inf exp(-a E^2 + b E) dE."""
    _check_width(a)
    z = -b / (2.0 * math.sqrt(a))
    return float(0.5 * math.sqrt(math.pi / a) * special.erfcx(z))


def log_gauss_m0(a: float, b: float) -> float:
    """log M0(a, b), safe where M0 itself over- or underflows."""
    _check_width(a)
    z = -b / (2.0 * math.sqrt(a))
    return float(math.log(0.5 * math.sqrt(math.pi / a)) + log_erfcx(z))


def gauss_m1(a: float, b: float) -> float:
    """M1(a, b) = int_0^inf E exp(-a E^2 + b E) dE."""
    _check_width(a)
    return 1.0 / (2.0 * a) + (b / (2.0 * a)) * gauss_m0(a, b)


def gauss_m2(a: float, b: float) -> float:
    """M2(a, b) = int_0^inf E^2 exp(-a E^2 + b E) dE."""
    _check_width(a)
    return (gauss_m0(a, b) + b * gauss_m1(a, b)) / (2.0 * a)


def _quad_real(
    f: Integrand, lower: float, upper: float, spec: QuadratureSpec
) -> QuadratureResult:
    out = integrate.quad(
        f,
        lower,
        upper,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        full_output=1,
    )
    value, abserr, info = float(out[0]), float(out[1]), out[2]
    if len(out) > 3:
        tolerance = max(spec.abs_tol, spec.rel_tol * abs(value))
        exhausted = info.get("last", 0) >= spec.max_subdivisions
        if exhausted and abserr > tolerance:
            raise NonConvergenceError(
                f"quadrature on ({lower}, {upper}) stopped after "
                f"{spec.max_subdivisions} subdivisions with error "
                f"{abserr:.3e} > {tolerance:.3e}"
            )
        logger.debug(f"quad flagged on ({lower}, {upper}): {out[3]}")
    return QuadratureResult(value=value, error=abserr)


def relative_sup(residual: Any, reference: Any) -> float:
    """sup |residual| / sup |reference|, inf when the reference vanishes.

    A reference that underflows to zero or is not finite gives inf,
    which fails every threshold.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        top = float(np.max(np.abs(residual)))
        scale = float(np.max(np.abs(reference)))
    if not (math.isfinite(top) and math.isfinite(scale)) or scale == 0.0:
        return math.inf
    return top / scale


def _probe_point(lower: float, upper: float, center: float | None) -> float:
    if center is not None and lower < center < upper:
        return center
    if math.isfinite(lower) and math.isfinite(upper):
        return 0.5 * (lower + upper)
    if math.isfinite(lower):
        return lower + 1.0
    if math.isfinite(upper):
        return upper - 1.0
    return 0.0


def _quad_piece(
    f: Integrand,
    lower: float,
    upper: float,
    spec: QuadratureSpec,
    complex_valued: bool,
) -> QuadratureResult:
    if not complex_valued:
        return _quad_real(
            lambda x: float(np.real(f(x))), lower, upper, spec
        )
    re = _quad_real(lambda x: float(np.real(f(x))), lower, upper, spec)
    im = _quad_real(lambda x: float(np.imag(f(x))), lower, upper, spec)
    return QuadratureResult(
        value=complex(re.value, im.value), error=math.hypot(re.error, im.error)
    )


def _integrate_split(
    f: Integrand,
    lower: float,
    upper: float,
    breaks: list[float],
    center: float | None,
    spec: QuadratureSpec,
) -> QuadratureResult:
    if lower >= upper:
        return QuadratureResult(value=0.0, error=0.0)
    complex_valued = bool(
        np.iscomplexobj(f(_probe_point(lower, upper, center)))
    )
    cuts = sorted({b for b in breaks if lower < b < upper})
    edges = [lower, *cuts, upper]

    total: complex | float = 0.0
    error = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        piece = _quad_piece(f, a, b, spec, complex_valued)
        total += piece.value
        error += piece.error
    return QuadratureResult(value=total, error=error)


def integrate_interval(
    f: Integrand,
    lower: float,
    upper: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> QuadratureResult:
    """Integrate f over (lower, upper) inside the half-line.

    log_substitution integrates f(e^u) e^u over u = ln E;
    gaussian_centering splits the range at the integrand's peak.
    """
    if lower < 0:
        raise ValueError("integration range must lie in [0, inf)")

    if spec.transform is Transform.log_substitution:

        def g(u: float) -> Any:
            if abs(u) > LOG_CLAMP:
                return 0.0
            energy = math.exp(u)
            return f(energy) * energy

        u_lower = -math.inf if lower == 0 else math.log(lower)
        u_upper = math.log(upper) if math.isfinite(upper) else math.inf
        breaks = [spec.center] + [math.log(p) for p in spec.points if p > 0]
        return _integrate_split(g, u_lower, u_upper, breaks, spec.center, spec)

    breaks = list(spec.points)
    center = None
    if spec.transform is Transform.gaussian_centering:
        center = spec.center
        breaks.append(spec.center)
    return _integrate_split(f, lower, upper, breaks, center, spec)


def integrate_half_line(
    f: Integrand, spec: QuadratureSpec = DEFAULT_SPEC
) -> QuadratureResult:
    """Integrate f over (0, inf) with the transform named in spec."""
    return integrate_interval(f, 0.0, math.inf, spec)


def integrate_real_line(
    f: Integrand, spec: QuadratureSpec = DEFAULT_SPEC
) -> QuadratureResult:
    """Integrate f over (-inf, inf); gaussian_centering splits at center."""
    if spec.transform is Transform.log_substitution:
        raise ValueError("log_substitution needs a half-line integrand")
    breaks = list(spec.points)
    center = None
    if spec.transform is Transform.gaussian_centering:
        center = spec.center
        breaks.append(spec.center)
    return _integrate_split(f, -math.inf, math.inf, breaks, center, spec)
