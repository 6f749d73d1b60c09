"""Coherent states of the translation-type annihilator.

The annihilator lowers energies by a fixed step, a|E> = C(E)|E - eps>, and
its eigenstates are the Gaussian kernels

    K(E; s, gamma) = N(s) s^E e^{-alpha E^2 / 2} e^{-i gamma E}.

Everything that depends on s only through ln s is computed from
L = ln s with the scaled complementary error function, so labels far
from s = 1 neither overflow nor lose the erfc tail.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
import polars as pl
from scipy import optimize
from scipy import special

from constants import DEFAULT_ALPHA
from constants import DEFAULT_EPSILON
from constants import DEFAULT_OMEGA
from constants import MONOTONE_GRID
from constants import PRODUCT_COUNTS
from constants import SUPPORT_WIDTHS
from errors import NotMonotoneError
from errors import OutOfDomainError
from errors import OutOfRangeError
from kernelstate import EnergyKernel
from kernelstate import HamiltonianSpec
from kernelstate import KernelShape
from kernelstate import apply_hamiltonian
from kernelstate import inner
from kernelstate import norm
from ladder_ops import LadderOp
from ladder_ops import apply
from ladder_ops import translation_paper_multiplier
from numerics import QuadratureSpec
from numerics import Transform
from numerics import integrate_half_line
from numerics import integrate_real_line
from numerics import log_gauss_m0
from numerics import relative_sup

logger = logging.getLogger(__name__)

# ln s beyond this is outside any state the inversion will return
LOG_LABEL_LIMIT = 700.0


class DisplayForm(str, Enum):
    """Which closed form of a reference formula to evaluate."""

    paper = "paper"
    consistent = "consistent"


@dataclass(frozen=True)
class TranslationParams:
    alpha: float = DEFAULT_ALPHA
    s: float = 1.0
    gamma: float = 0.0
    epsilon: float = DEFAULT_EPSILON
    omega: float = DEFAULT_OMEGA

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.s >= 0:
            raise ValueError(f"s must be >= 0, got {self.s}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if not self.omega > 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")

    def with_label(
        self, s: float, gamma: float | None = None
    ) -> TranslationParams:
        gamma = self.gamma if gamma is None else gamma
        return dataclasses.replace(self, s=s, gamma=gamma)


def _log_label(s: float) -> float:
    if not s > 0:
        raise OutOfDomainError(f"s must be > 0 for a normalized state, got {s}")
    return math.log(s)


def coefficient_C(energy: Any, p: TranslationParams) -> Any:
    """C(E, eps) = e^{alpha (E eps - eps^2 / 2)} for E >= eps, else 0."""
    e = np.asarray(energy, dtype=float)
    eps = p.epsilon
    with np.errstate(over="ignore"):
        value = np.exp(p.alpha * (e * eps - 0.5 * eps * eps))
    return np.where(e >= eps, value, 0.0)[()]


def eigenvalue(p: TranslationParams) -> complex:
    """(s e^{-i gamma})^eps taken as s^eps e^{-i gamma eps}."""
    return (p.s**p.epsilon) * complex(
        math.cos(p.gamma * p.epsilon), -math.sin(p.gamma * p.epsilon)
    )


def log_normalization_sq(s: float, alpha: float) -> float:
    """ln N^2 = -ln int_0^inf e^{2E ln s - alpha E^2} dE."""
    return -log_gauss_m0(alpha, 2.0 * _log_label(s))


def normalization(s: float, alpha: float) -> float:
    """N(s) from the defining integral, valid for every s > 0."""
    return math.exp(0.5 * log_normalization_sq(s, alpha))


def normalization_paper(s: float, alpha: float) -> float:
    """N(s) from the reference erf form, which uses |ln s|.

    Agrees with normalization() for s <= 1 only.
    """
    log_s = _log_label(s)
    x = abs(log_s) / math.sqrt(alpha)
    log_n_sq = math.log(2.0 * math.sqrt(alpha / math.pi)) - math.log(
        special.erfcx(x)
    )
    return math.exp(0.5 * log_n_sq)


def _kernel_amplitude(p: TranslationParams) -> Any:
    log_s = _log_label(p.s)
    log_n = 0.5 * log_normalization_sq(p.s, p.alpha)
    alpha, gamma = p.alpha, p.gamma

    def amplitude(energy: Any) -> Any:
        e = np.asarray(energy, dtype=float)
        with np.errstate(over="ignore", under="ignore"):
            modulus = np.exp(log_n + e * log_s - 0.5 * alpha * e * e)
        return (modulus * np.exp(-1j * gamma * e))[()]

    return amplitude


def kernel(energy: Any, p: TranslationParams) -> Any:
    """K(E) = N(s) s^E e^{-alpha E^2/2} e^{-i gamma E}."""
    return _kernel_amplitude(p)(energy)


def coherent_state(p: TranslationParams) -> EnergyKernel:
    """|s, gamma> as an EnergyKernel centered on its Gaussian peak."""
    peak = max(_log_label(p.s) / p.alpha, 0.0)
    width = SUPPORT_WIDTHS / math.sqrt(p.alpha)
    spec = QuadratureSpec(
        transform=Transform.gaussian_centering, center=peak
    )
    return EnergyKernel(
        amplitude=_kernel_amplitude(p),
        support_hint=(0.0, peak + width),
        label=f"translation(s={p.s:g}, gamma={p.gamma:g})",
        quadrature=spec,
        phase_rate=p.gamma,
        shape=KernelShape.gaussian,
        verify_square_integrable=True,
    )


def annihilator(p: TranslationParams) -> LadderOp:
    """a_eps|E> = C(E, eps)|E - eps>."""
    return LadderOp(
        scale=1.0,
        shift=-p.epsilon,
        weight=functools.partial(coefficient_C, p=p),
        cutoff=p.epsilon,
        label=f"a_{p.epsilon:g}",
        paper_multiplier=translation_paper_multiplier(p.alpha, p.epsilon),
    )


def eigen_residual(p: TranslationParams, grid: Any = None) -> float:
    """sup_E |(a psi)(E) - z psi(E)| / sup_E |psi(E)| on an E grid."""
    energies = np.linspace(0.0, 20.0, 2001) if grid is None else grid
    energies = np.asarray(energies, dtype=float)
    psi = coherent_state(p)
    lowered = apply(annihilator(p), psi)(energies)
    values = psi(energies)
    return relative_sup(lowered - eigenvalue(p) * values, values)


def normalization_residual(
    s: float, alpha: float, rel_tol: float | None = None
) -> float:
    """|int |K|^2 dE - 1| by quadrature."""
    psi = coherent_state(TranslationParams(alpha=alpha, s=s))
    return abs(norm(psi, psi.quadrature.with_rel_tol(rel_tol)) ** 2 - 1.0)


def h_tilde(u: Any, alpha: float) -> Any:
    """Gaussian density e^{-u^2/alpha} / sqrt(alpha pi)."""
    u = np.asarray(u, dtype=float)
    return (np.exp(-u * u / alpha) / math.sqrt(alpha * math.pi))[()]


def log_measure_sigma(s: float, alpha: float) -> float:
    log_s = _log_label(s)
    return (
        -log_s * log_s / alpha
        - 0.5 * math.log(alpha * math.pi)
        - log_s
        + log_gauss_m0(alpha, 2.0 * log_s)
    )


def measure_sigma(s: float, alpha: float) -> float:
    """sigma(s) = h~(ln s) / (s N^2(s))."""
    return math.exp(log_measure_sigma(s, alpha))


def moment_check(
    energy: float,
    alpha: float,
    spec: QuadratureSpec | None = None,
    via_measure: bool = False,
) -> float:
    """Relative residual of int h~(u) e^{2Eu} du = e^{alpha E^2}.

    Both sides are divided by e^{alpha E^2} before integrating. With
    via_measure the integral runs over s against sigma(s) N^2(s) ds.
    """
    if energy < 0:
        raise ValueError(f"E must be >= 0, got {energy}")
    base = spec or QuadratureSpec()
    target = alpha * energy * energy

    if via_measure:
        centered = base.centered(alpha * energy, Transform.log_substitution)

        def weighted(s: float) -> float:
            if s <= 0:
                return 0.0
            log_s = math.log(s)
            log_value = (
                log_measure_sigma(s, alpha)
                + log_normalization_sq(s, alpha)
                + 2.0 * energy * log_s
                - target
            )
            return math.exp(log_value)

        value = integrate_half_line(weighted, centered).value
    else:
        centered = base.centered(alpha * energy, Transform.gaussian_centering)

        def density(u: float) -> float:
            return math.exp(
                -u * u / alpha + 2.0 * energy * u - target
            ) / math.sqrt(alpha * math.pi)

        value = integrate_real_line(density, centered).value

    return abs(float(np.real(value)) - 1.0)


def _action_from_log(log_s: float, alpha: float) -> float:
    z = -log_s / math.sqrt(alpha)
    return log_s / alpha + 1.0 / (
        math.sqrt(math.pi * alpha) * float(special.erfcx(z))
    )


def action_variable(s: float, alpha: float) -> float:
    """J(s) = <H>/omega = M1(alpha, 2 ln s) / M0(alpha, 2 ln s)."""
    return _action_from_log(_log_label(s), alpha)


def mean_energy(s: float, p: TranslationParams) -> float:
    """omega J(s); independent of gamma and epsilon."""
    return p.omega * action_variable(s, p.alpha)


def mean_energy_quadrature(
    p: TranslationParams, rel_tol: float | None = None
) -> float:
    """<s,gamma|H|s,gamma> by quadrature of the kernel."""
    psi = coherent_state(p)
    h_psi = apply_hamiltonian(HamiltonianSpec(p.omega), psi)
    spec = psi.quadrature.with_rel_tol(rel_tol)
    return float(np.real(inner(psi, h_psi, spec)))


def mean_energy_paper(s: float, alpha: float, omega: float) -> float:
    """The reference closed form of <H>, with |ln s| and alpha^{3/2}."""
    log_s = _log_label(s)
    x = abs(log_s) / math.sqrt(alpha)
    return omega * (
        log_s / alpha**1.5
        + 1.0 / (math.sqrt(math.pi) * alpha * float(special.erfcx(x)))
    )


def energy_variance(s: float, alpha: float) -> float:
    """<E^2> - <E>^2 in |s, gamma>."""
    log_s = _log_label(s)
    j = _action_from_log(log_s, alpha)
    return (1.0 + 2.0 * log_s * j) / (2.0 * alpha) - j * j


def mean_energy_derivative(
    s: float,
    alpha: float,
    omega: float,
    convention: DisplayForm = DisplayForm.consistent,
) -> float:
    """d<H>/ds in closed form.

    `paper` evaluates the reference expression as written. `consistent`
    differentiates the defining integral and equals 2 omega Var / s.
    """
    log_s = _log_label(s)
    prefactor = omega / (alpha * s)

    if convention is DisplayForm.paper:
        g = float(special.erfcx(abs(log_s) / math.sqrt(alpha)))
        return prefactor * (
            -2.0 * log_s / (math.sqrt(alpha * math.pi) * g)
            + 2.0 / (math.pi * g * g)
            + 1.0
        )

    z = -log_s / math.sqrt(alpha)
    g = float(special.erfcx(z))
    return prefactor * (
        1.0 + 2.0 * z / (math.sqrt(math.pi) * g) - 2.0 / (math.pi * g * g)
    )


@functools.lru_cache(maxsize=64)
def certify_monotone(alpha: float) -> bool:
    """True when d<H>/ds > 0 on a log grid of s."""
    lo, hi, num = MONOTONE_GRID
    for s in np.geomspace(lo, hi, num):
        slope = mean_energy_derivative(float(s), alpha, 1.0)
        if not slope > 0:
            logger.warning(
                f"J(s) not increasing at s={s:.4g} for alpha={alpha:g}"
            )
            return False
    return True


def _bracket(target: float, alpha: float) -> tuple[float, float]:
    def gap(log_s: float) -> float:
        return _action_from_log(log_s, alpha) - target

    lo, hi = -1.0, 1.0
    while gap(hi) < 0:
        if hi >= LOG_LABEL_LIMIT:
            raise OutOfRangeError(f"J={target:g} above the reachable range")
        hi = min(2.0 * hi, LOG_LABEL_LIMIT)
    while gap(lo) > 0:
        if lo <= -LOG_LABEL_LIMIT:
            raise OutOfRangeError(f"J={target:g} below the reachable range")
        lo = max(2.0 * lo, -LOG_LABEL_LIMIT)
    logger.debug(f"bracket for J={target:g}: ln s in [{lo:g}, {hi:g}]")
    return lo, hi


def invert_action(action: float, alpha: float = DEFAULT_ALPHA) -> float:
    """s(J) on the strictly increasing branch of J(s)."""
    if not action > 0:
        raise OutOfRangeError(f"J must be > 0, got {action}")
    if not certify_monotone(alpha):
        raise NotMonotoneError(
            f"J(s) is not certified monotone for alpha={alpha}"
        )

    lo, hi = _bracket(action, alpha)
    log_s = optimize.brentq(
        lambda x: _action_from_log(x, alpha) - action,
        lo,
        hi,
        xtol=1e-14,
        rtol=4 * np.finfo(float).eps,
    )
    return math.exp(log_s)


def action_kernel(action: float, p: TranslationParams) -> EnergyKernel:
    """|J, gamma> = |s(J), gamma>."""
    s = invert_action(action, p.alpha)
    return coherent_state(p.with_label(s))


def product_limit_check(
    energy_target: float,
    alpha: float,
    n: int,
    linearized: bool = False,
) -> float:
    """Relative residual of prod_{k=1}^n C(k eps, eps) against e^{alpha E^2/2}.

    eps = E / n. The product is summed in log space; `linearized` replaces
    each factor by its first-order expansion 1 + alpha k eps^2.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    eps = energy_target / n
    if linearized:
        terms = (math.log1p(alpha * k * eps * eps) for k in range(1, n + 1))
    else:
        terms = (
            alpha * (k * eps * eps - 0.5 * eps * eps) for k in range(1, n + 1)
        )
    log_product = math.fsum(terms)
    return abs(math.expm1(log_product - 0.5 * alpha * energy_target**2))


def convergence_table(
    energy_target: float,
    alpha: float,
    ns: list[int] | None = None,
) -> pl.DataFrame:
    counts = list(PRODUCT_COUNTS if ns is None else ns)
    return pl.DataFrame(
        {
            "n": counts,
            "exact_residual": [
                product_limit_check(energy_target, alpha, n) for n in counts
            ],
            "linearized_residual": [
                product_limit_check(energy_target, alpha, n, linearized=True)
                for n in counts
            ],
        }
    )
