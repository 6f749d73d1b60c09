"""Coherent states of the dilation-type annihilator a|E> = C(E)|lam E>."""

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

from constants import DEFAULT_BETA
from constants import DEFAULT_LAMBDA
from constants import DEFAULT_OMEGA
from constants import PRODUCT_COUNTS
from constants import SUPPORT_WIDTHS
from errors import OutOfDomainError
from errors import OutOfRangeError
from kernelstate import EnergyKernel
from kernelstate import HamiltonianSpec
from kernelstate import KernelShape
from kernelstate import apply_hamiltonian
from kernelstate import inner
from kernelstate import norm
from ladder_ops import LadderOp
from ladder_ops import WeightConvention
from ladder_ops import apply
from ladder_ops import dilation_paper_multiplier
from numerics import LOG_CLAMP
from numerics import QuadratureSpec
from numerics import Transform
from numerics import integrate_half_line
from numerics import relative_sup

logger = logging.getLogger(__name__)


class MeasureConvention(str, Enum):
    paper = "paper"
    moment_solution = "moment_solution"


@dataclass(frozen=True)
class DilationParams:
    beta: float = DEFAULT_BETA
    s: float = 1.0
    gamma: float = 0.0
    lam: float = DEFAULT_LAMBDA
    omega: float = DEFAULT_OMEGA

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if not self.s >= 0:
            raise ValueError(f"s must be >= 0, got {self.s}")
        if not 0 < self.lam < 1:
            raise ValueError(f"lambda must lie in (0, 1), got {self.lam}")
        if not self.omega > 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")

    def with_label(
        self, s: float, gamma: float | None = None
    ) -> DilationParams:
        gamma = self.gamma if gamma is None else gamma
        return dataclasses.replace(self, s=s, gamma=gamma)


def _log_label(s: float) -> float:
    if not s > 0:
        raise OutOfDomainError(f"s must be > 0 for a normalized state, got {s}")
    return math.log(s)


def _check_beta(beta: float) -> None:
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")


def coefficient_C(
    energy: Any,
    p: DilationParams,
    convention: WeightConvention = WeightConvention.kernel_consistent,
) -> Any:
    """Dilation weight C(E, lam).

    paper:             e^{beta (lnE ln lam - ln^2 lam / 2)}
    kernel_consistent: e^{-beta (lnE ln lam + ln^2 lam / 2)}
    """
    e = np.asarray(energy, dtype=float)
    if np.any(e <= 0):
        raise ValueError("C(E, lam) needs E > 0")
    ell = math.log(p.lam)
    log_e = np.log(e)
    if convention is WeightConvention.paper:
        exponent = p.beta * (log_e * ell - 0.5 * ell * ell)
    else:
        exponent = -p.beta * (log_e * ell + 0.5 * ell * ell)
    with np.errstate(over="ignore"):
        return np.exp(exponent)[()]


def log_normalization_sq(s: float, beta: float) -> float:
    _check_beta(beta)
    log_s = _log_label(s)
    return 0.5 * math.log(beta / math.pi) - (2 * log_s + 1) ** 2 / (4 * beta)


def normalization(s: float, beta: float) -> float:
    """N(s) = sqrt(sqrt(beta/pi) e^{-(2 ln s + 1)^2 / (4 beta)})."""
    return math.exp(0.5 * log_normalization_sq(s, beta))


def normalization_quadrature(
    s: float, beta: float, spec: QuadratureSpec | None = None
) -> float:
    """N(s) by quadrature of int_0^inf s^{2 lnE} e^{-beta ln^2 E} dE."""
    _check_beta(beta)
    log_s = _log_label(s)
    center = (2 * log_s + 1) / (2 * beta)
    base = spec or QuadratureSpec()

    def integrand(energy: float) -> float:
        if energy <= 0:
            return 0.0
        u = math.log(energy)
        return math.exp(2 * log_s * u - beta * u * u)

    result = integrate_half_line(
        integrand, base.centered(center, Transform.log_substitution)
    )
    return 1.0 / math.sqrt(float(result.value))


def _amplitude_from_log(log_s: float, beta: float, gamma: float) -> Any:
    log_n = 0.5 * (
        0.5 * math.log(beta / math.pi) - (2 * log_s + 1) ** 2 / (4 * beta)
    )

    def amplitude(energy: Any) -> Any:
        e = np.asarray(energy, dtype=float)
        positive = e > 0
        u = np.log(np.where(positive, e, 1.0))
        with np.errstate(over="ignore", under="ignore"):
            modulus = np.exp(log_n + log_s * u - 0.5 * beta * u * u)
        values = modulus * np.exp(-1j * gamma * e)
        return np.where(positive, values, 0.0)[()]

    return amplitude


def kernel(energy: Any, p: DilationParams) -> Any:
    """K(E) = N(s) s^{lnE} e^{-beta ln^2 E / 2} e^{-i gamma E}."""
    e = np.asarray(energy, dtype=float)
    if np.any(e <= 0):
        raise ValueError("dilation kernel needs E > 0")
    return _amplitude_from_log(_log_label(p.s), p.beta, p.gamma)(e)


def _state_from_log(
    log_s: float, p: DilationParams, label: str
) -> EnergyKernel:
    center = (2 * log_s + 1) / (2 * p.beta)
    width = SUPPORT_WIDTHS / math.sqrt(p.beta)
    lo = max(center - width, -LOG_CLAMP)
    hi = min(center + width, LOG_CLAMP)
    return EnergyKernel(
        amplitude=_amplitude_from_log(log_s, p.beta, p.gamma),
        support_hint=(math.exp(lo), math.exp(hi)),
        label=label,
        quadrature=QuadratureSpec(
            transform=Transform.log_substitution, center=center
        ),
        phase_rate=p.gamma,
        shape=KernelShape.log_normal,
        verify_square_integrable=True,
    )


def coherent_state(p: DilationParams) -> EnergyKernel:
    """|s, gamma>, integrated in u = ln E around the peak of |K|^2 E."""
    return _state_from_log(
        _log_label(p.s),
        p,
        f"dilation(s={p.s:g}, gamma={p.gamma:g})",
    )


def annihilator(
    p: DilationParams,
    convention: WeightConvention = WeightConvention.kernel_consistent,
) -> LadderOp:
    """a^lam|E> = C(E, lam)|lam E>."""
    return LadderOp(
        scale=p.lam,
        shift=0.0,
        weight=functools.partial(coefficient_C, p=p, convention=convention),
        label=f"a^{p.lam:g}",
        paper_multiplier=dilation_paper_multiplier(p.beta, p.lam),
    )


def eigenvalue(p: DilationParams) -> float:
    """(1/lam) s^{ln(1/lam)}, the factor in a|s,gamma> = z |s, gamma/lam>."""
    return p.s ** math.log(1.0 / p.lam) / p.lam


def iteration_residual(
    p: DilationParams,
    convention: WeightConvention = WeightConvention.kernel_consistent,
) -> float:
    """sup |C(E/lam) K0(E/lam) - s^{ln(1/lam)} K0(E)| / sup |K0|.

    K0 is the real part of the kernel at gamma = 0, probed at 100
    log-spaced energies.
    """
    energies = np.geomspace(1e-3, 20.0, 100)
    real = p.with_label(p.s, 0.0)
    k0 = kernel(energies, real).real
    shifted = energies / p.lam
    lhs = coefficient_C(shifted, p, convention) * kernel(shifted, real).real
    rhs = p.s ** math.log(1.0 / p.lam) * k0
    with np.errstate(over="ignore", invalid="ignore"):
        diff = lhs - rhs
    return relative_sup(diff, k0)


def lambda_class_residual(
    p: DilationParams,
    convention: WeightConvention = WeightConvention.kernel_consistent,
    grid: Any = None,
) -> float:
    """sup_E |(a psi)(E) - z K(E; s, gamma/lam)| / sup |z K| on an E grid."""
    energies = np.linspace(1e-3, 20.0, 2001) if grid is None else grid
    energies = np.asarray(energies, dtype=float)
    lowered = apply(annihilator(p, convention), coherent_state(p))(energies)
    target = p.with_label(p.s, p.gamma / p.lam)
    expected = eigenvalue(p) * kernel(energies, target)
    with np.errstate(over="ignore", invalid="ignore"):
        diff = lowered - expected
    return relative_sup(diff, expected)


def special_case_residual(p: DilationParams) -> float:
    """Residual of a|s,gamma> = e s |s, e gamma> at lam = 1/e."""
    special = dataclasses.replace(p, lam=math.exp(-1.0))
    energies = np.linspace(1e-3, 20.0, 2001)
    op = annihilator(special, WeightConvention.kernel_consistent)
    lowered = apply(op, coherent_state(special))(energies)
    expected = (
        math.e
        * special.s
        * kernel(energies, special.with_label(special.s, math.e * p.gamma))
    )
    return relative_sup(lowered - expected, expected)


def normalization_residual(
    s: float, beta: float, rel_tol: float | None = None
) -> float:
    """|int |K|^2 dE - 1| by quadrature."""
    psi = coherent_state(DilationParams(beta=beta, s=s))
    return abs(norm(psi, psi.quadrature.with_rel_tol(rel_tol)) ** 2 - 1.0)


def log_measure_rho(
    s: float,
    beta: float,
    convention: MeasureConvention = MeasureConvention.moment_solution,
) -> float:
    _check_beta(beta)
    log_s = _log_label(s)
    exponent = (4 * log_s + 1) / (4 * beta)
    if convention is MeasureConvention.paper:
        exponent = -exponent
    return exponent - log_s - math.log(beta)


def measure_rho(
    s: float,
    beta: float,
    convention: MeasureConvention = MeasureConvention.moment_solution,
) -> float:
    """Radial measure rho(s) = (1/(s beta)) e^{+-(4 ln s + 1)/(4 beta)}."""
    return math.exp(log_measure_rho(s, beta, convention))


def stieltjes_residual(
    log_energy: float,
    beta: float,
    convention: MeasureConvention = MeasureConvention.moment_solution,
    spec: QuadratureSpec | None = None,
) -> float:
    """|int rho(s) N^2(s) s^{2 lnE} ds / e^{beta ln^2 E} - 1|."""
    _check_beta(beta)
    target = beta * log_energy * log_energy
    base = spec or QuadratureSpec()

    def integrand(s: float) -> float:
        if s <= 0:
            return 0.0
        log_value = (
            log_measure_rho(s, beta, convention)
            + log_normalization_sq(s, beta)
            + 2.0 * log_energy * math.log(s)
            - target
        )
        return math.exp(min(log_value, LOG_CLAMP))

    result = integrate_half_line(
        integrand,
        base.centered(beta * log_energy, Transform.log_substitution),
    )
    return abs(float(result.value) - 1.0)


def action_variable(s: float, beta: float) -> float:
    """J(s) = e^{(ln s + 3/4) / beta}."""
    _check_beta(beta)
    return math.exp((_log_label(s) + 0.75) / beta)


def mean_energy(s: float, p: DilationParams) -> float:
    return p.omega * action_variable(s, p.beta)


def mean_energy_quadrature(
    p: DilationParams, rel_tol: float | None = None
) -> float:
    """<s,gamma|H|s,gamma> by quadrature in u = ln E."""
    psi = coherent_state(p)
    h_psi = apply_hamiltonian(HamiltonianSpec(p.omega), psi)
    spec = psi.quadrature.with_rel_tol(rel_tol)
    return float(np.real(inner(psi, h_psi, spec)))


def invert_action(action: float, beta: float) -> float:
    """s(J) = e^{beta ln J - 3/4}."""
    _check_beta(beta)
    if not action > 0:
        raise OutOfRangeError(f"J must be > 0, got {action}")
    return math.exp(beta * math.log(action) - 0.75)


def action_kernel(action: float, p: DilationParams) -> EnergyKernel:
    """|J, gamma> with s^{lnE} written as (e^{beta ln J - 3/4})^{lnE}."""
    if not action > 0:
        raise OutOfRangeError(f"J must be > 0, got {action}")
    log_s = p.beta * math.log(action) - 0.75
    return _state_from_log(
        log_s, p, f"dilation(J={action:g}, gamma={p.gamma:g})"
    )


def product_limit_check(
    log_energy_target: float,
    beta: float,
    n: int,
    convention: WeightConvention = WeightConvention.kernel_consistent,
    linearized: bool = False,
) -> float:
    """Relative residual of prod_k C~(-k ln lam) against e^{beta ln^2 E / 2}.

    ln lam = -lnE / n; C~(x) is the weight written in x = ln E.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if log_energy_target < 0:
        raise ValueError("lnE target must be >= 0")
    _check_beta(beta)
    ell = -log_energy_target / n

    def log_weight(k: int) -> float:
        x = -k * ell
        if linearized:
            return math.log1p(beta * k * ell * ell)
        if convention is WeightConvention.paper:
            return beta * (x * ell - 0.5 * ell * ell)
        return -beta * (x * ell + 0.5 * ell * ell)

    log_product = math.fsum(log_weight(k) for k in range(1, n + 1))
    target = 0.5 * beta * log_energy_target**2
    return abs(math.expm1(log_product - target))


def convergence_table(
    log_energy_target: float,
    beta: float,
    ns: list[int] | None = None,
    convention: WeightConvention = WeightConvention.kernel_consistent,
) -> pl.DataFrame:
    counts = list(PRODUCT_COUNTS if ns is None else ns)
    return pl.DataFrame(
        {
            "n": counts,
            "exact_residual": [
                product_limit_check(log_energy_target, beta, n, convention)
                for n in counts
            ],
            "linearized_residual": [
                product_limit_check(
                    log_energy_target, beta, n, convention, linearized=True
                )
                for n in counts
            ],
        }
    )
