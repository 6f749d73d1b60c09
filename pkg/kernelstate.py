"""States of the continuous spectrum as complex kernels over E in (0, inf)."""

from __future__ import annotations

import dataclasses
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from dataclasses import field
from enum import Enum
from typing import Any

import numpy as np
import polars as pl

from constants import MAX_PHASE_DIFFERENCE
from numerics import QuadratureSpec
from numerics import integrate_interval

logger = logging.getLogger(__name__)

Amplitude = Callable[[Any], Any]


class KernelShape(str, Enum):
    """Integrand shape, used to pick a quadrature transform."""

    gaussian = "gaussian"
    log_normal = "log_normal"
    generic = "generic"


@dataclass(frozen=True)
class HamiltonianSpec:
    """H|E> = omega E |E>."""

    omega: float = 1.0

    def __post_init__(self) -> None:
        if not self.omega > 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")


@dataclass(frozen=True)
class EnergyKernel:
    """A state psi(E) in the Dirac-normalized energy basis.

    `amplitude` must accept scalars and numpy arrays. `support_hint`
    bounds the quadrature, it never truncates the amplitude itself.
    `phase_rate` tracks the linear phase e^{-i rate E} the kernel carries,
    so overlaps can refuse phase differences quadrature cannot resolve.
    """

    amplitude: Amplitude
    support_hint: tuple[float, float] = (0.0, math.inf)
    label: str = ""
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    phase_rate: float = 0.0
    shape: KernelShape = KernelShape.generic
    verify_square_integrable: bool = False

    def __post_init__(self) -> None:
        lo, hi = self.support_hint
        if lo < 0 or not lo <= hi:
            raise ValueError(
                f"support_hint must be an interval of [0, inf), got {lo, hi}"
            )
        if self.verify_square_integrable:
            value = norm(self)
            if not math.isfinite(value):
                raise ValueError(
                    f"kernel {self.label!r} is not square-integrable"
                )

    def __call__(self, energy: Any) -> Any:
        return self.amplitude(energy)

    def relabel(self, label: str) -> EnergyKernel:
        return dataclasses.replace(
            self, label=label, verify_square_integrable=False
        )


def _overlap_range(
    phi: EnergyKernel, psi: EnergyKernel
) -> tuple[float, float]:
    lo = max(phi.support_hint[0], psi.support_hint[0])
    hi = min(phi.support_hint[1], psi.support_hint[1])
    return lo, hi


def _merged_spec(
    phi: EnergyKernel, psi: EnergyKernel, spec: QuadratureSpec | None
) -> QuadratureSpec:
    base = spec or psi.quadrature
    return base.with_points(*phi.quadrature.points, *psi.quadrature.points)


def inner(
    phi: EnergyKernel,
    psi: EnergyKernel,
    spec: QuadratureSpec | None = None,
) -> complex:
    """<phi|psi> = int conj(phi(E)) psi(E) dE over the common support."""
    if abs(phi.phase_rate - psi.phase_rate) > MAX_PHASE_DIFFERENCE:
        raise ValueError(
            f"phase difference {abs(phi.phase_rate - psi.phase_rate):g} "
            f"exceeds {MAX_PHASE_DIFFERENCE:g}"
        )
    lo, hi = _overlap_range(phi, psi)
    if lo >= hi:
        return 0j

    def integrand(energy: float) -> complex:
        return complex(np.conj(phi(energy)) * psi(energy))

    result = integrate_interval(integrand, lo, hi, _merged_spec(phi, psi, spec))
    logger.debug(
        f"<{phi.label}|{psi.label}> = {result.value} (err {result.error:.2e})"
    )
    return complex(result.value)


def norm(psi: EnergyKernel, spec: QuadratureSpec | None = None) -> float:
    """sqrt(<psi|psi>), integrating |psi|^2 as a real integrand."""
    lo, hi = psi.support_hint
    if lo >= hi:
        return 0.0

    def integrand(energy: float) -> float:
        return float(np.abs(psi(energy)) ** 2)

    result = integrate_interval(
        integrand, lo, hi, _merged_spec(psi, psi, spec)
    )
    return math.sqrt(max(float(np.real(result.value)), 0.0))


def apply_hamiltonian(h: HamiltonianSpec, psi: EnergyKernel) -> EnergyKernel:
    """(H psi)(E) = omega E psi(E)."""
    omega = h.omega

    def amplitude(energy: Any) -> Any:
        return omega * np.asarray(energy) * psi(energy)

    return dataclasses.replace(
        psi,
        amplitude=amplitude,
        label=f"H[{psi.label}]",
        verify_square_integrable=False,
    )


def time_evolve(
    h: HamiltonianSpec, t: float, psi: EnergyKernel
) -> EnergyKernel:
    """(e^{-itH} psi)(E) = e^{-i omega t E} psi(E)."""
    if t == 0:
        return psi
    rate = h.omega * t

    def amplitude(energy: Any) -> Any:
        return np.exp(-1j * rate * np.asarray(energy)) * psi(energy)

    return dataclasses.replace(
        psi,
        amplitude=amplitude,
        label=f"U({t:g})[{psi.label}]",
        phase_rate=psi.phase_rate + rate,
        verify_square_integrable=False,
    )


def combine(
    a: complex, phi: EnergyKernel, b: complex, psi: EnergyKernel
) -> EnergyKernel:
    """The linear combination a phi + b psi."""

    def amplitude(energy: Any) -> Any:
        return a * phi(energy) + b * psi(energy)

    support = (
        min(phi.support_hint[0], psi.support_hint[0]),
        max(phi.support_hint[1], psi.support_hint[1]),
    )
    rate = max(phi.phase_rate, psi.phase_rate, key=abs)
    return dataclasses.replace(
        psi,
        amplitude=amplitude,
        support_hint=support,
        label=f"{a}*{phi.label} + {b}*{psi.label}",
        quadrature=_merged_spec(phi, psi, None),
        phase_rate=rate,
        verify_square_integrable=False,
    )


def scaled(c: complex, psi: EnergyKernel) -> EnergyKernel:
    def amplitude(energy: Any) -> Any:
        return c * psi(energy)

    return dataclasses.replace(
        psi,
        amplitude=amplitude,
        label=f"{c}*{psi.label}",
        verify_square_integrable=False,
    )


def sample_table(psi: EnergyKernel, grid: Any) -> pl.DataFrame:
    """Sample psi on an E grid as rows (E, re, im)."""
    energies = np.asarray(grid, dtype=float)
    values = np.asarray(psi(energies), dtype=complex) * np.ones_like(energies)
    return pl.DataFrame(
        {
            "E": energies,
            "re": np.real(values),
            "im": np.imag(values),
        }
    )
