"""Orchestration behind the CLI subcommands."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any

import numpy as np
import polars as pl

import cs_dilation
import cs_translation
from config import Family
from config import RunConfig
from conventions import adjudicate
from conventions import resolve
from errors import ContinuumError
from gk_axioms import AxiomReport
from gk_axioms import make_params
from gk_axioms import run_axiom_suite
from kernelstate import sample_table
from ladder_ops import WeightConvention
from ladder_ops import commutator_limit_ratio
from ladder_ops import multiplier_table
from numerics import QuadratureSpec
from report_generator import render_report
from report_generator import render_table
from report_generator import write_output

logger = logging.getLogger(__name__)

SCAN_SCHEMA = {
    "s": pl.Float64,
    "shape": pl.Float64,
    "normalization_residual": pl.Float64,
    "eigen_residual": pl.Float64,
    "action": pl.Float64,
    "mean_energy_residual": pl.Float64,
    "error": pl.String,
}


class VerificationApp:
    """Runs one subcommand for a validated RunConfig."""

    def __init__(self, config: RunConfig):
        self.config = config.validate()

    @property
    def family(self) -> Family:
        return self.config.family

    def conventions(
        self,
    ) -> tuple[WeightConvention, cs_dilation.MeasureConvention]:
        c = self.config
        return resolve(adjudicate(c.alpha, c.beta, c.lam), c.convention)

    def _params(self, s: float, shape: float | None = None) -> Any:
        c = self.config
        shape = c.shape_param if shape is None else shape
        return make_params(self.family, shape, s, c.gamma, c)

    def _emit_table(self, df: pl.DataFrame, meta: dict[str, Any]) -> None:
        meta = {"family": self.family.value, **meta}
        write_output(
            render_table(df, self.config.output_format, meta), self.config.out
        )

    def verify(self) -> AxiomReport:
        report = run_axiom_suite(self.config)
        write_output(
            render_report(report.to_dict(), self.config.output_format),
            self.config.out,
        )
        return report

    def kernel(self) -> pl.DataFrame:
        """Samples |s, gamma> on the configured E grid, first s value."""
        p = self._params(self.config.s_values[0])
        if self.family is Family.translation:
            psi = cs_translation.coherent_state(p)
        else:
            psi = cs_dilation.coherent_state(p)
        df = sample_table(psi, self.config.grid_values())
        self._emit_table(
            df,
            {"s": p.s, "shape": self.config.shape_param, "gamma": p.gamma},
        )
        return df

    def commutator(self) -> pl.DataFrame:
        c = self.config
        energies = c.grid_values()
        if self.family is Family.translation:
            struct = c.epsilon
            op = cs_translation.annihilator(self._params(1.0))
        else:
            struct = c.lam
            weight, _ = self.conventions()
            op = cs_dilation.annihilator(self._params(1.0), weight)
            dropped = int(np.count_nonzero(energies <= 0))
            if dropped:
                logger.warning(
                    f"dropping {dropped} grid points with E <= 0 "
                    "(dilation weights need E > 0)"
                )
                energies = energies[energies > 0]
        ratio = commutator_limit_ratio(self.family, c.shape_param, struct)
        df = multiplier_table(op, energies, ratio)
        self._emit_table(df, {"shape": c.shape_param, "struct": struct})
        return df

    def moments(self, products: bool = False) -> pl.DataFrame:
        """Moment residuals per (shape, probe), or product tables."""
        df = (
            self._product_tables() if products else self._moment_residuals()
        )
        self._emit_table(df, {"products": products})
        return df

    def _moment_residuals(self) -> pl.DataFrame:
        c = self.config
        spec = QuadratureSpec(rel_tol=c.rel_tol)
        rows = []
        for shape in c.shape_values:
            for probe in c.probe_values():
                if self.family is Family.translation:
                    first = cs_translation.moment_check(probe, shape, spec)
                    second = cs_translation.moment_check(
                        probe, shape, spec, via_measure=True
                    )
                else:
                    first, second = (
                        cs_dilation.stieltjes_residual(probe, shape, m, spec)
                        for m in (
                            cs_dilation.MeasureConvention.moment_solution,
                            cs_dilation.MeasureConvention.paper,
                        )
                    )
                rows.append((shape, probe, first, second))
        names = (
            ["direct", "via_measure"]
            if self.family is Family.translation
            else ["moment_solution", "paper"]
        )
        return pl.DataFrame(
            rows, schema=["shape", "probe", *names], orient="row"
        )

    def _product_tables(self) -> pl.DataFrame:
        c = self.config
        target = max(abs(x) for x in c.probe_values()) or 1.0
        tables = []
        for shape in c.shape_values:
            if self.family is Family.translation:
                table = cs_translation.convergence_table(target, shape)
            else:
                weight, _ = self.conventions()
                table = cs_dilation.convergence_table(
                    target, shape, convention=weight
                )
            tables.append(
                table.select(
                    pl.lit(shape).alias("shape"),
                    pl.lit(target).alias("target"),
                    pl.all(),
                )
            )
        return pl.concat(tables)

    def _scan_point(
        self, s: float, shape: float, weight: WeightConvention
    ) -> dict[str, Any]:
        row: dict[str, Any] = {"s": s, "shape": shape}
        tol = self.config.rel_tol
        try:
            p = self._params(s, shape)
            if self.family is Family.translation:
                module: Any = cs_translation
                eigen = cs_translation.eigen_residual(p)
            else:
                module = cs_dilation
                eigen = cs_dilation.lambda_class_residual(p, weight)
            action = module.action_variable(s, shape)
            mean = module.mean_energy_quadrature(p, tol) / p.omega
            row.update(
                normalization_residual=module.normalization_residual(
                    s, shape, tol
                ),
                eigen_residual=eigen,
                action=action,
                mean_energy_residual=abs(mean / action - 1.0),
            )
        except (ContinuumError, ValueError, ArithmeticError) as e:
            logger.warning(f"scan point s={s:g}, shape={shape:g}: {e}")
            row["error"] = f"{type(e).__name__}: {e}"
        return row

    def monotone_certificate(self) -> dict[str, bool]:
        """Sign scan of dJ/ds per shape; dilation J(s) is a power of s."""
        return {
            f"{shape:g}": (
                cs_translation.certify_monotone(shape)
                if self.family is Family.translation
                else True
            )
            for shape in self.config.shape_values
        }

    def scan(self) -> pl.DataFrame:
        c = self.config
        weight, _ = self.conventions()
        points = [(s, shape) for shape in c.shape_values for s in c.s_values]
        logger.info(f"scanning {len(points)} points with {c.jobs} jobs")

        def run(point: tuple[float, float]) -> dict[str, Any]:
            return self._scan_point(*point, weight)

        if c.jobs > 1:
            with ThreadPoolExecutor(max_workers=c.jobs) as pool:
                rows = list(pool.map(run, points))
        else:
            rows = [run(point) for point in points]

        df = pl.DataFrame(rows, schema=SCAN_SCHEMA)
        self._emit_table(
            df, {"monotone_certificate": self.monotone_certificate()}
        )
        return df
