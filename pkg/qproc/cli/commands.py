"""
Command handling for the qproc batch CLI
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
from scipy import linalg

from .config import ExperimentConfig, as_float_vector
from .output import CommandResult
from ..core.utils import parse_complex_matrix, parse_complex_vector
from ..decoherence import dense_matrix, spectrum
from ..exceptions import ConfigurationError
from ..families import CylinderFamily, FamilyFactory
from ..process import QProcess
from ..quantization import (
    DiscreteMeasureSpace,
    PathVariable,
    RandomVariable,
    StateOperator,
    constant_variable,
    expansion_integral,
    indicator_variable,
    level_set_integral,
    position_variable,
    process_integral,
    q_integral,
    quantized_expectation,
    tail_sum_integral,
    visit_count_variable,
)
from ..unitary.amplitudes import weight_norms
from ..walk import walk_table

logger = logging.getLogger(__name__)

COMMANDS = ("walk", "spectrum", "measure", "integrate", "check")


@dataclass
class CommandOptions:
    """Command-line overrides of the config blocks"""
    t_max: Optional[int] = None
    tol: Optional[float] = None
    seed: Optional[int] = None
    dense_check: bool = False


def create_path_variable(spec: Dict[str, Any], m: int) -> PathVariable:
    """
    Build a path variable from a config spec

    Kinds: ``position`` (time), ``indicator`` (time, site), ``constant``
    (value), ``visit-count`` (site), ``table`` (rank, values).

    Raises:
        ConfigurationError: If the kind is unknown or a parameter is missing or malformed
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigurationError(f"Variable spec must be an object with a 'kind' key, got {spec!r}")
    kind = spec["kind"]
    try:
        if kind == "position":
            return position_variable(m, int(spec["time"]))
        elif kind == "indicator":
            return indicator_variable(m, int(spec["time"]), int(spec["site"]))
        elif kind == "constant":
            return constant_variable(m, float(spec["value"]))
        elif kind == "visit-count":
            return visit_count_variable(m, int(spec["site"]))
        elif kind == "table":
            return PathVariable.from_table(m, int(spec["rank"]), as_float_vector(spec["values"], "values"),
                                           name=spec.get("name", "table"))
    except KeyError as e:
        raise ConfigurationError(f"Variable '{kind}' needs parameter {e}") from e
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"Invalid parameter for variable '{kind}': {e}") from e
    raise ConfigurationError(f"Unknown variable kind '{kind}'")


def _scaled(f: PathVariable, alpha: float) -> PathVariable:
    if alpha == 1.0:
        return f
    return PathVariable(f.m, f"{alpha}*{f.name}", lambda t, d: alpha * f.evaluate(t, d), f.native_rank)


def _state_operator(spec: Any, size: int, tol: float) -> StateOperator:
    """``"maximally-mixed"``, ``{"vector": v}``, ``{"matrix": rows}`` or ``{"mixture": {...}}``"""
    if spec is None or spec == "maximally-mixed":
        return StateOperator.maximally_mixed(size)
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ConfigurationError("Integrate 'state' must be 'maximally-mixed' or a one-key object")
    if "vector" in spec:
        return StateOperator.pure(parse_complex_vector(spec["vector"]))
    if "matrix" in spec:
        return StateOperator(parse_complex_matrix(spec["matrix"]), tol)
    if "mixture" in spec:
        mixture = spec["mixture"]
        if not isinstance(mixture, dict) or set(mixture) != {"probabilities", "vectors"}:
            raise ConfigurationError("'mixture' needs exactly 'probabilities' and 'vectors'")
        vectors = [parse_complex_vector(v) for v in mixture["vectors"]]
        return StateOperator.mixture(as_float_vector(mixture["probabilities"], "probabilities"), vectors)
    raise ConfigurationError(f"Unknown state form: {sorted(spec)}")


class CommandHandler:
    """Runs one CLI command against an experiment config"""

    def __init__(self, config: ExperimentConfig, options: Optional[CommandOptions] = None):
        self.config = config
        self.options = options or CommandOptions()
        self._process: Optional[QProcess] = None

    @property
    def process(self) -> QProcess:
        if self._process is None:
            self._process = self.config.build_process()
        return self._process

    def handle_command(self, command: str) -> CommandResult:
        """Dispatch a command name"""
        if command == "walk":
            return self._handle_walk()
        elif command == "spectrum":
            return self._handle_spectrum()
        elif command == "measure":
            return self._handle_measure()
        elif command == "integrate":
            return self._handle_integrate()
        elif command == "check":
            return self._handle_check()
        raise ConfigurationError(f"Unknown command: {command}. Available commands: {list(COMMANDS)}")

    def _handle_walk(self) -> CommandResult:
        """Exact and direct two-site walk measures"""
        t_max = self.options.t_max if self.options.t_max is not None else self.config.walk.t_max
        tol = self.options.tol if self.options.tol is not None else self.config.settings.clamp_tol
        table = walk_table(self.process, t_max, self.config.walk.direct_cap)

        rows = []
        for row in table.rows:
            rows.append({
                "t": row.t,
                "G_re": row.g.real if row.g is not None else None,
                "G_im": row.g.imag if row.g is not None else None,
                "F_re": row.f.real if row.f is not None else None,
                "F_im": row.f.imag if row.f is not None else None,
                "mu_E": row.mu_e,
                "mu_G": row.mu_g,
                "nu_E": row.nu_e,
                "direct_mu_E": row.direct_mu_e,
                "direct_mu_G": row.direct_mu_g,
                "difference": row.difference,
            })

        max_difference = table.max_difference
        agrees = max_difference is None or max_difference <= tol
        if not agrees:
            logger.warning(f"Exact and direct walk values differ by {max_difference:.3e} > {tol:.1e}")

        payload = {"command": "walk", "t_max": t_max, "tol": tol, "agrees": agrees}
        payload.update(table.to_dict())
        return CommandResult(
            command="walk",
            columns=["t", "G_re", "G_im", "F_re", "F_im", "mu_E", "mu_G", "nu_E",
                     "direct_mu_E", "direct_mu_G", "difference"],
            rows=rows,
            payload=payload,
        )

    def _handle_spectrum(self) -> CommandResult:
        """Eigenvalues and eigenvector supports per rank"""
        dense_check = self.options.dense_check or self.config.spectrum.dense_check
        rows, ranks = [], []
        for n in self.config.spectrum.ranks:
            state = self.process.state(n)
            decomposition = spectrum(state)
            residual = self._dense_residual(state, decomposition.eigenvalues) if dense_check else None

            for site in range(decomposition.m):
                pair = decomposition.pair(site)
                rows.append({
                    "rank": n,
                    "site": site,
                    "eigenvalue": float(decomposition.eigenvalues[site]),
                    "support_size": int(pair.support.size) if pair is not None else 0,
                    "eigenvalue_sum": decomposition.eigenvalue_sum,
                    "dense_residual": residual,
                })
            entry = decomposition.to_dict()
            entry["dense_residual"] = residual
            ranks.append(entry)

        return CommandResult(
            command="spectrum",
            columns=["rank", "site", "eigenvalue", "support_size", "eigenvalue_sum", "dense_residual"],
            rows=rows,
            payload={"command": "spectrum", "dense_check": dense_check, "ranks": ranks},
        )

    def _dense_residual(self, state, eigenvalues: np.ndarray) -> float:
        """Largest gap between the exact eigenvalues and a dense Hermitian solve"""
        dense = linalg.eigvalsh(dense_matrix(state, self.config.settings))[::-1]
        ours = np.sort(eigenvalues)[::-1]
        k = ours.size
        residual = float(np.max(np.abs(dense[:k] - ours)))
        if dense.size > k:
            residual = max(residual, float(np.max(np.abs(dense[k:]))))
        logger.debug(f"Dense spectrum residual at rank {state.rank}: {residual:.3e}")
        return residual

    def _handle_measure(self) -> CommandResult:
        """q-measures of cylinder events and suitability sweeps of families"""
        block = self.config.measure
        if not block.events:
            raise ConfigurationError("'measure.events' is empty")
        process = self.process
        factory = FamilyFactory(process.m, self.config.base_dir)
        fixed = process.fixed_initial_site
        t_max = self.options.t_max if self.options.t_max is not None else block.t_max
        tol = self.options.tol if self.options.tol is not None else block.tol

        rows, entries, reports = [], [], []
        for spec in block.events:
            family = factory.create(spec)
            nu = family.classical_measure(fixed)
            row = {"event": family.name, "kind": family.kind.value, "rank": family.native_rank,
                   "mu": None, "nu": nu, "verdict": None, "trailing_spread": None}
            entry: Dict[str, Any] = {"event": family.name, "kind": family.kind.value, "nu": nu}

            if isinstance(family, CylinderFamily):
                row["mu"] = process.q_measure(family.event)
                entry.update(rank=family.event.rank, mu=row["mu"])
            else:
                report = process.evaluate_suitability(family, t_max=t_max, window=block.window, tol=tol)
                reports.append(report)
                row["mu"] = report.limit
                row["verdict"] = report.verdict.value
                row["trailing_spread"] = report.trailing_spread
                row["rank"] = report.ranks[-1] if report.ranks else None
                entry.update(mu=report.limit, report=report.to_dict())

            logger.info(f"Measured {family.name}: mu={row['mu']}")
            rows.append(row)
            entries.append(entry)

        return CommandResult(
            command="measure",
            columns=["event", "kind", "rank", "mu", "nu", "verdict", "trailing_spread"],
            rows=rows,
            payload={"command": "measure", "events": entries},
            reports=reports,
        )

    def _handle_integrate(self) -> CommandResult:
        """Quantum integrals with the tail-sum cross-check"""
        block = self.config.integrate
        if block.space is not None:
            return self._integrate_space()
        if block.variable is not None:
            return self._integrate_process()
        raise ConfigurationError("'integrate' needs either a 'space' or a 'variable'")

    def _integrate_space(self) -> CommandResult:
        block = self.config.integrate
        settings = self.config.settings
        space_spec = block.space
        if not isinstance(space_spec, dict) or set(space_spec) not in ({"weights"}, {"uniform"}):
            raise ConfigurationError("'integrate.space' must be {'weights': [...]} or {'uniform': N}")
        if "uniform" in space_spec:
            size = space_spec["uniform"]
            if isinstance(size, bool) or not isinstance(size, int) or size < 1:
                raise ConfigurationError(f"'uniform' must be a positive integer, got {size!r}")
            space = DiscreteMeasureSpace.uniform(size)
            points = size
        else:
            weights = as_float_vector(space_spec["weights"], "weights")
            space = DiscreteMeasureSpace(weights, tol=settings.normalization_tol)
            points = weights.size

        raw = as_float_vector(block.values, "values")
        if raw.size != points:
            raise ConfigurationError(f"'values' has {raw.size} entries for a space of {points} points")
        f = RandomVariable(space.restrict(raw)) * float(block.scale)
        rho = _state_operator(block.state, space.size, settings.normalization_tol)

        integral = q_integral(rho, space, f, settings)
        tail = tail_sum_integral(rho, space, f)
        levels = [v for v in np.unique(f.values) if v != 0.0]
        expansion = expansion_integral(rho, space, [f.values == v for v in levels], levels)
        difference = max(abs(integral - tail), abs(integral - expansion))

        row = {"mode": "space", "variable": "values", "rank": None, "q_integral": integral,
               "tail_sum_integral": tail, "expansion_integral": expansion,
               "difference": difference, "limit": integral, "verdict": None}
        payload = {"command": "integrate", "mode": "space", "scale": block.scale, "points": space.size}
        payload.update({k: row[k] for k in ("q_integral", "tail_sum_integral", "expansion_integral", "difference")})
        return CommandResult(command="integrate", columns=self._integrate_columns(), rows=[row], payload=payload)

    def _integrate_process(self) -> CommandResult:
        block = self.config.integrate
        process = self.process
        f = _scaled(create_path_variable(block.variable, process.m), float(block.scale))
        t_max = self.options.t_max if self.options.t_max is not None else block.t_max
        tol = self.options.tol if self.options.tol is not None else block.tol

        report = process_integral(process, f, t_max=t_max, window=block.window, tol=tol)

        # Kernel-vs-tail-sum cross-check at the deepest rank small enough for a dense kernel
        check_rank = None
        for t in reversed(report.ranks):
            if process.state(t).amplitudes.size <= self.config.settings.dense_cap:
                check_rank = t
                break
        integral = tail = difference = None
        if check_rank is not None:
            state = process.state(check_rank)
            values = f.evaluate(check_rank, process.digits(check_rank))
            integral = quantized_expectation(state, values, self.config.settings)
            tail = level_set_integral(state, values)
            difference = abs(integral - tail)

        row = {"mode": "process", "variable": f.name, "rank": check_rank, "q_integral": integral,
               "tail_sum_integral": tail, "expansion_integral": None, "difference": difference,
               "limit": report.limit, "verdict": report.verdict.value}
        payload = {"command": "integrate", "mode": "process", "scale": block.scale, "check_rank": check_rank,
                   "q_integral": integral, "tail_sum_integral": tail, "difference": difference,
                   "report": report.to_dict()}
        return CommandResult(command="integrate", columns=self._integrate_columns(), rows=[row],
                             payload=payload, reports=[report])

    @staticmethod
    def _integrate_columns() -> List[str]:
        return ["mode", "variable", "rank", "q_integral", "tail_sum_integral", "expansion_integral",
                "difference", "limit", "verdict"]

    def _handle_check(self) -> CommandResult:
        """Consistency, weight sums, trace and family martingale residuals"""
        block = self.config.check
        process = self.process
        settings = self.config.settings
        t_max = self.options.t_max if self.options.t_max is not None else block.t_max
        t_max = min(t_max, process.max_rank())
        seed = self.options.seed if self.options.seed is not None else block.seed
        tol = self.options.tol if self.options.tol is not None else settings.consistency_tol

        rows = []

        def add(check: str, rank: int, value: float, detail: str = "") -> None:
            rows.append({"check": check, "rank": rank, "value": value, "tol": tol,
                         "passed": value <= tol, "detail": detail})

        for t in range(t_max):
            report = process.verify_consistency(t, samples=block.samples, seed=seed,
                                                exhaustive_limit=block.exhaustive_limit)
            add("consistency", t, report.max_residual,
                f"{'exhaustive' if report.exhaustive else 'sampled'} {report.pairs_checked} pairs")

        for n in range(t_max + 1):
            by_initial, by_final = weight_norms(process.system, n, settings, process.fixed_initial_site)
            deviation = float(np.max(np.abs(by_initial - 1.0)))
            if by_final is None:
                add("weight-sums", n, deviation, "initial site only")
            else:
                add("weight-sums", n, max(deviation, float(np.max(np.abs(by_final - 1.0)))))
            add("trace", n, abs(process.state(n).trace - 1.0))

        if block.families:
            factory = FamilyFactory(process.m, self.config.base_dir)
            for spec in block.families:
                family = factory.create(spec)
                for t in range(t_max):
                    add("martingale", t, family.martingale_residual(t, process.fixed_initial_site), family.name)

        passed = all(r["passed"] for r in rows)
        if not passed:
            failed = [f"{r['check']}@{r['rank']}" for r in rows if not r["passed"]]
            logger.warning(f"Checks failed: {failed}")

        return CommandResult(
            command="check",
            columns=["check", "rank", "value", "tol", "passed", "detail"],
            rows=rows,
            payload={"command": "check", "seed": seed, "t_max": t_max, "passed": passed, "checks": rows},
        )
