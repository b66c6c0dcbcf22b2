"""Command-line interface for Sharp Extension."""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import click
import numpy as np
import pandas as pd
import yaml
from pydantic import ValidationError

from .config import settings
from .errors import ConfigError, FieldError, GeometryError, NumericalFailure
from .logging_config import setup_logging
from .src.caps.caps import cap_distance, decompose
from .src.convolutions.convolutions import cap_interaction
from .src.convolutions.triple_density import (
    CapChart,
    monte_carlo_triple_density,
    support_bins,
    triple_autoconv_sup_limit,
)
from .src.data.sample_functions import concentrating_sequence, graph_bump, parabola_gaussian, smooth_bump, two_bump
from .src.extension.extension_operator import l6_norm_direct, tomas_stein_envelope
from .src.extension.gaussians import foschi_constant
from .src.fields.arc_function import ArcFunction, l2_sigma_norm
from .src.geometry.arc_geometry import ConvexArc, build_arc, build_from_graph, check_k2_condition
from .src.io.artifacts import write_artifacts
from .src.models.experiment import Criterion, ExperimentConfig, RunSummary
from .src.models.specs import Cap, ParabolaSpec, PerturbedParabolaSpec
from .src.search.diagnostics import sequence_diagnostics
from .src.search.extremizer_search import search as run_search
from .src.variational.appendix import appendix2_integrals
from .src.variational.comparison import compare_constants
from .src.variational.xi import trial_function, xi, xi_scan

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_CRITERION = 2
EXIT_CONFIG = 3
EXIT_NUMERICAL = 4

Outcome = Tuple[Dict[str, Any], List[Criterion], Dict[str, pd.DataFrame]]


def _line_of(text: str, loc: Tuple[Any, ...]) -> Optional[int]:
    """First line mentioning the innermost named key of an error location."""
    lines = text.splitlines()
    for key in reversed([k for k in loc if isinstance(k, str)]):
        for number, line in enumerate(lines, 1):
            stripped = line.strip()
            if f'"{key}"' in stripped or stripped.startswith(f"{key}:"):
                return number
    return None


def load_config(path: Path) -> ExperimentConfig:
    """
    Parse a JSON (or YAML, by suffix) experiment configuration.

    Raises:
        ConfigError: unreadable, empty, malformed or schema-invalid input,
            with the offending line when it can be located
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        logger.error(f"cannot read configuration {path}: {e}")
        raise ConfigError(f"cannot read configuration {path}: {e}") from e

    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            data = yaml.safe_load(text)
        else:
            data = json.loads(text) if text.strip() else None
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", line=e.lineno) from e
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError(f"invalid YAML: {getattr(e, 'problem', None) or e}", line=mark.line + 1 if mark else None) from e

    if not data:
        raise ConfigError("configuration is empty")
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping", line=1)
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(k) for k in first["loc"])
        raise ConfigError(f"{where}: {first['msg']}", line=_line_of(text, first["loc"])) from e


def _relative(value: float, reference: float) -> float:
    return abs(value - reference) / abs(reference)


class ExperimentRunner:
    """Runs one command of an experiment configuration."""

    def __init__(self, config: ExperimentConfig, dump_fields: bool = False):
        self.config = config
        self.dump_fields = dump_fields
        self.fields: Dict[str, ArcFunction] = {}

    def _arc(self, n: Optional[int] = None) -> ConvexArc:
        if self.config.curve is None:
            raise ConfigError("this command needs a curve")
        return build_arc(self.config.curve, n or self.config.grids.arc_n)

    def _keep(self, name: str, f: ArcFunction) -> None:
        if self.dump_fields:
            self.fields[name] = f

    def field_tables(self) -> Dict[str, pd.DataFrame]:
        return {f"field_{name}": f.to_frame() for name, f in self.fields.items()}

    def verify_foschi(self) -> Outcome:
        block = self.config.verify_foschi
        ctrl = self.config.grids.l6
        rows, criteria = [], []
        for mu in block.mu_values:
            spec = ParabolaSpec(mu=mu, halfwidth=block.halfwidth_gaussians / math.sqrt(mu))
            arc = build_from_graph(spec, block.arc_n)
            f = parabola_gaussian(arc, mu)
            estimate = l6_norm_direct(f, ctrl)
            numeric = estimate.value / l2_sigma_norm(f)
            closed = foschi_constant(mu)
            error = _relative(numeric, closed)
            rows.append({"mu": mu, "numeric": numeric, "closed_form": closed,
                         "rel_error": error, "l6_error": estimate.error_estimate})
            criteria.append(Criterion(name=f"foschi@mu={mu:g}", value=error, tolerance=block.tolerance,
                                      passed=error <= block.tolerance))
            self._keep(f"gaussian_mu{mu:g}", f)
        if len(rows) >= 2:
            first, last = rows[0], rows[-1]
            ratio = last["numeric"] / first["numeric"]
            expected = (last["mu"] / first["mu"]) ** (-1.0 / 6.0)
            error = _relative(ratio, expected)
            criteria.append(Criterion(name="scaling_law", value=error, tolerance=block.scaling_tolerance,
                                      passed=error <= block.scaling_tolerance))
        return {"rows": rows}, criteria, {"constants": pd.DataFrame(rows)}

    def triple_limit(self) -> Outcome:
        block = self.config.triple_limit
        arc = self._arc()
        center = block.center if block.center is not None else 0.5 * arc.length
        report = triple_autoconv_sup_limit(arc, center, block.radii)
        limit_error = _relative(report.limit, report.expected_limit)
        expected_norm = foschi_constant(report.kappa_center)
        norm_error = _relative(report.implied_norm, expected_norm)
        criteria = [
            Criterion(name="sup_limit", value=limit_error, tolerance=block.tolerance,
                      passed=limit_error <= block.tolerance),
            Criterion(name="implied_norm", value=norm_error, tolerance=block.norm_tolerance,
                      passed=norm_error <= block.norm_tolerance),
        ]
        results: Dict[str, Any] = {"report": report.model_dump(mode="json"), "expected_norm": expected_norm}
        tables = {"sups": pd.DataFrame([row.model_dump() for row in report.rows])}

        if block.mc_samples > 0:
            if self.config.seed is None:
                raise ConfigError("the Monte-Carlo cross-check needs a seed")
            cap = Cap(center=center, radius=max(block.radii))
            frame = self._monte_carlo(arc, cap, block.mc_samples, self.config.seed)
            results["monte_carlo_max_rel_error"] = float(frame["rel_error"].max())
            tables["monte_carlo"] = frame
        return results, criteria, tables

    @staticmethod
    def _monte_carlo(arc: ConvexArc, cap: Cap, samples: int, seed: int) -> pd.DataFrame:
        """Histogram of the triple density on bins inside the support next to the pointwise density."""
        chart = CapChart.from_arc(arc, cap)
        xi_edges, tau_edges = support_bins(chart)
        density, error = monte_carlo_triple_density(arc, cap, xi_edges, tau_edges, samples, seed)
        rows = []
        for i in range(len(xi_edges) - 1):
            for j in range(len(tau_edges) - 1):
                xc = 0.5 * (xi_edges[i] + xi_edges[i + 1])
                tc = 0.5 * (tau_edges[j] + tau_edges[j + 1])
                pointwise = chart.density(xc, tc)
                rows.append({"xi": xc, "tau": tc, "monte_carlo": density[i, j], "std_error": error[i, j],
                             "pointwise": pointwise,
                             "rel_error": abs(density[i, j] - pointwise) / pointwise if pointwise else 0.0})
        return pd.DataFrame(rows)

    def appendix2(self) -> Outcome:
        block = self.config.appendix2
        rows, criteria, reports = [], [], []
        for lam in block.lambdas:
            report = appendix2_integrals(lam, block.a)
            reports.append(report.model_dump(mode="json"))
            for pair in report.pairs:
                rows.append({"lambda": lam, **pair.model_dump()})
                if pair.rel_error is None:
                    value, tolerance = pair.abs_error, block.abs_tolerance
                else:
                    value, tolerance = pair.rel_error, block.rel_tolerance
                criteria.append(Criterion(name=f"{pair.name}@lambda={lam:g}", value=value,
                                          tolerance=tolerance, passed=value <= tolerance))
        return {"reports": reports}, criteria, {"pairs": pd.DataFrame(rows)}

    def xi_scan(self) -> Outcome:
        block = self.config.xi_scan
        pp = self.config.curve
        if not isinstance(pp, PerturbedParabolaSpec):
            raise ConfigError("xi-scan needs a perturbed_parabola curve")
        ctrl = self.config.grids.l6
        report = xi_scan(pp, block.epsilons, ctrl=ctrl)
        predicted = report.predicted_second_derivative

        criteria = []
        if report.second_difference is not None:
            error = _relative(report.second_difference, predicted)
            criteria.append(Criterion(name="second_difference", value=error, tolerance=block.tolerance,
                                      passed=error <= block.tolerance))
        at = next((row for row in report.rows if math.isclose(row.epsilon, block.sign_epsilon)), None)
        if at is None:
            at = xi(pp, block.sign_epsilon, ctrl=ctrl)
        signed = at.xi * math.copysign(1.0, predicted)
        criteria.append(Criterion(name=f"sign_of_xi@eps={block.sign_epsilon:g}", value=signed,
                                  tolerance=0.0, passed=signed > 0.0))
        if self.dump_fields:
            for eps in block.epsilons:
                self._keep(f"trial_eps{eps:g}", trial_function(pp, eps, n=self.config.grids.arc_n))
        frame = pd.DataFrame([row.model_dump() for row in report.rows])
        return {"report": report.model_dump(mode="json")}, criteria, {"xi": frame}

    def decompose(self) -> Outcome:
        block = self.config.decompose
        arc = self._arc()
        length = arc.length
        centers = [c * length for c in block.centers]
        f = two_bump(arc, centers, block.radius * length, block.heights)
        result = decompose(f, block.params)

        scale = float(np.max(np.abs(f.values)))
        mismatch = float(np.max(np.abs(result.reconstruction() - f.values)))
        violations = sum(not step.report.sandwich_holds for step in result.steps)
        residual = l2_sigma_norm(result.residual) / l2_sigma_norm(f)
        located = [min(abs(cap.center - c) for cap in result.caps) if result.caps else math.inf for c in centers]
        criteria = [
            Criterion(name="reconstruction", value=mismatch, tolerance=1e-12 * scale,
                      passed=mismatch <= 1e-12 * scale),
            Criterion(name="sandwich_violations", value=violations, tolerance=0.0, passed=violations == 0),
            Criterion(name="residual", value=residual, tolerance=block.params.residual_tol,
                      passed=residual <= block.params.residual_tol),
            Criterion(name="cap_location", value=max(located), tolerance=arc.step,
                      passed=max(located) <= arc.step * (1.0 + 1e-9)),
        ]
        for k, step in enumerate(result.steps):
            self._keep(f"piece{k}", step.piece)
        self._keep("residual", result.residual)
        rows = []
        for step in result.steps:
            report = step.report.model_dump()
            cap = report.pop("cap")
            rows.append({"center": cap["center"], "radius": cap["radius"], **report})
        results = {
            "steps": [step.report.model_dump(mode="json") for step in result.steps],
            "stop_reason": result.stop_reason,
            "relative_residual": residual,
        }
        return results, criteria, {"steps": pd.DataFrame(rows)}

    def cap_metric(self) -> Outcome:
        block = self.config.cap_metric
        if self.config.seed is None:
            raise ConfigError("cap-metric samples random caps and needs a seed")
        arc = self._arc()
        length = arc.length
        rng = np.random.default_rng(self.config.seed)
        centers = rng.uniform(0.0, length, size=(block.triples, 3))
        radii = length * 10.0 ** rng.uniform(-3.0, 0.0, size=(block.triples, 3))

        asymmetry, excess, self_distance = 0.0, -math.inf, 0.0
        for c, r in zip(centers, radii):
            a, b, d = (Cap(center=float(c[k]), radius=float(r[k])) for k in range(3))
            asymmetry = max(asymmetry, abs(cap_distance(a, b) - cap_distance(b, a)))
            excess = max(excess, cap_distance(a, d) - cap_distance(a, b) - cap_distance(b, d))
            self_distance = max(self_distance, cap_distance(a, a))

        r = length / 20.0
        base = Cap(center=2.0 * r, radius=r)
        offsets = [0.0, 1.0, 3.0, 6.0, 12.0, 15.0, 17.0][:block.pair_count]
        family = []
        for offset in offsets:
            other = Cap(center=base.center + offset * r, radius=r)
            interaction = cap_interaction(arc, base, other)
            normalized = interaction / math.sqrt(base.clipped_length(length) * other.clipped_length(length))
            family.append({"offset": offset * r, "distance": cap_distance(base, other),
                           "interaction": interaction, "normalized": normalized})
        normalized = [row["normalized"] for row in family]
        increases = sum(later >= earlier for earlier, later in zip(normalized[1:], normalized[2:]))

        criteria = [
            Criterion(name="symmetry", value=asymmetry, tolerance=0.0, passed=asymmetry == 0.0),
            Criterion(name="identity", value=self_distance, tolerance=0.0, passed=self_distance == 0.0),
            Criterion(name="triangle", value=max(excess, 0.0), tolerance=block.triangle_tolerance,
                      passed=excess <= block.triangle_tolerance),
            Criterion(name="interaction_decay", value=increases, tolerance=0.0, passed=increases == 0),
        ]
        results = {"family": family, "max_triangle_excess": excess}
        return results, criteria, {"interaction": pd.DataFrame(family)}

    def search(self) -> Outcome:
        block = self.config.search
        arc = self._arc(block.arc_n)
        spec = self.config.curve
        if isinstance(spec, ParabolaSpec):
            f0 = graph_bump(arc, block.bump_radius / math.sqrt(spec.mu))
            reference = foschi_constant(spec.mu)
        else:
            f0 = smooth_bump(arc, 0.5 * arc.length, 0.25 * arc.length)
            reference = foschi_constant(arc.lambda_min)

        result = run_search(f0, block.params)
        shortfall = reference - result.c_lower
        envelope = tomas_stein_envelope(arc.lambda_min)
        criteria = [
            Criterion(name="reaches_reference", value=shortfall, tolerance=block.tolerance,
                      passed=shortfall <= block.tolerance),
            Criterion(name="envelope", value=result.c_lower, tolerance=envelope,
                      passed=result.c_lower <= envelope),
        ]
        self._keep("start", f0)
        self._keep("best", result.best)
        results = {
            "c_lower": result.c_lower,
            "error_estimate": result.error_estimate,
            "reference": reference,
            "iterations": len(result.trace) - 1,
        }
        trace = pd.DataFrame([row.model_dump() for row in result.trace])
        return results, criteria, {"trace": trace}

    def compare(self) -> Outcome:
        block = self.config.compare
        arc = self._arc(block.arc_n)
        report = compare_constants(arc, block.params, eps=block.epsilon, reference_lambda=block.reference_lambda)
        criteria = [
            Criterion(name="strict", value=report.margin, tolerance=3.0 * report.error_estimate,
                      passed=report.strict),
        ]
        return {"report": report.model_dump(mode="json")}, criteria, {"compare": pd.DataFrame([report.model_dump()])}

    def diagnose(self) -> Outcome:
        block = self.config.diagnose
        arc = self._arc()
        center = block.center if block.center is not None else check_k2_condition(arc).minima[0]
        fs = concentrating_sequence(arc, center, block.scales)
        report = sequence_diagnostics(fs)

        criteria = []
        if block.expect is not None:
            passed = report.classification == block.expect
            criteria.append(Criterion(name=f"classified_{block.expect}", value=float(passed),
                                      tolerance=1.0, passed=passed))
        if block.expect_at_minimum is not None:
            flag = report.concentration.at_curvature_minimum
            passed = flag == block.expect_at_minimum
            criteria.append(Criterion(name="kappa_equals_lambda", value=float(flag),
                                      tolerance=float(block.expect_at_minimum), passed=passed))
        for k, f in enumerate(fs):
            self._keep(f"sequence{k}", f)
        radii = report.concentration.radii
        frame = pd.DataFrame(report.concentration.fractions, columns=[f"r={r:.6g}" for r in radii])
        frame.insert(0, "scale", list(block.scales))
        return {"report": report.model_dump(mode="json")}, criteria, {"fractions": frame}


def _run(ctx: click.Context, command: str, config_path: str, out: Optional[str], threads: Optional[int], dump_fields: bool) -> None:
    setup_logging()
    try:
        config = load_config(Path(config_path))
        if threads:
            settings.threads = threads
        runner = ExperimentRunner(config, dump_fields)
        results, criteria, tables = getattr(runner, command.replace("-", "_"))()
        tables.update(runner.field_tables())
    except (ConfigError, GeometryError, FieldError) as e:
        click.echo(f"configuration error: {e}", err=True)
        ctx.exit(EXIT_CONFIG)
    except NumericalFailure as e:
        click.echo(f"numerical failure: {e}", err=True)
        click.echo(json.dumps(e.diagnostics, sort_keys=True, default=str), err=True)
        ctx.exit(EXIT_NUMERICAL)

    passed = all(c.passed for c in criteria)
    summary = RunSummary(
        command=command,
        passed=passed,
        criteria=criteria,
        results=results,
        config=config.model_dump(mode="json", by_alias=True),
    )
    write_artifacts(Path(out or settings.output_dir), command, summary, tables)

    for c in criteria:
        mark = "PASS" if c.passed else "FAIL"
        click.echo(f"[{mark}] {c.name}: {c.value:.6g} (tolerance {c.tolerance:.3g})")
    click.echo(f"{command}: {'passed' if passed else 'failed'}")
    ctx.exit(EXIT_PASS if passed else EXIT_CRITERION)


def experiment_options(fn):
    """Options shared by every experiment command."""
    fn = click.option("--dump-fields", is_flag=True, help="Also write sampled functions as CSV")(fn)
    fn = click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker cap for plane evaluations")(fn)
    fn = click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory")(fn)
    fn = click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False), help="Experiment configuration (JSON or YAML)")(fn)
    return click.pass_context(fn)


@click.group()
@click.version_option(settings.app_version, prog_name="sharp-extension")
def cli():
    """Sharp Extension - sharp Fourier extension experiments on planar convex arcs."""
    pass


@cli.command("verify-foschi")
@experiment_options
def verify_foschi(ctx, config_path, out, threads, dump_fields):
    """Compare the numerical Gaussian quotient on parabolas with the closed-form constant."""
    _run(ctx, "verify-foschi", config_path, out, threads, dump_fields)


@cli.command("triple-limit")
@experiment_options
def triple_limit(ctx, config_path, out, threads, dump_fields):
    """Sup of the cap triple autoconvolution as the cap shrinks."""
    _run(ctx, "triple-limit", config_path, out, threads, dump_fields)


@cli.command("appendix2")
@experiment_options
def appendix2(ctx, config_path, out, threads, dump_fields):
    """Explicit Gaussian plane integrals against their closed forms."""
    _run(ctx, "appendix2", config_path, out, threads, dump_fields)


@cli.command("xi-scan")
@experiment_options
def xi_scan_command(ctx, config_path, out, threads, dump_fields):
    """Deficit of the trial family along a set of epsilons."""
    _run(ctx, "xi-scan", config_path, out, threads, dump_fields)


@cli.command("decompose")
@experiment_options
def decompose_command(ctx, config_path, out, threads, dump_fields):
    """Cap decomposition of a two-bump input."""
    _run(ctx, "decompose", config_path, out, threads, dump_fields)


@cli.command("cap-metric")
@experiment_options
def cap_metric(ctx, config_path, out, threads, dump_fields):
    """Metric axioms of the cap distance and decay of cap interactions."""
    _run(ctx, "cap-metric", config_path, out, threads, dump_fields)


@cli.command("search")
@experiment_options
def search_command(ctx, config_path, out, threads, dump_fields):
    """Ascent on the Rayleigh quotient from a bump."""
    _run(ctx, "search", config_path, out, threads, dump_fields)


@cli.command("compare")
@experiment_options
def compare(ctx, config_path, out, threads, dump_fields):
    """Strict comparison of the searched lower bound with C_F[lambda]."""
    _run(ctx, "compare", config_path, out, threads, dump_fields)


@cli.command("diagnose")
@experiment_options
def diagnose(ctx, config_path, out, threads, dump_fields):
    """Concentration diagnostics of a transplanted Gaussian sequence."""
    _run(ctx, "diagnose", config_path, out, threads, dump_fields)


if __name__ == '__main__':
    cli()
