"""Scenario configuration, pipeline driver and report writers.

A scenario is a flat ``key = value`` text file with dotted section
prefixes.  Running it executes chart -> mesh -> assembly -> solve ->
constants -> bound checks over a ladder of mesh resolutions and emits
deterministic, machine-readable artifacts:

* ``eigenvalues.csv``  - resolution, k, lambda, residual
* ``constants.json``   - geometric constants plus provenance metadata
* ``bounds.csv``       - every requested check at the finest resolution
* ``convergence.csv``  - per-eigenvalue Richardson extrapolation and order
* ``weyl_fit.json``    - growth-law fit of the computed spectrum
* ``MANIFEST``         - file list, skipped checks, completion status

Floats in CSV files are printed with 17 significant digits and all
orderings are fixed, so reruns are byte-identical.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import bounds as bnd
from .assembly import EigenfunctionQuadrature, assemble
from .eigensolve import solve_sparse, vertex_fields
from .errors import ConfigError, SpectralabError
from .geometry import (
    Disk,
    Rectangle,
    chart_ids,
    compute_constants,
    eta_ids,
    make_chart,
    make_eta,
    make_tensor,
    tensor_ids,
)
from .meshing import build_structured

CHECK_NAMES = sorted([
    "thm_drift",
    "thm_tensor",
    "corollary_trio",
    "polya_type",
    "cheng_yang_type",
    "recursion_lemma",
    "lemma_c_bound",
    "proposition_testfunction",
    "intro_comparators",
])


@dataclass
class Scenario:
    """Parsed scenario configuration."""

    name: str
    chart_id: str
    chart_params: tuple = ()
    domain: object = None
    eta_kind: str = "zero"
    eta_params: tuple = ()
    eta_expr: str = ""
    tensor_kind: str = "metric"
    tensor_params: tuple = ()
    tensor_expr: str = ""
    resolutions: tuple = ()
    k_max: int = 13
    checks: tuple = ("all",)
    c_values: tuple = (1.0,)
    constants_resolution: int = 64
    output_dir: str = ""

    def __post_init__(self):
        if self.chart_id not in chart_ids():
            raise ConfigError(f"unknown chart id {self.chart_id!r}")
        if list(self.resolutions) != sorted(self.resolutions) or not self.resolutions:
            raise ConfigError("mesh.resolutions must be a nonempty ascending list")
        if self.k_max < 2:
            raise ConfigError("eigen.k_max must be at least 2")
        requested = self.checks if self.checks != ("all",) else tuple(CHECK_NAMES)
        for name in requested:
            if name not in CHECK_NAMES:
                raise ConfigError(f"unknown check name {name!r}")
        if not self.output_dir:
            self.output_dir = os.path.join("out", self.name)

    @property
    def active_checks(self):
        return tuple(CHECK_NAMES) if self.checks == ("all",) else self.checks


def parse_config(text):
    """Parse the flat `key = value` scenario format."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value

    def floats(key, default=()):
        if key not in values:
            return tuple(default)
        return tuple(float(tok) for tok in values.pop(key).split())

    def ints(key, default=()):
        if key not in values:
            return tuple(default)
        return tuple(int(tok) for tok in values.pop(key).split())

    name = values.pop("scenario.name", "")
    chart_id = values.pop("chart.id", "")
    if not name or not chart_id:
        raise ConfigError("scenario.name and chart.id are required")
    chart_params = floats("chart.params")

    domain = None
    kind = values.pop("domain.kind", "")
    if kind == "rectangle":
        bounds = floats("domain.bounds")
        if len(bounds) % 2:
            raise ConfigError("domain.bounds needs an even number of entries")
        domain = Rectangle(tuple((bounds[2 * i], bounds[2 * i + 1])
                                 for i in range(len(bounds) // 2)))
    elif kind == "disk":
        center = floats("domain.center", (0.0, 0.0))
        radius = floats("domain.radius", (1.0,))[0]
        domain = Disk(center, radius)
    elif kind:
        raise ConfigError(f"unknown domain.kind {kind!r}")

    scenario = Scenario(
        name=name,
        chart_id=chart_id,
        chart_params=chart_params,
        domain=domain,
        eta_kind=values.pop("eta.kind", "zero"),
        eta_params=floats("eta.params"),
        eta_expr=values.pop("eta.expr", ""),
        tensor_kind=values.pop("tensor.kind", "metric"),
        tensor_params=floats("tensor.params"),
        tensor_expr=values.pop("tensor.expr", ""),
        resolutions=ints("mesh.resolutions"),
        k_max=ints("eigen.k_max", (13,))[0],
        checks=tuple(values.pop("checks", "all").split()),
        c_values=floats("appendix.c", (1.0,)),
        constants_resolution=ints("constants.resolution", (64,))[0],
        output_dir=values.pop("output.dir", ""),
    )
    if values:
        raise ConfigError(f"unknown configuration keys: {sorted(values)}")
    return scenario


def load_scenario(path):
    with open(path) as handle:
        return parse_config(handle.read())


def build_chart(scenario):
    dim = 1 if scenario.chart_id == "flat_interval" else 2
    eta = make_eta(scenario.eta_kind, scenario.eta_params,
                   scenario.eta_expr or None, dim=dim)
    tensor = make_tensor(scenario.tensor_kind, scenario.tensor_params,
                         scenario.tensor_expr or None, dim=dim)
    return make_chart(scenario.chart_id, scenario.chart_params,
                      domain=scenario.domain, eta=eta, tensor=tensor)


def _fmt(x):
    return f"{x:.17g}"


def _solve_level(chart, resolution, k_max):
    mesh = build_structured(chart.domain, resolution)
    a_mat, b_mat, dof_map = assemble(chart, mesh)
    result = solve_sparse(a_mat, b_mat, k_max)
    result.vertex_values = vertex_fields(result, dof_map)
    return mesh, result


def _richardson(resolutions, values):
    """Observed order and extrapolated limit from the last geometric triple."""
    if len(resolutions) < 3:
        return math.nan, math.nan
    r1, r2, r3 = resolutions[-3:]
    v1, v2, v3 = values[-3:]
    rho1, rho2 = r2 / r1, r3 / r2
    if abs(rho1 - rho2) > 1e-9 * rho1:
        return math.nan, math.nan
    num, den = v1 - v2, v2 - v3
    if den == 0 or num / den <= 0:
        return math.nan, math.nan
    order = math.log(num / den) / math.log(rho1)
    limit = v3 - den / (rho1 ** order - 1.0)
    return order, limit


def _run_checks(scenario, chart, consts, mesh, result):
    """Evaluate every requested inequality at the finest resolution."""
    k_list = list(range(1, scenario.k_max))
    spec = bnd.Spectrum(result.eigenvalues, chart.dim_n, "computed")
    reports = []
    active = scenario.active_checks
    needs_quad = "thm_tensor" in active or "proposition_testfunction" in active
    quad = EigenfunctionQuadrature(chart, mesh, result.vertex_values) if needs_quad else None

    shifted = None
    if any(name in active for name in
           ("corollary_trio", "polya_type", "cheng_yang_type",
            "recursion_lemma", "lemma_c_bound")):
        shifted = bnd.upsilon_shift(spec, consts)

    for k in k_list:
        if "thm_drift" in active:
            reports.append(bnd.check_thm_drift(spec, consts, k))
        if "thm_tensor" in active:
            reports.append(bnd.check_thm_tensor(spec, consts, k, mode="inf_trace"))
            reports.append(bnd.check_thm_tensor(spec, consts, k, mode="integrated", quad=quad))
        if "corollary_trio" in active:
            reports.extend(bnd.check_corollary_trio(shifted, k))
        if "polya_type" in active:
            reports.append(bnd.check_polya_type(shifted, chart.dim_n,
                                                consts.vol_omega, k))
        if "cheng_yang_type" in active:
            reports.append(bnd.check_cheng_yang_type(shifted, chart.dim_n, k))
        if "recursion_lemma" in active:
            for c in scenario.c_values:
                _, report = bnd.recursion_lemma(shifted, chart.dim_n, c, k)
                reports.append(report)
        if "lemma_c_bound" in active:
            for c in scenario.c_values:
                reports.append(bnd.lemma_c_bound(shifted, chart.dim_n, c, k))
        if "intro_comparators" in active:
            reports.extend(bnd.intro_comparators(spec, chart.dim_n, k, consts=consts))
    if "proposition_testfunction" in active:
        from .geometry import AmbientCoordinate
        for axis in range(chart.dim_m):
            h_field = AmbientCoordinate(chart, axis)
            reports.extend(bnd.proposition_reports(
                quad, result.eigenvalues, h_field, k_list, label=f"h=x{axis + 1}"))
    return reports


@dataclass
class RunResult:
    scenario: Scenario
    exit_code: int
    reports: list = field(default_factory=list)
    files: list = field(default_factory=list)
    messages: list = field(default_factory=list)
    eigenvalues: dict = field(default_factory=dict)


def run_scenario(scenario, out_dir=None, parallel=False, write=True,
                 checks=True):
    """Run the full pipeline for one scenario.

    Returns a :class:`RunResult` whose ``exit_code`` follows the contract:
    0 when every evaluated inequality holds within slack, 1 when some check
    failed, 2 on a module error (partial outputs retained with a MANIFEST
    noting incompleteness).
    """
    if out_dir is None:
        root = os.environ.get("SPECTRA_OUT")
        out_dir = os.path.join(root, scenario.name) if root else scenario.output_dir
    run = RunResult(scenario=scenario, exit_code=0)
    written = []
    skipped_notes = []
    error_message = ""

    def emit(name, text):
        if not write:
            return
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, name)
        with open(path, "w") as handle:
            handle.write(text)
        written.append(name)

    try:
        chart = build_chart(scenario)
        consts = compute_constants(chart, scenario.constants_resolution)

        levels = {}
        if parallel and len(scenario.resolutions) > 1:
            with ThreadPoolExecutor(max_workers=len(scenario.resolutions)) as pool:
                futures = {res: pool.submit(_solve_level, chart, res, scenario.k_max)
                           for res in scenario.resolutions}
                levels = {res: futures[res].result() for res in scenario.resolutions}
        else:
            for res in scenario.resolutions:
                levels[res] = _solve_level(chart, res, scenario.k_max)

        lines = ["resolution,k,lambda,residual"]
        for res in scenario.resolutions:
            _, result = levels[res]
            run.eigenvalues[res] = result.eigenvalues
            for idx, (lam, r) in enumerate(zip(result.eigenvalues, result.residuals), 1):
                lines.append(f"{res},{idx},{_fmt(lam)},{_fmt(r)}")
        emit("eigenvalues.csv", "\n".join(lines) + "\n")

        emit("constants.json", json.dumps(consts.as_dict(), sort_keys=True, indent=2) + "\n")

        conv_lines = ["eigenvalue_index,resolution,value,extrapolated,order"]
        n_targets = min(scenario.k_max, 5)
        for idx in range(n_targets):
            vals = [float(levels[res][1].eigenvalues[idx]) for res in scenario.resolutions]
            for j, res in enumerate(scenario.resolutions):
                if j >= 2:
                    order, limit = _richardson(list(scenario.resolutions[:j + 1]), vals[:j + 1])
                else:
                    order, limit = math.nan, math.nan
                conv_lines.append(
                    f"{idx + 1},{res},{_fmt(vals[j])},{_fmt(limit)},{_fmt(order)}")
        emit("convergence.csv", "\n".join(conv_lines) + "\n")

        finest = scenario.resolutions[-1]
        mesh, result = levels[finest]
        if checks:
            reports = _run_checks(scenario, chart, consts, mesh, result)
            run.reports = reports
            rows = ["name,k,lhs,rhs,ratio,holds,slack"]
            for report in reports:
                if report.skipped:
                    skipped_notes.append(f"{report.name} k={report.k}: {report.note}")
                else:
                    rows.append(report.csv_row())
            emit("bounds.csv", "\n".join(rows) + "\n")
            failures = [r for r in reports if not r.skipped and not r.holds]
            if failures:
                run.exit_code = 1
                for r in failures:
                    run.messages.append(
                        f"FAILED {r.name} k={r.k}: lhs={r.lhs:.12g} rhs={r.rhs:.12g}")

        if scenario.k_max >= 10:
            fit = bnd.weyl_fit(bnd.Spectrum(result.eigenvalues, chart.dim_n, "computed"),
                               chart.dim_n, consts.vol_omega, (1, scenario.k_max))
            emit("weyl_fit.json", json.dumps(fit.as_dict(), sort_keys=True, indent=2) + "\n")
        else:
            emit("weyl_fit.json", json.dumps(
                {"skipped": "k_max below 10 fit points"}, indent=2) + "\n")
    except SpectralabError as exc:
        error_message = f"{type(exc).__name__}: {exc}"
        run.exit_code = 2
        run.messages.append(error_message)

    manifest = [f"scenario {scenario.name}",
                f"status {'incomplete' if error_message else 'complete'}"]
    manifest += [f"file {name}" for name in written]
    manifest += [f"skipped {note}" for note in skipped_notes]
    if error_message:
        manifest.append(f"error {error_message}")
    emit("MANIFEST", "\n".join(manifest) + "\n")
    run.files = written
    return run


def catalog_text():
    """Stable, alphabetized listing of charts, builtins and check names."""
    lines = ["charts:"]
    lines += [f"  {name}" for name in chart_ids()]
    lines.append("eta builtins:")
    lines += [f"  {name}" for name in eta_ids()]
    lines.append("tensor builtins:")
    lines += [f"  {name}" for name in tensor_ids()]
    lines.append("checks:")
    lines += [f"  {name}" for name in CHECK_NAMES]
    return "\n".join(lines) + "\n"
