"""Command-line front end: shift reports, wavefunction dumps, parameter
sweeps, optimizer runs, and interferometer weak values.

Scenarios are described by a flat key=value config file plus command-line
overrides (flags win).  All numeric output is printed with 12 significant
digits, scientific notation outside [1e-3, 1e6), so CSV artifacts are stable
regression fixtures.  CSV rows of a sweep may be computed in parallel
(``WVA_THREADS``, 0 = auto) but are always written in axis order.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .analytic import gaussian_exact_shifts, max_shift
from .errors import WvaError
from .evolution import PostSelectedEvolution, apply_postselection
from .expectation import shift_report
from .optimizer import OptimizerConfig, gauge_fix, maximize
from .probe import (
    MomentumGrid,
    ProbeWavefunction,
    optimal_probe,
    gaussian_probe,
    position_amplitudes,
    recommended_gaussian_grid,
    recommended_support_points,
    smoothed_optimal_probe,
    smoothed_support_grid,
)
from .system import (
    Observable,
    SystemState,
    WeakValue,
    compute_weak_value,
    mach_zehnder_setup,
    mach_zehnder_weak_value,
)


class ConfigError(Exception):
    """Invalid scenario configuration (bad key, value, or combination)."""


def format_number(x: float) -> str:
    """12 significant digits; scientific for |x| < 1e-3 or >= 1e6."""
    if x == 0:
        return "0"
    ax = abs(x)
    if ax < 1e-3 or ax >= 1e6:
        return f"{x:.11e}"
    return f"{x:.12g}"


def _parse_complex(text: str, field: str) -> complex:
    try:
        return complex(text.strip())
    except ValueError as exc:
        raise ConfigError(f"field '{field}': cannot parse complex number {text!r}") from exc


def _parse_vector(text: str, field: str) -> np.ndarray:
    parts = [t for t in text.split(",") if t.strip()]
    if len(parts) < 2:
        raise ConfigError(f"field '{field}': need at least two comma-separated entries")
    return np.array([_parse_complex(t, field) for t in parts])


def _parse_matrix(text: str, field: str) -> np.ndarray:
    rows = [r for r in text.split(";") if r.strip()]
    matrix = [_parse_vector(r, field) for r in rows]
    width = len(matrix[0])
    if any(len(r) != width for r in matrix):
        raise ConfigError(f"field '{field}': ragged matrix rows")
    return np.array(matrix)


_PROBE_KINDS = ("gaussian", "optimal", "smoothed", "file")

_CONFIG_KEYS = (
    "g",
    "aw_re",
    "aw_im",
    "chi",
    "varphi",
    "pre",
    "post",
    "obs",
    "probe",
    "width",
    "smoothing",
    "file",
    "n_points",
    "support_m",
    "n_range",
    "output",
    "format",
)


@dataclass(frozen=True)
class ScenarioConfig:
    """One fully specified measurement scenario.

    Exactly one selection mode (explicit weak value, interferometer angles,
    or explicit state/observable vectors) and exactly one probe choice.
    """

    coupling: float = 0.1
    aw: complex | None = None
    chi: float | None = None
    varphi: float | None = None
    pre: np.ndarray | None = None
    post: np.ndarray | None = None
    obs: np.ndarray | None = None
    probe: str = "gaussian"
    width: float = 1.0
    smoothing: float | None = None
    probe_file: str | None = None
    n_points: int | None = None
    support_extent: int = 1
    n_range: int = 16
    output: str | None = None
    fmt: str = "csv"

    def selection_mode(self) -> str:
        explicit = self.aw is not None
        angles = self.chi is not None or self.varphi is not None
        vectors = self.pre is not None or self.post is not None or self.obs is not None
        chosen = [m for m, on in (("aw", explicit), ("mach_zehnder", angles), ("vectors", vectors)) if on]
        if len(chosen) != 1:
            raise ConfigError(
                "exactly one selection mode required: aw_re/aw_im, chi/varphi, or pre/post/obs"
            )
        mode = chosen[0]
        if mode == "mach_zehnder" and (self.chi is None or self.varphi is None):
            raise ConfigError("mach-zehnder selection needs both chi and varphi")
        if mode == "vectors" and (self.pre is None or self.post is None or self.obs is None):
            raise ConfigError("vector selection needs pre, post, and obs")
        return mode

    def validate(self) -> None:
        self.selection_mode()
        if self.probe not in _PROBE_KINDS:
            raise ConfigError(f"probe must be one of {_PROBE_KINDS}, got {self.probe!r}")
        if self.probe == "smoothed" and self.smoothing is None:
            raise ConfigError("probe=smoothed needs the smoothing key")
        if self.probe != "smoothed" and self.smoothing is not None:
            raise ConfigError("smoothing is only meaningful for probe=smoothed")
        if self.probe == "file" and not self.probe_file:
            raise ConfigError("probe=file needs the file key")
        if self.probe != "file" and self.probe_file:
            raise ConfigError("file is only meaningful for probe=file")
        if self.coupling <= 0 or not math.isfinite(self.coupling):
            raise ConfigError("g must be positive and finite")
        if self.width <= 0:
            raise ConfigError("width must be positive")
        if self.n_points is not None and (self.n_points < 3 or self.n_points % 2 == 0):
            raise ConfigError("n_points must be odd and at least 3")
        if self.support_extent < 1:
            raise ConfigError("support_m must be a positive integer")
        if self.n_range < 1:
            raise ConfigError("n_range must be a positive integer")
        if self.fmt != "csv":
            raise ConfigError(f"format must be 'csv', got {self.fmt!r}")

    def to_text(self) -> str:
        """Serialize as a config file; parsing it back yields an identical
        scenario (the round-trip contract)."""
        lines = [f"g={self.coupling!r}"]
        if self.aw is not None:
            lines.append(f"aw_re={self.aw.real!r}")
            lines.append(f"aw_im={self.aw.imag!r}")
        if self.chi is not None:
            lines.append(f"chi={self.chi!r}")
        if self.varphi is not None:
            lines.append(f"varphi={self.varphi!r}")
        if self.pre is not None:
            lines.append("pre=" + ",".join(repr(complex(z)) for z in self.pre))
        if self.post is not None:
            lines.append("post=" + ",".join(repr(complex(z)) for z in self.post))
        if self.obs is not None:
            lines.append(
                "obs=" + ";".join(",".join(repr(complex(z)) for z in row) for row in self.obs)
            )
        lines.append(f"probe={self.probe}")
        if self.probe == "gaussian":
            lines.append(f"width={self.width!r}")
        if self.smoothing is not None:
            lines.append(f"smoothing={self.smoothing!r}")
        if self.probe_file:
            lines.append(f"file={self.probe_file}")
        if self.n_points is not None:
            lines.append(f"n_points={self.n_points}")
        lines.append(f"support_m={self.support_extent}")
        lines.append(f"n_range={self.n_range}")
        if self.output:
            lines.append(f"output={self.output}")
        lines.append(f"format={self.fmt}")
        return "\n".join(lines) + "\n"


def load_config_file(path: str) -> dict[str, str]:
    """Parse a UTF-8 key=value file ('#' comments, blank lines allowed)."""
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = line.split("=", 1)
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            table[key] = value.strip()
    return table


def _float_field(table: dict[str, str], key: str) -> float:
    try:
        return float(table[key])
    except ValueError as exc:
        raise ConfigError(f"field '{key}': cannot parse number {table[key]!r}") from exc


def _int_field(table: dict[str, str], key: str) -> int:
    try:
        return int(table[key])
    except ValueError as exc:
        raise ConfigError(f"field '{key}': cannot parse integer {table[key]!r}") from exc


def scenario_from_table(table: dict[str, str]) -> ScenarioConfig:
    """Build and validate a scenario from a flat key=value mapping."""
    kwargs: dict = {}
    if "g" in table:
        kwargs["coupling"] = _float_field(table, "g")
    if "aw_re" in table or "aw_im" in table:
        re_part = _float_field(table, "aw_re") if "aw_re" in table else 0.0
        im_part = _float_field(table, "aw_im") if "aw_im" in table else 0.0
        kwargs["aw"] = complex(re_part, im_part)
    if "chi" in table:
        kwargs["chi"] = _float_field(table, "chi")
    if "varphi" in table:
        kwargs["varphi"] = _float_field(table, "varphi")
    if "pre" in table:
        kwargs["pre"] = _parse_vector(table["pre"], "pre")
    if "post" in table:
        kwargs["post"] = _parse_vector(table["post"], "post")
    if "obs" in table:
        kwargs["obs"] = _parse_matrix(table["obs"], "obs")
    if "probe" in table:
        kwargs["probe"] = table["probe"]
    if "width" in table:
        kwargs["width"] = _float_field(table, "width")
    if "smoothing" in table:
        kwargs["smoothing"] = _float_field(table, "smoothing")
    if "file" in table:
        kwargs["probe_file"] = table["file"]
    if "n_points" in table:
        kwargs["n_points"] = _int_field(table, "n_points")
    if "support_m" in table:
        kwargs["support_extent"] = _int_field(table, "support_m")
    if "n_range" in table:
        kwargs["n_range"] = _int_field(table, "n_range")
    if "output" in table:
        kwargs["output"] = table["output"]
    if "format" in table:
        kwargs["fmt"] = table["format"]
    config = ScenarioConfig(**kwargs)
    config.validate()
    return config


def scenario_from_args(args: argparse.Namespace) -> ScenarioConfig:
    """Merge config file (if any) with command-line overrides; flags win."""
    table: dict[str, str] = {}
    if getattr(args, "config", None):
        table.update(load_config_file(args.config))
    overrides = {
        "g": args.g,
        "aw_re": args.aw_re,
        "aw_im": args.aw_im,
        "chi": args.chi,
        "varphi": args.varphi,
        "pre": args.pre,
        "post": args.post,
        "obs": args.obs,
        "probe": args.probe,
        "width": args.width,
        "smoothing": args.smoothing,
        "file": args.file,
        "n_points": args.n_points,
        "support_m": args.support_m,
        "n_range": args.n_range,
        "output": args.output,
        "format": args.format,
    }
    for key, value in overrides.items():
        if value is not None:
            table[key] = str(value)
    return scenario_from_table(table)


def scenario_weak_value(config: ScenarioConfig) -> WeakValue:
    mode = config.selection_mode()
    if mode == "aw":
        return WeakValue.from_value(config.aw)
    if mode == "mach_zehnder":
        pre, post, obs = mach_zehnder_setup(config.chi, config.varphi)
        return compute_weak_value(pre, post, obs)
    return compute_weak_value(
        SystemState(config.pre), SystemState(config.post), Observable(config.obs)
    )


def read_probe_csv(path: str) -> ProbeWavefunction:
    """Load a probe from a dump file (its initial momentum-space rows)."""
    coords: list[float] = []
    values: list[complex] = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != ["space", "coordinate", "re", "im"]:
            raise ConfigError(f"{path}: expected header space,coordinate,re,im")
        for row in reader:
            if row["space"] == "momentum_initial":
                coords.append(float(row["coordinate"]))
                values.append(complex(float(row["re"]), float(row["im"])))
    if len(coords) < 3:
        raise ConfigError(f"{path}: fewer than three momentum_initial samples")
    if len(coords) % 2 == 0:
        raise ConfigError(f"{path}: momentum sample count must be odd")
    p = np.array(coords)
    spacing = np.diff(p)
    if spacing.min() <= 0 or (spacing.max() - spacing.min()) > 1e-6 * spacing.mean():
        raise ConfigError(f"{path}: momentum samples must be uniformly increasing")
    grid = MomentumGrid(p[0], p[-1], len(coords))
    return ProbeWavefunction.normalized(grid, np.array(values), label="file")


def scenario_probe(config: ScenarioConfig, weak_value: WeakValue) -> ProbeWavefunction:
    if config.probe == "gaussian":
        if config.n_points is None:
            grid = recommended_gaussian_grid(config.coupling, config.width)
        else:
            half = 7.5 * config.width
            grid = MomentumGrid(-half, half, config.n_points)
        return gaussian_probe(config.width, grid)
    if config.probe == "optimal":
        n = config.n_points
        if n is None:
            n = recommended_support_points(weak_value.value, config.support_extent)
        return optimal_probe(config.coupling, weak_value.value, n, config.support_extent)
    if config.probe == "smoothed":
        grid = smoothed_support_grid(
            config.coupling, config.smoothing, config.n_points or 4097
        )
        return smoothed_optimal_probe(config.coupling, weak_value.value, config.smoothing, grid)
    return read_probe_csv(config.probe_file)


def analytic_reference(
    config: ScenarioConfig, weak_value: WeakValue
) -> tuple[float | None, float | None]:
    """Closed-form (delta_q, delta_p) reference for the scenario's probe."""
    if config.probe == "gaussian":
        prediction = gaussian_exact_shifts(config.coupling, config.width, weak_value.value)
        return prediction.delta_q, prediction.delta_p
    if config.probe in ("optimal", "smoothed"):
        return max_shift(config.coupling, weak_value.value), None
    return None, None


def _csv_writer(handle):
    return csv.writer(handle, lineterminator="\n")


def _optional(value: float | None) -> str:
    return "" if value is None else format_number(value)


def cmd_shift(config: ScenarioConfig) -> int:
    wv = scenario_weak_value(config)
    evo = PostSelectedEvolution(config.coupling, wv)
    probe = scenario_probe(config, wv)
    report = shift_report(evo, probe)
    ref_q, ref_p = analytic_reference(config, wv)

    print(f"probe          {probe.label}")
    print(f"g              {format_number(config.coupling)}")
    print(f"weak_value     {format_number(wv.value.real)} {format_number(wv.value.imag)}j")
    print(f"q_initial      {format_number(report.q_initial)}")
    print(f"q_final        {format_number(report.q_final)}")
    print(f"p_initial      {format_number(report.p_initial)}")
    print(f"p_final        {format_number(report.p_final)}")
    for name, value, ref in (
        ("delta_q", report.delta_q, ref_q),
        ("delta_p", report.delta_p, ref_p),
    ):
        if ref is None:
            print(f"{name}        {format_number(value)}")
        else:
            print(
                f"{name}        {format_number(value)}  analytic {format_number(ref)}"
                f"  |diff| {format_number(abs(value - ref))}"
            )
    print(f"weight         {format_number(report.weight)}")

    if config.output:
        with open(config.output, "w", newline="", encoding="utf-8") as handle:
            writer = _csv_writer(handle)
            writer.writerow(
                [
                    "probe",
                    "g",
                    "aw_re",
                    "aw_im",
                    "q_initial",
                    "q_final",
                    "p_initial",
                    "p_final",
                    "delta_q",
                    "delta_p",
                    "weight",
                    "analytic_delta_q",
                    "analytic_delta_p",
                    "abs_diff_delta_q",
                    "abs_diff_delta_p",
                ]
            )
            writer.writerow(
                [
                    probe.label,
                    format_number(config.coupling),
                    format_number(wv.value.real),
                    format_number(wv.value.imag),
                    format_number(report.q_initial),
                    format_number(report.q_final),
                    format_number(report.p_initial),
                    format_number(report.p_final),
                    format_number(report.delta_q),
                    format_number(report.delta_p),
                    format_number(report.weight),
                    _optional(ref_q),
                    _optional(ref_p),
                    _optional(None if ref_q is None else abs(report.delta_q - ref_q)),
                    _optional(None if ref_p is None else abs(report.delta_p - ref_p)),
                ]
            )
    return 0


def _dump_rows(config: ScenarioConfig) -> list[list[str]]:
    wv = scenario_weak_value(config)
    evo = PostSelectedEvolution(config.coupling, wv)
    probe = scenario_probe(config, wv)
    evolved = apply_postselection(evo, probe)
    final_values = evolved.values / math.sqrt(evolved.weight)

    rows: list[list[str]] = []

    def emit(space: str, coordinate: float, value: complex) -> None:
        rows.append(
            [
                space,
                format_number(coordinate),
                format_number(value.real),
                format_number(value.imag),
            ]
        )

    p = probe.grid.points
    for j in range(probe.grid.n_points):
        emit("momentum_initial", p[j], probe.values[j])
    for j in range(probe.grid.n_points):
        emit("momentum_final", p[j], final_values[j])

    if config.probe in ("optimal", "smoothed"):
        # Discrete position samples on the comb q = 2 g n.
        offsets = np.arange(-config.n_range, config.n_range + 1)
        positions = 2.0 * config.coupling * offsets
        initial_amps = position_amplitudes(probe, positions)
        final_probe_like = ProbeWavefunction.normalized(
            probe.grid, final_values, label="final"
        )
        final_amps = position_amplitudes(final_probe_like, positions)
        for q, amp in zip(positions, initial_amps):
            emit("position_initial", q, amp)
        for q, amp in zip(positions, final_amps):
            emit("position_final", q, amp)
    else:
        # Continuous position samples covering initial and shifted densities.
        sigma = 1.0 / (2.0 * config.width) if config.probe == "gaussian" else 2.0
        ref_q, _ = analytic_reference(config, wv)
        center = ref_q if ref_q is not None else 0.0
        lo = min(0.0, center) - 8.0 * sigma
        hi = max(0.0, center) + 8.0 * sigma
        positions = np.linspace(lo, hi, 801)
        initial_amps = position_amplitudes(probe, positions)
        final_probe_like = ProbeWavefunction.normalized(
            probe.grid, final_values, label="final"
        )
        final_amps = position_amplitudes(final_probe_like, positions)
        for q, amp in zip(positions, initial_amps):
            emit("position_initial", q, amp)
        for q, amp in zip(positions, final_amps):
            emit("position_final", q, amp)
    return rows


def cmd_dump(config: ScenarioConfig) -> int:
    rows = _dump_rows(config)
    if config.output:
        handle = open(config.output, "w", newline="", encoding="utf-8")
        close = True
    else:
        handle = sys.stdout
        close = False
    try:
        writer = _csv_writer(handle)
        writer.writerow(["space", "coordinate", "re", "im"])
        writer.writerows(rows)
    finally:
        if close:
            handle.close()
    return 0


_SWEEP_AXES = ("postselection_angle", "smoothing_s", "coupling_g", "grid_n")


def _sweep_scenario(config: ScenarioConfig, axis: str, value: float) -> ScenarioConfig:
    if axis == "coupling_g":
        return replace(config, coupling=value)
    if axis == "smoothing_s":
        if config.probe != "smoothed":
            raise ConfigError("axis=smoothing_s needs probe=smoothed")
        return replace(config, smoothing=value)
    if axis == "grid_n":
        n = int(round(value))
        if n % 2 == 0:
            n += 1
        return replace(config, n_points=max(n, 3))
    # postselection_angle
    if config.selection_mode() == "mach_zehnder":
        return replace(config, varphi=value)
    if config.selection_mode() == "vectors":
        if config.pre is None or len(config.pre) != 2:
            raise ConfigError("postselection_angle sweep needs a two-level explicit selection")
        return replace(config, post=np.array([math.cos(value), math.sin(value)]))
    raise ConfigError("postselection_angle sweep needs mach-zehnder or vector selection")


def _sweep_row(config: ScenarioConfig, axis: str, value: float) -> list[str]:
    row = [axis, format_number(value)]
    try:
        variant = _sweep_scenario(config, axis, value)
        variant.validate()
        wv = scenario_weak_value(variant)
        evo = PostSelectedEvolution(variant.coupling, wv)
        probe = scenario_probe(variant, wv)
        report = shift_report(evo, probe)
        ref_q, _ = analytic_reference(variant, wv)
        overlap_q = (
            format_number(abs(wv.overlap) * report.q_final)
            if axis == "postselection_angle"
            else ""
        )
        row += [
            format_number(report.delta_q),
            format_number(report.delta_p),
            format_number(report.weight),
            _optional(ref_q),
            overlap_q,
            "",
        ]
    except (WvaError, ConfigError) as exc:
        row += ["", "", "", "", "", type(exc).__name__]
    return row


def _sweep_values(args: argparse.Namespace) -> list[float]:
    if args.values:
        try:
            values = [float(t) for t in args.values.split(",") if t.strip()]
        except ValueError as exc:
            raise ConfigError(f"--values: cannot parse {args.values!r}") from exc
    else:
        if args.start is None or args.stop is None or args.count is None:
            raise ConfigError("sweep needs either --values or --start/--stop/--count")
        if args.count < 2:
            raise ConfigError("sweep needs at least 2 samples")
        values = list(np.linspace(args.start, args.stop, args.count))
    if len(values) < 2:
        raise ConfigError("sweep needs at least 2 samples")
    return values


def _map_rows(fn: Callable[[float], list[str]], values: Sequence[float]) -> list[list[str]]:
    threads = os.environ.get("WVA_THREADS")
    if threads is None:
        return [fn(v) for v in values]
    workers = int(threads)
    if workers == 0:
        workers = os.cpu_count() or 1
    if workers <= 1:
        return [fn(v) for v in values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, values))


def cmd_sweep(config: ScenarioConfig, axis: str, values: list[float]) -> int:
    if axis not in _SWEEP_AXES:
        raise ConfigError(f"axis must be one of {_SWEEP_AXES}")
    rows = _map_rows(lambda v: _sweep_row(config, axis, v), values)
    if config.output:
        handle = open(config.output, "w", newline="", encoding="utf-8")
        close = True
    else:
        handle = sys.stdout
        close = False
    try:
        writer = _csv_writer(handle)
        writer.writerow(
            [
                "axis",
                "axis_value",
                "delta_q",
                "delta_p",
                "weight",
                "analytic_delta_q",
                "overlap_times_q_final",
                "error",
            ]
        )
        writer.writerows(rows)
    finally:
        if close:
            handle.close()
    return 0 if all(row[-1] == "" for row in rows) else 1


def cmd_optimize(config: ScenarioConfig, args: argparse.Namespace) -> int:
    wv = scenario_weak_value(config)
    evo = PostSelectedEvolution(config.coupling, wv)
    n = config.n_points if config.n_points is not None else 513
    grid = MomentumGrid.for_support(config.coupling, n, config.support_extent)
    optimizer_config = OptimizerConfig(
        grid=grid,
        max_iters=args.max_iters,
        step=args.step,
        tol=args.tol,
        seed=args.seed,
        init=args.init,
    )
    trace = maximize(optimizer_config, evo)
    reference = max_shift(config.coupling, wv.value)
    last_iter, last_objective, last_norm = trace.iterations[-1]

    print(f"converged      {str(trace.converged).lower()}")
    print(f"iterations     {last_iter}")
    print(f"objective      {format_number(last_objective)}")
    print(f"reference      {format_number(reference)}")
    print(f"abs_gap        {format_number(abs(last_objective - reference))}")
    print(f"grad_norm      {format_number(last_norm)}")

    if config.output:
        with open(config.output, "w", newline="", encoding="utf-8") as handle:
            writer = _csv_writer(handle)
            writer.writerow(["iter", "objective", "grad_norm"])
            for index, value, norm in trace.iterations:
                writer.writerow([str(index), format_number(value), format_number(norm)])
    if args.probe_output:
        fixed = gauge_fix(trace.final_probe)
        with open(args.probe_output, "w", newline="", encoding="utf-8") as handle:
            writer = _csv_writer(handle)
            writer.writerow(["space", "coordinate", "re", "im"])
            p = grid.points
            for j in range(grid.n_points):
                writer.writerow(
                    [
                        "momentum_initial",
                        format_number(p[j]),
                        format_number(fixed.values[j].real),
                        format_number(fixed.values[j].imag),
                    ]
                )
    return 0


def cmd_mach_zehnder(chi: float, varphi: float) -> int:
    wv = mach_zehnder_weak_value(chi, varphi)
    print(f"C_w            {format_number(wv.value.real)} {format_number(wv.value.imag)}j")
    a_w = 2.0 * wv.value - 1.0
    print(f"A_w            {format_number(a_w.real)} {format_number(a_w.imag)}j")
    print(f"overlap        {format_number(wv.overlap.real)} {format_number(wv.overlap.imag)}j")
    print(f"success_prob   {format_number(wv.success_probability)}")
    return 0


def _add_scenario_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value scenario file")
    parser.add_argument("--g", type=float, help="coupling constant")
    parser.add_argument("--aw-re", dest="aw_re", type=float, help="weak value, real part")
    parser.add_argument("--aw-im", dest="aw_im", type=float, help="weak value, imaginary part")
    parser.add_argument("--chi", type=float, help="injection angle (radians)")
    parser.add_argument("--varphi", type=float, help="polarizer angle (radians)")
    parser.add_argument("--pre", help="pre-selected state, comma-separated complex entries")
    parser.add_argument("--post", help="post-selected state, comma-separated complex entries")
    parser.add_argument("--obs", help="observable matrix, ';'-separated rows")
    parser.add_argument("--probe", choices=_PROBE_KINDS, help="probe family")
    parser.add_argument("--width", type=float, help="gaussian momentum width")
    parser.add_argument("--smoothing", type=float, help="smoothing rate for probe=smoothed")
    parser.add_argument("--file", help="probe CSV for probe=file")
    parser.add_argument("--n-points", dest="n_points", type=int, help="grid points (odd)")
    parser.add_argument("--support-m", dest="support_m", type=int, help="support multiplier")
    parser.add_argument("--n-range", dest="n_range", type=int, help="discrete position range")
    parser.add_argument("--output", help="output CSV path (default: stdout or none)")
    parser.add_argument("--format", choices=["csv"], help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wva",
        description="Weak-measurement probe shifts, wavefunction dumps, sweeps, optimizer runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("shift", "compute a shift report and compare with the closed forms"),
        ("dump", "emit wavefunction samples as CSV"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_scenario_arguments(p)

    p_sweep = sub.add_parser("sweep", help="sweep one axis, one CSV row per sample")
    _add_scenario_arguments(p_sweep)
    p_sweep.add_argument("--axis", required=True, choices=_SWEEP_AXES)
    p_sweep.add_argument("--start", type=float)
    p_sweep.add_argument("--stop", type=float)
    p_sweep.add_argument("--count", type=int)
    p_sweep.add_argument("--values", help="comma-separated explicit axis values")

    p_opt = sub.add_parser("optimize", help="variational search for the optimal probe")
    _add_scenario_arguments(p_opt)
    p_opt.add_argument("--max-iters", dest="max_iters", type=int, default=4000)
    p_opt.add_argument("--step", type=float, default=1.0)
    p_opt.add_argument("--tol", type=float, default=1e-5)
    p_opt.add_argument("--seed", type=int, default=0)
    p_opt.add_argument("--init", choices=["gaussian", "random"], default="gaussian")
    p_opt.add_argument("--probe-output", dest="probe_output", help="gauge-fixed probe CSV")

    p_mz = sub.add_parser("mach-zehnder", help="print the interferometer weak value")
    p_mz.add_argument("--chi", type=float, required=True)
    p_mz.add_argument("--varphi", type=float, required=True)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "mach-zehnder":
            return cmd_mach_zehnder(args.chi, args.varphi)
        config = scenario_from_args(args)
        if args.command == "shift":
            return cmd_shift(config)
        if args.command == "dump":
            return cmd_dump(config)
        if args.command == "sweep":
            return cmd_sweep(config, args.axis, _sweep_values(args))
        if args.command == "optimize":
            return cmd_optimize(config, args)
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"ConfigError: {exc}", file=sys.stderr)
        return 2
    except WvaError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
