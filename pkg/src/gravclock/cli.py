"""Command-line front end: threshold, dephase-curve, stability-sweep, budget.

Every run reads one scenario file (or the built-in defaults), computes in
memory, then writes all outputs plus a run_record.json manifest from a
single writer. Exit codes: 0 success, 2 scenario/validation failure, 3 a
solver flagged a point (non-bracketable) and --allow-flags was not given.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .core import InterrogationParams, per_layer_phase_rate, per_layer_sql, qpn_stability
from .dephasing import Convention, DephasingInput, dephase_curve
from .emit import csv_text, fmt_float, json_text, run_record, write_outputs
from .scenario import Scenario, ScenarioError, parse_scenario, serialize_scenario
from .sweep import SweepSpec, sweep
from .systematics import BudgetAssumptions, assemble_budget
from .thresholds import (
    Partition,
    ThresholdProblem,
    decoherence_atom_count,
    solve_decoherence_size,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_FLAGGED = 3

_HALVES_NOTE = (
    "half-ensemble SQL (N/2 ~ n^3/2 atoms) against the full-span redshift;"
    " reconstructed criterion"
)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return fmt_float(value)
    return str(value)


def _run_threshold(scenario: Scenario) -> tuple[dict[str, str], list[str], str]:
    species = scenario.species_obj()
    consts = scenario.consts_obj()
    spacing = scenario.layer_spacing()
    tau = scenario.interrogation_tau

    sections = {}
    for partition, note in (
        (Partition.PER_LAYER, "adjacent-layer SQL against the full-span redshift"),
        (Partition.HALVES, _HALVES_NOTE),
    ):
        problem = ThresholdProblem(
            species=species,
            consts=consts,
            tau=tau,
            partition=partition,
            convention=scenario.convention,
            layer_spacing=spacing,
        )
        solution = solve_decoherence_size(problem)
        n = solution.n_int
        atoms = decoherence_atom_count(n)
        interrogation = InterrogationParams.single_sequence(
            tau, scenario.interrogation_xi_w_sq
        )
        sections[partition.value] = {
            "n_star": solution.n_star,
            "n_int": n,
            "total_atoms": atoms,
            "per_layer_sql": per_layer_sql(species, tau, n),
            "ensemble_qpn": qpn_stability(species, interrogation, atoms),
            "definition": note,
        }

    document = {
        "species": species.name,
        "convention": scenario.convention.value,
        "tau_s": tau,
        "layer_spacing_m": spacing,
        "per_layer": sections[Partition.PER_LAYER.value],
        "halves": sections[Partition.HALVES.value],
    }
    lines = [
        f"convention      {scenario.convention.value}",
        f"tau             {fmt_float(tau)} s",
    ]
    for name in ("per_layer", "halves"):
        block = document[name]
        lines.append(
            f"{name:<15} n* = {block['n_star']:.3f}  n = {block['n_int']}"
            f"  N = {block['total_atoms']}"
        )
    text = "\n".join(lines) + "\n"
    return {scenario.output_threshold: json_text(document)}, [], text


def _run_dephase_curve(scenario: Scenario) -> tuple[dict[str, str], list[str], str]:
    species = scenario.species_obj()
    consts = scenario.consts_obj()
    phi_g = per_layer_phase_rate(consts, species, scenario.layer_spacing())

    rows: list[list[str]] = []
    for n_site in scenario.dephase_sizes:
        template = DephasingInput(
            phi_l=scenario.dephase_phi_l,
            phi_g=phi_g,
            layer_count=n_site + 1,
            t=0.0,
            convention=scenario.convention,
        )
        for t, summary in dephase_curve(template, scenario.dephase_t_grid):
            rows.append(
                [
                    _cell(t),
                    _cell(n_site),
                    _cell(scenario.dephase_phi_l),
                    scenario.convention.value,
                    _cell(summary.ratio),
                    _cell(summary.length / (n_site + 1)),
                ]
            )
    header = ["t_s", "n_site", "phi_l", "convention", "ratio", "contrast"]
    files = {scenario.output_dephase_curve: csv_text(header, rows)}
    text = f"dephase-curve: {len(rows)} rows ({len(scenario.dephase_sizes)} sizes)\n"
    return files, [], text


def _run_stability_sweep(
    scenario: Scenario, threads: int
) -> tuple[dict[str, str], list[str], str]:
    spec = SweepSpec(
        family=scenario.sweep_family,
        sizes=scenario.sweep_sizes,
        phi_l_grid=scenario.sweep_phi_l,
        convention=scenario.convention,
        atoms_per_layer=scenario.sweep_atoms_per_layer,
        species=scenario.species_obj(),
        consts=scenario.consts_obj(),
        layer_spacing=scenario.layer_spacing(),
    )
    points = sweep(spec, threads=threads)
    rows = [
        [
            point.family,
            _cell(point.size),
            _cell(point.phi_l),
            point.convention.value,
            _cell(point.tau_max_s),
            _cell(point.sigma_at_tau),
            _cell(point.sigma_at_1s),
            point.flag,
        ]
        for point in points
    ]
    header = [
        "geometry",
        "size",
        "phi_l",
        "convention",
        "tau_max_s",
        "sigma_at_tau",
        "sigma_at_1s",
        "flag",
    ]
    flags = [
        f"{point.family}:{point.size}:phi_l={fmt_float(point.phi_l)}: {point.flag}"
        for point in points
        if point.flag
    ]
    files = {scenario.output_stability_sweep: csv_text(header, rows)}
    text = f"stability-sweep: {len(rows)} rows, {len(flags)} flagged\n"
    return files, flags, text


def _budget_table(budget) -> str:
    headers = ["effect", "shift_hz", "fractional", "signal_hz", "passes"]
    rows = [
        [
            entry.name,
            f"{entry.differential_shift_hz:.3e}",
            f"{entry.fractional:.3e}",
            f"{entry.reference_signal_hz:.3e}",
            "pass" if entry.passes else "FAIL",
        ]
        for entry in budget.entries
    ]
    widths = [
        max(len(headers[i]), *(len(row[i]) for row in rows)) for i in range(len(headers))
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    lines.extend("  ".join(row[i].ljust(widths[i]) for i in range(len(row))) for row in rows)
    return "\n".join(lines) + "\n"


def _run_budget(scenario: Scenario) -> tuple[dict[str, str], list[str], str]:
    assumptions = BudgetAssumptions(
        bias_field=scenario.budget_bias_field,
        p2_linewidth_hz=scenario.budget_p2_linewidth,
        e_field_gradient=scenario.budget_e_gradient,
        baseline_e_field=scenario.budget_baseline_e_field,
        beam_waist=scenario.budget_beam_waist,
        beam_separation=scenario.budget_beam_separation,
        wall_distance=scenario.budget_wall_distance,
        bbr_disk_radius=scenario.budget_disk_radius,
        base_temperature=scenario.budget_base_temperature,
        example_temperature_step=scenario.budget_example_temperature_step,
        delta_t=scenario.budget_delta_t,
    )
    budget = assemble_budget(
        n_site=scenario.budget_n_site,
        species=scenario.species_obj(),
        consts=scenario.consts_obj(),
        assumptions=assumptions,
        layer_spacing=scenario.geometry_layer_spacing,
    )
    document = {
        "convention": scenario.convention.value,
        "n_site": budget.signal.n_site,
        "signal": {
            "delta_z_m": budget.signal.delta_z,
            "delta_nu_hz": budget.signal.delta_nu,
            "fractional": budget.signal.fractional,
        },
        "requirements": {
            "allowed_b_gradient_g_per_m": budget.allowed_b_gradient,
            "p2_calibration_shift_hz": budget.p2_calibration_shift_hz,
            "allowed_e_gradient_v_per_m2": budget.allowed_e_gradient,
            "temperature_uniformity_k": budget.temperature_limit_k,
        },
        "lattice_intensity": {
            "computed_max_change": budget.intensity.max_change,
            "reference_change": assumptions.reference_intensity_change,
            "z_star_m": budget.intensity.z_star,
            "stationarity_residual": budget.intensity.stationarity_residual,
            "closed_form_agrees": budget.intensity.closed_form_agrees,
        },
        "bbr_example": {
            "t1_k": assumptions.base_temperature,
            "t2_k": assumptions.base_temperature + assumptions.example_temperature_step,
            "ratio_minus_one": budget.bbr_example.ratio_minus_one,
            "shift_fractional": budget.bbr_example.shift_fractional,
        },
        "entries": [
            {
                "name": entry.name,
                "shift_hz": entry.differential_shift_hz,
                "fractional": entry.fractional,
                "passes": entry.passes,
                "note": entry.note,
            }
            for entry in budget.entries
        ],
        "all_pass": budget.all_pass,
    }
    table = _budget_table(budget)
    files = {
        scenario.output_budget_json: json_text(document),
        scenario.output_budget_text: table,
    }
    return files, [], table


def _load_scenario(path: str | None) -> tuple[Scenario, str]:
    if path is None:
        scenario = Scenario()
        return scenario, serialize_scenario(scenario)
    text = Path(path).read_text(encoding="utf-8")
    return parse_scenario(text), text


def _thread_count() -> int:
    raw = os.environ.get("GRAVCLOCK_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ScenarioError(f"GRAVCLOCK_THREADS must be an integer, got {raw!r}") from None
    if value < 1:
        raise ScenarioError(f"GRAVCLOCK_THREADS must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravclock",
        description="Gravitational-redshift dephasing toolkit for optical lattice clocks",
    )
    parser.add_argument("--version", action="version", version=f"gravclock {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", metavar="FILE", help="scenario file (defaults apply)")
    common.add_argument("--out", metavar="DIR", default="out", help="output directory")
    common.add_argument(
        "--convention",
        choices=[c.value for c in Convention],
        help="override the scenario's phase-rate convention",
    )
    common.add_argument(
        "--allow-flags",
        action="store_true",
        help="exit 0 even when a solver flags non-bracketable points",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("threshold", parents=[common], help="critical lattice sizes")
    sub.add_parser("dephase-curve", parents=[common], help="phase-recovery ratio vs time")
    sub.add_parser("stability-sweep", parents=[common], help="best 1 s stability grids")
    sub.add_parser("budget", parents=[common], help="systematic-shift budget")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario, scenario_text = _load_scenario(args.scenario)
        if args.convention is not None:
            scenario = replace(scenario, convention=Convention.from_wire(args.convention))
            scenario_text = serialize_scenario(scenario)
        threads = _thread_count()

        if args.command == "threshold":
            files, flags, text = _run_threshold(scenario)
        elif args.command == "dephase-curve":
            files, flags, text = _run_dephase_curve(scenario)
        elif args.command == "stability-sweep":
            files, flags, text = _run_stability_sweep(scenario, threads)
        else:
            files, flags, text = _run_budget(scenario)
    except (ScenarioError, OSError, ValueError) as exc:
        print(f"gravclock: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    files["run_record.json"] = json_text(run_record(scenario_text, __version__, files))
    write_outputs(Path(args.out), files)
    sys.stdout.write(text)

    if flags and not args.allow_flags:
        for flag in flags:
            print(f"gravclock: flagged: {flag}", file=sys.stderr)
        return EXIT_FLAGGED
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
