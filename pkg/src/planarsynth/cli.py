"""Command-line entry points.

Subcommands:
  run      one seeded synthesis run (SGA or FGA), writes a report directory
  compare  paired SGA-vs-FGA campaign over derived trial seeds
  pattern  evaluate a given phase half-vector and write its pattern
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .array_model import PhaseVector, wrap_phase
from .pattern_objective import SynthesisObjective
from .synthesis import (
    RunConfig,
    compare_campaign,
    load_config,
    measure_pattern,
    run_synthesis,
)


def _base_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, ga=replace(cfg.ga, rng_seed=args.seed))
    if getattr(args, "mode", None) is not None:
        cfg = replace(cfg, mode=args.mode)
    if getattr(args, "output_dir", None) is not None:
        cfg = replace(cfg, output_dir=Path(args.output_dir))
    if getattr(args, "rules_file", None) is not None:
        cfg = replace(cfg, rules_file=Path(args.rules_file))
    if getattr(args, "trials", None) is not None:
        cfg = replace(cfg, trials=args.trials)
    return cfg


def _cmd_run(args) -> int:
    cfg = _base_config(args)
    report = run_synthesis(cfg)
    m = report.measurement
    print(f"mode={cfg.mode} seed={cfg.ga.rng_seed} generations={len(report.records)}")
    print(f"final best fitness: {report.final_best_fitness:.4f}")
    print(
        f"peak {m.peak_deg:.2f} deg, 3 dB beamwidth {m.beamwidth_3db_deg:.2f} deg, "
        f"max SLL {m.max_sll_db:.2f} dB"
    )
    print(f"report written to {cfg.output_dir}")
    return 0


def _cmd_compare(args) -> int:
    cfg = _base_config(args)
    sga = replace(cfg, mode="SGA")
    fga = replace(cfg, mode="FGA")
    seed = args.seed if args.seed is not None else cfg.ga.rng_seed
    summary = compare_campaign(sga, fga, cfg.trials, seed, cfg.output_dir)
    print(f"paired trials: {len(summary.trials)} (campaign seed {seed})")
    print(
        f"median final fitness: SGA {summary.median_final_a:.4f} "
        f"vs FGA {summary.median_final_b:.4f}"
    )
    print(
        f"median generations to 90% improvement: SGA {summary.median_g90_a:.1f} "
        f"vs FGA {summary.median_g90_b:.1f}"
    )
    print(
        f"per-seed wins: SGA {summary.wins('a')}, FGA {summary.wins('b')}, "
        f"ties {summary.wins('tie')}"
    )
    print(f"campaign written to {cfg.output_dir}")
    return 0


def _cmd_pattern(args) -> int:
    cfg = _base_config(args)
    with open(args.phases_file, encoding="utf-8") as fh:
        raw = json.load(fh)
    pv = PhaseVector(
        wrap_phase(np.asarray(raw["x_half"], dtype=float)),
        wrap_phase(np.asarray(raw["y_half"], dtype=float)),
    )
    objective = SynthesisObjective(cfg.geometry, cfg.mask, cfg.grid_step_deg, cfg.phi_cut_deg)
    pattern = objective.pattern(pv)
    m = measure_pattern(pattern, cfg.mask.steer_deg)

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    beam = ~pattern.sidelobe_mask()
    lines = ["theta_deg,value_db,region"]
    for theta, val, in_beam in zip(pattern.angles_deg, pattern.values_db, beam):
        lines.append(f"{theta!r},{val!r},{'beam' if in_beam else 'sidelobe'}")
    (out / "pattern.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    payload = {
        "fitness": objective(pv),
        "peak_deg": m.peak_deg,
        "beamwidth_3db_deg": m.beamwidth_3db_deg,
        "max_sll_db": m.max_sll_db,
        "peak_ambiguous": m.peak_ambiguous,
        "config": cfg.to_dict(),
    }
    (out / "summary.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(
        f"peak {m.peak_deg:.2f} deg, 3 dB beamwidth {m.beamwidth_3db_deg:.2f} deg, "
        f"max SLL {m.max_sll_db:.2f} dB"
    )
    print(f"pattern written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planarsynth",
        description="Phase-only planar array synthesis with SGA/FGA optimizers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_mode=False, with_trials=False):
        p.add_argument("--config", help="JSON run configuration (defaults used if omitted)")
        p.add_argument("--seed", type=int, help="override the RNG seed")
        p.add_argument("--output-dir", help="override the report directory")
        if with_mode:
            p.add_argument("--mode", choices=["SGA", "FGA"], help="override the optimizer mode")
            p.add_argument("--rules-file", help="custom fuzzy rule table (JSON)")
        if with_trials:
            p.add_argument("--trials", type=int, help="number of paired trials")

    p_run = sub.add_parser("run", help="run one synthesis")
    common(p_run, with_mode=True)
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare", help="paired SGA vs FGA campaign")
    common(p_cmp, with_trials=True)
    p_cmp.add_argument("--rules-file", help="custom fuzzy rule table (JSON)")
    p_cmp.set_defaults(func=_cmd_compare)

    p_pat = sub.add_parser("pattern", help="evaluate a phase vector")
    common(p_pat)
    p_pat.add_argument(
        "--phases-file",
        required=True,
        help='JSON file with {"x_half": [...], "y_half": [...]} phases in radians',
    )
    p_pat.set_defaults(func=_cmd_pattern)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
