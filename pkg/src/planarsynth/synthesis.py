"""Run driver: seeded SGA/FGA synthesis runs, reports, and comparisons.

A run evolves phase excitations against the mask objective and leaves a
report directory behind: convergence.csv (per-generation trace),
pattern.csv (final pattern with beam/sidelobe tags), phases.csv (best
half-vector), and summary.json (measured beam figures plus the full
configuration echo). All numbers are written in shortest round-trip
representation, so identical seeds produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from statistics import median

import numpy as np

from .adaptive_control import (
    DiversitySnapshot,
    FuzzyRuleBase,
    convergence_ratio,
    gene_diversity,
    infer,
    stagnation_counter,
)
from .array_model import ArrayGeometry, PatternSamples, PhaseVector, RectangularPatch
from .ga_engine import (
    GaParams,
    chromosome_length,
    decode,
    evaluate_population,
    init_population,
    step_generation,
)
from .pattern_objective import MaskSpec, SynthesisObjective

MODES = ("SGA", "FGA")


@dataclass(frozen=True)
class RunConfig:
    geometry: ArrayGeometry = ArrayGeometry(16, 8)
    mask: MaskSpec = MaskSpec()
    ga: GaParams = GaParams()
    mode: str = "SGA"
    trials: int = 1
    output_dir: Path = Path("out")
    grid_step_deg: float = 0.5
    phi_cut_deg: float = 0.0
    rules_file: Path | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        if self.rules_file is not None:
            object.__setattr__(self, "rules_file", Path(self.rules_file))

    def to_dict(self) -> dict:
        g = self.geometry
        patch = g.element_pattern
        return {
            "geometry": {
                "m_elems": g.m_elems,
                "n_elems": g.n_elems,
                "dx": g.dx,
                "dy": g.dy,
                "frequency_hz": g.frequency_hz,
                "element_pattern": (
                    "isotropic"
                    if patch is None
                    else {"type": "patch", "width_m": patch.width_m, "length_m": patch.length_m}
                ),
            },
            "mask": {
                "steer_deg": self.mask.steer_deg,
                "beam_lo_deg": self.mask.beam_lo_deg,
                "beam_hi_deg": self.mask.beam_hi_deg,
                "sll_db": self.mask.sll_db,
                "beamwidth_3db_deg": self.mask.beamwidth_3db_deg,
                "w1": self.mask.w1,
            },
            "ga": {
                "pop_size": self.ga.pop_size,
                "bits_per_gene": self.ga.bits_per_gene,
                "p_c": self.ga.p_c,
                "p_m": self.ga.p_m,
                "max_generations": self.ga.max_generations,
                "elitism_count": self.ga.elitism_count,
                "rng_seed": self.ga.rng_seed,
            },
            "mode": self.mode,
            "trials": self.trials,
            "output_dir": str(self.output_dir),
            "grid_step_deg": self.grid_step_deg,
            "phi_cut_deg": self.phi_cut_deg,
            "rules_file": None if self.rules_file is None else str(self.rules_file),
        }


def config_from_dict(raw: dict) -> RunConfig:
    """Build a RunConfig from a (possibly partial) dict; unknown keys are
    rejected so configuration typos fail loudly."""

    def take(node: dict, allowed: set[str], where: str) -> dict:
        unknown = set(node) - allowed
        if unknown:
            raise ValueError(f"unknown {where} fields: {sorted(unknown)}")
        return dict(node)

    defaults = RunConfig()
    raw = take(
        raw,
        {"geometry", "mask", "ga", "mode", "trials", "output_dir",
         "grid_step_deg", "phi_cut_deg", "rules_file"},
        "config",
    )

    geometry = defaults.geometry
    if "geometry" in raw:
        node = take(
            raw["geometry"],
            {"m_elems", "n_elems", "dx", "dy", "frequency_hz", "element_pattern"},
            "geometry",
        )
        pattern = node.pop("element_pattern", "isotropic")
        if pattern == "isotropic" or pattern is None:
            patch = None
        elif isinstance(pattern, dict) and pattern.get("type") == "patch":
            patch = RectangularPatch(float(pattern["width_m"]), float(pattern["length_m"]))
        else:
            raise ValueError(f"unrecognized element_pattern: {pattern!r}")
        geometry = ArrayGeometry(element_pattern=patch, **node)

    mask = defaults.mask
    if "mask" in raw:
        node = take(
            raw["mask"],
            {"steer_deg", "beam_lo_deg", "beam_hi_deg", "sll_db", "beamwidth_3db_deg", "w1"},
            "mask",
        )
        mask = MaskSpec(**node)

    ga = defaults.ga
    if "ga" in raw:
        node = take(
            raw["ga"],
            {"pop_size", "bits_per_gene", "p_c", "p_m", "max_generations",
             "elitism_count", "rng_seed"},
            "ga",
        )
        ga = GaParams(**node)

    return RunConfig(
        geometry=geometry,
        mask=mask,
        ga=ga,
        mode=raw.get("mode", defaults.mode),
        trials=raw.get("trials", defaults.trials),
        output_dir=Path(raw.get("output_dir", defaults.output_dir)),
        grid_step_deg=raw.get("grid_step_deg", defaults.grid_step_deg),
        phi_cut_deg=raw.get("phi_cut_deg", defaults.phi_cut_deg),
        rules_file=raw.get("rules_file"),
    )


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    d_gw: float
    number: int
    p_c: float
    p_m: float


@dataclass(frozen=True)
class PatternMeasurement:
    """Beam figures measured on the final synthesized pattern."""

    peak_deg: float
    beamwidth_3db_deg: float
    max_sll_db: float
    peak_ambiguous: bool = False


@dataclass(eq=False)
class RunReport:
    config: RunConfig
    records: list[GenerationRecord]
    initial_best_fitness: float
    best_phases: PhaseVector
    final_pattern: PatternSamples
    measurement: PatternMeasurement

    @property
    def final_best_fitness(self) -> float:
        return self.records[-1].best_fitness

    @property
    def best_fitness_series(self) -> list[float]:
        return [r.best_fitness for r in self.records]


def _interp_crossing(theta0, v0, theta1, v1, level):
    return theta0 + (theta1 - theta0) * (level - v0) / (v1 - v0)


def measure_pattern(p: PatternSamples, steer_deg: float | None = None) -> PatternMeasurement:
    """Locate the 0 dB peak, the -3 dB width around it, and the highest
    sidelobe sample.

    Ties for the peak are resolved toward steer_deg (or the beam-window
    center when no steer is given) and flagged as ambiguous. The -3 dB
    edges are linearly interpolated between grid samples; a beam running
    into the grid edge uses the edge angle.
    """
    theta = p.angles_deg
    vals = p.values_db
    peak_val = vals.max()
    candidates = np.flatnonzero(vals >= peak_val - 1e-12)
    if steer_deg is None:
        if p.beam_span is not None:
            lo, hi = p.beam_span
            reference = 0.5 * (theta[lo] + theta[hi - 1])
        else:
            reference = 0.0
    else:
        reference = steer_deg
    peak_idx = int(candidates[np.argmin(np.abs(theta[candidates] - reference))])
    ambiguous = candidates.size > 1

    level = peak_val - 3.0
    left = theta[0]
    for i in range(peak_idx, 0, -1):
        if vals[i - 1] < level:
            left = _interp_crossing(theta[i - 1], vals[i - 1], theta[i], vals[i], level)
            break
    right = theta[-1]
    for i in range(peak_idx, vals.size - 1):
        if vals[i + 1] < level:
            right = _interp_crossing(theta[i], vals[i], theta[i + 1], vals[i + 1], level)
            break

    max_sll = float(p.sidelobe_values.max())
    return PatternMeasurement(float(theta[peak_idx]), float(right - left), max_sll, ambiguous)


def run_synthesis(cfg: RunConfig, write: bool = True) -> RunReport:
    """Execute one seeded run and (by default) write its report directory.

    In FGA mode the controller reads a diversity snapshot of the current
    population before every variation step and supplies that generation's
    (p_c, p_m); in SGA mode the configured constants are used throughout.
    """
    objective = SynthesisObjective(
        cfg.geometry, cfg.mask, cfg.grid_step_deg, cfg.phi_cut_deg
    )
    bits_per_gene = cfg.ga.bits_per_gene

    def evaluate(chromosome):
        return objective(decode(chromosome, cfg.geometry, bits_per_gene))

    rules = None
    if cfg.mode == "FGA":
        rules = (
            FuzzyRuleBase.default()
            if cfg.rules_file is None
            else FuzzyRuleBase.from_file(cfg.rules_file)
        )

    pop = init_population(cfg.ga, chromosome_length(cfg.geometry, bits_per_gene))
    evaluate_population(pop, evaluate)
    initial_best = pop.best_ever.fitness
    best_history = [initial_best]

    records: list[GenerationRecord] = []
    for _ in range(cfg.ga.max_generations):
        if rules is not None:
            snapshot = DiversitySnapshot(
                gene_diversity(pop),
                convergence_ratio(pop),
                stagnation_counter(best_history),
            )
            p_c, p_m = infer(snapshot, rules)
        else:
            p_c, p_m = cfg.ga.p_c, cfg.ga.p_m
        pop = step_generation(pop, cfg.ga, evaluate, p_c, p_m)
        best_history.append(pop.best_ever.fitness)
        records.append(
            GenerationRecord(
                pop.generation,
                pop.best_ever.fitness,
                pop.mean_fitness(),
                gene_diversity(pop),
                stagnation_counter(best_history),
                p_c,
                p_m,
            )
        )

    best_pv = decode(pop.best_ever, cfg.geometry, bits_per_gene)
    final_pattern = objective.pattern(best_pv)
    measurement = measure_pattern(final_pattern, cfg.mask.steer_deg)
    report = RunReport(cfg, records, initial_best, best_pv, final_pattern, measurement)
    if write:
        write_report(report, cfg.output_dir)
    return report


def generations_to_90pct(best_series, initial_best: float) -> int:
    """First recorded generation reaching 90% of the run's total
    improvement over the initial population's best."""
    series = list(best_series)
    final = series[-1]
    threshold = final - 0.1 * (final - initial_best)
    for i, value in enumerate(series):
        if value >= threshold:
            return i + 1
    return len(series)


# --- report I/O -----------------------------------------------------------

_CONV_HEADER = "generation,best_fitness,mean_fitness,d_gw,number,p_c,p_m"


def write_report(report: RunReport, out_dir) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    lines = [_CONV_HEADER]
    for r in report.records:
        lines.append(
            f"{r.generation},{r.best_fitness!r},{r.mean_fitness!r},"
            f"{r.d_gw!r},{r.number},{r.p_c!r},{r.p_m!r}"
        )
    (out_dir / "convergence.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    p = report.final_pattern
    beam = ~p.sidelobe_mask()
    lines = ["theta_deg,value_db,region"]
    for theta, val, in_beam in zip(p.angles_deg, p.values_db, beam):
        lines.append(f"{theta!r},{val!r},{'beam' if in_beam else 'sidelobe'}")
    (out_dir / "pattern.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    lines = ["axis,index,phase_rad"]
    for axis, half in (("x", report.best_phases.x_half), ("y", report.best_phases.y_half)):
        for i, phase in enumerate(half, start=1):
            lines.append(f"{axis},{i},{phase!r}")
    (out_dir / "phases.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    m = report.measurement
    summary = {
        "mode": report.config.mode,
        "seed": report.config.ga.rng_seed,
        "generations": len(report.records),
        "initial_best_fitness": report.initial_best_fitness,
        "final_best_fitness": report.final_best_fitness,
        "generations_to_90pct": generations_to_90pct(
            report.best_fitness_series, report.initial_best_fitness
        ),
        "peak_deg": m.peak_deg,
        "beamwidth_3db_deg": m.beamwidth_3db_deg,
        "max_sll_db": m.max_sll_db,
        "peak_ambiguous": m.peak_ambiguous,
        "config": report.config.to_dict(),
    }
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_report(out_dir) -> RunReport:
    """Rebuild a RunReport from a report directory written by write_report."""
    out_dir = Path(out_dir)
    summary = json.loads((out_dir / "summary.json").read_text(encoding="utf-8"))
    cfg = config_from_dict(summary["config"])

    records = []
    conv_lines = (out_dir / "convergence.csv").read_text(encoding="utf-8").strip().split("\n")
    if conv_lines[0] != _CONV_HEADER:
        raise ValueError(f"unexpected convergence.csv header: {conv_lines[0]!r}")
    for line in conv_lines[1:]:
        gen, best, mean, d_gw, number, p_c, p_m = line.split(",")
        records.append(
            GenerationRecord(
                int(gen), float(best), float(mean), float(d_gw),
                int(number), float(p_c), float(p_m),
            )
        )

    angles, values, beam_flags = [], [], []
    pat_lines = (out_dir / "pattern.csv").read_text(encoding="utf-8").strip().split("\n")
    for line in pat_lines[1:]:
        theta, val, region = line.split(",")
        angles.append(float(theta))
        values.append(float(val))
        beam_flags.append(region == "beam")
    beam_idx = np.flatnonzero(beam_flags)
    span = (int(beam_idx[0]), int(beam_idx[-1]) + 1) if beam_idx.size else None
    pattern = PatternSamples(np.asarray(angles), np.asarray(values), span)

    x_half, y_half = [], []
    for line in (out_dir / "phases.csv").read_text(encoding="utf-8").strip().split("\n")[1:]:
        axis, _, phase = line.split(",")
        (x_half if axis == "x" else y_half).append(float(phase))

    measurement = PatternMeasurement(
        summary["peak_deg"],
        summary["beamwidth_3db_deg"],
        summary["max_sll_db"],
        summary["peak_ambiguous"],
    )
    return RunReport(
        cfg,
        records,
        summary["initial_best_fitness"],
        PhaseVector(np.asarray(x_half), np.asarray(y_half)),
        pattern,
        measurement,
    )


# --- paired campaigns -----------------------------------------------------

_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def derive_trial_seeds(campaign_seed: int, n: int) -> list[int]:
    """Splitmix64 stream from the campaign seed: trial k gets output k.

    Keeps trials statistically independent while the whole campaign stays
    reproducible from one integer.
    """
    seeds = []
    state = campaign_seed & _MASK64
    for _ in range(n):
        state = (state + _SPLITMIX_GAMMA) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        seeds.append(z ^ (z >> 31))
    return seeds


@dataclass(frozen=True)
class TrialComparison:
    seed: int
    a_final: float
    b_final: float
    a_g90: int
    b_g90: int
    a_measurement: PatternMeasurement
    b_measurement: PatternMeasurement

    @property
    def winner(self) -> str:
        if self.a_final > self.b_final:
            return "a"
        if self.b_final > self.a_final:
            return "b"
        return "tie"


@dataclass(eq=False)
class CampaignSummary:
    mode_a: str
    mode_b: str
    trials: list[TrialComparison]
    reports_a: list[RunReport]
    reports_b: list[RunReport]

    @property
    def median_final_a(self) -> float:
        return median(t.a_final for t in self.trials)

    @property
    def median_final_b(self) -> float:
        return median(t.b_final for t in self.trials)

    @property
    def median_g90_a(self) -> float:
        return median(t.a_g90 for t in self.trials)

    @property
    def median_g90_b(self) -> float:
        return median(t.b_g90 for t in self.trials)

    def wins(self, slot: str) -> int:
        return sum(1 for t in self.trials if t.winner == slot)


def compare_campaign(
    cfg_a: RunConfig,
    cfg_b: RunConfig,
    trials: int,
    campaign_seed: int,
    output_dir=None,
) -> CampaignSummary:
    """Run both configurations on paired per-trial seeds and summarize.

    The two configurations must agree on geometry, mask, and search budget
    so the comparison is apples to apples.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if cfg_a.geometry != cfg_b.geometry or cfg_a.mask != cfg_b.mask:
        raise ValueError("compared configurations must share geometry and mask")
    budget_a = (cfg_a.ga.pop_size, cfg_a.ga.max_generations, cfg_a.ga.bits_per_gene)
    budget_b = (cfg_b.ga.pop_size, cfg_b.ga.max_generations, cfg_b.ga.bits_per_gene)
    if budget_a != budget_b or cfg_a.grid_step_deg != cfg_b.grid_step_deg:
        raise ValueError("compared configurations must share the search budget")

    out = None if output_dir is None else Path(output_dir)
    results: list[TrialComparison] = []
    reports_a: list[RunReport] = []
    reports_b: list[RunReport] = []
    for seed in derive_trial_seeds(campaign_seed, trials):
        pair = []
        for slot, cfg in (("a", cfg_a), ("b", cfg_b)):
            trial_dir = (
                out / f"{slot}_{cfg.mode.lower()}_seed{seed}" if out is not None else cfg.output_dir
            )
            trial_cfg = replace(
                cfg, ga=replace(cfg.ga, rng_seed=seed), output_dir=trial_dir
            )
            pair.append(run_synthesis(trial_cfg, write=out is not None))
        rep_a, rep_b = pair
        reports_a.append(rep_a)
        reports_b.append(rep_b)
        results.append(
            TrialComparison(
                seed,
                rep_a.final_best_fitness,
                rep_b.final_best_fitness,
                generations_to_90pct(rep_a.best_fitness_series, rep_a.initial_best_fitness),
                generations_to_90pct(rep_b.best_fitness_series, rep_b.initial_best_fitness),
                rep_a.measurement,
                rep_b.measurement,
            )
        )

    summary = CampaignSummary(cfg_a.mode, cfg_b.mode, results, reports_a, reports_b)
    if out is not None:
        write_campaign(summary, out)
    return summary


def write_campaign(summary: CampaignSummary, out_dir) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [
        "seed,a_final,b_final,a_g90,b_g90,a_peak_deg,b_peak_deg,"
        "a_beamwidth_deg,b_beamwidth_deg,a_max_sll_db,b_max_sll_db,winner"
    ]
    for t in summary.trials:
        ma, mb = t.a_measurement, t.b_measurement
        lines.append(
            f"{t.seed},{t.a_final!r},{t.b_final!r},{t.a_g90},{t.b_g90},"
            f"{ma.peak_deg!r},{mb.peak_deg!r},{ma.beamwidth_3db_deg!r},"
            f"{mb.beamwidth_3db_deg!r},{ma.max_sll_db!r},{mb.max_sll_db!r},{t.winner}"
        )
    (out_dir / "campaign.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    payload = {
        "mode_a": summary.mode_a,
        "mode_b": summary.mode_b,
        "trials": len(summary.trials),
        "median_final_a": summary.median_final_a,
        "median_final_b": summary.median_final_b,
        "median_g90_a": summary.median_g90_a,
        "median_g90_b": summary.median_g90_b,
        "wins_a": summary.wins("a"),
        "wins_b": summary.wins("b"),
        "ties": summary.wins("tie"),
    }
    (out_dir / "campaign_summary.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
