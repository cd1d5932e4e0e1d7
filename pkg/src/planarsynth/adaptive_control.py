"""Population measurements and the fuzzy controller for (p_c, p_m).

Three measurements describe the state of a GA run: the gene inner
diversity (mean per-bit variance of the population's genome), the
mean-to-best fitness ratio after a min-shift, and the count of
consecutive generations without improvement. A Mamdani-style controller
maps them to crossover and mutation probabilities each generation: it
raises mutation and lowers crossover as the population converges or
stagnates, and does the opposite while diversity is healthy.

The membership functions and rule table live in a JSON data file
(data/flc_rules.json) so the policy is inspectable and swappable; see
FuzzyRuleBase.from_file for the schema.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .ga_engine import Population

#: Points used to discretize each output range for centroid defuzzification.
DEFUZZ_RESOLUTION = 1001

#: A best-fitness gain below this does not count as an improvement.
IMPROVEMENT_EPS = 1e-12

_RATIO_EPS = 1e-9


@dataclass(frozen=True)
class DiversitySnapshot:
    """Controller inputs, clamped to their configured ranges on construction."""

    d_gw: float
    fbar_over_fmax: float
    number: int

    def __post_init__(self):
        object.__setattr__(self, "d_gw", float(min(max(self.d_gw, 0.0), 0.25)))
        object.__setattr__(
            self, "fbar_over_fmax", float(min(max(self.fbar_over_fmax, 0.0), 1.0))
        )
        object.__setattr__(self, "number", int(min(max(self.number, 0), 30)))


def _bits_of(pop) -> np.ndarray:
    bits = pop.bits_matrix() if isinstance(pop, Population) else np.asarray(pop)
    if bits.ndim != 2 or bits.size == 0:
        raise ValueError("population must be a non-empty set of equal-length strings")
    return bits.astype(float)


def gene_average(pop) -> np.ndarray:
    """Per-bit-position mean over the population; each entry in [0, 1]."""
    return _bits_of(pop).mean(axis=0)


def gene_diversity(pop) -> float:
    """Gene inner diversity: mean squared deviation of every bit from its
    positional average. Zero for clones; at most 0.25 (all-maximal per-bit
    variance), matching the controller's input range."""
    bits = _bits_of(pop)
    return float(np.mean((bits - bits.mean(axis=0)) ** 2))


def convergence_ratio(pop) -> float:
    """Mean-to-best fitness ratio after shifting by the population minimum.

    Raw dB fitness can be negative, so both numerator and denominator are
    measured from the population minimum; the ratio is clamped to [0, 1]
    and a fully converged (all-equal) population maps to 1.
    """
    if isinstance(pop, Population):
        f = pop.fitness_values()
    else:
        f = np.asarray(pop, dtype=float)
    if f.size == 0:
        raise ValueError("population is empty")
    shifted = f - f.min() + _RATIO_EPS
    return float(min(max(shifted.mean() / shifted.max(), 0.0), 1.0))


def stagnation_counter(best_history) -> int:
    """Consecutive most-recent generations without a strict improvement in
    best fitness, clamped to the controller's [0, 30] input range."""
    h = list(best_history)
    if not h:
        raise ValueError("best-fitness history is empty")
    count = 0
    for prev, cur in zip(reversed(h[:-1]), reversed(h[1:])):
        if cur > prev + IMPROVEMENT_EPS:
            break
        count += 1
        if count >= 30:
            break
    return min(count, 30)


def triangular(x, a: float, b: float, c: float):
    """Triangular membership with peak b; a == b or b == c makes the
    corresponding side a vertical edge (range-endpoint terms)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    if a < b:
        rising = (x > a) & (x < b)
        out[rising] = (x[rising] - a) / (b - a)
    if b < c:
        falling = (x > b) & (x < c)
        out[falling] = (c - x[falling]) / (c - b)
    out[x == b] = 1.0
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class FuzzyVariable:
    """A linguistic variable: ordered terms with triangular memberships.

    Each term peaks at its listed position and falls to zero at the
    neighboring peaks; the first and last peak at the range endpoints, so
    memberships of an in-range point always sum to 1.
    """

    name: str
    lo: float
    hi: float
    term_names: tuple[str, ...]
    peaks: tuple[float, ...]

    def __post_init__(self):
        if len(self.term_names) != len(self.peaks) or len(self.term_names) < 2:
            raise ValueError(f"{self.name}: need >= 2 terms with matching peaks")
        if self.lo >= self.hi:
            raise ValueError(f"{self.name}: empty range")
        if list(self.peaks) != sorted(self.peaks):
            raise ValueError(f"{self.name}: term peaks must be ascending")
        if self.peaks[0] != self.lo or self.peaks[-1] != self.hi:
            raise ValueError(f"{self.name}: outer peaks must sit on the range endpoints")

    def _abc(self, k: int) -> tuple[float, float, float]:
        a = self.peaks[k - 1] if k > 0 else self.peaks[0]
        c = self.peaks[k + 1] if k + 1 < len(self.peaks) else self.peaks[-1]
        return a, self.peaks[k], c

    def term_membership(self, term: str, x):
        return triangular(x, *self._abc(self.term_names.index(term)))

    def fuzzify(self, x: float) -> dict[str, float]:
        """Membership degree of x (clamped into range) for every term."""
        x = min(max(float(x), self.lo), self.hi)
        return {
            name: float(self.term_membership(name, x)) for name in self.term_names
        }


def fuzzify(x: float, variable: FuzzyVariable) -> dict[str, float]:
    return variable.fuzzify(x)


@dataclass(frozen=True)
class FuzzyRule:
    """IF diversity/ratio/stagnation terms THEN p_c/p_m terms."""

    antecedent: tuple[str, str, str]
    consequent: tuple[str, str]


@dataclass(frozen=True)
class FuzzyRuleBase:
    diversity: FuzzyVariable
    ratio: FuzzyVariable
    stagnation: FuzzyVariable
    p_c: FuzzyVariable
    p_m: FuzzyVariable
    rules: tuple[FuzzyRule, ...]

    def __post_init__(self):
        known = {
            0: set(self.diversity.term_names),
            1: set(self.ratio.term_names),
            2: set(self.stagnation.term_names),
        }
        fired = set()
        for rule in self.rules:
            for pos, term in enumerate(rule.antecedent):
                if term not in known[pos]:
                    raise ValueError(f"rule references unknown input term {term!r}")
            if rule.consequent[0] not in self.p_c.term_names:
                raise ValueError(f"unknown p_c term {rule.consequent[0]!r}")
            if rule.consequent[1] not in self.p_m.term_names:
                raise ValueError(f"unknown p_m term {rule.consequent[1]!r}")
            fired.add(rule.antecedent)
        # Every input-term combination must fire at least one rule, which
        # together with endpoint-anchored memberships guarantees nonzero
        # aggregate everywhere.
        missing = {
            (d, r, n)
            for d in self.diversity.term_names
            for r in self.ratio.term_names
            for n in self.stagnation.term_names
        } - fired
        if missing:
            raise ValueError(f"rule table leaves input combinations unmapped: {sorted(missing)}")

    @classmethod
    def from_dict(cls, spec: dict) -> "FuzzyRuleBase":
        def variable(name: str, node: dict) -> FuzzyVariable:
            terms = sorted(node["terms"].items(), key=lambda kv: kv[1])
            return FuzzyVariable(
                name,
                float(node["range"][0]),
                float(node["range"][1]),
                tuple(k for k, _ in terms),
                tuple(float(v) for _, v in terms),
            )

        rules = tuple(
            FuzzyRule(
                (r["diversity"], r["ratio"], r["stagnation"]),
                (r["p_c"], r["p_m"]),
            )
            for r in spec["rules"]
        )
        return cls(
            variable("diversity", spec["inputs"]["diversity"]),
            variable("ratio", spec["inputs"]["ratio"]),
            variable("stagnation", spec["inputs"]["stagnation"]),
            variable("p_c", spec["outputs"]["p_c"]),
            variable("p_m", spec["outputs"]["p_m"]),
            rules,
        )

    @classmethod
    def from_file(cls, path) -> "FuzzyRuleBase":
        """Load a rule base from JSON.

        Schema: {"inputs": {"diversity"|"ratio"|"stagnation":
        {"range": [lo, hi], "terms": {name: peak, ...}}}, "outputs":
        {"p_c"|"p_m": same}, "rules": [{"diversity": term, "ratio": term,
        "stagnation": term, "p_c": term, "p_m": term}, ...]}.
        """
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def default(cls) -> "FuzzyRuleBase":
        ref = resources.files("planarsynth").joinpath("data/flc_rules.json")
        return cls.from_dict(json.loads(ref.read_text(encoding="utf-8")))


def _defuzzify(var: FuzzyVariable, strengths: dict[str, float]) -> float:
    """Centroid of the aggregated output set.

    Each fired term is scaled by its strength and terms combine by max;
    scaling keeps a lone term's centroid fixed regardless of strength,
    which makes the policy's p_m response monotone in the inputs.
    """
    xs = np.linspace(var.lo, var.hi, DEFUZZ_RESOLUTION)
    agg = np.zeros_like(xs)
    for term, strength in strengths.items():
        if strength > 0.0:
            np.maximum(agg, strength * var.term_membership(term, xs), out=agg)
    total = agg.sum()
    if total <= 0.0:
        return 0.5 * (var.lo + var.hi)
    return float(min(max((xs * agg).sum() / total, var.lo), var.hi))


def infer(snapshot: DiversitySnapshot, rules: FuzzyRuleBase) -> tuple[float, float]:
    """Run the controller: min-AND firing, per-term max aggregation,
    centroid defuzzification. Returns (p_c, p_m) within their ranges."""
    degrees = (
        rules.diversity.fuzzify(snapshot.d_gw),
        rules.ratio.fuzzify(snapshot.fbar_over_fmax),
        rules.stagnation.fuzzify(float(snapshot.number)),
    )
    pc_strength: dict[str, float] = {}
    pm_strength: dict[str, float] = {}
    for rule in rules.rules:
        strength = min(degrees[i][term] for i, term in enumerate(rule.antecedent))
        if strength <= 0.0:
            continue
        pc_term, pm_term = rule.consequent
        pc_strength[pc_term] = max(pc_strength.get(pc_term, 0.0), strength)
        pm_strength[pm_term] = max(pm_strength.get(pm_term, 0.0), strength)
    return _defuzzify(rules.p_c, pc_strength), _defuzzify(rules.p_m, pm_strength)
