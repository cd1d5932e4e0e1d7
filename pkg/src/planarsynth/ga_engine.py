"""Binary generational genetic algorithm.

Each individual encodes one candidate array: a bit chain per phase (gene),
x-axis genes first, then y-axis genes. Selection is fitness-proportionate
roulette on min-shifted fitness, variation is one-point crossover plus
independent bit flips, and elitism copies the best individuals unchanged.
Crossover/mutation probabilities are passed per generation so a controller
can retune them while the engine stays oblivious to where they come from.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .array_model import ArrayGeometry, PhaseVector

#: Keeps roulette weights positive when fitness ties the population minimum.
WEIGHT_EPS = 1e-9


@dataclass(eq=False)
class Chromosome:
    """Fixed-length bit string with a cached fitness.

    The cache is only valid for the exact bits it was computed from;
    operators that change bits must clear it.
    """

    bits: np.ndarray
    fitness: float | None = None

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.uint8)
        if self.bits.ndim != 1 or self.bits.size == 0:
            raise ValueError("bits must be a non-empty 1-D array")
        if np.any(self.bits > 1):
            raise ValueError("bits must be 0 or 1")

    def copy(self) -> "Chromosome":
        return Chromosome(self.bits.copy(), self.fitness)


@dataclass(frozen=True)
class GaParams:
    pop_size: int = 40
    bits_per_gene: int = 8
    p_c: float = 0.71
    p_m: float = 0.02
    max_generations: int = 200
    elitism_count: int = 1
    rng_seed: int = 1

    def __post_init__(self):
        if self.pop_size <= 0 or self.pop_size % 2:
            raise ValueError("pop_size must be a positive even number")
        if self.bits_per_gene <= 0:
            raise ValueError("bits_per_gene must be positive")
        if not (0.0 <= self.p_c <= 1.0 and 0.0 <= self.p_m <= 1.0):
            raise ValueError("probabilities must lie in [0, 1]")
        if self.max_generations <= 0:
            raise ValueError("max_generations must be positive")
        if not (0 <= self.elitism_count < self.pop_size):
            raise ValueError("elitism_count must be in [0, pop_size)")


@dataclass(eq=False)
class Population:
    """One generation of individuals plus the run's RNG and best-ever copy."""

    individuals: list[Chromosome]
    rng: np.random.Generator
    generation: int = 0
    best_ever: Chromosome | None = None

    def bits_matrix(self) -> np.ndarray:
        return np.stack([c.bits for c in self.individuals])

    def fitness_values(self) -> np.ndarray:
        vals = [c.fitness for c in self.individuals]
        if any(v is None for v in vals):
            raise ValueError("population has unevaluated individuals")
        return np.asarray(vals, dtype=float)

    def best(self) -> Chromosome:
        return max(self.individuals, key=lambda c: -np.inf if c.fitness is None else c.fitness)

    def mean_fitness(self) -> float:
        return float(np.mean(self.fitness_values()))


def chromosome_length(g: ArrayGeometry, bits_per_gene: int) -> int:
    return bits_per_gene * (g.m_elems // 2 + g.n_elems // 2)


def decode(c: Chromosome, g: ArrayGeometry, bits_per_gene: int) -> PhaseVector:
    """Map each gene's unsigned value v to the phase -pi + v*2*pi/2^b.

    Bits are MSB first, so 10000000 decodes to exactly 0 for b=8. Genes
    are ordered x-half then y-half.
    """
    expected = chromosome_length(g, bits_per_gene)
    if c.bits.size != expected:
        raise ValueError(f"chromosome length {c.bits.size}, expected {expected}")
    genes = c.bits.reshape(-1, bits_per_gene)
    weights = 2 ** np.arange(bits_per_gene - 1, -1, -1, dtype=np.int64)
    values = genes @ weights
    phases = -np.pi + values * (2.0 * np.pi / 2**bits_per_gene)
    n_x = g.m_elems // 2
    return PhaseVector(phases[:n_x], phases[n_x:])


def init_population(params: GaParams, length: int) -> Population:
    """Uniform random population; owns the generator seeded from params."""
    rng = np.random.default_rng(params.rng_seed)
    individuals = [
        Chromosome(rng.integers(0, 2, size=length, dtype=np.uint8))
        for _ in range(params.pop_size)
    ]
    return Population(individuals, rng)


def evaluate_population(pop: Population, evaluate) -> None:
    """Fill missing fitness caches and refresh the best-ever copy."""
    for c in pop.individuals:
        if c.fitness is None:
            c.fitness = float(evaluate(c))
    best = pop.best()
    if pop.best_ever is None or best.fitness > pop.best_ever.fitness:
        pop.best_ever = best.copy()


def selection_weights(fitnesses: np.ndarray, eps: float = WEIGHT_EPS) -> np.ndarray:
    """Min-shifted positive roulette weights; dB fitness can be negative."""
    f = np.asarray(fitnesses, dtype=float)
    return f - f.min() + eps


def weighted_pick(weights: np.ndarray, rng: np.random.Generator) -> int:
    """Draw an index with probability proportional to its weight."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or w.sum() <= 0:
        raise ValueError("weights must be non-negative with positive sum")
    cum = np.cumsum(w)
    return int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))


def roulette_select(pop: Population, rng: np.random.Generator) -> Chromosome:
    """Fitness-proportionate pick; equal fitness degrades to uniform."""
    idx = weighted_pick(selection_weights(pop.fitness_values()), rng)
    return pop.individuals[idx]


def one_point_crossover(
    a: Chromosome, b: Chromosome, p_c: float, rng: np.random.Generator
) -> tuple[Chromosome, Chromosome]:
    """With probability p_c swap suffixes at a uniform cut in [1, L-1];
    otherwise return plain copies. Children start with cleared caches."""
    if a.bits.size != b.bits.size:
        raise ValueError("parents must have equal length")
    if rng.random() < p_c:
        cut = int(rng.integers(1, a.bits.size))
        child1 = np.concatenate([a.bits[:cut], b.bits[cut:]])
        child2 = np.concatenate([b.bits[:cut], a.bits[cut:]])
        return Chromosome(child1), Chromosome(child2)
    return Chromosome(a.bits.copy()), Chromosome(b.bits.copy())


def bitflip_mutate(c: Chromosome, p_m: float, rng: np.random.Generator) -> Chromosome:
    """Flip each bit independently with probability p_m. The cache survives
    only if nothing flipped."""
    if not 0.0 <= p_m <= 1.0:
        raise ValueError("p_m must lie in [0, 1]")
    flips = rng.random(c.bits.size) < p_m
    if not flips.any():
        return c.copy()
    return Chromosome(c.bits ^ flips.astype(np.uint8))


def step_generation(
    pop: Population,
    params: GaParams,
    evaluate,
    p_c: float | None = None,
    p_m: float | None = None,
) -> Population:
    """Produce and evaluate the next generation.

    Elites are copied unchanged, then select/crossover/mutate fills the
    rest. All stochastic draws happen sequentially on the population's
    generator before any evaluation, so evaluation order cannot perturb
    replay determinism.
    """
    p_c = params.p_c if p_c is None else p_c
    p_m = params.p_m if p_m is None else p_m
    fitnesses = pop.fitness_values()  # also guards the evaluated-pop precondition

    order = sorted(range(len(pop.individuals)), key=lambda i: (-fitnesses[i], i))
    next_gen = [pop.individuals[i].copy() for i in order[: params.elitism_count]]

    while len(next_gen) < params.pop_size:
        parent_a = roulette_select(pop, pop.rng)
        parent_b = roulette_select(pop, pop.rng)
        child_a, child_b = one_point_crossover(parent_a, parent_b, p_c, pop.rng)
        next_gen.append(bitflip_mutate(child_a, p_m, pop.rng))
        if len(next_gen) < params.pop_size:
            next_gen.append(bitflip_mutate(child_b, p_m, pop.rng))

    new_pop = Population(next_gen, pop.rng, pop.generation + 1, pop.best_ever)
    evaluate_population(new_pop, evaluate)
    return new_pop
