"""Phase-only planar antenna array synthesis with standard and
fuzzy-adaptive genetic algorithms."""

from .array_model import (
    AngleGrid,
    ArrayGeometry,
    PatternSamples,
    PhaseVector,
    RectangularPatch,
    array_factor_bruteforce,
    array_factor_separable,
    element_pattern,
    expand_symmetric,
    wrap_phase,
)
from .pattern_objective import (
    GridPartition,
    MaskSpec,
    SynthesisObjective,
    beam_average,
    fitness,
    sample_grid,
    sidelobe_margin,
)
from .ga_engine import (
    Chromosome,
    GaParams,
    Population,
    bitflip_mutate,
    chromosome_length,
    decode,
    evaluate_population,
    init_population,
    one_point_crossover,
    roulette_select,
    step_generation,
)
from .adaptive_control import (
    DiversitySnapshot,
    FuzzyRuleBase,
    FuzzyVariable,
    convergence_ratio,
    fuzzify,
    gene_average,
    gene_diversity,
    infer,
    stagnation_counter,
)
from .synthesis import (
    CampaignSummary,
    GenerationRecord,
    PatternMeasurement,
    RunConfig,
    RunReport,
    compare_campaign,
    config_from_dict,
    derive_trial_seeds,
    generations_to_90pct,
    load_config,
    load_report,
    measure_pattern,
    run_synthesis,
    write_report,
)

__version__ = "0.1.0"
