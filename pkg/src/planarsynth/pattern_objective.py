"""Desired-pattern mask and the fitness of a candidate pattern.

The mask asks for a single narrow beam covering (beam_lo, beam_hi) with
all sidelobes at or below sll_db. Fitness of a sampled pattern is the
beam-region dB average plus a weighted margin between that average and
the worst sidelobe sample; both terms are maximized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array_model import (
    AngleGrid,
    ArrayGeometry,
    PatternSamples,
    PhaseVector,
    _SeparableBasis,
    _magnitudes_to_db,
)


@dataclass(frozen=True)
class MaskSpec:
    """Mask parameters: beam placement, sidelobe ceiling, width target.

    sll_db and beamwidth_3db_deg describe the desired pattern and are used
    for reporting; only w1 enters the fitness.
    """

    steer_deg: float = 10.0
    beam_lo_deg: float = 0.0
    beam_hi_deg: float = 20.0
    sll_db: float = -20.0
    beamwidth_3db_deg: float = 8.0
    w1: float = 1.0

    def __post_init__(self):
        if not (self.beam_lo_deg < self.steer_deg < self.beam_hi_deg):
            raise ValueError("steer angle must lie strictly inside the beam region")
        if self.sll_db >= 0:
            raise ValueError("sidelobe level must be negative dB")
        if self.w1 <= 0:
            raise ValueError("w1 must be positive")


@dataclass(frozen=True)
class GridPartition:
    """An angle grid together with its beam/sidelobe index partition.

    beam_span is half-open [start, stop); it always holds an odd number of
    samples (2S+1) centered on the grid sample nearest the steer angle.
    """

    grid: AngleGrid
    beam_span: tuple[int, int]
    center_index: int

    @property
    def s(self) -> int:
        """Half-width S of the beam sample window (2S+1 samples)."""
        lo, hi = self.beam_span
        return (hi - lo - 1) // 2

    @property
    def beam_indices(self) -> np.ndarray:
        lo, hi = self.beam_span
        return np.arange(lo, hi)

    @property
    def sidelobe_indices(self) -> np.ndarray:
        lo, hi = self.beam_span
        n = self.grid.theta_deg.size
        return np.concatenate([np.arange(0, lo), np.arange(hi, n)])


# Comparison slack for classifying grid samples against the beam edges;
# samples landing exactly on an edge count as sidelobe.
_EDGE_TOL = 1e-9


def sample_grid(
    mask: MaskSpec,
    step_deg: float,
    theta_min_deg: float = -90.0,
    theta_max_deg: float = 90.0,
    phi_deg: float = 0.0,
) -> GridPartition:
    """Build the uniform theta grid and classify samples as beam/sidelobe.

    Beam samples are those strictly inside (beam_lo, beam_hi); boundary
    samples belong to the sidelobe set. The beam window is the largest odd
    count of samples centered on the sample nearest steer_deg.
    """
    if step_deg <= 0:
        raise ValueError("step must be positive")
    span = theta_max_deg - theta_min_deg
    n_steps = span / step_deg
    if abs(n_steps - round(n_steps)) > 1e-9:
        raise ValueError("step must divide the angular span evenly")
    theta = np.linspace(theta_min_deg, theta_max_deg, int(round(n_steps)) + 1)
    grid = AngleGrid(theta, phi_deg)

    inside = np.flatnonzero(
        (theta > mask.beam_lo_deg + _EDGE_TOL) & (theta < mask.beam_hi_deg - _EDGE_TOL)
    )
    if inside.size == 0:
        raise ValueError("beam region narrower than one grid step")
    center = inside[np.argmin(np.abs(theta[inside] - mask.steer_deg))]
    s = min(center - inside[0], inside[-1] - center)
    return GridPartition(grid, (center - s, center + s + 1), center)


def beam_average(p: PatternSamples) -> float:
    """Mean of the beam-region samples in dB."""
    vals = p.beam_values
    if vals.size == 0 or vals.size % 2 == 0:
        raise ValueError("beam span must be non-empty with an odd sample count")
    return float(np.mean(vals))


def sidelobe_margin(p: PatternSamples, d_av: float) -> float:
    """Smallest absolute gap between the beam average and any sidelobe
    sample, i.e. the clearance to the worst (highest) sidelobe."""
    vals = p.sidelobe_values
    if vals.size == 0:
        raise ValueError("sidelobe set is empty")
    return float(np.min(np.abs(d_av - vals)))


def fitness(p: PatternSamples, mask: MaskSpec) -> float:
    """Pattern quality to maximize: beam average plus weighted sidelobe
    margin. Deterministic in the samples."""
    d_av = beam_average(p)
    return d_av + mask.w1 * sidelobe_margin(p, d_av)


class SynthesisObjective:
    """Phase-vector fitness evaluator bound to one geometry, mask, and grid.

    Precomputes the per-angle phasor basis once so per-candidate cost is a
    pair of small matrix products; safe to call from parallel workers.
    """

    def __init__(
        self,
        geometry: ArrayGeometry,
        mask: MaskSpec,
        step_deg: float = 0.5,
        phi_deg: float = 0.0,
    ):
        self.geometry = geometry
        self.mask = mask
        self.partition = sample_grid(mask, step_deg, phi_deg=phi_deg)
        self._basis = _SeparableBasis(geometry, self.partition.grid)

    @property
    def grid(self) -> AngleGrid:
        return self.partition.grid

    def pattern(self, pv: PhaseVector) -> PatternSamples:
        """Normalized pattern with the beam/sidelobe partition attached."""
        db = _magnitudes_to_db(self._basis.magnitudes(pv))
        return PatternSamples(self.grid.theta_deg.copy(), db, self.partition.beam_span)

    def __call__(self, pv: PhaseVector) -> float:
        return fitness(self.pattern(pv), self.mask)
