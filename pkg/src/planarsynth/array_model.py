"""Far-field pattern computation for rectangular planar arrays.

Elements sit on a regular x-y lattice placed symmetrically about the
origin (no element at the origin), with uniform amplitudes and per-element
phase excitations. The optimization variable is a half-vector of phases
per axis; the full excitation is its antisymmetric expansion, so a
half-vector of M/2 + N/2 phases drives an M x N array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

C0 = 299_792_458.0  # m/s

#: Pattern values below this are clamped so nulls never map to -inf dB.
DB_FLOOR = -120.0


def wrap_phase(phi):
    """Wrap angles into [-pi, pi)."""
    return (np.asarray(phi, dtype=float) + np.pi) % (2.0 * np.pi) - np.pi


@dataclass(frozen=True)
class RectangularPatch:
    """Rectangular microstrip patch dimensions (meters).

    The resonant length lies along x, the width along y.
    """

    width_m: float
    length_m: float

    def __post_init__(self):
        if self.width_m <= 0 or self.length_m <= 0:
            raise ValueError("patch dimensions must be positive")


@dataclass(frozen=True)
class ArrayGeometry:
    """Rectangular planar array: m_elems along x, n_elems along y.

    Spacings dx, dy are in wavelengths. element_pattern=None selects an
    isotropic element; a RectangularPatch selects the cavity-model patch
    factor. Element counts must be even so the antisymmetric half-vector
    parameterization pairs every element with its mirror.
    """

    m_elems: int
    n_elems: int
    dx: float = 0.5
    dy: float = 0.5
    frequency_hz: float = 1.0e10
    element_pattern: RectangularPatch | None = None

    def __post_init__(self):
        if self.m_elems < 2 or self.n_elems < 2:
            raise ValueError("element counts must be >= 2")
        if self.m_elems % 2 or self.n_elems % 2:
            raise ValueError("element counts must be even")
        if self.dx <= 0 or self.dy <= 0:
            raise ValueError("spacings must be positive")
        if self.frequency_hz <= 0:
            raise ValueError("frequency must be positive")

    @property
    def wavelength_m(self) -> float:
        return C0 / self.frequency_hz

    @property
    def k0(self) -> float:
        """Free-space wave number, rad/m."""
        return 2.0 * np.pi / self.wavelength_m

    def x_positions(self) -> np.ndarray:
        """Element x coordinates in wavelengths, ascending.

        Centered layout at +/-(2i-1)*dx/2: mirror pairs straddle the
        origin and no element sits on it.
        """
        m = np.arange(1, self.m_elems + 1)
        return (2.0 * m - self.m_elems - 1) * self.dx / 2.0

    def y_positions(self) -> np.ndarray:
        n = np.arange(1, self.n_elems + 1)
        return (2.0 * n - self.n_elems - 1) * self.dy / 2.0


@dataclass(frozen=True, eq=False)
class PhaseVector:
    """Half-vector of phase excitations: M/2 x-phases then N/2 y-phases.

    Entry i pairs with the element at +(2i-1)*d/2; the mirror element
    carries the negated phase. All phases must lie in [-pi, pi).
    """

    x_half: np.ndarray
    y_half: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x_half", np.asarray(self.x_half, dtype=float))
        object.__setattr__(self, "y_half", np.asarray(self.y_half, dtype=float))
        for arr in (self.x_half, self.y_half):
            if arr.ndim != 1 or arr.size == 0:
                raise ValueError("phase half-vectors must be non-empty 1-D")
            if np.any(arr < -np.pi) or np.any(arr >= np.pi):
                raise ValueError("phases must lie in [-pi, pi)")


@dataclass(frozen=True, eq=False)
class AngleGrid:
    """Theta sample angles (degrees, strictly increasing) on one phi cut."""

    theta_deg: np.ndarray
    phi_deg: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta_deg", np.asarray(self.theta_deg, dtype=float))
        t = self.theta_deg
        if t.ndim != 1 or t.size == 0:
            raise ValueError("angle grid must be non-empty 1-D")
        if np.any(np.diff(t) <= 0):
            raise ValueError("theta samples must be strictly increasing")
        if np.any(np.abs(t) > 90.0):
            raise ValueError("theta samples must lie in [-90, 90] degrees")


@dataclass(eq=False)
class PatternSamples:
    """Normalized pattern in dB over an angle grid, peak at exactly 0 dB.

    beam_span, when present, is the half-open index range [start, stop)
    of the main-beam samples; everything else is sidelobe region.
    """

    angles_deg: np.ndarray
    values_db: np.ndarray
    beam_span: tuple[int, int] | None = None

    def __post_init__(self):
        self.angles_deg = np.asarray(self.angles_deg, dtype=float)
        self.values_db = np.asarray(self.values_db, dtype=float)
        if self.angles_deg.shape != self.values_db.shape:
            raise ValueError("angles and values must have equal length")
        if self.beam_span is not None:
            lo, hi = self.beam_span
            if not (0 <= lo < hi <= self.values_db.size):
                raise ValueError("beam span out of range")

    @property
    def beam_values(self) -> np.ndarray:
        if self.beam_span is None:
            raise ValueError("pattern has no beam/sidelobe partition")
        lo, hi = self.beam_span
        return self.values_db[lo:hi]

    @property
    def sidelobe_values(self) -> np.ndarray:
        if self.beam_span is None:
            raise ValueError("pattern has no beam/sidelobe partition")
        lo, hi = self.beam_span
        return np.concatenate([self.values_db[:lo], self.values_db[hi:]])

    def sidelobe_mask(self) -> np.ndarray:
        if self.beam_span is None:
            raise ValueError("pattern has no beam/sidelobe partition")
        lo, hi = self.beam_span
        mask = np.ones(self.values_db.size, dtype=bool)
        mask[lo:hi] = False
        return mask


def expand_symmetric(pv: PhaseVector, g: ArrayGeometry) -> np.ndarray:
    """Expand the half-vector to the full M x N per-element phase matrix.

    Mirror elements carry negated phases, and the planar phase is the sum
    of the axis phases: psi[m, n] = psi_x[m] + psi_y[n]. Rows/columns are
    ordered by ascending element position.
    """
    if pv.x_half.size * 2 != g.m_elems or pv.y_half.size * 2 != g.n_elems:
        raise ValueError(
            f"phase vector ({pv.x_half.size}+{pv.y_half.size} half-phases) does not "
            f"match a {g.m_elems}x{g.n_elems} array"
        )
    psi_x = np.concatenate([-pv.x_half[::-1], pv.x_half])
    psi_y = np.concatenate([-pv.y_half[::-1], pv.y_half])
    return psi_x[:, None] + psi_y[None, :]


def element_pattern(theta_deg, phi_deg, g: ArrayGeometry) -> np.ndarray:
    """Element gain factor at the given angles, 1.0 at broadside.

    Isotropic elements return 1 everywhere. The patch option evaluates the
    two-slot cavity model for the dominant mode, using the physical patch
    dimensions (no fringing correction): the slot-aperture sinc along the
    width, the two-slot cosine along the resonant length, and the
    sqrt(cos^2(phi) + cos^2(theta) sin^2(phi)) field-magnitude factor.
    """
    theta = np.radians(np.asarray(theta_deg, dtype=float))
    phi = np.radians(np.asarray(phi_deg, dtype=float))
    if g.element_pattern is None:
        return np.ones(np.broadcast(theta, phi).shape)
    patch = g.element_pattern
    lam = g.wavelength_m
    u = np.sin(theta) * np.cos(phi)
    v = np.sin(theta) * np.sin(phi)
    # np.sinc(x) = sin(pi x)/(pi x), so pass the argument divided by pi.
    slot = np.sinc(patch.width_m / lam * v)
    pair = np.cos(np.pi * patch.length_m / lam * u)
    polarization = np.sqrt(np.cos(phi) ** 2 + (np.cos(theta) * np.sin(phi)) ** 2)
    return np.abs(slot * pair) * polarization


def _magnitudes_to_db(mags: np.ndarray) -> np.ndarray:
    """Normalize to unit peak and convert to dB with the -120 dB floor."""
    peak = mags.max()
    if peak <= 0.0:
        raise ValueError("pattern is identically zero, cannot normalize")
    ratio = mags / peak
    return 20.0 * np.log10(np.maximum(ratio, 10.0 ** (DB_FLOOR / 20.0)))


class _SeparableBasis:
    """Precomputed per-angle phasor basis for one geometry and grid.

    Holds exp(j 2 pi x_m u) and exp(j 2 pi y_n v) for every grid angle so
    that repeated pattern evaluations reduce to two small matrix products.
    """

    def __init__(self, g: ArrayGeometry, grid: AngleGrid):
        self.geometry = g
        self.grid = grid
        theta = np.radians(grid.theta_deg)
        phi = np.radians(grid.phi_deg)
        u = np.sin(theta) * np.cos(phi)
        v = np.sin(theta) * np.sin(phi)
        # Positions are in wavelengths, so k0 * x_meters reduces to 2 pi x.
        self.ex = np.exp(2j * np.pi * np.outer(u, g.x_positions()))
        self.ey = np.exp(2j * np.pi * np.outer(v, g.y_positions()))
        self.element_gain = element_pattern(grid.theta_deg, grid.phi_deg, g)

    def magnitudes(self, pv: PhaseVector) -> np.ndarray:
        if pv.x_half.size * 2 != self.geometry.m_elems or pv.y_half.size * 2 != self.geometry.n_elems:
            raise ValueError("phase vector does not match array geometry")
        wx = np.exp(1j * np.concatenate([-pv.x_half[::-1], pv.x_half]))
        wy = np.exp(1j * np.concatenate([-pv.y_half[::-1], pv.y_half]))
        return np.abs(self.ex @ wx) * np.abs(self.ey @ wy) * self.element_gain


def array_factor_separable(pv: PhaseVector, g: ArrayGeometry, grid: AngleGrid) -> PatternSamples:
    """Pattern of the antisymmetric half-vector via the x-sum times y-sum
    factorization, normalized so the grid maximum is 0 dB."""
    basis = _SeparableBasis(g, grid)
    return PatternSamples(grid.theta_deg.copy(), _magnitudes_to_db(basis.magnitudes(pv)))


def array_factor_bruteforce(phases: np.ndarray, g: ArrayGeometry, grid: AngleGrid) -> PatternSamples:
    """Pattern of an arbitrary M x N phase matrix by the direct double sum
    over all elements. Slower than the separable path; serves as its
    independent check for separable excitations."""
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (g.m_elems, g.n_elems):
        raise ValueError(
            f"phase matrix shape {phases.shape} does not match "
            f"{g.m_elems}x{g.n_elems} array"
        )
    theta = np.radians(grid.theta_deg)
    phi = np.radians(grid.phi_deg)
    u = np.sin(theta) * np.cos(phi)
    v = np.sin(theta) * np.sin(phi)
    xpos = g.x_positions()
    ypos = g.y_positions()
    # (angles, M, N) phase cube: geometric path difference plus excitation.
    total = (
        2.0 * np.pi * (u[:, None, None] * xpos[None, :, None] + v[:, None, None] * ypos[None, None, :])
        + phases[None, :, :]
    )
    af = np.exp(1j * total).sum(axis=(1, 2))
    mags = np.abs(af) * element_pattern(grid.theta_deg, grid.phi_deg, g)
    return PatternSamples(grid.theta_deg.copy(), _magnitudes_to_db(mags))
