"""Central tolerance and quadrature settings.

All numeric comparisons in the library read their tolerances from one
frozen record so that runs are reproducible and reports can state the
bound they were checked against.
"""

from dataclasses import dataclass, asdict


@dataclass(frozen=True)
class Tolerances:
    # relative residual for jet matching / boundary vanishing
    residual_rel: float = 1e-8
    # collar-level quadrature (L1 of the top derivative, sup norms)
    quadrature: float = 1e-9
    # two-sided seam mismatch, relative
    seam_rel: float = 1e-7
    # Fourier ratio identities, absolute residual
    ratio_abs: float = 1e-7
    # |F| values below this count as quadrature floor in decay fits
    spectral_floor: float = 1e-13
    # half-width of the excluded axis slabs in k-space
    axis_floor_k0: float = 0.25
    # headroom factor applied when a constant fitted at the smallest m
    # is checked against the rest of the schedule
    schedule_headroom: float = 1.05

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class QuadratureSettings:
    gauss_points: int = 12
    # oscillatory meshes resolve at least this many points per period
    points_per_period: float = 10.0
    # target panel width for non-oscillatory structure (model scale)
    smooth_panel: float = 1.0
    # panels across one collar width
    collar_panels: int = 6
    # refusal threshold for tensor meshes
    max_tensor_nodes: int = 40_000_000

    def as_dict(self):
        return asdict(self)


DEFAULT_TOL = Tolerances()
DEFAULT_QUAD = QuadratureSettings()

# doubling schedule used when scanning for an admissible m
M_DOUBLING_SCHEDULE = tuple(2 ** j for j in range(1, 21))
