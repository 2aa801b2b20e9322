"""Piecewise box extensions: interior copy, face collars, composed corners.

The extension of a model f on the box C_m = [-m, m]^dim agrees with f
inside, vanishes outside C_{m+w} (w = 1/m^d), and fills the collar with
one-sided polynomials whose jets are tangential functions.  Stages are
built in a fixed order (2D: y-collars over |x| <= m first, then
x-collars over the full |y| <= m+w strip; 3D: x, then y, then z), so a
point is evaluated by dispatching on the *last* stage whose collar
contains it; the jets of that collar are partials of the previous-stage
object at the face, which the recursion computes by pinning the normal
coordinate to the face.  Tangential derivatives of a collar polynomial
are collar polynomials of the differentiated jets (the jet-to-
coefficient map is linear), so mixed partials evaluate exactly through
the same recursion.
"""

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from . import collar as cp
from . import quadrature as quad
from .config import DEFAULT_QUAD, DEFAULT_TOL
from .errors import InvalidInputError, PartialOrderError
from .reports import VerificationReport, check_upper, check_flag

_STAGE_ORDER = {1: (0,), 2: (1, 0), 3: (0, 1, 2)}


def required_model_order(order_n, dim):
    """Jets of jets: the corner recursion needs mixed partials to 2(n-1)+n."""
    return 3 * order_n - 2 if dim > 1 else order_n


@dataclass(frozen=True)
class ExtensionSpec:
    dim: int
    m: float
    order_n: int
    collar_exponent: int
    model: object

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise InvalidInputError("dim must be 1, 2 or 3")
        if self.m <= 1:
            raise InvalidInputError("m must exceed 1")
        if self.order_n < 3:
            raise InvalidInputError("order n must be >= 3")
        if self.collar_exponent not in (1, 2, 3):
            raise InvalidInputError("collar exponent d must be 1, 2 or 3")
        if self.model.dim != self.dim:
            raise InvalidInputError("model dimension does not match spec")
        needed = required_model_order(self.order_n, self.dim)
        if self.model.max_partial_order < needed:
            raise PartialOrderError(needed, self.model.max_partial_order)
        if self.width >= self.m:
            raise InvalidInputError("collar width must stay below m")

    @property
    def width(self):
        return float(self.m) ** (-self.collar_exponent)


class Extension:
    """Immutable piecewise extension; evaluation is pure."""

    def __init__(self, spec):
        self.spec = spec
        self.m = float(spec.m)
        self.w = spec.width
        self.outer = self.m + self.w
        self.n = spec.order_n
        self.model = spec.model
        self.stage_order = _STAGE_ORDER[spec.dim]
        self.classify_order = tuple(reversed(self.stage_order))
        self._coeff_memo = {}
        self._memo_cap = 1 << 20

    # -- evaluation -------------------------------------------------------

    def eval(self, point, idx=None, side=None):
        """Partial derivative of the extension at a point.

        side maps axis -> +-1 to resolve points lying exactly on a seam:
        +1 takes the outward branch, -1 (or absence) the inward one.
        """
        point = tuple(float(x) for x in point)
        if len(point) != self.spec.dim:
            raise InvalidInputError("point dimension mismatch")
        if not all(math.isfinite(x) for x in point):
            raise InvalidInputError("point must be finite")
        if idx is None:
            idx = (0,) * self.spec.dim
        idx = tuple(int(i) for i in idx)
        if len(idx) != self.spec.dim or any(i < 0 for i in idx):
            raise InvalidInputError(f"bad multi-index {idx}")
        if sum(idx) > self.n:
            raise InvalidInputError(
                f"extension partials are defined up to total order {self.n}"
            )
        sides = [0] * self.spec.dim
        if side:
            for ax, s in side.items():
                sides[ax] = int(s)
        return self._eval(point, idx, tuple(sides))

    def _eval(self, pt, idx, sides):
        for axis in self.classify_order:
            ax = abs(pt[axis])
            if ax > self.outer or (ax == self.outer and sides[axis] > 0):
                return 0.0
        for axis in self.classify_order:
            ax = abs(pt[axis])
            if ax > self.m or (ax == self.m and sides[axis] > 0):
                sgn = 1 if pt[axis] > 0 else -1
                coeffs = self._collar_coeffs(axis, sgn, pt, idx, sides)
                s_can = sgn * (pt[axis] - sgn * self.m)
                val = cp._eval_canonical(coeffs, self.n, self.w, s_can, idx[axis])
                if sgn < 0 and idx[axis] % 2:
                    val = -val
                return val
        return self.model._partial(idx, pt)

    def _collar_coeffs(self, axis, sgn, pt, idx, sides):
        key = (axis, sgn,
               tuple(x for i, x in enumerate(pt) if i != axis),
               tuple(v for i, v in enumerate(idx) if i != axis))
        hit = self._coeff_memo.get(key)
        if hit is not None:
            return hit
        face_pt = tuple(sgn * self.m if i == axis else x for i, x in enumerate(pt))
        face_sides = tuple(0 if i == axis else s for i, s in enumerate(sides))
        jets = [
            self._eval(face_pt,
                       tuple(j if i == axis else v for i, v in enumerate(idx)),
                       face_sides)
            for j in range(self.n)
        ]
        coeffs = tuple(cp.solve_float(jets, self.w, self.n, sgn))
        if len(self._coeff_memo) >= self._memo_cap:
            self._coeff_memo.clear()
        self._coeff_memo[key] = coeffs
        return coeffs

    # -- region classification ---------------------------------------------

    def region(self, point):
        """One of outside / interior / face / edge / corner (exhaustive)."""
        k = 0
        for x in point:
            ax = abs(x)
            if ax > self.outer:
                return "outside"
            if ax > self.m:
                k += 1
        if k == 0:
            return "interior"
        if k == 1:
            return "face"
        if k == 2:
            return "corner" if self.spec.dim == 2 else "edge"
        return "corner"

    # -- product structure ---------------------------------------------------

    def factor_extensions(self):
        """1D extensions whose product equals this extension, when the model
        is a tensor product (checked against the generic path in tests)."""
        factors = self.model.factors
        if factors is None or self.spec.dim == 1:
            return None
        return [
            Extension(ExtensionSpec(dim=1, m=self.spec.m, order_n=self.n,
                                    collar_exponent=self.spec.collar_exponent,
                                    model=f))
            for f in factors
        ]

    def face_jet_polynomial(self, axis, sgn, tangential_point):
        """The collar polynomial along one face normal, as a polyext object."""
        pt = list(tangential_point)
        pt.insert(axis, sgn * self.m)
        jets = [self.eval(tuple(pt), self._face_idx(axis, j))
                for j in range(self.n)]
        orientation = cp.INCREASING if sgn > 0 else cp.DECREASING
        c = cp.Collar(inner_edge=sgn * self.m, width=self.w, orientation=orientation)
        return cp.collar_polynomial(cp.BoundaryJet(tuple(jets)), c)

    def _face_idx(self, axis, j):
        idx = [0] * self.spec.dim
        idx[axis] = j
        return tuple(idx)


def build_extension(spec):
    return Extension(spec)


def eval_extension(ext, point, idx=None, side=None):
    return ext.eval(point, idx=idx, side=side)


# ---------------------------------------------------------------------------
# seam continuity
# ---------------------------------------------------------------------------

def _tangential_samples(ext, count):
    """Per-axis sample positions covering interior and both collar bands."""
    m, w = ext.m, ext.w
    base = np.linspace(-m * 0.98, m * 0.98, max(count - 4, 6))
    bands = np.array([-(m + 0.7 * w), -(m + 0.25 * w), m + 0.25 * w, m + 0.7 * w])
    return np.concatenate([base, bands])


def _multi_indices(dim, max_total):
    out = []

    def rec(prefix, remaining):
        if len(prefix) == dim:
            out.append(tuple(prefix))
            return
        for v in range(remaining + 1):
            rec(prefix + [v], remaining - v)

    rec([], max_total)
    return [i for i in out if sum(i) <= max_total]


def seam_report(ext, samples_per_seam=12, tol=None):
    """Max two-sided mismatch of partials through order n-1 on every seam."""
    if samples_per_seam < 10:
        raise InvalidInputError("need at least 10 samples per seam")
    tol = tol if tol is not None else DEFAULT_TOL.seam_rel
    dim = ext.spec.dim
    idx_list = [i for i in _multi_indices(dim, ext.n - 1)]
    report = VerificationReport(command="seam_report",
                                config={"m": ext.m, "n": ext.n,
                                        "d": ext.spec.collar_exponent,
                                        "dim": dim, "model": ext.model.name,
                                        "samples_per_seam": samples_per_seam})
    tang = _tangential_samples(ext, samples_per_seam)
    for axis in range(dim):
        for sgn in (1, -1):
            for edge_name, edge in (("inner", ext.m), ("outer", ext.outer)):
                worst = 0.0
                others = [a for a in range(dim) if a != axis]
                grids = np.meshgrid(*[tang for _ in others], indexing="ij") \
                    if others else [np.array([0.0])]
                flat = [g.ravel() for g in grids]
                npts = flat[0].size if others else 1
                for p in range(npts):
                    pt = [0.0] * dim
                    pt[axis] = sgn * edge
                    for a, vals in zip(others, flat):
                        pt[a] = float(vals[p])
                    for idx in idx_list:
                        lo = ext.eval(tuple(pt), idx, side={axis: -1})
                        hi = ext.eval(tuple(pt), idx, side={axis: +1})
                        mism = abs(hi - lo) / (1.0 + max(abs(hi), abs(lo)))
                        if mism > worst:
                            worst = mism
                name = f"seam_{'xyz'[axis]}={'+' if sgn > 0 else '-'}{edge_name}"
                report.add(check_upper(name, worst, tol, tolerance=tol))
    report.note("collar width taken as 1/m^d on every stage, including the "
                "stages the construction freezes across wider bands")
    return report


# ---------------------------------------------------------------------------
# region integrals (norm budget, collar L1/sup)
# ---------------------------------------------------------------------------

_CASE_TABLES = {
    2: [  # (case label, derivative axis, bands per axis: 0 core / 1 collar)
        (1, 0, (0, 0)), (1, 1, (0, 0)),
        (2, 0, (0, 1)), (3, 0, (1, 0)), (4, 0, (1, 1)),
        (5, 1, (0, 1)), (6, 1, (1, 0)), (7, 1, (1, 1)),
    ],
    3: [
        (1, 0, (0, 0, 0)), (1, 1, (0, 0, 0)), (1, 2, (0, 0, 0)),
        (2, 0, (1, 0, 0)), (3, 1, (1, 0, 0)), (4, 2, (1, 0, 0)),
        (5, 0, (0, 1, 0)), (6, 2, (0, 1, 0)), (7, 1, (0, 1, 0)),
        (8, 0, (1, 1, 0)), (9, 1, (1, 1, 0)), (10, 2, (1, 1, 0)),
        (11, 0, (0, 0, 1)), (12, 1, (0, 0, 1)), (13, 2, (0, 0, 1)),
        (14, 0, (1, 0, 1)), (15, 1, (1, 0, 1)), (16, 2, (1, 0, 1)),
        (17, 0, (0, 1, 1)), (18, 1, (0, 1, 1)), (19, 2, (0, 1, 1)),
        (20, 0, (1, 1, 1)), (21, 1, (1, 1, 1)), (22, 2, (1, 1, 1)),
    ],
    1: [(1, 0, (0,)), (2, 0, (1,))],
}

_BAND_NAMES = {0: "core", 1: "collar"}


def _band_intervals(ext, band):
    if band == 0:
        return [(-ext.m, ext.m)]
    return [(-ext.outer, -ext.m), (ext.m, ext.outer)]


def _axis_breaks(ext, lo, hi, collar_band, settings):
    if collar_band:
        return list(np.linspace(lo, hi, settings.collar_panels + 1))
    return quad.split_interval(lo, hi, settings.smooth_panel)


def _region_integral_direct(ext, deriv_axis, bands, settings):
    """Tensor Gauss-Legendre integral of |d^n/dx_A^n f_m| over one region."""
    dim = ext.spec.dim
    idx = tuple(ext.n if a == deriv_axis else 0 for a in range(dim))
    total = 0.0
    # normal direction of a collar band needs panels between derivative kinks
    boxes = [[]]
    for a in range(dim):
        new = []
        for prefix in boxes:
            for iv in _band_intervals(ext, bands[a]):
                new.append(prefix + [iv])
        boxes = new
    for box in boxes:
        axes = []
        for a, (lo, hi) in enumerate(box):
            breaks = _axis_breaks(ext, lo, hi, bands[a], settings)
            axes.append(quad.panel_nodes(breaks, q=settings.gauss_points))
        if dim == 1:
            nodes, weights = axes[0]
            total += sum(wt * abs(ext._eval((float(x),), idx, (0,)))
                         for x, wt in zip(nodes, weights))
            continue
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        wgrids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
        wall = np.ones_like(wgrids[0])
        for wg in wgrids:
            wall = wall * wg
        flat = [g.ravel() for g in grids]
        wflat = wall.ravel()
        zero_sides = (0,) * dim
        acc = 0.0
        for p in range(wflat.size):
            pt = tuple(float(f[p]) for f in flat)
            acc += wflat[p] * abs(ext._eval(pt, idx, zero_sides))
        total += acc
    return total


def _interior_integral_vectorized(ext, deriv_axis, settings):
    dim = ext.spec.dim
    idx = tuple(ext.n if a == deriv_axis else 0 for a in range(dim))
    breaks = quad.split_interval(-ext.m, ext.m, settings.smooth_panel)
    nodes, weights = quad.panel_nodes(breaks, q=settings.gauss_points)
    shaped = []
    wshaped = []
    for a in range(dim):
        shape = [1] * dim
        shape[a] = nodes.size
        shaped.append(nodes.reshape(shape))
        wshaped.append(weights.reshape(shape))
    vals = np.abs(ext.model.partial(idx, tuple(shaped)))
    wall = wshaped[0]
    for wgt in wshaped[1:]:
        wall = wall * wgt
    return float(np.sum(vals * wall))


def _factor_piece(ext1d, j, band, settings):
    """Integral of |E^(j)| over one band of a 1D factor extension."""
    if band == 0:
        breaks = quad.split_interval(-ext1d.m, ext1d.m, settings.smooth_panel)
        nodes, weights = quad.panel_nodes(breaks, q=settings.gauss_points)
        idx = (j,)
        vals = np.abs(ext1d.model.partial(idx, (nodes,)))
        return float(np.dot(weights, vals))
    total = 0.0
    for sgn in (1, -1):
        poly = ext1d.face_jet_polynomial(0, sgn, ())
        if j == ext1d.n:
            total += poly.nth_derivative_l1()
        else:
            lo, hi = poly.collar.interval
            breaks = np.linspace(lo, hi, settings.collar_panels + 1)
            nodes, weights = quad.panel_nodes(list(breaks), q=settings.gauss_points)
            total += float(np.dot(weights, [abs(poly.eval(float(x), j))
                                            for x in nodes]))
    return total


def norm_budget(ext, settings=None, method="auto"):
    """Per-axis L1 norms of the order-n normal derivative, per region case.

    Regions enumerate the full core/collar decomposition of the support
    box (7 cases in 2D, 22 in 3D, matching the budget proof's split).
    Product models factorize each case into 1D integrals; the direct
    tensor path is kept as the generic route and as the cross-check.
    """
    settings = settings or DEFAULT_QUAD
    dim = ext.spec.dim
    cases = _CASE_TABLES[dim]
    use_product = method == "product" or (method == "auto"
                                          and ext.model.factors is not None
                                          and dim > 1)
    pieces = {}
    if use_product:
        f_exts = ext.factor_extensions()
        for a, e1 in enumerate(f_exts):
            for j in (0, ext.n):
                for band in (0, 1):
                    pieces[(a, j, band)] = _factor_piece(e1, j, band, settings)
    case_values = []
    axis_totals = [0.0] * dim
    for label, axis, bands in cases:
        if use_product:
            val = 1.0
            for a in range(dim):
                val *= pieces[(a, ext.n if a == axis else 0, bands[a])]
        elif all(b == 0 for b in bands):
            val = _interior_integral_vectorized(ext, axis, settings)
        else:
            val = _region_integral_direct(ext, axis, bands, settings)
        region = "*".join(_BAND_NAMES[b] for b in bands)
        case_values.append({"case": label, "axis": "xyz"[axis],
                            "region": region, "value": val})
        axis_totals[axis] += val
    report = VerificationReport(command="norm_budget",
                                config={"m": ext.m, "n": ext.n, "dim": dim,
                                        "d": ext.spec.collar_exponent,
                                        "model": ext.model.name,
                                        "method": "product" if use_product else "direct"})
    report.extra["cases"] = case_values
    report.extra["axis_totals"] = {
        "xyz"[a]: axis_totals[a] for a in range(dim)
    }
    for a in range(dim):
        report.add(check_flag(f"budget_total_d{'xyz'[a]}", True,
                              measured=axis_totals[a],
                              detail={"axis": "xyz"[a]}))
    return report


@dataclass
class CollarStats:
    l1: float
    sup: float


def collar_l1(ext, settings=None, method="auto"):
    """L1 and sup of |f_m| over the collar shell C_{m+w} \\ C_m."""
    settings = settings or DEFAULT_QUAD
    dim = ext.spec.dim
    use_product = method == "product" or (method == "auto"
                                          and ext.model.factors is not None
                                          and dim > 1)
    shells = [c for c in _CASE_TABLES[dim] if any(c[2])]
    seen = set()
    l1 = 0.0
    sup = 0.0
    if use_product:
        f_exts = ext.factor_extensions()
        piece_l1 = {}
        piece_sup = {}
        for a, e1 in enumerate(f_exts):
            for band in (0, 1):
                piece_l1[(a, band)] = _factor_piece(e1, 0, band, settings)
                piece_sup[(a, band)] = _factor_sup(e1, band, settings)
        for _, _, bands in shells:
            if bands in seen:
                continue
            seen.add(bands)
            v = 1.0
            s = 1.0
            for a in range(dim):
                v *= piece_l1[(a, bands[a])]
                s *= piece_sup[(a, bands[a])]
            l1 += v
            sup = max(sup, s)
        return CollarStats(l1=l1, sup=sup)
    zero_idx = (0,) * dim
    for _, _, bands in shells:
        if bands in seen:
            continue
        seen.add(bands)
        l1 += _region_abs_integral(ext, bands, zero_idx, settings)
        sup = max(sup, _region_abs_sup(ext, bands, zero_idx, settings))
    return CollarStats(l1=l1, sup=sup)


def _factor_sup(ext1d, band, settings):
    if band == 0:
        breaks = quad.split_interval(-ext1d.m, ext1d.m, settings.smooth_panel / 2)
        nodes, _ = quad.panel_nodes(breaks, q=settings.gauss_points)
        nodes = np.concatenate([nodes, [-ext1d.m, 0.0, ext1d.m]])
        return float(np.max(np.abs(ext1d.model.partial((0,), (nodes,)))))
    best = 0.0
    for sgn in (1, -1):
        poly = ext1d.face_jet_polynomial(0, sgn, ())
        best = max(best, poly.sup_norm())
    return best


def _region_abs_integral(ext, bands, idx, settings):
    dim = ext.spec.dim
    total = 0.0
    boxes = [[]]
    for a in range(dim):
        new = []
        for prefix in boxes:
            for iv in _band_intervals(ext, bands[a]):
                new.append(prefix + [iv])
        boxes = new
    for box in boxes:
        axes = []
        for a, (lo, hi) in enumerate(box):
            breaks = _axis_breaks(ext, lo, hi, bands[a], settings)
            axes.append(quad.panel_nodes(breaks, q=settings.gauss_points))
        mesh = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        wmesh = np.meshgrid(*[a[1] for a in axes], indexing="ij")
        wall = np.ones_like(wmesh[0])
        for wg in wmesh:
            wall = wall * wg
        flat = [g.ravel() for g in mesh]
        wflat = wall.ravel()
        zero_sides = (0,) * dim
        total += sum(wflat[p] * abs(ext._eval(tuple(float(f[p]) for f in flat),
                                              idx, zero_sides))
                     for p in range(wflat.size))
    return total


def _region_abs_sup(ext, bands, idx, settings):
    dim = ext.spec.dim
    best = 0.0
    boxes = [[]]
    for a in range(dim):
        new = []
        for prefix in boxes:
            for iv in _band_intervals(ext, bands[a]):
                new.append(prefix + [iv])
        boxes = new
    zero_sides = (0,) * dim
    for box in boxes:
        axes = [np.linspace(lo, hi, 9 if bands[a] else
                            max(17, int((hi - lo) / settings.smooth_panel) * 4 + 1))
                for a, (lo, hi) in enumerate(box)]
        mesh = np.meshgrid(*axes, indexing="ij")
        flat = [g.ravel() for g in mesh]
        for p in range(flat[0].size):
            v = abs(ext._eval(tuple(float(f[p]) for f in flat), idx, zero_sides))
            if v > best:
                best = v
    return best


# ---------------------------------------------------------------------------
# schedule drivers
# ---------------------------------------------------------------------------

def norm_budget_schedule(model, dim, n, d, m_schedule, settings=None, tol=None):
    """Fit G at the smallest m and verify axis budgets <= G m^dim after it."""
    tolc = tol if tol is not None else DEFAULT_TOL
    m_schedule = sorted(float(m) for m in m_schedule)
    per_m = []
    for m in m_schedule:
        ext = Extension(ExtensionSpec(dim=dim, m=m, order_n=n,
                                      collar_exponent=d, model=model))
        rep = norm_budget(ext, settings=settings)
        per_m.append((m, rep.extra["axis_totals"], rep.extra["cases"]))
    m0, totals0, _ = per_m[0]
    G = max(totals0.values()) / m0 ** dim
    report = VerificationReport(command="norm_budget_schedule",
                                config={"model": model.name, "dim": dim, "n": n,
                                        "d": d, "m_schedule": m_schedule})
    report.extra["fitted_G"] = G
    report.extra["per_m"] = [
        {"m": m, "axis_totals": totals, "cases": cases}
        for m, totals, cases in per_m
    ]
    headroom = tolc.schedule_headroom
    for m, totals, _ in per_m:
        worst = max(totals.values())
        report.add(check_upper(f"budget_m={m:g}", worst,
                               G * headroom * m ** dim,
                               detail={"fitted_G": G, "headroom": headroom}))
    slope = _loglog_slope([m for m, _, _ in per_m],
                          [max(t.values()) for _, t, _ in per_m])
    report.extra["loglog_slope"] = slope
    report.add(check_upper("budget_growth_slope", slope, dim + 0.1))
    return report


def collar_bound_schedule(model, dim, n, d, m_schedule, settings=None, tol=None):
    """Check l1 * m and sup stay below constants fitted at the smallest m."""
    tolc = tol if tol is not None else DEFAULT_TOL
    m_schedule = sorted(float(m) for m in m_schedule)
    stats = []
    for m in m_schedule:
        ext = Extension(ExtensionSpec(dim=dim, m=m, order_n=n,
                                      collar_exponent=d, model=model))
        stats.append((m, collar_l1(ext, settings=settings)))
    m0, s0 = stats[0]
    E = max(s0.l1 * m0, 1e-300)
    D = max(s0.sup, 1e-300)
    report = VerificationReport(command="collar_bound_schedule",
                                config={"model": model.name, "dim": dim, "n": n,
                                        "d": d, "m_schedule": m_schedule})
    report.extra["fitted_E"] = E
    report.extra["fitted_D"] = D
    report.extra["per_m"] = [{"m": m, "l1": s.l1, "sup": s.sup} for m, s in stats]
    for m, s in stats:
        report.add(check_upper(f"collar_l1_times_m_m={m:g}", s.l1 * m,
                               E * tolc.schedule_headroom))
        report.add(check_upper(f"collar_sup_m={m:g}", s.sup,
                               D * tolc.schedule_headroom))
    return report


def _loglog_slope(xs, ys):
    xs = np.log(np.asarray(xs, dtype=float))
    ys = np.asarray(ys, dtype=float)
    pos = ys > 0
    if pos.sum() < 2:
        return -math.inf
    return float(np.polyfit(xs[pos], np.log(ys[pos]), 1)[0])


# ---------------------------------------------------------------------------
# sampled-field export
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    dims: tuple
    spacing: tuple
    origin: tuple

    def axis_points(self, a):
        return self.origin[a] + self.spacing[a] * np.arange(self.dims[a])

    def to_dict(self):
        return {"dims": list(self.dims), "spacing": list(self.spacing),
                "origin": list(self.origin)}

    @classmethod
    def from_dict(cls, d):
        return cls(dims=tuple(int(v) for v in d["dims"]),
                   spacing=tuple(float(v) for v in d["spacing"]),
                   origin=tuple(float(v) for v in d["origin"]))

    @classmethod
    def covering(cls, ext, points_per_axis, pad=0.0):
        half = ext.outer + pad
        n = int(points_per_axis)
        spacing = 2.0 * half / (n - 1)
        dim = ext.spec.dim
        return cls(dims=(n,) * dim, spacing=(spacing,) * dim,
                   origin=(-half,) * dim)


def sample_field(ext, grid):
    """Values on the grid, row-major (last axis fastest)."""
    axes = [grid.axis_points(a) for a in range(ext.spec.dim)]
    out = np.empty(grid.dims)
    zero_idx = (0,) * ext.spec.dim
    zero_sides = (0,) * ext.spec.dim
    for flat_i, multi in enumerate(np.ndindex(*grid.dims)):
        pt = tuple(float(axes[a][multi[a]]) for a in range(ext.spec.dim))
        out[multi] = ext._eval(pt, zero_idx, zero_sides)
    return out


def export_field_csv(ext, grid, path):
    """CSV "x,y[,z],value" in row-major order plus a JSON grid sidecar."""
    dim = ext.spec.dim
    values = sample_field(ext, grid)
    axes = [grid.axis_points(a) for a in range(dim)]
    header = list("xyz"[:dim]) + ["value"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for multi in np.ndindex(*grid.dims):
            row = [repr(float(axes[a][multi[a]])) for a in range(dim)]
            row.append(repr(float(values[multi])))
            writer.writerow(row)
    sidecar = dict(grid.to_dict())
    sidecar.update({"m": ext.m, "n": ext.n, "d": ext.spec.collar_exponent})
    with open(str(path) + ".json", "w") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return values


def load_field_csv(path):
    with open(str(path) + ".json") as fh:
        meta = json.load(fh)
    grid = GridSpec.from_dict(meta)
    values = np.empty(grid.dims)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for multi, row in zip(np.ndindex(*grid.dims), reader):
            values[multi] = float(row[-1])
    return values, grid, meta
