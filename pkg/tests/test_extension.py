import math

import numpy as np
import pytest

from inflex import collar as cp
from inflex import extension as E
from inflex import models as M
from inflex.errors import InvalidInputError, PartialOrderError


def build(dim=1, m=5.0, n=3, d=1, model=None):
    model = model or M.Gaussian(dim=dim)
    return E.build_extension(E.ExtensionSpec(dim=dim, m=m, order_n=n,
                                             collar_exponent=d, model=model))


def test_zero_model_extends_to_zero(rng):
    ext = build(dim=2, m=4.0, d=2, model=M.Constant(dim=2, c=0.0))
    for _ in range(50):
        pt = tuple(rng.uniform(-5, 5, 2))
        assert ext.eval(pt) == 0.0
    assert E.collar_l1(ext, method="direct").l1 == 0.0
    budget = E.norm_budget(ext, method="direct")
    assert all(c["value"] == 0.0 for c in budget.extra["cases"])


def test_1d_gaussian_matches_model_and_vanishes():
    g = M.Gaussian(dim=1)
    ext = build(dim=1, m=5.0, n=3, d=1)
    for x in np.linspace(-5, 5, 31):
        assert ext.eval((float(x),)) == g.value((float(x),))
    for x in [5.2000000001, 6.0, -8.0, 5.4]:
        assert ext.eval((x,)) == 0.0
    # collar values equal the one-sided polynomial built directly
    jets = tuple(g.partial((j,), (5.0,)) for j in range(3))
    poly = cp.collar_polynomial(cp.BoundaryJet(jets), cp.Collar(5.0, 0.2))
    for x in np.linspace(5.0, 5.2, 9):
        assert ext.eval((float(x),)) == pytest.approx(poly.eval(float(x)),
                                                      rel=1e-12, abs=1e-15)
    rep = E.seam_report(ext, 12)
    assert rep.passed
    assert max(c.measured for c in rep.checks) < 1e-8


def test_2d_corner_value_is_the_composed_polynomial():
    g = M.Gaussian(dim=2)
    m = 4.0
    ext = build(dim=2, m=m, n=3, d=2, model=g)
    w = ext.w
    x = m + w / 2.0
    y = m + w / 2.0
    # stage 1: y-collar polynomials of the x-partial jets at the top face
    def stage1(j_x, yy):
        jets = tuple(g.partial((j_x, i), (m, m)) for i in range(3))
        poly = cp.collar_polynomial(cp.BoundaryJet(jets), cp.Collar(m, w))
        return poly.eval(yy)
    # stage 2: x-collar polynomial whose jets are stage-1 values
    jets = tuple(stage1(j, y) for j in range(3))
    poly = cp.collar_polynomial(cp.BoundaryJet(jets), cp.Collar(m, w))
    assert ext.eval((x, y)) == pytest.approx(poly.eval(x), rel=1e-12)


def test_region_partition_is_exhaustive_and_exclusive(rng):
    ext = build(dim=2, m=4.0, n=3, d=2)
    m, w = ext.m, ext.w
    seen = set()
    for _ in range(4000):
        r = rng.uniform(0, 1)
        if r < 0.5:
            pt = rng.uniform(-(m + 2 * w), m + 2 * w, 2)
        else:  # concentrate samples near the shell
            pt = np.sign(rng.uniform(-1, 1, 2)) * rng.uniform(m - w, m + 2 * w, 2)
        label = ext.region(tuple(pt))
        seen.add(label)
        k = sum(1 for c in pt if abs(c) > m)
        out = any(abs(c) > m + w for c in pt)
        want = ("outside" if out else
                "interior" if k == 0 else
                "face" if k == 1 else "corner")
        assert label == want
    assert {"interior", "face", "corner", "outside"} <= seen


def test_compact_support_at_1e4_random_points(rng):
    for ext in (build(dim=2, m=4.0, n=3, d=2), build(dim=3, m=3.0, n=3, d=3)):
        dim = ext.spec.dim
        pts = rng.uniform(-3 * ext.m, 3 * ext.m, size=(10_000, dim))
        outside = np.max(np.abs(pts), axis=1) > ext.outer
        for p, out in zip(pts, outside):
            if out:
                assert ext.eval(tuple(p)) == 0.0


def test_interior_values_share_the_model_code_path(rng):
    g = M.Gaussian(dim=2)
    ext = build(dim=2, m=4.0, n=3, d=2, model=g)
    for _ in range(100):
        pt = tuple(rng.uniform(-4, 4, 2))
        assert ext.eval(pt) == g.value(pt)


def test_seam_continuity_2d_and_3d():
    rep2 = E.seam_report(build(dim=2, m=4.0, n=3, d=2), 12)
    assert rep2.passed
    rep3 = E.seam_report(build(dim=3, m=3.0, n=3, d=3), 10)
    assert rep3.passed


def test_seam_two_sided_limits_match_offset_sampling():
    # independent check of the side-hint evaluation: approach the seam
    # with shrinking offsets and compare to the hinted one-sided values
    ext = build(dim=2, m=4.0, n=3, d=2)
    m, w = ext.m, ext.w
    y = 1.234
    for idx in [(0, 0), (1, 0), (2, 0)]:
        hi = ext.eval((m, y), idx, side={0: +1})
        lo = ext.eval((m, y), idx, side={0: -1})
        # Richardson-extrapolate the one-sided limits to the seam
        d = w / 4096
        outer = 2 * ext.eval((m + d / 2, y), idx) - ext.eval((m + d, y), idx)
        assert abs(outer - hi) < 1e-5 * (1 + abs(hi))
        inner = 2 * ext.eval((m - d / 2, y), idx) - ext.eval((m - d, y), idx)
        assert abs(inner - lo) < 1e-5 * (1 + abs(lo))


def test_top_normal_derivative_may_jump_across_face():
    ext = build(dim=1, m=5.0, n=3, d=1)
    lo = ext.eval((5.0,), (3,), side={0: -1})
    hi = ext.eval((5.0,), (3,), side={0: +1})
    assert abs(hi - lo) > 1e-12  # the order-n normal derivative jumps


def test_face_collar_l1_equals_top_jet_when_definite():
    ext = build(dim=2, m=4.0, n=3, d=2)
    for sgn in (1, -1):
        poly = ext.face_jet_polynomial(0, sgn, (0.7,))
        l1 = poly.nth_derivative_l1()
        top = abs(poly.jet.values[-1])
        if poly.sign_class().definite:
            assert abs(l1 - top) < 1e-8 * (1 + top)
        else:
            assert l1 >= top - 1e-12  # FTC gives equality only when definite


def test_norm_budget_product_and_direct_agree():
    ext = build(dim=2, m=4.0, n=3, d=2)
    bp = E.norm_budget(ext, method="product")
    bd = E.norm_budget(ext, method="direct")
    for a, b in zip(bp.extra["cases"], bd.extra["cases"]):
        denom = max(abs(a["value"]), abs(b["value"]), 1e-300)
        assert abs(a["value"] - b["value"]) / denom < 1e-3
    assert bp.extra["cases"][0]["case"] == 1
    assert len(bp.extra["cases"]) == 8  # 7 paper cases, case 1 carries 2 axes


def test_norm_budget_case_count_3d():
    ext = build(dim=3, m=3.0, n=3, d=3)
    rep = E.norm_budget(ext, method="product")
    labels = [c["case"] for c in rep.extra["cases"]]
    assert sorted(set(labels)) == list(range(1, 23))
    assert len(labels) == 24  # case 1 carries the three interior axes


def test_norm_budget_schedule_2d_fits_G():
    rep = E.norm_budget_schedule(M.Gaussian(dim=2), 2, 3, 2, [4, 8, 16])
    assert rep.passed
    slope = rep.extra["loglog_slope"]
    assert slope <= 2.1


def test_collar_bounds_schedule():
    rep = E.collar_bound_schedule(M.Gaussian(dim=2), 2, 3, 2, [4, 8])
    assert rep.passed


def test_collar_l1_dual_route():
    ext = build(dim=2, m=3.0, n=3, d=1)
    a = E.collar_l1(ext, method="product")
    b = E.collar_l1(ext, method="direct")
    assert a.l1 == pytest.approx(b.l1, rel=1e-6)
    assert a.sup == pytest.approx(b.sup, rel=1e-3)


def test_insufficient_model_order_is_named():
    lap = M.laplacian_iterate(M.Gaussian(dim=2), 19)  # order 42-38 = 4 left
    with pytest.raises(PartialOrderError) as err:
        build(dim=2, m=4.0, n=3, d=2, model=lap)
    assert "7" in str(err.value)  # needs 3n-2 = 7


def test_eval_validates_inputs():
    ext = build(dim=2, m=4.0, n=3, d=2)
    with pytest.raises(InvalidInputError):
        ext.eval((1.0,))
    with pytest.raises(InvalidInputError):
        ext.eval((1.0, math.inf))
    with pytest.raises(InvalidInputError):
        ext.eval((1.0, 1.0), (2, 2))  # beyond total order n
    with pytest.raises(InvalidInputError):
        E.ExtensionSpec(dim=2, m=0.5, order_n=3, collar_exponent=2,
                        model=M.Gaussian(dim=2))
    with pytest.raises(InvalidInputError):
        E.seam_report(ext, samples_per_seam=5)


def test_field_csv_roundtrip(tmp_path):
    ext = build(dim=2, m=2.0, n=3, d=1)
    grid = E.GridSpec.covering(ext, 17)
    path = tmp_path / "field.csv"
    values = E.export_field_csv(ext, grid, path)
    loaded, lgrid, meta = E.load_field_csv(path)
    assert lgrid == grid
    assert np.array_equal(loaded, values)
    assert meta["m"] == 2.0 and meta["n"] == 3 and meta["d"] == 1
    with open(path) as fh:
        assert fh.readline().strip() == "x,y,value"
