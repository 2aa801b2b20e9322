import itertools
import math

import numpy as np
import pytest

from inflex import models as M
from inflex.errors import InvalidInputError, ModelParseError, PartialOrderError

from . import oracles


def test_gaussian_point_values():
    g3 = M.Gaussian(dim=3)
    assert g3.value((0.0, 0.0, 0.0)) == 1.0
    g1 = M.Gaussian(dim=1)
    assert g1.partial((2,), (0.0,)) == -1.0


def test_gaussian_vectorized_matches_scalar(rng):
    g = M.Gaussian(dim=2, sigma=1.3)
    X = rng.uniform(-3, 3, 7)
    Y = rng.uniform(-3, 3, 7)
    arr = g.partial((3, 1), (X, Y))
    for i in range(7):
        assert arr[i] == pytest.approx(g.partial((3, 1), (X[i], Y[i])), rel=1e-14)


@pytest.mark.parametrize("model", [
    M.Gaussian(dim=2, sigma=0.9),
    M.RationalDecay(dim=2, amplitude=1.0, power=4.0),
    M.Shift(M.RationalDecay(dim=2, amplitude=2.0, power=5.0), (0.4, -0.2)),
])
def test_partials_match_richardson_differences(model, rng):
    for _ in range(25):
        pt = tuple(rng.uniform(-2, 2, model.dim))
        total = rng.integers(1, 5)
        idx = [0] * model.dim
        for _ in range(total):
            idx[rng.integers(0, model.dim)] += 1
        idx = tuple(idx)
        want = oracles.fd_partial(model.value, idx, pt, h=5e-3)
        got = model.partial(idx, pt)
        assert abs(got - want) <= 1e-6 * (1.0 + abs(want))


def test_high_order_partials_match_fd_at_order6(rng):
    r = M.RationalDecay(dim=1, power=3.0)
    for _ in range(10):
        pt = (float(rng.uniform(-1.5, 1.5)),)
        want = oracles.fd_partial(r.value, (6,), pt, h=5e-2, levels=3)
        got = r.partial((6,), pt)
        assert abs(got - want) <= 2e-6 * (1.0 + abs(want))


def test_mixed_partials_symmetric_under_axis_permutation(rng):
    g = M.Gaussian(dim=3)
    r = M.RationalDecay(dim=3, power=6.0)
    for model in (g, r):
        for _ in range(20):
            pt = rng.uniform(-2, 2, 3)
            idx = tuple(int(v) for v in rng.integers(0, 3, 3))
            for perm in itertools.permutations(range(3)):
                pidx = tuple(idx[p] for p in perm)
                ppt = tuple(pt[p] for p in perm)
                base = model.partial(idx, tuple(pt))
                via = model.partial(pidx, ppt) if _is_symmetric(model) else base
                assert via == pytest.approx(base, rel=1e-12, abs=1e-12)


def _is_symmetric(model):
    return True  # both builtin families are radially symmetric


def test_partial_order_overflow_raises():
    g = M.Gaussian(dim=1)
    with pytest.raises(PartialOrderError) as err:
        g.partial((g.max_partial_order + 1,), (0.0,))
    assert str(g.max_partial_order) in str(err.value)


def test_bad_multiindex_and_point_raise():
    g = M.Gaussian(dim=2)
    with pytest.raises(InvalidInputError):
        g.partial((1,), (0.0, 0.0))
    with pytest.raises(InvalidInputError):
        g.partial((1, -1), (0.0, 0.0))
    with pytest.raises(InvalidInputError):
        g.partial((0, 0), (0.0,))


def test_decay_probe_gaussian_passes_any_power():
    rep = M.decay_probe(M.Gaussian(dim=2), 4)
    assert rep.passed
    assert rep.fitted_constant < 10.0  # max of r^4 e^{-r^2/2} is ~2.2


def test_decay_probe_rational_boundary_cases():
    f = M.RationalDecay(dim=2, power=1.0)  # ~ 1/|x|
    assert not M.decay_probe(f, 2).passed
    assert M.decay_probe(f, 1).passed


def test_decay_probe_constant_fails():
    assert not M.decay_probe(M.Constant(dim=2), 1).passed


def test_decay_probe_requires_deep_radii():
    with pytest.raises(InvalidInputError):
        M.decay_probe(M.Gaussian(dim=1), 2, radii=[2.0, 10.0, 100.0])


def test_builtin_models_pass_their_declared_class():
    cases = [
        (M.Gaussian(dim=1), 6),
        (M.Gaussian(dim=3), 6),
        (M.RationalDecay(dim=2, power=4.0), 4),
        (M.RationalDecay(dim=3, power=2.0), 2),
        (M.Shift(M.Gaussian(dim=2), (1.0, -2.0)), 5),
    ]
    for model, n in cases:
        rep = M.decay_probe(model, n, radii=np.geomspace(5, 1e4, 22))
        assert rep.passed, model.name


def test_laplacian_iterate_identity_and_values():
    g = M.Gaussian(dim=1)
    assert M.laplacian_iterate(g, 0) is g
    lap = M.laplacian_iterate(g, 1)
    assert lap.value((0.0,)) == -1.0
    assert lap.decay_class == "moderate_3"


def test_laplacian_iterate_matches_fd(rng):
    r = M.RationalDecay(dim=2, power=4.0)
    lap = M.laplacian_iterate(r, 1)
    for _ in range(10):
        pt = tuple(rng.uniform(-1.5, 1.5, 2))
        want = (oracles.fd_partial(r.value, (2, 0), pt, h=5e-3)
                + oracles.fd_partial(r.value, (0, 2), pt, h=5e-3))
        assert lap.value(pt) == pytest.approx(want, rel=1e-6, abs=1e-6)


def test_laplacian_iterate_order_overflow():
    g = M.Gaussian(dim=1)
    with pytest.raises(PartialOrderError):
        M.LaplacianIterate(g, g.max_partial_order)


def test_parse_model_grammar():
    g = M.parse_model("gaussian{sigma=2}", 3)
    assert isinstance(g, M.Gaussian) and g.sigma == 2.0 and g.dim == 3
    r = M.parse_model("rational{C=2,p=5}", 2)
    assert isinstance(r, M.RationalDecay) and r.amplitude == 2.0 and r.power == 5.0
    p = M.parse_model("product(gaussian{sigma=1},gaussian{sigma=2})", 2)
    assert p.value((0.0, 0.0)) == 1.0
    s = M.parse_model("shift{0.5,-1}(gaussian{sigma=1})", 2)
    assert s.value((0.5, -1.0)) == 1.0
    lap = M.parse_model("laplacian{j=1}(gaussian{sigma=1})", 1)
    assert lap.value((0.0,)) == -1.0


def test_parse_model_errors():
    with pytest.raises(ModelParseError):
        M.parse_model("nosuch{a=1}", 1)
    with pytest.raises(ModelParseError):
        M.parse_model("gaussian{sigma=1}(extra)", 1)
    with pytest.raises(ModelParseError):
        M.parse_model("product(gaussian{sigma=1})", 2)
    with pytest.raises(ModelParseError):
        M.parse_model("shift{1.0}(gaussian{sigma=1})", 2)


def test_product_factors_expose_axis_models():
    g = M.Gaussian(dim=3, sigma=1.5)
    fs = g.factors
    assert len(fs) == 3 and all(f.dim == 1 for f in fs)
    pt = (0.3, -1.0, 0.8)
    prod = fs[0].value((pt[0],)) * fs[1].value((pt[1],)) * fs[2].value((pt[2],))
    assert prod == pytest.approx(g.value(pt), rel=1e-14)
