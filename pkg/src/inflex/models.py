"""Smooth test functions with exact closed-form partial derivatives.

Models evaluate any mixed partial up to a declared order, on scalars or
on broadcast numpy arrays (points are given per axis, so tensor grids
evaluate without materialising full meshes).  Decay classes are declared
up front and checked empirically by ``decay_probe`` before they back any
spectral claim.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ModelParseError, PartialOrderError

SCHWARTZ = "schwartz"
VERY_MODERATE = "very_moderate"
NO_DECAY = "none"


def moderate(n):
    return f"moderate_{n}"


def _is_array(x):
    return isinstance(x, np.ndarray)


def _exp(x):
    return np.exp(x) if _is_array(x) else math.exp(x)


class FunctionModel:
    """Base class: dim, max_partial_order, decay_class, exact partials."""

    dim = 1
    max_partial_order = 42
    decay_class = NO_DECAY
    name = "model"

    def partial(self, idx, point):
        idx = self._check_idx(idx)
        point = tuple(point)
        if len(point) != self.dim:
            raise InvalidInputError(
                f"point has {len(point)} coordinates, model is {self.dim}-dimensional"
            )
        return self._partial(idx, point)

    def value(self, point):
        return self.partial((0,) * self.dim, point)

    def _check_idx(self, idx):
        idx = tuple(int(i) for i in idx)
        if len(idx) != self.dim or any(i < 0 for i in idx):
            raise InvalidInputError(f"bad multi-index {idx} for dim {self.dim}")
        if sum(idx) > self.max_partial_order:
            raise PartialOrderError(sum(idx), self.max_partial_order)
        return idx

    def _partial(self, idx, point):
        raise NotImplementedError

    # per-axis 1D factor models when the model is a tensor product
    @property
    def factors(self):
        return None

    def describe(self):
        return self.name


_HERMITE_CACHE = [[1.0], [1.0, 0.0]]  # probabilists' He_k, high -> low


def _hermite(k):
    """Coefficient list of He_k (monic, probabilists'), highest power first."""
    while len(_HERMITE_CACHE) <= k:
        j = len(_HERMITE_CACHE) - 1
        prev, prev2 = _HERMITE_CACHE[j], _HERMITE_CACHE[j - 1]
        nxt = [0.0] * (j + 2)
        for i, c in enumerate(prev):  # x * He_j
            nxt[i] += c
        for i, c in enumerate(prev2):  # - j * He_{j-1}
            nxt[i + 2] -= j * c
        _HERMITE_CACHE.append(nxt)
    return _HERMITE_CACHE[k]


def _polyval(coeffs, x):
    acc = coeffs[0] * (np.ones_like(x) if _is_array(x) else 1.0)
    for c in coeffs[1:]:
        acc = acc * x + c
    return acc


class Gaussian(FunctionModel):
    """exp(-|x|^2 / (2 sigma^2)); derivatives via the Hermite recurrence."""

    decay_class = SCHWARTZ

    def __init__(self, dim=1, sigma=1.0):
        if sigma <= 0:
            raise InvalidInputError("sigma must be positive")
        self.dim = dim
        self.sigma = float(sigma)
        self.name = f"gaussian{{sigma={self.sigma}}}"

    def _axis_deriv(self, k, x):
        s = self.sigma
        t = x / s
        he = _polyval(_hermite(k), t)
        sign = -1.0 if k % 2 else 1.0
        return sign * s ** (-k) * he * _exp(-0.5 * t * t)

    def _partial(self, idx, point):
        out = self._axis_deriv(idx[0], point[0])
        for k, x in zip(idx[1:], point[1:]):
            out = out * self._axis_deriv(k, x)
        return out

    @property
    def factors(self):
        return [Gaussian(dim=1, sigma=self.sigma) for _ in range(self.dim)]


class RationalDecay(FunctionModel):
    """C * (1 + |x|^2)^(-p/2); decays like C / |x|^p.

    Partials are generated once per multi-index by a product/chain-rule
    recurrence over terms  poly(x) * (1+|x|^2)^(-p/2 - s)  and cached.
    """

    def __init__(self, dim=1, amplitude=1.0, power=2.0):
        if power < 1:
            raise InvalidInputError("decay power p must be >= 1")
        self.dim = dim
        self.amplitude = float(amplitude)
        self.power = float(power)
        self.decay_class = VERY_MODERATE if power < 2 else moderate(int(power))
        self.name = f"rational{{C={self.amplitude},p={self.power}}}"
        zero = (0,) * dim
        self._terms = {zero: {(0, zero): self.amplitude}}

    def _term_table(self, idx):
        """dict {(s, mono): coeff} with mono a per-axis exponent tuple."""
        if idx in self._terms:
            return self._terms[idx]
        # differentiate an already-known table along the first reducible axis
        axis = next(i for i, v in enumerate(idx) if v > 0)
        lower = tuple(v - 1 if i == axis else v for i, v in enumerate(idx))
        base = self._term_table(lower)
        out = {}
        for (s, mono), coeff in base.items():
            e = mono[axis]
            if e > 0:
                key = (s, tuple(v - 1 if i == axis else v for i, v in enumerate(mono)))
                out[key] = out.get(key, 0.0) + coeff * e
            key = (s + 1, tuple(v + 1 if i == axis else v for i, v in enumerate(mono)))
            out[key] = out.get(key, 0.0) - coeff * (self.power + 2.0 * s)
        out = {k: v for k, v in out.items() if v != 0.0}
        self._terms[idx] = out
        return out

    def _partial(self, idx, point):
        table = self._term_table(idx)
        u = 1.0
        for x in point:
            u = u + x * x
        base = u ** (-0.5 * self.power)
        smax = max((s for s, _ in table), default=0)
        upow = [base]
        for _ in range(smax):
            upow.append(upow[-1] / u)
        out = 0.0
        for (s, mono), coeff in table.items():
            term = coeff * upow[s]
            for x, e in zip(point, mono):
                if e:
                    term = term * x ** e
            out = out + term
        return out


class Constant(FunctionModel):
    """f == c everywhere; the adversarial no-decay model."""

    decay_class = NO_DECAY

    def __init__(self, dim=1, c=1.0):
        self.dim = dim
        self.c = float(c)
        self.name = f"constant{{c={self.c}}}"

    def _partial(self, idx, point):
        if any(idx):
            return 0.0 * point[0] if _is_array(point[0]) else 0.0
        ones = np.ones_like(point[0]) if _is_array(point[0]) else 1.0
        return self.c * ones


class Shift(FunctionModel):
    """base model translated by a fixed offset."""

    def __init__(self, base, offsets):
        self.base = base
        self.offsets = tuple(float(o) for o in offsets)
        if len(self.offsets) != base.dim:
            raise InvalidInputError("offset length must match model dimension")
        self.dim = base.dim
        self.max_partial_order = base.max_partial_order
        self.decay_class = base.decay_class
        self.name = f"shift{{{','.join(str(o) for o in self.offsets)}}}({base.name})"

    def _partial(self, idx, point):
        moved = tuple(x - o for x, o in zip(point, self.offsets))
        return self.base._partial(idx, moved)

    @property
    def factors(self):
        inner = self.base.factors
        if inner is None:
            return None
        return [Shift(f, (o,)) for f, o in zip(inner, self.offsets)]


class Product(FunctionModel):
    """Tensor product of one-dimensional factor models."""

    def __init__(self, factor_models):
        factor_models = list(factor_models)
        if not factor_models or any(f.dim != 1 for f in factor_models):
            raise InvalidInputError("product takes one-dimensional factors")
        self._factors = factor_models
        self.dim = len(factor_models)
        self.max_partial_order = min(f.max_partial_order for f in factor_models)
        classes = {f.decay_class for f in factor_models}
        self.decay_class = SCHWARTZ if classes == {SCHWARTZ} else min(classes)
        self.name = "product(" + ",".join(f.name for f in factor_models) + ")"

    def _partial(self, idx, point):
        out = self._factors[0]._partial((idx[0],), (point[0],))
        for f, k, x in zip(self._factors[1:], idx[1:], point[1:]):
            out = out * f._partial((k,), (x,))
        return out

    @property
    def factors(self):
        return list(self._factors)


class LaplacianIterate(FunctionModel):
    """(laplacian)^j applied to a base model, as exact partial sums."""

    def __init__(self, base, j):
        if j < 0:
            raise InvalidInputError("iterate count must be >= 0")
        if 2 * j > base.max_partial_order:
            raise PartialOrderError(2 * j, base.max_partial_order)
        self.base = base
        self.iterations = j
        self.dim = base.dim
        self.max_partial_order = base.max_partial_order - 2 * j
        self.decay_class = moderate(2 * j + 1)
        self.name = f"laplacian^{j}({base.name})"
        self._expansion = self._multinomial_terms(base.dim, j)

    @staticmethod
    def _multinomial_terms(dim, j):
        terms = []

        def rec(axis, remaining, alpha):
            if axis == dim - 1:
                full = alpha + (remaining,)
                coeff = math.factorial(j)
                for a in full:
                    coeff //= math.factorial(a)
                terms.append((float(coeff), full))
                return
            for a in range(remaining + 1):
                rec(axis + 1, remaining - a, alpha + (a,))

        rec(0, j, ())
        return terms

    def _partial(self, idx, point):
        out = None
        for coeff, alpha in self._expansion:
            shifted = tuple(i + 2 * a for i, a in zip(idx, alpha))
            term = coeff * self.base._partial(shifted, point)
            out = term if out is None else out + term
        return out


def laplacian_iterate(model, j):
    """(laplacian)^j of a model; j = 0 returns the model itself."""
    if j == 0:
        return model
    return LaplacianIterate(model, j)


@dataclass
class DecayProbeReport:
    decay_power: float
    fitted_constant: float
    tail_slope: float
    passed: bool
    radii: tuple
    ray_count: int


def decay_probe(model, n, radii=None, rays=12, seed=0, slope_tol=0.05):
    """Check |f| * |x|^n stays bounded along random rays.

    Fits the constant as the max of |f| r^n over all samples and flags
    failure when the quantity still grows on the outer half of the radii
    (log-log slope above slope_tol).
    """
    if radii is None:
        radii = np.geomspace(2.0, 1e4, 25)
    radii = np.asarray(sorted(float(r) for r in radii))
    if radii[-1] < 1e3:
        raise InvalidInputError("decay probe needs radii reaching at least 1e3")
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(rays, model.dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    weighted = np.empty((rays, radii.size))
    for i, u in enumerate(dirs):
        for j, r in enumerate(radii):
            v = model.value(tuple(r * u))
            weighted[i, j] = abs(v) * r ** n
    envelope = weighted.max(axis=0)
    fitted = float(envelope.max())
    half = radii.size // 2
    pos = envelope[half:] > 0
    if pos.sum() >= 2:
        slope = float(np.polyfit(np.log(radii[half:][pos]),
                                 np.log(envelope[half:][pos]), 1)[0])
    else:
        slope = -math.inf  # decayed below floating floor: certainly bounded
    passed = bool(np.isfinite(fitted)) and slope <= slope_tol
    return DecayProbeReport(decay_power=float(n), fitted_constant=fitted,
                            tail_slope=slope, passed=passed,
                            radii=tuple(radii), ray_count=rays)


# ---------------------------------------------------------------------------
# declarative model descriptions:  name{key=val,...} with optional (args)
#   gaussian{sigma=1}   rational{C=1,p=4}   constant{c=1}
#   shift{0.5,-1}(gaussian{sigma=1})        product(g1,g2[,g3])
# ---------------------------------------------------------------------------

def parse_model(text, dim):
    expr, rest = _parse_expr(text.strip(), dim)
    if rest.strip():
        raise ModelParseError(f"trailing input {rest!r} in model description")
    return expr


def _split_top(s, sep=","):
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p for p in (q.strip() for q in parts) if p]


def _parse_expr(text, dim):
    name = ""
    i = 0
    while i < len(text) and (text[i].isalnum() or text[i] == "_"):
        name += text[i]
        i += 1
    params, args = {}, None
    if i < len(text) and text[i] == "{":
        j = _matching(text, i, "{", "}")
        for item in _split_top(text[i + 1:j]):
            if "=" in item:
                k, v = item.split("=", 1)
                params[k.strip()] = float(v)
            else:
                params.setdefault("_positional", []).append(float(item))
        i = j + 1
    if i < len(text) and text[i] == "(":
        j = _matching(text, i, "(", ")")
        args = _split_top(text[i + 1:j])
        i = j + 1
    return _build(name.lower(), params, args, dim), text[i:]


def _matching(text, start, open_ch, close_ch):
    depth = 0
    for i in range(start, len(text)):
        if text[i] == open_ch:
            depth += 1
        elif text[i] == close_ch:
            depth -= 1
            if depth == 0:
                return i
    raise ModelParseError(f"unbalanced {open_ch!r} in {text!r}")


def _build(name, params, args, dim):
    positional = params.pop("_positional", [])
    if name in ("gaussian", "rational", "constant") and args:
        raise ModelParseError(f"{name} takes no inner models")
    if name == "gaussian":
        return Gaussian(dim=dim, sigma=params.pop("sigma", 1.0))
    if name == "rational":
        amp = params.pop("c", params.pop("C", 1.0))
        return RationalDecay(dim=dim, amplitude=amp, power=params.pop("p", 4.0))
    if name == "constant":
        return Constant(dim=dim, c=params.pop("c", 1.0))
    if name == "shift":
        if not args or len(args) != 1:
            raise ModelParseError("shift{...}(inner) needs exactly one inner model")
        inner = parse_model(args[0], dim)
        offsets = positional or [params.pop(k) for k in sorted(params)]
        if len(offsets) != dim:
            raise ModelParseError(f"shift needs {dim} offsets, got {len(offsets)}")
        return Shift(inner, offsets)
    if name == "product":
        if not args:
            raise ModelParseError("product(...) needs factor models")
        if len(args) != dim:
            raise ModelParseError(f"product needs {dim} factors for dim {dim}")
        return Product([parse_model(a, 1) for a in args])
    if name == "laplacian":
        if not args or len(args) != 1:
            raise ModelParseError("laplacian{j=..}(inner) needs one inner model")
        j = int(params.pop("j", 1))
        return laplacian_iterate(parse_model(args[0], dim), j)
    raise ModelParseError(f"unknown model {name!r}")
