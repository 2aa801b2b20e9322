"""Empirical probe of the root-free-collar claim for collar polynomials.

For n >= 3 the claim under test is that, for generic jets and large m,
the n-th derivative of the degree-(2n-1) collar polynomial has no roots
in [m, m+1/m^d]; equivalently that the roots, scaled by m, stay away
from 1.  The scan isolates roots of concrete polynomials in exact
arithmetic, records the scaled-root locations and their distance to 1,
and emits EVIDENCE-ONLY output; it never asserts the claim.  Trials
whose sign class is definite at some m but indefinite at a larger m are
surfaced as counterexample candidates.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import exactpoly as xp
from .collar import BoundaryJet, Collar, SignClass, collar_polynomial
from .errors import InvalidInputError

DEFAULT_M_SCHEDULE = tuple(float(2 ** j) for j in range(4, 15, 2))


@dataclass
class ConjectureTrial:
    n: int
    seed: int
    jet: tuple
    collar_exponent: int
    m_schedule: tuple
    sign_classes: tuple = ()
    scaled_roots: tuple = ()  # per m, sorted tuple of real roots / m
    min_distance_to_one: float = math.inf
    flagged: bool = False

    def to_dict(self):
        return {
            "n": self.n,
            "seed": self.seed,
            "jet": list(self.jet),
            "collar_exponent": self.collar_exponent,
            "m_schedule": list(self.m_schedule),
            "sign_classes": list(self.sign_classes),
            "scaled_roots": [list(r) for r in self.scaled_roots],
            "min_distance_to_one": self.min_distance_to_one,
            "flagged": self.flagged,
        }


def _scaled_roots(poly, m):
    """All real roots of h^(n), divided by m.

    The coefficients are produced exactly in the collar variable, then
    rescaled to t = x/m, where they share a common magnitude and the
    companion-matrix root finder is well conditioned.
    """
    p = poly.nth_derivative_coeffs()  # exact, in s = x - m
    if not p:
        return (), False
    mf = xp.as_fraction(m)
    # shift to x = s + m, then scale t = x/m
    shifted = []
    for j, c in enumerate(p):
        # contribution of c * (x - m)^j to x-basis
        for i in range(j + 1):
            coeff = c * math.comb(j, i) * (-mf) ** (j - i)
            while len(shifted) <= i:
                shifted.append(xp.as_fraction(0))
            shifted[i] += coeff
    t_coeffs = [c * mf ** i for i, c in enumerate(shifted)]
    floats = np.array([float(c) for c in t_coeffs])
    scale = np.max(np.abs(floats))
    if scale == 0.0:
        return (), False
    floats /= scale
    flagged = bool(abs(floats[-1]) < 1e-12)  # leading coefficient collapsed
    roots = np.roots(floats[::-1])
    real = sorted(float(r.real) for r in roots
                  if abs(r.imag) <= 1e-9 * (1.0 + abs(r)))
    return tuple(real), flagged


def run_trial(n, jet, m_schedule, collar_exponent=1, seed=-1):
    jet = BoundaryJet(tuple(jet))
    classes = []
    roots_per_m = []
    min_dist = math.inf
    flagged = False
    for m in m_schedule:
        poly = collar_polynomial(jet, Collar(float(m), float(m) ** (-collar_exponent)))
        classes.append(poly.sign_class().value)
        roots, flag = _scaled_roots(poly, float(m))
        flagged = flagged or flag
        roots_per_m.append(tuple(roots))
        for t in roots:
            min_dist = min(min_dist, abs(t - 1.0))
    return ConjectureTrial(
        n=n, seed=seed, jet=jet.values, collar_exponent=collar_exponent,
        m_schedule=tuple(float(m) for m in m_schedule),
        sign_classes=tuple(classes), scaled_roots=tuple(roots_per_m),
        min_distance_to_one=min_dist, flagged=flagged)


def _monotonicity_violations(trial):
    """Indices (i, j) with a definite class at m_i but not at m_j > m_i."""
    out = []
    definite = [c in (SignClass.POSITIVE_DEFINITE.value,
                      SignClass.NEGATIVE_DEFINITE.value)
                for c in trial.sign_classes]
    for i in range(len(definite)):
        if definite[i]:
            for j in range(i + 1, len(definite)):
                if not definite[j]:
                    out.append((i, j))
    return out


def _random_jet(rng, n):
    """Uniform jet on [-10, 10]^n with |a_0| >= 0.1 (a_0 drives the scaling)."""
    vals = rng.uniform(-10.0, 10.0, n)
    while abs(vals[0]) < 0.1:
        vals[0] = rng.uniform(-10.0, 10.0)
    return tuple(float(v) for v in vals)


def conjecture_scan(n_range, trials_per_n, m_schedule=DEFAULT_M_SCHEDULE,
                    seed=0, collar_exponent=1):
    """Seeded scan across orders; deterministic bytes for a fixed seed."""
    n_range = sorted(int(n) for n in n_range)
    if any(n < 2 or n > 10 for n in n_range):
        raise InvalidInputError("orders n must lie in 2..10")
    if trials_per_n < 1:
        raise InvalidInputError("need at least one trial per order")
    m_schedule = tuple(float(m) for m in m_schedule)
    root = np.random.SeedSequence(seed)
    per_n = {}
    counterexamples = []
    for n in n_range:
        trials = []
        for t in range(trials_per_n):
            trial_seed = int(np.random.SeedSequence([seed, n, t]).generate_state(1)[0])
            rng = np.random.default_rng(trial_seed)
            jet = _random_jet(rng, n)
            trial = run_trial(n, jet, m_schedule,
                              collar_exponent=collar_exponent, seed=trial_seed)
            trials.append(trial)
            for (i, j) in _monotonicity_violations(trial):
                counterexamples.append({
                    "n": n, "trial_seed": trial_seed, "jet": list(jet),
                    "definite_at_m": m_schedule[i],
                    "indefinite_at_m": m_schedule[j],
                })
        definite_last = sum(
            1 for tr in trials
            if tr.sign_classes[-1] in ("positive_definite", "negative_definite",
                                       "identically_zero"))
        dists = [tr.min_distance_to_one for tr in trials
                 if math.isfinite(tr.min_distance_to_one)]
        per_n[n] = {
            "trials": [tr.to_dict() for tr in trials],
            "definite_fraction_at_largest_m": definite_last / trials_per_n,
            "min_scaled_root_distance_to_one": min(dists) if dists else None,
            "flagged_trials": sum(1 for tr in trials if tr.flagged),
        }
    return {
        "status": "EVIDENCE_ONLY",
        "seed": seed,
        "collar_exponent": collar_exponent,
        "m_schedule": list(m_schedule),
        "trials_per_n": trials_per_n,
        "orders": {str(n): per_n[n] for n in n_range},
        "counterexample_candidates": counterexamples,
    }


def scan_to_json(scan):
    """Canonical byte representation (reports are reproducible by seed)."""
    return json.dumps(scan, sort_keys=True, indent=2)


@dataclass
class ScaledRootTable:
    n: int
    jet: tuple
    m_schedule: tuple
    rows: list = field(default_factory=list)  # per m: sorted scaled roots
    extrapolated: tuple = ()
    flagged: bool = False

    def to_dict(self):
        return {"n": self.n, "jet": list(self.jet),
                "m_schedule": list(self.m_schedule),
                "rows": [list(r) for r in self.rows],
                "extrapolated": list(self.extrapolated),
                "flagged": self.flagged}


def scaled_root_table(n, jet, m_schedule, collar_exponent=1):
    """Scaled roots per schedule entry plus a 1/m Richardson extrapolation.

    Extrapolation pairs roots by sorted position between the last two
    schedule entries; a count mismatch flags the table instead of
    guessing a pairing.
    """
    trial = run_trial(n, jet, m_schedule, collar_exponent=collar_exponent)
    rows = [list(r) for r in trial.scaled_roots]
    table = ScaledRootTable(n=n, jet=tuple(float(v) for v in jet),
                            m_schedule=tuple(float(m) for m in m_schedule),
                            rows=rows, flagged=trial.flagged)
    if len(rows) >= 2 and len(rows[-1]) == len(rows[-2]) and rows[-1]:
        m1, m2 = m_schedule[-2], m_schedule[-1]
        extr = []
        for t1, t2 in zip(rows[-2], rows[-1]):
            extr.append((m2 * t2 - m1 * t1) / (m2 - m1))
        table.extrapolated = tuple(extr)
    elif rows and rows[-1]:
        table.flagged = True
    return table
