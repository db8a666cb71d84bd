"""The polynomial layer: per-variable factors X_m and X'_m, the symmetrized
weights P and P' with their eta-dependent prefactor, monomial symmetric
polynomials, biorthogonality norms, window coefficients, and the drivers
for the combinatorial identities built out of them.

Symmetrized sums are evaluated term by term over all ell! permutations; no
closed-form simplification is attempted, which keeps every evaluation an
exact transcription of the defining sum.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import permutations

from .errors import DegenerateInputError, UsageError
from .exactnum import scalar_str
from .partitions import (
    aligned_coords, enumerate_partitions, enumerate_window, kappa, x_point)
from .reporting import run_trials


@dataclass(frozen=True)
class PolyParams:
    """Ground parameters x_1..x_n, y_1..y_n, eta for fixed ell, n.

    eta^s != 1 for 1 <= s <= ell, so symmetrization prefactors and norms
    have nonzero denominators.
    """
    x: tuple
    y: tuple
    eta: object
    ell: int
    n: int
    field: object


def eta_constraint(one, ell):
    return lambda v: all(v ** s != one for s in range(1, max(ell, 2) + 1))


def sample_poly_params(sampler, ell, n, constrain=None):
    """Draw admissible parameters; `constrain=(i, j)` then overwrites
    x_j := eta^(ell-1) y_i, exactly matching the theorem hypothesis."""
    fld = sampler.field
    eta = sampler.draw((eta_constraint(fld.one, ell),), "eta")
    xy = sampler.draw_distinct(2 * n, (), "x,y")
    x, y = list(xy[:n]), list(xy[n:])
    if constrain is not None:
        i, j = constrain
        x[j - 1] = eta ** (ell - 1) * y[i - 1]
    return PolyParams(tuple(x), tuple(y), eta, ell, n, fld)


def sample_t(sampler, ell):
    return tuple(sampler.draw_distinct(ell, (), "t"))


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

def x_factor(u, m, params, primed=False):
    """X_m(u) = u prod_{j<m}(u - y_j) prod_{k>m}(u - x_k); the primed
    variant drops the leading u and swaps the roles of x and y."""
    x, y = params.x, params.y
    out = params.field.one if primed else u
    for j in range(1, m):
        out = out * (u - (x[j - 1] if primed else y[j - 1]))
    for k in range(m + 1, params.n + 1):
        out = out * (u - (y[k - 1] if primed else x[k - 1]))
    return out


def r_lambda(lam, eta, one):
    """prod_m prod_{s=1}^{w_m} (1 - eta)/(1 - eta^s)."""
    out = one
    for w in lam.multiplicities():
        for s in range(2, w + 1):
            out = out * (one - eta) / (one - eta ** s)
    return out


def _pair_ratio(ta, tb, eta, zero, primed):
    den = ta - tb
    if den == zero:
        raise DegenerateInputError("coincident t coordinates in symmetrized sum")
    num = (eta * ta - tb) if primed else (ta - eta * tb)
    return num / den


def weight(lam, t, params, primed=False):
    """P (or P') at an explicit point: the full sum over S_ell."""
    ell = lam.ell
    if len(t) != ell:
        raise UsageError("point has %d coordinates, partition has %d parts" % (len(t), ell))
    zero, one = params.field.zero, params.field.one
    total = zero
    for sigma in permutations(range(ell)):
        term = one
        for a in range(ell):
            term = term * x_factor(t[sigma[a]], lam.entries[a], params, primed)
        for a in range(ell):
            for b in range(a + 1, ell):
                term = term * _pair_ratio(t[sigma[a]], t[sigma[b]], params.eta, zero, primed)
        total = total + term
    return r_lambda(lam, params.eta, one) * total


def weight_at_special(lam, params, kind, primed=False):
    """P (or P') at the partition's own special point, via the single
    surviving term.

    The surviving permutation is the identity once the coordinates are
    listed in the order aligned with the (weakly decreasing) parts; the
    naive sum has 0/0-free but wasteful cancelling terms there, so the
    shortcut is both the licensed and the cheap route.
    """
    t = aligned_coords(lam, params, kind, primed=primed)
    zero, one = params.field.zero, params.field.one
    term = one
    for a, part in enumerate(lam.entries):
        term = term * x_factor(t[a], part, params, primed)
    for a in range(lam.ell):
        for b in range(a + 1, lam.ell):
            term = term * _pair_ratio(t[a], t[b], params.eta, zero, primed)
    return r_lambda(lam, params.eta, one) * term


def monomial_symmetric(exponents, t, one, zero):
    """(1/prod_k mult_k!) sum_sigma t_{sigma_1}^{e_1} ... ; exponents may
    repeat and may be zero (the latter is used by the residue-sum sweeps)."""
    norm = 1
    for c in Counter(exponents).values():
        norm *= math.factorial(c)
    total = zero
    for sigma in permutations(range(len(t))):
        term = one
        for a, e in enumerate(exponents):
            term = term * t[sigma[a]] ** e
        total = total + term
    return total / norm


def q_monomial(lam, t, params):
    return monomial_symmetric(lam.entries, t, params.field.one, params.field.zero)


def norm_n(lam, params):
    """N = prod_m prod_{s=1}^{w_m} (1 - eta^s)(x_m - eta^(s-1) y_m)/(1 - eta)."""
    one, eta = params.field.one, params.eta
    out = one
    for m, w in enumerate(lam.multiplicities(), start=1):
        for s in range(1, w + 1):
            out = out * (one - eta ** s) * (params.x[m - 1] - eta ** (s - 1) * params.y[m - 1]) / (one - eta)
    return out


def c_coeff(lam, i, j, params):
    """The window coefficient attached to lam inside the window [i, j]."""
    if lam.entries and not (i <= lam.entries[-1] and lam.entries[0] <= j):
        raise UsageError("partition %r lies outside the window [%d, %d]" % (lam.entries, i, j))
    one, eta = params.field.one, params.eta
    x, y = params.x, params.y
    mults = lam.multiplicities()
    ell = lam.ell
    wi = mults[i - 1]
    wj = mults[j - 1]
    out = (-one) ** wi * eta ** (wj * (wj - 1) // 2)
    for k in range(i + 1, j):
        for s in range(mults[k - 1]):
            out = out * (x[k - 1] - eta ** s * y[k - 1])
    for a in range(1, ell + 1):
        la = lam.entries[a - 1]
        lead = eta ** (ell - a) * y[i - 1]
        for k in range(i + 1, la):
            out = out * (lead - x[k - 1])
        for m in range(la + 1, j):
            out = out * (lead - y[m - 1])
    return out


# ---------------------------------------------------------------------------
# identity values
# ---------------------------------------------------------------------------

def jing_value(eta, t, one, zero, mutate=False):
    """The double sum over k and S_ell whose vanishing is the base
    combinatorial identity; a mutated run perturbs the k = 1 prefactor."""
    ell = len(t)
    total = zero
    for k in range(ell + 1):
        pref = one
        for s in range(k):
            pref = pref * (eta ** ell - eta ** s) / (one - eta ** (s + 1))
        if mutate and k == 1:
            pref = pref * 2
        inner = zero
        for sigma in permutations(range(ell)):
            term = one
            for a in range(k):
                term = term * (t[sigma[a]] - one)
            for b in range(k, ell):
                term = term * (t[sigma[b]] - eta ** (ell - 1))
            for a in range(ell):
                for b in range(a + 1, ell):
                    term = term * _pair_ratio(t[sigma[a]], t[sigma[b]], eta, zero, False)
            inner = inner + term
        total = total + pref * inner
    return total


def id1_value(params, t, i, j, mutate=False):
    """sum over the window of c * P at the point t."""
    zero = params.field.zero
    total = zero
    for idx, lam in enumerate(enumerate_window(params.ell, i, j, params.n)):
        c = c_coeff(lam, i, j, params)
        if mutate and idx == 0:
            c = c * 2
        total = total + c * weight(lam, t, params)
    return total


def id2_value(params, t, j, mutate=False):
    """sum over all partitions of P'(x |> kappa) * N * P at the point t."""
    zero = params.field.zero
    kap = kappa(params.ell, j, params.n)
    kap_pt = x_point(kap, params)
    total = zero
    for idx, lam in enumerate(enumerate_partitions(params.ell, params.n)):
        coeff = weight(lam, kap_pt.coords, params, primed=True) * norm_n(lam, params)
        if mutate and idx == 0:
            coeff = coeff * 2
        total = total + coeff * weight(lam, t, params)
    return total


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

def verify_jing(cfg):
    if cfg.ell < 1:
        raise UsageError("jing needs ell >= 1")
    fld = cfg.scalar_field()

    def trial(sampler):
        eta = sampler.draw((eta_constraint(fld.one, cfg.ell),), "eta")
        t = sample_t(sampler, cfg.ell)
        val = jing_value(eta, t, fld.one, fld.zero, mutate=cfg.mutate)
        return scalar_str(val), val == fld.zero, []

    return run_trials(cfg, ["eta^s != 1 for s = 1..ell", "t pairwise distinct"], trial)


def verify_id(cfg):
    """Driver for both window identities (check name id1 or id2)."""
    if cfg.ell < 1:
        raise UsageError("%s needs ell >= 1" % cfg.check)
    if not (1 <= cfg.i < cfg.j <= cfg.n):
        raise UsageError("%s needs 1 <= i < j <= n" % cfg.check)
    fld = cfg.scalar_field()
    constrain = None if cfg.no_constraint else (cfg.i, cfg.j)

    def trial(sampler):
        params = sample_poly_params(sampler, cfg.ell, cfg.n, constrain)
        t = sample_t(sampler, cfg.ell)
        if cfg.check == "id1":
            val = id1_value(params, t, cfg.i, cfg.j, mutate=cfg.mutate)
        else:
            val = id2_value(params, t, cfg.j, mutate=cfg.mutate)
        return scalar_str(val), val == fld.zero, []

    desc = ["eta^s != 1 for s = 1..ell", "x,y nonzero pairwise distinct",
            "t pairwise distinct"]
    if constrain is not None:
        desc.append("imposed x_j = eta^(ell-1) y_i")
    else:
        desc.append("constraint lifted (negative control)")
    return run_trials(cfg, desc, trial)
