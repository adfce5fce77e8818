"""Uniform integrability and tightness certificates built from nets.

Both constructions rely on Chebyshev's inequality, so they need a norm with
an exponent (L^p, or a weighted-L^q :class:`~lpcompact.bfspace.DiscreteBFS`).
"""
from __future__ import annotations

import math

import numpy as np

from .ambient import CompactCover, enlarge_cover, intersect_covers
from .bochner import as_prefix, pairwise_distances, traversal
from .criteria import TightnessCertificate, UICertificate, outside_measures, tail_norms
from .errors import BudgetExhausted, ChainViolation
from .measure import as_norm


def _exponent(norm):
    p = getattr(norm, "exponent", None)
    if p is None:
        raise TypeError(f"{norm!r} has no exponent; Chebyshev-based constructions need L^p")
    return float(p)


def _first_radius(prefix, norm, members, eps):
    """Smallest integer r >= 1 with every net member's tail norm below eps."""
    sub = prefix.take(members)

    def ok(r):
        return float(tail_norms(sub, norm, r).max()) < eps

    hi = max(1, math.floor(float(sub.pointwise_norms.max())) + 1)
    if ok(1):
        return 1
    lo = 1  # ok(lo) is false, ok(hi) is true; tail norms are nonincreasing in r
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def ui_from_net(prefix, p, eps):
    """Certificate at radius ``2r`` with bound ``4 * eps``.

    ``r`` is the first integer at which every member of a greedy eps-net of
    the prefix has tail norm below ``eps``.
    """
    prefix = as_prefix(prefix)
    norm = as_norm(p)
    _exponent(norm)
    if not eps > 0:
        raise ValueError("eps must be positive")
    D = pairwise_distances(prefix, norm)
    tr = traversal(prefix, norm, D)
    net_pos = np.sort(tr.net_positions(eps))
    r = _first_radius(prefix, norm, net_pos, eps)
    measured = tail_norms(prefix, norm, 2.0 * r)
    bound = 4.0 * eps
    if not float(measured.max()) <= bound + 1e-9:
        raise ChainViolation(f"tail norm {measured.max()!r} at 2r exceeds 4*eps={bound!r}")
    audit = {
        "eps": float(eps), "net": [int(i) for i in prefix.indices[net_pos]], "r": r,
        "net_tails": [float(t) for t in tail_norms(prefix.take(net_pos), norm, r)],
        "measured_modulus": float(measured.max()),
    }
    return UICertificate(2.0 * r, bound, norm, audit)


def first_stage(p, eps):
    """Smallest integer n >= 1 with ``2^(2 - p n) < eps``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    n = max(1, math.floor((2.0 - math.log2(eps)) / p))
    while not 2.0 ** (2.0 - p * n) < eps:
        n += 1
    while n > 1 and 2.0 ** (2.0 - p * (n - 1)) < eps:
        n -= 1
    return n


def _mass_greedy_values(space, values, budget):
    """Values on the heaviest atoms until the leftover mass is at most ``budget``."""
    order = np.argsort(-space.weights, kind="stable")
    w = space.weights[order]
    left = [math.fsum(w[k:]) for k in range(len(w) + 1)]
    k = next(k for k, m in enumerate(left) if m <= budget)
    return values[order[:k]]


def tightness_from_nets(prefix, p, eps, n_max=None):
    """Finite cover K with ``sup_f mu(f not in K) <= 2^(2 - p n0) < eps``.

    For each stage n the prefix gets a greedy 2^(-2n)-net; each net member
    contributes its values on the heaviest atoms until at most 2^(-pn) mass
    is left, these values form K_n, and L_n is K_n enlarged by 2^(-n).  The
    returned cover contains the intersection of the L_n.
    """
    prefix = as_prefix(prefix)
    norm = as_norm(p)
    pe = _exponent(norm)
    n0 = first_stage(pe, eps)
    n_max = n0 + 20 if n_max is None else int(n_max)
    if n_max < n0:
        raise BudgetExhausted(f"n_max={n_max} is below the first stage n0={n0}", 0.0)
    space, amb = prefix.space, prefix.ambient
    D = pairwise_distances(prefix, norm)
    tr = traversal(prefix, norm, D)

    stages, layers = [], []
    for n in range(n0, n_max + 1):
        net_pos = np.sort(tr.net_positions(2.0 ** (-2 * n)))
        budget = 2.0 ** (-pe * n)
        vals = [_mass_greedy_values(space, prefix.values[j], budget) for j in net_pos]
        Kn = np.unique(np.vstack(vals), axis=0)
        Ln = enlarge_cover(CompactCover(amb, Kn, 0.0), 2.0 ** (-n))
        deficiency = float(outside_measures(prefix, Ln).max())
        stage_bound = 2.0 ** (1.0 - pe * n)
        if not deficiency <= stage_bound + 1e-12:
            raise ChainViolation(f"stage {n}: deficiency {deficiency!r} > 2^(1-pn)={stage_bound!r}")
        layers.append(Ln)
        stages.append({"n": n, "net_size": int(len(net_pos)), "K_size": int(len(Kn)),
                       "L_radius": Ln.radius, "deficiency": deficiency,
                       "stage_bound": stage_bound})

    handle = intersect_covers(layers)
    cover = handle.over_approximation()
    partial = math.fsum(2.0 ** (1.0 - pe * n) for n in range(n0, n_max + 1))
    certified = 2.0 ** (2.0 - pe * n0)
    measured = float(outside_measures(prefix, cover).max())
    exact_measured = float(
        ((~handle.contains(prefix.values)).astype(np.float64) @ space.weights).max()
    )
    if not (measured <= exact_measured + 1e-12 and exact_measured <= partial + 1e-12
            and partial <= certified and certified < eps):
        raise ChainViolation("tightness series bound fails")
    audit = {"eps": float(eps), "n0": n0, "n_max": n_max, "stages": stages,
             "partial_sum": partial, "intersection_deficiency": exact_measured,
             "cover_deficiency": measured, "cover_size": len(cover)}
    return TightnessCertificate(cover, certified, audit)
