"""Parameter grids kept away from chart poles and box edges."""

import os
from concurrent.futures import ThreadPoolExecutor
from itertools import product

import numpy as np
from scipy.stats import qmc

GRID_MARGIN = 0.1


def interior_box(surface, margin=GRID_MARGIN):
    box = surface.domain_box.copy()
    width = box[:, 1] - box[:, 0]
    m = np.minimum(margin, 0.25 * width)
    box[:, 0] += m
    box[:, 1] -= m
    return box


def chebyshev_nodes(lo, hi, k):
    """``k`` Chebyshev-Gauss nodes on ``[lo, hi]``, increasing (endpoints excluded)."""
    j = np.arange(k)
    x = np.cos((2 * j + 1) * np.pi / (2 * k))[::-1]
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * x


def base_point(surface, margin=GRID_MARGIN):
    """A generic interior point (not the box centre, which is often special)."""
    box = interior_box(surface, margin)
    return box[:, 0] + 0.4371 * (box[:, 1] - box[:, 0])


def tensor_grid(surface, counts, base=None, margin=GRID_MARGIN):
    """Chebyshev tensor grid over the parameters in ``counts`` (index -> nodes).

    Other parameters stay at ``base``.  Enumeration order is lexicographic
    in the sorted parameter indices, so output is deterministic.
    """
    box = interior_box(surface, margin)
    base = base_point(surface, margin) if base is None else np.asarray(base, dtype=float)
    idx = sorted(counts)
    axes = [chebyshev_nodes(box[i, 0], box[i, 1], counts[i]) for i in idx]
    pts = []
    for combo in product(*axes):
        u = base.copy()
        u[idx] = combo
        pts.append(u)
    return pts


def halton_grid(surface, n_points, margin=GRID_MARGIN, seed=0):
    """Deterministic low-discrepancy "generic" points in the interior box."""
    box = interior_box(surface, margin)
    sampler = qmc.Halton(d=surface.dim_domain, scramble=True, seed=seed)
    unit = sampler.random(n_points)
    return list(qmc.scale(unit, box[:, 0], box[:, 1]))


def thread_count():
    cap = os.environ.get("BCLAB_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, min(n, int(cap)))
        except ValueError:
            pass
    return n


def grid_map(fn, points):
    """``[fn(u) for u in points]``, in order, on up to ``BCLAB_THREADS`` threads."""
    points = list(points)
    workers = min(thread_count(), len(points))
    if workers <= 1:
        return [fn(u) for u in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))
