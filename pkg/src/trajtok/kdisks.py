"""k-disks baseline tokenizer (approximation).

Randomized greedy disk cover over trajectory endpoints: walk the dataset in
a random order, keep a trajectory whenever its endpoint is farther than
``radius`` from every endpoint kept so far. Several independent rounds are
run and the one covering the most endpoints wins. Tokens are verbatim
dataset trajectories, so the vocabulary can never reach beyond the data.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .core import NormalizedDataset
from .errors import EmptyDataset
from .grid import _single_agent_type, bin_endpoints, default_grid
from .vocab import GridSpec, TokenSource, Vocabulary, make_vocabulary

TOKENIZER_TAG = "kdisks-approx"


def greedy_disk_cover(xy: np.ndarray, radius: float, target_size: int,
                      rng: np.random.Generator) -> np.ndarray:
    """Indices of picked points, in pick order."""
    n = xy.shape[0]
    tree = cKDTree(xy)
    removed = np.zeros(n, dtype=bool)
    picks = []
    for idx in rng.permutation(n):
        if removed[idx]:
            continue
        picks.append(idx)
        if len(picks) >= target_size:
            break
        removed[tree.query_ball_point(xy[idx], radius)] = True
    return np.asarray(picks, dtype=np.int64)


def cover_count(xy: np.ndarray, centers: np.ndarray, radius: float) -> int:
    """How many points of ``xy`` lie within ``radius`` of some center."""
    if centers.shape[0] == 0:
        return 0
    dist, _ = cKDTree(centers).query(xy, k=1)
    return int(np.count_nonzero(dist <= radius))


def build_kdisks_vocab(d: NormalizedDataset, target_size: int, radius: float, rounds: int = 1,
                       seed: int = 0, grid: GridSpec | None = None, agent_type=None) -> Vocabulary:
    if target_size < 1:
        raise ValueError(f"target_size must be >= 1, got {target_size}")
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")
    d, agent_type = _single_agent_type(d, agent_type)
    if len(d) == 0:
        raise EmptyDataset("dataset is empty")
    if grid is None:
        grid = default_grid(agent_type)

    xy = d.endpoints[:, :2]
    best, best_cover = None, -1
    # strict '>' keeps the lowest round index on ties
    for r, child in enumerate(np.random.SeedSequence(seed).spawn(rounds)):
        picks = greedy_disk_cover(xy, radius, target_size, np.random.default_rng(child))
        covered = cover_count(xy, xy[picks], radius)
        if covered > best_cover:
            best, best_cover, best_round = picks, covered, r

    ends = d.endpoints[best]
    i, j, inside = bin_endpoints(grid, ends[:, 0], ends[:, 1])
    cells = [(int(a), int(b)) if ok else None for a, b, ok in zip(i, j, inside)]
    params = {"tokenizer": TOKENIZER_TAG, "target_size": int(target_size), "radius": float(radius),
              "rounds": int(rounds), "seed": int(seed), "L": int(d.length)}
    report = {"n_input": len(d), "covered": best_cover, "best_round": best_round,
              "vocab_size": int(best.size)}
    return make_vocabulary(agent_type, grid, list(d.points[best]), cells,
                           [TokenSource.SAMPLED] * best.size, params, report)
