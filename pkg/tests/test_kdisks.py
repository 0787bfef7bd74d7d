import numpy as np
import pytest

from conftest import dataset_from_endpoints
from trajtok import AgentType, NormalizedDataset, TokenSource, build_kdisks_vocab, synthetic_dataset
from trajtok.errors import EmptyDataset
from trajtok.kdisks import greedy_disk_cover


def brute_cover(xy, radius, target, order):
    alive = np.ones(len(xy), dtype=bool)
    picks = []
    for idx in order:
        if not alive[idx]:
            continue
        picks.append(idx)
        if len(picks) == target:
            break
        for n in range(len(xy)):
            if np.hypot(*(xy[n] - xy[idx])) <= radius:
                alive[n] = False
    return picks


@pytest.fixture(scope="module")
def data():
    return synthetic_dataset(1500, AgentType.VEHICLE, seed=4)


def test_single_trajectory():
    d = dataset_from_endpoints([(2.0, 0.3)])
    v = build_kdisks_vocab(d, 1, 0.5, seed=0)
    assert len(v) == 1 and v.tokens[0].trajectory == d[0]
    assert v.tokens[0].source is TokenSource.SAMPLED


def test_tight_cluster_single_pick():
    rng = np.random.default_rng(0)
    ends = [(2.0 + dx, 0.3 + dy) for dx, dy in rng.uniform(-0.02, 0.02, size=(40, 2))]
    v = build_kdisks_vocab(dataset_from_endpoints(ends), 10, 0.1, seed=3)
    assert len(v) == 1


def test_matches_brute_force_cover(data):
    xy = data.endpoints[:, :2]
    rng_a = np.random.default_rng(9)
    rng_b = np.random.default_rng(9)
    fast = greedy_disk_cover(xy, 0.3, 10_000, rng_a)
    slow = brute_cover(xy, 0.3, 10_000, rng_b.permutation(len(xy)))
    assert list(fast) == slow


def test_coverage_when_not_truncated(data):
    v = build_kdisks_vocab(data, 100_000, 0.2, rounds=2, seed=1)
    ends = data.endpoints[:, :2]
    tok = v.endpoints[:, :2]
    dist = np.sqrt(((ends[:, None, :] - tok[None, :, :]) ** 2).sum(-1)).min(axis=1)
    assert np.all(dist <= 0.2)
    assert v.report["covered"] == len(data)


def test_pairwise_separation(data):
    v = build_kdisks_vocab(data, 100_000, 0.25, seed=2)
    tok = v.endpoints[:, :2]
    d = np.sqrt(((tok[:, None] - tok[None]) ** 2).sum(-1))
    np.fill_diagonal(d, np.inf)
    assert d.min() > 0.25


def test_target_size_truncates(data):
    assert len(build_kdisks_vocab(data, 7, 0.05, seed=0)) == 7


def test_tokens_are_dataset_trajectories(data):
    v = build_kdisks_vocab(data, 300, 0.1, rounds=3, seed=5)
    rows = {p.tobytes() for p in data.points}
    assert all(t.trajectory.points.tobytes() in rows for t in v.tokens)


def test_seed_determinism(data):
    a = build_kdisks_vocab(data, 200, 0.1, rounds=3, seed=8)
    b = build_kdisks_vocab(data, 200, 0.1, rounds=3, seed=8)
    c = build_kdisks_vocab(data, 200, 0.1, rounds=3, seed=9)
    assert a == b
    assert a != c


def test_best_round_maximizes_coverage(data):
    v = build_kdisks_vocab(data, 50, 0.3, rounds=5, seed=0)
    singles = [build_kdisks_vocab(data, 50, 0.3, rounds=1, seed=0).report["covered"]]
    assert v.report["covered"] >= singles[0]
    assert v.build_params["tokenizer"] == "kdisks-approx"


@pytest.mark.parametrize("kwargs", [dict(target_size=0, radius=0.1), dict(target_size=3, radius=0.0),
                                    dict(target_size=3, radius=0.1, rounds=0)])
def test_bad_params(data, kwargs):
    with pytest.raises(ValueError):
        build_kdisks_vocab(data, **kwargs)


def test_empty():
    with pytest.raises(EmptyDataset):
        build_kdisks_vocab(NormalizedDataset.empty(), 3, 0.1, agent_type="vehicle")
