import math

import numpy as np
import pytest

from trajtok import AgentType, build_kdisks_vocab, build_vocabulary, smoothing_targets_uniform
from trajtok import io
from trajtok.errors import ParseError
from trajtok.synthetic import gen_synthetic


def record(agent="vehicle", rid="r0", poses=None):
    poses = poses or [(3, 4, 0.7)] * 6
    return ",".join([agent, rid] + [repr(float(v)) for p in poses for v in p])


def test_empty_file(tmp_path):
    f = tmp_path / "d.txt"
    f.write_text("")
    d = io.parse_dataset(f)
    assert len(d) == 0 and d.drop_count == 0


def test_stationary_record(tmp_path):
    f = tmp_path / "d.txt"
    f.write_text(io.DATASET_HEADER + "\n" + record() + "\n")
    d = io.parse_dataset(f)
    assert len(d) == 1
    assert np.allclose(d.points[0], 0.0, atol=1e-15)


def test_lenient_skips_malformed(tmp_path):
    f = tmp_path / "d.txt"
    lines = [io.DATASET_HEADER, record(rid="a"), "vehicle,b,1,2,3", record(rid="c"),
             record(agent="spaceship", rid="d"), "# comment", "",
             record(rid="e", poses=[(0, 0, 0)] * 5 + [(math.nan, 0, 0)])]
    f.write_text("\n".join(lines) + "\n")
    d = io.parse_dataset(f, strict=False)
    assert len(d) == 2 and d.drop_count == 3
    with pytest.raises(ParseError) as exc:
        io.parse_dataset(f)
    assert exc.value.line == 3
    assert ":3:" in str(exc.value)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        io.parse_dataset(tmp_path / "nope.txt")


def test_dataset_round_trip(tmp_path):
    recs = gen_synthetic(50, "cyclist", seed=3, noise_fraction=0.1)
    f = tmp_path / "d.txt"
    io.write_dataset(f, recs.agent_types, recs.ids, recs.states)
    back = io.read_records(f)
    assert back.ids == recs.ids
    assert np.array_equal(back.states, recs.states)
    assert all(t is AgentType.CYCLIST for t in back.agent_types)


@pytest.mark.parametrize("kind", ["trajtok", "kdisks"])
def test_vocabulary_round_trip_bit_exact(tmp_path, vehicle_data, kind):
    if kind == "trajtok":
        v = build_vocabulary(vehicle_data)
    else:
        v = build_kdisks_vocab(vehicle_data, 400, 0.1, rounds=2, seed=7)
    f = tmp_path / "v.txt"
    io.write_vocabulary(f, v)
    w = io.read_vocabulary(f)
    assert w == v
    assert w.points.tobytes() == v.points.tobytes()
    assert io.format_vocabulary(w) == f.read_text()


def test_vocabulary_bad_header(tmp_path):
    f = tmp_path / "v.txt"
    f.write_text("hello\n")
    with pytest.raises(ParseError):
        io.read_vocabulary(f)


def test_vocabulary_truncated(tmp_path, vehicle_data):
    v = build_vocabulary(vehicle_data)
    f = tmp_path / "v.txt"
    io.write_vocabulary(f, v)
    lines = f.read_text().splitlines()
    f.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(ParseError):
        io.read_vocabulary(f)


def test_ids_and_probs(tmp_path):
    f = tmp_path / "ids.txt"
    io.write_ids(f, [3, 0, 7])
    assert f.read_text().startswith(io.IDS_HEADER)
    assert io.read_ids(f).tolist() == [3, 0, 7]
    p = tmp_path / "p.txt"
    p.write_text(io.format_probs([smoothing_targets_uniform(4, 2, 0.1)], 0.1))
    assert io.read_probs(p).tolist() == [[0.025, 0.025, 0.9, 0.025]]
