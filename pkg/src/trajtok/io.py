"""Text file formats.

All files start with a ``# trajtok-<kind> v1`` header; other ``#`` lines and
blank lines are ignored on read. Reals are written with 17 significant
digits so that every double survives a write/read cycle unchanged.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .codec import SmoothingTargets
from .core import TOKEN_LENGTH, AgentType, NormalizedDataset, Trajectory, to_agent_frame
from .errors import ParseError
from .vocab import GridSpec, TokenSource, TrajToken, Vocabulary

log = logging.getLogger(__name__)

DATASET_HEADER = "# trajtok-dataset v1"
VOCAB_HEADER = "# trajtok-vocab v1"
IDS_HEADER = "# trajtok-ids v1"
PROBS_HEADER = "# trajtok-probs v1"


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _data_lines(path: str | Path) -> Iterable[tuple[int, str]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line


# -- dataset records -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DatasetRecords:
    """Raw global-frame records: ``states`` is ``(N, L+1, 3)`` with the anchor first."""

    agent_types: list[AgentType]
    ids: list[str]
    states: np.ndarray
    malformed: list[tuple[int, str]]

    def __len__(self) -> int:
        return len(self.ids)

    def normalized(self) -> NormalizedDataset:
        if not len(self):
            ds = NormalizedDataset.empty(self.states.shape[1] - 1 if self.states.ndim == 3 else TOKEN_LENGTH)
            return NormalizedDataset(ds.points, ds.agent_types, drop_count=len(self.malformed))
        return NormalizedDataset(to_agent_frame(self.states), np.array(self.agent_types, dtype=object),
                                 drop_count=len(self.malformed))


def read_records(path: str | Path, length: int = TOKEN_LENGTH, strict: bool = True) -> DatasetRecords:
    n_fields = 3 * (length + 1) + 2
    types, ids, rows, bad = [], [], [], []
    for lineno, line in _data_lines(path):
        fields = [f.strip() for f in line.split(",")]
        try:
            if len(fields) != n_fields:
                raise ValueError(f"expected {n_fields} fields, got {len(fields)}")
            agent_type = AgentType.parse(fields[0])
            values = [float(f) for f in fields[2:]]
            if not all(math.isfinite(v) for v in values):
                raise ValueError("non-finite coordinate")
        except ValueError as exc:
            if strict:
                raise ParseError(str(exc), lineno, str(path)) from None
            log.warning("%s:%d: skipped malformed record (%s)", path, lineno, exc)
            bad.append((lineno, str(exc)))
            continue
        types.append(agent_type)
        ids.append(fields[1])
        rows.append(values)
    states = np.array(rows, dtype=float).reshape(-1, length + 1, 3)
    return DatasetRecords(types, ids, states, bad)


def parse_dataset(path: str | Path, length: int = TOKEN_LENGTH, strict: bool = True) -> NormalizedDataset:
    """Read a dataset file and normalize every record to its anchor frame."""
    return read_records(path, length, strict).normalized()


def format_dataset(agent_types: Sequence, ids: Sequence[str], states: np.ndarray) -> str:
    states = np.asarray(states, dtype=float)
    length = states.shape[1] - 1 if states.ndim == 3 else TOKEN_LENGTH
    out = [f"{DATASET_HEADER} L={length}",
           "# agent_type,id,x0,y0,yaw0,...  (anchor pose first, global frame)"]
    for t, rid, row in zip(agent_types, ids, states):
        out.append(",".join([str(AgentType.parse(t)), str(rid), *(fmt(v) for v in row.reshape(-1))]))
    return "\n".join(out) + "\n"


def write_dataset(path: str | Path, agent_types: Sequence, ids: Sequence[str], states: np.ndarray) -> None:
    Path(path).write_text(format_dataset(agent_types, ids, states), encoding="utf-8")


# -- vocabulary ------------------------------------------------------------

def format_vocabulary(v: Vocabulary) -> str:
    g = v.grid
    lines = [
        VOCAB_HEADER,
        f"agent_type={v.agent_type}",
        "grid=" + ",".join(fmt(x) for x in (g.x_min, g.x_max, g.x_interval, g.y_min, g.y_max, g.y_interval)),
        "params=" + json.dumps(v.build_params, sort_keys=True),
        "report=" + json.dumps(v.report, sort_keys=True),
        f"size={len(v)}",
        "# id,source,i,j,x1,y1,yaw1,...",
    ]
    for tok in v.tokens:
        i, j = tok.cell if tok.cell is not None else (-1, -1)
        lines.append(",".join([str(tok.id), tok.source.value, str(i), str(j),
                               *(fmt(x) for x in tok.trajectory.points.reshape(-1))]))
    return "\n".join(lines) + "\n"


def write_vocabulary(path: str | Path, v: Vocabulary) -> None:
    Path(path).write_text(format_vocabulary(v), encoding="utf-8")


def read_vocabulary(path: str | Path) -> Vocabulary:
    path = str(path)
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
    if first != VOCAB_HEADER:
        raise ParseError(f"not a vocabulary file (header {first!r})", 1, path)
    header: dict[str, str] = {}
    token_lines: list[tuple[int, str]] = []
    for lineno, line in _data_lines(path):
        if not token_lines and "=" in line and line.split("=", 1)[0] in (
                "agent_type", "grid", "params", "report", "size"):
            key, value = line.split("=", 1)
            header[key] = value
        else:
            token_lines.append((lineno, line))
    try:
        agent_type = AgentType.parse(header["agent_type"])
        gx = [float(x) for x in header["grid"].split(",")]
        grid = GridSpec(gx[0], gx[1], gx[3], gx[4], gx[2], gx[5])
        params = json.loads(header["params"])
        report = json.loads(header.get("report", "{}"))
        size = int(header["size"])
    except (KeyError, ValueError, IndexError) as exc:
        raise ParseError(f"bad vocabulary header: {exc}", None, path) from None
    length = int(params.get("L", TOKEN_LENGTH))
    tokens = []
    for lineno, line in token_lines:
        f = line.split(",")
        try:
            if len(f) != 4 + 3 * length:
                raise ValueError(f"expected {4 + 3 * length} fields, got {len(f)}")
            tid, src, i, j = int(f[0]), TokenSource(f[1]), int(f[2]), int(f[3])
            pts = np.array([float(x) for x in f[4:]]).reshape(length, 3)
            tokens.append(TrajToken(tid, Trajectory(pts, agent_type), None if i < 0 else (i, j), src))
        except ValueError as exc:
            raise ParseError(str(exc), lineno, path) from None
    if len(tokens) != size:
        raise ParseError(f"header says {size} tokens, found {len(tokens)}", None, path)
    try:
        return Vocabulary(agent_type, grid, tuple(tokens), params, report)
    except ValueError as exc:
        raise ParseError(str(exc), None, path) from None


# -- ids and probabilities -------------------------------------------------

def write_ids(path: str | Path, ids: Iterable[int]) -> None:
    Path(path).write_text(IDS_HEADER + "\n" + "".join(f"{int(i)}\n" for i in ids), encoding="utf-8")


def read_ids(path: str | Path) -> np.ndarray:
    out = []
    for lineno, line in _data_lines(path):
        try:
            out.append(int(line))
        except ValueError:
            raise ParseError(f"not an integer id: {line!r}", lineno, str(path)) from None
    return np.array(out, dtype=np.int64)


def format_probs(targets: Sequence[SmoothingTargets], eps: float, eps1: float | None = None) -> str:
    mode = targets[0].mode.value if targets else "none"
    head = f"{PROBS_HEADER} mode={mode} eps={eps!r}"
    if eps1 is not None:
        head += f" eps1={eps1!r}"
    rows = [",".join(repr(float(p)) for p in t.probs) for t in targets]
    return head + "\n" + "".join(r + "\n" for r in rows)


def read_probs(path: str | Path) -> np.ndarray:
    rows = [[float(x) for x in line.split(",")] for _, line in _data_lines(path)]
    return np.array(rows, dtype=float)
