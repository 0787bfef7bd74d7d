"""Command-line entry point: ``trajtok <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .codec import (
    DEFAULT_EPS,
    DEFAULT_EPS1,
    decode_points,
    encode_points,
    smoothing_targets_spatial,
    smoothing_targets_uniform,
)
from .config import FileConfig
from .core import AgentType, NormalizedDataset, flip_augment, to_global_frame
from .errors import TrajTokError
from .metrics import evaluate
from .svg import export_svg
from .synthetic import gen_synthetic

log = logging.getLogger("trajtok")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise UsageError(f"{self.prog}: {message}")


def _agent_type(text: str) -> AgentType:
    try:
        return AgentType.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="trajtok", description="Trajectory tokenizer toolkit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    b = sub.add_parser("build", help="build a vocabulary from a dataset file")
    b.add_argument("--tokenizer", choices=["trajtok", "kdisks"], default="trajtok")
    b.add_argument("--agent-type", type=_agent_type, required=True)
    b.add_argument("--config", help="JSON config; built-in per-type grids when omitted")
    b.add_argument("--data", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--seed", type=int, help="k-disks seed (overrides config)")
    flip = b.add_mutually_exclusive_group()
    flip.add_argument("--flip", dest="flip", action="store_true", default=None,
                      help="flip-augment the data (default for trajtok)")
    flip.add_argument("--no-flip", dest="flip", action="store_false",
                      help="use the data as-is (default for kdisks)")
    b.add_argument("--lenient", action="store_true", help="skip malformed records instead of failing")

    e = sub.add_parser("encode", help="map trajectories to token ids")
    e.add_argument("--vocab", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--lenient", action="store_true")

    d = sub.add_parser("decode", help="map token ids back to trajectories")
    d.add_argument("--vocab", required=True)
    d.add_argument("--ids", required=True)
    d.add_argument("--anchor-data", help="dataset file whose anchor poses place each token globally")
    d.add_argument("--out", required=True)

    s = sub.add_parser("smooth", help="label-smoothing target distributions")
    s.add_argument("--vocab", required=True)
    s.add_argument("--gt-ids", required=True)
    s.add_argument("--mode", choices=["uniform", "spatial"], default="spatial")
    s.add_argument("--eps", type=float, default=DEFAULT_EPS)
    s.add_argument("--eps1", type=float, default=DEFAULT_EPS1)
    s.add_argument("--normalized", action="store_true", help="uniform mode: spread eps over |V|-1 labels")
    s.add_argument("--out", required=True)

    ev = sub.add_parser("eval", help="evaluate a vocabulary on held-out data")
    ev.add_argument("--vocab", required=True)
    ev.add_argument("--data", required=True)
    ev.add_argument("--report", required=True, help="key=value report path")
    ev.add_argument("--json", help="also write the report as JSON")

    c = sub.add_parser("compare", help="evaluate two vocabularies on the same data")
    c.add_argument("--vocab-a", required=True)
    c.add_argument("--vocab-b", required=True)
    c.add_argument("--data", required=True)

    g = sub.add_parser("gen", help="generate a synthetic dataset file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--agent-type", type=_agent_type, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--noise", type=float, default=0.0, help="fraction of far-field noise records")
    g.add_argument("--out", required=True)

    vz = sub.add_parser("viz", help="render a vocabulary to SVG")
    vz.add_argument("--vocab", required=True)
    vz.add_argument("--out", required=True)
    return p


def _load_for_vocab(path: str, agent_type: AgentType, lenient: bool = False) -> tuple[io.DatasetRecords, np.ndarray]:
    recs = io.read_records(path, strict=not lenient)
    mask = np.array([t is agent_type for t in recs.agent_types], dtype=bool)
    skipped = int((~mask).sum())
    if skipped:
        log.warning("ignoring %d records that are not %s", skipped, agent_type)
    return recs, mask


def cmd_build(args) -> int:
    cfg = FileConfig.load(args.config)
    data = io.parse_dataset(args.data, strict=not args.lenient).of_type(args.agent_type)
    flip = args.flip if args.flip is not None else args.tokenizer == "trajtok"
    if flip:
        data = flip_augment(data)
    if args.tokenizer == "trajtok":
        builder = cfg.trajtok(args.agent_type)
        grid = builder.resolved_grid
    else:
        builder = cfg.kdisks(args.agent_type, seed=args.seed)
        grid = builder.grid
    vocab = builder.build(data)
    io.write_vocabulary(args.out, vocab)
    print(f"tokenizer={vocab.build_params['tokenizer']} agent_type={vocab.agent_type} "
          f"H={grid.H} W={grid.W} trajectories={len(data)} vocab_size={len(vocab)}")
    for key, value in vocab.report.items():
        print(f"{key}={value}")
    return EXIT_OK


def cmd_encode(args) -> int:
    vocab = io.read_vocabulary(args.vocab)
    recs, mask = _load_for_vocab(args.data, vocab.agent_type, args.lenient)
    data = recs.normalized()
    ids = encode_points(vocab, data.points[mask]) if mask.any() else np.zeros(0, dtype=np.int64)
    io.write_ids(args.out, ids)
    print(f"encoded={ids.size}")
    return EXIT_OK


def cmd_decode(args) -> int:
    vocab = io.read_vocabulary(args.vocab)
    ids = io.read_ids(args.ids)
    local = decode_points(vocab, ids)
    if args.anchor_data:
        recs, mask = _load_for_vocab(args.anchor_data, vocab.agent_type)
        anchors = recs.states[mask, 0, :]
        rec_ids = [r for r, m in zip(recs.ids, mask) if m]
        if anchors.shape[0] != ids.size:
            raise TrajTokError(f"{ids.size} ids but {anchors.shape[0]} anchor records")
    else:
        anchors = np.zeros((ids.size, 3))
        rec_ids = [f"tok{n}" for n in range(ids.size)]
    states = np.concatenate([anchors[:, None, :], to_global_frame(anchors, local)], axis=1)
    io.write_dataset(args.out, [vocab.agent_type] * ids.size, rec_ids, states)
    print(f"decoded={ids.size}")
    return EXIT_OK


def cmd_smooth(args) -> int:
    vocab = io.read_vocabulary(args.vocab)
    gts = io.read_ids(args.gt_ids)
    if args.mode == "uniform":
        rows = [smoothing_targets_uniform(len(vocab), int(g), args.eps, args.normalized) for g in gts]
        text = io.format_probs(rows, args.eps)
    else:
        rows = [smoothing_targets_spatial(vocab, int(g), args.eps, args.eps1) for g in gts]
        text = io.format_probs(rows, args.eps, args.eps1)
    Path(args.out).write_text(text, encoding="utf-8")
    print(f"rows={len(rows)} size={len(vocab)} mode={args.mode}")
    return EXIT_OK


def _held_out(path: str, agent_type: AgentType) -> NormalizedDataset:
    return io.parse_dataset(path).of_type(agent_type)


def cmd_eval(args) -> int:
    vocab = io.read_vocabulary(args.vocab)
    report = evaluate(vocab, _held_out(args.data, vocab.agent_type))
    text = report.to_text()
    Path(args.report).write_text(text, encoding="utf-8")
    if args.json:
        Path(args.json).write_text(report.to_json(), encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_compare(args) -> int:
    va = io.read_vocabulary(args.vocab_a)
    vb = io.read_vocabulary(args.vocab_b)
    ra = evaluate(va, _held_out(args.data, va.agent_type)).to_dict()
    rb = evaluate(vb, _held_out(args.data, vb.agent_type)).to_dict()
    print(f"# compare a={args.vocab_a} b={args.vocab_b}")
    for key in ra:
        a, b = ra[key], rb[key]
        if isinstance(a, dict):
            for sub in a:
                print(f"{key}@{sub}\t{a[sub]!r}\t{b.get(sub)!r}")
        else:
            print(f"{key}\t{a!r}\t{b!r}")
    return EXIT_OK


def cmd_gen(args) -> int:
    recs = gen_synthetic(args.n, args.agent_type, args.seed, args.noise)
    io.write_dataset(args.out, recs.agent_types, recs.ids, recs.states)
    print(f"records={len(recs)}")
    return EXIT_OK


def cmd_viz(args) -> int:
    export_svg(io.read_vocabulary(args.vocab), args.out)
    return EXIT_OK


COMMANDS = {
    "build": cmd_build, "encode": cmd_encode, "decode": cmd_decode, "smooth": cmd_smooth,
    "eval": cmd_eval, "compare": cmd_compare, "gen": cmd_gen, "viz": cmd_viz,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (TrajTokError, ValueError, OSError) as exc:
        print(f"trajtok {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
