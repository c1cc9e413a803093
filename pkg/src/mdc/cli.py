"""Command-line entry point: ``mdc <subcommand> ...``.

Exit status is 0 on success, 1 when a checked property fails and 2 on usage
errors (bad flags, unreadable or malformed input, out-of-domain requests).
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from mdc.complex import (
    SymmetricDeltaComplex,
    betti,
    build_genus1_complex,
    build_virtual_complex,
    chain_complex,
    euler_characteristic,
)
from mdc.enumeration import EnumerationRequest, aligned_graphs, default_cache_dir, stable_graphs
from mdc.errors import MDCError
from mdc.genus_one import CRITERIA, AlignedGraph
from mdc.graph import DecoratedGraph
from mdc.retract import DualPoint, MetricPoint, embed_dual, parse_rational, project_to_dual
from mdc.tangent import fiber_witness, has_nonvanishing_dependency
from mdc import verify

log = logging.getLogger("mdc")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    genus: int | None = None
    markings: int | None = None
    degree: int | None = None
    seed: int = 0
    samples: int = 1000
    cache_dir: Path | None = None
    out: Path | None = None
    criterion: str = "dmin"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        cfg = cls(
            command=args.command,
            genus=getattr(args, "genus", None),
            markings=getattr(args, "markings", None),
            degree=getattr(args, "degree", None),
            seed=getattr(args, "seed", 0),
            samples=getattr(args, "samples", 1000),
            out=getattr(args, "out", None),
            criterion=getattr(args, "nonempty_criterion", "dmin"),
        )
        if not getattr(args, "no_cache", True):
            cfg.cache_dir = Path(args.cache_dir) if args.cache_dir else default_cache_dir()
        for name in ("genus", "markings", "degree"):
            value = getattr(cfg, name)
            if value is not None and value < 0:
                raise UsageError(f"--{name} must be non-negative")
        if cfg.samples < 1:
            raise UsageError("--samples must be positive")
        return cfg


def _dump(data, out: Path | None) -> None:
    text = json.dumps(data, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_json(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _require(cfg: RunConfig, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(cfg, n) is None]
    if missing:
        raise UsageError(f"missing required option(s): {', '.join(missing)}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_enumerate(args, cfg: RunConfig) -> int:
    _require(cfg, "genus", "markings", "degree")
    if args.radial:
        if cfg.genus != 1:
            raise UsageError("--radial needs --genus 1")
        items = aligned_graphs(cfg.markings, cfg.degree, cfg.criterion, cache_dir=cfg.cache_dir)
        _dump({"n": cfg.markings, "d": cfg.degree, "criterion": cfg.criterion,
               "aligned_graphs": [AG.to_json() for AG in items]}, cfg.out)
        log.info("%d aligned graphs", len(items))
        return EXIT_OK
    req = EnumerationRequest(cfg.genus, cfg.markings, cfg.degree, args.max_edges)
    catalog = stable_graphs(req, cache_dir=cfg.cache_dir)
    data = catalog.to_json()
    # the timestamp would break byte-identical reruns
    data["metadata"] = {k: v for k, v in data["metadata"].items() if k != "generated_at"}
    _dump(data, cfg.out)
    log.info("%d isomorphism classes", len(catalog))
    return EXIT_OK


def cmd_complex(args, cfg: RunConfig) -> int:
    _require(cfg, "markings", "degree")
    if args.kind == "virtual":
        _require(cfg, "genus")
        X = build_virtual_complex(cfg.genus, cfg.markings, cfg.degree, cache_dir=cfg.cache_dir)
    else:
        if cfg.genus not in (None, 1):
            raise UsageError("--kind genus1 implies --genus 1")
        X = build_genus1_complex(cfg.markings, cfg.degree, cfg.criterion, cache_dir=cfg.cache_dir)
    _dump(X.to_json(), cfg.out)
    return EXIT_OK


def cmd_homology(args, cfg: RunConfig) -> int:
    try:
        X = SymmetricDeltaComplex.from_json(_load_json(args.input))
    except MDCError as exc:
        raise UsageError(str(exc)) from exc
    b = betti(chain_complex(X, reduced=not args.unreduced))
    title = "Betti" if args.unreduced else "reduced Betti"
    print(f"{'p':>4}  {title}")
    for p, value in b.items():
        print(f"{p:>4}  {value}")
    print(f"chi = {euler_characteristic(X)}")
    return EXIT_OK


def _parse_times(text: str | None) -> tuple[Fraction, ...]:
    if text is None:
        return verify.FLOW_TIMES
    try:
        times = tuple(parse_rational(x) for x in text.split(","))
    except MDCError as exc:
        raise UsageError(str(exc)) from exc
    if any(not 0 <= t <= 1 for t in times):
        raise UsageError("--times must lie in [0, 1]")
    return times


def cmd_retract(args, cfg: RunConfig) -> int:
    _require(cfg, "genus", "markings", "degree")
    times = _parse_times(args.times)
    rng = random.Random(cfg.seed)
    fails = verify.retract_failures(cfg.genus, cfg.markings, cfg.degree, cfg.samples, rng, times)
    kinds = {"a": "flow(P,0) = P", "b": "flow(P,1) = target", "c": "gluing coherence",
             "d": "Z preserved", "e": "p_v(t) identity"}
    print(f"{'invariant':<22} result")
    for key, label in kinds.items():
        bad = sum(1 for line in fails if f"({key})" in line)
        if key in "de" and cfg.genus != 1:
            status = "n/a (genus 0)"
        else:
            status = "PASS" if bad == 0 else f"FAIL ({bad})"
        print(f"{label:<22} {status}")
    print(f"{cfg.samples} samples, seed {cfg.seed}")
    return EXIT_OK if not fails else EXIT_FAIL


def cmd_tangent(args, cfg: RunConfig) -> int:
    data = _load_json(args.input)
    try:
        if args.check == "dependency":
            vectors = [[parse_rational(x) for x in v] for v in data["vectors"]]
            print(json.dumps({"nonvanishing_dependency": has_nonvanishing_dependency(vectors)}))
        else:
            v = [parse_rational(x) for x in data["v"]]
            R = fiber_witness(v, int(data["d"]), int(data.get("r", len(v) - 1)))
            print(json.dumps({"witness": None if R is None else R.to_json()["roots"]}))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{args.input}: missing or malformed field {exc}") from exc
    return EXIT_OK


def cmd_embed(args, cfg: RunConfig) -> int:
    Q = DualPoint.from_json(_load_json(args.input))
    _dump(embed_dual(Q).to_json(), cfg.out)
    return EXIT_OK


def cmd_project(args, cfg: RunConfig) -> int:
    P = MetricPoint.from_json(_load_json(args.input))
    _dump(project_to_dual(P).to_json(), cfg.out)
    return EXIT_OK


def cmd_dot(args, cfg: RunConfig) -> int:
    data = _load_json(args.input)
    graph = AlignedGraph.from_json(data) if "levels" in data else DecoratedGraph.from_json(data)
    text = graph.to_dot()
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        Path(cfg.out).write_text(text)
    return EXIT_OK


def cmd_verify_all(args, cfg: RunConfig) -> int:
    results = verify.run_suite(samples=cfg.samples, seed=cfg.seed)
    failed = [r for r in results if not r.passed]
    for r in failed:
        for line in r.details[1:6]:
            print(f"    {line}")
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_OK if not failed else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser


def _add_triple(p: argparse.ArgumentParser) -> None:
    p.add_argument("--genus", "-g", type=int)
    p.add_argument("--markings", "-n", type=int)
    p.add_argument("--degree", "-d", type=int)


def _add_cache(p: argparse.ArgumentParser) -> None:
    p.add_argument("--no-cache", action="store_true", help="always regenerate catalogs")
    p.add_argument("--cache-dir", help="catalog cache directory (default $MDC_CACHE_DIR or ~/.cache/mdc)")


def _add_criterion(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nonempty-criterion", choices=CRITERIA, default="dmin",
                   help="stratum non-emptiness test for genus-one aligned graphs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdc", description="Dual complexes of spaces of stable maps.")
    parser.add_argument("--config", help="JSON file of default option values (flags win)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommands = sub.choices

    p = sub.add_parser("enumerate", help="list stable graphs")
    _add_triple(p)
    p.add_argument("--radial", action="store_true", help="list aligned genus-one graphs instead")
    p.add_argument("--max-edges", type=int)
    p.add_argument("--out", type=Path)
    _add_cache(p)
    _add_criterion(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("complex", help="build a dual complex")
    p.add_argument("--kind", choices=("virtual", "genus1"), default="virtual")
    _add_triple(p)
    p.add_argument("--out", type=Path)
    _add_cache(p)
    _add_criterion(p)
    p.set_defaults(func=cmd_complex)

    p = sub.add_parser("homology", help="Betti numbers of a complex JSON file")
    p.add_argument("input")
    p.add_argument("--unreduced", action="store_true")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("retract", help="sample the retraction and check its invariants")
    _add_triple(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--times", help="comma-separated rationals, e.g. 1/7,1/2")
    p.set_defaults(func=cmd_retract)

    p = sub.add_parser("tangent", help="tangent-space predicates")
    p.add_argument("--check", choices=("dependency", "fiber"), required=True)
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_tangent)

    for name, func, text in (
        ("embed", cmd_embed, "genus-one dual point -> virtual metric point"),
        ("project", cmd_project, "virtual metric point in Z -> genus-one dual point"),
        ("dot", cmd_dot, "render a graph or aligned graph JSON as DOT"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--input", required=True)
        p.add_argument("--out", type=Path)
        p.set_defaults(func=func)

    p = sub.add_parser("verify-all", help="run the acceptance suite")
    p.add_argument("--suite", choices=("desk",), default="desk")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_all)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    data = _load_json(args.config)
    if not isinstance(data, dict):
        raise UsageError(f"{args.config}: expected a JSON object")
    known = vars(args)
    defaults = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(defaults) - set(known))
    if unknown:
        raise UsageError(f"{args.config}: unknown option(s) {', '.join(unknown)}")
    # flags win: re-parse with the config values as defaults
    parser.subcommands[args.command].set_defaults(**defaults)
    return parser.parse_args(argv)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    except UsageError as exc:
        print(f"mdc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = RunConfig.from_args(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"mdc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MDCError as exc:
        print(f"mdc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
