"""Command-line front end.

Every command prints one report (pretty JSON by default) and exits with
0 on success, 1 when the analysis itself fails (invalid tassel, violated
bound, unmet algebraic precondition) and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from . import __version__, config
from .errors import CapExceeded, NotInCommutatorSubgroup, NotPerfect, NotRich, WebholError
from .generation import ReductiveDecomposition, closure_report, decompose, predict_closure, verify_q_bound
from .groups import FiniteGroup, group_from_descriptor, is_perfect
from .lattice import ReductiveProfile, codimension, mod_m_image, rank_r, span_z
from .typevec import TypeSet, deficit_witness, is_rich, is_splitting, richness_deficit
from .web import DiscreteWeb, suffix_truncation_check, web_report

log = logging.getLogger("webhol")

ANALYSIS_ERRORS = (NotPerfect, NotRich, NotInCommutatorSubgroup)


class InputError(Exception):
    pass


class AnalysisFailure(Exception):
    def __init__(self, report: dict):
        super().__init__("analysis failed")
        self.report = report


def _read(value: str) -> str:
    path = Path(value)
    if len(value) < 4096 and path.is_file():
        return path.read_text()
    return value


_SHORTHAND = {"cyclic": "m", "alternating": "k", "symmetric": "k"}


def parse_group(value: str) -> FiniteGroup:
    """JSON descriptor (inline or file), or shorthand like ``cyclic:3``."""
    text = _read(value).strip()
    if ":" in text and not text.startswith("{"):
        kind, _, arg = text.partition(":")
        if kind not in _SHORTHAND:
            raise InputError(f"unknown group shorthand {kind!r}")
        return group_from_descriptor({"kind": kind, _SHORTHAND[kind]: int(arg)})
    return group_from_descriptor(json.loads(text))


def parse_typeset(value: str) -> TypeSet:
    """JSON array of 0/1 rows, one 0/1 string per line, or comma separated strings."""
    text = _read(value).strip()
    if text.startswith("["):
        return TypeSet.from_json(text)
    return TypeSet.from_text(text.replace(",", "\n").replace(" ", "\n"))


def parse_tuple(value: str) -> tuple[int, ...]:
    return tuple(int(x) for x in value.replace(",", " ").split())


def _envelope(command: str, args, result: dict) -> dict:
    return {
        "command": command,
        "version": __version__,
        "caps": {
            "states": args.cap_states,
            "base_group_order": config.BASE_GROUP_CAP,
            "product_group_order": config.PRODUCT_GROUP_CAP,
            "max_arity": config.MAX_ARITY,
        },
        "seed": args.seed,
        "result": result,
    }


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise InputError(f"--{name.replace('_', '-')} is required for '{args.command}'")


def cmd_typeset(args) -> dict:
    _require(args, "typeset")
    V = parse_typeset(args.typeset)
    K = deficit_witness(V)
    return {
        "V": [str(v) for v in V],
        "n": V.arity,
        "rich": is_rich(V),
        "deficit": richness_deficit(V),
        "deficit_witness": sorted(K) if K is not None else None,
        "splitting": is_splitting(V),
        "rank_r": rank_r(V),
    }


def cmd_closure(args) -> dict:
    _require(args, "group", "typeset")
    G = parse_group(args.group)
    V = parse_typeset(args.typeset)
    return closure_report(G, V, threads=args.threads, cap=args.cap_states)


def cmd_decompose(args) -> dict:
    _require(args, "group", "typeset")
    G = parse_group(args.group)
    V = parse_typeset(args.typeset)
    if args.target is not None:
        target = parse_tuple(args.target)
        word = decompose(G, V, target)
        return {"target": list(target), "length": len(word), "word": word.to_json()}
    rng = random.Random(args.seed)
    lengths = []
    for _ in range(args.samples):
        target = tuple(rng.randrange(G.order) for _ in range(V.arity))
        word = decompose(G, V, target)
        if word.evaluate_n(G, V.arity) != target:
            raise AnalysisFailure({"target": list(target), "word": word.to_json()})
        lengths.append(len(word))
    return {"samples": args.samples, "all_evaluate": True, "max_length": max(lengths, default=0)}


def cmd_lattice(args) -> dict:
    _require(args, "typeset")
    V = parse_typeset(args.typeset)
    out = {"lattice": span_z(V).report(), "rank_r": rank_r(V)}
    if args.modulus:
        out["mod_images"] = {str(m): mod_m_image(V, m).order for m in args.modulus}
    if args.profile:
        dim_ss, dim_ab = parse_tuple(args.profile)
        out["codimension"] = codimension(V, ReductiveProfile(dim_ss, dim_ab))
    return out


def cmd_web(args) -> dict:
    _require(args, "web")
    w = DiscreteWeb.from_json(_read(args.web))
    G = parse_group(args.group) if args.group else None
    report = web_report(w, G, threads=args.threads, cap=args.cap_states)
    if G is not None and args.tau is not None:
        report["truncation"] = suffix_truncation_check(w, G, args.tau, threads=args.threads, cap=args.cap_states)
    if not report["valid"]:
        raise AnalysisFailure(report)
    return report


def cmd_qbound(args) -> dict:
    _require(args, "group", "typeset")
    G = parse_group(args.group)
    V = parse_typeset(args.typeset)
    report = verify_q_bound(G, V, threads=args.threads, cap=args.cap_states)
    if not report["ok"]:
        raise AnalysisFailure(report)
    return report


def cmd_predict(args) -> dict:
    _require(args, "group", "typeset")
    G = parse_group(args.group)
    V = parse_typeset(args.typeset)
    if is_perfect(G):
        decomp = ReductiveDecomposition(perfect=G)
    elif G.is_abelian() and G.descriptor.get("kind") == "cyclic":
        decomp = ReductiveDecomposition(abelian=(G.order,))
    else:
        raise InputError("predict needs a perfect or cyclic group")
    pred = predict_closure(decomp, V)
    return {"order": pred.order, "structure": pred.structure}


COMMANDS = {
    "typeset": cmd_typeset,
    "closure": cmd_closure,
    "decompose": cmd_decompose,
    "lattice": cmd_lattice,
    "web": cmd_web,
    "qbound": cmd_qbound,
    "predict": cmd_predict,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="webhol", description=__doc__.splitlines()[0])
    p.add_argument("command", help=", ".join(COMMANDS))
    p.add_argument("--group", help="group descriptor: JSON file, inline JSON, or e.g. alternating:5")
    p.add_argument("--typeset", help="type set: file, JSON array, or 0/1 strings separated by commas")
    p.add_argument("--web", help="web JSON file")
    p.add_argument("--target", help="decompose: comma separated element indices")
    p.add_argument("--samples", type=int, default=100, help="decompose: random targets when no --target")
    p.add_argument("--modulus", type=int, action="append", help="lattice: modulus for the mod-m image")
    p.add_argument("--profile", help="lattice: dim_ss,dim_ab for the codimension formula")
    p.add_argument("--tau", type=int, help="web: first step of the truncation check")
    p.add_argument("--cap-states", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def render_text(report: dict, indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for key, value in report.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(render_text(value, indent + 1))
        else:
            lines.append(f"{pad}{key:<20} {json.dumps(value, sort_keys=True)}")
    return "\n".join(lines)


def emit(report: dict, fmt: str, stream=None) -> None:
    stream = stream or sys.stdout
    if fmt == "text":
        stream.write(render_text(report) + "\n")
    else:
        stream.write(json.dumps(report, indent=2, sort_keys=True) + "\n")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.cap_states is None:
        try:
            args.cap_states = config.cap_states()
        except ValueError as exc:
            sys.stderr.write(f"error: {exc}\n")
            return 2
    if args.threads < 1:
        sys.stderr.write("error: --threads must be positive\n")
        return 2
    handler = COMMANDS.get(args.command)
    if handler is None:
        sys.stderr.write(f"error: unknown command {args.command!r}\n")
        return 2
    try:
        result = handler(args)
    except AnalysisFailure as exc:
        emit(_envelope(args.command, args, exc.report), args.format)
        return 1
    except ANALYSIS_ERRORS as exc:
        emit(_envelope(args.command, args, {"error": str(exc), "kind": type(exc).__name__}), args.format)
        return 1
    except (InputError, CapExceeded, WebholError, ValueError, KeyError, TypeError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    emit(_envelope(args.command, args, result), args.format)
    return 0


if __name__ == "__main__":
    sys.exit(main())
