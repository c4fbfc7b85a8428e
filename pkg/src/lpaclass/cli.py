"""Command-line interface.

Every subcommand reads JSON (``-`` is stdin) and writes JSON.  Exit status is
0 on success, 1 on a domain error (reported as ``{"error": ...}``) and 2 on a
usage error.  Graph arguments may also name a standard graph, e.g.
``builtin:R_n_k:3:2`` or ``builtin:S2``.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence, TextIO

from .errors import GraphFormatError, LpaError
from .explorer import SearchBounds, classify, enumerate_pis_sing, search_path
from .intlat import parse_matrix, smith_normal_form
from .invariants import k0_data
from .moves import (
    MoveCertificate,
    MoveStep,
    apply_step,
    maximal_outsplit_steps,
    parse_certificate,
    verify_certificate,
)
from .multigraph import MultiGraph, analyze, builtin, parse_graph, to_dot
from .pipeline import (
    cert_divides,
    cert_expand,
    cert_fish,
    cert_open_tails,
    cert_remove_sources,
    cert_stabilize,
)

__all__ = ["build_parser", "run", "main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lpaclass", description="Pointed K0 data and move certificates for graph algebras.")
    p.add_argument("--output", choices=("json", "pretty"), default="json")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="structural properties of a graph")
    a.add_argument("graph")
    a.add_argument("--dot", action="store_true", help="emit the graph in DOT instead")

    k = sub.add_parser("k0", help="pointed K0 data of a graph")
    k.add_argument("graph")

    s = sub.add_parser("snf", help="Smith normal form of a matrix document")
    s.add_argument("matrix")

    m = sub.add_parser("move", help="apply one move and emit its certificate")
    msub = m.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    for kind in ("shift", "unshift"):
        q = msub.add_parser(kind)
        q.add_argument("graph")
        q.add_argument("--v", required=True)
        q.add_argument("--w", required=True)
    q = msub.add_parser("outsplit")
    q.add_argument("graph")
    q.add_argument("--vertex", required=True)
    q.add_argument("--classes", required=True, help='JSON list of {"dst": count} objects')
    q = msub.add_parser("amalgamate")
    q.add_argument("graph")
    q.add_argument("--vertices", nargs="+", required=True)
    q.add_argument("--name")
    q = msub.add_parser("maxsplit")
    q.add_argument("graph")

    e = sub.add_parser("enumerate", help="list purely infinite simple Condition (Sing) graphs")
    e.add_argument("--vertices", type=int, required=True)

    c = sub.add_parser("classify", help="group enumerated graphs by pointed K0")
    c.add_argument("--vertices", type=int, required=True)
    c.add_argument("--parallel", type=int, default=0, metavar="WORKERS")

    f = sub.add_parser("find-path", help="bounded search for a move certificate")
    f.add_argument("source")
    f.add_argument("target")
    f.add_argument("--max-vertices", type=int, default=SearchBounds.max_vertices)
    f.add_argument("--max-mult", type=int, default=SearchBounds.max_multiplicity)
    f.add_argument("--max-steps", type=int, default=SearchBounds.max_steps)

    z = sub.add_parser("certify", help="build a certificate from a constructive chain")
    zsub = z.add_subparsers(dest="chain", required=True, parser_class=_Parser)
    q = zsub.add_parser("fish")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--d", type=int, required=True)
    q = zsub.add_parser("stabilize")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--t", type=int, required=True)
    for name in ("divides", "open-tails"):
        q = zsub.add_parser(name)
        q.add_argument("--n", type=int, required=True)
        q.add_argument("--k", type=int, required=True)
    q = zsub.add_parser("expand")
    q.add_argument("graph")
    q.add_argument("--n", type=int, required=True)
    q = zsub.add_parser("remove-sources")
    q.add_argument("graph")

    v = sub.add_parser("verify", help="replay and check a certificate")
    v.add_argument("certificate")
    v.add_argument("--allow-infinite-field", action="store_true")
    return p


def _read(path: str, stdin: TextIO) -> str:
    if path == "-":
        return stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _graph(arg: str, stdin: TextIO) -> MultiGraph:
    if arg.startswith("builtin:"):
        parts = arg.split(":")[1:]
        try:
            nums = [int(x) for x in parts[1:]]
        except ValueError:
            raise GraphFormatError(f"bad builtin spec {arg!r}") from None
        return builtin(parts[0], *nums)
    return parse_graph(_read(arg, stdin))


def _certificate_doc(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"malformed JSON: {exc}") from None
    # find-path wraps its certificate together with search statistics
    if isinstance(doc, dict) and "certificate" in doc:
        if doc["certificate"] is None:
            raise GraphFormatError("document holds no certificate")
        doc = doc["certificate"]
    return doc


def _dispatch(args, stdin: TextIO):
    cmd = args.command
    if cmd == "analyze":
        g = _graph(args.graph, stdin)
        return to_dot(g) if args.dot else analyze(g).to_dict()
    if cmd == "k0":
        return k0_data(_graph(args.graph, stdin)).to_dict()
    if cmd == "snf":
        return smith_normal_form(parse_matrix(_read(args.matrix, stdin))).to_dict()
    if cmd == "move":
        g = _graph(args.graph, stdin)
        if args.kind == "maxsplit":
            steps = maximal_outsplit_steps(g)
        elif args.kind in ("shift", "unshift"):
            steps = [MoveStep(args.kind, (args.v, args.w))]
        elif args.kind == "outsplit":
            try:
                classes = json.loads(args.classes)
            except json.JSONDecodeError as exc:
                raise GraphFormatError(f"--classes is not JSON: {exc}") from None
            steps = [MoveStep.from_dict({"kind": "outsplit", "vertex": args.vertex, "classes": classes})]
        else:
            steps = [MoveStep.amalgamate(args.vertices, args.name)]
        h = g
        for step in steps:
            h = apply_step(h, step)
        return MoveCertificate(g, tuple(steps), h).to_dict()
    if cmd == "enumerate":
        graphs = enumerate_pis_sing(args.vertices)
        return {"vertices": args.vertices, "count": len(graphs), "graphs": [g.to_dict() for g in graphs]}
    if cmd == "classify":
        table = classify(enumerate_pis_sing(args.vertices), workers=args.parallel or None)
        return {"vertices": args.vertices, "count": sum(table.sizes), **table.to_dict()}
    if cmd == "find-path":
        bounds = SearchBounds(args.max_vertices, args.max_mult, args.max_steps)
        res = search_path(_graph(args.source, stdin), _graph(args.target, stdin), bounds)
        return res.to_dict()
    if cmd == "certify":
        chain = args.chain
        if chain == "fish":
            cert = cert_fish(args.n, args.d)
        elif chain == "stabilize":
            cert = cert_stabilize(args.n, args.k, args.t)
        elif chain == "divides":
            cert = cert_divides(args.n, args.k)
        elif chain == "open-tails":
            cert = cert_open_tails(args.n, args.k)
        elif chain == "expand":
            cert = cert_expand(_graph(args.graph, stdin), args.n)[1]
        else:
            cert = cert_remove_sources(_graph(args.graph, stdin))[1]
        return cert.to_dict()
    if cmd == "verify":
        cert = parse_certificate(_certificate_doc(_read(args.certificate, stdin)))
        return verify_certificate(cert, args.allow_infinite_field).to_dict()
    raise _UsageError(f"unknown command {cmd!r}")


def _pretty(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for key, val in obj.items():
            if isinstance(val, (dict, list)) and val and not _flat(val):
                lines.append(f"{pad}{key}:")
                lines.append(_pretty(val, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_scalar(val)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(
            f"{pad}- {_scalar(x)}" if _flat(x) else f"{pad}-\n{_pretty(x, indent + 1)}" for x in obj
        )
    return pad + _scalar(obj)


def _flat(x) -> bool:
    if isinstance(x, dict):
        return False
    if isinstance(x, list):
        return all(not isinstance(y, (dict, list)) or (isinstance(y, list) and _flat(y)) for y in x)
    return True


def _scalar(x) -> str:
    return json.dumps(x) if isinstance(x, (list, dict, bool)) or x is None else str(x)


def run(argv: Sequence[str], stdin: TextIO | None = None, stdout: TextIO | None = None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        result = _dispatch(args, stdin)
    except (LpaError, OSError) as exc:
        stdout.write(json.dumps({"error": str(exc), "type": type(exc).__name__}) + "\n")
        return 1
    if isinstance(result, str):
        stdout.write(result)
    elif args.output == "pretty":
        stdout.write(_pretty(result) + "\n")
    else:
        stdout.write(json.dumps(result) + "\n")
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
