"""Command-line entry point ``ramsey-book``.

Exit codes: 0 success or proved, 1 refuted or a monitor hard failure,
2 unknown / inapplicable / inconclusive, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import book as bk
from . import monitors as mon
from .graph import Colouring, clique_number, random_colouring, RED, BLUE
from .numerics.expr import ExprError, parse_goal, parse_number
from .numerics.library import LemmaBudget, corpus, lemma_12_3_check, run_corpus_entry
from .numerics.prover import PROVED, REFUTED, prove_ineq
from .ramsey import best_certificate, lower_bound_certificate, paley_witness, ramsey_oracle

EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(obj, out: str | None = None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _sidecar(path: str | None, elapsed: float) -> None:
    if path:
        Path(path).write_text(json.dumps({"elapsed_seconds": elapsed}) + "\n")


def _verdict_code(verdict: str) -> int:
    return {PROVED: EXIT_OK, REFUTED: EXIT_FAIL}.get(verdict, EXIT_UNKNOWN)


# --- subcommands -------------------------------------------------------------


def cmd_ramsey_exact(a) -> int:
    res = ramsey_oracle(a.k, a.l, a.cap)
    if a.json:
        _emit(res.to_dict(), a.out)
    else:
        print(res.value if res.value is not None else f"exceeds {a.cap}")
    return EXIT_OK if res.value is not None else EXIT_UNKNOWN


def cmd_ramsey_certify(a) -> int:
    if a.p is None:
        cert = best_certificate(a.k, a.l, a.n)
    else:
        cert = lower_bound_certificate(a.k, a.l, a.n, parse_number(a.p))
    _emit(cert.to_dict(), a.out)
    return EXIT_OK if cert.valid else EXIT_UNKNOWN


def cmd_ramsey_paley(a) -> int:
    c = paley_witness(a.q)
    obj = c.to_json()
    obj["clique_number"] = {"red": clique_number(c, RED), "blue": clique_number(c, BLUE)}
    _emit(obj, a.out)
    return EXIT_OK


def _colouring(a) -> tuple[Colouring, dict]:
    if a.all_red:
        return Colouring.all_red(a.n), {"source": "all-red"}
    if a.all_blue:
        return Colouring.all_blue(a.n), {"source": "all-blue"}
    if a.paley is not None:
        return paley_witness(a.paley), {"source": "paley", "q": a.paley}
    if a.file:
        text = Path(a.file).read_text().strip()
        c = Colouring.from_json(text) if text.startswith("{") else Colouring.from_hex(text)
        return c, {"source": "file", "file": Path(a.file).name}
    rho = parse_number(a.rho)
    return random_colouring(a.n, rho, a.seed), {"source": "random", "rho": str(rho), "seed": a.seed}


def cmd_book_run(a) -> int:
    if (a.all_red or a.all_blue or a.rho is not None) and a.n is None:
        raise UsageError("--n is required for this colouring source")
    c, meta = _colouring(a)
    params = bk.BookParams(
        a.k, a.l, parse_number(a.mu), parse_number(a.p0_min), a.threshold, a.max_steps
    )
    X0, Y0 = bk.halves(c.n)
    trace = bk.run(params, c, X0, Y0, meta={"colouring": meta, "seed": a.seed})
    if a.out:
        with open(a.out, "w") as fh:
            trace.dump(fh)
    else:
        trace.dump(sys.stdout)
    if a.validate:
        bad = bk.trace_violations(c, trace)
        for line in bad:
            print(line, file=sys.stderr)
        if bad:
            return EXIT_FAIL
    return EXIT_OK if trace.final["status"] == "halted" else EXIT_UNKNOWN


def cmd_trace_check(a) -> int:
    with open(a.trace) as fh:
        trace = bk.Trace.load(fh)
    names = [m.strip() for m in a.monitors.split(",") if m.strip()]
    reports = mon.run_monitors(trace, names)
    _emit([r.to_dict() for r in reports], a.report)
    return EXIT_FAIL if any(r.hard_failure for r in reports) else EXIT_OK


def _parse_box(text: str) -> dict[str, tuple[Fraction, Fraction]]:
    box = {}
    for part in filter(None, (p.strip() for p in text.split(";"))):
        name, _, rng = part.partition("=")
        lo, _, hi = rng.strip().strip("[]").partition(",")
        if not name or not hi:
            raise UsageError(f"bad box component {part!r}; expected name=[lo,hi]")
        box[name.strip()] = (parse_number(lo), parse_number(hi))
    return box


def _parse_split(text: str | None) -> dict[str, int]:
    out = {}
    for part in filter(None, (p.strip() for p in (text or "").replace(",", ";").split(";"))):
        name, _, depth = part.partition("=")
        if not depth.strip().isdigit():
            raise UsageError(f"bad split component {part!r}; expected name=depth")
        out[name.strip()] = int(depth)
    return out


def cmd_prove(a) -> int:
    goal = parse_goal(a.expr)
    t0 = time.perf_counter()
    cert = prove_ineq(goal, _parse_box(a.box), _parse_split(a.split), a.bits, max_boxes=a.max_boxes)
    _sidecar(a.timing, time.perf_counter() - t0)
    _emit(cert.to_dict(), a.out)
    return _verdict_code(cert.verdict)


def cmd_lemma123(a) -> int:
    delta = parse_number(a.delta)
    budget = LemmaBudget(a.split_x, a.split_y, a.max_boxes)
    t0 = time.perf_counter()
    cert = lemma_12_3_check(delta, budget, a.bits)
    _sidecar(a.timing, time.perf_counter() - t0)
    _emit(cert.to_dict(), a.out)
    return _verdict_code(cert.verdict)


def cmd_corpus(a) -> int:
    results = []
    for entry in corpus():
        ok, details = run_corpus_entry(entry)
        results.append({"name": entry.name, "kind": entry.kind, "passed": ok, "details": details})
    _emit(results, a.out)
    return EXIT_OK if all(r["passed"] for r in results) else EXIT_FAIL


# --- parser ------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="key=value file; command-line flags win")
    p.add_argument("--out", help="write JSON output here instead of stdout")
    return p


def build_parser() -> tuple[Parser, dict[str, argparse.ArgumentParser]]:
    common = _common()
    top = Parser(prog="ramsey-book", description="Book algorithm, Ramsey oracles and certified numerics.")
    sub = top.add_subparsers(dest="command", required=True)
    leaves: dict[str, argparse.ArgumentParser] = {}

    ramsey = sub.add_parser("ramsey", help="Ramsey numbers and witnesses")
    rsub = ramsey.add_subparsers(dest="action", required=True)
    p = rsub.add_parser("exact", parents=[common], help="exact R(k,l) by exhaustive search")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--cap", type=int, required=True, help="largest order searched")
    p.add_argument("--json", action="store_true", help="print the full result as JSON")
    p.set_defaults(func=cmd_ramsey_exact)
    leaves["ramsey exact"] = p

    p = rsub.add_parser("certify", parents=[common], help="first-moment lower-bound certificate")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", help="edge probability; omitted means best of p = 0.1..0.9")
    p.set_defaults(func=cmd_ramsey_certify)
    leaves["ramsey certify"] = p

    p = rsub.add_parser("paley", parents=[common], help="Paley colouring of K_q")
    p.add_argument("--q", type=int, required=True)
    p.set_defaults(func=cmd_ramsey_paley)
    leaves["ramsey paley"] = p

    book = sub.add_parser("book", help="book algorithm")
    bsub = book.add_subparsers(dest="action", required=True)
    p = bsub.add_parser("run", parents=[common], help="run and write a JSON-lines trace")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--rho", help="random colouring with this red probability")
    src.add_argument("--file", help="colouring file (JSON or n:hex)")
    src.add_argument("--paley", type=int, metavar="Q")
    src.add_argument("--all-red", action="store_true")
    src.add_argument("--all-blue", action="store_true")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--mu", default="2/5")
    p.add_argument("--p0-min", default="1/100")
    p.add_argument("--threshold", default="es", help="es | exact | lower | const:N")
    p.add_argument("--max-steps", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--validate", action="store_true", help="check state invariants, exit 1 on violation")
    p.set_defaults(func=cmd_book_run)
    leaves["book run"] = p

    trace = sub.add_parser("trace", help="trace analysis")
    tsub = trace.add_subparsers(dest="action", required=True)
    p = tsub.add_parser("check", parents=[common], help="run monitors over a trace")
    p.add_argument("trace")
    p.add_argument("--monitors", default=",".join(mon.MONITORS))
    p.add_argument("--report")
    p.set_defaults(func=cmd_trace_check)
    leaves["trace check"] = p

    p = sub.add_parser("prove", parents=[common], help="prove an inequality over a box")
    p.add_argument("--expr", required=True, help='e.g. "x^2 >= 0"')
    p.add_argument("--box", required=True, help='e.g. "x=[0,1];y=[0,0.75]"')
    p.add_argument("--split", default="", help='e.g. "y=12"')
    p.add_argument("--bits", type=int, default=53)
    p.add_argument("--max-boxes", type=int, default=1_000_000)
    p.add_argument("--timing", help="sidecar file for wall-clock time")
    p.set_defaults(func=cmd_prove)
    leaves["prove"] = p

    p = sub.add_parser("lemma123", parents=[common], help="min(f, g) < 2 - delta on the unit box")
    p.add_argument("--delta", default="2^-11")
    p.add_argument("--bits", type=int, default=53)
    p.add_argument("--split-x", type=int, default=LemmaBudget.split_x)
    p.add_argument("--split-y", type=int, default=LemmaBudget.split_y)
    p.add_argument("--max-boxes", type=int, default=LemmaBudget.max_boxes)
    p.add_argument("--timing", help="sidecar file for wall-clock time")
    p.set_defaults(func=cmd_lemma123)
    leaves["lemma123"] = p

    p = sub.add_parser("corpus", parents=[common], help="run the certified-calculus regression set")
    p.set_defaults(func=cmd_corpus)
    leaves["corpus"] = p
    return top, leaves


def read_config(path: str) -> dict[str, str]:
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{n}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip().strip('"')
    return out


def _apply_config(leaf: argparse.ArgumentParser, cfg: dict[str, str], argv: Sequence[str] = ()) -> None:
    actions = {a.dest: a for a in leaf._actions}
    given = {tok.split("=", 1)[0] for tok in argv if tok.startswith("--")}
    cfg = dict(cfg)
    for group in leaf._mutually_exclusive_groups:
        if any(set(a.option_strings) & given for a in group._group_actions):
            for a in group._group_actions:
                cfg.pop(a.dest, None)
    defaults = {}
    for key, value in cfg.items():
        act = actions.get(key)
        if act is None:
            raise UsageError(f"unknown config key {key!r}")
        if act.nargs == 0:  # store_true
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            defaults[key] = act.type(value) if act.type else value
        act.required = False
    for group in leaf._mutually_exclusive_groups:
        if any(a.dest in cfg for a in group._group_actions):
            group.required = False
    leaf.set_defaults(**defaults)


def _locate_config(argv: list[str]) -> tuple[str | None, str]:
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    words = [t for t in argv[:2] if not t.startswith("-")]
    name = " ".join(words) if words[:1] in (["ramsey"], ["book"], ["trace"]) else " ".join(words[:1])
    return path, name


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, leaves = build_parser()
    try:
        cfg_path, name = _locate_config(argv)
        if cfg_path and name in leaves:
            _apply_config(leaves[name], read_config(cfg_path), argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return code
    except (UsageError, ExprError, bk.ConfigError, ValueError, OSError) as exc:
        print(f"ramsey-book: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
