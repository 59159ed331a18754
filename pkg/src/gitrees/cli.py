"""Command-line front end: parse, type-check and run programs.

Exit status: 0 success (including acceptable errors), 1 parse or type
error, 2 run-time violation (disallowed error or stuck), 3 out of fuel,
4 mismatch between the two semantics in compare mode.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Sequence, Tuple

from . import afflang, interop, iolang
from .core import LIN, RUNTIME, ErrorKind, Fun, Nat
from .effects import STORE_IO
from .engine import DEFAULT_FUEL, Outcome, OutcomeKind, run
from .reifiers import IoState, reifier_for
from .sexpr import ParseError

EXIT_OK, EXIT_TYPE, EXIT_VIOLATION, EXIT_FUEL, EXIT_MISMATCH = 0, 1, 2, 3, 4

ERROR_KINDS = {"lin": LIN, "runtime": RUNTIME}


@dataclass
class RunConfig:
    language: str = "io"
    mode: str = "denote"
    fuel: int = DEFAULT_FUEL
    input_tape: Tuple[int, ...] = ()
    allowed_errors: FrozenSet[ErrorKind] = frozenset()
    trace: bool = False

    def __post_init__(self):
        if self.mode != "denote" and self.language != "io":
            raise ValueError(f"mode {self.mode!r} is only available for --lang io")


@dataclass
class Report:
    """One evaluation's result, normalised across both semantics."""

    status: str  # "ok", "error", "stuck", "out-of-fuel"
    value: Optional[str]
    tape_in: Tuple[int, ...]
    tape_out: Tuple[int, ...]
    heap_cells: int
    steps: int
    error: Optional[str] = None
    acceptable: bool = False
    trace: List[str] = field(default_factory=list)

    def line(self) -> str:
        if self.status == "ok":
            head = f"OK {self.value}"
        elif self.status == "error":
            head = f"ERR {self.error} ({'acceptable' if self.acceptable else 'violation'})"
        else:
            head = self.status.upper()
        return (f"{head} | tape-in {_tape(self.tape_in)} | tape-out {_tape(self.tape_out)}"
                f" | heap {self.heap_cells} cells | steps {self.steps}")

    def exit_code(self) -> int:
        if self.status == "ok" or (self.status == "error" and self.acceptable):
            return EXIT_OK
        if self.status == "out-of-fuel":
            return EXIT_FUEL
        return EXIT_VIOLATION

    def observable(self):
        return self.status, self.value, self.tape_in, self.tape_out


def _tape(xs: Sequence[int]) -> str:
    return ",".join(map(str, xs)) if xs else "-"


def _show_tree(t) -> str:
    if isinstance(t, Nat):
        return str(t.n)
    if isinstance(t, Fun):
        return "<fun>"
    return type(t).__name__


def report_outcome(out: Outcome, reifier, trace=None) -> Report:
    io = reifier.local(out.state, "io")
    heap = reifier.local(out.state, "store")
    status = {OutcomeKind.VALUE: "ok", OutcomeKind.ERROR: "error",
              OutcomeKind.STUCK: "stuck", OutcomeKind.OUT_OF_FUEL: "out-of-fuel"}[out.kind]
    return Report(
        status=status,
        value=_show_tree(out.tree) if out.kind is OutcomeKind.VALUE else None,
        tape_in=io.inputs, tape_out=io.outputs, heap_cells=len(heap.cells),
        steps=out.steps,
        error=out.tree.kind.tag if out.kind is OutcomeKind.ERROR else None,
        acceptable=out.acceptable,
        trace=[e.render() for e in trace] if trace is not None else [],
    )


class ProgramError(Exception):
    """The program failed to parse or type-check."""


def load_program(src: str, language: str):
    """Parse and type-check; return the tree builder input for ``denote``."""
    try:
        if language == "io":
            expr = iolang.parse_io(src)
        elif language == "aff":
            expr = afflang.parse_aff(src)
        else:
            expr = interop.parse_comb(src)
    except ParseError as exc:
        raise ProgramError(f"parse error: {exc}") from None
    if language == "io":
        if iolang.free_vars(expr):
            raise ProgramError(f"type error: free variables {sorted(iolang.free_vars(expr))}")
        if iolang.typecheck_io({}, expr) is None:
            raise ProgramError("type error: program is ill-typed")
        return expr
    derive = afflang.derive_aff if language == "aff" else interop.derive_comb
    d = derive({}, expr)
    if d is None:
        raise ProgramError("type error: program is ill-typed")
    return d


def denote_program(program, language: str):
    if language == "io":
        return iolang.denote_io(program, {}, STORE_IO)
    if language == "aff":
        return afflang.denote_aff(program, {}, STORE_IO)
    return interop.denote_comb(program, {}, STORE_IO)


def run_denotational(program, cfg: RunConfig) -> Report:
    reifier = reifier_for(STORE_IO, cfg.input_tape)
    out, trace = run(denote_program(program, cfg.language), reifier.initial_state(), reifier,
                     cfg.fuel, cfg.allowed_errors, record=cfg.trace)
    return report_outcome(out, reifier, trace if cfg.trace else None)


def run_operational(expr, cfg: RunConfig) -> Report:
    res = iolang.op_run(iolang.IoConfig(expr, IoState.of(cfg.input_tape)), cfg.fuel)
    status = {"value": "ok", "stuck": "stuck", "out-of-fuel": "out-of-fuel"}[res.status]
    final = res.config.expr
    value = None
    if res.status == "value":
        value = str(final.n) if isinstance(final, iolang.Lit) else "<fun>"
    return Report(status, value, res.config.tapes.inputs, res.config.tapes.outputs, 0, res.steps)


def parse_tape(text: str) -> Tuple[int, ...]:
    if not text.strip():
        return ()
    try:
        xs = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of naturals: {text!r}")
    if any(x < 0 for x in xs):
        raise argparse.ArgumentTypeError("tape entries must be natural numbers")
    return xs


def _error_kind(text: str) -> ErrorKind:
    try:
        return ERROR_KINDS[text.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"unknown error kind {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gitrees", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="evaluate a program file")
    p.add_argument("--lang", choices=("io", "aff", "comb"), default="io")
    p.add_argument("--mode", choices=("denote", "operational", "compare"), default="denote")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--tape", type=parse_tape, default=(), help="input tape, e.g. 4,5,6")
    p.add_argument("--allow", type=_error_kind, action="append", default=[],
                   help="error kind a run may end in (lin, runtime); repeatable")
    p.add_argument("--trace", action="store_true", help="print one line per reduction step")
    p.add_argument("file")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.lang, args.mode, args.fuel, args.tape,
                        frozenset(args.allow), args.trace)
    except ValueError as exc:
        parser.error(str(exc))
    if cfg.fuel < 0:
        parser.error("--fuel must be non-negative")

    with open(args.file, encoding="utf-8") as fh:
        src = fh.read()
    try:
        program = load_program(src, cfg.language)
    except ProgramError as exc:
        print(f"REJECTED {exc}")
        return EXIT_TYPE

    if cfg.mode == "operational":
        rep = run_operational(program, cfg)
        print(rep.line())
        return rep.exit_code()

    den = run_denotational(program, cfg)
    if cfg.mode == "denote":
        print(den.line())
        for line in den.trace:
            print(line)
        return den.exit_code()

    ops = run_operational(program, cfg)
    print(f"denote:      {den.line()}")
    print(f"operational: {ops.line()}")
    for line in den.trace:
        print(line)
    if den.status == ops.status == "ok":
        if den.observable() != ops.observable():
            print("MISMATCH")
            return EXIT_MISMATCH
        print("MATCH")
        return EXIT_OK
    if "out-of-fuel" in (den.status, ops.status):
        return EXIT_FUEL
    if "ok" in (den.status, ops.status):
        print("MISMATCH")
        return EXIT_MISMATCH
    return EXIT_VIOLATION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
