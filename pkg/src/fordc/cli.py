"""Command-line front door: check, ford, merge, and the corpus harness.

Exit codes: 0 success, 1 type error, 2 parse/scope error, 3 I/O error,
4 ford transform rejected, 5 merge block rejected. Output files are
written atomically (write-then-rename) or not at all.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from .diagnostics import (Diagnostic, FordcError, ParseError,
                          TransformError)
from .ford import ford_module
from .kernel import check_module, prelude_signature
from .merge import merge_block
from .normalize import DEFAULT_STEP_BUDGET
from .parser import parse
from .printer import print_module

EXIT_OK = 0
EXIT_TYPE = 1
EXIT_PARSE = 2
EXIT_IO = 3
EXIT_FORD = 4
EXIT_MERGE = 5


class _Failure(Exception):
    def __init__(self, exit_code: int, diag: Diagnostic):
        self.exit_code = exit_code
        self.diag = diag


def _emit(diag: Diagnostic, json_mode: bool):
    print(diag.json() if json_mode else diag.text(), file=sys.stderr)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise _Failure(EXIT_IO, Diagnostic("error", "E-IO", str(e), path))


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=d, prefix=".fordc-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                f.write(text)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as e:
        raise _Failure(EXIT_IO, Diagnostic("error", "E-IO", str(e), path))


def _load_checked(path: str, budget: int):
    text = _read(path)
    try:
        module = parse(text, prelude_signature().name_env())
    except ParseError as e:
        raise _Failure(EXIT_PARSE, e.diagnostic(path))
    try:
        sig = check_module(module, budget)
    except FordcError as e:
        raise _Failure(EXIT_TYPE, e.diagnostic(path))
    return module, sig


def _budget(args) -> int:
    if args.step_budget is not None:
        return args.step_budget
    env = os.environ.get("FORDC_STEP_BUDGET")
    return int(env) if env else DEFAULT_STEP_BUDGET


def cmd_check(args) -> int:
    status = EXIT_OK
    for path in args.paths:
        try:
            _load_checked(path, _budget(args))
            print(f"checked {path}")
        except _Failure as f:
            _emit(f.diag, args.json)
            if status == EXIT_OK:
                status = f.exit_code
    return status


def cmd_ford(args) -> int:
    module, sig = _load_checked(args.path, _budget(args))
    try:
        out, plan = ford_module(module, sig, args.data, args.suffix)
        check_module(out, _budget(args))
    except TransformError as e:
        raise _Failure(EXIT_FORD, e.diagnostic(args.path))
    except FordcError as e:
        raise _Failure(EXIT_TYPE, e.diagnostic(args.path))
    text = print_module(out)
    report = json.dumps(plan.report(), indent=2, sort_keys=True)
    if args.out:
        _atomic_write(args.out, text)
        print(report)
    else:
        sys.stdout.write(text)
        print(report, file=sys.stderr)
    return EXIT_OK


def _parse_path_spec(spec: str) -> tuple[str, str, str]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise _Failure(EXIT_MERGE, Diagnostic(
            "error", "E-MERGE-BLOCK",
            f"--path expects name:Member:Member, got {spec!r}"))
    return parts[0], parts[1], parts[2]


def cmd_merge(args) -> int:
    module, sig = _load_checked(args.path, _budget(args))
    names = [n for n in args.types.split(",") if n]
    paths = [_parse_path_spec(s) for s in args.path_ctor]
    try:
        out, plan = merge_block(module, sig, names, paths)
        check_module(out, _budget(args))
    except TransformError as e:
        raise _Failure(EXIT_MERGE, e.diagnostic(args.path))
    except FordcError as e:
        raise _Failure(EXIT_TYPE, e.diagnostic(args.path))
    text = print_module(out)
    report = json.dumps(plan.report(), indent=2, sort_keys=True)
    if args.out:
        _atomic_write(args.out, text)
        print(report)
    else:
        sys.stdout.write(text)
        print(report, file=sys.stderr)
    return EXIT_OK


# -- corpus harness ------------------------------------------------------------


def _run_case(kind: str, fields: list[str], base: str, budget: int) -> str | None:
    """Returns None on pass, or a short failure reason."""

    def p(rel: str) -> str:
        return os.path.join(base, rel)

    if kind == "check":
        (inp,) = fields
        _load_checked(p(inp), budget)
        return None
    if kind == "check-error":
        inp, code = fields
        try:
            _load_checked(p(inp), budget)
        except _Failure as f:
            if f.diag.code == code:
                return None
            return f"expected {code}, got {f.diag.code}"
        return f"expected failure {code}, module checked"
    if kind == "parse":
        (inp,) = fields
        try:
            parse(_read(p(inp)), prelude_signature().name_env())
        except ParseError as e:
            return f"parse failed: {e.message}"
        return None
    if kind == "golden":
        inp, golden = fields
        try:
            module = parse(_read(p(inp)), prelude_signature().name_env())
        except ParseError as e:
            return f"parse failed: {e.message}"
        if print_module(module) != _read(p(golden)):
            return "printed text differs from golden"
        return None
    if kind == "ford":
        inp, golden, data = fields[:3]
        suffix = fields[3] if len(fields) > 3 else "F"
        module, sig = _load_checked(p(inp), budget)
        try:
            out, _ = ford_module(module, sig, data, suffix)
            check_module(out, budget)
        except FordcError as e:
            return f"ford failed: {e.message}"
        if print_module(out) != _read(p(golden)):
            return "forded module differs from golden"
        return None
    if kind == "ford-error":
        inp, data = fields
        module, sig = _load_checked(p(inp), budget)
        try:
            ford_module(module, sig, data)
        except TransformError:
            return None
        return "expected the ford transform to be rejected"
    if kind == "merge":
        inp, golden, types = fields[:3]
        paths = [_parse_path_spec(s) for s in fields[3:]]
        module, sig = _load_checked(p(inp), budget)
        try:
            out, _ = merge_block(module, sig, types.split(","), paths)
            check_module(out, budget)
        except FordcError as e:
            return f"merge failed: {e.message}"
        if print_module(out) != _read(p(golden)):
            return "merged module differs from golden"
        return None
    if kind == "merge-error":
        inp, types = fields
        module, sig = _load_checked(p(inp), budget)
        try:
            merge_block(module, sig, types.split(","))
        except TransformError:
            return None
        return "expected the merge transform to be rejected"
    return f"unknown case kind {kind!r}"


def cmd_corpus(args) -> int:
    text = _read(args.manifest)
    base = os.path.dirname(os.path.abspath(args.manifest))
    passed = failed = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        kind, *fields = line.split()
        try:
            reason = _run_case(kind, fields, base, _budget(args))
        except _Failure as f:
            reason = f.diag.message
        except FordcError as e:
            reason = e.message
        if reason is None:
            passed += 1
            print(f"PASS {kind:12s} {fields[0] if fields else ''}")
        else:
            failed += 1
            print(f"FAIL {kind:12s} {fields[0] if fields else ''}: {reason}")
    print(f"{passed} passed, {failed} failed")
    return EXIT_OK if failed == 0 else EXIT_TYPE


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fordc",
        description="Type-check a small indexed-datatype language and "
                    "mechanically de-index (ford) or merge its datatypes.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--step-budget", type=int, default=None,
                        help="normalization step budget "
                             "(default 100000, env FORDC_STEP_BUDGET)")

    sp = sub.add_parser("check", help="type-check modules")
    sp.add_argument("paths", nargs="+")
    sp.add_argument("--json", action="store_true",
                    help="diagnostics as JSON lines on stderr")
    common(sp)
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("ford", help="de-index a datatype")
    sp.add_argument("path")
    sp.add_argument("--data", required=True, help="datatype to ford")
    sp.add_argument("--suffix", default="F")
    sp.add_argument("--out", default=None)
    common(sp)
    sp.set_defaults(fn=cmd_ford, json=False)

    sp = sub.add_parser("merge", help="merge datatypes into one family")
    sp.add_argument("path")
    sp.add_argument("--types", required=True, help="comma-separated block")
    sp.add_argument("--path", dest="path_ctor", action="append", default=[],
                    metavar="NAME:MEMBER:MEMBER",
                    help="add an axiomatic identity between two tags")
    sp.add_argument("--out", default=None)
    common(sp)
    sp.set_defaults(fn=cmd_merge, json=False)

    sp = sub.add_parser("corpus", help="run a corpus manifest")
    sp.add_argument("manifest")
    common(sp)
    sp.set_defaults(fn=cmd_corpus, json=False)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        return args.fn(args)
    except _Failure as f:
        _emit(f.diag, getattr(args, "json", False))
        return f.exit_code


if __name__ == "__main__":
    sys.exit(main())
