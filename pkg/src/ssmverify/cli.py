"""Command-line surface tying compilers, evaluator, oracles and solvers
together.

Exit codes partition outcomes: 0 satisfiable/true, 1 unsatisfiable/false,
2 usage or parse error, 3 resource limit hit.  Every command writes one
machine-readable JSON report to stdout; witnesses appear in the word
literal syntax.  ``SSMVERIFY_MAX_STATES`` and ``SSMVERIFY_MAX_MEM_MB``
override the solver resource guards.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict

from . import ltl as ltl_mod
from .arithmetic import ArithMode, FixedPointFormat
from .compilers import (
    compile_ilp,
    compile_ltl,
    compile_minsky,
    ilp_oracle,
    minsky_oracle,
    parse_ilp,
    parse_minsky,
    run_encode,
)
from .errors import (
    EmptyWordError,
    InputFormatError,
    LtlSyntaxError,
    PreconditionError,
    ResourceLimitError,
    SsmVerifyError,
)
from .modelfile import load_model, save_model
from .solvers import LengthBound, pump_down, sat_bounded, sat_fixed
from .ssm import (
    classify_gates,
    evaluate,
    quantization_report,
    state_count_bound,
)
from .words import format_word, parse_trace, parse_word

EXIT_SAT = 0
EXIT_UNSAT = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssmverify")
    sub = parser.add_subparsers(dest="command", required=True)

    comp = sub.add_parser("compile", help="compile a source problem to a model file")
    comp.add_argument("kind", choices=["ltl", "minsky", "ilp"])
    comp.add_argument("input", help="formula text (ltl) or input file (minsky, ilp)")
    comp.add_argument("-o", "--output", required=True)

    ev = sub.add_parser("eval", help="evaluate a model on a word")
    ev.add_argument("model")
    ev.add_argument("--word", required=True)
    ev.add_argument("--arith", default="exact")

    sat = sub.add_parser("sat", help="decide satisfiability")
    satsub = sat.add_subparsers(dest="solver", required=True)
    sb = satsub.add_parser("bounded")
    sb.add_argument("model")
    sb.add_argument("--max-len", type=int, required=True)
    sb.add_argument("--binary", action="store_true",
                    help="treat --max-len n as the limit 2**n")
    sb.add_argument("--arith", default="exact")
    sf = satsub.add_parser("fixed")
    sf.add_argument("model")
    sf.add_argument("--arith", required=True, help="fx:<total>:<frac>")
    sf.add_argument("--threads", type=int, default=1)

    pump = sub.add_parser("pump", help="shorten an accepted word")
    pump.add_argument("model")
    pump.add_argument("--word", required=True)
    pump.add_argument("--arith", required=True, help="fx:<total>:<frac>")

    oracle = sub.add_parser("oracle", help="run a brute-force source-language oracle")
    osub = oracle.add_subparsers(dest="oracle_kind", required=True)
    ol = osub.add_parser("ltl")
    ol.add_argument("formula")
    ol.add_argument("--trace", required=True)
    oi = osub.add_parser("ilp")
    oi.add_argument("file")
    om = osub.add_parser("minsky")
    om.add_argument("file")
    om.add_argument("--max-steps", type=int, required=True)

    cls = sub.add_parser("classify", help="gate classes and search bounds")
    cls.add_argument("model")
    cls.add_argument("--bits", type=int, default=6,
                     help="bit-width for the state-count bound")
    return parser


def _sat_report(result) -> dict:
    report = {"verdict": result.verdict, "stats": asdict(result.stats)}
    if result.witness is not None:
        report["witness"] = format_word(result.witness)
    return report


def _require_fixed(text: str) -> FixedPointFormat:
    mode = ArithMode.parse(text)
    if mode.is_exact:
        raise InputFormatError("this command requires a fixed-point format fx:<t>:<f>")
    return mode.fmt


def _cmd_compile(args) -> tuple[int, dict]:
    if args.kind == "ltl":
        model = compile_ltl(ltl_mod.parse(args.input))
    elif args.kind == "minsky":
        with open(args.input) as fh:
            model = compile_minsky(parse_minsky(fh.read()))
    else:
        with open(args.input) as fh:
            model = compile_ilp(parse_ilp(fh.read()))
    save_model(model, args.output)
    return EXIT_SAT, {
        "model": args.output,
        "dimension": model.dim,
        "layers": model.num_layers,
        "alphabet_size": len(model.alphabet),
        "metadata": model.metadata_dict,
    }


def _cmd_eval(args) -> tuple[int, dict]:
    model = load_model(args.model)
    mode = ArithMode.parse(args.arith)
    word = parse_word(args.word)
    if not word:
        raise EmptyWordError("empty word undefined")
    value = evaluate(model, word, mode)
    if mode.is_exact:
        accepted = value == 1
        shown = str(value)
    else:
        accepted = value.raw == mode.fmt.scale
        shown = str(value.value)
    report = {
        "word": format_word(word),
        "value": shown,
        "accepted": accepted,
    }
    return (EXIT_SAT if accepted else EXIT_UNSAT), report


def _cmd_sat(args) -> tuple[int, dict]:
    model = load_model(args.model)
    if args.solver == "bounded":
        mode = ArithMode.parse(args.arith)
        bound = (
            LengthBound.binary(args.max_len) if args.binary
            else LengthBound.unary(args.max_len)
        )
        result = sat_bounded(model, bound, mode)
        report = _sat_report(result)
        report["bound"] = bound.value
    else:
        fmt = _require_fixed(args.arith)
        issues = quantization_report(model, fmt)
        if issues:
            print(
                f"warning: {len(issues)} model constants are not exactly "
                f"representable in {fmt} and were quantised",
                file=sys.stderr,
            )
        result = sat_fixed(model, fmt, threads=args.threads)
        report = _sat_report(result)
    return (EXIT_SAT if result.satisfiable else EXIT_UNSAT), report


def _cmd_pump(args) -> tuple[int, dict]:
    model = load_model(args.model)
    fmt = _require_fixed(args.arith)
    word = parse_word(args.word)
    pumped = pump_down(model, word, fmt)
    return EXIT_SAT, {
        "word": format_word(word),
        "pumped": format_word(pumped),
        "removed": len(word) - len(pumped),
    }


def _cmd_oracle(args) -> tuple[int, dict]:
    if args.oracle_kind == "ltl":
        phi = ltl_mod.parse(args.formula)
        trace = parse_trace(args.trace)
        if not trace:
            raise EmptyWordError("empty trace undefined")
        result = ltl_mod.holds(phi, trace, 1)
        return (EXIT_SAT if result else EXIT_UNSAT), {
            "formula": ltl_mod.pretty(phi),
            "holds": result,
        }
    if args.oracle_kind == "ilp":
        with open(args.file) as fh:
            inst = parse_ilp(fh.read())
        solution = ilp_oracle(inst)
        report = {"satisfiable": solution is not None}
        if solution is not None:
            report["solution"] = list(solution)
        return (EXIT_SAT if solution is not None else EXIT_UNSAT), report
    with open(args.file) as fh:
        machine = parse_minsky(fh.read())
    run = minsky_oracle(machine, args.max_steps)
    report = {"accepting_run_found": run is not None, "max_steps": args.max_steps}
    if run is not None:
        report["run_word"] = format_word(run_encode(run))
        report["run_length"] = len(run.steps)
    return (EXIT_SAT if run is not None else EXIT_UNSAT), report


def _cmd_classify(args) -> tuple[int, dict]:
    model = load_model(args.model)
    classes = classify_gates(model)
    report = {
        "dimension": model.dim,
        "layers": model.num_layers,
        "alphabet_size": len(model.alphabet),
        "size": model.size,
        "time_invariant": classes.time_invariant,
        "diagonal": classes.diagonal,
        "state_count_bound_bits": args.bits,
        "state_count_bound": str(state_count_bound(model, args.bits)),
        "metadata": model.metadata_dict,
    }
    meta = model.metadata_dict
    if meta.get("source") == "ltl" and "formula" in meta:
        phi = ltl_mod.parse(meta["formula"])
        report["small_model_bound"] = ltl_mod.small_model_bound(phi)
    return EXIT_SAT, report


def run(argv) -> tuple[int, dict]:
    """Parse and execute one command; returns (exit status, report)."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    handlers = {
        "compile": _cmd_compile,
        "eval": _cmd_eval,
        "sat": _cmd_sat,
        "pump": _cmd_pump,
        "oracle": _cmd_oracle,
        "classify": _cmd_classify,
    }
    arith = getattr(args, "arith", None)
    try:
        status, body = handlers[args.command](args)
    except ResourceLimitError as exc:
        body = {"error": str(exc), "partial_stats": asdict(exc.stats) if exc.stats else None}
        status = EXIT_RESOURCE
    except (InputFormatError, LtlSyntaxError, EmptyWordError, PreconditionError,
            FileNotFoundError, SsmVerifyError) as exc:
        body = {"error": str(exc)}
        status = EXIT_USAGE
    report = {
        "command": args.command,
        "argv": list(argv),
        "arith": arith,
        "result": body,
        "wall_time_s": round(time.monotonic() - started, 6),
    }
    return status, report


def main(argv=None) -> int:
    status, report = run(sys.argv[1:] if argv is None else argv)
    print(json.dumps(report, indent=1))
    return status


if __name__ == "__main__":
    sys.exit(main())
