"""Command-line front end: classify, canonicalize, generate, verify.

Documents are JSON.  A pair document carries two symmetric 3x3 matrices;
string entries like "5/3" select the exact path, plain numbers the float
path, and a document never mixes the two.  Exact values serialize back as
strings so results round-trip losslessly.

Exit codes are part of the interface: 0 ok, 1 invalid input, 2
classification or verification failure, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from fractions import Fraction

from .canonical import (
    CanonicalResult,
    canonical_matrices,
    canonicalize,
    validate_params,
)
from .classify import ClassId, class_conditions, classify_report
from .errors import (
    AmbiguousClassification,
    BimetricError,
    InternalInvariantViolation,
    InvalidInputError,
    InvalidParamsError,
    InvalidSignatureError,
    ModeMismatchError,
    ResidualTooLarge,
)
from .exact import EXACT, FLOAT, Matrix3, SymMatrix3, congruence
from .invariants import MetricPair, invariant_report
from .numeric import FloatToleranceConfig, classify_float
from .testkit import SampleSpec, sample_class

DEFAULT_TOL = 1e-9

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_FAILED = 2
EXIT_INTERNAL = 3


# ---------------------------------------------------------------------------
# document parsing / serialization

def _parse_exact_entry(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInputError(f"bad exact entry {s!r}: {exc}") from None


def _entry_rows(obj, key: str):
    rows = obj.get(key)
    if (
        not isinstance(rows, list)
        or len(rows) != 3
        or any(not isinstance(r, list) or len(r) != 3 for r in rows)
    ):
        raise InvalidInputError(f"{key!r} must be a 3x3 array")
    return rows


def parse_pair_document(obj: dict, mode_override: str = None):
    """Build a MetricPair from a parsed JSON document.

    Returns (pair, label, warnings).  String entries select EXACT, numeric
    entries FLOAT; --mode converts explicitly (binary64 values convert to
    their exact rational value).
    """
    if not isinstance(obj, dict):
        raise InvalidInputError("pair document must be a JSON object")
    rows_g = _entry_rows(obj, "g")
    rows_gc = _entry_rows(obj, "g_check")
    flat = [x for rows in (rows_g, rows_gc) for row in rows for x in row]
    strings = [isinstance(x, str) for x in flat]
    numbers = [isinstance(x, (int, float)) and not isinstance(x, bool) for x in flat]
    if any(strings) and not all(strings):
        raise InvalidInputError("document mixes string (exact) and numeric entries")
    if not any(strings) and not all(numbers):
        raise InvalidInputError("entries must be numbers or 'p/q' strings")
    mode = EXACT if all(strings) else FLOAT
    warnings = []

    if mode == EXACT:
        gm = [[_parse_exact_entry(x) for x in row] for row in rows_g]
        gcm = [[_parse_exact_entry(x) for x in row] for row in rows_gc]
        for name, m in (("g", gm), ("g_check", gcm)):
            for i in range(3):
                for j in range(i + 1, 3):
                    if m[i][j] != m[j][i]:
                        raise InvalidInputError(f"{name} is not symmetric at ({i},{j})")
    else:
        gm = [[float(x) for x in row] for row in rows_g]
        gcm = [[float(x) for x in row] for row in rows_gc]
        for name, m in (("g", gm), ("g_check", gcm)):
            scale = max(1.0, max(abs(x) for row in m for x in row))
            asym = max(abs(m[i][j] - m[j][i]) for i in range(3) for j in range(i + 1, 3))
            if asym > 1e-12 * scale:
                raise InvalidInputError(f"{name} asymmetry {asym:.3e} exceeds 1e-12")
            for i in range(3):
                for j in range(i + 1, 3):
                    m[i][j] = m[j][i] = (m[i][j] + m[j][i]) / 2.0

    if mode_override == EXACT and mode == FLOAT:
        gm = [[Fraction(x) for x in row] for row in gm]
        gcm = [[Fraction(x) for x in row] for row in gcm]
        mode = EXACT
        warnings.append("float entries converted exactly to rationals (--mode exact)")
    elif mode_override == FLOAT and mode == EXACT:
        gm = [[float(x) for x in row] for row in gm]
        gcm = [[float(x) for x in row] for row in gcm]
        mode = FLOAT
        warnings.append("exact entries rounded to binary64 (--mode float)")

    try:
        pair = MetricPair(SymMatrix3.from_rows(gm), SymMatrix3.from_rows(gcm))
    except (ValueError, ModeMismatchError) as exc:
        raise InvalidInputError(str(exc)) from None
    label = obj.get("label")
    return pair, label, warnings


def _scalar_out(x):
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


def _matrix_out(m) -> list:
    return [[_scalar_out(x) for x in row] for row in m.rows]


def _invariants_out(rep) -> dict:
    out = {
        "a0": _scalar_out(rep.coeffs.a0),
        "a1": _scalar_out(rep.coeffs.a1),
        "a2": _scalar_out(rep.coeffs.a2),
        "D2": _scalar_out(rep.d2),
        "D3": _scalar_out(rep.d3),
    }
    for name in ("sigma0", "sigma1", "sigma2", "sigma3"):
        val = getattr(rep, name)
        if val is not None:
            out[name] = val
    return out


def result_document(
    mode: str,
    class_id: ClassId,
    rep,
    result: CanonicalResult = None,
    warnings=(),
) -> dict:
    doc = {
        "class": class_id.value,
        "conditions": class_conditions(class_id).as_dict(),
        "invariants": _invariants_out(rep),
    }
    if result is not None:
        doc["canonical"] = {
            "g": _matrix_out(result.form.canonical_g),
            "g_check": _matrix_out(result.form.canonical_g_check),
            "params": {k: _scalar_out(v) for k, v in result.form.params.items()},
        }
        doc["transform"] = [[float(x) for x in row] for row in result.transform.rows]
        doc["residual"] = result.residual
    doc["mode"] = mode.upper()
    doc["warnings"] = list(warnings)
    return doc


def _format_text(doc: dict) -> str:
    lines = [f"class:     {doc['class']}"]
    conds = ", ".join(f"{k}{v}" if k.startswith("D") else f"{k}={v}"
                      for k, v in doc["conditions"].items())
    lines.append(f"condition: {conds}")
    for k, v in doc["invariants"].items():
        lines.append(f"{k:>9}: {v}")
    if "canonical" in doc:
        lines.append("canonical g / g_check:")
        for rg, rgc in zip(doc["canonical"]["g"], doc["canonical"]["g_check"]):
            left = "  ".join(f"{x!s:>8}" for x in rg)
            right = "  ".join(f"{x!s:>8}" for x in rgc)
            lines.append(f"  [{left}]   [{right}]")
        lines.append("params:    " + ", ".join(f"{k}={v}" for k, v in doc["canonical"]["params"].items()))
        lines.append("transform:")
        for row in doc["transform"]:
            lines.append("  [" + "  ".join(f"{x: .12e}" for x in row) + "]")
        lines.append(f"residual:  {doc['residual']:.3e}")
    lines.append(f"mode:      {doc['mode']}")
    for w in doc["warnings"]:
        lines.append(f"warning:   {w}")
    return "\n".join(lines) + "\n"


def _emit(doc: dict, fmt: str, output: str):
    text = _format_text(doc) if fmt == "text" else json.dumps(doc, indent=2) + "\n"
    if output and output != "-":
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON: {exc}") from None


# ---------------------------------------------------------------------------
# commands

def _classify_document(obj: dict, args) -> dict:
    pair, _, warnings = parse_pair_document(obj, args.mode)
    if pair.mode == EXACT:
        rep = invariant_report(pair)
        cid = classify_report(rep)
        return result_document(EXACT, cid, rep, warnings=warnings)
    fc = classify_float(pair, FloatToleranceConfig())
    return result_document(FLOAT, fc.class_id, fc, warnings=list(warnings) + list(fc.notes))


def _canonicalize_document(obj: dict, args) -> dict:
    pair, _, warnings = parse_pair_document(obj, args.mode)
    warnings = list(warnings)
    if pair.mode == FLOAT:
        pair = MetricPair(
            SymMatrix3.from_rows([[Fraction(x) for x in row] for row in pair.g.rows]),
            SymMatrix3.from_rows([[Fraction(x) for x in row] for row in pair.g_check.rows]),
        )
        warnings.append(
            "float input converted exactly to rationals for canonicalization"
        )
    rep = invariant_report(pair)
    cid = classify_report(rep)
    result = canonicalize(pair, tol=args.tol)
    return result_document(EXACT, cid, rep, result=result, warnings=warnings)


def cmd_classify(args) -> int:
    return _run_maybe_batch(args, _classify_document)


def cmd_canonicalize(args) -> int:
    return _run_maybe_batch(args, _canonicalize_document)


def _process_one(task):
    in_path, out_path, args, which = task
    handler = _classify_document if which == "classify" else _canonicalize_document
    try:
        doc = handler(_load_json(in_path), args)
    except BimetricError as exc:
        return in_path, _exit_code_for(exc), str(exc)
    text = _format_text(doc) if args.format == "text" else json.dumps(doc, indent=2) + "\n"
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return in_path, EXIT_OK, doc["class"]


def _run_maybe_batch(args, handler) -> int:
    which = "classify" if handler is _classify_document else "canonicalize"
    if args.input and os.path.isdir(args.input):
        if not args.output:
            raise InvalidInputError("batch mode requires --output directory")
        os.makedirs(args.output, exist_ok=True)
        names = sorted(n for n in os.listdir(args.input) if n.endswith(".json"))
        tasks = [
            (
                os.path.join(args.input, n),
                os.path.join(args.output, n.replace(".json", ".result.json")),
                args,
                which,
            )
            for n in names
        ]
        if args.jobs > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
                outcomes = list(pool.map(_process_one, tasks))
        else:
            outcomes = [_process_one(t) for t in tasks]
        worst = EXIT_OK
        for path, code, note in outcomes:
            status = "ok" if code == EXIT_OK else f"exit {code}"
            print(f"{path}: {status} ({note})")
            worst = max(worst, code)
        return worst
    doc = handler(_load_json(args.input), args)
    _emit(doc, args.format, args.output)
    return EXIT_OK


def _parse_params(text: str) -> dict:
    if not text:
        raise InvalidParamsError("--params is required, e.g. --params a=2,b=1,c=3")
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise InvalidParamsError(f"bad --params item {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = Fraction(v.strip())
    return out


def cmd_generate(args) -> int:
    try:
        cid = ClassId.parse(getattr(args, "class"))
    except ValueError as exc:
        raise InvalidInputError(str(exc)) from None
    params = _parse_params(args.params) if args.params else None
    if params is not None:
        validate_params(cid, params)
    sample = sample_class(
        SampleSpec(cid, params=params, congruence_bound=args.bound, seed=args.seed)
    )
    pair_doc = {
        "g": _matrix_out(sample.pair.g),
        "g_check": _matrix_out(sample.pair.g_check),
        "label": f"{cid.short} seed={args.seed} bound={args.bound}",
    }
    truth_doc = {
        "class": cid.value,
        "params": {k: _scalar_out(v) for k, v in sample.truth.params.items()},
        "canonical": {
            "g": _matrix_out(sample.truth.canonical_g),
            "g_check": _matrix_out(sample.truth.canonical_g_check),
        },
        "generator": _matrix_out(sample.generator),
    }
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(pair_doc, indent=2) + "\n")
        sidecar = args.output + ".truth.json"
        with open(sidecar, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(truth_doc, indent=2) + "\n")
    else:
        sys.stdout.write(json.dumps({"pair": pair_doc, "ground_truth": truth_doc}, indent=2) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    import numpy as np

    pair, _, _ = parse_pair_document(_load_json(args.input), args.mode)
    res_doc = _load_json(args.result)
    checks = []

    try:
        declared = ClassId.parse(res_doc.get("class", ""))
    except ValueError as exc:
        raise InvalidInputError(f"result document: {exc}") from None

    if pair.mode == EXACT:
        rep = invariant_report(pair)
        recomputed = classify_report(rep)
    else:
        fc = classify_float(pair, FloatToleranceConfig())
        recomputed = fc.class_id
    ok_class = recomputed == declared
    checks.append(("class", ok_class,
                   f"declared {declared.value}, recomputed {recomputed.value}"))

    declared_conds = res_doc.get("conditions")
    if declared_conds is not None:
        want = class_conditions(recomputed).as_dict()
        checks.append(("conditions", declared_conds == want,
                       f"declared {declared_conds}, expected {want}"))

    if "transform" in res_doc and "canonical" in res_doc:
        t = np.array(res_doc["transform"], dtype=float)
        can_g = np.array([[float(Fraction(x)) if isinstance(x, str) else float(x)
                           for x in row] for row in res_doc["canonical"]["g"]])
        can_gc = np.array([[float(Fraction(x)) if isinstance(x, str) else float(x)
                            for x in row] for row in res_doc["canonical"]["g_check"]])
        g = np.array([[float(x) for x in row] for row in pair.g.rows])
        gc = np.array([[float(x) for x in row] for row in pair.g_check.rows])
        residual = max(
            float(np.abs(t.T @ g @ t - can_g).max()),
            float(np.abs(t.T @ gc @ t - can_gc).max()),
        )
        checks.append(("residual", residual <= args.tol,
                       f"{residual:.3e} vs tolerance {args.tol:.1e}"))

    failed = [c for c in checks if not c[1]]
    for name, ok, detail in checks:
        print(f"check {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    return EXIT_OK if not failed else EXIT_FAILED


def _exit_code_for(exc: BimetricError) -> int:
    if isinstance(exc, InternalInvariantViolation):
        return EXIT_INTERNAL
    if isinstance(exc, (AmbiguousClassification, ResidualTooLarge)):
        return EXIT_FAILED
    return EXIT_INVALID_INPUT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bimetric3",
        description="Classify and canonicalize pairs of symmetric bilinear forms "
        "on a 3-dimensional space, the first of signature (+,-,-).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, with_tol=False):
        p.add_argument("--input", required=True, help="pair document (JSON), '-' for stdin, or a directory")
        p.add_argument("--output", help="output path ('-' or omitted for stdout); directory in batch mode")
        p.add_argument("--format", choices=["json", "text"], default="json")
        p.add_argument("--mode", choices=[EXACT, FLOAT], default=None,
                       help="override the inferred mode with an explicit conversion")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers in batch mode")
        if with_tol:
            p.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p = sub.add_parser("classify", help="classify a pair document")
    add_io(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("canonicalize", help="classify and construct the canonical basis")
    add_io(p, with_tol=True)
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("generate", help="generate a class-conditioned sample pair")
    p.add_argument("--class", required=True, help="class id (T1..T10, 1..10, or full name)")
    p.add_argument("--params", help="canonical parameters, e.g. a=2,b=1,c=3")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bound", type=int, default=5)
    p.add_argument("--output", help="pair document path; a .truth.json sidecar is written next to it")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="check a result document against its pair")
    p.add_argument("--input", required=True, help="pair document")
    p.add_argument("--result", required=True, help="result document from canonicalize/classify")
    p.add_argument("--mode", choices=[EXACT, FLOAT], default=None)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInputError, InvalidParamsError, InvalidSignatureError, ModeMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except (AmbiguousClassification, ResidualTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except InternalInvariantViolation as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
