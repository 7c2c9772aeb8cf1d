"""Command-line interface.

Exit codes: 0 success, 1 a checked property failed (the report carries a
witness), 2 malformed input or unmet precondition.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional

from . import capacity as cap
from .complex import (
    Chain,
    ComplexError,
    FilteredComplex,
    capped_from_document,
    chain_from_document,
    chain_to_document,
    complex_from_document,
    complex_to_document,
    ell,
    validate,
)
from .kunneth import direct_sum, tensor
from .models import (
    ContactProfile,
    ProfileError,
    ThresholdError,
    TorusDeformation,
    contact_spectrum,
    deformed_spectrum,
    k_threshold,
    spectrum_gap,
    toric_bound,
)
from .novikov import NEG_INF, exponent, format_exponent
from .spectral import (
    CertificationError,
    DetectionFailure,
    DetectionFunctional,
    InvalidComplex,
    NotACycle,
    NotApplicable,
    WindowError,
    detection_bound,
    extension_distance_check,
    stability_check,
    svd,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


class Outcome:
    def __init__(self, report: Dict[str, Any], code: int = EXIT_OK):
        self.report = report
        self.code = code


def fx(x) -> str:
    return format_exponent(x)


# -- input ------------------------------------------------------------------


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _field(doc, key, path):
    if not isinstance(doc, dict) or key not in doc:
        raise InputError(f"{path}: missing field {key!r}")
    return doc[key]


def _is_capped(doc) -> bool:
    gens = doc.get("generators", []) if isinstance(doc, dict) else []
    return bool(gens) and isinstance(gens[0], dict) and "h_integral" in gens[0]


def _complex(doc, path) -> FilteredComplex:
    try:
        if _is_capped(doc):
            return capped_from_document(doc).view()
        return complex_from_document(doc)
    except ComplexError as exc:
        raise InputError(f"{path}: {exc}") from None


def _chain(doc, path) -> Chain:
    try:
        return chain_from_document(doc)
    except ComplexError as exc:
        raise InputError(f"{path}: {exc}") from None


def _zeta(args, doc, path) -> Chain:
    if args.chain:
        return _chain(_load(args.chain), args.chain)
    return _chain(_field(doc, "zeta", path), path)


# -- reports ----------------------------------------------------------------


def _basis_report(basis) -> Dict[str, Any]:
    c = basis.complex
    return {
        "Z": [{"chain": chain_to_document(z), "level": fx(ell(c, z))} for z in basis.Z],
        "pairs": [
            {"S": chain_to_document(s), "T": chain_to_document(t), "death": fx(ell(c, s)), "birth": fx(ell(c, t))}
            for s, t in basis.pairs
        ],
        "certified": basis.certified,
    }


def _barcode_report(bc) -> Dict[str, Any]:
    return {
        "finite": [{"degree": b.degree, "birth": fx(b.birth), "death": fx(b.death), "length": fx(b.length)}
                   for b in bc.finite],
        "infinite": [{"degree": b.degree, "birth": fx(b.birth)} for b in bc.infinite],
    }


# -- commands -----------------------------------------------------------------


def cmd_validate(args) -> Outcome:
    doc = _load(args.input[0])
    if _is_capped(doc):
        try:
            report = capped_from_document(doc).validate()
        except ComplexError as exc:
            raise InputError(f"{args.input[0]}: {exc}") from None
    else:
        report = validate(_complex(doc, args.input[0]))
    out = {
        "valid": report.ok,
        "violations": [{"kind": v.kind, "from": v.source, "to": v.target, "detail": v.detail}
                       for v in report.violations],
    }
    return Outcome(out, EXIT_OK if report.ok else EXIT_FAIL)


def _svd(args, complex):
    try:
        return svd(complex, args.window, strict=False)
    except InvalidComplex as exc:
        raise InputError(str(exc)) from None


def cmd_svd(args) -> Outcome:
    basis = _svd(args, _complex(_load(args.input[0]), args.input[0]))
    out = _basis_report(basis)
    out["barcode"] = _barcode_report(basis.barcode())
    if not basis.certified:
        b = basis.offending
        out["offending_bar"] = {"birth": fx(b.birth), "death": fx(b.death), "window": fx(args.window)}
        return Outcome(out, EXIT_FAIL)
    return Outcome(out)


def cmd_barcode(args) -> Outcome:
    basis = _svd(args, _complex(_load(args.input[0]), args.input[0]))
    out = _barcode_report(basis.barcode())
    out["certified"] = basis.certified
    return Outcome(out, EXIT_OK if basis.certified else EXIT_FAIL)


def cmd_depth(args) -> Outcome:
    basis = _svd(args, _complex(_load(args.input[0]), args.input[0]))
    return Outcome({"boundary_depth": fx(basis.boundary_depth()), "certified": basis.certified},
                   EXIT_OK if basis.certified else EXIT_FAIL)


def cmd_spectral(args) -> Outcome:
    path = args.input[0]
    doc = _load(path)
    complex = _complex(doc, path)
    zeta = _zeta(args, doc, path)
    boundary = complex.d(zeta)
    if boundary:
        raise InputError(f"zeta is not a cycle: d(zeta) = {chain_to_document(boundary)}")
    basis = _svd(args, complex)
    value = basis.distance_to_exact(zeta)
    return Outcome({"spectral_invariant": fx(value), "exact_class": value == NEG_INF,
                    "certified": basis.certified}, EXIT_OK if basis.certified else EXIT_FAIL)


def _two(args):
    if len(args.input) != 2:
        raise InputError("this command takes two complex documents")
    return [_complex(_load(p), p) for p in args.input]


def cmd_tensor(args) -> Outcome:
    a, b = _two(args)
    try:
        return Outcome(complex_to_document(tensor(a, b)))
    except ComplexError as exc:
        raise InputError(str(exc)) from None


def cmd_dsum(args) -> Outcome:
    a, b = _two(args)
    return Outcome(complex_to_document(direct_sum(a, b)))


def cmd_extension(args) -> Outcome:
    path = args.input[0]
    doc = _load(path)
    try:
        capped = capped_from_document(doc)
    except ComplexError as exc:
        raise InputError(f"{path}: {exc}") from None
    k = int(_field(doc, "k", path))
    zeta = [(str(t["label"]), int(t.get("m", 0))) for t in _field(doc, "zeta", path)]
    try:
        report = extension_distance_check(capped, k, zeta, args.window)
    except CertificationError as exc:
        return Outcome({"error": str(exc)}, EXIT_FAIL)
    out = {"left": fx(report.left), "right": fx(report.right), "equal": report.equal,
           "truncated": report.truncated,
           "eta": [{"label": l, "m": m} for l, m in report.witness]}
    return Outcome(out, EXIT_OK if report.equal else EXIT_FAIL)


def cmd_detect(args) -> Outcome:
    path = args.input[0]
    doc = _load(path)
    complex = _complex(_field(doc, "complex", path), path)
    zeta = _chain(_field(doc, "zeta", path), path)
    fdoc = _field(doc, "functional", path)
    e = DetectionFunctional.of(_field(fdoc, "threshold", path),
                               [(s["label"], s["exponent"]) for s in _field(fdoc, "support", path)])
    try:
        lattice = [exponent(a) for a in doc["lattice"]] if "lattice" in doc else None
        res = detection_bound(complex, zeta, e, _field(doc, "Eplus", path), _field(doc, "margin", path), lattice)
    except DetectionFailure as exc:
        return Outcome({"detected": False, "representative": chain_to_document(exc.representative)}, EXIT_FAIL)
    if isinstance(res, NotApplicable):
        witness = res.witness
        if isinstance(witness, Chain):
            witness = chain_to_document(witness)
        elif isinstance(witness, Fraction):
            witness = fx(witness)
        else:
            witness = str(witness)
        raise InputError(f"hypothesis failed: {res.reason} (witness {witness})")
    return Outcome({"bound": fx(res.bound), "representatives_checked": res.representatives_checked,
                    "max_replay_level": fx(res.max_replay_level), "hypotheses": list(res.hypotheses)})


def cmd_spectrum_ta(args) -> Outcome:
    path = args.input[0]
    doc = _load(path)
    try:
        orbits = capped_from_document({"generators": _field(doc, "orbits", path)}).orbits
        td = TorusDeformation.build(orbits, _field(doc, "a", path), _field(doc, "rho", path),
                                    _field(doc, "h_sup", path), _field(doc, "k", path))
        k_star = k_threshold(td)
        grid = [exponent(t) for t in doc.get("t_grid", [Fraction(i, 10) for i in range(11)])]
        spectra = [(t, deformed_spectrum(td, t)) for t in grid]
    except ThresholdError as exc:
        raise InputError(str(exc)) from None
    except (ComplexError, ProfileError) as exc:
        raise InputError(f"{path}: {exc}") from None
    verdict = stability_check(spectra) if len(spectra) >= 2 else None
    out = {"k_star": fx(k_star), "k": fx(td.k),
           "spectra": [{"t_def": fx(t), "actions": [fx(a) for a in s]} for t, s in spectra],
           "stable": verdict.ok if verdict else True}
    if verdict is not None and not verdict.ok:
        out["witness"] = {"t_def": fx(verdict.parameter), "missing": [fx(a) for a in verdict.missing],
                          "extra": [fx(a) for a in verdict.extra]}
        return Outcome(out, EXIT_FAIL)
    return Outcome(out)


def cmd_spectrum_contact(args) -> Outcome:
    path = args.input[0]
    doc = _load(path)
    try:
        prof = ContactProfile.build(_field(doc, "breakpoints", path), _field(doc, "A", path),
                                    _field(doc, "delta", path), _field(doc, "r_minus", path),
                                    _field(doc, "r_plus", path), _field(doc, "periods", path), doc.get("cutoff"))
    except ProfileError as exc:
        raise InputError(f"{path}: {exc}") from None
    spec = contact_spectrum(prof)
    verdict = spectrum_gap(prof)
    out = {
        "spectrum": [{"lo": fx(e.lo), "hi": fx(e.hi), "source": e.source, "index": e.index,
                      "period": None if e.period is None else fx(e.period)} for e in spec],
        "gap": fx(verdict.gap),
        "pass": verdict.ok,
    }
    if not verdict.ok:
        w = verdict.witness
        out["witness"] = {"lo": fx(w.lo), "hi": fx(w.hi), "source": w.source, "index": w.index}
        return Outcome(out, EXIT_FAIL)
    return Outcome(out)


def cmd_toric(args) -> Outcome:
    path = args.input[0]
    doc = _load(path)
    try:
        points = _field(doc, "points", path)
        return Outcome({"toric_bound": fx(toric_bound(points))})
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"{path}: {exc}") from None


LEDGER_OPS = {
    "lemma3_bound": cap.lemma3_bound,
    "lemma3_bound_from_oscillation": cap.lemma3_bound_from_oscillation,
    "two_lagrangian_bound": cap.two_lagrangian_bound,
    "depth_dominates_hbar": cap.depth_dominates_hbar,
    "spectral_norm": cap.spectral_norm,
    "energy_capacity_chain": cap.energy_capacity_chain,
}


def cmd_ledger(args) -> Outcome:
    path = args.input[0]
    doc = _load(path)
    ledger = cap.CapacityLedger()
    skipped = []
    try:
        for i, e in enumerate(doc.get("entries", [])):
            ledger.add(cap.Certificate.from_document(e))
        for i, step in enumerate(doc.get("steps", [])):
            op = _field(step, "op", f"{path}: steps[{i}]")
            if op not in LEDGER_OPS:
                raise InputError(f"{path}: steps[{i}]: unknown op {op!r}")
            res = ledger.add(LEDGER_OPS[op](**step.get("args", {})))
            if not isinstance(res, cap.Certificate):
                skipped.append({"step": i, "op": op, "reason": res.reason})
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None
    contra = ledger.contradictions()
    out = {
        "entries": [c.to_document() for c in ledger.entries],
        "not_applicable": skipped,
        "consistent": not contra,
        "contradictions": [{"quantity": c.quantity, "lower": c.lower.to_document(), "upper": c.upper.to_document()}
                           for c in contra],
    }
    return Outcome(out, EXIT_OK if not contra else EXIT_FAIL)


def cmd_oracle(args) -> Outcome:
    from . import oracle

    rng = random.Random(args.seed)
    rows = []
    ok = True
    skipped = 0
    for i in range(args.size):
        c = oracle.random_complex(rng)
        basis = svd(c)
        bd = basis.boundary_depth()
        try:
            bb = oracle.brute_boundary_depth(c)
        except oracle.OracleBudgetExceeded:
            bb = None
            skipped += 1
        z = oracle.random_cycle(rng, c)
        si = bs = None
        if z is not None:
            si, bs = basis.distance_to_exact(z), oracle.brute_spectral_invariant(c, z)
        match = (bb is None or bd == bb) and si == bs
        ok &= match
        rows.append({"instance": i, "generators": len(c.generators),
                     "depth_svd": fx(bd), "depth_brute": "skipped" if bb is None else fx(bb),
                     "c_svd": "-" if si is None else fx(si), "c_brute": "-" if bs is None else fx(bs),
                     "match": match})
    report = {"seed": args.seed, "instances": rows, "all_match": ok, "depth_skipped": skipped}
    return Outcome(report, EXIT_OK if ok else EXIT_FAIL)


COMMANDS = {
    "validate": cmd_validate,
    "svd": cmd_svd,
    "spectral": cmd_spectral,
    "depth": cmd_depth,
    "barcode": cmd_barcode,
    "tensor": cmd_tensor,
    "dsum": cmd_dsum,
    "extension": cmd_extension,
    "detect": cmd_detect,
    "spectrum-ta": cmd_spectrum_ta,
    "spectrum-contact": cmd_spectrum_contact,
    "toric": cmd_toric,
    "ledger": cmd_ledger,
    "oracle": cmd_oracle,
}

NO_INPUT = {"oracle"}


# -- rendering --------------------------------------------------------------


def render_json(report) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def _cell(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v, ensure_ascii=False, separators=(",", ":"))
    if v is None:
        return "-"
    return str(v).lower() if isinstance(v, bool) else str(v)


def render_table(report) -> str:
    lines: List[str] = []
    if "generators" in report and "differential" in report:
        report = {"generators": report["generators"], "differential": report["differential"]}
    for key, value in report.items():
        if isinstance(value, list) and value and all(isinstance(r, dict) for r in value):
            cols = list(dict.fromkeys(k for r in value for k in r))
            table = [cols] + [[_cell(r.get(c)) for c in cols] for r in value]
            widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
            lines.append(f"{key}:")
            for row in table:
                lines.append("  " + "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        elif isinstance(value, dict):
            lines.append(f"{key}:")
            for k2, v2 in value.items():
                lines.append(f"  {k2}: {_cell(v2)}")
        else:
            lines.append(f"{key}: {_cell(value)}")
    return "\n".join(lines) + "\n"


# -- entry point ------------------------------------------------------------


def _window(text: str) -> Fraction:
    try:
        w = exponent(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"window must be an exact rational, got {text!r}") from None
    if w <= 0:
        raise argparse.ArgumentTypeError("window must be positive")
    return w


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--window", type=_window, default=None, help="truncation window (exact rational)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    common.add_argument("--size", type=int, default=10, help="number of random instances")
    common.add_argument("--format", choices=("json", "table"), default=None,
                        help="report format (default: table for oracle, json otherwise)")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--chain", default=None, help="chain document (overrides the 'zeta' key)")

    parser = argparse.ArgumentParser(prog="floerlab", description="Filtered Novikov complexes and action spectra.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name not in NO_INPUT:
            p.add_argument("input", nargs="+", help="input document(s)")
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        outcome = COMMANDS[args.command](args)
    except (InputError, WindowError, NotACycle, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    fmt = args.format or ("table" if args.command == "oracle" else "json")
    text = render_json(outcome.report) if fmt == "json" else render_table(outcome.report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return outcome.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
