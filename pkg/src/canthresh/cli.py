"""Command line front end.

    canthresh compute  INPUT --k K      certified threshold in (1/k, 1/(k-1))
    canthresh oracle   INPUT            brute-force minimum over admissible weights
    canthresh window   --k K            candidate and realized values per family
    canthresh report   INPUT --k K      accumulation report along a ladder
    canthresh pair     INPUT            pair operations

INPUT is a JSON document (or - for stdin).  Exit status: 0 success,
1 internal error, 2 parse error, 3 validation failure, 4 inconclusive.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import replace
from fractions import Fraction

from . import pair as pairmod
from .classification import InvalidPresentation, presentation_from_json
from .numerics import SeriesSupport, StructureError, WeightVector, format_rational, parse_rational
from .threshold import Caps, Inconclusive, NotSemiInvariant, brute_force_ct, certified_ct_in_window, representation_qp
from .windows import (
    WINDOW_FAMILIES,
    CapsTooSmall,
    accumulation_report,
    enumerate_window,
    realize,
    window_half_one,
)

EXIT_OK, EXIT_INTERNAL, EXIT_PARSE, EXIT_INVALID, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4


class ParseError(Exception):
    pass


class ValidationFailure(Exception):
    pass


def _load(path):
    if path is None:
        return None
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read input {path}: {exc}") from exc


def _require(doc, *keys):
    if not isinstance(doc, dict):
        raise ParseError("input must be a JSON object")
    for k in keys:
        if k not in doc:
            raise ParseError(f"input is missing {k!r}")


def _presentation_and_f(doc):
    _require(doc, "presentation", "f")
    try:
        p = presentation_from_json(doc["presentation"])
        f = SeriesSupport.from_json(doc["f"], p.dim)
    except (StructureError, TypeError, ValueError, KeyError) as exc:
        raise ParseError(str(exc)) from exc
    bad = p.validate()
    if bad:
        raise InvalidPresentation(bad)
    return p, f


def _k(args, doc):
    k = args.k if args.k is not None else (doc or {}).get("k")
    if k is None:
        raise ParseError("--k is required")
    if not isinstance(k, int) or k < 2:
        raise ValidationFailure(f"k must be an integer >= 2, got {k!r}")
    return k


# -- commands ---------------------------------------------------------------------

def cmd_compute(args, doc, caps):
    p, f = _presentation_and_f(doc)
    k = _k(args, doc)
    out = certified_ct_in_window(p, f, k, caps)
    if out is None:
        return [{"k": k, "status": "absent"}]
    res, cert = out
    q, pp = representation_qp(res.value, k)
    row = {"k": k, "status": "found", "qp": f"{q}/{pp}", "certificate": cert.to_json()}
    row.update(res.to_json())
    return [row]


def cmd_oracle(args, doc, caps):
    p, f = _presentation_and_f(doc)
    res = brute_force_ct(p, f, caps.cap, caps.budget)
    return [res.to_json()]


def cmd_window(args, doc, caps):
    k = _k(args, doc)
    fams = [args.family] if args.family else list(WINDOW_FAMILIES)
    if k == 2 and not args.family:
        recs = window_half_one(caps)
    else:
        recs = []
        for fam in fams:
            for rec in enumerate_window(fam, k, caps):
                recs.append(realize(rec, caps) if rec.qp[1] <= caps.p_max else replace(rec, status="skipped"))
        recs.sort(key=lambda r: (-r.value, WINDOW_FAMILIES.index(r.family), r.params))
    return [r.to_json() for r in recs]


def cmd_report(args, doc, caps):
    _require(doc, "family", "ladder")
    k = _k(args, doc)
    eps = [parse_rational(e) for e in doc.get("epsilons", ["1/10", "1/100", "1/1000", "1/10000"])]
    rep = accumulation_report(doc["family"], k, [int(a) for a in doc["ladder"]], eps,
                              doc.get("tail_from"), caps)
    return [rep.to_json()]


def _coeff_mult(items):
    return [(parse_rational(c["coefficient"]), int(c["multiplicity"])) for c in items]


def _record(data):
    inp = pairmod.pair_input_from_json(data)
    w = WeightVector.from_json(data["weight"]) if "weight" in data else inp.presentation.classified_weight()
    return pairmod.PairRecord(inp, w)


def cmd_pair(args, doc, caps):
    _require(doc, "operation")
    op = doc["operation"]
    if op == "threshold":
        v = pairmod.pair_threshold(parse_rational(doc["a"]), _coeff_mult(doc.get("B", [])), _coeff_mult(doc["S"]))
        row = {"operation": op, "value": format_rational(v)}
        if v <= 0:
            row["warning"] = "non-positive pair threshold"
        return [row]
    if op == "bounds":
        if "I" in doc:
            I_b = pairmod.DccSet.from_json(doc["I"]).floor
            J_b = pairmod.DccSet.from_json(doc["J"]).floor
        else:
            I_b, J_b = parse_rational(doc["I_b"]), parse_rational(doc["J_b"])
        nb, ns = pairmod.component_bounds(I_b, J_b, int(doc["q"]))
        return [{"operation": op, "N(B) <=": format_rational(nb), "N(S) <=": format_rational(ns)}]
    if op == "dichotomy":
        inp = pairmod.pair_input_from_json(doc)
        outcome = pairmod.index_dichotomy(inp.presentation, inp)
        return [dict(operation=op, **outcome.to_json())]
    if op == "compare":
        ri, rj = _record(doc["record_i"]), _record(doc["record_j"])
        w_ij = WeightVector.from_json(doc["w_ij"]) if "w_ij" in doc else None
        verdict = pairmod.monotone_weight_compare(ri, rj, w_ij)
        first = verdict.first_failure
        return [{"operation": op, "holds": verdict.holds, "links": [l.to_json() for l in verdict.links],
                 "first_failure": None if first is None else first.name}]
    if op == "chain":
        hit = pairmod.detect_increasing_chain([parse_rational(v) for v in doc["values"]])
        return [{"operation": op, "increasing_pair": None if hit is None else list(hit)}]
    raise ParseError(f"unknown pair operation {op!r}")


COMMANDS = {"compute": cmd_compute, "oracle": cmd_oracle, "window": cmd_window, "report": cmd_report,
            "pair": cmd_pair}


# -- output -------------------------------------------------------------------------

def _cell(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    if v is None:
        return "-"
    return str(v)


TABLE_COLUMNS = {  # (header, key)
    "compute": [("status", "status"), ("value", "value"), ("q/p", "qp"), ("weight", "weight"),
                ("witness", "witness"), ("certified", "certified"), ("cap", "cap")],
    "oracle": [("value", "value"), ("weight", "weight"), ("witness", "witness"), ("certified", "certified"),
               ("cap", "cap")],
    "window": [("family", "family"), ("parameters", "params"), ("value", "value"), ("q/p", "qp"),
               ("realized?", "realized?"), ("status", "status")],
    "report": [("family", "family"), ("k", "k"), ("limit", "limit"), ("counts", "counts"), ("gap", "gap")],
}


def render_table(command, rows):
    if not rows:
        return "(no rows)\n"
    cols = TABLE_COLUMNS.get(command) or [(c, c) for c in sorted({k for r in rows for k in r})]
    if command == "window":
        rows = [dict(r, **{"realized?": "yes" if r["status"] == "realized" else "no"}) for r in rows]
    cells = [[_cell(r.get(key)) for _, key in cols] for r in rows]
    widths = [max(len(h), *(len(row[i]) for row in cells)) for i, (h, _) in enumerate(cols)]
    lines = ["  ".join(h.ljust(w) for (h, _), w in zip(cols, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in cells:
        lines.append("  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip())
    if command == "report":
        for r in rows:
            for s in r["tail"]:
                lines.append(f"  a={s['a']}  value={s['value']}  "
                             f"lower={s.get('lower', '-')}  upper={s.get('upper', '-')}")
    return "\n".join(lines) + "\n"


def digest(command, doc, k, caps):
    blob = json.dumps({"command": command, "input": doc, "k": k, "caps": caps.__dict__},
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def build_parser():
    ap = argparse.ArgumentParser(prog="canthresh", description="Canonical thresholds of 3-fold singularities.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("input", nargs="?", help="JSON input document, or - for stdin")
    ap.add_argument("--k", type=int, help="window index: the window is (1/k, 1/(k-1))")
    ap.add_argument("--caps", help="resource caps, e.g. a_max=40,degree_max=24,cap=12,budget=4000000,p_max=12")
    ap.add_argument("--family", choices=WINDOW_FAMILIES, help="restrict the window listing to one family")
    ap.add_argument("--format", choices=["table", "machine"], default="table")
    ap.add_argument("--out", help="write output here instead of stdout")
    return ap


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        caps = Caps.parse(args.caps)
        doc = _load(args.input)
        if args.command not in ("window",) and doc is None:
            raise ParseError(f"{args.command} needs an input document")
        rows = COMMANDS[args.command](args, doc, caps)
    except InvalidPresentation as exc:
        print("validation failed:", file=stderr)
        for v in exc.violations:
            print(f"  [{v.anchor}] {v.message}", file=stderr)
        return EXIT_INVALID
    except (ValidationFailure, CapsTooSmall, pairmod.PreconditionError, NotSemiInvariant) as exc:
        print(f"validation: {exc}", file=stderr)
        return EXIT_INVALID
    except (ParseError, StructureError) as exc:
        print(f"parse error: {exc}", file=stderr)
        return EXIT_PARSE
    except Inconclusive as exc:
        print(f"inconclusive: {exc}", file=stderr)
        return EXIT_INCONCLUSIVE
    except (KeyError, TypeError, ValueError) as exc:
        print(f"parse error: {exc!r}", file=stderr)
        return EXIT_PARSE
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=stderr)
        return EXIT_INTERNAL

    k = args.k if args.k is not None or not isinstance(doc, dict) else doc.get("k")
    if args.format == "machine":
        text = json.dumps({"command": args.command, "inputs_digest": digest(args.command, doc, k, caps),
                           "results": rows}, sort_keys=True, indent=2) + "\n"
    else:
        text = render_table(args.command, rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
