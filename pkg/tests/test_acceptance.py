"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line."""
import io
import json
import random
import time
from fractions import Fraction

import pytest

from canthresh.classification import CA, CAn, CD1, CD2, CDh1, CDh2, FAMILIES, Quotient, Smooth
from canthresh.cli import run
from canthresh.numerics import (
    SeriesSupport,
    format_rational,
    is_admissible,
    multiplicity_comparison,
    semi_invariant_class,
    weighted_multiplicity,
)
from canthresh.pair import (
    DccSet,
    PairInput,
    Representation,
    component_bounds,
    detect_increasing_chain,
    index_bound,
    index_dichotomy,
    pair_oracle,
    pair_threshold,
    threshold_at,
)
from canthresh.threshold import Caps, Inconclusive, brute_force_ct, certified_ct_in_window, representation_qp
from canthresh.windows import (
    SINGULAR,
    WINDOW_FAMILIES,
    accumulation_report,
    enumerate_window,
    realized_values,
    window_half_one,
)

from grids import grid
from oracles import discrepancy

S = SeriesSupport.of
F = Fraction
VERDICTS = {}


def verdict(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    VERDICTS[n] = line
    print(line)
    return ok


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    status = run(list(argv), stdout=out, stderr=err)
    return status, out.getvalue(), err.getvalue()


# 1 -----------------------------------------------------------------------------

def test_c01_quotient_pure_powers(tmp_path):
    bad = []
    slowest = 0.0
    for i in range(1, 9):
        path = tmp_path / f"z{i}.json"
        path.write_text(json.dumps({"presentation": {"family": "quotient", "n": 2, "b": 1},
                                    "f": [[0, 0, i]]}))
        t = time.perf_counter()
        status, out, err = cli("oracle", str(path), "--caps", "cap=15", "--format", "machine")
        elapsed = time.perf_counter() - t
        slowest = max(slowest, elapsed)
        value = json.loads(out)["results"][0]["value"] if status == 0 else err
        if value != format_rational(F(1, i)) or elapsed >= 1:
            bad.append((i, value, round(elapsed, 3)))
    assert verdict(1, not bad, f"z^i on 1/2(1,1,1), i=1..8: exact 1/i, slowest {slowest:.3f}s; bad={bad}")


# 2 -----------------------------------------------------------------------------

def test_c02_half_one_window_realized_layer():
    t = time.perf_counter()
    status, out, _ = cli("window", "--k", "2", "--format", "machine")
    elapsed = time.perf_counter() - t
    results = json.loads(out)["results"]
    realized = {F(r["value"]) for r in results if r["status"] == "realized"}
    expected = {F(1, 2) + F(1, j) for j in range(3, 13)} | {F(4, 5)}
    alarms = [r for r in results if r.get("alarm")]
    ok = status == 0 and realized == expected and not alarms and elapsed < 300
    assert verdict(2, ok, f"{len(realized)} realized values, {len(results)} candidates, "
                          f"{len(alarms)} alarms, {elapsed:.1f}s")


# 3 -----------------------------------------------------------------------------

def test_c03_extremes_below_one():
    t = time.perf_counter()
    smooth = max(realized_values("smooth", Caps(), F(0), F(1)))
    singular = max(max(realized_values(fam, Caps(), F(0), F(1)), default=F(0)) for fam in SINGULAR)
    elapsed = time.perf_counter() - t
    ok = smooth == F(5, 6) and singular == F(4, 5) and elapsed < 120
    assert verdict(3, ok, f"smooth max {smooth}, singular max {singular}, {elapsed:.1f}s")


# 4 -----------------------------------------------------------------------------

@pytest.mark.xfail(strict=True, reason="reduced numerators above 2k occur from k = 3 on; see notes")
def test_c04_q_bound_on_candidates():
    violations = []
    total = 0
    for k in range(2, 6):
        for fam in ("smooth", "cA"):
            for r in enumerate_window(fam, k, Caps(a_max=6 * k * k + 2)):
                total += 1
                q, _ = representation_qp(r.value, k)
                if q > 2 * k:
                    violations.append((k, fam, r.value, q, r.param_dict))
    first = violations[0] if violations else None
    detail = f"{len(violations)} of {total} candidates have q > 2k"
    if first:
        k, fam, v, q, params = first
        detail += f"; first: k={k} {fam} {params} value {v}, q={q}"
    assert verdict(4, not violations, detail)


# 5 -----------------------------------------------------------------------------

BOUNDS = {
    "cD1": lambda k, d: d["d"] <= 2 * k - 1 and d["r"] <= 8 * k * k,
    "cD2": lambda k, d: d["d"] <= k - 1 and d["r"] <= 8 * k * k - 2,
    "cDh2": lambda k, d: 2 * d["d"] + 1 <= k - 1 and d["r"] <= 16 * k * k - 4,
}


def test_c05_cd_finiteness():
    t = time.perf_counter()
    problems = []
    sizes = {}
    for k in (2, 3):
        for fam, inside in BOUNDS.items():
            runs = [enumerate_window(fam, k, caps) for caps in (Caps(a_max=10), Caps(), Caps(a_max=400))]
            listings = [[(r.value, r.params) for r in recs] for recs in runs]
            if any(x != listings[0] for x in listings[1:]):
                problems.append((fam, k, "depends on caps"))
            for r in runs[1]:
                if "r" in r.param_dict and not inside(k, r.param_dict):
                    problems.append((fam, k, r.param_dict))
            sizes[f"{fam}/k={k}"] = len(runs[1])
    elapsed = time.perf_counter() - t
    ok = not problems and elapsed < 600
    assert verdict(5, ok, f"sizes {sizes}, {elapsed:.1f}s; problems={problems}")


# 6 -----------------------------------------------------------------------------

def test_c06_accumulation_squeeze():
    t = time.perf_counter()
    report = {}
    bad = []
    for fam in ("cAn", "cDh1"):
        rep = accumulation_report(fam, 2, range(1, 10 ** 4 + 1), tail_from=2000)
        full = accumulation_report(fam, 2, range(1, 10 ** 4 + 1), tail_from=1)
        for s in full.tail:
            if not (s.lower <= s.value <= s.upper):
                bad.append((fam, s.a))
        report[fam] = (len(full.tail), float(rep.gap))
        if not rep.gap < F(1, 1000):
            bad.append((fam, "gap", rep.gap))
        if fam == "cDh1":
            literal = sum(1 for s in full.tail if not s.extra["literal_upper_holds"])
            remark = sum(1 for s in full.tail if not s.extra["remark_2_over_m1_holds"])
            report["cDh1 literal-3 bound violated"] = literal
            report["cDh1 2/m1 remark violated"] = remark
    elapsed = time.perf_counter() - t
    ok = not bad and elapsed < 300
    assert verdict(6, ok, f"(points, tail gap) {report}, {elapsed:.1f}s; bad={bad[:5]}")


# 7 -----------------------------------------------------------------------------

def oracle_cases():
    return [
        (Smooth(), S((2, 0, 0), (0, 3, 0), (0, 0, 6)), 2),
        (Smooth(), S((2, 0, 0), (0, 3, 0), (0, 0, 5)), 2),
        (Smooth(), S((3, 0, 0), (0, 3, 0), (0, 0, 4)), 2),
        (Smooth(alpha=2, beta=3), S((2, 0, 0), (0, 4, 0), (0, 0, 5)), 3),
        (Quotient(), S((0, 0, 3)), 2),
        (CA(r1=1, r2=1, a=1, d=2, g=S((2, 0), (0, 3))), S((1, 0, 0, 0)), 2),
        (CA(r1=1, r2=1, a=1, d=2, g=S((2, 0), (0, 3))), S((2, 0, 0, 0)), 3),
        (CA(r1=2, r2=2, a=4, d=1, g=S((1, 0))), S((0, 0, 0, 5)), 2),
        (CAn(n=2, b=1, r1=1, r2=1, a=1, d=1, g=S((2, 0), (0, 3))), S((1, 0, 0, 0)), 2),
        (CAn(n=2, b=1, r1=1, r2=1, a=1, d=1, g=S((2, 0), (0, 3))), S((2, 0, 0, 0)), 4),
        (CAn(n=3, b=1, r1=1, r2=2, a=1, d=1, g=S((3, 0), (0, 2))), S((0, 0, 0, 2)), 2),
        (CD1(r=1, a=1, d=3, p=S((0, 3, 0), (0, 0, 3))), S((0, 0, 0, 1)), 2),
        (CD1(r=1, a=1, d=3, p=S((0, 3, 0), (0, 0, 4))), S((0, 0, 0, 2)), 3),
        (CD2(r=3, a=2, d=2, p=S((0, 0, 8), (0, 4, 0), (3, 0, 0))), S((0, 0, 0, 0, 1), (3, 0, 1, 0, 0)), 3),
        (CD2(r=5, a=3, d=2, p=S((0, 0, 12), (0, 4, 0), (3, 0, 0))),
         S((0, 0, 0, 0, 1), (0, 0, 3, 0, 0), (2, 0, 0, 0, 0)), 3),
        (CD2(r=7, a=4, d=2, p=S((0, 0, 16), (0, 4, 0), (3, 0, 0))), S((0, 0, 0, 0, 1)), 3),
        (CDh1(r=1, a=1, d=2, p=S((4, 0), (0, 2))), S((0, 0, 0, 1)), 2),
        (CDh1(r=5, a=3, d=2, p=S((4, 0), (0, 7))), S((0, 4, 0, 0), (2, 0, 0, 0), (4, 2, 0, 0)), 5),
        (CDh2(r=1, a=1, d=1, p=S((0, 3))), S((0, 0, 0, 1, 0)), 2),
        (CDh2(r=7, a=3, d=1, p=S((0, 9), (6, 0))), S((0, 0, 1, 0, 1), (0, 2, 0, 0, 0)), 5),
        (CDh2(r=7, a=3, d=1, p=S((0, 9), (6, 0))), S((0, 0, 2, 0, 1), (0, 2, 1, 0, 0)), 6),
    ]


def test_c07_oracle_equivalence():
    cases = oracle_cases()
    certified = {}
    mismatches, inconclusive = [], []
    for p, f, k in cases:
        assert p.is_valid(), p
        try:
            out = certified_ct_in_window(p, f, k)
        except Inconclusive:
            inconclusive.append((p.family, f.terms, k))
            continue
        if out is None:
            continue
        res, cert = out
        oracle = brute_force_ct(p, f, cert.oracle_cap)
        if oracle.value != res.value:
            mismatches.append((p.family, f.terms, k, res.value, oracle.value))
        certified.setdefault(p.family, []).append(str(res.value))
    families = {p.family for p, _, _ in cases}
    every_family = {"smooth", "cA", "cAn", "cD1", "cD2", "cDh1", "cDh2"} <= set(certified)
    ok = len(cases) >= 20 and not mismatches and every_family
    assert verdict(7, ok, f"{len(cases)} cases over {len(families)} families; certified {certified}; "
                          f"inconclusive {len(inconclusive)}; mismatches {mismatches}")


# 8 -----------------------------------------------------------------------------

def test_c08_adjunction_consistency():
    sizes, bad = {}, []
    for fam in sorted(FAMILIES):
        ps = grid(fam)
        sizes[fam] = len(ps)
        for p in ps:
            w = p.classified_weight()
            a = p.discrepancy_parameter()
            eqs = [e.terms for e in p.equations()]
            if not is_admissible(w, p.quotient) or p.weighted_discrepancy(w) != a \
                    or discrepancy(w.numerators, w.denominator, eqs) != a:
                bad.append(p)
    ok = min(sizes.values()) >= 200 and not bad
    assert verdict(8, ok, f"grid sizes {sizes}; mismatches {len(bad)}")


# 9 -----------------------------------------------------------------------------

def _domination_formula(p, name):
    r, d = p.r, p.d
    if p.family == "cD1":
        return {"w1": F(d, r + 1), "w2": F(r - d, r)}[name]
    if p.family == "cD2":
        return {"w1": F(d, r + 2), "w_{a-1}": F(r - d, r)}[name]
    return {"w1": F(2 * d + 1, r + 4), "w_{a-1}": F(r - 2 * d - 1, r)}[name]


def _conforming_core(rng, fam):
    if fam == "cD1":
        t = rng.randint(1, 4)
        return (t, t, rng.randint(1, 4), 0)
    j = rng.randint(1, 4)
    return (rng.randint(0, 4), j, rng.randint(1, 4), j, 0)


_DAGGER = {}


@pytest.mark.parametrize("case,fam", [(1, "cD1"), (2, "cD2"), (3, "cDh2")])
def test_c09_dagger_patterns(case, fam):
    rng = random.Random(case)
    ps = [p for p in grid(fam) if p.discrepancy_parameter() >= 5]
    conforming, seen, ceilings, floors, bad = 0, 0, 0, 0, []
    while conforming < 1000:
        p = rng.choice(ps)
        terms = {_conforming_core(rng, fam)}
        for _ in range(rng.randint(0, 3)):
            terms.add(tuple(rng.randint(0, 6) if rng.random() < 0.4 else 0 for _ in range(p.dim)))
        terms.discard((0,) * p.dim)
        f = SeriesSupport(p.dim, tuple(sorted(terms)))
        if semi_invariant_class(f, p.quotient) is None:
            continue
        seen += 1
        w, a = p.classified_weight(), p.discrepancy_parameter()
        m = weighted_multiplicity(f, w).scaled
        comps = p.comparison_weights().weights
        mults = [weighted_multiplicity(f, c.weight).scaled for c in comps]
        for c, mi in zip(comps, mults):
            if c.domination is None:
                continue
            ceilings += 1
            if c.domination != _domination_formula(p, c.name) \
                    or not multiplicity_comparison(f, w, c.weight, c.domination).holds:
                bad.append(("ceiling", p, f, c.name))
        if all(F(a, m) <= F(c.discrepancy, mi) for c, mi in zip(comps, mults)):
            conforming += 1
            for c, mi in zip(comps, mults):
                floors += 1
                if c.discrepancy * m // a < mi:
                    bad.append(("floor", p, f, c.name))
    _DAGGER[case] = (fam, conforming, seen, floors, ceilings, len(bad))
    # criterion 9 is a single line covering all three cases
    detail = "; ".join(f"dagger {c} ({v[0]}): {v[1]} conforming of {v[2]}, {v[3]} floor and "
                       f"{v[4]} ceiling checks, {v[5]} violations" for c, v in sorted(_DAGGER.items()))
    assert verdict(9, all(v[5] == 0 for v in _DAGGER.values()), detail)


# 10 ----------------------------------------------------------------------------

def large_can(n):
    return CAn(n=n, b=1, r1=1, r2=n - 1, a=1, d=1, g=S((n, 0), (0, 3)))


def representation_inputs(n):
    p = large_can(n)
    z = lambda e: (0, 0, e, 0)
    # x has residue 1, y residue -1 and z residue 1 under 1/n(1,-1,1,0)
    yield PairInput(p, (), ((F(1), S(z(2), (n + 2, 0, 0, 0))),), 3)
    yield PairInput(p, (), ((F(1), S(z(1))),), 3)
    yield PairInput(p, ((F(1, 2), S(z(1))),), ((F(1), S(z(1))),), 5)
    yield PairInput(p, ((F(1, 3), S(z(2))),), ((F(1, 2), S(z(1))),), 5)
    yield PairInput(p, (), ((F(1, 2), S(z(3))), (F(1, 2), S(z(1), (0, n - 1, 0, 0)))), 4)


def test_c10_pair_suite():
    t = time.perf_counter()
    rng = random.Random(10)
    problems = []

    # B = 0 reduces to the threshold
    # index at most 5 keeps admissible weights inside the box of cap 5
    small_quotients = [q for q in grid("quotient") if q.n <= 5]
    pool = grid("smooth")[:45] + grid("cA")[:100 - 45 - len(small_quotients)] + small_quotients
    for p in pool:
        while True:
            terms = {tuple(rng.randint(0, 4) if rng.random() < 0.5 else 0 for _ in range(p.dim))
                     for _ in range(rng.randint(1, 3))}
            terms.discard((0,) * p.dim)
            f = SeriesSupport(p.dim, tuple(sorted(terms))) if terms else None
            if f is not None and semi_invariant_class(f, p.quotient) is not None:
                break
        ct = brute_force_ct(p, f, 5, certify=False)
        inp = PairInput(p, (), ((F(1), f),), 1)
        value, w = pair_oracle(inp, 5)
        m = weighted_multiplicity(f, ct.realizing_weight).scaled
        direct = pair_threshold(p.weighted_discrepancy(ct.realizing_weight), [], [(1, m)])
        if not (value == ct.value == direct == threshold_at(inp, w)):
            problems.append(("B=0", p, f))

    # component bounds
    for _ in range(100):
        I = DccSet.of([F(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(rng.randint(1, 4))])
        J = DccSet.of([F(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(rng.randint(1, 4))])
        q = rng.randint(1, 10)
        if component_bounds(I.floor, J.floor, q) != (2 / I.floor, 2 * q / J.floor):
            problems.append(("bounds", I, J, q))

    # representation branch on large index
    reps = bounded = 0
    for n in range(16, 81):
        for inp in representation_inputs(n):
            out = index_dichotomy(inp.presentation, inp)
            if n <= index_bound(inp):
                bounded += 1
                if isinstance(out, Representation):
                    problems.append(("branch", n, out))
                continue
            if not isinstance(out, Representation):
                problems.append(("branch", n, out))
                continue
            reps += 1
            b_sum = sum((b * e for (b, _), e in zip(inp.B, out.t)), F(0))
            s_sum = sum((s * e for (s, _), e in zip(inp.S, out.l)), F(0))
            w = inp.presentation.classified_weight()
            if not ((1 - b_sum) / s_sum == out.value == threshold_at(inp, w) == threshold_at(inp, out.w3)):
                problems.append(("sandwich", n, out))

    # no increasing pair in any window listing
    listings = 0
    for k in (2, 3, 4):
        for fam in WINDOW_FAMILIES:
            listings += 1
            if detect_increasing_chain([r.value for r in enumerate_window(fam, k, Caps(a_max=6 * k * k + 2))]):
                problems.append(("chain", fam, k))
    listings += 1
    if detect_increasing_chain([r.value for r in window_half_one()]):
        problems.append(("chain", "half-one"))

    elapsed = time.perf_counter() - t
    ok = not problems and elapsed < 120
    assert verdict(10, ok, f"{len(pool)} B=0 instances, 100 bound checks, {reps} representation and "
                           f"{bounded} bounded-index instances, {listings} window listings, {elapsed:.1f}s; "
                           f"problems={problems[:3]}")
