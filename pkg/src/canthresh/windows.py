"""Candidate threshold values in the windows (1/k, 1/(k-1)).

Each family contributes the values a/m allowed by its necessary conditions
(parameter bounds, the floor/ceiling comparisons with auxiliary weights, and
the squeeze inequalities).  Values with a below the family's threshold for
the bounds are listed raw: a/m over the finitely many m in the window.

Realization is a separate layer: a candidate counts as realized only when the
oracle, run on an explicit witness (X, f), certifies that exact value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .classification import CA, CAn, CD1, CD2, CDh1, CDh2, FAMILIES, Presentation, Quotient, Smooth
from .numerics import SeriesSupport, format_rational
from .threshold import Caps, Inconclusive, ThresholdResult, brute_force_ct, representation_qp

WINDOW_FAMILIES = ("smooth", "quotient", "cA", "cAn", "cD1", "cD2", "cDh1", "cDh2")
SINGULAR = tuple(f for f in WINDOW_FAMILIES if f != "smooth")


class CapsTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class Witness:
    presentation: Presentation
    f: SeriesSupport
    result: ThresholdResult

    def to_json(self) -> dict:
        return {"presentation": self.presentation.to_json(), "f": self.f.to_json(), "oracle": self.result.to_json()}


@dataclass(frozen=True)
class CandidateRecord:
    family: str
    params: Tuple[Tuple[str, int], ...]
    value: Fraction
    qp: Optional[Tuple[int, int]] = None
    realized: Optional[Witness] = None
    status: str = "candidate"  # candidate | realized | unknown | skipped
    alarm: bool = False

    @property
    def param_dict(self) -> Dict[str, int]:
        return dict(self.params)

    def to_json(self) -> dict:
        d = {"family": self.family, "params": self.param_dict, "value": format_rational(self.value),
             "qp": None if self.qp is None else f"{self.qp[0]}/{self.qp[1]}", "status": self.status}
        if self.realized is not None:
            d["witness"] = self.realized.to_json()
        if self.alarm:
            d["alarm"] = True
        return d


def _record(family, k, value, **params) -> CandidateRecord:
    return CandidateRecord(family, tuple(params.items()), value, representation_qp(value, k))


def _window(k):
    return Fraction(1, k), Fraction(1, k - 1)


def _m_range(a: int, k: int) -> range:
    """Integers m with a/m strictly inside (1/k, 1/(k-1))."""
    return range((k - 1) * a + 1, k * a)


def _raw(family, k, a_values: Iterable[int]) -> List[CandidateRecord]:
    return [_record(family, k, Fraction(a, m), a=a, m=m) for a in a_values for m in _m_range(a, k)]


# -- per family generators ---------------------------------------------------

def _smooth(k, caps):
    if caps.a_max < 2 * k:
        raise CapsTooSmall(f"a_max = {caps.a_max} cannot hold the closed range of 'alpha < 2k' (needs {2 * k})")
    lo, hi = _window(k)
    out = []
    for alpha in range(1, 2 * k):
        betas = range(alpha + 1, caps.a_max + 1)
        for beta in ([1] if alpha == 1 else []) + list(betas):
            if math.gcd(alpha, beta) != 1:
                continue
            a = alpha + beta
            for m in range(beta * k, a * k):
                v = Fraction(a, m)
                if not lo < v < hi:
                    continue
                if beta >= 2 and (a - 1) * m // a < m - m // beta:
                    continue
                if alpha > 1 and v > Fraction(1, alpha) + Fraction(1, beta):
                    continue
                out.append(_record("smooth", k, v, alpha=alpha, beta=beta, m=m))
    return out


def _ca(k, caps):
    if caps.a_max < 2 * k:
        raise CapsTooSmall(f"a_max = {caps.a_max} is below 2k = {2 * k} ('r1 < 2k')")
    lo, hi = _window(k)
    out = []
    for a in range(1, caps.a_max + 1):
        for r1 in range(1, 2 * k):
            # r2 k <= dm < ak forces d <= r1 k
            for d in range(1, r1 * k + 1):
                r2 = a * d - r1
                if r2 < r1:
                    continue
                for m in range(-(-r2 * k // d), a * k):
                    v = Fraction(a, m)
                    if not lo < v < hi:
                        continue
                    if r2 > d and a > 1 and (a - 1) * m // a < m - d * m // r2:
                        continue
                    if r1 > 1 and v > Fraction(1, r1) + Fraction(1, r2):
                        continue
                    out.append(_record("cA", k, v, r1=r1, r2=r2, a=a, d=d, m=m))
    return out


def _can_fills(a, k):
    """Parameter fills (n, b, r1, r2, d) allowed by the cA/n bullets and bounds at this a."""
    for n in range(2, 3 * k + 1):
        for b in range(1, n):
            if math.gcd(b, n) != 1:
                continue
            for d in range(1, (4 * k - 1) // n + 1):
                for r1 in range(1, 2 * k * n):
                    r2 = a * d * n - r1
                    if r2 < r1 or (a - b * r1) % n:
                        continue
                    if math.gcd((a - b * r1) // n, r1) != 1 or math.gcd((a + b * r2) // n, r2) != 1:
                        continue
                    yield n, b, r1, r2, d


def _can_side(a, n, d, r1, k):
    return a > 6 * k * k and (d * n == 1 or a * (d * n - 1) > r1 + d * n * n - n)


def can_squeeze(a, k, n, r1, r2, d, l2, l3):
    lower = Fraction(1, d * n * l2 + l3)
    upper = Fraction(a - n, (r2 - d * n * n) * l2 + (a - n) * l3)
    den = k - Fraction((r1 + d * n * n) * l2 + n * l3, a)
    simplified = (1 - Fraction(n, a)) / den if den > 0 else None  # None: no finite bound
    return lower, upper, simplified


def _can(k, caps):
    threshold = 6 * k * k
    if caps.a_max < threshold:
        raise CapsTooSmall(f"a_max = {caps.a_max} is below 6k^2 = {threshold} ('If a >= 6k^2, then dn < 4k')")
    lo, hi = _window(k)
    out = []
    for a in range(1, caps.a_max + 1):
        fills = list(_can_fills(a, k)) if a >= 5 else []
        sided = [fl for fl in fills if _can_side(a, fl[0], fl[4], fl[2], k)]
        if a < 5 or not sided or len(sided) < len(fills):
            # below the side condition the bounds are not invoked: raw values
            out += _raw("cAn", k, [a])
        for n, b, r1, r2, d in sided:
            for l2 in range(k):
                for l3 in range(k):
                    if (l2, l3) == (0, 0) or d * n * l2 + l3 < k:
                        continue
                    lower, upper, _ = can_squeeze(a, k, n, r1, r2, d, l2, l3)
                    for m in _m_range(a, k):
                        v = Fraction(a, m)
                        if lower <= v <= upper:
                            out.append(_record("cAn", k, v, n=n, b=b, r1=r1, r2=r2, a=a, d=d, l2=l2, l3=l3, m=m))
    return out


def _cd1(k, caps):
    out = _raw("cD1", k, [1, 3])
    r_max = 8 * k * k
    for d in range(3, 2 * k):
        a = 5
        while True:
            if (a * d - 1) % 2 == 0:
                r = (a * d - 1) // 2
                if r > r_max:
                    break
                for m in _m_range(a, k):
                    if m >= 4 * k * r:
                        continue
                    if 2 * m // a < -(-d * m // (r + 1)) or (a - 2) * m // a < -(-(r - d) * m // r):
                        continue
                    out.append(_record("cD1", k, Fraction(a, m), r=r, a=a, d=d, m=m))
            elif (a * d - 1) // 2 > r_max:
                break
            a += 2
    return out


def _cd2(k, caps):
    out = _raw("cD2", k, range(1, 5))
    r_max = 8 * k * k - 2
    for d in range(2, k):
        a = 5
        while a * d - 1 <= r_max:
            r = a * d - 1
            for m in _m_range(a, k):
                if m >= 4 * k * r:
                    continue
                if m // a < -(-d * m // (r + 2)) or (a - 1) * m // a < -(-(r - d) * m // r):
                    continue
                out.append(_record("cD2", k, Fraction(a, m), r=r, a=a, d=d, m=m))
            a += 1
    return out


def cdh1_squeeze(a, k, r, d, l1, l2, l3):
    """Lower bound, exact upper bound and simplified upper bound for cD/2 Case 1.

    The simplified form uses (2d+1) l2; with the literal coefficient 3 it is
    not an upper bound once d > 1.
    """
    s = d * l1 + d * l2 + l3
    lower = Fraction(1, s)
    upper = Fraction(a - 2, (r - 2 * d + 2) * l1 + (r - 2 * d) * l2 + (a - 2) * l3)
    corr = ((2 * d - 1) * l1 + (2 * d + 1) * l2 + 2 * l3)
    den = k - Fraction(corr, a)
    simplified = (1 - Fraction(2, a)) / den if den > 0 else None
    den = k - Fraction((2 * d - 1) * l1 + 3 * l2 + 2 * l3, a)
    literal = (1 - Fraction(2, a)) / den if den > 0 else None
    return lower, upper, simplified, literal


def _cdh1(k, caps):
    out = _raw("cDh1", k, [1, 3])
    for a in range(5, caps.a_max + 1, 2):
        for d in range(1, k + 1):
            r = a * d - 1
            if r % 2 == 0:
                continue
            for l1 in range(k):
                for l2 in range(k - l1):
                    for l3 in range(k - l1 - l2):
                        if (l1, l2, l3) == (0, 0, 0) or d * (l1 + l2) + l3 < k:
                            continue
                        lower, upper, _, _ = cdh1_squeeze(a, k, r, d, l1, l2, l3)
                        for m in _m_range(a, k):
                            v = Fraction(a, m)
                            if m < 4 * k * r and lower <= v <= upper:
                                out.append(_record("cDh1", k, v, r=r, a=a, d=d, l1=l1, l2=l2, l3=l3, m=m))
    return out


def _cdh2(k, caps):
    out = _raw("cDh2", k, range(1, 5))
    r_max = 16 * k * k - 4
    d = 1
    while 2 * d + 1 <= k - 1:
        a = 5
        while a * (2 * d + 1) - 2 <= r_max:
            r = a * (2 * d + 1) - 2
            e = 2 * d + 1
            for m in _m_range(a, k):
                if m >= 4 * k * r:
                    continue
                if m // a < -(-e * m // (r + 4)) or (a - 1) * m // a < -(-(r - e) * m // r):
                    continue
                out.append(_record("cDh2", k, Fraction(a, m), r=r, a=a, d=d, m=m))
            a += 1
        d += 1
    return out


def _quotient(k, caps):
    # weighted discrepancy 1, so every value is 1/m and none lies strictly inside a window
    return []


_GENERATORS = {"smooth": _smooth, "quotient": _quotient, "cA": _ca, "cAn": _can, "cD1": _cd1,
               "cD2": _cd2, "cDh1": _cdh1, "cDh2": _cdh2}


def enumerate_window(family: str, k: int, caps: Caps = Caps()) -> List[CandidateRecord]:
    """Candidate values of ``family`` in (1/k, 1/(k-1)), merged by value, descending."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if family not in _GENERATORS:
        raise ValueError(f"unknown family {family!r}")
    best: Dict[Fraction, CandidateRecord] = {}
    for rec in _GENERATORS[family](k, caps):
        cur = best.get(rec.value)
        if cur is None or rec.params < cur.params:
            best[rec.value] = rec
    return [best[v] for v in sorted(best, reverse=True)]


# -- witnesses -----------------------------------------------------------------

def _unit(dim, i, e=1):
    return tuple(e if j == i else 0 for j in range(dim))


def _singular_f(dim):
    mons = [_unit(dim, i) for i in range(dim)] + [_unit(dim, i, 2) for i in range(dim)]
    return [SeriesSupport.of(m) for m in mons]


def witness_pool(family: str, caps: Caps) -> List[Tuple[Presentation, SeriesSupport]]:
    """Structured (X, f) pairs: Brieskorn-type supports for each family."""
    D = caps.degree_max
    out = []
    if family == "smooth":
        for s in range(2, D + 1):
            for t in range(s, D + 1):
                out.append((Smooth(), SeriesSupport.of((2, 0, 0), (0, s, 0), (0, 0, t))))
    elif family == "quotient":
        q = Quotient(2, 1)
        out += [(q, SeriesSupport.of((0, 0, i))) for i in range(1, D + 1)]
    elif family == "cA":
        for d in range(2, 7):
            for e in range(d, 9):
                p = CA(r1=1, r2=d - 1, a=1, d=d, g=SeriesSupport.of((d, 0), (0, e)))
                out += [(p, f) for f in _singular_f(4)]
    elif family == "cAn":
        for n, b in ((2, 1), (3, 1), (3, 2), (4, 1)):
            for e in range(2, 6):
                g = SeriesSupport.of((n, 0), (0, e))
                p = CAn(n=n, b=b, r1=1, r2=b * n - 1, a=b, d=1, g=g)
                out += [(p, f) for f in _singular_f(4) + [SeriesSupport.of((0, 0, n, 0))]]
    elif family == "cD1":
        for d in (3, 5):
            for e in range(d, d + 2):
                p = CD1(r=(d - 1) // 2, a=1, d=d, p=SeriesSupport.of((0, d, 0), (0, 0, e)))
                out += [(p, f) for f in _singular_f(4)]
    elif family == "cD2":
        for d in (2, 3):
            p = CD2(r=d - 1, a=1, d=d, p=SeriesSupport.of((0, 0, 2 * d)), q=SeriesSupport(2, ()))
            out += [(p, f) for f in _singular_f(5)[:5]]
    elif family == "cDh1":
        for d, e in ((2, 2), (2, 3), (4, 4)):
            p = CDh1(r=d - 1, a=1, d=d, p=SeriesSupport.of((2 * d, 0), (0, e)))
            out += [(p, f) for f in _singular_f(4)]
    elif family == "cDh2":
        for e in (3, 4):
            p = CDh2(r=1, a=1, d=1, p=SeriesSupport.of((0, e)), q=SeriesSupport(2, ()))
            out += [(p, f) for f in _singular_f(5)[:5]]
    else:
        raise ValueError(f"unknown family {family!r}")
    return [(p, f) for p, f in out if p.is_valid()]


@lru_cache(maxsize=None)
def _pool_values(family: str, caps: Caps) -> Tuple[Tuple[Fraction, Witness], ...]:
    vals = []
    for i, (p, f) in enumerate(witness_pool(family, caps)):
        if i >= caps.budget:
            break
        try:
            res = brute_force_ct(p, f, caps.cap, caps.budget)
        except Inconclusive:
            continue
        if res.certified:
            vals.append((res.value, Witness(p, f, res)))
    return tuple(vals)


def pool_exhausted(family: str, caps: Caps) -> bool:
    return len(witness_pool(family, caps)) > caps.budget


def realize(c: CandidateRecord, caps: Caps = Caps()) -> CandidateRecord:
    """Attach an oracle-certified witness with exactly c.value, or mark 'unknown'."""
    for v, wit in _pool_values(c.family, caps):
        if v == c.value:
            return CandidateRecord(c.family, c.params, c.value, c.qp, wit, "realized", c.alarm)
    return CandidateRecord(c.family, c.params, c.value, c.qp, None, "unknown", c.alarm)


def realized_values(family: str, caps: Caps = Caps(), lo=Fraction(0), hi=None) -> Dict[Fraction, Witness]:
    """All certified pool values in (lo, hi), first witness per value."""
    out = {}
    for v, wit in _pool_values(family, caps):
        if v > lo and (hi is None or v < hi):
            out.setdefault(v, wit)
    return out


def in_half_one_set(v: Fraction) -> bool:
    if v == Fraction(4, 5):
        return True
    d = v - Fraction(1, 2)
    return d > 0 and d.numerator == 1 and d.denominator >= 3


def window_half_one(caps: Caps = Caps(), families: Sequence[str] = WINDOW_FAMILIES) -> List[CandidateRecord]:
    """All families at k = 2 with realization; merge order (value desc, family, params)."""
    out = []
    for fam in families:
        for rec in enumerate_window(fam, 2, caps):
            if rec.qp[1] > caps.p_max:
                out.append(CandidateRecord(rec.family, rec.params, rec.value, rec.qp, None, "skipped"))
                continue
            r = realize(rec, caps)
            if r.status == "realized" and not in_half_one_set(r.value):
                r = CandidateRecord(r.family, r.params, r.value, r.qp, r.realized, r.status, True)
            out.append(r)
    out.sort(key=lambda r: (-r.value, WINDOW_FAMILIES.index(r.family), r.params))
    return out


# -- accumulation ----------------------------------------------------------------

@dataclass
class LadderSample:
    a: int
    params: Dict[str, int]
    value: Fraction
    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None
    extra: Dict[str, object] = field(default_factory=dict)

    def to_json(self):
        d = {"a": self.a, "params": self.params, "value": format_rational(self.value)}
        if self.lower is not None:
            d["lower"] = format_rational(self.lower)
            d["upper"] = format_rational(self.upper)
        for key, val in self.extra.items():
            d[key] = format_rational(val) if isinstance(val, Fraction) else val
        return d


@dataclass
class AccumulationReport:
    k: int
    family: str
    limit: Fraction
    epsilons: List[Fraction]
    counts: List[int]
    tail: List[LadderSample]
    gap: Optional[Fraction]

    def to_json(self):
        return {"k": self.k, "family": self.family, "limit": format_rational(self.limit),
                "epsilons": [format_rational(e) for e in self.epsilons], "counts": self.counts,
                "tail": [s.to_json() for s in self.tail],
                "gap": None if self.gap is None else format_rational(self.gap)}


def _can_ladder_point(a, k) -> Optional[LadderSample]:
    for n, b, r1, r2, d in _can_fills(a, k):
        if not _can_side(a, n, d, r1, k):
            continue
        for l2 in range(k):
            for l3 in range(k):
                if (l2, l3) == (0, 0) or d * n * l2 + l3 != k:
                    continue
                m = r2 * l2 + a * l3  # n w(y^l2 z^l3)
                v = Fraction(a, m)
                lower, upper, simplified = can_squeeze(a, k, n, r1, r2, d, l2, l3)
                if Fraction(1, k) < v < Fraction(1, k - 1):
                    return LadderSample(a, dict(n=n, b=b, r1=r1, r2=r2, d=d, l2=l2, l3=l3, m=m), v,
                                        lower, simplified, {"exact_upper": upper})
    return None


def _cdh1_ladder_point(a, k) -> Optional[LadderSample]:
    for d in range(1, k + 1):
        r = a * d - 1
        if a % 2 == 0 or r % 2 == 0:
            continue
        for l1 in range(k):
            for l2 in range(k - l1):
                for l3 in range(k - l1 - l2):
                    if (l1, l2, l3) == (0, 0, 0) or d * (l1 + l2) + l3 != k:
                        continue
                    m = (r + 2) * l1 + r * l2 + a * l3
                    v = Fraction(a, m)
                    if not Fraction(1, k) < v < Fraction(1, k - 1):
                        continue
                    lower, upper, simplified, literal = cdh1_squeeze(a, k, r, d, l1, l2, l3)
                    m1 = 2 * d * (l1 + l2) + 2 * l3  # 2 w1(f) for w1 = 1/2(2d,2d,2,2)
                    return LadderSample(a, dict(r=r, d=d, l1=l1, l2=l2, l3=l3, m=m), v, lower, simplified,
                                        {"exact_upper": upper, "literal_upper": literal,
                                         "literal_upper_holds": literal is None or v <= literal,
                                         "remark_2_over_m1_holds": Fraction(2, m1) >= v})
    return None


def _smooth_ladder_point(beta, k) -> Optional[LadderSample]:
    # w = (1, 1, beta) with m = beta k: value 1/k + 1/(beta k)
    m = beta * k
    v = Fraction(beta + 1, m)
    if beta < 2 or not Fraction(1, k) < v < Fraction(1, k - 1):
        return None
    return LadderSample(beta, dict(alpha=1, beta=beta, m=m), v, Fraction(1, k), Fraction(1, k) + Fraction(1, k))


def _ca_ladder_point(a, k) -> Optional[LadderSample]:
    # r1 = 1, d = 1, r2 = a - 1, m = r2 k: value a/((a-1)k)
    r2, m = a - 1, (a - 1) * k
    if r2 < 1:
        return None
    v = Fraction(a, m)
    if not Fraction(1, k) < v < Fraction(1, k - 1):
        return None
    return LadderSample(a, dict(r1=1, r2=r2, a=a, d=1, m=m), v, Fraction(1, k), Fraction(1, k) + Fraction(1, m))


_LADDERS = {"cAn": _can_ladder_point, "cDh1": _cdh1_ladder_point, "smooth": _smooth_ladder_point,
            "cA": _ca_ladder_point}

DEFAULT_EPSILONS = tuple(Fraction(1, 10 ** e) for e in range(1, 5))


def accumulation_report(family: str, k: int, ladder: Sequence[int],
                        epsilons: Sequence[Fraction] = DEFAULT_EPSILONS, tail_from: Optional[int] = None,
                        caps: Caps = Caps()) -> AccumulationReport:
    """Values along a ladder of the unbounded parameter and their distance to the limit."""
    ladder = list(ladder)
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("ladder must be strictly increasing")
    epsilons = sorted(Fraction(e) for e in epsilons)
    if family == "quotient":
        samples = [LadderSample(i, {"i": i}, Fraction(1, i)) for i in ladder]
        limit = Fraction(0)
        values = [s.value for s in samples]
        counts = [sum(1 for v in values if v > e) for e in epsilons]
    elif family in _LADDERS:
        samples = [s for s in (_LADDERS[family](a, k) for a in ladder) if s is not None]
        limit = Fraction(1, k)
        values = [s.value for s in samples]
        counts = [sum(1 for v in values if limit + e < v < Fraction(1, k - 1)) for e in epsilons]
    else:
        # cD Cases 1-2 and cD/2 Case 2: the window set is finite, no ladder
        cands = enumerate_window(family, k, caps)
        samples, limit = [], Fraction(1, k)
        counts = [sum(1 for c in cands if limit + e < c.value) for e in epsilons]
    start = tail_from if tail_from is not None else (ladder[len(ladder) // 2] if ladder else 0)
    tail = [s for s in samples if s.a >= start]
    gap = max((abs(s.value - limit) for s in tail), default=None)
    return AccumulationReport(k, family, limit, epsilons, counts, tail, gap)
