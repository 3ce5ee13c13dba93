"""Thresholds of pairs ct(X, B; S) and the ACC bookkeeping around them.

B = sum b_k B_k and S = sum s_k S_k with B_k = (g_k = 0), S_k = (f_k = 0).
For a weight w with weighted discrepancy a,

    ct_w = (a - sum b_k p_k) / (sum s_k m_k),   p_k = n w(g_k),  m_k = n w(f_k).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .classification import CAn, InvalidPresentation, Presentation
from .numerics import (
    SeriesSupport,
    StructureError,
    WeightVector,
    format_rational,
    is_admissible,
    parse_rational,
    semi_invariant_class,
    weighted_multiplicity,
)
from .threshold import Inconclusive, _admissible_box


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class DccSet:
    """Finite stand-in for a DCC set; only its floor enters the bounds."""

    elements: Tuple[Fraction, ...]

    def __post_init__(self):
        els = tuple(Fraction(e) for e in self.elements)
        if not els:
            raise ValueError("a DCC set needs at least one positive element")
        if any(e <= 0 for e in els):
            raise ValueError("DCC set elements must be positive")
        if any(b <= a for a, b in zip(els, els[1:])):
            raise ValueError("DCC set elements must be strictly increasing")
        object.__setattr__(self, "elements", els)

    @classmethod
    def of(cls, values) -> "DccSet":
        return cls(tuple(sorted({Fraction(v) for v in values})))

    @property
    def floor(self) -> Fraction:
        return self.elements[0]

    def __contains__(self, x) -> bool:
        return Fraction(x) in self.elements

    def to_json(self):
        return {"elements": [format_rational(e) for e in self.elements], "floor": format_rational(self.floor)}

    @classmethod
    def from_json(cls, data) -> "DccSet":
        s = cls(tuple(parse_rational(e) for e in data["elements"]))
        if "floor" in data and parse_rational(data["floor"]) != s.floor:
            raise ValueError("DCC floor does not match the minimal element")
        return s


Component = Tuple[Fraction, SeriesSupport]


@dataclass(frozen=True)
class PairInput:
    presentation: Presentation
    B: Tuple[Component, ...]
    S: Tuple[Component, ...]
    q: int = 2

    def __post_init__(self):
        object.__setattr__(self, "B", tuple((Fraction(c), g) for c, g in self.B))
        object.__setattr__(self, "S", tuple((Fraction(c), f) for c, f in self.S))

    def check(self) -> None:
        """Raise PreconditionError unless coefficients, supports and centers are as required."""
        if not self.S:
            raise PreconditionError("S has no components")
        if self.q < 1:
            raise PreconditionError("q must be a positive integer")
        quot = self.presentation.quotient
        for tag, comps in (("B", self.B), ("S", self.S)):
            for i, (c, h) in enumerate(comps):
                if c <= 0:
                    raise PreconditionError(f"{tag}[{i}] has non-positive coefficient {c}")
                if h.dim != self.presentation.dim:
                    raise PreconditionError(f"{tag}[{i}] has dimension {h.dim}")
                if not h.terms:
                    raise PreconditionError(f"{tag}[{i}] has empty support")
                if h.has_constant_term():
                    raise PreconditionError(f"{tag}[{i}] does not contain the center (constant term present)")
                if semi_invariant_class(h, quot) is None:
                    raise PreconditionError(f"{tag}[{i}] is not semi-invariant over {quot}")


def pair_threshold(a, B: Sequence[Tuple[Fraction, int]], S: Sequence[Tuple[Fraction, int]]) -> Fraction:
    """(a - sum b_k p_k) / (sum s_k m_k); B and S are (coefficient, multiplicity) pairs.

    Non-positive results are returned as they are.
    """
    if not S:
        raise ValueError("S must have at least one component")
    num = Fraction(a) - sum((Fraction(b) * p for b, p in B), Fraction(0))
    den = sum((Fraction(s) * m for s, m in S), Fraction(0))
    if den <= 0:
        raise ValueError("sum of s_k m_k must be positive")
    return num / den


def component_bounds(I_b, J_b, q: int) -> Tuple[Fraction, Fraction]:
    """Upper bounds (2/I_b, 2q/J_b) on the numbers of components of B and S."""
    I_b, J_b = Fraction(I_b), Fraction(J_b)
    if I_b <= 0 or J_b <= 0:
        raise ValueError("floors must be positive")
    if q < 1:
        raise ValueError("q must be a positive integer")
    return 2 / I_b, 2 * q / J_b


def multiplicities(inp: PairInput, w: WeightVector) -> Tuple[List[int], List[int]]:
    """Weighted multiplicities n w(g_k) and n w(f_k)."""
    ps = [weighted_multiplicity(g, w).scaled for _, g in inp.B]
    ms = [weighted_multiplicity(f, w).scaled for _, f in inp.S]
    return ps, ms


def threshold_at(inp: PairInput, w: WeightVector) -> Fraction:
    a = inp.presentation.weighted_discrepancy(w)
    ps, ms = multiplicities(inp, w)
    return pair_threshold(a, [(b, p) for (b, _), p in zip(inp.B, ps)], [(s, m) for (s, _), m in zip(inp.S, ms)])


def pair_oracle(inp: PairInput, cap: int) -> Tuple[Fraction, WeightVector]:
    """Minimum of threshold_at over admissible weights with numerators <= cap (an upper bound)."""
    p = inp.presentation
    coeffs = [c for c, _ in inp.B] + [c for c, _ in inp.S]
    L = 1
    for c in coeffs:
        L = L * c.denominator // math.gcd(L, c.denominator)
    eqs = [np.array(e.terms, dtype=np.int64) for e in p.equations()]
    gs = [(int(b * L), np.array(g.terms, dtype=np.int64)) for b, g in inp.B]
    fs = [(int(s * L), np.array(f.terms, dtype=np.int64)) for s, f in inp.S]
    best = None
    for lead in range(1, cap + 1):
        K = _admissible_box(p.quotient, cap, lead)
        if not len(K):
            continue
        a = K.sum(axis=1) - p.index
        for E in eqs:
            a = a - (K @ E.T).min(axis=1)
        num = a * L
        for c, G in gs:
            num = num - c * (K @ G.T).min(axis=1)
        den = sum(c * (K @ F.T).min(axis=1) for c, F in fs)
        i = int(np.argmin(num / den))
        cand = (Fraction(int(num[i]), int(den[i])), int(K[i].sum()), tuple(int(x) for x in K[i]))
        tie = np.nonzero(num * cand[0].denominator == den * cand[0].numerator)[0]
        for j in tie:
            c2 = (cand[0], int(K[j].sum()), tuple(int(x) for x in K[j]))
            cand = min(cand, c2)
        if best is None or cand < best:
            best = cand
    if best is None:
        raise RuntimeError("no admissible weight in the search box")
    return best[0], WeightVector(best[2], p.index)


# -- the cA/n index dichotomy ---------------------------------------------------

@dataclass(frozen=True)
class BoundedIndex:
    n: int
    bound: Fraction

    def to_json(self):
        return {"kind": "bounded_index", "n": self.n, "bound": format_rational(self.bound)}


@dataclass(frozen=True)
class Representation:
    t: Tuple[int, ...]
    l: Tuple[int, ...]
    w3: WeightVector
    value: Fraction

    def to_json(self):
        return {"kind": "representation", "t": list(self.t), "l": list(self.l), "w3": str(self.w3),
                "value": format_rational(self.value)}


DichotomyOutcome = Union[BoundedIndex, Representation]


def index_bound(inp: PairInput) -> Fraction:
    terms = [1 / b for b, _ in inp.B] + [Fraction(inp.q) / s for s, _ in inp.S]
    return 3 * max(terms)


def w3_fill(p: CAn) -> Optional[WeightVector]:
    """(1/n)(r1', r2', 3, n) with r1'+r2' = 3dn, 3 = b r1' (mod n), min(r1', r2') > n.

    Among the valid fills the most balanced one is returned.
    """
    n, b, d = p.n, p.b, p.d
    total = 3 * d * n
    best = None
    for r1 in range(n + 1, total - n):
        r2 = total - r1
        if (3 - b * r1) % n:
            continue
        key = (abs(r1 - r2), r1)
        if best is None or key < best[0]:
            best = (key, r1, r2)
    if best is None:
        return None
    return WeightVector((best[1], best[2], 3, n), n)


def _pure_z_witness(h: SeriesSupport, w3: WeightVector) -> Optional[int]:
    mult = weighted_multiplicity(h, w3)
    for t in h.terms:
        if t[2] > 0 and t[0] == t[1] == t[3] == 0 and 3 * t[2] == mult.scaled:
            return t[2]
    return None


def index_dichotomy(p: CAn, inp: PairInput) -> DichotomyOutcome:
    if p.family != "cAn":
        raise PreconditionError("index dichotomy applies to cA/n centers")
    bad = p.validate()
    if bad:
        raise InvalidPresentation(bad)
    inp.check()
    w = p.classified_weight()
    ct = threshold_at(inp, w)
    if ct <= Fraction(1, inp.q):
        raise PreconditionError(f"pair threshold {format_rational(ct)} is not > 1/q = 1/{inp.q}")
    bound = index_bound(inp)
    if p.n <= bound:
        return BoundedIndex(p.n, bound)
    w3 = w3_fill(p)
    if w3 is None:
        raise Inconclusive(f"no fill r1'+r2' = {3 * p.d * p.n} with min > n = {p.n}")
    t = []
    for i, (_, g) in enumerate(inp.B):
        e = _pure_z_witness(g, w3)
        if e is None:
            raise Inconclusive(f"B[{i}]: w3-multiplicity not attained by a pure z-power")
        t.append(e)
    l = []
    for i, (_, f) in enumerate(inp.S):
        e = _pure_z_witness(f, w3)
        if e is None:
            raise Inconclusive(f"S[{i}]: w3-multiplicity not attained by a pure z-power")
        l.append(e)
    value = pair_threshold(1, list(zip([b for b, _ in inp.B], t)), list(zip([s for s, _ in inp.S], l)))
    via_w3 = threshold_at(inp, w3)
    if via_w3 != value:
        raise RuntimeError(f"w3 value {via_w3} differs from (1 - sum b t)/(sum s l) = {value}")
    if value != ct:
        raise PreconditionError(
            f"the classified weight gives {format_rational(ct)} but w3 gives {format_rational(value)}; "
            "the classified weight does not compute the pair threshold")
    return Representation(tuple(t), tuple(l), w3, value)


# -- the weight comparison chain ----------------------------------------------------

@dataclass(frozen=True)
class PairRecord:
    """A pair (X, B; S) with the weight w computing its threshold."""

    inp: PairInput
    weight: WeightVector

    @property
    def n(self) -> int:
        return self.weight.denominator

    @property
    def a(self) -> int:
        return self.inp.presentation.weighted_discrepancy(self.weight)

    def threshold(self) -> Fraction:
        return threshold_at(self.inp, self.weight)


@dataclass(frozen=True)
class Link:
    name: str
    lhs: object
    rhs: object
    holds: bool

    def to_json(self):
        f = lambda v: format_rational(v) if isinstance(v, (Fraction, int)) else str(v)
        return {"link": self.name, "lhs": f(self.lhs), "rhs": f(self.rhs), "holds": self.holds}


@dataclass
class ChainVerdict:
    links: List[Link] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(l.holds for l in self.links)

    @property
    def first_failure(self) -> Optional[Link]:
        return next((l for l in self.links if not l.holds), None)

    def add(self, name, lhs, rhs, holds):
        self.links.append(Link(name, lhs, rhs, bool(holds)))


def newton_dominated(small: SeriesSupport, big: SeriesSupport) -> bool:
    """Every monomial of ``small`` lies in some monomial of ``big`` plus the positive orthant."""
    return all(any(all(x >= y for x, y in zip(t, u)) for u in big.terms) for t in small.terms)


def monotone_weight_compare(ri: PairRecord, rj: PairRecord, w_ij: Optional[WeightVector] = None) -> ChainVerdict:
    """Check the inequality chain from ct_i down to ct_j link by link.

    ``w_ij`` is the weight on X_j compared with w_i; by default w_i itself.
    """
    Xi, Xj = ri.inp, rj.inp
    if len(Xi.B) != len(Xj.B) or len(Xi.S) != len(Xj.S):
        raise PreconditionError("records must have the same numbers of components")
    if ri.n != rj.n:
        raise PreconditionError(f"centers have different indices {ri.n} and {rj.n}")
    w_ij = ri.weight if w_ij is None else w_ij
    if not is_admissible(w_ij, Xj.presentation.quotient):
        raise PreconditionError(f"{w_ij} is not admissible on X_j")
    for tag, ci, cj in (("b", Xi.B, Xj.B), ("s", Xi.S, Xj.S)):
        for k, ((x, _), (y, _)) in enumerate(zip(ci, cj)):
            if y < x:
                raise PreconditionError(f"coefficient {tag}_{k} decreases from {x} to {y}")
    for tag, ci, cj in (("g", Xi.B, Xj.B), ("f", Xi.S, Xj.S)):
        for k, ((_, hi), (_, hj)) in enumerate(zip(ci, cj)):
            if not newton_dominated(hj, hi):
                raise PreconditionError(f"Newton polytope of {tag}_{k} is not non-increasing")

    v = ChainVerdict()
    wi = ri.weight
    for tag, ci, cj in (("p", Xi.B, Xj.B), ("m", Xi.S, Xj.S)):
        for k, ((_, hi), (_, hj)) in enumerate(zip(ci, cj)):
            own = weighted_multiplicity(hi, wi).scaled
            moved = weighted_multiplicity(hj, wi).scaled
            lifted = weighted_multiplicity(hj, w_ij).scaled
            v.add(f"(1) {tag}_{k}: n_i w_i on X_i <= n_i w_i on X_j", own, moved, own <= moved)
            v.add(f"(2) {tag}_{k}: n_i w_i <= n_j w^i_j", moved, lifted, moved <= lifted)
    v.add("(2) n_i w_i <= n_j w^i_j componentwise", str(wi), str(w_ij), w_ij.dominates(wi))
    a_ij = Xj.presentation.weighted_discrepancy(w_ij)
    v.add("(3) discrepancy of w^i_j equals a_i", a_ij, ri.a, a_ij == ri.a)

    ct_i = ri.threshold()
    ps, ms = multiplicities(Xj, w_ij)
    mid_i = pair_threshold(ri.a, [(b, p) for (b, _), p in zip(Xi.B, ps)],
                           [(s, m) for (s, _), m in zip(Xi.S, ms)])
    mid_j = pair_threshold(a_ij, [(b, p) for (b, _), p in zip(Xj.B, ps)],
                           [(s, m) for (s, _), m in zip(Xj.S, ms)])
    ct_j = rj.threshold()
    v.add("ct_i >= value of w^i_j with coefficients of i", ct_i, mid_i, ct_i >= mid_i)
    v.add("coefficients of i >= coefficients of j", mid_i, mid_j, mid_i >= mid_j or mid_j <= 0)
    v.add("value of w^i_j on X_j >= ct_j", mid_j, ct_j, mid_j >= ct_j)
    v.add("ct_i >= ct_j", ct_i, ct_j, ct_i >= ct_j)
    return v


def detect_increasing_chain(values: Sequence) -> Optional[Tuple[int, int]]:
    vals = [Fraction(x) for x in values]
    for i in range(len(vals) - 1):
        if vals[i + 1] > vals[i]:
            return i, i + 1
    return None


def pair_input_from_json(data) -> PairInput:
    from .classification import presentation_from_json

    p = presentation_from_json(data["presentation"])

    def comps(key):
        out = []
        for c in data.get(key, []):
            out.append((parse_rational(c["coefficient"]), SeriesSupport.from_json(c["support"], p.dim)))
        return tuple(out)

    return PairInput(p, comps("B"), comps("S"), int(data.get("q", 2)))
