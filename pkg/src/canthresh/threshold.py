"""Canonical thresholds from weighted blow-ups.

Every admissible weight w gives the upper bound a(w)/m(w) for ct(X; S), with
a(w) the weighted discrepancy and m(w) = n w(f).  Two routes compute the
minimum: a generic scan over all admissible weights in a box (the oracle) and
a fast path restricted to the classified weights that the window bounds allow.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

from .classification import (
    CA,
    CAn,
    CD1,
    CD2,
    CDh1,
    CDh2,
    InvalidPresentation,
    Presentation,
    Quotient,
    Smooth,
)
from .numerics import (
    Monomial,
    SeriesSupport,
    StructureError,
    WeightVector,
    conflicting_residues,
    format_rational,
    is_admissible,
    semi_invariant_class,
    weighted_multiplicity,
)


class NotSemiInvariant(StructureError):
    pass


class Inconclusive(RuntimeError):
    """The search ran out of budget without deciding the question."""


@dataclass(frozen=True)
class Caps:
    cap: int = 12            # oracle numerator cap
    a_max: int = 40          # ladder cap for families without a finiteness bound
    degree_max: int = 24     # witness search degree bound
    budget: int = 4_000_000  # largest admissible-weight box the oracle will scan
    p_max: int = 12          # window listings realize values 1/k + q/p with p <= p_max

    @classmethod
    def parse(cls, text: Optional[str]) -> "Caps":
        if not text:
            return cls()
        kw = {}
        for item in text.split(","):
            if not item.strip():
                continue
            key, _, val = item.partition("=")
            key = key.strip()
            if key not in cls.__dataclass_fields__:
                raise StructureError(f"unknown cap {key!r}")
            v = int(val)
            if v < 1:
                raise StructureError(f"cap {key} must be positive")
            kw[key] = v
        return cls(**kw)


@dataclass(frozen=True)
class ThresholdResult:
    value: Fraction
    realizing_weight: WeightVector
    witness_monomial: Monomial
    certified: bool
    search_cap: int
    note: str = ""

    def to_json(self) -> dict:
        return {
            "value": format_rational(self.value),
            "weight": str(self.realizing_weight),
            "witness": list(self.witness_monomial),
            "certified": self.certified,
            "cap": self.search_cap,
        }


@dataclass(frozen=True)
class Bound:
    name: str
    value: str


@dataclass(frozen=True)
class WindowCertificate:
    k: int
    bounds_used: Tuple[Bound, ...]
    oracle_cap: int
    closure: str  # "classified" or "oracle"

    def to_json(self) -> dict:
        return {"k": self.k, "bounds_used": [{"bound": b.name, "instance": b.value} for b in self.bounds_used],
                "oracle_cap": self.oracle_cap, "closure": self.closure}


# ---------------------------------------------------------------------------
# single weights

def _require_semi_invariant(p: Presentation, f: SeriesSupport) -> None:
    if f.dim != p.dim:
        raise StructureError(f"f has dimension {f.dim}, ambient space has {p.dim}")
    if not f.terms:
        raise StructureError("empty support: f = 0 defines no divisor")
    if f.has_constant_term():
        raise StructureError("f does not vanish at the origin")
    if semi_invariant_class(f, p.quotient) is None:
        (r1, m1), (r2, m2) = conflicting_residues(f, p.quotient)[:2]
        raise NotSemiInvariant(f"f is not semi-invariant: {m1} has residue {r1}, {m2} has residue {r2}")


def threshold_upper_bound(p: Presentation, f: SeriesSupport, w: WeightVector) -> Fraction:
    _require_semi_invariant(p, f)
    if not is_admissible(w, p.quotient):
        raise StructureError(f"{w} is not admissible over {p.quotient}")
    mult = weighted_multiplicity(f, w)
    if not mult.certified:
        raise StructureError(f"multiplicity of f under {w} is not certified by complete_up_to")
    return Fraction(p.weighted_discrepancy(w), mult.scaled)


def representation_qp(ct, k: int) -> Tuple[int, int]:
    ct = Fraction(ct)
    if not (Fraction(1, k) < ct < (Fraction(1, k - 1) if k > 1 else math.inf)):
        raise ValueError(f"{ct} is not in (1/{k}, 1/{k - 1})")
    diff = ct - Fraction(1, k)
    return diff.numerator, diff.denominator


# ---------------------------------------------------------------------------
# oracle

def _matrix(s: SeriesSupport) -> np.ndarray:
    return np.array(s.terms, dtype=np.int64).reshape(len(s.terms), s.dim)


def _admissible_box(q, cap: int, lead: int) -> np.ndarray:
    r = q.dim
    rest = np.stack(np.meshgrid(*[np.arange(1, cap + 1)] * (r - 1), indexing="ij"), -1).reshape(-1, r - 1) \
        if r > 1 else np.zeros((1, 0), dtype=np.int64)
    K = np.concatenate([np.full((rest.shape[0], 1), lead, dtype=np.int64), rest.astype(np.int64)], axis=1)
    if q.n == 1:
        return K
    b = np.array(q.b, dtype=np.int64)
    ok = np.zeros(K.shape[0], dtype=bool)
    for s in range(q.n):
        ok |= np.all((K - s * b) % q.n == 0, axis=1)
    return K[ok]


def _scan(p: Presentation, f: SeriesSupport, cap: int):
    """Yield (numerators, a, m) arrays chunk by chunk over the first coordinate."""
    eqs = [_matrix(phi) for phi in p.equations()]
    F = _matrix(f)
    n = p.index
    for lead in range(1, cap + 1):
        K = _admissible_box(p.quotient, cap, lead)
        if K.shape[0] == 0:
            continue
        a = K.sum(axis=1) - n
        for E in eqs:
            a = a - (K @ E.T).min(axis=1)
        m = (K @ F.T).min(axis=1)
        yield K, a, m


def _box_size(dim: int, cap: int) -> int:
    return cap ** dim


def brute_force_ct(p: Presentation, f: SeriesSupport, cap: int, budget: int = Caps.budget,
                   certify: bool = True) -> ThresholdResult:
    """Minimise a(w)/m(w) over admissible weights with all numerators <= cap."""
    _require_semi_invariant(p, f)
    if cap < 1:
        raise ValueError("cap must be positive")
    if _box_size(p.dim, cap) > budget:
        raise Inconclusive(f"oracle box {cap}^{p.dim} exceeds budget {budget}")
    best = None  # (num, den, sum, tuple)
    for K, a, m in _scan(p, f, cap):
        keep = (m > 0) & (a > 0)
        if not keep.any():
            continue
        K, a, m = K[keep], a[keep], m[keep]
        i = int(np.argmin(a / m))
        num, den = int(a[i]), int(m[i])
        if best is not None and num * best[1] > best[0] * den:
            continue
        tie = np.nonzero(a * den == m * num)[0]
        sums = K[tie].sum(axis=1)
        cands = sorted((int(sums[j]), tuple(int(x) for x in K[tie[j]])) for j in range(len(tie)))
        s, ks = cands[0]
        if best is None or num * best[1] < best[0] * den or (s, ks) < (best[2], best[3]):
            best = (num, den, s, ks)
    if best is None:
        raise RuntimeError("no admissible weight in the search box")
    w = WeightVector(best[3], p.index)
    mult = weighted_multiplicity(f, w)
    value = Fraction(best[0], best[1])
    certified, note = False, "not certified"
    if certify:
        if not mult.certified:
            note = "witness multiplicity exceeds complete_up_to"
        else:
            certified = tail_certificate(p, f, value, cap)
            note = "tail closed by linear certificate" if certified else "tail not closed"
    return ThresholdResult(value, w, mult.witness, certified, cap, note)


def weights_beating(p: Presentation, f: SeriesSupport, v: Fraction, cap: int, strict: bool = True):
    """Admissible weights in the box with a/m < v (or <= v when not strict)."""
    out = []
    for K, a, m in _scan(p, f, cap):
        keep = (m > 0) & (a > 0)  # same weights the oracle ranges over
        lhs, rhs = a * v.denominator, m * v.numerator
        hit = keep & ((lhs < rhs) if strict else (lhs <= rhs))
        out.extend(tuple(int(x) for x in row) for row in K[hit])
    return out


# ---------------------------------------------------------------------------
# tail certificate
#
# a(k) - v m(k) = sum k - n - sum_i min_{l in phi_i} <l,k> - v min_{l in f} <l,k>
# is a maximum of linear forms, so on the region {k_j >= cap+1, k >= 1} it is
# bounded below by any convex combination of those forms with non-negative
# coefficients.  The combination is found by an LP and then checked exactly.

def _rationalize(xs, denom_limit):
    fr = [max(Fraction(float(x)).limit_denominator(denom_limit), Fraction(0)) for x in xs]
    s = sum(fr)
    if s == 0:
        return None
    return [x / s for x in fr]


def _tail_region_certified(eq_terms, f_terms, dim, n, v, j, cap) -> bool:
    blocks = eq_terms + [f_terms]
    scale = [Fraction(1)] * len(eq_terms) + [v]
    sizes = [len(b) for b in blocks]
    nvar = sum(sizes)
    # coefficient of coordinate c contributed by each variable
    coef = np.zeros((dim, nvar))
    col = 0
    for blk, sc in zip(blocks, scale):
        for t in blk:
            coef[:, col] = np.array(t, dtype=float) * float(sc)
            col += 1
    weights = np.ones(dim)
    weights[j] = cap + 1
    c_obj = weights @ coef
    A_eq = np.zeros((len(blocks), nvar))
    col = 0
    for bi, size in enumerate(sizes):
        A_eq[bi, col:col + size] = 1
        col += size
    res = linprog(c_obj, A_ub=coef, b_ub=np.ones(dim), A_eq=A_eq, b_eq=np.ones(len(blocks)),
                  bounds=[(0, None)] * nvar, method="highs")
    if res.status != 0:
        return False
    for limit in (10**4, 10**6, 10**9):
        g = [Fraction(1)] * dim
        col = 0
        ok = True
        for blk, sc, size in zip(blocks, scale, sizes):
            lam = _rationalize(res.x[col:col + size], limit)
            col += size
            if lam is None:
                ok = False
                break
            for coeff, t in zip(lam, blk):
                for c in range(dim):
                    g[c] -= sc * coeff * t[c]
        if not ok or any(x < 0 for x in g):
            continue
        bound = g[j] * (cap + 1) + sum(g[c] for c in range(dim) if c != j) - n
        if bound >= 0:
            return True
    return False


def _tail_region_integer(eq_terms, f_terms, q, v, j, cap) -> bool:
    """Integer program over the admissible lattice: min of den*(a - v m) on k_j > cap.

    Every variable is integral, so the scaled objective takes integer values and
    the solver's optimum only has to be read to within 1/2.
    """
    dim, n = q.dim, q.n
    ne = len(eq_terms)
    # variables: k (dim), y (dim), s, mu (ne), nu
    nvar = 2 * dim + 1 + ne + 1
    iy, i_s, imu, inu = dim, 2 * dim, 2 * dim + 1, 2 * dim + 1 + ne
    c = np.zeros(nvar)
    c[:dim] = v.denominator
    c[imu:imu + ne] = -v.denominator
    c[inu] = -v.numerator
    rows, lo, hi = [], [], []
    for i, blk in enumerate(eq_terms + [f_terms]):
        col = imu + i if i < ne else inu
        for t in blk:
            row = np.zeros(nvar)
            row[col] = 1
            row[:dim] = -np.array(t, dtype=float)
            rows.append(row)
            lo.append(-np.inf)
            hi.append(0)
    for cc in range(dim):
        # k_c = s b_c + n y_c
        row = np.zeros(nvar)
        row[cc], row[i_s], row[iy + cc] = 1, -q.b[cc], -n
        rows.append(row)
        lo.append(0)
        hi.append(0)
    lb = np.full(nvar, -np.inf)
    ub = np.full(nvar, np.inf)
    lb[:dim] = 1
    lb[j] = cap + 1
    lb[i_s], ub[i_s] = 0, n - 1
    A = np.array(rows)
    eq = np.array(lo) == 0
    # an unbounded relaxation means a negative direction; branch and bound would not stop
    relax = linprog(c, A_ub=A[~eq], b_ub=np.zeros((~eq).sum()), A_eq=A[eq], b_eq=np.zeros(eq.sum()),
                    bounds=list(zip(lb, [None if x == np.inf else x for x in ub])), method="highs")
    if relax.status != 0:
        return False
    res = milp(c, constraints=LinearConstraint(A, lo, hi), integrality=np.ones(nvar),
               bounds=Bounds(lb, ub), options={"time_limit": 2.0})
    bound = getattr(res, "mip_dual_bound", None)
    if res.status != 0 or bound is None:
        return False
    return bound - v.denominator * n > -0.5


def tail_certificate(p: Presentation, f: SeriesSupport, v: Fraction, cap: int) -> bool:
    """True if no admissible weight with some numerator > cap has a(w)/m(w) < v.

    The linear certificate is exact but only sees the real relaxation; regions
    it cannot close go to an integer program over the admissible lattice.
    """
    eq_terms = [list(phi.terms) for phi in p.equations()]
    v = Fraction(v)
    return all(_tail_region_certified(eq_terms, list(f.terms), p.dim, p.index, v, j, cap)
               or _tail_region_integer(eq_terms, list(f.terms), p.quotient, v, j, cap)
               for j in range(p.dim))


# ---------------------------------------------------------------------------
# fast path: classified weights allowed by the window bounds

@dataclass
class FillSearch:
    weights: List[Tuple[Dict[str, int], WeightVector]] = field(default_factory=list)
    bounds: List[Bound] = field(default_factory=list)
    capped: bool = False

    def add(self, params, w):
        self.weights.append((params, w))


def _pure_powers(s: SeriesSupport, axis: int):
    return sorted(t[axis] for t in s.terms if sum(t) == t[axis] and t[axis] > 0)


def _smooth_fills(p: Smooth, f: SeriesSupport, k: int, caps: Caps) -> FillSearch:
    out = FillSearch()
    out.bounds.append(Bound("alpha < 2k", f"alpha <= {2 * k - 1}"))
    seen = set()
    beta_caps = []
    for perm in itertools.permutations(range(3)):
        for alpha in range(1, 2 * k):
            avoid = [t for t in f.terms if t[perm[2]] == 0]
            if avoid:
                M = min(t[perm[0]] + alpha * t[perm[1]] for t in avoid)
                beta_max = M // k
                beta_caps.append(beta_max)
            else:
                beta_max = caps.a_max
                out.capped = True
            betas = range(alpha + 1, beta_max + 1)
            if alpha == 1:
                betas = itertools.chain([1], betas)
            for beta in betas:
                if math.gcd(alpha, beta) != 1:
                    continue
                ks = [0, 0, 0]
                ks[perm[0]], ks[perm[1]], ks[perm[2]] = 1, alpha, beta
                ks = tuple(ks)
                if ks in seen:
                    continue
                seen.add(ks)
                out.add({"alpha": alpha, "beta": beta}, WeightVector(ks))
    out.bounds.append(Bound("beta k <= m < alpha k + beta k", f"beta <= {max(beta_caps, default=caps.a_max)}"))
    return out


def _ca_fills(p: CA, f, k, caps) -> FillSearch:
    out = FillSearch()
    out.bounds.append(Bound("r1 < 2k", f"min(r1, r2) <= {2 * k - 1}"))
    us = _pure_powers(p.g, 1)
    for d in _pure_powers(p.g, 0):
        a_hi = us[0] // d if us else caps.a_max
        out.capped |= not us
        for a in range(1, a_hi + 1):
            for r1 in range(1, a * d):
                r2 = a * d - r1
                if min(r1, r2) > 2 * k - 1:
                    continue
                q = p.with_params(r1=r1, r2=r2, a=a, d=d)
                if q.is_valid():
                    out.add(q.params(), q.classified_weight())
    return out


def _can_fills(p: CAn, f, k, caps) -> FillSearch:
    out = FillSearch()
    n = p.n
    out.bounds.append(Bound("r1 < 2kn and n <= 3k", f"min(r1, r2) <= {2 * k * n - 1}, n = {n} <= {3 * k}"))
    if n > 3 * k:
        return out
    out.bounds.append(Bound("If a >= 6k^2, then dn < 4k", f"a >= {6 * k * k} => dn <= {4 * k - 1}"))
    us = _pure_powers(p.g, 1)
    for e in _pure_powers(p.g, 0):
        if e % n:
            continue
        d = e // n
        a_hi = us[0] // d if us else caps.a_max
        out.capped |= not us
        for a in range(1, a_hi + 1):
            if a >= 6 * k * k and d * n >= 4 * k:
                continue
            for r1 in range(1, a * d * n):
                r2 = a * d * n - r1
                if min(r1, r2) > 2 * k * n - 1:
                    continue
                q = p.with_params(r1=r1, r2=r2, a=a, d=d)
                if q.is_valid():
                    out.add(q.params(), q.classified_weight())
    return out


def _cd1_fills(p: CD1, f, k, caps) -> FillSearch:
    out = FillSearch()
    r_max = 8 * k * k
    out.bounds.append(Bound("d <= 2k-1 and m < 4kr", f"d <= {2 * k - 1}"))
    out.bounds.append(Bound("r <= 8k^2", f"r <= {r_max}"))
    for d in _pure_powers(p.p, 1):
        if d < 3:
            continue
        for a in range(1, 2 * r_max + 2, 2):
            if a >= 5 and d > 2 * k - 1:
                break
            if (a * d - 1) % 2:
                continue
            r = (a * d - 1) // 2
            if a >= 5 and r > r_max:
                break
            q = p.with_params(r=r, a=a, d=d)
            if q.is_valid():
                out.add(q.params(), q.classified_weight())
    return out


def _cd2_fills(p: CD2, f, k, caps) -> FillSearch:
    out = FillSearch()
    r_max = 8 * k * k - 2
    out.bounds.append(Bound("d <= k-1 and m < 4kr", f"d <= {k - 1}"))
    out.bounds.append(Bound("r <= 8k^2-2", f"r <= {r_max}"))
    d = p.d
    for a in range(1, r_max + 2):
        if a >= 5 and (d > k - 1 or a * d - 1 > r_max):
            break
        q = p.with_params(r=a * d - 1, a=a)
        if q.is_valid():
            out.add(q.params(), q.classified_weight())
    return out


def _cdh1_fills(p: CDh1, f, k, caps) -> FillSearch:
    out = FillSearch(capped=True)
    out.bounds.append(Bound("d <= k and m < 4kr", f"d <= {k}"))
    out.bounds.append(Bound("ladder cap (no finiteness bound)", f"a <= {caps.a_max}"))
    for e in _pure_powers(p.p, 0):
        if e % 2:
            continue
        d = e // 2
        for a in range(1, caps.a_max + 1, 2):
            if a >= 5 and d > k:
                break
            q = p.with_params(r=a * d - 1, a=a, d=d)
            if q.is_valid():
                out.add(q.params(), q.classified_weight())
    return out


def _cdh2_fills(p: CDh2, f, k, caps) -> FillSearch:
    out = FillSearch()
    r_max = 16 * k * k - 4
    out.bounds.append(Bound("2d+1 <= k-1 and m < 4kr", f"2d+1 <= {k - 1}"))
    out.bounds.append(Bound("r <= 16k^2-4", f"r <= {r_max}"))
    d = p.d
    for a in range(1, r_max + 3):
        r = a * (2 * d + 1) - 2
        if a >= 5 and (2 * d + 1 > k - 1 or r > r_max):
            break
        if r < 1:
            continue
        q = p.with_params(r=r, a=a)
        if q.is_valid():
            out.add(q.params(), q.classified_weight())
    return out


def _quotient_fills(p: Quotient, f, k, caps) -> FillSearch:
    out = FillSearch()
    out.bounds.append(Bound("unique divisorial contraction over a terminal quotient", str(p.classified_weight())))
    out.add(p.params(), p.classified_weight())
    return out


_FILLS = {"smooth": _smooth_fills, "quotient": _quotient_fills, "cA": _ca_fills, "cAn": _can_fills,
          "cD1": _cd1_fills, "cD2": _cd2_fills, "cDh1": _cdh1_fills, "cDh2": _cdh2_fills}


def classified_fills(p: Presentation, f: SeriesSupport, k: int, caps: Caps = Caps()) -> FillSearch:
    return _FILLS[p.family](p, f, k, caps)


def _in_window(v: Fraction, k: int) -> bool:
    return Fraction(1, k) < v < Fraction(1, k - 1)


def _oracle_until_decided(p, f, k, cap, caps):
    """Run the oracle, enlarging the cap (within budget) until window membership is decided."""
    lo, hi = Fraction(1, k), Fraction(1, k - 1)
    while True:
        oracle = brute_force_ct(p, f, cap, caps.budget)
        if oracle.certified or oracle.value <= lo:
            return oracle, cap
        if oracle.value >= hi and tail_certificate(p, f, hi, cap):
            return oracle, cap
        nxt = max(2 * cap, caps.cap)
        if _box_size(p.dim, nxt) > caps.budget:
            return oracle, cap
        cap = nxt


def certified_ct_in_window(p: Presentation, f: SeriesSupport, k: int, caps: Caps = Caps()):
    """ct(p, f) if it lies in (1/k, 1/(k-1)), else None.

    Raises :class:`Inconclusive` when the budget does not decide membership.
    """
    if k < 2:
        raise ValueError("window index k must be >= 2")
    bad = p.validate()
    if bad:
        raise InvalidPresentation(bad)
    _require_semi_invariant(p, f)
    search = classified_fills(p, f, k, caps)
    best = None
    for params, w in search.weights:
        mult = weighted_multiplicity(f, w)
        if not mult.certified:
            continue
        v = Fraction(p.weighted_discrepancy(w), mult.scaled)
        key = (v, sum(w.numerators), w.numerators)
        if best is None or key < best[0]:
            best = (key, w, mult)
    cap = max((max(w.numerators) for _, w in search.weights), default=caps.cap)
    cap = max(cap, 1)
    while cap > 1 and _box_size(p.dim, cap) > caps.budget:
        cap -= 1  # a smaller box is still sound once the tail is closed
    oracle, cap = _oracle_until_decided(p, f, k, cap, caps)
    lo, hi = Fraction(1, k), Fraction(1, k - 1)
    if best is not None and oracle.value == best[0][0]:
        v, w, mult = best[0][0], best[1], best[2]
        if oracle.certified:
            if not _in_window(v, k):
                return None
            res = ThresholdResult(v, w, mult.witness, True, cap, "classified weight, oracle-closed")
            return res, WindowCertificate(k, tuple(search.bounds), cap, "classified")
        if v <= lo:
            return None
        if v >= hi and tail_certificate(p, f, hi, cap):
            return None
        raise Inconclusive(f"upper bound {format_rational(v)} found but the tail beyond cap {cap} is not closed")
    # the classified fast path did not reach the oracle minimum
    if oracle.certified:
        if not _in_window(oracle.value, k):
            return None
        bounds = tuple(search.bounds) + (Bound("oracle closure", f"cap = {cap}"),)
        return oracle, WindowCertificate(k, bounds, cap, "oracle")
    if oracle.value <= lo:
        return None
    if oracle.value >= hi and tail_certificate(p, f, hi, cap):
        return None  # every admissible weight gives at least 1/(k-1)
    raise Inconclusive(
        f"oracle value {format_rational(oracle.value)} at cap {cap} is an upper bound only"
        + (" (classified search was capped)" if search.capped else ""))
