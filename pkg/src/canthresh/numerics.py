"""Exact rationals, monomial supports, cyclic quotients and weight vectors.

Every quantity here is an integer or a :class:`fractions.Fraction`; nothing
is ever rounded.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

Monomial = Tuple[int, ...]


class StructureError(ValueError):
    """Dimension mismatch or malformed algebraic data."""


def parse_rational(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    if not s:
        raise StructureError("empty rational")
    try:
        if "/" in s:
            num, den = s.split("/")
            value = Fraction(int(num), int(den))
        else:
            value = Fraction(int(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise StructureError(f"bad rational {text!r}") from exc
    return value


def format_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _check_dim(got: int, want: int, what: str) -> None:
    if got != want:
        raise StructureError(f"{what}: dimension {got} does not match {want}")


@dataclass(frozen=True)
class SeriesSupport:
    """Support of a (possibly truncated) semi-invariant power series.

    ``complete_up_to=None`` means the listed terms are the whole series.
    Otherwise every monomial of total degree <= complete_up_to is listed and
    higher-degree terms may be missing.
    """

    dim: int
    terms: Tuple[Monomial, ...]
    complete_up_to: Optional[int] = None

    def __post_init__(self):
        if self.dim < 1:
            raise StructureError("dimension must be positive")
        clean = []
        for t in self.terms:
            t = tuple(int(e) for e in t)
            _check_dim(len(t), self.dim, "monomial")
            if any(e < 0 for e in t):
                raise StructureError(f"negative exponent in {t}")
            clean.append(t)
        if len(set(clean)) != len(clean):
            raise StructureError("duplicate exponent vectors in support")
        if self.complete_up_to is not None and self.complete_up_to < 1:
            raise StructureError("complete_up_to must be positive")
        object.__setattr__(self, "terms", tuple(sorted(clean)))

    @classmethod
    def of(cls, *terms: Sequence[int], complete_up_to: Optional[int] = None) -> "SeriesSupport":
        if not terms:
            raise StructureError("use SeriesSupport(dim, ()) for an empty support")
        return cls(len(terms[0]), tuple(tuple(t) for t in terms), complete_up_to)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __contains__(self, m) -> bool:
        return tuple(m) in self.terms

    def union(self, other: "SeriesSupport") -> "SeriesSupport":
        _check_dim(other.dim, self.dim, "support union")
        cut = [c for c in (self.complete_up_to, other.complete_up_to) if c is not None]
        return SeriesSupport(self.dim, tuple(set(self.terms) | set(other.terms)),
                             min(cut) if cut else None)

    def embed(self, dim: int, positions: Sequence[int]) -> "SeriesSupport":
        """Re-index into ``dim`` variables; variable i goes to ``positions[i]``."""
        _check_dim(len(positions), self.dim, "embedding")
        out = []
        for t in self.terms:
            e = [0] * dim
            for i, p in enumerate(positions):
                e[p] += t[i]
            out.append(tuple(e))
        return SeriesSupport(dim, tuple(out), self.complete_up_to)

    def shifted(self, by: Sequence[int]) -> "SeriesSupport":
        """Support of the product with the monomial ``by``."""
        _check_dim(len(by), self.dim, "shift")
        deg = sum(by)
        cut = None if self.complete_up_to is None else self.complete_up_to + deg
        return SeriesSupport(self.dim, tuple(tuple(a + b for a, b in zip(t, by)) for t in self.terms), cut)

    def has_constant_term(self) -> bool:
        return any(sum(t) == 0 for t in self.terms)

    def to_json(self) -> dict:
        d = {"terms": [list(t) for t in self.terms]}
        if self.complete_up_to is not None:
            d["complete_up_to"] = self.complete_up_to
        d["dim"] = self.dim
        return d

    @classmethod
    def from_json(cls, data, dim: Optional[int] = None) -> "SeriesSupport":
        if isinstance(data, str):
            data = json.loads(data)
        if isinstance(data, list):
            data = {"terms": data}
        terms = [tuple(t) for t in data.get("terms", [])]
        d = data.get("dim", dim)
        if d is None:
            if not terms:
                raise StructureError("cannot infer dimension of an empty support")
            d = len(terms[0])
        return cls(int(d), tuple(terms), data.get("complete_up_to"))


@dataclass(frozen=True)
class CyclicQuotient:
    """The action (1/n)(b_1, ..., b_r); n = 1 is the trivial group."""

    n: int
    b: Tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise StructureError("quotient index must be positive")
        object.__setattr__(self, "b", tuple(int(x) % self.n for x in self.b))

    @classmethod
    def trivial(cls, dim: int) -> "CyclicQuotient":
        return cls(1, (0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.b)

    def residue(self, m: Sequence[int]) -> int:
        _check_dim(len(m), self.dim, "monomial")
        return sum(e * b for e, b in zip(m, self.b)) % self.n

    def __str__(self):
        return f"1/{self.n}({','.join(map(str, self.b))})"


@dataclass(frozen=True)
class WeightVector:
    """w = (1/n)(k_1, ..., k_r) with all k_i >= 1."""

    numerators: Tuple[int, ...]
    denominator: int = 1

    def __post_init__(self):
        ks = tuple(int(k) for k in self.numerators)
        if not ks:
            raise StructureError("empty weight vector")
        if any(k < 1 for k in ks):
            raise StructureError(f"weight numerators must be positive: {ks}")
        if self.denominator < 1:
            raise StructureError("weight denominator must be positive")
        object.__setattr__(self, "numerators", ks)

    @property
    def dim(self) -> int:
        return len(self.numerators)

    @property
    def n(self) -> int:
        return self.denominator

    def values(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(k, self.denominator) for k in self.numerators)

    def dominates(self, other: "WeightVector", c=1) -> bool:
        """True iff self >= c * other componentwise, as rational weights."""
        _check_dim(other.dim, self.dim, "weight comparison")
        c = Fraction(c)
        return all(a >= c * b for a, b in zip(self.values(), other.values()))

    def __str__(self):
        body = ",".join(map(str, self.numerators))
        return f"({body})" if self.denominator == 1 else f"1/{self.denominator}({body})"

    def to_json(self) -> dict:
        return {"numerators": list(self.numerators), "denominator": self.denominator}

    @classmethod
    def from_json(cls, data) -> "WeightVector":
        return cls(tuple(data["numerators"]), int(data.get("denominator", 1)))


def pairing(m: Sequence[int], ks: Sequence[int]) -> int:
    return sum(e * k for e, k in zip(m, ks))


def monomial_weight(m: Sequence[int], w: WeightVector) -> Fraction:
    _check_dim(len(m), w.dim, "monomial_weight")
    return Fraction(pairing(m, w.numerators), w.denominator)


@dataclass(frozen=True)
class Multiplicity:
    value: Fraction
    witness: Monomial
    certified: bool
    scaled: int  # n * w(f), always an integer

    def __iter__(self):
        return iter((self.value, self.witness, self.certified))


def weighted_multiplicity(f: SeriesSupport, w: WeightVector) -> Multiplicity:
    """Minimum weight over the support of ``f`` with a lexicographic witness."""
    _check_dim(f.dim, w.dim, "weighted_multiplicity")
    if not f.terms:
        raise StructureError("empty support: f = 0 defines no divisor")
    best = None
    best_m = None
    for t in f.terms:  # terms are sorted, so the first minimum is lex-smallest
        v = pairing(t, w.numerators)
        if best is None or v < best:
            best, best_m = v, t
    mu = Fraction(best, w.denominator)
    if f.complete_up_to is None:
        certified = True
    else:
        certified = Fraction(min(w.numerators) * (f.complete_up_to + 1), w.denominator) >= mu
    return Multiplicity(mu, best_m, certified, best)


def semi_invariant_class(f: SeriesSupport, q: CyclicQuotient) -> Optional[int]:
    _check_dim(f.dim, q.dim, "semi_invariant_class")
    residues = {q.residue(t) for t in f.terms}
    if len(residues) == 1:
        return residues.pop()
    return None


def conflicting_residues(f: SeriesSupport, q: CyclicQuotient):
    seen = {}
    for t in f.terms:
        seen.setdefault(q.residue(t), t)
    return sorted(seen.items())


def admissibility_multiplier(ks: Sequence[int], q: CyclicQuotient) -> Optional[int]:
    _check_dim(len(ks), q.dim, "is_admissible")
    n = q.n
    for s in range(n):
        if all((k - s * b) % n == 0 for k, b in zip(ks, q.b)):
            return s
    return None


def is_admissible(w: WeightVector, q: CyclicQuotient) -> bool:
    if w.denominator != q.n:
        raise StructureError(f"weight denominator {w.denominator} differs from quotient index {q.n}")
    return admissibility_multiplier(w.numerators, q) is not None


@dataclass(frozen=True)
class ComparisonVerdict:
    m: int
    m_prime: int
    ceiling: int
    holds: bool


class DominationError(ValueError):
    pass


def multiplicity_comparison(f: SeriesSupport, w: WeightVector, w_prime: WeightVector, c) -> ComparisonVerdict:
    """Check m' >= ceil(c m) where m = n w(f), m' = n w'(f).

    Only meaningful when w' >= c w componentwise; otherwise refuses.
    """
    c = Fraction(c)
    if w.denominator != w_prime.denominator:
        raise StructureError("comparison weights must share the quotient index")
    if not w_prime.dominates(w, c):
        bad = [i for i, (a, b) in enumerate(zip(w_prime.values(), w.values())) if a < c * b]
        raise DominationError(
            f"{w_prime} is not >= {c}*{w} (fails at coordinates {bad}); no inequality is asserted")
    m = weighted_multiplicity(f, w).value * w.denominator
    mp = weighted_multiplicity(f, w_prime).value * w.denominator
    ceil = math.ceil(c * m)
    return ComparisonVerdict(int(m), int(mp), ceil, mp >= ceil)


def total_degree(m: Iterable[int]) -> int:
    return sum(m)
