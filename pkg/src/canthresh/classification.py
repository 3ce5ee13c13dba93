"""The classified germ families and their weights.

Coordinates are (x, y, z) for 3-dimensional ambient spaces, (x, y, z, u) for
hypersurfaces in dimension 4 and (x, y, z, u, t) for the codimension-two
presentations in dimension 5.  Each family knows its defining equations as
monomial supports, the weight of its divisorial contraction, and the auxiliary
weights used to bound thresholds inside a window.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import ClassVar, Dict, List, Optional, Tuple

from .numerics import (
    CyclicQuotient,
    SeriesSupport,
    StructureError,
    WeightVector,
    is_admissible,
    semi_invariant_class,
    weighted_multiplicity,
)

EMPTY2 = SeriesSupport(2, ())
EMPTY3 = SeriesSupport(3, ())


class InvalidPresentation(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(v.message for v in self.violations))


@dataclass(frozen=True)
class Violation:
    anchor: str
    message: str

    def __str__(self):
        return f"{self.message} [{self.anchor}]"


def _mono(dim, **exps):
    names = "xyzut"[:dim]
    return tuple(exps.get(c, 0) for c in names)


def _support(dim, *monos):
    return SeriesSupport(dim, tuple(set(monos)))


def _min_scaled(f: SeriesSupport, ks) -> Optional[int]:
    if not f.terms:
        return None
    return min(sum(e * k for e, k in zip(t, ks)) for t in f.terms)


@dataclass(frozen=True)
class ComparisonWeight:
    name: str
    weight: WeightVector
    role: str
    discrepancy: int  # weighted discrepancy the comparison weight is known to have
    domination: Optional[Fraction] = None  # c with weight >= c * classified weight


@dataclass(frozen=True)
class ComparisonWeightSet:
    family: str
    k: Optional[int]
    weights: Tuple[ComparisonWeight, ...]
    omitted: Tuple[Tuple[str, str], ...] = ()

    def get(self, name: str) -> Optional[ComparisonWeight]:
        for c in self.weights:
            if c.name == name:
                return c
        return None

    def names(self):
        return [c.name for c in self.weights]


class Presentation:
    """Base class; concrete families are frozen dataclasses below."""

    family: ClassVar[str] = ""
    dim: ClassVar[int] = 3
    param_names: ClassVar[Tuple[str, ...]] = ()
    support_names: ClassVar[Tuple[str, ...]] = ()
    flag_names: ClassVar[Tuple[str, ...]] = ()

    # -- structure -------------------------------------------------------
    @property
    def quotient(self) -> CyclicQuotient:
        return CyclicQuotient.trivial(self.dim)

    @property
    def index(self) -> int:
        return self.quotient.n

    def equations(self) -> Tuple[SeriesSupport, ...]:
        return ()

    def prescribed_multiplicities(self) -> Tuple[int, ...]:
        """n * w(phi_i) for the classified weight."""
        return ()

    def discrepancy_parameter(self) -> int:
        return self.a

    def weight_numerators(self) -> Tuple[int, ...]:
        raise NotImplementedError

    def _checks(self) -> List[Violation]:
        return []

    def comparison_weights(self, k: Optional[int] = None) -> ComparisonWeightSet:
        """Auxiliary weights with their roles.

        A domination factor c is kept only when the weight really is >= c times
        the classified weight; for small parameters the quoted factor can fail.
        """
        cws = self._comparison_weights(k)
        if not self.is_valid():
            return cws
        w = self.classified_weight()
        fixed = tuple(c if c.domination is None or c.weight.dominates(w, c.domination)
                      else dataclasses.replace(c, domination=None) for c in cws.weights)
        return dataclasses.replace(cws, weights=fixed)

    def _comparison_weights(self, k: Optional[int] = None) -> ComparisonWeightSet:
        return ComparisonWeightSet(self.family, k, ())

    def warnings(self) -> List[str]:
        a = getattr(self, "a", None)
        if a is not None and self.family in ("cD1", "cD2", "cDh1", "cDh2", "cAn") and a < 5:
            return [f"a = {a} < 5: the window bounds assume a >= 5 and are not invoked"]
        return []

    # -- generic operations ---------------------------------------------
    def validate(self) -> List[Violation]:
        out: List[Violation] = []
        for name in self.param_names:
            v = getattr(self, name)
            if v is None:
                continue
            if not isinstance(v, int) or v < 1:
                out.append(Violation("positive integer parameters", f"{name} = {v} must be a positive integer"))
        if out:
            return out
        out.extend(self._checks())
        for name in self.support_names:
            s = getattr(self, name)
            if s.has_constant_term():
                out.append(Violation("power series vanishing at the origin",
                                     f"support {name} has a constant term"))
        if out:
            return out
        eqs = self.equations()
        for i, phi in enumerate(eqs):
            if semi_invariant_class(phi, self.quotient) is None:
                out.append(Violation("semi-invariant defining equation", f"equation {i + 1} is not semi-invariant"))
        try:
            ks = self.weight_numerators()
        except (TypeError, ValueError):
            return out
        if ks is None or any(k < 1 for k in ks):
            out.append(Violation("classified weight has positive entries", f"weight numerators {ks} not positive"))
            return out
        w = WeightVector(ks, self.index)
        if not is_admissible(w, self.quotient):
            out.append(Violation("admissible weight", f"{w} is not admissible over {self.quotient}"))
        for i, (phi, want) in enumerate(zip(eqs, self.prescribed_multiplicities())):
            got = _min_scaled(phi, ks)
            if got != want:
                out.append(Violation(self._mult_anchor(i),
                                     f"n*w(phi_{i + 1}) = {got} under {w}, expected {want}"))
        return out

    def _mult_anchor(self, i) -> str:
        return "weighted multiplicity of the defining equation"

    def is_valid(self) -> bool:
        return not self.validate()

    def classified_weight(self) -> WeightVector:
        bad = self.validate()
        if bad:
            raise InvalidPresentation(bad)
        return WeightVector(self.weight_numerators(), self.index)

    def weighted_discrepancy(self, w: WeightVector) -> int:
        """Adjunction for a weighted blow-up: sum k - n - sum n*w(phi_i)."""
        if w.dim != self.dim:
            raise StructureError(f"weight has dimension {w.dim}, ambient space has {self.dim}")
        if not is_admissible(w, self.quotient):
            raise StructureError(f"{w} is not admissible over {self.quotient}")
        total = sum(w.numerators) - w.denominator
        for phi in self.equations():
            mult = weighted_multiplicity(phi, w)
            if not mult.certified:
                raise StructureError("multiplicity of a defining equation is not certified")
            total -= mult.scaled
        return total

    def with_params(self, **changes) -> "Presentation":
        return dataclasses.replace(self, **changes)

    def params(self) -> Dict[str, int]:
        return {n: getattr(self, n) for n in self.param_names}

    def to_json(self) -> dict:
        d = {"family": self.family}
        d.update({k: v for k, v in self.params().items() if v is not None})
        for s in self.support_names:
            d[s] = getattr(self, s).to_json()
        for fl in self.flag_names:
            d[fl] = bool(getattr(self, fl))
        return d


@dataclass(frozen=True)
class Smooth(Presentation):
    alpha: Optional[int] = None
    beta: Optional[int] = None

    family: ClassVar[str] = "smooth"
    dim: ClassVar[int] = 3
    param_names: ClassVar[Tuple[str, ...]] = ("alpha", "beta")

    def _checks(self):
        if self.alpha is None or self.beta is None:
            return []
        if not (self.alpha < self.beta or self.alpha == self.beta == 1):
            return [Violation("weights w=(1,alpha,beta) with 1 <= alpha < beta",
                              f"alpha = {self.alpha}, beta = {self.beta}")]
        if math.gcd(self.alpha, self.beta) != 1:
            return [Violation("primitive weight", f"gcd(alpha, beta) = {math.gcd(self.alpha, self.beta)}")]
        return []

    def weight_numerators(self):
        if self.alpha is None or self.beta is None:
            raise ValueError("smooth presentation without alpha, beta has no classified weight")
        return (1, self.alpha, self.beta)

    def discrepancy_parameter(self):
        return self.alpha + self.beta

    def _comparison_weights(self, k=None):
        a, b = self.alpha, self.beta
        if a is None or b is None or b < 2:
            return ComparisonWeightSet(self.family, k, (), (("w'", "needs beta >= 2"),))
        return ComparisonWeightSet(self.family, k, (
            ComparisonWeight("w'", WeightVector((1, a, b - 1)), "lower-discrepancy comparison",
                             a + b - 1, Fraction(b - 1, b)),))


@dataclass(frozen=True)
class Quotient(Presentation):
    """Terminal cyclic quotient C^3/(1/n)(1,-1,b)."""

    n: int = 2
    b: int = 1

    family: ClassVar[str] = "quotient"
    dim: ClassVar[int] = 3
    param_names: ClassVar[Tuple[str, ...]] = ("n", "b")

    @property
    def quotient(self):
        return CyclicQuotient(self.n, (1, -1, self.b))

    def _checks(self):
        out = []
        if self.n < 2:
            out.append(Violation("quotient index n >= 2", f"n = {self.n}"))
        elif not (0 < self.b < self.n) or math.gcd(self.b, self.n) != 1:
            out.append(Violation("terminal quotient 1/n(1,-1,b) with gcd(b,n)=1", f"b = {self.b}, n = {self.n}"))
        return out

    def weight_numerators(self):
        bstar = pow(self.b, -1, self.n)
        return (bstar, self.n - bstar, 1)

    def discrepancy_parameter(self):
        return 1


@dataclass(frozen=True)
class CA(Presentation):
    """xy + g(z,u) = 0 with weight (r1, r2, a, 1)."""

    r1: int = 1
    r2: int = 1
    a: int = 1
    d: int = 2
    g: SeriesSupport = EMPTY2

    family: ClassVar[str] = "cA"
    dim: ClassVar[int] = 4
    param_names: ClassVar[Tuple[str, ...]] = ("r1", "r2", "a", "d")
    support_names: ClassVar[Tuple[str, ...]] = ("g",)

    def equations(self):
        phi = self.g.embed(4, (2, 3)).union(_support(4, (1, 1, 0, 0)))
        return (phi,)

    def prescribed_multiplicities(self):
        return (self.r1 + self.r2,)

    def weight_numerators(self):
        return (self.r1, self.r2, self.a, 1)

    def _checks(self):
        out = []
        if self.r1 + self.r2 != self.a * self.d:
            out.append(Violation("w(g(z,u)) = r1+r2 = ad", f"r1+r2 = {self.r1 + self.r2} != ad = {self.a * self.d}"))
        if (self.d, 0) not in self.g:
            out.append(Violation("z^d in g(z,u)", f"z^{self.d} missing from g"))
        return out

    def _mult_anchor(self, i):
        return "w(g(z,u)) = r1+r2 = ad"

    def _comparison_weights(self, k=None):
        r1, r2, a, d = self.r1, self.r2, self.a, self.d
        if r2 <= d or a <= 1:
            return ComparisonWeightSet(self.family, k, (), (("w_{a-1}", "needs r2 > d and a > 1"),))
        return ComparisonWeightSet(self.family, k, (
            ComparisonWeight("w_{a-1}", WeightVector((r1, r2 - d, a - 1, 1)), "lower-discrepancy comparison",
                             a - 1, Fraction(r2 - d, r2)),))


@dataclass(frozen=True)
class CAn(Presentation):
    """xy + g(z^n,u) = 0 in C^4/(1/n)(1,-1,b,0), weight (1/n)(r1, r2, a, n)."""

    n: int = 2
    b: int = 1
    r1: int = 1
    r2: int = 1
    a: int = 1
    d: int = 1
    g: SeriesSupport = EMPTY2

    family: ClassVar[str] = "cAn"
    dim: ClassVar[int] = 4
    param_names: ClassVar[Tuple[str, ...]] = ("n", "b", "r1", "r2", "a", "d")
    support_names: ClassVar[Tuple[str, ...]] = ("g",)

    @property
    def quotient(self):
        return CyclicQuotient(self.n, (1, -1, self.b, 0))

    def equations(self):
        return (self.g.embed(4, (2, 3)).union(_support(4, (1, 1, 0, 0))),)

    def prescribed_multiplicities(self):
        return (self.r1 + self.r2,)

    def weight_numerators(self):
        return (self.r1, self.r2, self.a, self.n)

    def _checks(self):
        n, b, r1, r2, a, d = self.n, self.b, self.r1, self.r2, self.a, self.d
        out = []
        if n < 2:
            return [Violation("index n >= 2", f"n = {n}")]
        if r1 + r2 != a * d * n:
            out.append(Violation("nw(phi) = r1+r2 = adn", f"r1+r2 = {r1 + r2} != adn = {a * d * n}"))
        if (d * n, 0) not in self.g:
            out.append(Violation("z^{dn} in g(z^n,u)", f"z^{d * n} missing from g"))
        if any(t[0] % n for t in self.g.terms):
            out.append(Violation("g is a series in z^n and u", "a z-exponent of g is not a multiple of n"))
        if not (0 < b < n):
            out.append(Violation("a = br1 (mod n) and 0 < b < n", f"b = {b} not in (0, {n})"))
        elif (a - b * r1) % n:
            out.append(Violation("a = br1 (mod n) and 0 < b < n", f"a = {a} is not br1 = {b * r1} mod {n}"))
        else:
            g1 = math.gcd(b, n)
            g2 = math.gcd((a - b * r1) // n, r1)
            g3 = math.gcd((a + b * r2) // n, r2)
            if (g1, g2, g3) != (1, 1, 1):
                out.append(Violation("gcd(b,n)=gcd((a-br1)/n,r1)=gcd((a+br2)/n,r2)=1",
                                     f"gcds are {(g1, g2, g3)}"))
        return out

    def _mult_anchor(self, i):
        return "nw(phi) = r1+r2 = adn"

    def bstar(self) -> int:
        return pow(self.b, -1, self.n)

    def wan_side_condition(self, k: int) -> Tuple[bool, Fraction]:
        """a > max{6k^2, (r1+dn^2-n)/(dn-1)}."""
        n, d = self.n, self.d
        thr = max(Fraction(6 * k * k), Fraction(self.r1 + d * n * n - n, d * n - 1))
        return self.a > thr, thr

    def _comparison_weights(self, k=None):
        n, r1, r2, a, d = self.n, self.r1, self.r2, self.a, self.d
        bs = self.bstar()
        ws, omitted = [], []
        if d * n > bs:
            ws.append(ComparisonWeight("w1", WeightVector((bs, d * n - bs, 1, n), n), "squeeze witness", 1))
        else:
            omitted.append(("w1", "needs dn > b*"))
        reasons = []
        if r2 <= d * n * n:
            reasons.append(f"r2 = {r2} <= dn^2 = {d * n * n}")
        if a <= n:
            reasons.append(f"a = {a} <= n = {n}")
        if k is not None:
            ok, thr = self.wan_side_condition(k)
            if not ok:
                reasons.append(f"a = {a} <= max{{6k^2, (r1+dn^2-n)/(dn-1)}} = {thr}")
        if reasons:
            omitted.append(("w_{a-n}", "; ".join(reasons)))
        else:
            ws.append(ComparisonWeight("w_{a-n}", WeightVector((r1, r2 - d * n * n, a - n, n), n),
                                       "lower-discrepancy comparison", a - n, Fraction(r2 - d * n * n, r2)))
        return ComparisonWeightSet(self.family, k, tuple(ws), tuple(omitted))


@dataclass(frozen=True)
class CD1(Presentation):
    """x^2 + xq(z,u) + y^2u + lam yz^2 + mu z^3 + p(y,z,u) = 0, weight (r+1, r, a, 1)."""

    r: int = 1
    a: int = 1
    d: int = 3
    q: SeriesSupport = EMPTY2
    p: SeriesSupport = EMPTY3
    lam: bool = False
    mu: bool = False

    family: ClassVar[str] = "cD1"
    dim: ClassVar[int] = 4
    param_names: ClassVar[Tuple[str, ...]] = ("r", "a", "d")
    support_names: ClassVar[Tuple[str, ...]] = ("q", "p")
    flag_names: ClassVar[Tuple[str, ...]] = ("lam", "mu")

    def equations(self):
        phi = _support(4, (2, 0, 0, 0), (0, 2, 0, 1))
        phi = phi.union(self.q.embed(4, (2, 3)).shifted((1, 0, 0, 0)) if self.q.terms else phi)
        phi = phi.union(self.p.embed(4, (1, 2, 3)))
        if self.lam:
            phi = phi.union(_support(4, (0, 1, 2, 0)))
        if self.mu:
            phi = phi.union(_support(4, (0, 0, 3, 0)))
        return (phi,)

    def prescribed_multiplicities(self):
        return (2 * self.r + 1,)

    def weight_numerators(self):
        return (self.r + 1, self.r, self.a, 1)

    def _checks(self):
        r, a, d = self.r, self.a, self.d
        out = []
        if 2 * r + 1 != a * d:
            out.append(Violation("2r+1=ad", f"2r+1 = {2 * r + 1} != ad = {a * d}"))
        if d < 3:
            out.append(Violation("2r+1=ad where d >= 3", f"d = {d} < 3"))
        if a % 2 == 0:
            out.append(Violation("a is an odd integer", f"a = {a} is even"))
        if (0, d, 0) not in self.p:
            out.append(Violation("x^2 + eta z^d with eta nonzero", f"z^{d} missing from p"))
        return out

    def _mult_anchor(self, i):
        return "weight w=(r+1,r,a,1) with w(phi) = 2r+1"

    def _comparison_weights(self, k=None):
        r, a, d = self.r, self.a, self.d
        ws, omitted = [ComparisonWeight("w1", WeightVector((d, d, 2, 1)), "squeeze witness", 2,
                                        Fraction(d, r + 1))], []
        if r > d and a > 2:
            ws.append(ComparisonWeight("w2", WeightVector((r + 1 - d, r - d, a - 2, 1)),
                                       "lower-discrepancy comparison", a - 2, Fraction(r - d, r)))
        else:
            omitted.append(("w2", "needs r > d and a > 2"))
        return ComparisonWeightSet(self.family, k, tuple(ws), tuple(omitted))


@dataclass(frozen=True)
class CD2(Presentation):
    """x^2 + yt + p(y,z,u) = yu + z^d + q(z,u)u + t = 0, weight (r+1, r, a, 1, r+2)."""

    r: int = 1
    a: int = 1
    d: int = 2
    p: SeriesSupport = EMPTY3
    q: SeriesSupport = EMPTY2

    family: ClassVar[str] = "cD2"
    dim: ClassVar[int] = 5
    param_names: ClassVar[Tuple[str, ...]] = ("r", "a", "d")
    support_names: ClassVar[Tuple[str, ...]] = ("p", "q")

    def equations(self):
        phi1 = _support(5, (2, 0, 0, 0, 0), (0, 1, 0, 0, 1)).union(self.p.embed(5, (1, 2, 3)))
        phi2 = _support(5, (0, 1, 0, 1, 0), (0, 0, self.d, 0, 0), (0, 0, 0, 0, 1))
        if self.q.terms:
            phi2 = phi2.union(self.q.embed(5, (2, 3)).shifted((0, 0, 0, 1, 0)))
        return (phi1, phi2)

    def prescribed_multiplicities(self):
        return (2 * self.r + 2, self.r + 1)

    def weight_numerators(self):
        return (self.r + 1, self.r, self.a, 1, self.r + 2)

    def _checks(self):
        out = []
        if self.r + 1 != self.a * self.d:
            out.append(Violation("r+1=ad", f"r+1 = {self.r + 1} != ad = {self.a * self.d}"))
        if self.d < 2:
            out.append(Violation("r+1=ad where d >= 2", f"d = {self.d} < 2"))
        return out

    def _mult_anchor(self, i):
        return "weight w=(r+1,r,a,1,r+2)"

    def _comparison_weights(self, k=None):
        r, a, d = self.r, self.a, self.d
        ws, omitted = [ComparisonWeight("w1", WeightVector((d, d, 1, 1, d)), "squeeze witness", 1,
                                        Fraction(d, r + 2))], []
        if r > d and a > 1:
            ws.append(ComparisonWeight("w_{a-1}", WeightVector((r - d + 1, r - d, a - 1, 1, r - d + 2)),
                                       "lower-discrepancy comparison", a - 1, Fraction(r - d, r)))
        else:
            omitted.append(("w_{a-1}", "needs r > d and a > 1"))
        return ComparisonWeightSet(self.family, k, tuple(ws), tuple(omitted))


@dataclass(frozen=True)
class CDh1(Presentation):
    """x^2 + xzq(z^2,u) + y^2u + lam yz^(2alpha-1) + p(z^2,u) = 0 in C^4/(1/2)(1,1,1,0).

    Weight (1/2)(r+2, r, a, 2).  Supports q and p are given with their actual
    z-exponents (all even).
    """

    r: int = 1
    a: int = 1
    d: int = 2
    alpha: int = 1
    q: SeriesSupport = EMPTY2
    p: SeriesSupport = EMPTY2
    lam: bool = False

    family: ClassVar[str] = "cDh1"
    dim: ClassVar[int] = 4
    param_names: ClassVar[Tuple[str, ...]] = ("r", "a", "d", "alpha")
    support_names: ClassVar[Tuple[str, ...]] = ("q", "p")
    flag_names: ClassVar[Tuple[str, ...]] = ("lam",)

    @property
    def quotient(self):
        return CyclicQuotient(2, (1, 1, 1, 0))

    def equations(self):
        phi = _support(4, (2, 0, 0, 0), (0, 2, 0, 1)).union(self.p.embed(4, (2, 3)))
        if self.q.terms:
            phi = phi.union(self.q.embed(4, (2, 3)).shifted((1, 0, 1, 0)))
        if self.lam:
            phi = phi.union(_support(4, (0, 1, 2 * self.alpha - 1, 0)))
        return (phi,)

    def prescribed_multiplicities(self):
        return (2 * self.r + 2,)

    def weight_numerators(self):
        return (self.r + 2, self.r, self.a, 2)

    def _checks(self):
        r, a, d = self.r, self.a, self.d
        out = []
        if r + 1 != a * d:
            out.append(Violation("r+1=ad where both a and r are odd", f"r+1 = {r + 1} != ad = {a * d}"))
        if a % 2 == 0 or r % 2 == 0:
            out.append(Violation("r+1=ad where both a and r are odd", f"a = {a}, r = {r}"))
        for name in ("q", "p"):
            if any(t[0] % 2 for t in getattr(self, name).terms):
                out.append(Violation("series in z^2 and u", f"{name} has an odd z-exponent"))
        if (2 * d, 0) not in self.p:
            out.append(Violation("x^2 + eta z^(2d) with eta nonzero", f"z^{2 * d} missing from p"))
        return out

    def _mult_anchor(self, i):
        return "weight w=1/2(r+2,r,a,2)"

    def _comparison_weights(self, k=None):
        r, a, d = self.r, self.a, self.d
        s = d - 1
        ws, omitted = [], []
        if s >= 1:
            ws.append(ComparisonWeight("w'", WeightVector((s + 2, s, 1, 2), 2), "squeeze witness", 1))
        else:
            omitted.append(("w'", "needs d >= 2"))
        if r > 2 * d and a > 2:
            ws.append(ComparisonWeight("w_{a-2}", WeightVector((r - 2 * d + 2, r - 2 * d, a - 2, 2), 2),
                                       "lower-discrepancy comparison", a - 2, Fraction(r - 2 * d, r)))
        else:
            omitted.append(("w_{a-2}", "needs r > 2d and a > 2"))
        return ComparisonWeightSet(self.family, k, tuple(ws), tuple(omitted))


@dataclass(frozen=True)
class CDh2(Presentation):
    """x^2 + yt + p(z^2,u) = yu + z^(2d+1) + q(z^2,u)zu + t = 0 in C^5/(1/2)(1,1,1,0,1).

    Weight (1/2)(r+2, r, a, 2, r+4).
    """

    r: int = 1
    a: int = 1
    d: int = 1
    p: SeriesSupport = EMPTY2
    q: SeriesSupport = EMPTY2

    family: ClassVar[str] = "cDh2"
    dim: ClassVar[int] = 5
    param_names: ClassVar[Tuple[str, ...]] = ("r", "a", "d")
    support_names: ClassVar[Tuple[str, ...]] = ("p", "q")

    @property
    def quotient(self):
        return CyclicQuotient(2, (1, 1, 1, 0, 1))

    def equations(self):
        phi1 = _support(5, (2, 0, 0, 0, 0), (0, 1, 0, 0, 1)).union(self.p.embed(5, (2, 3)))
        phi2 = _support(5, (0, 1, 0, 1, 0), (0, 0, 2 * self.d + 1, 0, 0), (0, 0, 0, 0, 1))
        if self.q.terms:
            phi2 = phi2.union(self.q.embed(5, (2, 3)).shifted((0, 0, 1, 1, 0)))
        return (phi1, phi2)

    def prescribed_multiplicities(self):
        return (2 * self.r + 4, self.r + 2)

    def weight_numerators(self):
        return (self.r + 2, self.r, self.a, 2, self.r + 4)

    def _checks(self):
        r, a, d = self.r, self.a, self.d
        out = []
        if r + 2 != a * (2 * d + 1):
            out.append(Violation("r+2=a(2d+1) where d is a positive integer",
                                 f"r+2 = {r + 2} != a(2d+1) = {a * (2 * d + 1)}"))
        for name in ("q", "p"):
            if any(t[0] % 2 for t in getattr(self, name).terms):
                out.append(Violation("series in z^2 and u", f"{name} has an odd z-exponent"))
        return out

    def _mult_anchor(self, i):
        return "weight w=1/2(r+2,r,a,2,r+4)"

    def _comparison_weights(self, k=None):
        r, a, d = self.r, self.a, self.d
        ws, omitted = [ComparisonWeight("w1", WeightVector((2 * d + 1, 2 * d + 1, 1, 2, 2 * d + 1), 2),
                                        "squeeze witness", 1, Fraction(2 * d + 1, r + 4))], []
        if r > 2 * d + 1 and a > 1:
            ws.append(ComparisonWeight("w_{a-1}",
                                       WeightVector((r - 2 * d + 1, r - 2 * d - 1, a - 1, 2, r - 2 * d + 3), 2),
                                       "lower-discrepancy comparison", a - 1, Fraction(r - 2 * d - 1, r)))
        else:
            omitted.append(("w_{a-1}", "needs r > 2d+1 and a > 1"))
        return ComparisonWeightSet(self.family, k, tuple(ws), tuple(omitted))


FAMILIES = {cls.family: cls for cls in (Smooth, Quotient, CA, CAn, CD1, CD2, CDh1, CDh2)}
SINGULAR_FAMILIES = ("quotient", "cA", "cAn", "cD1", "cD2", "cDh1", "cDh2")

_SUPPORT_DIMS = {("cA", "g"): 2, ("cAn", "g"): 2, ("cD1", "q"): 2, ("cD1", "p"): 3,
                 ("cD2", "p"): 3, ("cD2", "q"): 2, ("cDh1", "q"): 2, ("cDh1", "p"): 2,
                 ("cDh2", "p"): 2, ("cDh2", "q"): 2}


def validate(p: Presentation) -> List[Violation]:
    return p.validate()


def classified_weight(p: Presentation) -> WeightVector:
    return p.classified_weight()


def weighted_discrepancy(p: Presentation, w: WeightVector) -> int:
    return p.weighted_discrepancy(w)


def comparison_weights(p: Presentation, k: Optional[int] = None) -> ComparisonWeightSet:
    return p.comparison_weights(k)


def presentation_from_json(data: dict) -> Presentation:
    data = dict(data)
    try:
        family = data.pop("family")
        cls = FAMILIES[family]
    except KeyError as exc:
        raise StructureError(f"unknown or missing family: {exc}") from exc
    kwargs = {}
    for name in cls.param_names:
        if name in data:
            v = data.pop(name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise StructureError(f"parameter {name} must be an integer, got {v!r}")
            kwargs[name] = v
        elif family not in ("smooth",):
            raise StructureError(f"{family}: missing parameter {name}")
    for name in cls.support_names:
        raw = data.pop(name, [])
        kwargs[name] = SeriesSupport.from_json(raw, dim=_SUPPORT_DIMS[(family, name)])
        if kwargs[name].dim != _SUPPORT_DIMS[(family, name)]:
            raise StructureError(f"{family}.{name} must have dimension {_SUPPORT_DIMS[(family, name)]}")
    for name in cls.flag_names:
        kwargs[name] = bool(data.pop(name, False))
    if data:
        raise StructureError(f"unexpected fields for {family}: {sorted(data)}")
    return cls(**kwargs)
