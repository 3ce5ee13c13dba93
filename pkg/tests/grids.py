"""Grids of valid presentations, one list per family."""
from math import gcd

from canthresh.classification import CA, CAn, CD1, CD2, CDh1, CDh2, Quotient, Smooth
from canthresh.numerics import SeriesSupport

S = SeriesSupport.of


def grid(family):
    out = []
    if family == "smooth":
        out = [Smooth(alpha=a, beta=b) for a in range(1, 30) for b in range(a + 1, 30) if gcd(a, b) == 1]
    elif family == "quotient":
        out = [Quotient(n=n, b=b) for n in range(2, 40) for b in range(1, n) if gcd(n, b) == 1]
    elif family == "cA":
        out = [CA(r1=r1, r2=a * d - r1, a=a, d=d, g=S((d, 0), (0, a * d)))
               for a in range(1, 12) for d in range(1, 6) for r1 in range(1, a * d)]
    elif family == "cAn":
        for n in range(2, 6):
            for b in range(1, n):
                for a in range(1, 25):
                    for d in range(1, 4):
                        for r1 in range(1, a * d * n):
                            p = CAn(n=n, b=b, r1=r1, r2=a * d * n - r1, a=a, d=d, g=S((d * n, 0)))
                            if p.is_valid():
                                out.append(p)
    elif family == "cD1":
        out = [CD1(r=(a * d - 1) // 2, a=a, d=d, p=S((0, d, 0)))
               for a in range(1, 60, 2) for d in range(3, 20, 2)]
    elif family == "cD2":
        out = [CD2(r=a * d - 1, a=a, d=d) for a in range(1, 30) for d in range(2, 12)]
    elif family == "cDh1":
        out = [CDh1(r=a * d - 1, a=a, d=d, p=S((2 * d, 0))) for a in range(1, 80, 2) for d in range(2, 20, 2)]
    elif family == "cDh2":
        out = [CDh2(r=a * (2 * d + 1) - 2, a=a, d=d) for a in range(1, 30) for d in range(1, 12)]
    return [p for p in out if p.is_valid()]
