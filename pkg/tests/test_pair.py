from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from canthresh.classification import CAn, Smooth
from canthresh.numerics import SeriesSupport, WeightVector
from canthresh.pair import (
    BoundedIndex,
    DccSet,
    PairInput,
    PairRecord,
    PreconditionError,
    Representation,
    component_bounds,
    detect_increasing_chain,
    index_dichotomy,
    monotone_weight_compare,
    pair_input_from_json,
    pair_oracle,
    pair_threshold,
)
from canthresh.threshold import brute_force_ct
from canthresh.windows import enumerate_window

S = SeriesSupport.of
F = Fraction
SMALL_CAN = CAn(n=2, b=1, r1=1, r2=9, a=5, d=1, g=S((2, 0)))


def large_can(n):
    # r1 = 1, r2 = n - 1, a = 1, d = 1: a = b r1 mod n holds with b = 1
    return CAn(n=n, b=1, r1=1, r2=n - 1, a=1, d=1, g=S((n, 0), (0, 3)))


def test_pair_threshold_examples():
    assert pair_threshold(5, [(F(1, 2), 2)], [(1, 4)]) == 1
    assert pair_threshold(5, [], [(1, 6)]) == F(5, 6)
    assert pair_threshold(1, [(1, 1)], [(1, 3)]) == 0
    assert pair_threshold(1, [(1, 2)], [(1, 3)]) < 0


def test_component_bounds_examples():
    assert component_bounds(F(1, 2), 1, 2) == (4, 4)
    assert component_bounds(1, 2, 1) == (2, 1)
    assert component_bounds(F(1, 3), F(1, 2), 3) == (6, 12)
    with pytest.raises(ValueError):
        component_bounds(0, 1, 1)


@settings(max_examples=100, deadline=None)
@given(st.fractions(F(1, 20), F(3)), st.fractions(F(1, 20), F(3)), st.integers(1, 10))
def test_component_bounds_formula(i_b, j_b, q):
    assert component_bounds(i_b, j_b, q) == (2 / i_b, 2 * q / j_b)


def test_dcc_set_floor():
    d = DccSet.of(["1/2", "1/3", "1"])
    assert d.floor == F(1, 3)
    assert DccSet.from_json(d.to_json()) == d


def test_bounded_index_branch():
    inp = PairInput(SMALL_CAN, ((F(1, 2), S((1, 0, 0, 0))),), ((F(1), S((0, 1, 0, 0))),), 3)
    out = index_dichotomy(SMALL_CAN, inp)
    assert out == BoundedIndex(2, F(9))


def test_representation_branch():
    p = large_can(10)
    inp = PairInput(p, (), ((F(1), S((0, 0, 2, 0), (12, 0, 0, 0))),), 3)
    out = index_dichotomy(p, inp)
    assert isinstance(out, Representation)
    assert out.t == () and out.l == (2,) and out.value == F(1, 2)
    assert pair_oracle(inp, 12)[0] == F(1, 2)


def test_precondition_failures():
    with pytest.raises(PreconditionError, match="center"):
        PairInput(SMALL_CAN, (), ((F(1), S((0, 0, 0, 0), (0, 1, 0, 0))),), 2).check()
    with pytest.raises(PreconditionError):
        PairInput(SMALL_CAN, (), (), 2).check()
    with pytest.raises(PreconditionError):
        PairInput(SMALL_CAN, (), ((F(-1), S((0, 1, 0, 0))),), 2).check()
    with pytest.raises(PreconditionError, match="1/q"):
        inp = PairInput(SMALL_CAN, ((F(1, 2), S((1, 0, 0, 0))),), ((F(1), S((0, 1, 0, 0))),), 2)
        index_dichotomy(SMALL_CAN, inp)


def test_pair_oracle_without_boundary_is_the_threshold():
    sm = Smooth()
    for f in (S((2, 0, 0), (0, 3, 0), (0, 0, 6)), S((0, 0, 3)), S((1, 1, 0), (0, 0, 5))):
        inp = PairInput(sm, (), ((F(1), f),), 1)
        assert pair_oracle(inp, 8)[0] == brute_force_ct(sm, f, 8, certify=False).value


def record(p, B, Sc, w=None):
    inp = PairInput(p, B, Sc, 2)
    return PairRecord(inp, w or p.classified_weight())


def test_compare_identity():
    r = record(SMALL_CAN, (), ((F(1), S((0, 1, 0, 0), (0, 0, 2, 0))),))
    verdict = monotone_weight_compare(r, r)
    assert verdict.holds and verdict.first_failure is None
    ct_link = verdict.links[-1]
    assert ct_link.lhs == ct_link.rhs


def test_compare_shrinking_support_and_growing_coefficients():
    big = S((0, 1, 0, 0), (0, 0, 2, 0))
    small = S((0, 0, 2, 0))
    ri = record(SMALL_CAN, (), ((F(1), big),))
    rj = record(SMALL_CAN, (), ((F(1), small),))
    assert monotone_weight_compare(ri, rj).holds
    ri = record(SMALL_CAN, ((F(1, 3), S((1, 0, 0, 0))),), ((F(1), small),))
    rj = record(SMALL_CAN, ((F(1, 2), S((1, 0, 0, 0))),), ((F(1), small),))
    verdict = monotone_weight_compare(ri, rj)
    assert verdict.holds
    assert ri.threshold() > rj.threshold()


def test_compare_rejects_violated_hypotheses():
    ri = record(SMALL_CAN, (), ((F(1), S((0, 0, 2, 0))),))
    rj = record(SMALL_CAN, (), ((F(1), S((0, 1, 0, 0))),))
    with pytest.raises(PreconditionError, match="Newton"):
        monotone_weight_compare(ri, rj)
    rj = record(SMALL_CAN, (), ((F(1, 2), S((0, 0, 2, 0))),))
    with pytest.raises(PreconditionError, match="decreases"):
        monotone_weight_compare(ri, rj)


def test_compare_reports_first_failure():
    f = S((0, 1, 0, 0))
    ri = record(SMALL_CAN, (), ((F(1), f),))
    # same data, but X_j is evaluated at a weight that does not compute its threshold
    rj = record(SMALL_CAN, (), ((F(1), f),), WeightVector((1, 1, 1, 2), 2))
    verdict = monotone_weight_compare(ri, rj)
    assert not verdict.holds
    assert verdict.first_failure.name == "value of w^i_j on X_j >= ct_j"


def test_increasing_chain_examples():
    assert detect_increasing_chain([F(5, 6), F(3, 4), F(7, 10)]) is None
    assert detect_increasing_chain([F(1, 3), F(2, 5)]) == (0, 1)
    assert detect_increasing_chain([]) is None
    for fam in ("smooth", "cA", "cD1"):
        assert detect_increasing_chain([r.value for r in enumerate_window(fam, 3)]) is None


def test_pair_input_json():
    doc = {"presentation": SMALL_CAN.to_json(), "q": 3,
           "B": [{"coefficient": "1/2", "support": [[1, 0, 0, 0]]}],
           "S": [{"coefficient": "1", "support": [[0, 1, 0, 0]]}]}
    inp = pair_input_from_json(doc)
    assert inp.q == 3 and inp.B[0][0] == F(1, 2) and inp.S[0][1] == S((0, 1, 0, 0))
