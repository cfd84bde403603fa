import math
from fractions import Fraction

from saist import generic_limavg
from saist.fixtures import DoublingMap, EqualRunsWord, IrrationalRotation


def test_doubling_words_complete():
    d = DoublingMap()
    assert len(d.words(3)) == 8
    assert d.verify((0, 1, 1))


def test_doubling_verified_immediately():
    rep = generic_limavg(DoublingMap(), l_max=4)
    assert rep.verified
    assert rep.l_reached == 1
    assert rep.saist_lower == 0
    assert rep.sac_word == (0,)


def test_equal_runs_windows():
    e = EqualRunsWord()
    w2 = e.words(2)
    assert (1, 1) in w2 and (1, 2) in w2 and (2, 1) in w2 and (2, 2) in w2
    assert (1,) * 5 in e.words(5)


def test_equal_runs_verify():
    e = EqualRunsWord()
    assert e.verify((1, 2))
    assert e.verify((1, 1, 2, 2))
    assert e.verify((2, 1, 1, 2))  # a rotation
    assert not e.verify((1,))
    assert not e.verify((1, 1, 2))


def test_equal_runs_never_verifies():
    rep = generic_limavg(EqualRunsWord(), l_max=8)
    assert not rep.verified
    assert rep.saist_lower == 1  # the 1^l window forms a spurious cheap cycle
    for it in rep.iterations:
        assert it["value"] == 1 and not it["verified"]


def test_rotation_value_sequence():
    # the depth-l value is the monotone envelope of floor(l*a)/l: the raw
    # formula is non-monotone and cannot equal a simulation-chain value at
    # every l (see notes in the acceptance suite)
    a = 1.0 / math.sqrt(2.0)
    rep = generic_limavg(IrrationalRotation(a), l_max=12)
    assert not rep.verified
    values = {it["l"]: it["value"] for it in rep.iterations}
    envelope = Fraction(0)
    for l in range(1, 13):
        envelope = max(envelope, Fraction(math.floor(l * a), l))
        assert values[l] == envelope, l
    # exact agreement with floor(l*a)/l at the denominators where the
    # envelope refreshes
    for l in (1, 2, 3, 6, 9, 10):
        assert values[l] == Fraction(math.floor(l * a), l)


def test_rotation_words_are_sturmian():
    rot = IrrationalRotation(1.0 / math.sqrt(2.0))
    for l in (1, 2, 5, 9):
        ws = rot.words(l)
        # a Sturmian language has exactly l+1 distinct windows of length l
        assert len(ws) == l + 1
