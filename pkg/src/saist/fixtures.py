"""Toy symbolic-dynamics providers for the generic limit-average engine.

Each provider exposes the set of length-l output words of some concrete
system plus a callback deciding whether a periodic word is a true behavior.
"""

import math


class DoublingMap:
    """Binary shift: every word is feasible and every periodic word realizable."""

    alphabet = (0, 1)

    def words(self, l):
        out = []

        def rec(w):
            if len(w) == l:
                out.append(w)
                return
            for a in self.alphabet:
                rec(w + (a,))

        rec(())
        return out

    def verify(self, word):
        return True


class EqualRunsWord:
    """Closure of the sequences 1^n 2^n 1^n 2^n ...; mean 1.5 but every window
    set contains 1^l, so finite models always report 1."""

    alphabet = (1, 2)

    def words(self, l):
        out = set()
        for n in range(1, l + 1):
            period = (1,) * n + (2,) * n
            stream = period * (l // len(period) + 2)
            for i in range(len(period)):
                out.add(tuple(stream[i : i + l]))
        return sorted(out)

    def verify(self, word):
        # word^w must be a shift of (1^n 2^n)^w for some n
        m = len(word)
        for n in range(1, m + 1):
            base = (1,) * n + (2,) * n
            p = 2 * n
            span = math.lcm(m, p)
            for s in range(p):
                if all(word[i % m] == base[(i + s) % p] for i in range(span)):
                    return True
        return False


class IrrationalRotation:
    """Circle rotation by `a` with output 1 on the wrap arc [1-a, 1).

    Output streams are Sturmian with density a; no output sequence is
    periodic, so verification always fails and only bounds are produced.
    """

    alphabet = (0, 1)

    def __init__(self, a):
        if not (0.0 < a < 1.0):
            raise ValueError("rotation parameter must lie in (0, 1)")
        self.a = a

    def _word_from(self, x, l):
        w = []
        for _ in range(l):
            w.append(1 if x >= 1.0 - self.a else 0)
            x = (x + self.a) % 1.0
        return tuple(w)

    def words(self, l):
        cuts = {0.0}
        for j in range(l + 1):
            cuts.add((-j * self.a) % 1.0)
            cuts.add((1.0 - self.a - j * self.a) % 1.0)
        cuts = sorted(cuts)
        cuts.append(1.0)
        out = set()
        for lo, hi in zip(cuts, cuts[1:]):
            if hi - lo > 1e-15:
                out.add(self._word_from(0.5 * (lo + hi), l))
        return sorted(out)

    def verify(self, word):
        return False
