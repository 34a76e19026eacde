"""Back-and-forth relations between tuples of two finite structures.

``(S, a) <=_n (T, b)`` is the usual asymmetric relation:

* level 0: a and b have the same atomic type;
* level 1: every existential formula true of b in T is true of a in S, i.e.
  every extension ``b d`` (of length at most M) has its atomic type realized by
  some ``a c``;
* level n >= 2: for every extension ``b d`` and every 1 <= k < n there is
  ``a c`` with ``(T, b d) <=_k (S, a c)``.

Extensions use distinct elements not already in the tuple.  ``M`` bounds the
length of extended tuples and defaults to the larger domain size.  When M is
at least both domain sizes only the maximal extension matters (relations are
closed under sub-tuples), which gives the fast path used by ``bf_le``.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor

from .core import find_embedding, iter_embeddings, positive_atoms


class BFError(ValueError):
    pass


# A table with more tuple pairs than this is refused rather than truncated.
MAX_TABLE_PAIRS = 400_000


def _normalize(S, a, T, b):
    a, b = tuple(a), tuple(b)
    if len(a) > len(b):
        raise BFError("left tuple longer than right tuple")
    for X, t in ((S, a), (T, b)):
        if len(set(t)) != len(t) or any(not 0 <= e < X.n for e in t):
            raise BFError(f"bad tuple {t}")
    # the right tuple is cut to the length of the left one
    return a, b[:len(a)]


def extensions(X, t, max_len):
    """Distinct-element extensions of t of total length at most max_len."""
    rest = [e for e in range(X.n) if e not in t]
    for k in range(0, max(0, max_len - len(t)) + 1):
        for d in itertools.permutations(rest, k):
            yield t + d


class BackForth:
    """Memoized ``<=_n`` between tuples of S and tuples of T (both directions)."""

    def __init__(self, S, T, M=None):
        if S.sig != T.sig:
            raise BFError("structures have different signatures")
        self.S, self.T = S, T
        self.M = max(S.n, T.n) if M is None else M
        self.closed = self.M >= max(S.n, T.n)
        self._memo = {}

    def le(self, a, b, n):
        a, b = _normalize(self.S, a, self.T, b)
        if n < 0:
            raise BFError("level must be non-negative")
        if len(a) > self.M:
            raise BFError("tuple longer than the extension bound")
        return self._le(True, a, b, n)

    def _sides(self, forward):
        return (self.S, self.T) if forward else (self.T, self.S)

    def _le(self, forward, a, b, n):
        key = (forward, a, b, n)
        hit = self._memo.get(key)
        if hit is None:
            X, Y = self._sides(forward)
            if positive_atoms(X, a) != positive_atoms(Y, b):
                hit = False
            elif n == 0:
                hit = True
            elif self.closed:
                hit = self._closed(forward, X, Y, a, b, n)
            else:
                hit = self._bounded(forward, X, Y, a, b, n)
            self._memo[key] = hit
        return hit

    def _closed(self, forward, X, Y, a, b, n):
        if n == 1:
            return find_embedding(Y, X, b, a) is not None
        d = tuple(e for e in range(Y.n) if e not in b)
        # relations are antitone here, so level n-1 is the binding one
        for f in iter_embeddings(Y, X, b, a):
            c = tuple(f[e] for e in d)
            if self._le(not forward, b + d, a + c, n - 1):
                return True
        return False

    def _bounded(self, forward, X, Y, a, b, n):
        levels = [0] if n == 1 else range(1, n)
        for bd in extensions(Y, b, self.M):
            k = len(bd) - len(b)
            for beta in levels:
                found = False
                for ac in extensions(X, a, len(a) + k):
                    if len(ac) == len(bd) and self._le(not forward, bd, ac, beta):
                        found = True
                        break
                if not found:
                    return False
        return True


def bf_le(S, a, T, b, n, M=None):
    """Whether (S, a) <=_n (T, b)."""
    return BackForth(S, T, M).le(a, b, n)


# ---------------------------------------------------------------- tables

class BFTable:
    """Frozen ``<=_n`` values for n <= N over equal-length tuples of length <= M."""

    def __init__(self, S, T, N, M, levels):
        self.S, self.T, self.N, self.M = S, T, N, M
        self._levels = levels  # levels[n][(forward, a, b)] -> bool

    def get(self, a, b, n):
        a, b = _normalize(self.S, a, self.T, b)
        if n > self.N:
            raise BFError(f"level {n} exceeds table bound {self.N}")
        if len(a) > self.M:
            raise BFError("tuple longer than the table bound")
        return self._levels[n][(True, a, b)]

    def entries(self):
        """(n, a, b, value) for the S-to-T direction in a fixed order."""
        out = []
        for n in range(self.N + 1):
            level = self._levels[n]
            for key in sorted(k for k in level if k[0]):
                out.append((n, key[1], key[2], level[key]))
        return out

    def to_csv(self):
        lines = ["n,a,b,value"]
        for n, a, b, v in self.entries():
            lines.append(f"{n},{' '.join(map(str, a))},{' '.join(map(str, b))},{str(v).lower()}")
        return "\n".join(lines) + "\n"


def _tuples(X, M):
    out = []
    for k in range(min(M, X.n) + 1):
        out.extend(itertools.permutations(range(X.n), k))
    return out


def bf_table(S, T, N, M=None, jobs=1):
    """Compute ``<=_n`` bottom-up for n = 0..N from the literal definition."""
    if S.sig != T.sig:
        raise BFError("structures have different signatures")
    M = max(S.n, T.n) if M is None else M
    ts, tt = _tuples(S, M), _tuples(T, M)
    by_len_s, by_len_t = {}, {}
    for t in ts:
        by_len_s.setdefault(len(t), []).append(t)
    for t in tt:
        by_len_t.setdefault(len(t), []).append(t)
    keys = []
    for k in by_len_s:
        for a in by_len_s[k]:
            for b in by_len_t.get(k, ()):
                keys.append((True, a, b))
                keys.append((False, b, a))
    if len(keys) * (N + 1) > MAX_TABLE_PAIRS:
        raise BFError(f"table needs {len(keys) * (N + 1)} entries, bound is {MAX_TABLE_PAIRS}")
    side = {True: (S, T), False: (T, S)}
    atoms = {}
    for X, tuples in ((S, ts), (T, tt)):
        for t in tuples:
            atoms[(id(X), t)] = positive_atoms(X, t)

    level0 = {}
    for key in keys:
        fwd, a, b = key
        X, Y = side[fwd]
        level0[key] = atoms[(id(X), a)] == atoms[(id(Y), b)]
    levels = [level0]

    def entry(key, n):
        fwd, a, b = key
        X, Y = side[fwd]
        if not level0[key]:
            return False
        betas = [0] if n == 1 else range(1, n)
        for bd in extensions(Y, b, M):
            for beta in betas:
                prev = levels[beta]
                if not any(prev[(not fwd, bd, ac)] for ac in extensions(X, a, len(bd))
                           if len(ac) == len(bd)):
                    return False
        return True

    for n in range(1, N + 1):
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                values = list(pool.map(lambda key: entry(key, n), keys))
        else:
            values = [entry(key, n) for key in keys]
        levels.append(dict(zip(keys, values)))
    return BFTable(S, T, N, M, levels)


def stabilization_level(S, T, M=None, limit=None):
    """Least n with the level-n and level-(n+1) tables equal."""
    limit = limit if limit is not None else 2 * (max(S.n, T.n) + 2)
    table = bf_table(S, T, limit, M)
    for n in range(limit):
        if table._levels[n] == table._levels[n + 1]:
            return n
    raise BFError("no stabilization within the level limit")


# ---------------------------------------------------------------- Sigma_1 oracle

def _diagram(X, t):
    """True atoms of t as (name, positions), computed by brute force."""
    out = set()
    for name, arity in X.sig:
        for pos in itertools.product(range(len(t)), repeat=arity):
            if X.holds(name, [t[i] for i in pos]):
                out.add((name, pos))
    return frozenset(out)


def sigma1_oracle(S, a, T, b):
    """Whether every existential property of b in T holds of a in S.

    Collects the atomic types of all extensions of b in T and checks that each
    one is realized by an extension of a in S.
    """
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        raise BFError("tuples must have the same length")
    need = {}
    rest_t = [e for e in range(T.n) if e not in b]
    for k in range(len(rest_t) + 1):
        for d in itertools.permutations(rest_t, k):
            need.setdefault(k, set()).add(_diagram(T, b + d))
    rest_s = [e for e in range(S.n) if e not in a]
    for k, types in need.items():
        have = {_diagram(S, a + c) for c in itertools.permutations(rest_s, k)}
        if not types <= have:
            return False
    return True
