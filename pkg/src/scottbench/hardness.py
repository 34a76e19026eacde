"""Hardness constructions at desk scale.

* Daisy bunches built from a symbolic enumeration W: center c_i carries one
  petal (a cycle through the center) of length k+3 for each k in W when
  i is in W; otherwise one petal of length i+3 plus petals k+3 for the k < i
  in W.
* Coded structures: a graph A is coded by unary U (a copy of A's domain),
  unary V, ternary c0/c1 sorting V into classes V(x, y, i) and a binary R
  placing a copy of G or H on each class.  G and H come from a finite
  surrogate pair, equivalent at level k for extensions of at most ``ext``
  new elements.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .backforth import BackForth, bf_le
from .core import (GRAPH, Signature, Structure, automorphisms, canonical_form,
                   disjoint_union, enumerate_structures, find_embedding, find_isomorphism, graph, induced,
                   is_isomorphic, positive_atoms)
from .scott import scott_rank


class HardnessError(ValueError):
    pass


# ---------------------------------------------------------------- enumerated sets

class EnumeratedSet:
    """A symbolic set of naturals: finite, cofinite or eventually periodic.

    ``periodic`` contains every n below the threshold and, from the threshold
    on, the n whose residue mod the modulus is listed.  Stage s enumerates the
    members up to s.
    """

    def __init__(self, kind, values=(), modulus=None, threshold=0):
        if kind not in ("finite", "cofinite", "periodic"):
            raise HardnessError(f"unknown set kind {kind!r}")
        self.kind = kind
        self.values = tuple(sorted(set(values)))
        if any(v < 0 for v in self.values):
            raise HardnessError("set elements must be natural numbers")
        self.modulus = modulus
        self.threshold = threshold
        if kind == "periodic":
            if not modulus or modulus < 1:
                raise HardnessError("periodic sets need a positive modulus")
            if any(r >= modulus for r in self.values):
                raise HardnessError("residues must be below the modulus")
            if threshold < 0:
                raise HardnessError("threshold must be a natural number")

    @classmethod
    def parse(cls, text):
        text = text.strip()
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        rest = rest.strip()
        if kind in ("finite", "cofinite"):
            try:
                values = [int(v) for v in rest.split(",") if v.strip()]
            except ValueError:
                raise HardnessError(f"bad set description {text!r}") from None
            return cls(kind, values)
        if kind == "periodic":
            modulus, residues, threshold = None, [], 0
            for part in rest.split(","):
                m = re.fullmatch(r"\s*([mrt])\s*=\s*(\d+)\s*", part)
                if not m:
                    raise HardnessError(f"bad periodic field {part!r}")
                key, val = m.group(1), int(m.group(2))
                if key == "m":
                    modulus = val
                elif key == "r":
                    residues.append(val)
                else:
                    threshold = val
            return cls("periodic", residues, modulus, threshold)
        raise HardnessError(f"bad set description {text!r}")

    def __str__(self):
        if self.kind == "periodic":
            parts = [f"m={self.modulus}"] + [f"r={r}" for r in self.values] + [f"t={self.threshold}"]
            return "periodic:" + ",".join(parts)
        return f"{self.kind}:" + ",".join(map(str, self.values))

    def __contains__(self, n):
        if self.kind == "finite":
            return n in self.values
        if self.kind == "cofinite":
            return n not in self.values
        return n < self.threshold or n % self.modulus in self.values

    def stage(self, s):
        return frozenset(n for n in range(s + 1) if n in self)

    def is_cofinite(self):
        if self.kind == "finite":
            return False
        if self.kind == "cofinite":
            return True
        return len(self.values) == self.modulus

    def excluded(self):
        """The finitely many non-members of a cofinite set."""
        if not self.is_cofinite():
            raise HardnessError("set is not cofinite")
        if self.kind == "cofinite":
            return list(self.values)
        return []

    def escape(self, above):
        """The least non-member b with b > above (coinfinite sets only)."""
        if self.is_cofinite():
            raise HardnessError("set is cofinite")
        b = above + 1
        while b in self:
            b += 1
        return b


# ---------------------------------------------------------------- daisies

@dataclass
class DaisyBunch:
    structure: Structure
    centers: list
    petals: dict  # center index -> list of petal lengths

    def vertex_count(self):
        return len(self.centers) + sum(length - 1 for ls in self.petals.values() for length in ls)


def petal_lengths(members, i):
    if i in members:
        return sorted(k + 3 for k in members)
    return sorted([i + 3] + [k + 3 for k in members if k < i])


def daisy_bunch(W, centers, stage):
    """The stage-s graph: centers 0..centers-1, then petal vertices in order."""
    if 0 not in W:
        raise HardnessError("0 must belong to W")
    members = W.stage(stage)
    edges = []
    n = centers
    petals = {}
    for i in range(centers):
        petals[i] = petal_lengths(members, i)
        for length in petals[i]:
            ring = [i] + list(range(n, n + length - 1))
            n += length - 1
            edges += [(ring[j], ring[(j + 1) % length]) for j in range(length)]
    return DaisyBunch(graph(n, edges), list(range(centers)), petals)


@dataclass
class DaisyClass:
    rank: int
    certificate: list


def classify_daisy(W, sweep=6):
    """Rank 1 exactly when W is cofinite, with the witnesses of either case."""
    if W.is_cofinite():
        out = W.excluded()
        b = max(out, default=-1) + 1
        lines = [f"bound b={b}"]
        for i in out:
            lines.append(f"c_{i}: the only center with a petal of length {i + 3}")
        lines.append(f"centers indexed in W: centers with a petal of length {b + 3}")
        lines.append("tuples: a center formula plus the petals holding the tuple")
        return DaisyClass(1, lines)
    lines = []
    for s in range(1, sweep + 1):
        b = W.escape(max(0, s - 3))
        lines.append(f"size {s}: escape b={b} (not in W, petal {b + 3} > {s})")
    return DaisyClass(2, lines)


def _daisy_of(bunch, i):
    """Vertices of the daisy around center i, center first."""
    start = len(bunch.centers) + sum(length - 1 for j in range(i) for length in bunch.petals[j])
    size = sum(length - 1 for length in bunch.petals[i])
    return [i] + list(range(start, start + size))


def daisy_probe(W, sweep=6):
    """Rank read off stage graphs by the two directions of the argument.

    Cofinite W: past the bound b, the W-indexed centers are exactly those
    with a petal of length b+3 and each excluded c_i is the only center with
    a petal of length i+3.  Coinfinite W: for every size s up to ``sweep``
    the part of c_0's daisy with petals shorter than b+3 embeds into c_b's
    daisy, center to center, while c_b has a petal of length b+3 and c_0 has
    none.
    """
    if W.is_cofinite():
        b = max(W.excluded(), default=-1) + 1
        bunch = daisy_bunch(W, b + 2, b + 2)
        for i in range(b + 2):
            has_b = (b + 3) in bunch.petals[i]
            if has_b != (i in W):
                return 2
            if i not in W:
                own = [j for j in range(b + 2) if (i + 3) in bunch.petals[j]]
                if own != [i]:
                    return 2
        return 1
    for s in range(1, sweep + 1):
        b = W.escape(max(0, s - 3))
        bunch = daisy_bunch(W, b + 1, b)
        S = bunch.structure
        small = [length for length in bunch.petals[0] if length < b + 3]
        sub = daisy_bunch_from_petals(small)
        target = induced(S, _daisy_of(bunch, b))
        if find_embedding(sub, target, (0,), (0,)) is None:
            return 1
        if (b + 3) not in bunch.petals[b] or (b + 3) in bunch.petals[0]:
            return 1
    return 2


def daisy_bunch_from_petals(lengths):
    edges = []
    n = 1
    for length in lengths:
        ring = [0] + list(range(n, n + length - 1))
        n += length - 1
        edges += [(ring[j], ring[(j + 1) % length]) for j in range(length)]
    return graph(n, edges)


# ---------------------------------------------------------------- surrogate pairs

@dataclass
class SurrogatePair:
    G: Structure
    H: Structure
    k: int
    ext: int
    rigid: bool = False

    def describe(self):
        return (f"G: {self.G.n} vertices {sorted(self.G.edges())}\n"
                f"H: {self.H.n} vertices {sorted(self.H.edges())}\n"
                f"level {self.k}, extensions of at most {self.ext} elements, "
                f"rigid: {'yes' if self.rigid else 'no'}")


def equivalent(G, H, k, ext):
    return bf_le(G, (), H, (), k, M=ext) and bf_le(H, (), G, (), k, M=ext)


def find_surrogate_pair(k, max_size, ext=2):
    """Least non-isomorphic G, H with G and H equivalent at level k.

    Pairs are ordered by total size, then rigid pairs first, then by the
    size of G and the canonical forms.  Equivalence is tested with extended
    tuples of at most ``ext`` elements.
    """
    by_size = {}

    def graphs(n):
        if n not in by_size:
            by_size[n] = sorted(enumerate_structures(GRAPH, n), key=canonical_form)
        return by_size[n]

    rigid = {}

    def is_rigid(S):
        key = canonical_form(S)
        if key not in rigid:
            rigid[key] = len(automorphisms(S)) == 1
        return rigid[key]

    for total in range(2, max_size + 1):
        found = []
        for g in range(1, total // 2 + 1):
            h = total - g
            for G in graphs(g):
                for H in graphs(h):
                    if g == h and canonical_form(G) >= canonical_form(H):
                        continue
                    if is_isomorphic(G, H) or not equivalent(G, H, k, ext):
                        continue
                    found.append(SurrogatePair(G, H, k, ext, is_rigid(G) and is_rigid(H)))
        if found:
            rigid_first = [p for p in found if p.rigid] or found
            return rigid_first[0]
    raise HardnessError(f"no level-{k} pair with total size at most {max_size}")


# ---------------------------------------------------------------- coding

CODED = Signature([("U", 1), ("V", 1), ("R", 2), ("c0", 3), ("c1", 3)])


@dataclass
class CodedStructure:
    """B together with its layout: element -> ("u", x) or ("v", x, y, i, copy, vertex)."""
    structure: Structure
    source: Structure
    pair: SurrogatePair
    width: int
    layout: list
    classes: dict = field(default_factory=dict)  # (x, y, i) -> element list

    def class_graph(self, key):
        return self.pair.G if carries_g(self.source, key) else self.pair.H


def carries_g(A, key):
    x, y, i = key
    edge = A.holds("E", (x, y))
    return (edge and i == 1) or (not edge and i == 0)


def code_structure(A, pair, width=1):
    if width < 1:
        raise HardnessError("width must be at least 1")
    if A.sig.symbols != (("E", 2),):
        raise HardnessError("only graphs can be coded")
    layout = [("u", x) for x in range(A.n)]
    rels = {"U": [(x,) for x in range(A.n)], "V": [], "R": [], "c0": [], "c1": []}
    classes = {}
    for x, y in itertools.permutations(range(A.n), 2):
        for i in (0, 1):
            key = (x, y, i)
            C = pair.G if carries_g(A, key) else pair.H
            members = []
            for copy in range(width):
                base = len(layout)
                for w in range(C.n):
                    layout.append(("v", x, y, i, copy, w))
                    members.append(base + w)
                    rels["V"].append((base + w,))
                    rels[f"c{i}"].append((base + w, x, y))
                for u, v in C.edges():
                    rels["R"] += [(base + u, base + v), (base + v, base + u)]
            classes[key] = members
    B = Structure(CODED, len(layout), rels)
    return CodedStructure(B, A, pair, width, layout, classes)


class CodedOrbits:
    """Orbit keys for tuples of a coded structure.

    The group used is generated by automorphisms of A (acting on U and on the
    class indices) and by automorphisms and permutations of the copies inside
    each class.  It is a subgroup of the automorphism group of B, so equal keys
    imply automorphic tuples.
    """

    def __init__(self, coded):
        self.coded = coded
        self.autA = automorphisms(coded.source)
        self.autG = automorphisms(coded.pair.G)
        self.autH = automorphisms(coded.pair.H)
        self._memo = {}

    def key(self, t):
        hit = self._memo.get(t)
        if hit is not None:
            return hit
        best = None
        for pi in self.autA:
            cand = self._under(t, pi)
            if best is None or cand < best:
                best = cand
        self._memo[t] = best
        return best

    def _under(self, t, pi):
        layout = self.coded.layout
        A = self.coded.source
        groups = {}
        for pos, e in enumerate(t):
            item = layout[e]
            if item[0] == "v":
                _, x, y, i, copy, w = item
                groups.setdefault((pi[x], pi[y], i, copy), []).append((pos, w))
        vertex = {}
        rank = {}
        for (x, y, i, copy), items in groups.items():
            aut = self.autG if carries_g(A, (x, y, i)) else self.autH
            ws = [w for _, w in items]
            best = min(tuple(g[w] for w in ws) for g in aut)
            for (pos, _), w in zip(items, best):
                vertex[pos] = w
        out = []
        for pos, e in enumerate(t):
            item = layout[e]
            if item[0] == "u":
                out.append((0, pi[item[1]]))
            else:
                _, x, y, i, copy, w = item
                cls = (pi[x], pi[y], i)
                r = rank.setdefault((cls, copy), sum(1 for c in rank if c[0] == cls))
                out.append((1,) + cls + (r, vertex[pos]))
        return tuple(out)


class OrbitBF:
    """``<=_n`` inside one structure, deduplicated by orbit keys.

    Extended tuples have total length at most M, as in ``BackForth``.  The
    universal side runs over one extension per orbit of the stabilizer of b
    and the existential side over one extension per orbit of the stabilizer
    of a; both relations are invariant under those groups.
    """

    def __init__(self, S, key, M):
        self.S = S
        self.key = key
        self.M = M
        self._ext = {}
        self._memo = {}
        self._atoms = {}

    def atoms(self, t):
        k = self.key(t)
        hit = self._atoms.get(k)
        if hit is None:
            hit = self._atoms[k] = positive_atoms(self.S, t)
        return hit

    def extensions(self, t):
        k0 = self.key(t)
        hit = self._ext.get(k0)
        if hit is None:
            hit = {}
            seen = set()
            rest = [e for e in range(self.S.n) if e not in t]
            for size in range(0, self.M - len(t) + 1):
                for d in itertools.permutations(rest, size):
                    td = t + d
                    kk = self.key(td)
                    if kk not in seen:
                        seen.add(kk)
                        hit.setdefault(size, []).append(td)
            self._ext[k0] = hit
        return hit

    def le(self, a, b, n):
        a, b = tuple(a), tuple(b)
        memo_key = (self.key(a), self.key(b), n)
        hit = self._memo.get(memo_key)
        if hit is None:
            hit = self._le(a, b, n)
            self._memo[memo_key] = hit
        return hit

    def _le(self, a, b, n):
        if self.atoms(a) != self.atoms(b):
            return False
        if n == 0:
            return True
        mine = self.extensions(a)
        if n == 1:
            # level 0 only compares atoms
            for size, bds in self.extensions(b).items():
                have = {self.atoms(ac) for ac in mine.get(size, ())}
                if any(self.atoms(bd) not in have for bd in bds):
                    return False
            return True
        for size, bds in self.extensions(b).items():
            for bd in bds:
                for beta in range(1, n):
                    if not any(self.le(bd, ac, beta) for ac in mine.get(size, ())):
                        return False
        return True


@dataclass
class CodingReport:
    pairs: int = 0
    checks: dict = field(default_factory=dict)  # item -> number of comparisons
    violations: list = field(default_factory=list)

    def count(self, item):
        return sum(1 for v in self.violations if v[0] == item)

    def text(self, limit=10):
        lines = [f"tuple pairs: {self.pairs}"]
        for item in sorted(self.checks):
            lines.append(f"item {item}: {self.checks[item]} checks, {self.count(item)} violations")
        for v in self.violations[:limit]:
            item, level, b1, b2, lhs, rhs = v
            lines.append(f"violation {item} level {level}: {b1} vs {b2}: coded {lhs}, "
                         f"predicted {rhs}")
        if len(self.violations) > limit:
            lines.append(f"... {len(self.violations) - limit} more")
        return "\n".join(lines)


def _v_options(coded, a, max_v):
    pool = []
    for x, y in itertools.permutations(a, 2):
        for i in (0, 1):
            pool += coded.classes[(x, y, i)]
    pool.sort()
    out = []
    for lv in range(0, max_v + 1):
        out.extend(itertools.permutations(pool, lv))
    return out


def _position_key(coded, a, e):
    """Class of e as (position of x in a, position of y in a, i)."""
    _, x, y, i, _, _ = coded.layout[e]
    return (a.index(x), a.index(y), i)


def _corresponding(coded, a, v, a2):
    """Tuples v' of a2's classes matching v class by class, distinct entries."""
    pools = []
    for e in v:
        p, q, i = _position_key(coded, a, e)
        pools.append(coded.classes[(a2[p], a2[q], i)])
    for v2 in itertools.product(*pools):
        if len(set(v2)) == len(v2):
            yield v2


def verify_coding_bf(A, pair, m=2, width=1, max_v=1):
    """Compare the coded relations with the predicted ones on every tuple pair.

    Tuples are a v with a distinct elements of A and v at most ``max_v``
    elements of classes indexed by pairs from a.  Pairs a v, a' v' are
    compared when each entry of v' lies in the class of a' matching the class
    of the entry of v.  Item (a) is level 1; item (b) covers levels 2..m.
    Relations on B allow ``pair.ext`` new elements beyond the compared tuples.
    """
    if A.n > 3 or m > 3:
        raise HardnessError("coding checks are limited to |A| <= 3 and m <= 3")
    coded = code_structure(A, pair, width)
    B = coded.structure
    orbits = CodedOrbits(coded)
    engines = {}
    local = {}
    report = CodingReport()
    bfA = BackForth(A, A)
    members = {key: {e: j for j, e in enumerate(es)} for key, es in coded.classes.items()}
    shapes = {True: disjoint_union(*[pair.G] * width), False: disjoint_union(*[pair.H] * width)}

    def pieces(a, v, a2, v2):
        """(G-or-H flag, pointed tuple) for each class met by v, with its partner."""
        groups = {}
        for e, e2 in zip(v, v2):
            p, q, i = _position_key(coded, a, e)
            k1, k2 = (a[p], a[q], i), (a2[p], a2[q], i)
            g = groups.setdefault((p, q, i), [carries_g(A, k1), carries_g(A, k2), [], []])
            g[2].append(members[k1][e])
            g[3].append(members[k2][e2])
        return [(f1, tuple(s1), f2, tuple(s2)) for f1, f2, s1, s2 in groups.values()]

    def class_le(f1, s1, f2, s2):
        key = ("le", f1, s1, f2, s2)
        if key not in local:
            local[key] = bf_le(shapes[f1], s1, shapes[f2], s2, 1, M=len(s1) + pair.ext)
        return local[key]

    def class_iso(f1, s1, f2, s2):
        key = ("iso", f1, s1, f2, s2)
        if key not in local:
            local[key] = find_isomorphism(shapes[f1], shapes[f2], s1, s2) is not None
        return local[key]

    for la in range(1, A.n + 1):
        a_tuples = list(itertools.permutations(range(A.n), la))
        for a in a_tuples:
            for v in _v_options(coded, a, max_v):
                size = la + len(v)
                eng = engines.get(size)
                if eng is None:
                    eng = engines[size] = OrbitBF(B, orbits.key, size + pair.ext)
                for a2 in a_tuples:
                    for v2 in _corresponding(coded, a, v, a2):
                        report.pairs += 1
                        parts = pieces(a, v, a2, v2)
                        lhs = eng.le(a + v, a2 + v2, 1)
                        rhs = all(class_le(*p) for p in parts)
                        report.checks["a"] = report.checks.get("a", 0) + 1
                        if lhs != rhs:
                            report.violations.append(("a", 1, a + v, a2 + v2, lhs, rhs))
                        for level in range(2, m + 1):
                            lhs = eng.le(a + v, a2 + v2, level)
                            rhs = all(class_iso(*p) for p in parts) and bfA.le(a, a2, level - 1)
                            report.checks["b"] = report.checks.get("b", 0) + 1
                            if lhs != rhs:
                                report.violations.append(("b", level, a + v, a2 + v2, lhs, rhs))
    return report


@dataclass
class RankShift:
    source_rank: int
    coded_rank: int

    @property
    def ok(self):
        return self.coded_rank == self.source_rank + 1

    def text(self):
        verdict = "pass" if self.ok else "fail (surrogate limitation)"
        return (f"SR(A)={self.source_rank} SR(B)={self.coded_rank} "
                f"expected {self.source_rank + 1}: {verdict}")


def rank_shift(A, pair, width=1):
    coded = code_structure(A, pair, width)
    return RankShift(scott_rank(A), scott_rank(coded.structure))


def check_structure_sizes(A, pair, width):
    """|B| against the bound |A| + 2|A|(|A|-1) width max(|G|, |H|)."""
    B = code_structure(A, pair, width).structure
    bound = A.n + 2 * A.n * (A.n - 1) * width * max(pair.G.n, pair.H.n)
    return B.n <= bound

