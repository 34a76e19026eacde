"""Finite relational structures and the combinatorics around them.

Structures are immutable.  Elements are the integers ``0..n-1`` and every
relation is a frozenset of argument tuples.  The graph signature is the single
binary symbol ``E``; structures read from a ``graph`` header are undirected
and loopless.
"""

from __future__ import annotations

import itertools
import re


class StructureError(ValueError):
    pass


class Signature:
    """An ordered list of relation symbols with their arities."""

    def __init__(self, symbols):
        symbols = tuple((str(name), int(arity)) for name, arity in symbols)
        names = [name for name, _ in symbols]
        if len(set(names)) != len(names):
            raise StructureError("duplicate relation symbol in signature")
        for name, arity in symbols:
            if arity < 1:
                raise StructureError(f"symbol {name} must have positive arity")
            if name == "=" or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
                raise StructureError(f"bad relation name {name!r}")
        self.symbols = symbols
        self._arity = dict(symbols)

    @property
    def names(self):
        return [name for name, _ in self.symbols]

    def arity(self, name):
        return self._arity[name]

    def __contains__(self, name):
        return name in self._arity

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __eq__(self, other):
        return isinstance(other, Signature) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return "Signature(" + ",".join(f"{n}:{a}" for n, a in self.symbols) + ")"

    def is_graph(self):
        return self.symbols == (("E", 2),)


GRAPH = Signature([("E", 2)])


class Structure:
    """A finite structure; ``graph=True`` marks an undirected loopless graph."""

    __slots__ = ("sig", "n", "rels", "graph", "_inc", "_hash")

    def __init__(self, sig, n, rels=None, graph=False):
        rels = dict(rels or {})
        if n < 0:
            raise StructureError("domain size must be non-negative")
        for name in rels:
            if name not in sig:
                raise StructureError(f"relation {name} not in signature")
        frozen = {}
        for name, arity in sig:
            tuples = set()
            for t in rels.get(name, ()):
                t = tuple(int(e) for e in t)
                if len(t) != arity:
                    raise StructureError(f"arity mismatch for {name}: {t}")
                for e in t:
                    if not 0 <= e < n:
                        raise StructureError(f"index out of range in {name}: {t}")
                tuples.add(t)
            frozen[name] = frozenset(tuples)
        if graph:
            if not sig.is_graph():
                raise StructureError("graph flag requires the graph signature")
            edges = frozen["E"]
            if any(a == b for a, b in edges):
                raise StructureError("graphs may not have loops")
            frozen["E"] = frozenset(edges | {(b, a) for a, b in edges})
        self.sig = sig
        self.n = n
        self.rels = frozen
        self.graph = graph
        self._inc = None
        self._hash = None

    def holds(self, name, args):
        return tuple(args) in self.rels[name]

    def incidence(self):
        """For each element, the (name, tuple) facts it occurs in."""
        if self._inc is None:
            inc = [[] for _ in range(self.n)]
            for name, _ in self.sig:
                for t in sorted(self.rels[name]):
                    for e in set(t):
                        inc[e].append((name, t))
            self._inc = inc
        return self._inc

    def key(self):
        return (self.sig.symbols, self.n, self.graph,
                tuple(tuple(sorted(self.rels[name])) for name, _ in self.sig))

    def __eq__(self, other):
        return isinstance(other, Structure) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return f"Structure({format_structure(self, one_line=True)!r})"

    def edges(self):
        """Undirected edges a < b of a graph."""
        return sorted((a, b) for a, b in self.rels["E"] if a < b)


def graph(n, edges=()):
    return Structure(GRAPH, n, {"E": list(edges)}, graph=True)


def disjoint_union(*parts):
    sig = parts[0].sig
    rels = {name: [] for name, _ in sig}
    offset = 0
    for part in parts:
        if part.sig != sig:
            raise StructureError("disjoint union needs a common signature")
        for name, _ in sig:
            rels[name].extend(tuple(e + offset for e in t) for t in part.rels[name])
        offset += part.n
    return Structure(sig, offset, rels, graph=all(p.graph for p in parts))


def star(k):
    """The star with one center (element 0) and k leaves."""
    return graph(k + 1, [(0, i) for i in range(1, k + 1)])


def complete_graph(n):
    return graph(n, itertools.combinations(range(n), 2))


def path_graph(n):
    return graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return graph(n, [(i, (i + 1) % n) for i in range(n)])


# ---------------------------------------------------------------- file format

_REL_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)=\{(.*)\}$")


def _strip(text):
    lines = []
    for raw in re.split(r"[\n;]", text):
        line = raw.split("#", 1)[0]
        line = re.sub(r"\s+", "", line)
        if line:
            lines.append(line)
    return lines


def parse_structure(text):
    """Read the line-oriented structure format (``;`` also separates lines)."""
    lines = _strip(text)
    if len(lines) < 2:
        raise StructureError("expected a header line and an n=<int> line")
    header = lines[0]
    if header == "graph":
        sig, is_graph = GRAPH, True
    elif header.startswith("sig"):
        body = header[3:]
        symbols = []
        for item in filter(None, body.split(",")):
            if ":" not in item:
                raise StructureError(f"bad signature entry {item!r}")
            name, arity = item.split(":", 1)
            symbols.append((name, int(arity)))
        sig, is_graph = Signature(symbols), False
    else:
        raise StructureError(f"unknown header {header!r}")
    m = re.fullmatch(r"n=(\d+)", lines[1])
    if not m:
        raise StructureError(f"expected n=<int>, got {lines[1]!r}")
    n = int(m.group(1))
    rels = {}
    for line in lines[2:]:
        m = _REL_RE.match(line)
        if not m:
            raise StructureError(f"cannot parse relation line {line!r}")
        name, body = m.group(1), m.group(2)
        if name not in sig:
            raise StructureError(f"relation {name} not in signature")
        if name in rels:
            raise StructureError(f"duplicate relation declaration {name}")
        tuples = []
        for inner in re.findall(r"\(([^()]*)\)", body):
            tuples.append(tuple(int(x) for x in inner.split(",") if x != ""))
        if re.sub(r"\([^()]*\)|,", "", body):
            raise StructureError(f"cannot parse tuples of {name}")
        rels[name] = tuples
    return Structure(sig, n, rels, graph=is_graph)


def format_structure(S, one_line=False):
    if S.graph:
        header = "graph"
    else:
        header = "sig " + ",".join(f"{n}:{a}" for n, a in S.sig)
    lines = [header, f"n={S.n}"]
    for name, _ in S.sig:
        tuples = sorted(S.rels[name])
        inner = ",".join("(" + ",".join(str(e) for e in t) + ")" for t in tuples)
        lines.append(f"{name}={{{inner}}}")
    return "; ".join(lines) if one_line else "\n".join(lines) + "\n"


# ---------------------------------------------------------------- atomic types

def var(i):
    """Name of the variable for position i (0-based)."""
    return f"x{i + 1}"


class AtomicType:
    """The complete atomic type of an n-tuple of distinct elements.

    ``pos`` is the set of true relational atoms ``(name, args)`` where args are
    0-based variable positions.  Every other relational atom is false and every
    equality between distinct variables is false.
    """

    __slots__ = ("n", "sig", "pos", "_hash")

    def __init__(self, n, sig, pos):
        self.n = n
        self.sig = sig
        self.pos = frozenset(pos)
        self._hash = None

    def atoms(self):
        """All relational atoms over the variables, in a fixed order."""
        for name, arity in self.sig:
            for args in itertools.product(range(self.n), repeat=arity):
                yield name, args

    def literals(self):
        """(sign, name, args) for every atom; equalities first."""
        out = []
        for i, j in itertools.combinations(range(self.n), 2):
            out.append((False, "=", (i, j)))
        for name, args in self.atoms():
            out.append(((name, args) in self.pos, name, args))
        return out

    def value(self, name, args):
        if name == "=":
            return args[0] == args[1]
        return (name, tuple(args)) in self.pos

    def restrict(self, positions):
        """Type of the sub-tuple at the given distinct positions."""
        index = {p: i for i, p in enumerate(positions)}
        if len(index) != len(positions):
            raise StructureError("restriction positions must be distinct")
        pos = set()
        for name, args in self.pos:
            if all(a in index for a in args):
                pos.add((name, tuple(index[a] for a in args)))
        return AtomicType(len(positions), self.sig, pos)

    def __eq__(self, other):
        return (isinstance(other, AtomicType) and self.n == other.n
                and self.sig == other.sig and self.pos == other.pos)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.sig, self.pos))
        return self._hash

    def sort_key(self):
        return (self.n, sorted(self.pos))

    def __repr__(self):
        shown = []
        for sign, name, args in self.literals():
            if name == "=":
                shown.append(f"{var(args[0])}!={var(args[1])}")
            else:
                shown.append(("" if sign else "~") + name + "(" + ",".join(var(a) for a in args) + ")")
        return "AtomicType[" + " ".join(shown) + "]"


def _check_tuple(S, a):
    a = tuple(a)
    if len(set(a)) != len(a):
        raise StructureError(f"tuple {a} has repeated entries")
    for e in a:
        if not 0 <= e < S.n:
            raise StructureError(f"element {e} out of range")
    return a


def positive_atoms(S, a):
    """Set of true atoms of tuple a, with args as positions in a."""
    index = {e: i for i, e in enumerate(a)}
    pos = set()
    for name, arity in S.sig:
        rel = S.rels[name]
        if len(a) ** arity <= len(rel):
            for args in itertools.product(range(len(a)), repeat=arity):
                if tuple(a[i] for i in args) in rel:
                    pos.add((name, args))
        else:
            for t in rel:
                if all(e in index for e in t):
                    pos.add((name, tuple(index[e] for e in t)))
    return frozenset(pos)


def atomic_diagram(S, a):
    a = _check_tuple(S, a)
    return AtomicType(len(a), S.sig, positive_atoms(S, a))


# ---------------------------------------------------------------- map search

def _refine(parts):
    """Joint color refinement over several (structure, pointed tuple) pairs.

    Colors are canonical: they only depend on isomorphism-invariant data, so
    equal colors across structures are meaningful.
    """
    colors = []
    for S, a in parts:
        where = {}
        for i, e in enumerate(a):
            where.setdefault(e, []).append(i)
        colors.append([("p", tuple(where.get(x, ()))) for x in range(S.n)])
    while True:
        sigs = []
        for (S, _), col in zip(parts, colors):
            inc = S.incidence()
            row = []
            for x in range(S.n):
                facts = []
                for name, t in inc[x]:
                    facts.append((name, tuple(i for i, e in enumerate(t) if e == x),
                                  tuple(col[e] for e in t)))
                facts.sort()
                row.append((col[x], tuple(facts)))
            sigs.append(row)
        ranks = {s: i for i, s in enumerate(sorted({s for row in sigs for s in row}))}
        new = [[ranks[s] for s in row] for row in sigs]
        old_count = len({c for row in colors for c in row})
        if len(ranks) == old_count:
            return new
        colors = new


def _consistent(X, Y, f, g, x, y):
    for name, t in X.incidence()[x]:
        if all(e in f for e in t):
            if tuple(f[e] for e in t) not in Y.rels[name]:
                return False
    for name, u in Y.incidence()[y]:
        if all(e in g for e in u):
            if tuple(g[e] for e in u) not in X.rels[name]:
                return False
    return True


def _search(X, Y, order, cand, f, g):
    """Injective maps extending f on ``order`` that are induced embeddings."""
    if len(f) == X.n or not order:
        yield dict(f)
        return
    x = order[0]
    for y in cand(x):
        if y in g:
            continue
        f[x] = y
        g[y] = x
        if _consistent(X, Y, f, g, x, y):
            yield from _search(X, Y, order[1:], cand, f, g)
        del f[x]
        del g[y]


def _seed(X, Y, a, b):
    if len(a) != len(b):
        return None
    f, g = {}, {}
    for x, y in zip(a, b):
        if f.get(x, y) != y or g.get(y, x) != x:
            return None
        f[x] = y
        g[y] = x
    for x in f:
        if not _consistent(X, Y, f, g, x, f[x]):
            return None
    return f, g


def iter_isomorphisms(X, Y, a=(), b=()):
    """All isomorphisms X -> Y sending tuple a to tuple b (as dicts)."""
    if X.sig != Y.sig or X.n != Y.n:
        return
    seeded = _seed(X, Y, a, b)
    if seeded is None:
        return
    f, g = seeded
    cx, cy = _refine([(X, tuple(a)), (Y, tuple(b))])
    if sorted(cx) != sorted(cy):
        return
    by_color = {}
    for y in range(Y.n):
        by_color.setdefault(cy[y], []).append(y)
    size = {c: len(v) for c, v in by_color.items()}
    rest = [x for x in range(X.n) if x not in f]
    rest.sort(key=lambda x: (size[cx[x]], cx[x], x))
    yield from _search(X, Y, rest, lambda x: by_color[cx[x]], f, g)


def find_isomorphism(X, Y, a=(), b=()):
    for f in iter_isomorphisms(X, Y, a, b):
        return f
    return None


def is_isomorphic(X, Y):
    return find_isomorphism(X, Y) is not None


def _embed_order(X, start):
    order, seen = [], set(start)
    frontier = list(start)
    while len(seen) < X.n:
        grew = False
        for x in list(frontier):
            for _, t in X.incidence()[x]:
                for e in t:
                    if e not in seen:
                        seen.add(e)
                        order.append(e)
                        frontier.append(e)
                        grew = True
        if not grew:
            e = min(set(range(X.n)) - seen)
            seen.add(e)
            order.append(e)
            frontier.append(e)
    return order


def iter_embeddings(X, Y, a=(), b=()):
    """All injective induced embeddings X -> Y sending a to b (as dicts)."""
    if X.sig != Y.sig or X.n > Y.n:
        return
    seeded = _seed(X, Y, a, b)
    if seeded is None:
        return
    f, g = seeded
    order = [x for x in _embed_order(X, list(f)) if x not in f]
    yield from _search(X, Y, order, lambda x: range(Y.n), f, g)


def find_embedding(X, Y, a=(), b=()):
    """An injective induced embedding X -> Y sending a to b, or None."""
    for h in iter_embeddings(X, Y, a, b):
        return h
    return None


def induced(S, elems):
    """Substructure on the listed elements, renumbered 0..k-1 in list order."""
    index = {e: i for i, e in enumerate(elems)}
    rels = {}
    for name, _ in S.sig:
        rels[name] = [tuple(index[e] for e in t) for t in S.rels[name]
                      if all(e in index for e in t)]
    return Structure(S.sig, len(elems), rels, graph=S.graph)


# ---------------------------------------------------------------- orbits

class OrbitPartition:
    """Partition of the m-tuples of S into automorphism orbits.

    ``witness(a, b)`` returns an automorphism (as a tuple ``f`` with
    ``f[x]`` the image of x) mapping a onto b, or None across classes.
    """

    def __init__(self, S, m, classes, maps):
        self.S = S
        self.m = m
        self.classes = classes
        self._maps = maps  # tuple -> (class index, automorphism rep -> tuple)
        self._index = {t: maps[t][0] for t in maps}

    def class_of(self, t):
        return self._index[tuple(t)]

    def same(self, a, b):
        return self._index[tuple(a)] == self._index[tuple(b)]

    def witness(self, a, b):
        a, b = tuple(a), tuple(b)
        ca, fa = self._maps[a]
        cb, fb = self._maps[b]
        if ca != cb:
            return None
        inv = [0] * self.S.n
        for x, y in enumerate(fa):
            inv[y] = x
        # fa: rep -> a, fb: rep -> b; want a -> b
        return tuple(fb[inv[x]] for x in range(self.S.n))

    def __len__(self):
        return len(self.classes)


def distinct_tuples(n, m):
    return list(itertools.permutations(range(n), m))


# Above this many automorphisms, orbits are found by pairwise search instead.
GROUP_CAP = 20000


def automorphism_orbits(S, m):
    if m > S.n:
        raise StructureError("tuple length exceeds domain size")
    tuples = distinct_tuples(S.n, m)
    identity = tuple(range(S.n))
    group = []
    for f in iter_isomorphisms(S, S):
        group.append(tuple(f[x] for x in range(S.n)))
        if len(group) > GROUP_CAP:
            group = None
            break
    maps = {}
    classes = []
    for t in tuples:
        if t in maps:
            continue
        idx = len(classes)
        maps[t] = (idx, identity)
        members = [t]
        if group is not None:
            for g in group:
                u = tuple(g[x] for x in t)
                if u not in maps:
                    maps[u] = (idx, g)
                    members.append(u)
            members.sort()
        else:
            for u in tuples:
                if u in maps:
                    continue
                f = find_isomorphism(S, S, t, u)
                if f is not None:
                    maps[u] = (idx, tuple(f[x] for x in range(S.n)))
                    members.append(u)
        classes.append(members)
    return OrbitPartition(S, m, classes, maps)


def automorphisms(S):
    return [tuple(f[x] for x in range(S.n)) for f in iter_isomorphisms(S, S)]


# ---------------------------------------------------------------- canonical forms

def canonical_form(S):
    """A labeling-independent key: equal iff the structures are isomorphic."""
    col = _refine([(S, ())])[0]
    cells = {}
    for x in range(S.n):
        cells.setdefault(col[x], []).append(x)
    ordered = [cells[c] for c in sorted(cells)]
    best = None
    for perms in itertools.product(*(itertools.permutations(c) for c in ordered)):
        order = [x for p in perms for x in p]
        rank = {x: i for i, x in enumerate(order)}
        code = tuple(tuple(sorted(tuple(rank[e] for e in t) for t in S.rels[name]))
                     for name, _ in S.sig)
        if best is None or code < best:
            best = code
    return (S.sig.symbols, S.n, S.graph, tuple(sorted(col)), best)


# Practical bounds: graphs up to 7 vertices, other signatures while the raw
# search space 2^(sum n^arity) stays below 2^16.
MAX_GRAPH_ENUM = 7
MAX_RAW_BITS = 16


def _from_code(S_sig, n, graph_flag, code):
    rels = {name: list(code[i]) for i, (name, _) in enumerate(S_sig)}
    return Structure(S_sig, n, rels, graph=graph_flag)


_graph_cache = {0: [graph(0)]}


def _graphs(n):
    if n in _graph_cache:
        return _graph_cache[n]
    smaller = _graphs(n - 1)
    seen = {}
    for G in smaller:
        base = G.edges()
        for mask in range(1 << (n - 1)):
            extra = [(i, n - 1) for i in range(n - 1) if mask >> i & 1]
            H = graph(n, base + extra)
            key = canonical_form(H)
            if key not in seen:
                seen[key] = H
    out = []
    for key in sorted(seen):
        out.append(_from_code(GRAPH, n, True, key[4]))
    _graph_cache[n] = out
    return out


def enumerate_structures(sig, n):
    """One representative per isomorphism class of size-n structures.

    Output order is fixed: sorted by canonical form.
    """
    if sig.is_graph():
        if n > MAX_GRAPH_ENUM:
            raise StructureError(f"graph enumeration is bounded by {MAX_GRAPH_ENUM} vertices")
        return list(_graphs(n))
    slots = [list(itertools.product(range(n), repeat=arity)) for _, arity in sig]
    bits = sum(len(s) for s in slots)
    if bits > MAX_RAW_BITS:
        raise StructureError("search space too large for exhaustive enumeration")
    seen = {}
    for mask in range(1 << bits):
        rels, k = {}, 0
        for (name, _), s in zip(sig, slots):
            rels[name] = [t for j, t in enumerate(s) if mask >> (k + j) & 1]
            k += len(s)
        S = Structure(sig, n, rels)
        key = canonical_form(S)
        if key not in seen:
            seen[key] = S
    return [_from_code(sig, n, False, key[4]) for key in sorted(seen)]


def all_graphs(max_n, min_n=0):
    out = []
    for n in range(min_n, max_n + 1):
        out.extend(enumerate_structures(GRAPH, n))
    return out


# ---------------------------------------------------------------- graph encoding

TAG_LENGTH = 2


def graph_encode(S):
    """Encode S as an undirected graph.

    Each element gets a pendant path of length 2.  The k-th relation symbol
    (0-based) contributes, per fact, a cycle of length k+4 whose first vertex
    is joined to the j-th argument by a path of length j.  The empty structure
    is sent to a single vertex.
    """
    if S.n == 0:
        return graph(1)
    edges = []
    counter = [S.n]

    def fresh():
        counter[0] += 1
        return counter[0] - 1

    for x in range(S.n):
        t1 = fresh()
        t2 = fresh()
        edges += [(x, t1), (t1, t2)]
    for k, (name, _) in enumerate(S.sig):
        for t in sorted(S.rels[name]):
            cycle = [fresh() for _ in range(k + 4)]
            edges += [(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))]
            hub = cycle[0]
            for j, e in enumerate(t, start=1):
                prev = hub
                for _ in range(j - 1):
                    v = fresh()
                    edges.append((prev, v))
                    prev = v
                edges.append((prev, e))
    return graph(counter[0], edges)


def graph_decode(G, sig):
    """Recover a structure from ``graph_encode`` output (up to isomorphism)."""
    if G.n == 1 and not G.rels["E"]:
        return Structure(sig, 0, {})
    adj = [set() for _ in range(G.n)]
    for a, b in G.rels["E"]:
        adj[a].add(b)
    # Tag ends are the leaves; a bare element gadget is a 3-path, pick one end.
    elements, tags = [], set()
    for v in range(G.n):
        if len(adj[v]) != 1 or v in tags:
            continue
        (t1,) = adj[v]
        if len(adj[t1]) != 2:
            raise StructureError("not an encoding: leaf without a tag path")
        (x,) = adj[t1] - {v}
        if x in tags:
            continue
        tags.update((v, t1))
        elements.append(x)
    elements.sort()
    index = {x: i for i, x in enumerate(elements)}
    rest = set(range(G.n)) - tags - set(elements)
    rels = {name: [] for name, _ in sig}
    seen = set()
    for start in sorted(rest):
        if start in seen:
            continue
        comp, stack = set(), [start]
        while stack:
            v = stack.pop()
            if v in comp:
                continue
            comp.add(v)
            stack.extend(w for w in adj[v] if w in rest)
        seen |= comp
        core = set(comp)
        # peel the attachment paths to find the cycle
        changed = True
        while changed:
            changed = False
            for v in list(core):
                if len([w for w in adj[v] if w in core]) <= 1:
                    core.discard(v)
                    changed = True
        k = len(core) - 4
        if not 0 <= k < len(sig):
            raise StructureError("not an encoding: unexpected cycle length")
        hubs = [v for v in core if len(adj[v]) > 2]
        if len(hubs) != 1:
            raise StructureError("not an encoding: cannot find relation hub")
        hub = hubs[0]
        name, arity = sig.symbols[k]
        args = [None] * arity
        for w in adj[hub]:
            if w in core:
                continue
            length, prev, cur = 1, hub, w
            while cur not in index:
                (nxt,) = adj[cur] - {prev}
                prev, cur = cur, nxt
                length += 1
            args[length - 1] = index[cur]
        if any(a is None for a in args):
            raise StructureError("not an encoding: missing argument path")
        rels[name].append(tuple(args))
    undirected = sig.is_graph() and all(
        a != b and (b, a) in set(rels["E"]) for a, b in rels["E"])
    return Structure(sig, len(elements), rels, graph=undirected)
