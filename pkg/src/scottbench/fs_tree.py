"""Finite truncations of the tree of tuples of a structure.

A node at level n carries a complete atomic type for the variables x1..xn.
``embed_tree(S, d, w)`` builds the tree whose level-n nodes represent the
distinct-element n-tuples of S, with w copies of each child.  Copies are
told apart by id only; every semantic query goes through the canonical
subtree code of a node, which copies share.
"""

from __future__ import annotations

import math

from . import formulas as fm
from .core import GRAPH, AtomicType, Signature, atomic_diagram


class TreeError(ValueError):
    pass


class Node:
    __slots__ = ("id", "parent", "level", "label", "tuple", "children")

    def __init__(self, id, parent, level, label, tuple_=None):
        self.id = id
        self.parent = parent
        self.level = level
        self.label = label  # AtomicType, or None when missing or malformed
        self.tuple = tuple_
        self.children = []


# Subtree codes are interned globally so that memo tables can be shared
# between trees: equal codes mean isomorphic labeled subtrees.
_CODE_IDS = {}
_CODE_INFO = []  # code -> (level, label, child codes)


def _intern(level, label, child_codes):
    key = (level, label, child_codes)
    code = _CODE_IDS.get(key)
    if code is None:
        code = len(_CODE_INFO)
        _CODE_IDS[key] = code
        _CODE_INFO.append(key)
    return code


def code_level(code):
    return _CODE_INFO[code][0]


def code_label(code):
    return _CODE_INFO[code][1]


def code_children(code):
    return _CODE_INFO[code][2]


_DESC = {}


def code_descendants(code):
    """Codes of the subtree rooted at a node with this code (itself included)."""
    out = _DESC.get(code)
    if out is None:
        seen = {code}
        stack = [code]
        while stack:
            for c in set(code_children(stack.pop())):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        out = tuple(sorted(seen, key=lambda c: (code_level(c), c)))
        _DESC[code] = out
    return out


class LabeledTree:
    """A finite labeled tree; the root is its own parent."""

    def __init__(self, nodes, d, w, symbolic, n=None, sig=None):
        self.nodes = {}
        for node in nodes:
            if node.id in self.nodes:
                raise TreeError(f"duplicate node id {node.id}")
            self.nodes[node.id] = node
        roots = [v for v in self.nodes.values() if v.parent == v.id]
        if len(roots) != 1:
            raise TreeError("a tree needs exactly one root (id = parent id)")
        self.root = roots[0].id
        for v in self.ordered():
            if v.id != self.root:
                if v.parent not in self.nodes:
                    raise TreeError(f"node {v.id} has unknown parent {v.parent}")
                self.nodes[v.parent].children.append(v.id)
        for v in self.nodes.values():
            v.children.sort()
        self._check_acyclic()
        self.d = d
        self.w = w
        self.symbolic = symbolic
        self.n = n
        self.sig = sig or GRAPH
        self._codes = None

    def _check_acyclic(self):
        seen = set()
        stack = [self.root]
        while stack:
            v = stack.pop()
            seen.add(v)
            stack.extend(self.nodes[v].children)
        if len(seen) != len(self.nodes):
            raise TreeError("some nodes are not reachable from the root")

    def ordered(self):
        return [self.nodes[i] for i in sorted(self.nodes)]

    def __len__(self):
        return len(self.nodes)

    def node(self, i):
        try:
            return self.nodes[i]
        except KeyError:
            raise TreeError(f"no node with id {i}") from None

    def depth(self):
        return max(v.level for v in self.nodes.values())

    def saturated(self):
        """Whether every tuple of distinct elements is already represented."""
        return self.n is not None and self.d >= self.n

    def codes(self):
        if self._codes is None:
            codes = {}
            for v in self._postorder():
                kids = tuple(sorted(codes[c] for c in v.children))
                codes[v.id] = _intern(v.level, v.label, kids)
            self._codes = codes
        return self._codes

    def _postorder(self):
        out = []
        stack = [(self.root, False)]
        while stack:
            i, done = stack.pop()
            if done:
                out.append(self.nodes[i])
                continue
            stack.append((i, True))
            for c in reversed(self.nodes[i].children):
                stack.append((c, False))
        return out

    def code(self, i):
        return self.codes()[i]

    def descendants(self, i):
        """Ids of the subtree at i, including i, in id order."""
        out = []
        stack = [i]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(self.nodes[v].children)
        return sorted(out)

    def is_ancestor(self, a, b):
        """Whether a is b or above it."""
        while True:
            if a == b:
                return True
            parent = self.nodes[b].parent
            if parent == b:
                return False
            b = parent

    def class_reps(self, ids=None):
        """Smallest id per subtree code, in id order."""
        ids = sorted(self.nodes) if ids is None else ids
        seen, out = set(), []
        codes = self.codes()
        for i in ids:
            if codes[i] not in seen:
                seen.add(codes[i])
                out.append(i)
        return out

    def path_to(self, i):
        out = [i]
        while self.nodes[out[-1]].parent != out[-1]:
            out.append(self.nodes[out[-1]].parent)
        return out[::-1]


# ---------------------------------------------------------------- construction

def embed_tree(S, d=None, w=2):
    """Tree of tuples of S truncated at depth d with w copies of each child."""
    d = S.n if d is None else d
    if d > S.n:
        raise TreeError("depth exceeds domain size")
    if d < 0 or w < 1:
        raise TreeError("depth must be non-negative and width at least 1")
    nodes = [Node(0, 0, 0, atomic_diagram(S, ()), ())]
    frontier = [nodes[0]]
    for level in range(1, d + 1):
        nxt = []
        for parent in frontier:
            for e in range(S.n):
                if e in parent.tuple:
                    continue
                t = parent.tuple + (e,)
                label = atomic_diagram(S, t)
                for _ in range(w):
                    v = Node(len(nodes), parent.id, level, label, t)
                    nodes.append(v)
                    nxt.append(v)
        frontier = nxt
    return LabeledTree(nodes, d, w, True, n=S.n, sig=S.sig)


def full_node_count(n, d, w):
    return 1 + sum(math.perm(n, k) * w ** k for k in range(1, d + 1))


def node_for_tuple(T, t):
    """Smallest-id node representing tuple t (trees built by embed_tree)."""
    for v in T.ordered():
        if v.tuple == tuple(t):
            return v.id
    raise TreeError(f"no node represents {t}")


# ---------------------------------------------------------------- simple properties

class Verdict:
    """Per-property pass/fail lines with witnesses."""

    def __init__(self):
        self.lines = []  # (name, ok, detail)

    def add(self, name, ok, detail=""):
        self.lines.append((name, ok, detail))

    @property
    def ok(self):
        return all(ok for _, ok, _ in self.lines)

    def failed(self):
        return [name for name, ok, _ in self.lines if not ok]

    def get(self, name):
        for n, ok, detail in self.lines:
            if n == name:
                return ok, detail
        raise KeyError(name)

    def text(self):
        out = []
        for name, ok, detail in self.lines:
            out.append(f"{name}: {'pass' if ok else 'fail'}" + (f" {detail}" if detail else ""))
        return "\n".join(out)


def check_levels(T):
    for v in T.ordered():
        parent = T.nodes[v.parent]
        expected = 0 if v.id == T.root else parent.level + 1
        if v.level != expected:
            return False, f"node {v.id} at level {v.level}, expected {expected}"
        if v.label is None:
            return False, f"node {v.id} has no complete label"
        if v.label.n != v.level:
            return False, f"node {v.id} label has {v.label.n} variables at level {v.level}"
    return True, ""


def check_consistency(T):
    for v in T.ordered():
        if v.id == T.root:
            continue
        parent = T.nodes[v.parent]
        if v.label is None or parent.label is None:
            continue
        if parent.label.n > v.label.n:
            return False, f"node {v.id}"
        if v.label.restrict(range(parent.label.n)) != parent.label:
            return False, f"node {v.id}"
    return True, ""


def check_replication(T):
    if T.symbolic:
        return True, "(symbolic replication)"
    for v in T.ordered():
        if v.children:
            return False, (f"node {v.id} has finitely many children and the tree "
                           "is not flagged symbolic")
    return True, ""


def check_simple_properties(T):
    verdict = Verdict()
    for name, fn in (("levels", check_levels), ("consistency", check_consistency),
                     ("replication", check_replication)):
        ok, detail = fn(T)
        verdict.add(name, ok, detail)
    return verdict


# ---------------------------------------------------------------- isomorphism

def tree_iso(T1, T2):
    """Level- and label-preserving isomorphism as a dict of ids, or None."""
    c1, c2 = T1.codes(), T2.codes()
    if c1[T1.root] != c2[T2.root]:
        return None
    f = {}
    stack = [(T1.root, T2.root)]
    while stack:
        a, b = stack.pop()
        f[a] = b
        left = sorted(T1.nodes[a].children, key=lambda i: (c1[i], i))
        right = sorted(T2.nodes[b].children, key=lambda i: (c2[i], i))
        stack.extend(zip(left, right))
    return f


# ---------------------------------------------------------------- file format

def label_sexpr(label):
    if label is None:
        return "-"
    return fm.to_sexpr(fm.type_formula(label))


def format_tree(T):
    header = f"tree d={T.d} w={T.w} symbolic={int(T.symbolic)}"
    if T.n is not None:
        header += f" n={T.n}"
    header += " sig=" + ",".join(f"{name}:{a}" for name, a in T.sig)
    lines = [header]
    for v in T.ordered():
        lines.append(f"{v.id} {v.parent} {v.level} {label_sexpr(v.label)}")
    return "\n".join(lines) + "\n"


def _label_from(text, sig):
    """Parse a label; None when it is not a complete atomic type."""
    if text == "-":
        return None
    f = fm.parse_formula(text)
    expr = fm.qexpr(f)
    items = expr.items if isinstance(expr, fm.BAnd) else (expr,)
    lits = set()
    top = 0
    for item in items:
        if not isinstance(item, fm.Lit):
            return None
        idx = [fm.var_index(a) for a in item.args]
        if any(i is None for i in idx):
            return None
        top = max([top] + idx)
        lits.add((item.sign, item.rel, tuple(i - 1 for i in idx)))
    pos = {(rel, args) for sign, rel, args in lits if sign and rel != "="}
    t = AtomicType(top, sig, pos)
    if set(t.literals()) != lits:
        return None
    return t


def _infer_sig(texts):
    arities = {}
    for text in texts:
        if text == "-":
            continue
        for name, args in _atoms_in(fm.qexpr(fm.parse_formula(text))):
            if name != "=":
                arities.setdefault(name, len(args))
    if not arities:
        return GRAPH
    return Signature(sorted(arities.items()))


def _atoms_in(e):
    if isinstance(e, fm.Lit):
        yield e.rel, e.args
    else:
        for i in e.items:
            yield from _atoms_in(i)


def parse_tree(text):
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("tree"):
        raise TreeError("missing 'tree' header")
    meta = {}
    for item in lines[0].split()[1:]:
        if "=" not in item:
            raise TreeError(f"bad header item {item!r}")
        k, v = item.split("=", 1)
        meta[k] = v
    try:
        d, w, symbolic = int(meta["d"]), int(meta["w"]), meta["symbolic"] == "1"
    except KeyError as e:
        raise TreeError(f"header lacks {e.args[0]}") from None
    n = int(meta["n"]) if "n" in meta else None
    rows = []
    for ln in lines[1:]:
        parts = ln.split(None, 3)
        if len(parts) < 3:
            raise TreeError(f"bad node line {ln!r}")
        rows.append((int(parts[0]), int(parts[1]), int(parts[2]),
                     parts[3] if len(parts) == 4 else "-"))
    if "sig" in meta:
        symbols = [item.split(":") for item in meta["sig"].split(",") if item]
        sig = Signature([(a, int(b)) for a, b in symbols])
    else:
        sig = _infer_sig(r[3] for r in rows)
    nodes = []
    for i, p, level, text in rows:
        try:
            label = _label_from(text, sig)
        except fm.FormulaError as e:
            raise TreeError(f"node {i}: {e}") from None
        nodes.append(Node(i, p, level, label))
    return LabeledTree(nodes, d, w, symbolic, n=n, sig=sig)


def graft(T, at, S_nodes):
    """A copy of T with extra (parent, label) children added under node ``at``.

    ``S_nodes`` is a list of (local id, local parent or None, label); local ids
    become fresh ids.  Used to build counterexample trees.
    """
    nodes = [Node(v.id, v.parent, v.level, v.label, v.tuple) for v in T.ordered()]
    nxt = max(T.nodes) + 1
    ids = {}
    level_of = {v.id: v.level for v in nodes}
    for local, parent, label in S_nodes:
        real_parent = at if parent is None else ids[parent]
        ids[local] = nxt
        level_of[nxt] = level_of[real_parent] + 1
        nodes.append(Node(nxt, real_parent, level_of[nxt], label))
        nxt += 1
    return LabeledTree(nodes, T.d, T.w, T.symbolic, n=T.n, sig=T.sig)


def restrict_depth(T, d):
    """The subtree of nodes at level at most d."""
    nodes = [Node(v.id, v.parent, v.level, v.label, v.tuple) for v in T.ordered() if v.level <= d]
    return LabeledTree(nodes, d, T.w, T.symbolic, n=T.n, sig=T.sig)
