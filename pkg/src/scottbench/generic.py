"""Generic paths through labeled trees, the structures they determine, and
the good-match back-and-forth check between two trees.

A requirement ``(nu, tau, beta)`` with nu on the path and tau strictly below
nu is met when some node tau' on the path has
``(tau, xs ys) <=_beta (tau', xs zs)``, where xs are the variables of nu, ys
the remaining variables of tau and zs distinct variables of tau' outside xs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import Structure
from .tree_bf import BudgetError, check_budget, le_codes


class GenericError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class GenericityRequirement:
    nu: int
    tau: int
    beta: int

    def key(self, T):
        return (T.node(self.nu).level, self.nu, self.tau, self.beta)


@dataclass
class GenericPath:
    nodes: list
    alpha: int
    met: dict = field(default_factory=dict)  # requirement -> node meeting it
    unmet: list = field(default_factory=list)
    steps: int = 0

    @property
    def ok(self):
        return not self.unmet

    def report(self):
        lines = [f"path: {' '.join(map(str, self.nodes))}",
                 f"requirements met: {len(self.met)}"]
        for r in self.unmet:
            lines.append(f"unmet: nu={r.nu} tau={r.tau} beta={r.beta}")
        lines.append("generic within budget" if self.ok else "not generic within budget")
        return "\n".join(lines)


def _meets(T, req, node):
    k = T.node(req.nu).level
    m = T.node(req.tau).level
    level = T.node(node).level
    full = tuple(range(m))
    xs = tuple(range(k))
    rest = [i for i in range(k, level)]
    t_code, n_code = T.code(req.tau), T.code(node)
    return any(le_codes(t_code, full, n_code, xs + zs, req.beta)
               for zs in itertools.permutations(rest, m - k))


def requirements(T, path, alpha):
    """In-budget requirements with nu on the path, in enumeration order.

    Copies of tau with the same subtree code give the same requirement, so
    only the smallest id of each class is used.
    """
    out = []
    for nu in path:
        k = T.node(nu).level
        below = [i for i in T.class_reps(T.descendants(nu)) if i != nu]
        for tau in below:
            for beta in range(alpha):
                try:
                    check_budget([T], [k], beta)
                except BudgetError:
                    continue
                out.append(GenericityRequirement(nu, tau, beta))
    out.sort(key=lambda r: r.key(T))
    return out


def _first_meeting(T, req, nodes):
    for node in nodes:
        if _meets(T, req, node):
            return node
    return None


def build_generic_path(T, start=None, alpha=1, budget=1000):
    """Extend the path to ``start`` until every requirement is met.

    At each step the first requirement not met on the path is served by the
    smallest-id node below the current end that meets it; when none needs
    attention the path moves to the smallest-id child.  Requirements that no
    extension can meet are recorded as unmet.
    """
    start = T.root if start is None else start
    path = T.path_to(start)
    out = GenericPath(list(path), alpha)
    hopeless = set()
    while True:
        end = path[-1]
        pending = None
        for req in requirements(T, path, alpha):
            if req in out.met or req in hopeless:
                continue
            hit = _first_meeting(T, req, path)
            if hit is not None:
                out.met[req] = hit
                continue
            pending = req
            break
        if pending is None:
            children = T.node(end).children
            if not children:
                break
            nxt = min(children)
            path.append(nxt)
        else:
            below = [i for i in T.descendants(end) if i != end]
            hit = _first_meeting(T, pending, below)
            if hit is None:
                hopeless.add(pending)
                continue
            path.extend(T.path_to(hit)[len(path):])
            out.met[pending] = hit
        out.steps += 1
        if out.steps > budget:
            break
    out.nodes = list(path)
    out.unmet = sorted((r for r in requirements(T, path, alpha) if r not in out.met
                        and _first_meeting(T, r, path) is None), key=lambda r: r.key(T))
    return out


def is_generic(T, path, alpha):
    return all(_first_meeting(T, r, path) is not None for r in requirements(T, path, alpha))


def root_paths(T):
    """Every root-to-leaf path, in id order."""
    out = []
    stack = [[T.root]]
    while stack:
        p = stack.pop()
        kids = sorted(T.node(p[-1]).children)
        if not kids:
            out.append(p)
        for c in reversed(kids):
            stack.append(p + [c])
    return out


def extract_structure(T, path):
    """The structure on x1..xk described by the labels along the path."""
    path = list(path)
    if not path or path[0] != T.root:
        raise GenericError("path must start at the root")
    for a, b in zip(path, path[1:]):
        if T.node(b).parent != a:
            raise GenericError(f"{b} is not a child of {a}")
    labels = [T.node(i).label for i in path]
    if any(lab is None for lab in labels):
        raise GenericError("missing label on path")
    last = labels[-1]
    for lab in labels[:-1]:
        if last.restrict(range(lab.n)) != lab:
            raise GenericError("inconsistent labels on path")
    rels = {}
    for name, args in sorted(last.pos):
        rels.setdefault(name, []).append(args)
    graph = last.sig.is_graph() and all((name, args[::-1]) in last.pos and args[0] != args[1]
                                        for name, args in last.pos)
    return Structure(last.sig, last.n, rels, graph=graph)


@dataclass
class MatchResult:
    ok: bool
    trace: list

    def text(self):
        return "\n".join(self.trace + ["good match family complete" if self.ok
                                       else "good match family fails"])


def good_match_verify(T1, T2, alpha):
    """Back-and-forth family between two trees.

    The roots always match.  A pair of nodes at level n matches when their
    full variable tuples are related at level alpha-1 in both directions and
    every child of either has a matching child of the other.
    """
    if alpha < 1:
        raise GenericError("alpha must be at least 1")
    beta = alpha - 1
    memo = {}
    trace = []

    def related(a, b):
        n = T1.node(a).level
        if T2.node(b).level != n:
            return False
        check_budget([T1, T2], [n, n], beta)
        xs = tuple(range(n))
        ca, cb = T1.code(a), T2.code(b)
        return le_codes(ca, xs, cb, xs, beta) and le_codes(cb, xs, ca, xs, beta)

    def match(a, b, top):
        key = (T1.code(a), T2.code(b))
        if key in memo:
            return memo[key]
        ok = top or related(a, b)
        if ok:
            for c in sorted(T1.node(a).children):
                if not any(match(c, d, False) for d in sorted(T2.node(b).children)):
                    trace.append(f"forth fails at level {T1.node(c).level}: node {c} under {a}")
                    ok = False
                    break
        if ok:
            for d in sorted(T2.node(b).children):
                if not any(match(c, d, False) for c in sorted(T1.node(a).children)):
                    trace.append(f"back fails at level {T2.node(d).level}: node {d} under {b}")
                    ok = False
                    break
        memo[key] = ok
        return ok

    trace.append(f"level 0: {T1.root} -> {T2.root}")
    ok = match(T1.root, T2.root, True)
    return MatchResult(ok, trace)
