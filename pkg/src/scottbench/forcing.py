"""Forcing over labeled trees and its definability in the tree language.

Nodes are forcing conditions.  For a node s with label D:

* a quantifier-free formula is forced when its variables are among those of s
  and D implies it;
* a disjunction of existential blocks is forced when some branch is forced
  under some assignment of its block to variables of s (repeats allowed);
* a conjunction of universal blocks is forced when its variables are among
  those of s and no node at or below s forces the negation.

``force_formula`` turns a formula into one over the tree language (binary
``P(child, parent)`` with ``P(root, root)``, one unary predicate per label)
defining the set of nodes that force it.  ``emit_axioms`` assembles the
axioms for trees of tuples over a finite inventory of formulas.
"""

from __future__ import annotations

import itertools

from . import formulas as fm
from .core import AtomicType, Signature, Structure
from .fs_tree import code_descendants, code_label, code_level
from .tree_bf import check_budget


class ForcingError(ValueError):
    pass


_FORCE = {}


def clear_caches():
    _FORCE.clear()


def _implies(label, expr):
    """Whether a complete type (distinct variables) makes expr true."""
    if isinstance(expr, fm.Lit):
        pos = tuple(fm.var_index(a) - 1 for a in expr.args)
        if expr.rel == "=":
            truth = pos[0] == pos[1]
        else:
            truth = label.value(expr.rel, pos)
        return truth == expr.sign
    if isinstance(expr, fm.BAnd):
        return all(_implies(label, i) for i in expr.items)
    return any(_implies(label, i) for i in expr.items)


def _check_free(f):
    try:
        return fm.max_var_index(f)
    except fm.FormulaError as e:
        raise ForcingError(str(e)) from None


def forces_code(code, f):
    key = (code, f)
    hit = _FORCE.get(key)
    if hit is not None:
        return hit
    level = code_level(code)
    if fm.is_qfree(f):
        label = code_label(code)
        hit = (label is not None and _check_free(f) <= level
               and _implies(label, fm.qexpr(f)))
    elif isinstance(f, fm.Or):
        names = [f"x{i + 1}" for i in range(level)]
        hit = False
        for vs, body in f.branches:
            for choice in itertools.product(names, repeat=len(vs)):
                if forces_code(code, fm.substitute(body, dict(zip(vs, choice)))):
                    hit = True
                    break
            if hit:
                break
    else:
        if _check_free(f) > level:
            hit = False
        else:
            negated = fm.neg(f)
            hit = not any(forces_code(c, negated) for c in code_descendants(code))
    _FORCE[key] = hit
    return hit


def _budget(T, node, f):
    check_budget([T], [T.node(node).level], fm.classify(f).rank)


def forces(T, node, f):
    """Whether the node forces f (sound within the depth budget)."""
    _budget(T, node, f)
    _check_free(f)
    return forces_code(T.code(node), f)


def weakly_forces(T, node, f):
    """No node at or below ``node`` forces the negation of f."""
    _budget(T, node, f)
    _check_free(f)
    negated = fm.neg(f)
    return not any(forces_code(c, negated) for c in code_descendants(T.code(node)))


# ---------------------------------------------------------------- tree language

def label_name(label):
    bits = "".join("1" if (name, args) in label.pos else "0" for name, args in label.atoms())
    return f"U{label.n}_{bits}"


class Vocabulary:
    """The finite set of labels a tree-language formula may mention."""

    def __init__(self, labels):
        self.labels = sorted(set(labels), key=AtomicType.sort_key)
        self.names = {lab: label_name(lab) for lab in self.labels}
        self.max_level = max((lab.n for lab in self.labels), default=0)

    def signature(self):
        return Signature([("P", 2)] + [(self.names[lab], 1) for lab in self.labels])

    def of_level(self, pred):
        return [lab for lab in self.labels if pred(lab.n)]


def vocabulary_of(*trees):
    labels = set()
    for T in trees:
        for v in T.ordered():
            if v.label is not None:
                labels.add(v.label)
    return Vocabulary(labels)


def tree_structure(T, vocab):
    """T as a structure over the tree language; element i is the i-th node by id."""
    order = sorted(T.nodes)
    index = {i: k for k, i in enumerate(order)}
    rels = {"P": [(index[v.id], index[v.parent]) for v in T.ordered()]}
    for v in T.ordered():
        if v.label is None:
            continue
        if v.label not in vocab.names:
            raise ForcingError(f"label of node {v.id} is outside the vocabulary")
        rels.setdefault(vocab.names[v.label], []).append((index[v.id],))
    return Structure(vocab.signature(), len(order), rels), index


class _Fresh:
    def __init__(self):
        self.n = 0

    def __call__(self, stem):
        self.n += 1
        return f"{stem}{self.n}"


def _u(vocab, lab, v, sign=True):
    return fm.Lit(sign, vocab.names[lab], (v,))


def _any_label(vocab, labels, v):
    return fm.BOr(tuple(_u(vocab, lab, v) for lab in labels))


def _rename_block(vs, body, fresh):
    new = [fresh("v") for _ in vs]
    return new, fm.substitute(body, dict(zip(vs, new)))


def forall_disj(vs, parts, fresh):
    """Universal closure of a disjunction, distributing over conjunctive parts.

    Keeps the classification at Pi_{r+1} when the parts are at most Sigma_r or
    Pi_r.
    """
    pis = [p for p in parts if isinstance(p, fm.And)]
    others = [p for p in parts if not isinstance(p, fm.And)]
    branches = []
    for choice in itertools.product(*(p.branches for p in pis)):
        block = list(vs)
        bodies = list(others)
        for bvs, body in choice:
            new, body = _rename_block(bvs, body, fresh)
            block += new
            bodies.append(body)
        body = fm.disjunction(bodies) if bodies else fm.QFree(fm.FALSE)
        branches.append((tuple(block), body))
    return fm.And(tuple(branches))


def exists_conj(vs, parts, fresh):
    """Existential closure of a conjunction, distributing over disjunctive parts."""
    sigmas = [p for p in parts if isinstance(p, fm.Or)]
    others = [p for p in parts if not isinstance(p, fm.Or)]
    branches = []
    for choice in itertools.product(*(p.branches for p in sigmas)):
        block = list(vs)
        bodies = list(others)
        for bvs, body in choice:
            new, body = _rename_block(bvs, body, fresh)
            block += new
            bodies.append(body)
        body = fm.conjunction(bodies) if bodies else fm.QFree(fm.TRUE)
        branches.append((tuple(block), body))
    return fm.Or(tuple(branches))


def _descendant_blocks(vocab, v, fresh):
    """(new node var, link vars, chain expr) for each possible distance."""
    out = []
    for dist in range(vocab.max_level + 1):
        w = fresh("n")
        links = [fresh("c") for _ in range(max(0, dist - 1))]
        if dist == 0:
            expr = fm.BAnd((fm.Lit(True, "=", (w, v)),))
        else:
            nodes = [w] + links + [v]
            expr = fm.BAnd(tuple(fm.Lit(True, "P", (a, b)) for a, b in zip(nodes, nodes[1:])))
        out.append((w, links, expr))
    return out


def _level_at_least(vocab, k, v):
    return fm.QFree(_any_label(vocab, vocab.of_level(lambda n: n >= k), v))


def _translate(f, v, vocab, fresh, qfree_pi):
    """Formula in the tree language, free in v, defining the nodes forcing f."""
    if fm.is_qfree(f):
        k = fm.max_var_index(f)
        good = [lab for lab in vocab.of_level(lambda n: n >= k) if _implies(lab, fm.qexpr(f))]
        if qfree_pi:
            bad = [lab for lab in vocab.labels if lab not in good]
            return fm.forall((), fm.QFree(fm.BAnd(tuple(_u(vocab, lab, v, False) for lab in bad))))
        return fm.exists((), fm.QFree(_any_label(vocab, good, v)))
    if isinstance(f, fm.Or):
        names = [f"x{i + 1}" for i in range(vocab.max_level)]
        parts = []
        for vs, body in f.branches:
            for choice in itertools.product(names, repeat=len(vs)):
                inst = fm.substitute(body, dict(zip(vs, choice)))
                part = _translate(inst, v, vocab, fresh, qfree_pi)
                # the assigned variables must exist at the node even when unused
                top = max((fm.var_index(c) for c in choice), default=0)
                if top > fm.max_var_index(inst):
                    guard = _level_at_least(vocab, top, v)
                    part = (exists_conj([], [guard, part], fresh) if isinstance(part, fm.Or)
                            else fm.conjunction([guard, part]))
                parts.append(part)
        if not parts:
            return fm.exists((), fm.QFree(fm.FALSE))
        out = fm.disjunction(parts)
        return out if isinstance(out, fm.Or) else fm.exists((), out)
    k = fm.max_var_index(f)
    negated = fm.neg(f)
    conjuncts = [_level_at_least(vocab, k, v)]
    for w, links, chain in _descendant_blocks(vocab, v, fresh):
        inner = fm.neg(_translate(negated, w, vocab, fresh, qfree_pi))
        conjuncts.append(forall_disj([w] + links, [fm.QFree(fm._neg_expr(chain)), inner], fresh))
    return fm.conjunction(conjuncts)


def force_formula(theta, vocab, var="y", qfree_pi=False):
    """Tree-language formula, free in ``var``, for the nodes forcing theta.

    Quantifier-free theta gives a Sigma_1 formula, or Pi_1 with ``qfree_pi``.
    """
    _check_free(theta)
    return _translate(theta, var, vocab, _Fresh(), qfree_pi)


def defined_nodes(T, f, vocab, var="y"):
    """Node ids satisfying a tree-language formula free in ``var``."""
    S, index = tree_structure(T, vocab)
    return [i for i in sorted(T.nodes) if fm.evaluate(S, f, {var: index[i]})]


# ---------------------------------------------------------------- axioms

def _levels_axiom(vocab):
    y, z = "y", "z"
    labels = vocab.labels
    one = fm.BOr(tuple(fm.BAnd((_u(vocab, a, y),) + tuple(_u(vocab, b, y, False)
                                                           for b in labels if b != a))
                       for a in labels))
    steps = []
    for a in labels:
        for b in labels:
            if a.n == b.n + 1:
                steps.append(fm.BAnd((_u(vocab, a, y), _u(vocab, b, z))))
    root = fm.BAnd((fm.Lit(True, "=", (y, z)), _any_label(vocab, vocab.of_level(lambda n: n == 0), y)))
    link = fm.BOr((fm.Lit(False, "P", (y, z)), root, fm.BOr(tuple(steps))))
    return fm.forall((y, z), fm.QFree(fm.BAnd((one, link))))


def _consistency_axiom(vocab):
    y, z = "y", "z"
    ok = []
    for a in vocab.labels:
        for b in vocab.labels:
            if a.n == b.n + 1 and a.restrict(range(b.n)) == b:
                ok.append(fm.BAnd((_u(vocab, a, y), _u(vocab, b, z))))
    body = fm.BOr((fm.Lit(False, "P", (y, z)), fm.Lit(True, "=", (y, z)), fm.BOr(tuple(ok))))
    return fm.forall((y, z), fm.QFree(body))


def _replication_axiom(vocab, width):
    y, z = "y", "z"
    others = [f"r{j + 1}" for j in range(width - 1)]
    guard = fm.QFree(fm.BOr((fm.Lit(False, "P", (y, z)), fm.Lit(True, "=", (y, z)))))
    options = []
    everyone = [y] + others
    for lab in vocab.labels:
        items = [_u(vocab, lab, y)]
        for r in others:
            items += [fm.Lit(True, "P", (r, z)), _u(vocab, lab, r), fm.Lit(False, "=", (r, z))]
        items += [fm.Lit(False, "=", (p, q)) for p, q in itertools.combinations(everyone, 2)]
        options.append(fm.BAnd(tuple(items)))
    copies = fm.exists(others, fm.QFree(fm.BOr(tuple(options))))
    return fm.forall((z, y), fm.disjunction([guard, copies]))


def _exists_below(f, v, vocab, fresh, qfree_pi):
    """Some node at or below v forces f (Sigma when f is)."""
    parts = []
    for w, links, chain in _descendant_blocks(vocab, v, fresh):
        parts.append(exists_conj([w] + links, [fm.QFree(chain),
                                               _translate(f, w, vocab, fresh, qfree_pi)], fresh))
    return fm.disjunction(parts)


def _agreement_axiom(psi, vocab, fresh):
    """Nodes below s never force both psi and its negation (s at a level covering psi)."""
    k = fm.max_var_index(psi)
    s = fresh("s")
    negated = fm.neg(psi)
    out = []
    for w1, l1, c1 in _descendant_blocks(vocab, s, fresh):
        for w2, l2, c2 in _descendant_blocks(vocab, s, fresh):
            guard = fm.QFree(fm.BOr((fm.BAnd(tuple(_u(vocab, lab, s, False)
                                                   for lab in vocab.of_level(lambda n: n >= k))),
                                     fm._neg_expr(c1), fm._neg_expr(c2))))
            yes = fm.neg(_translate(psi, w1, vocab, fresh, False))
            no = fm.neg(_translate(negated, w2, vocab, fresh, False))
            out.append(forall_disj([s, w1, w2] + l1 + l2, [guard, yes, no], fresh))
    return fm.conjunction(out)


def _permutation_axiom(psi, vocab, fresh):
    """The last variable of psi plays z; x1..x_{m-1} are the node's variables."""
    m = fm.max_var_index(psi)
    if m == 0:
        return None
    n = m - 1
    s = fresh("s")
    at_n = vocab.of_level(lambda q: q == n)
    target = "x" + str(m)
    later = _exists_below(psi, s, vocab, fresh, False)
    out = []
    for j in range(m, vocab.max_level + 1):
        moved = fm.substitute(psi, {target: f"x{j + 1}"}) if j + 1 != m else psi
        for w, links, chain in _descendant_blocks(vocab, s, fresh):
            guard = fm.QFree(fm.BOr((fm.BAnd(tuple(_u(vocab, lab, s, False) for lab in at_n)),
                                     fm._neg_expr(chain))))
            no = fm.neg(_translate(moved, w, vocab, fresh, False))
            out.append(forall_disj([s, w] + links, [guard, no, later], fresh))
    return fm.conjunction(out) if out else None


def _weak_root_axiom(phi, vocab, fresh):
    """The root weakly forces phi: no node forces its negation."""
    t = fresh("t")
    no = fm.neg(_translate(fm.neg(phi), t, vocab, fresh, False))
    return forall_disj([t], [no], fresh)


class AxiomError(ValueError):
    pass


def emit_axioms(alpha, inventory, vocab, scott_sentence=None, width=2):
    """Levels, Consistency, Replication, agreement and permutation over the
    inventory, and optionally 'the root weakly forces scott_sentence'.
    """
    if alpha < 2:
        raise AxiomError("alpha must be at least 2")
    for psi in inventory:
        if fm.sigma_level(psi) >= alpha:
            raise AxiomError(f"inventory formula of Sigma rank {fm.sigma_level(psi)} "
                             f"is not below {alpha}: {fm.to_sexpr(psi)}")
    fresh = _Fresh()
    parts = [_levels_axiom(vocab), _consistency_axiom(vocab), _replication_axiom(vocab, width)]
    for psi in inventory:
        parts.append(_agreement_axiom(psi, vocab, fresh))
        perm = _permutation_axiom(psi, vocab, fresh)
        if perm is not None:
            parts.append(perm)
    if scott_sentence is not None:
        parts.append(_weak_root_axiom(scott_sentence, vocab, fresh))
    return fm.conjunction(parts)


def holds_on(T, sentence, vocab):
    S, _ = tree_structure(T, vocab)
    return fm.evaluate(S, sentence, {})
