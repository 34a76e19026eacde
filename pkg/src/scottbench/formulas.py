"""Normal-form formulas with finite connectives.

A formula is one of

* ``Atomic(Lit)``: a signed atom, equality is the relation ``=``;
* ``QFree(expr)``: a finite boolean combination (``BAnd``/``BOr`` of literals);
* ``Or(branches)``: a disjunction of existential blocks ``(vars, body)``;
* ``And(branches)``: a conjunction of universal blocks ``(vars, body)``.

Negation only sits on literals.  The s-expression syntax is::

    (atom + E x1 x2)   (qfree (or (atom - = x1 x2) (and ...)))
    (or (exists (u) F) ...)   (and (forall (u v) F) ...)
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import NamedTuple


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class Lit:
    sign: bool
    rel: str
    args: tuple

    def __post_init__(self):
        if self.rel == "=" and len(self.args) != 2:
            raise FormulaError("equality takes two arguments")


@dataclass(frozen=True)
class BAnd:
    items: tuple


@dataclass(frozen=True)
class BOr:
    items: tuple


TRUE = BAnd(())
FALSE = BOr(())


@dataclass(frozen=True)
class Atomic:
    lit: Lit


@dataclass(frozen=True)
class QFree:
    expr: object


@dataclass(frozen=True)
class Or:
    branches: tuple

    def __post_init__(self):
        if not self.branches:
            raise FormulaError("disjunction needs at least one branch")


@dataclass(frozen=True)
class And:
    branches: tuple

    def __post_init__(self):
        if not self.branches:
            raise FormulaError("conjunction needs at least one branch")


class Complexity(NamedTuple):
    side: str  # "sigma" or "pi"
    rank: int

    def __str__(self):
        return ("Sigma" if self.side == "sigma" else "Pi") + f"_{self.rank}"


def atom(rel, *args, sign=True):
    return Atomic(Lit(sign, rel, tuple(args)))


def lit(rel, *args, sign=True):
    return Lit(sign, rel, tuple(args))


def exists(vars_, body):
    return Or(((tuple(vars_), body),))


def forall(vars_, body):
    return And(((tuple(vars_), body),))


def is_qfree(f):
    return isinstance(f, (Atomic, QFree))


def qexpr(f):
    """Boolean expression of a quantifier-free formula."""
    return f.lit if isinstance(f, Atomic) else f.expr


# ---------------------------------------------------------------- classification

def sigma_level(f):
    if is_qfree(f):
        return 0
    if isinstance(f, Or):
        return max(1, max(pi_level(body) + 1 for _, body in f.branches))
    return pi_level(f) + 1


def pi_level(f):
    if is_qfree(f):
        return 0
    if isinstance(f, And):
        return max(1, max(sigma_level(body) + 1 for _, body in f.branches))
    return sigma_level(f) + 1


def classify(f):
    """Least (side, rank); quantifier-free formulas report ``Sigma_0``."""
    if is_qfree(f):
        return Complexity("sigma", 0)
    if isinstance(f, Or):
        return Complexity("sigma", sigma_level(f))
    return Complexity("pi", pi_level(f))


# ---------------------------------------------------------------- negation

def _neg_expr(e):
    if isinstance(e, Lit):
        return Lit(not e.sign, e.rel, e.args)
    if isinstance(e, BAnd):
        return BOr(tuple(_neg_expr(i) for i in e.items))
    return BAnd(tuple(_neg_expr(i) for i in e.items))


def neg(f):
    """Negation normal form of the negation; an involution."""
    if isinstance(f, Atomic):
        return Atomic(_neg_expr(f.lit))
    if isinstance(f, QFree):
        return QFree(_neg_expr(f.expr))
    if isinstance(f, Or):
        return And(tuple((v, neg(b)) for v, b in f.branches))
    return Or(tuple((v, neg(b)) for v, b in f.branches))


# ---------------------------------------------------------------- variables

def _expr_vars(e, out):
    if isinstance(e, Lit):
        out.update(e.args)
    else:
        for i in e.items:
            _expr_vars(i, out)


def free_vars(f):
    out = set()
    if is_qfree(f):
        _expr_vars(qexpr(f), out)
        return out
    for vs, body in f.branches:
        out |= free_vars(body) - set(vs)
    return out


def all_vars(f, out=None):
    out = set() if out is None else out
    if is_qfree(f):
        _expr_vars(qexpr(f), out)
    else:
        for vs, body in f.branches:
            out.update(vs)
            all_vars(body, out)
    return out


_XVAR = re.compile(r"x([1-9][0-9]*)")


def var_index(name):
    """1-based index of a tree variable ``x<i>``, else None."""
    m = _XVAR.fullmatch(name)
    return int(m.group(1)) if m else None


def max_var_index(f):
    """Largest i with x<i> free in f (0 if none); non-x free variables raise."""
    top = 0
    for v in free_vars(f):
        i = var_index(v)
        if i is None:
            raise FormulaError(f"free variable {v} is not of the form x<i>")
        top = max(top, i)
    return top


def _sub_expr(e, m):
    if isinstance(e, Lit):
        return Lit(e.sign, e.rel, tuple(m.get(a, a) for a in e.args))
    return type(e)(tuple(_sub_expr(i, m) for i in e.items))


def substitute(f, mapping):
    """Capture-avoiding renaming of free variables."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return f
    if isinstance(f, Atomic):
        return Atomic(_sub_expr(f.lit, mapping))
    if isinstance(f, QFree):
        return QFree(_sub_expr(f.expr, mapping))
    targets = set(mapping.values())
    branches = []
    for vs, body in f.branches:
        inner = {k: v for k, v in mapping.items() if k not in vs}
        new_vs = list(vs)
        used = all_vars(body) | targets | set(vs)
        for i, v in enumerate(vs):
            if v in targets:
                k = 1
                while f"{v}_{k}" in used:
                    k += 1
                fresh = f"{v}_{k}"
                used.add(fresh)
                inner[v] = fresh
                new_vs[i] = fresh
        branches.append((tuple(new_vs), substitute(body, inner)))
    return type(f)(tuple(branches))


# ---------------------------------------------------------------- evaluation

def _eval_expr(S, e, asg):
    if isinstance(e, Lit):
        vals = tuple(asg[a] for a in e.args)
        if e.rel == "=":
            truth = vals[0] == vals[1]
        else:
            truth = vals in S.rels[e.rel]
        return truth == e.sign
    if isinstance(e, BAnd):
        return all(_eval_expr(S, i, asg) for i in e.items)
    return any(_eval_expr(S, i, asg) for i in e.items)


def _eval3(S, e, asg):
    """Three-valued evaluation under a partial assignment (None = unknown)."""
    if isinstance(e, Lit):
        if any(a not in asg for a in e.args):
            return None
        return _eval_expr(S, e, asg)
    unknown = False
    want = isinstance(e, BOr)
    for i in e.items:
        v = _eval3(S, i, asg)
        if v is None:
            unknown = True
        elif v == want:
            return want
    return None if unknown else not want


def _guards(body, universal):
    """Quantifier-free parts that decide the body early under a block."""
    if is_qfree(body):
        return [qexpr(body)]
    kind = Or if universal else And
    if isinstance(body, kind):
        return [qexpr(b) for vs, b in body.branches if not vs and is_qfree(b)]
    return []


def evaluate(S, f, asg=None):
    """Satisfaction in a finite structure; quantifiers range over the domain."""
    asg = dict(asg or {})
    missing = free_vars(f) - set(asg)
    if missing:
        raise FormulaError(f"unbound free variables: {sorted(missing)}")
    return _eval(S, f, asg)


def _eval(S, f, asg):
    if is_qfree(f):
        return _eval_expr(S, qexpr(f), asg)
    universal = isinstance(f, And)
    for vs, body in f.branches:
        ok = _block(S, vs, body, asg, universal)
        if universal and not ok:
            return False
        if not universal and ok:
            return True
    return universal


def _block(S, vs, body, asg, universal):
    guards = _guards(body, universal)
    decided = universal  # a guard equal to this settles the body

    def rec(i, asg):
        for g in guards:
            if _eval3(S, g, asg) == decided:
                return decided
        if i == len(vs):
            return _eval(S, body, asg)
        for e in range(S.n):
            inner = dict(asg)
            inner[vs[i]] = e
            r = rec(i + 1, inner)
            if r != universal:
                return r
        return universal

    # drop outer bindings shadowed by the block
    inner = {k: v for k, v in asg.items() if k not in vs}
    return rec(0, inner)


# ---------------------------------------------------------------- s-expressions

def _tokens(text):
    return re.findall(r"\(|\)|[^\s()]+", text)


def _read(tokens, i):
    if tokens[i] == "(":
        out, i = [], i + 1
        while i < len(tokens) and tokens[i] != ")":
            item, i = _read(tokens, i)
            out.append(item)
        if i >= len(tokens):
            raise FormulaError("unbalanced parentheses")
        return out, i + 1
    if tokens[i] == ")":
        raise FormulaError("unexpected ')'")
    return tokens[i], i + 1


def read_sexpr(text):
    tokens = _tokens(text)
    if not tokens:
        raise FormulaError("empty input")
    tree, i = _read(tokens, 0)
    if i != len(tokens):
        raise FormulaError("trailing input after s-expression")
    return tree


def _lit_from(tree):
    if len(tree) < 3 or tree[1] not in "+-" or len(tree[1]) != 1:
        raise FormulaError(f"bad atom {tree}")
    return Lit(tree[1] == "+", tree[2], tuple(tree[3:]))


def _expr_from(tree):
    if not isinstance(tree, list) or not tree:
        raise FormulaError(f"bad boolean expression {tree}")
    head = tree[0]
    if head == "atom":
        return _lit_from(tree)
    if head == "and":
        return BAnd(tuple(_expr_from(t) for t in tree[1:]))
    if head == "or":
        return BOr(tuple(_expr_from(t) for t in tree[1:]))
    raise FormulaError(f"unknown boolean connective {head}")


def _from_tree(tree):
    if not isinstance(tree, list) or not tree:
        raise FormulaError(f"bad formula {tree}")
    head = tree[0]
    if head == "atom":
        return Atomic(_lit_from(tree))
    if head == "qfree":
        if len(tree) != 2:
            raise FormulaError("qfree takes one boolean expression")
        return QFree(_expr_from(tree[1]))
    if head in ("or", "and"):
        quant = "exists" if head == "or" else "forall"
        branches = []
        for b in tree[1:]:
            if not isinstance(b, list) or len(b) != 3 or b[0] != quant or not isinstance(b[1], list):
                raise FormulaError(f"expected ({quant} (vars) F) in {head}")
            branches.append((tuple(b[1]), _from_tree(b[2])))
        return (Or if head == "or" else And)(tuple(branches))
    raise FormulaError(f"unknown formula head {head}")


def parse_formula(text):
    return _from_tree(read_sexpr(text))


def _lit_str(l):
    return "(atom " + ("+" if l.sign else "-") + " " + " ".join((l.rel,) + l.args) + ")"


def _expr_str(e):
    if isinstance(e, Lit):
        return _lit_str(e)
    head = "and" if isinstance(e, BAnd) else "or"
    return "(" + " ".join([head] + [_expr_str(i) for i in e.items]) + ")"


def to_sexpr(f):
    if isinstance(f, Atomic):
        return _lit_str(f.lit)
    if isinstance(f, QFree):
        return "(qfree " + _expr_str(f.expr) + ")"
    head, quant = ("or", "exists") if isinstance(f, Or) else ("and", "forall")
    parts = [f"({quant} ({' '.join(vs)}) {to_sexpr(b)})" for vs, b in f.branches]
    return "(" + head + " " + " ".join(parts) + ")"


# ---------------------------------------------------------------- builders

def type_expr(t, names):
    """Conjunction of all literals of an atomic type over the given names."""
    items = []
    for sign, rel, args in t.literals():
        items.append(Lit(sign, rel, tuple(names[a] for a in args)))
    return BAnd(tuple(items))


def type_formula(t, names=None):
    names = names or [f"x{i + 1}" for i in range(t.n)]
    return QFree(type_expr(t, names))


def overlap_expr(names):
    """Some two of the names denote the same element."""
    return BOr(tuple(Lit(True, "=", (a, b)) for a, b in itertools.combinations(names, 2)))


def as_branches(f, universal):
    """View f as a list of blocks of the given kind (no new quantifiers)."""
    kind = And if universal else Or
    if isinstance(f, kind):
        return list(f.branches)
    return [((), f)]


def _flat(exprs, kind):
    out = []
    for e in exprs:
        if isinstance(e, kind):
            out.extend(e.items)
        else:
            out.append(e)
    return kind(tuple(out))


def disjunction(parts):
    """Disjunction of formulas, merging quantifier-free parts and nested Ors."""
    parts = list(parts)
    if len(parts) == 1:
        return parts[0]
    if all(is_qfree(p) for p in parts):
        return QFree(_flat([qexpr(p) for p in parts], BOr))
    qf = [qexpr(p) for p in parts if is_qfree(p)]
    branches = []
    if qf:
        branches.append(((), QFree(qf[0] if len(qf) == 1 else _flat(qf, BOr))))
    for p in parts:
        if not is_qfree(p):
            branches.extend(as_branches(p, universal=False))
    return Or(tuple(branches))


def conjunction(parts):
    parts = list(parts)
    if len(parts) == 1:
        return parts[0]
    if all(is_qfree(p) for p in parts):
        return QFree(_flat([qexpr(p) for p in parts], BAnd))
    qf = [qexpr(p) for p in parts if is_qfree(p)]
    branches = []
    if qf:
        branches.append(((), QFree(qf[0] if len(qf) == 1 else _flat(qf, BAnd))))
    for p in parts:
        if not is_qfree(p):
            branches.extend(as_branches(p, universal=True))
    return And(tuple(branches))


def pi_wrap(f):
    """The same formula as a one-branch conjunction with an empty block."""
    return And((((), f),))


# ---------------------------------------------------------------- inventories

def formula_inventory(rel="E", free=("x1", "x2")):
    """A fixed list of normal-form formulas of rank <= 2 and width <= 3.

    Built over one binary relation and the given free variables: literals and
    small Boolean combinations, existential blocks over them, their negations,
    and one more existential layer over those negations.
    """
    u, v = "u", "v"

    def e(a, b, sign=True):
        return Lit(sign, rel, (a, b))

    def q(*items, kind=BAnd):
        return QFree(items[0] if len(items) == 1 else kind(tuple(items)))

    out = []
    for a, b in itertools.product(free, repeat=2):
        out += [q(e(a, b)), q(e(a, b, False))]
    for a, b in itertools.combinations(free, 2):
        out += [q(Lit(True, "=", (a, b))), q(Lit(False, "=", (a, b)))]
    if len(free) > 1:
        a, b = free[0], free[1]
        out += [q(e(a, b), e(b, a)), q(e(a, a, False), e(a, b), e(b, b), kind=BOr)]

    first = []
    for a in free:
        for sign in (True, False):
            first += [exists((u,), q(e(u, a, sign))), exists((u,), q(e(a, u, sign), Lit(False, "=", (u, a))))]
    first.append(exists((u,), q(e(u, u))))
    first.append(exists((u, v), q(e(u, v), Lit(False, "=", (u, v)))))
    if len(free) > 1:
        a, b = free[0], free[1]
        first.append(exists((u,), q(e(a, u), e(u, b))))
        first.append(Or(((((u,), q(e(u, a)))), (((u,), q(e(u, u)))), ((), q(e(a, b))))))
    second = []
    for f in first:
        g = neg(f)
        last = free[-1]
        if last in free_vars(g):
            second.append(exists((u,), substitute(g, {last: u})))
    out += first + [neg(f) for f in first] + second + [neg(f) for f in second]
    seen, unique = set(), []
    for f in out:
        key = to_sexpr(f)
        if key not in seen:
            seen.add(key)
            unique.append(f)
    return unique
