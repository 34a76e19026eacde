"""Back-and-forth relations between (node, variable tuple) pairs of labeled trees.

``(s, xs) <=_0 (t, ys)`` when the labels give xs and ys the same atomic type.
For alpha > 0, ``(s, xs) <=_alpha (t, ys)`` when for every beta < alpha, every
t' at or below t and every tuple ys' of further variables of t', there are s'
at or below s and xs' with ``(t', ys ys') <=_beta (s', xs xs')``.

Variable tuples are 0-based positions (position i is the variable x{i+1}).
Everything is memoized on subtree codes, so copies of a node share results.
"""

from __future__ import annotations

import itertools

from .fs_tree import check_simple_properties, code_descendants, code_label, code_level


class BudgetError(ValueError):
    pass


_MEMO = {}
_INDEX = {}


def clear_caches():
    _MEMO.clear()
    _INDEX.clear()


def check_budget(trees, levels, alpha):
    """Refuse level-alpha queries too close to the truncation frontier.

    The rule is d >= l + alpha * min(d - l, 2) with l the smaller node level.
    It is vacuous for saturated trees, which already name every element.
    """
    low = min(levels)
    for T in trees:
        if T.saturated():
            continue
        need = low + alpha * min(T.d - low, 2)
        if T.d < need:
            raise BudgetError(
                f"level-{alpha} query at level {low} needs depth {need}, tree has {T.d}")


def _restricted(code, xs):
    label = code_label(code)
    if label is None:
        return None
    return label.restrict(xs)


def _candidates(code, xs, length):
    """Map restricted type -> list of (s', xs xs') over descendants of code."""
    key = (code, xs, length)
    out = _INDEX.get(key)
    if out is None:
        out = {}
        k = len(xs)
        for c in code_descendants(code):
            rest = [i for i in range(code_level(c)) if i not in xs]
            for extra in itertools.permutations(rest, length - k):
                full = xs + extra
                t = _restricted(c, full)
                out.setdefault(t, []).append((c, full))
        _INDEX[key] = out
    return out


def le_codes(s, xs, t, ys, alpha):
    """The relation on codes with position tuples (no budget check)."""
    key = (s, xs, t, ys, alpha)
    hit = _MEMO.get(key)
    if hit is not None:
        return hit
    ts, tt = _restricted(s, xs), _restricted(t, ys)
    if ts is None or tt is None or ts != tt:
        hit = False
    elif alpha == 0:
        hit = True
    else:
        hit = _forall(s, xs, t, ys, alpha)
    _MEMO[key] = hit
    return hit


def _forall(s, xs, t, ys, alpha):
    for beta in range(alpha):
        for t2 in code_descendants(t):
            rest = [i for i in range(code_level(t2)) if i not in ys]
            # simultaneous reordering of both extensions preserves the relation,
            # so the extension on this side can be taken in increasing order
            for size in range(len(rest) + 1):
                for extra in itertools.combinations(rest, size):
                    full = ys + extra
                    target = _restricted(t2, full)
                    cands = _candidates(s, xs, len(full)).get(target, ())
                    if not any(le_codes(t2, full, s2, xx, beta) for s2, xx in cands):
                        return False
    return True


def _check_vars(T, node, xs):
    level = T.node(node).level
    xs = tuple(xs)
    if len(set(xs)) != len(xs) or any(not 0 <= i < level for i in xs):
        raise ValueError(f"variables {xs} are not distinct variables of node {node}")
    return xs


def tree_bf_le(T, s, xs, T2, t, ys, alpha):
    """(s, xs) <=_alpha (t, ys) for node ids s in T and t in T2."""
    xs = _check_vars(T, s, xs)
    ys = _check_vars(T2, t, ys)
    if len(xs) != len(ys):
        raise ValueError("variable tuples differ in length")
    check_budget([T, T2], [T.node(s).level, T2.node(t).level], alpha)
    return le_codes(T.code(s), xs, T2.code(t), ys, alpha)


# ---------------------------------------------------------------- properties

def _reps_below(T, i):
    return T.class_reps(T.descendants(i))


def check_agreement(T, alpha, base="sigma"):
    """Every (nu, sigma, tau) with sigma, tau below nu can be matched above sigma.

    With ``base="nu"`` the match only has to lie below nu.
    """
    for nu in T.class_reps():
        k = T.node(nu).level
        xs = tuple(range(k))
        below = _reps_below(T, nu)
        for sigma in below:
            for tau in below:
                m = T.node(tau).level
                full = tuple(range(m))
                for beta in range(alpha):
                    check_budget([T], [k], beta)
                    ok = False
                    for t2 in _reps_below(T, sigma if base == "sigma" else nu):
                        rest = [i for i in range(T.node(t2).level) if i >= k]
                        for zs in itertools.permutations(rest, m - k):
                            if le_codes(T.code(tau), full, T.code(t2), xs + zs, beta):
                                ok = True
                                break
                        if ok:
                            break
                    if not ok:
                        return False, f"nu={nu} sigma={sigma} tau={tau} beta={beta}"
    return True, ""


def check_permutation(T, alpha):
    """Any extension naming a later variable z has a copy naming the next variable."""
    for sigma in T.class_reps():
        k = T.node(sigma).level
        xs = tuple(range(k))
        for tau in _reps_below(T, sigma):
            m = T.node(tau).level
            for z in range(k, m):
                ys = tuple(i for i in range(k, m) if i != z)
                for beta in range(alpha):
                    check_budget([T], [k], beta)
                    ok = False
                    for t2 in _reps_below(T, sigma):
                        if T.node(t2).level <= k:
                            continue
                        rest = [i for i in range(T.node(t2).level) if i > k]
                        for us in itertools.permutations(rest, len(ys)):
                            if le_codes(T.code(tau), xs + ys + (z,), T.code(t2),
                                        xs + us + (k,), beta):
                                ok = True
                                break
                        if ok:
                            break
                    if not ok:
                        return False, f"sigma={sigma} tau={tau} z=x{z + 1} beta={beta}"
    return True, ""


def support_witness(T, sigma, alpha):
    """First (beta, tau) supporting sigma, or None."""
    k = T.node(sigma).level
    xs = tuple(range(k))
    s_code = T.code(sigma)
    root = T.code(T.root)
    below = sorted(_reps_below(T, sigma), key=lambda i: (T.node(i).level, i))
    for beta in range(alpha):
        check_budget([T], [k], alpha)
        for tau in below:
            m = T.node(tau).level
            full = tuple(range(m))
            t_code = T.code(tau)
            # every node of the tree with every selection of m variables
            cands = _candidates(root, (), m).get(_restricted(t_code, full), ())
            if all(le_codes(s_code, xs, c2, sel[:k], alpha)
                   for c2, sel in cands if le_codes(t_code, full, c2, sel, beta)):
                return beta, tau
    return None


def check_support(T, alpha):
    for sigma in T.class_reps():
        if support_witness(T, sigma, alpha) is None:
            return False, f"sigma={sigma}"
    return True, ""


def membership_verdict(T, alpha, base="sigma"):
    """The six properties at alpha; membership holds when all pass."""
    verdict = check_simple_properties(T)
    if verdict.ok:
        for name, fn in (("agreement", lambda: check_agreement(T, alpha, base)),
                         ("permutation", lambda: check_permutation(T, alpha)),
                         ("support", lambda: check_support(T, alpha))):
            ok, detail = fn()
            verdict.add(name, ok, detail)
    else:
        for name in ("agreement", "permutation", "support"):
            verdict.add(name, False, "skipped: simple properties fail")
    verdict.note = f"full test is Pi_{2 * alpha + 2}"
    return verdict


def membership_text(verdict, alpha):
    lines = [verdict.text()]
    if verdict.ok:
        lines.append(f"member of T^{alpha} (within budget)")
    else:
        lines.append(f"not a member of T^{alpha}: {verdict.failed()[0]}")
    lines.append(f"note: {verdict.note}")
    return "\n".join(lines)
