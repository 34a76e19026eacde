"""Scott rank of finite structures and orbit-defining formulas.

``orbit_definable(S, a, alpha)`` tests the support condition: some tuple b
and level beta < alpha such that every ``a' b'`` matching ``a b`` at level
beta has ``a <=_alpha a'``.  ``scott_rank`` is the least alpha >= 1 at which
every tuple passes.  The formula builders produce a Pi_alpha formula for the
``<=_alpha``-cone of a tuple and a Sigma_alpha formula for its orbit.
"""

from __future__ import annotations

import itertools

from . import formulas as fm
from .backforth import BackForth
from .core import atomic_diagram, automorphism_orbits, induced, iter_embeddings


class ScottError(ValueError):
    pass


class Witness:
    __slots__ = ("beta", "extra")

    def __init__(self, beta, extra):
        self.beta = beta
        self.extra = tuple(extra)

    def __repr__(self):
        return f"Witness(beta={self.beta}, extra={self.extra})"

    def __eq__(self, other):
        return isinstance(other, Witness) and (self.beta, self.extra) == (other.beta, other.extra)


def _engine(S, bf):
    return bf if bf is not None else BackForth(S, S)


def _matches(S, ab, beta, bf):
    """All tuples a'b' of S with (S, ab) <=_beta (S, a'b')."""
    X = induced(S, list(ab))
    for f in iter_embeddings(X, S):
        image = tuple(f[i] for i in range(len(ab)))
        if beta == 0 or bf.le(ab, image, beta):
            yield image


def support_holds(S, a, alpha, beta, extra, bf=None):
    """Condition check for one candidate (beta, extra)."""
    bf = _engine(S, bf)
    a = tuple(a)
    k = len(a)
    if k + len(extra) == S.n:
        # matches of an enumeration are automorphic images, which are related at every level
        return True
    cache = {}
    for image in _matches(S, a + tuple(extra), beta, bf):
        a2 = image[:k]
        if a2 not in cache:
            cache[a2] = bf.le(a, a2, alpha)
        if not cache[a2]:
            return False
    return True


def orbit_definable(S, a, alpha, bf=None):
    """Return the first witness (smallest beta, then size, then lexicographic), or None.

    Extra tuples are searched as sets: reordering them does not change the
    condition.
    """
    if alpha < 1:
        raise ScottError("alpha must be at least 1")
    bf = _engine(S, bf)
    a = tuple(a)
    rest = [e for e in range(S.n) if e not in a]
    for beta in range(alpha):
        for size in range(len(rest) + 1):
            for extra in itertools.combinations(rest, size):
                if support_holds(S, a, alpha, beta, extra, bf):
                    return Witness(beta, extra)
    return None


def orbit_reps(S, lengths):
    out = []
    for m in lengths:
        for cls in automorphism_orbits(S, m).classes:
            out.append(cls[0])
    return out


def scott_rank(S, exhaustive=None, max_alpha=None, report=None):
    """Least alpha >= 1 at which every tuple's orbit passes the support test.

    With ``exhaustive`` every tuple length is checked (one tuple per orbit).
    Otherwise only one full enumeration of the domain is checked, which is
    enough: a shorter tuple's orbit is a projection of full-length orbits,
    Sigma_alpha definability is closed under existential projection, and the
    support test is unchanged when the positions of a full enumeration are
    permuted.  The default is exhaustive for domains of size at most 5.
    """
    if S.n == 0:
        raise ScottError("Scott rank of the empty structure is undefined")
    if exhaustive is None:
        exhaustive = S.n <= 5
    reps = orbit_reps(S, range(S.n + 1)) if exhaustive else [tuple(range(S.n))]
    bf = BackForth(S, S)
    max_alpha = max_alpha or 2 * S.n + 2
    for alpha in range(1, max_alpha + 1):
        found = {}
        for a in reps:
            w = orbit_definable(S, a, alpha, bf)
            if w is None:
                break
            found[a] = w
        else:
            if report is not None:
                report.update(found)
            return alpha
    raise ScottError("no rank found below the level limit")


# ---------------------------------------------------------------- formulas

def _names(k, prefix="x"):
    return [f"{prefix}{i + 1}" for i in range(k)]


def _diagram_expr(S, t, names):
    return fm.type_expr(atomic_diagram(S, t), names)


def _separator(S, a, b, alpha, bf):
    """A Pi_alpha formula over x1..xk true of a and false of b."""
    k = len(a)
    names = _names(k)
    if alpha == 0:
        return fm.QFree(_diagram_expr(S, a, names))
    d = tuple(e for e in range(S.n) if e not in b)
    ys = [f"y{j + 1}" for j in range(len(d))]
    if alpha == 1:
        # no extension of a realizes the full diagram of b
        body = fm.QFree(fm._neg_expr(_diagram_expr(S, b + d, names + ys)))
        return fm.forall(ys, body)
    # every extension of a fails some level alpha-1 property of b d
    parts = [fm.QFree(_diagram_expr(S, b + d, names + ys))]
    rest = [e for e in range(S.n) if e not in a]
    for c in itertools.permutations(rest, len(d)):
        if positive_atoms_equal(S, b + d, a + c) and not bf.le(b + d, a + c, alpha - 1):
            sep = _separator(S, b + d, a + c, alpha - 1, bf)
            parts.append(fm.substitute(sep, _rename(k + len(d), names + ys)))
    inner = fm.conjunction(parts)
    guard = fm.QFree(fm.overlap_expr(names + ys)) if len(names + ys) > 1 else None
    body = fm.neg(inner)
    if guard is not None:
        body = fm.disjunction([guard, body])
    return fm.forall(ys, body)


def positive_atoms_equal(S, s, t):
    return atomic_diagram(S, s) == atomic_diagram(S, t)


def _rename(m, targets):
    return {f"x{i + 1}": targets[i] for i in range(m) if f"x{i + 1}" != targets[i]}


def pi_type_formula(S, a, alpha, bf=None):
    """Pi_alpha formula over x1..xk defining {b : (S, a) <=_alpha (S, b)}."""
    bf = _engine(S, bf)
    a = tuple(a)
    k = len(a)
    diag = fm.QFree(_diagram_expr(S, a, _names(k)))
    if alpha == 0:
        return diag
    parts = [diag]
    for b in itertools.permutations(range(S.n), k):
        if positive_atoms_equal(S, a, b) and not bf.le(a, b, alpha):
            parts.append(_separator(S, a, b, alpha, bf))
    out = fm.conjunction(parts)
    return out if isinstance(out, fm.And) else fm.pi_wrap(out)


def _sigma_from(S, a, beta, extra, bf):
    k = len(a)
    us = [f"u{j + 1}" for j in range(len(extra))]
    psi = pi_type_formula(S, tuple(a) + tuple(extra), beta, bf)
    psi = fm.substitute(psi, {f"x{k + j + 1}": us[j] for j in range(len(extra))})
    return fm.exists(us, psi)


def defining_sigma_formula(S, a, alpha, bf=None):
    """Sigma_alpha formula ``exists u. pi_type(a u, beta)`` from the support witness."""
    bf = _engine(S, bf)
    w = orbit_definable(S, a, alpha, bf)
    if w is None:
        raise ScottError(f"orbit of {tuple(a)} has no level-{alpha} support witness")
    return _sigma_from(S, a, w.beta, w.extra, bf)


def extension(S, f, k):
    """The k-tuples of distinct elements satisfying f(x1..xk)."""
    names = _names(k)
    out = set()
    for t in itertools.permutations(range(S.n), k):
        if fm.evaluate(S, f, dict(zip(names, t))):
            out.add(t)
    return out


def orbit_definable_direct(S, a, alpha, bf=None, orbits=None):
    """Whether some candidate Sigma_alpha formula has exactly the orbit as its extension.

    Candidates are ``exists u. pi_type(a b, beta)`` for beta < alpha and every
    extra tuple b; each is evaluated on S and compared with the orbit.  This
    route never consults the support condition.
    """
    bf = _engine(S, bf)
    a = tuple(a)
    orbits = orbits or automorphism_orbits(S, len(a))
    orbit = set(orbits.classes[orbits.class_of(a)])
    rest = [e for e in range(S.n) if e not in a]
    for beta in range(alpha):
        for size in range(len(rest) + 1):
            for extra in itertools.combinations(rest, size):
                f = _sigma_from(S, a, beta, extra, bf)
                if extension(S, f, len(a)) == orbit:
                    return f
    return None


def scott_rank_direct(S, max_alpha=None):
    """Least alpha >= 1 such that every orbit is the extension of a candidate Sigma_alpha formula."""
    if S.n == 0:
        raise ScottError("Scott rank of the empty structure is undefined")
    bf = BackForth(S, S)
    max_alpha = max_alpha or 2 * S.n + 2
    parts = {m: automorphism_orbits(S, m) for m in range(S.n + 1)}
    for alpha in range(1, max_alpha + 1):
        if all(orbit_definable_direct(S, cls[0], alpha, bf, parts[m]) is not None
               for m in parts for cls in parts[m].classes):
            return alpha
    raise ScottError("no rank found below the level limit")


def scott_sentence(S):
    """A Pi_2 sentence whose finite models are exactly the copies of S.

    Some n distinct elements realize the diagram of S, and among any n+1
    elements two coincide.
    """
    n = S.n
    names = _names(n)
    ys = [f"y{j + 1}" for j in range(n + 1)]
    small = fm.forall(ys, fm.QFree(fm.BOr(tuple(
        fm.Lit(True, "=", (p, q)) for p, q in itertools.combinations(ys, 2)))))
    if n == 0:
        return small
    diag = fm.exists(names, fm.QFree(_diagram_expr(S, tuple(range(n)), names)))
    return fm.conjunction([diag, small])
