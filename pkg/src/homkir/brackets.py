"""Schouten bracket, higher derived brackets and Jacobiators."""

from __future__ import annotations

from itertools import combinations
from typing import Callable, Sequence

from .algebra import Chart, Poly, partial, restrict_to_base


class NoPairing(ValueError):
    pass


class PathDisagreement(AssertionError):
    """The two Jacobiator evaluations differ (a sign-convention bug)."""


def _require_pairs(chart: Chart):
    if not chart.pairs:
        raise NoPairing(f"chart {chart!r} has no conjugate pairs")


def schouten(F: Poly, G: Poly) -> Poly:
    """Canonical odd Poisson bracket of ``F`` and ``G``.

    For each pair ``(z, z*)`` with ``a = parity(z)``::

        (-1)^((a+1)(|F|+1)) dF/dz* dG/dz - (-1)^(a(|F|+1)) dF/dz dG/dz*

    Inhomogeneous ``F`` is split into parity classes.
    """
    chart = F.chart
    _require_pairs(chart)
    if G.chart != chart:
        G = F._coerce(G)
    out = chart.zero()
    if not F or not G:
        return out
    dG = {}
    for fpar, Fc in F.parity_classes().items():
        for b, a in chart.pairs:
            zb = chart.variables[b].name
            za = chart.variables[a].name
            par = chart.variables[b].parity
            dF_anti = partial(za, Fc)
            if dF_anti:
                if zb not in dG:
                    dG[zb] = partial(zb, G)
                term = dF_anti * dG[zb]
                out = out - term if ((par + 1) * (fpar + 1)) & 1 else out + term
            dF_base = partial(zb, Fc)
            if dF_base:
                if za not in dG:
                    dG[za] = partial(za, G)
                term = dF_base * dG[za]
                out = out + term if (par * (fpar + 1)) & 1 else out - term
    return out


def check_master(D: Poly) -> bool:
    return not schouten(D, D)


def _check_base(args: Sequence[Poly]):
    for a in args:
        if a.has_antimomenta():
            raise ValueError(f"bracket argument {a} contains an antimomentum")


def _keep_degree(p: Poly, k: int) -> Poly:
    ch = p.chart
    return Poly(ch, {m: c for m, c in p.terms.items() if ch.anti_degree(m) == k})


def derived_bracket(D: Poly, args: Sequence[Poly]) -> Poly:
    """``pi [...[[D, a1], a2], ..., an]`` with ``pi`` the restriction to the base."""
    args = list(args)
    _check_base(args)
    cur = D
    n = len(args)
    for i, a in enumerate(args):
        # only terms of antimomentum degree equal to the remaining arity survive pi
        cur = _keep_degree(cur, n - i)
        if not cur:
            return D.chart.zero()
        cur = schouten(cur, a)
    return restrict_to_base(cur)


def skew_sign(args: Sequence[Poly]) -> int:
    """Exponent alpha = sum_i |f_i|(r-i) + r + 1 (mod 2)."""
    r = len(args)
    alpha = r + 1
    for i, f in enumerate(args[:-1], start=1):
        alpha += f.parity * (r - i)
    return alpha & 1


def skew_bracket(D: Poly, args: Sequence[Poly]) -> Poly:
    """Graded skew-symmetric bracket ``(-1)^alpha`` times the derived bracket."""
    args = list(args)
    val = derived_bracket(D, args)
    return -val if skew_sign(args) else val


def unshuffles(n: int, k: int):
    """(k, n-k)-unshuffles as (first, rest) index tuples, lexicographic in ``first``."""
    for first in combinations(range(n), k):
        chosen = set(first)
        yield first, tuple(i for i in range(n) if i not in chosen)


def unshuffle_sign(first: Sequence[int], rest: Sequence[int], parities: Sequence[int]) -> int:
    """Koszul sign exponent of moving ``first`` in front of ``rest``."""
    eps = 0
    for s in first:
        ps = parities[s]
        if ps:
            for c in rest:
                if c < s and parities[c]:
                    eps += 1
    return eps & 1


def voronov_jacobiator(bracket: Callable[[list], Poly], args: Sequence[Poly],
                       parity: Callable[[Poly], int]) -> Poly:
    """Generalized Jacobi sum for a symmetric bracket family.

    ``bracket(list)`` evaluates the bracket of any arity; ``parity`` gives
    the degree used for Koszul signs.
    """
    args = list(args)
    n = len(args)
    pars = [parity(a) & 1 for a in args]
    inner_cache: dict[tuple, Poly] = {}
    total = None
    for k in range(n + 1):
        for first, rest in unshuffles(n, k):
            if first not in inner_cache:
                inner_cache[first] = bracket([args[i] for i in first])
            inner = inner_cache[first]
            val = bracket([inner] + [args[i] for i in rest])
            if unshuffle_sign(first, rest, pars):
                val = -val
            total = val if total is None else total + val
    return total


def shifted_parity(a: Poly) -> int:
    return (a.parity + 1) & 1


def jacobiator_unshuffle(D: Poly, args: Sequence[Poly]) -> Poly:
    """Direct unshuffle sum of derived brackets."""
    _check_base(args)
    return voronov_jacobiator(lambda xs: derived_bracket(D, xs), args, shifted_parity)


def jacobiator_square(D: Poly, args: Sequence[Poly]) -> Poly:
    """Derived bracket generated by half the self-bracket of ``D``."""
    return derived_bracket(schouten(D, D) / 2, args)


def jacobiator(D: Poly, args: Sequence[Poly], check: bool = True) -> Poly:
    """Unshuffle Jacobiator, cross-checked against the square bracket.

    The generator must be even: only then is the bracket family symmetric
    in the shifted grading and the two evaluations must agree.
    """
    if D and set(D.parity_classes()) != {0}:
        raise ValueError("the Jacobiator generator must be even")
    a = jacobiator_unshuffle(D, args)
    if check:
        b = jacobiator_square(D, args)
        if a != b:
            raise PathDisagreement(f"unshuffle sum {a} differs from square bracket {b}")
    return a


def skew_jacobiator(D: Poly, args: Sequence[Poly]) -> Poly:
    """Generalized Jacobi sum for the skew brackets.

    Uses the skew (unshifted) convention: sign ``(-1)^(k l)`` times the Koszul
    sign for unshifted parities, sign of the unshuffle permutation included.
    """
    args = list(args)
    _check_base(args)
    n = len(args)
    pars = [a.parity for a in args]
    total = D.chart.zero()
    cache = {}
    for k in range(n + 1):
        l = n - k
        for first, rest in unshuffles(n, k):
            if first not in cache:
                cache[first] = skew_bracket(D, [args[i] for i in first])
            val = skew_bracket(D, [cache[first]] + [args[i] for i in rest])
            # permutation sign times Koszul sign
            inv = sum(1 for s in first for c in rest if c < s)
            eps = inv + unshuffle_sign(first, rest, pars) + k * l
            total = total - val if eps & 1 else total + val
    return total
