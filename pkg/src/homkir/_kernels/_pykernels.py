"""Pure-Python term kernels.

A term map is a ``dict`` from exponent tuples (one entry per chart variable,
declaration order) to nonzero ``int`` or ``Fraction`` coefficients.  Odd
variables carry exponents 0 or 1.  ``odd`` is the tuple of positions of the
odd variables in the chart.
"""

from fractions import Fraction


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _odd_masks(terms, odd):
    out = []
    for mono, coef in terms.items():
        mask = 0
        for bit, pos in enumerate(odd):
            if mono[pos]:
                mask |= 1 << bit
        out.append((mono, coef, mask))
    return out


def mul_terms(a, b, odd):
    """Graded-commutative product of two term maps."""
    if not a or not b:
        return {}
    la = _odd_masks(a, odd)
    lb = _odd_masks(b, odd)
    out = {}
    get = out.get
    for ma, ca, ka in la:
        for mb, cb, kb in lb:
            if ka & kb:
                continue
            # pairs (odd factor of a, odd factor of b) with a's index above b's
            swaps = 0
            k = kb
            while k:
                low = k & -k
                swaps += (ka & ~((low << 1) - 1)).bit_count()
                k ^= low
            c = ca * cb
            if swaps & 1:
                c = -c
            m = tuple([x + y for x, y in zip(ma, mb)])
            s = get(m, 0) + c
            if s:
                out[m] = _norm(s)
            else:
                out.pop(m, None)
    return out


def partial_terms(a, pos, odd_var, odd):
    """Left derivative with respect to the variable at ``pos``."""
    out = {}
    before = tuple(q for q in odd if q < pos)
    for mono, coef in a.items():
        e = mono[pos]
        if e == 0:
            continue
        if odd_var:
            c = coef
            if sum(mono[q] for q in before) & 1:
                c = -c
        else:
            c = coef * e
        m = list(mono)
        m[pos] = e - 1
        m = tuple(m)
        out[m] = _norm(out.get(m, 0) + c)
        if not out[m]:
            del out[m]
    return out


def add_terms(a, b, scale=1):
    """Return ``a + scale * b`` as a new term map."""
    out = dict(a)
    get = out.get
    for m, c in b.items():
        s = get(m, 0) + scale * c
        if s:
            out[m] = _norm(s)
        else:
            out.pop(m, None)
    return out
