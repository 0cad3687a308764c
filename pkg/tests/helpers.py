"""Shared fixtures and hypothesis strategies."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from hypothesis import strategies as st

from homkir.algebra import Chart, Poly
from homkir.brackets import schouten
from homkir.kirillov import kirillov_chart, poisson_chart, poissonise, validate_kirillov
from homkir.lie import build_cocycle_jacobi, so3

coefficients = st.one_of(
    st.integers(-3, 3).filter(bool),
    st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(bool),
)


@st.composite
def monomials(draw, chart: Chart, names=None, max_degree: int = 3, negative: int = 0):
    names = list(names if names is not None else chart.names)
    picks = draw(st.lists(st.sampled_from(names), max_size=max_degree)) if names else []
    exps: dict[str, int] = {}
    for n in picks:
        if chart[n].parity:
            exps[n] = 1
        else:
            exps[n] = exps.get(n, 0) + 1
    for n in names:
        if chart[n].invertible and negative:
            exps[n] = exps.get(n, 0) - draw(st.integers(0, negative))
    return exps


@st.composite
def polys(draw, chart: Chart, names=None, max_degree: int = 3, max_terms: int = 4,
          negative: int = 0, parity: int | None = None):
    terms = draw(st.lists(st.tuples(monomials(chart, names, max_degree, negative), coefficients),
                          max_size=max_terms))
    p = chart.zero()
    for exps, c in terms:
        p = p + chart.monomial(exps, c)
    if parity is not None:
        p = p.parity_classes().get(parity, chart.zero())
    return p


@st.composite
def homogeneous(draw, chart: Chart, names=None, max_degree: int = 3, max_terms: int = 4,
                negative: int = 0):
    par = draw(st.integers(0, 1))
    return draw(polys(chart, names, max_degree, max_terms, negative, parity=par))


def super_chart() -> Chart:
    """``(t, x1, x2, xi1, xi2, ts, xs1, xs2, xis1, xis2)``."""
    return kirillov_chart(2, 2)


@lru_cache(maxsize=None)
def flow_structure():
    """A non-trivial order-2 structure on R^{2|2}.

    The canonical constant structure transported by the flow of an odd
    Hamiltonian, then Poissonised.  It has 11 terms, odd base coordinates,
    t-dependent and t-independent parts.
    """
    ch = poisson_chart(2, 2)
    g = ch.gens()
    P0 = g["xs1"] * g["xs2"] + g["xis1"] * g["xis2"]
    H = g["x1"] * g["xi1"] + g["x2"] ** 2 * g["xi1"] + g["xi1"] * g["xi2"] * g["xs1"]
    total, cur, fact = P0, P0, 1
    for n in range(1, 20):
        cur = schouten(H, cur)
        if not cur:
            break
        fact *= n
        total = total + cur / fact
    return poissonise(total)


@lru_cache(maxsize=None)
def classical_structure():
    ch = kirillov_chart(2)
    return validate_kirillov(ch.var("t") ** -1 * ch.var("xs1") * ch.var("xs2"))


@lru_cache(maxsize=None)
def so3_structure():
    return build_cocycle_jacobi(so3())


def base_names(K) -> list[str]:
    return [n for n in K.chart.base_names() if n != K.t]


def frac(a, b=1) -> Fraction:
    return Fraction(a, b)
