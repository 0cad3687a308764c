"""Seeded random polynomials for property checks and benchmarks."""

from __future__ import annotations

import random
from typing import Sequence

from .algebra import Chart, Poly


def random_monomial(chart: Chart, rng: random.Random, names: Sequence[str], max_degree: int,
                    negative: int = 0) -> dict[str, int]:
    exps: dict[str, int] = {}
    budget = rng.randint(0, max_degree)
    for _ in range(budget):
        n = rng.choice(list(names))
        v = chart[n]
        if v.parity and exps.get(n):
            continue
        exps[n] = exps.get(n, 0) + 1
    for n in names:
        if chart[n].invertible and negative and rng.random() < 0.3:
            exps[n] = exps.get(n, 0) - rng.randint(1, negative)
    return exps


def random_poly(chart: Chart, rng: random.Random, names: Sequence[str] | None = None, *,
                max_degree: int = 2, max_terms: int = 3, coeff: int = 3,
                parity: int | None = None, negative: int = 0) -> Poly:
    """Sum of up to ``max_terms`` random monomials with integer coefficients in ``[-coeff, coeff]``.

    With ``parity`` set, terms of the other parity are dropped.
    """
    names = list(names if names is not None else chart.names)
    out = chart.zero()
    for _ in range(rng.randint(1, max_terms)):
        c = rng.randint(-coeff, coeff)
        if not c:
            continue
        term = chart.monomial(random_monomial(chart, rng, names, max_degree, negative), c)
        if parity is not None and term and term.parity != parity:
            continue
        out = out + term
    return out


def random_section(chart: Chart, rng: random.Random, t: str, base: Sequence[str], *,
                   max_degree: int = 2, parity: int | None = None) -> Poly:
    """``t f`` with ``f`` a random base polynomial."""
    return chart.var(t) * random_poly(chart, rng, base, max_degree=max_degree, parity=parity)
