"""Higher antibrackets generated by the Koszul-Brylinski operator."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Sequence

from .algebra import Chart, Poly, Variable, embed, partial
from .brackets import schouten
from .kirillov import KirillovStructure, MasterEquationError, validate_kirillov
from .operators import (AntitangentChart, DiffOperator, antitangent_chart, koszul_brylinski,
                        op_apply, op_commutator, op_compose)


class NotNilpotent(ValueError):
    def __init__(self, msg, witness):
        super().__init__(msg)
        self.witness = witness


def check_nilpotent(L: DiffOperator) -> DiffOperator:
    sq = op_compose(L, L)
    if sq:
        raise NotNilpotent(f"generator does not square to zero: {sq}", str(sq))
    return L


class AntibracketEvaluator:
    """Evaluates ``[...[[L, w1], w2], ... wr](1)`` via the recursion

    ``X_j(f) = X_{j-1}(w_j f) - (-1)^(|X_{j-1}||w_j|) w_j X_{j-1}(f)``

    with ``L`` applied to monomials through a cache.
    """

    def __init__(self, L: DiffOperator, check: bool = True):
        if check:
            check_nilpotent(L)
        self.L = L
        self.chart = L.chart
        self.parity = L.parity if L else 1
        self._cache: dict = {}

    def apply_L(self, p: Poly) -> Poly:
        out = self.chart.zero()
        for m, c in p.terms.items():
            if m not in self._cache:
                self._cache[m] = op_apply(self.L, Poly(self.chart, {m: 1}))
            out = out + self._cache[m] * c
        return out

    def _eval(self, args: list[Poly], pars: list[int], f: Poly) -> Poly:
        if not args:
            return self.apply_L(f)
        *head, last = args
        xpar = (self.parity + sum(pars[:-1])) & 1
        a = self._eval(head, pars[:-1], last * f)
        b = last * self._eval(head, pars[:-1], f)
        return a + b if (xpar and pars[-1]) else a - b

    def bracket(self, args: Sequence[Poly]) -> Poly:
        args = list(args)
        # multilinear: split arguments into parity classes
        groups = [list(a.parity_classes().items()) or [(0, self.chart.zero())] for a in args]
        total = self.chart.zero()

        def rec(i, chosen, pars):
            nonlocal total
            if i == len(groups):
                total = total + self._eval(chosen, pars, self.chart.one())
                return
            for p, a in groups[i]:
                if a:
                    rec(i + 1, chosen + [a], pars + [p])

        rec(0, [], [])
        return total


def bv_bracket(L: DiffOperator, args: Sequence[Poly], check: bool = True) -> Poly:
    return AntibracketEvaluator(L, check).bracket(args)


def bv_bracket_operator(L: DiffOperator, args: Sequence[Poly]) -> Poly:
    """The same bracket through explicit operator commutators (slow cross-check)."""
    X = L
    for a in args:
        X = op_commutator(X, DiffOperator.mult(a))
    return op_apply(X, L.chart.one())


def leibniz_defect(ev: AntibracketEvaluator, a: Poly, b: Poly, c: Poly) -> Poly:
    """``(a, bc) - (a, b) c - (-1)^(|b|(|a|+1)) b (a, c)`` for the binary antibracket."""
    lhs = ev.bracket([a, b * c])
    t1 = ev.bracket([a, b]) * c
    t2 = b * ev.bracket([a, c])
    if (b.parity * (a.parity + 1)) & 1:
        t2 = -t2
    return lhs - t1 - t2


def bv_jacobiator(ev: AntibracketEvaluator, args: Sequence[Poly]) -> Poly:
    """Generalized Jacobi sum for the antibrackets (symmetric, Koszul sign in the plain parity)."""
    from .brackets import voronov_jacobiator
    return voronov_jacobiator(ev.bracket, args, lambda a: a.parity)


def cartan_defect(K, Q: Poly, eps: int = 1, target: AntitangentChart | None = None) -> DiffOperator:
    """``[L_P, i_Q] - eps i_[[P, Q]]`` as a normal-ordered operator."""
    from .kirillov import _require_valid
    from .operators import interior
    K = _require_valid(K)
    target = target or antitangent_chart(K.chart)
    L = koszul_brylinski(K, target)
    lhs = op_commutator(L, interior(Q, target))
    rhs = interior(schouten(K.P, Q), target)
    return lhs - rhs.scale(eps)


# ---------------------------------------------------------------------------
# invariant forms


@dataclass
class ClosureResult:
    status: str  # "ok" | "fail" | "skipped"
    witness: str | None = None
    detail: str | None = None

    def __bool__(self):
        return self.status == "ok"


def action_weights(p: Poly) -> set[int]:
    return p.weights(0)


def invariant_closure_check(L: DiffOperator, basis: Sequence[Poly], arity: int) -> ClosureResult:
    """Every ``arity``-fold antibracket of weight-0 basis forms has weight 0."""
    for b in basis:
        if action_weights(b) - {0}:
            return ClosureResult("skipped", b.witness(), "basis element is not invariant")
    if L.weights(0) - {0}:
        return ClosureResult("skipped", None, "generator is not of weight 0")
    ev = AntibracketEvaluator(L)
    for idx in combinations_with_replacement(range(len(basis)), arity):
        val = ev.bracket([basis[i] for i in idx])
        bad = [m for m in val.terms if L.chart.mono_grading(m).weight[0] != 0]
        if bad:
            return ClosureResult("fail", Poly(L.chart, {bad[0]: val.terms[bad[0]]}).witness(),
                                 f"arguments {list(idx)}")
    return ClosureResult("ok")


def invariant_chart(chart: AntitangentChart) -> Chart:
    """Coordinates ``(x, dt, dX = t dx)`` on the quotient by the action."""
    t = next(v.name for v in chart.variables if v.invertible)
    vs = []
    for v in chart.variables:
        if v.name == t:
            continue
        if v.name in chart.dmap.values() and v.name != chart.dmap[t]:
            vs.append(Variable("dX" + v.name[2:] if v.name.startswith("dx") else "D" + v.name,
                               v.parity, (0, v.weight[1]), index=v.index))
        else:
            vs.append(Variable(v.name, v.parity, (0, v.weight[1]), index=v.index))
    return Chart(vs, name=f"invariant[{chart.name or ''}]")


def _inv_names(chart: AntitangentChart, inv: Chart) -> dict[str, str]:
    t = next(v.name for v in chart.variables if v.invertible)
    out = {}
    j = 0
    names = inv.names
    for v in chart.variables:
        if v.name == t:
            continue
        out[v.name] = names[j]
        j += 1
    return out


def to_invariant(p: Poly, inv: Chart | None = None) -> Poly:
    """Rewrite a weight-0 form in invariant coordinates (``t^k dx^beta`` with ``k = |beta|``)."""
    ch = p.chart
    inv = inv or invariant_chart(ch)
    names = _inv_names(ch, inv)
    tpos = next(i for i, v in enumerate(ch.variables) if v.invertible)
    out = {}
    for m, c in p.terms.items():
        if ch.mono_grading((*m,)).weight[0] != 0:
            raise ValueError(f"{Poly(ch, {m: c}).witness()} is not invariant")
        e = [0] * inv.n
        for i, k in enumerate(m):
            if i != tpos and k:
                e[inv.position(names[ch.variables[i].name])] = k
        out[tuple(e)] = c
    return Poly.from_terms(inv, out)


def from_invariant(q: Poly, chart: AntitangentChart) -> Poly:
    names = _inv_names(chart, q.chart)
    t = next(v.name for v in chart.variables if v.invertible)
    mapping = {}
    for raw, new in names.items():
        img = chart.var(raw)
        if raw in chart.dmap.values() and raw != chart.dmap[t]:
            img = chart.var(t) * img
        mapping[new] = img
    return embed_sub(q, mapping, chart)


def embed_sub(q: Poly, mapping, chart):
    from .algebra import substitute
    return substitute(q, mapping, chart)


def invariant_basis(chart: AntitangentChart, degree: int) -> list[Poly]:
    """Invariant monomials of degree <= ``degree`` in the invariant coordinates."""
    from .operators import spanning_monomials
    inv = invariant_chart(chart)
    return [from_invariant(m, chart) for m in spanning_monomials(inv, degree)]


# ---------------------------------------------------------------------------
# lifting a homological vector field


class QLiftError(ValueError):
    def __init__(self, msg, witness):
        super().__init__(msg)
        self.witness = witness


def vector_field_components(Q: Poly) -> dict[str, Poly]:
    """``Q = sum Q^a x*_a`` -> ``{x^a: Q^a}``."""
    ch = Q.chart
    out = {}
    for b, a in ch.pairs:
        terms = {}
        for m, c in Q.terms.items():
            if m[a]:
                base = list(m)
                base[a] = 0
                base = tuple(base)
                # sign of writing the canonical monomial as base * x*_a
                unit = [0] * ch.n
                unit[a] = 1
                s = (Poly(ch, {base: 1}) * Poly(ch, {tuple(unit): 1})).terms[m]
                terms[base] = c * s
        out[ch.variables[b].name] = Poly(ch, terms)
    return out


def divergence(Q: Poly) -> Poly:
    comps = vector_field_components(Q)
    out = Q.chart.zero()
    for name, Qa in comps.items():
        out = out + partial(name, Qa)
    return out


def q_lift(Q: Poly, t: str = "t", ts: str = "ts") -> KirillovStructure:
    """``P = Q^a x*_a + div(Q) t t*`` on the chart extended by ``(t, t*)``."""
    src = Q.chart
    if Q and set(Q.parity_classes()) != {0}:
        raise QLiftError("the odd symbol of an odd vector field must be an even function", Q.witness())
    if any(src.anti_degree(m) != 1 for m in Q.terms):
        raise QLiftError("Q must be linear in the antimomenta", Q.witness())
    sq = schouten(Q, Q)
    if sq:
        raise QLiftError(f"Q is not homological: [[Q, Q]] = {sq}", sq.witness())
    div = divergence(Q)
    base = [v for i, v in enumerate(src.variables) if i not in src.anti]
    anti = [v for i, v in enumerate(src.variables) if i in src.anti]
    vs = [Variable(t, 0, (1, 0), True)]
    vs += [Variable(v.name, v.parity, (0, 0), index=v.index) for v in base]
    vs.append(Variable(ts, 1, (0, 1)))
    vs += [Variable(v.name, v.parity, (1, 1), index=v.index) for v in anti]
    pairs = [(t, ts)] + [(src.variables[b].name, src.variables[a].name) for b, a in src.pairs]
    chart = Chart(vs, pairs, name=f"thomas[{src.name or ''}]")
    P = embed(Q, chart) + embed(div, chart) * chart.var(t) * chart.var(ts)
    res = validate_kirillov(P)
    if not res:
        raise MasterEquationError(f"lift failed the {res.check} check", res.residue or chart.zero(), P)
    return res


def displayed_lift_images(Q: Poly, inv: Chart, xmap: dict[str, str], dX: dict[str, str],
                          dt: str) -> dict[str, Poly]:
    """Images of the invariant generators under the displayed lifted operator.

    In invariant coordinates the operator is
    ``Q^a d_a + div dX^b d_{dX^b} - dX^b (d_b Q^a) d_{dX^a}
    - dX^b (d_b div) d_{dt} - dt div d_{dt}``.
    """
    comps = vector_field_components(Q)
    div = divergence(Q)
    conv = lambda p: embed(p, inv)
    out = {}
    for a, Qa in comps.items():
        out[xmap[a]] = conv(Qa)
    for b in comps:
        img = conv(div) * inv.var(dX[b])
        for c in comps:
            img = img - inv.var(dX[c]) * conv(partial(c, comps[b]))
        out[dX[b]] = img
    img = -(inv.var(dt) * conv(div))
    for b in comps:
        img = img - inv.var(dX[b]) * conv(partial(b, div))
    out[dt] = img
    return out
