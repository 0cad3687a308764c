"""Homotopy Kirillov structures on an anticotangent chart.

A structure is an even function ``P`` of weight 1 under the multiplicative
action (weight component 0) solving ``[[P, P]] = 0``.  Sections of the line
bundle are the weight-1 functions ``t f(x)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from .algebra import Chart, GradingError, Poly, Variable, embed, substitute
from .brackets import schouten, skew_bracket


class MasterEquationError(ValueError):
    """``residue`` is the witness; ``candidate`` the rejected function, when known."""

    def __init__(self, msg: str, residue: Poly, candidate: Poly | None = None):
        super().__init__(msg)
        self.residue = residue
        self.candidate = candidate


class SectionError(ValueError):
    pass


@dataclass
class ValidationReport:
    """A failed validation: the first failed check and a witness term."""

    check: str
    witness: str
    residue: Poly | None = None
    ok: bool = field(default=False, init=False)

    def __bool__(self):
        return False


@dataclass
class KirillovStructure:
    P: Poly
    order: int
    t: str
    ts: str
    ok: bool = field(default=True, init=False)

    @property
    def chart(self) -> Chart:
        return self.P.chart


def kirillov_chart(n_even: int, n_odd: int = 0, *, base: str = "x", odd_base: str = "xi",
                   extra_grading: int = 0, name: str | None = None) -> Chart:
    """Anticotangent chart ``(t, x..., xi..., ts, xs..., xis...)``.

    Weights are (action weight, antimomentum degree); ``extra_grading`` pads
    further zero components.
    """
    pad = (0,) * extra_grading
    vs = [Variable("t", 0, (1, 0) + pad, True)]
    vs += [Variable(f"{base}{i}", 0, (0, 0) + pad, index=i) for i in range(1, n_even + 1)]
    vs += [Variable(f"{odd_base}{i}", 1, (0, 0) + pad, index=i) for i in range(1, n_odd + 1)]
    vs.append(Variable("ts", 1, (0, 1) + pad))
    vs += [Variable(f"{base}s{i}", 1, (1, 1) + pad, index=i) for i in range(1, n_even + 1)]
    vs += [Variable(f"{odd_base}s{i}", 0, (1, 1) + pad, index=i) for i in range(1, n_odd + 1)]
    pairs = [("t", "ts")]
    pairs += [(f"{base}{i}", f"{base}s{i}") for i in range(1, n_even + 1)]
    pairs += [(f"{odd_base}{i}", f"{odd_base}s{i}") for i in range(1, n_odd + 1)]
    return Chart(vs, pairs, name=name or f"kirillov{n_even}|{n_odd}")


def jet_chart(n_even: int, n_odd: int = 0) -> Chart:
    """Chart ``(x, ts, bxs = t^-1 xs)`` on the quotient by the action."""
    vs = [Variable(f"x{i}", 0, (0,), index=i) for i in range(1, n_even + 1)]
    vs += [Variable(f"xi{i}", 1, (0,), index=i) for i in range(1, n_odd + 1)]
    vs.append(Variable("ts", 1, (0,)))
    vs += [Variable(f"bxs{i}", 1, (0,), index=i) for i in range(1, n_even + 1)]
    vs += [Variable(f"bxis{i}", 0, (0,), index=i) for i in range(1, n_odd + 1)]
    return Chart(vs, name=f"jet{n_even}|{n_odd}")


def poisson_chart(n_even: int, n_odd: int = 0) -> Chart:
    """Chart ``(x..., xi..., xs..., xis...)`` without ``t``; antimomenta of degree 1."""
    vs = [Variable(f"x{i}", 0, (0,), index=i) for i in range(1, n_even + 1)]
    vs += [Variable(f"xi{i}", 1, (0,), index=i) for i in range(1, n_odd + 1)]
    vs += [Variable(f"xs{i}", 1, (1,), index=i) for i in range(1, n_even + 1)]
    vs += [Variable(f"xis{i}", 0, (1,), index=i) for i in range(1, n_odd + 1)]
    pairs = [(f"x{i}", f"xs{i}") for i in range(1, n_even + 1)]
    pairs += [(f"xi{i}", f"xis{i}") for i in range(1, n_odd + 1)]
    return Chart(vs, pairs, name=f"poisson{n_even}|{n_odd}")


def kirillov_roles(chart: Chart) -> tuple[str, str]:
    """Names of the homogeneity coordinate ``t`` and its antimomentum."""
    for b, a in chart.pairs:
        v = chart.variables[b]
        if v.invertible and v.parity == 0 and v.weight and v.weight[0] == 1:
            return v.name, chart.variables[a].name
    raise ValueError(f"{chart!r} has no invertible weight-1 coordinate paired with an antimomentum")


def _first_offender(p: Poly, pred) -> str:
    for m, c in p.sorted_terms():
        if pred(m):
            return Poly(p.chart, {m: c}).witness()
    return "0"


def validate_kirillov(P: Poly) -> KirillovStructure | ValidationReport:
    """Check parity, action weight and the master equation, in that order."""
    ch = P.chart
    t, ts = kirillov_roles(ch)
    odd_terms = [m for m in P.terms if ch.mono_grading(m).parity]
    if odd_terms:
        return ValidationReport("parity", _first_offender(P, lambda m: ch.mono_grading(m).parity))
    if any(ch.mono_grading(m).weight[0] != 1 for m in P.terms):
        return ValidationReport("weight",
                                _first_offender(P, lambda m: ch.mono_grading(m).weight[0] != 1))
    sq = schouten(P, P)
    if sq:
        return ValidationReport("master", sq.witness(), sq)
    return KirillovStructure(P, P.anti_degree(), t, ts)


def _require_valid(K) -> KirillovStructure:
    if isinstance(K, KirillovStructure):
        return K
    if isinstance(K, Poly):
        res = validate_kirillov(K)
        if res:
            return res
        K = res
    if isinstance(K, ValidationReport):
        raise ValueError(f"not a Kirillov structure: {K.check} check failed at {K.witness}")
    raise TypeError("expected a KirillovStructure")


def check_section(K: KirillovStructure, s: Poly):
    if s.chart != K.chart:
        raise SectionError("section lives on another chart")
    if s.has_antimomenta():
        raise SectionError(f"section {s} contains antimomenta")
    pos = K.chart.position(K.t)
    for m in s.terms:
        if m[pos] != 1:
            raise SectionError(f"section {s} is not linear in {K.t}")


def section(K: KirillovStructure, f: Poly) -> Poly:
    """The weight-1 function ``t f``."""
    return K.chart.var(K.t) * f


def kirillov_bracket(K, sections: Sequence[Poly]) -> Poly:
    K = _require_valid(K)
    for s in sections:
        check_section(K, s)
    return skew_bracket(K.P, list(sections))


def anchor(K, sections: Sequence[Poly], f: Poly) -> Poly:
    """``rho_k(s_1..s_k)(f)``: the skew bracket with a weight-0 base function last."""
    K = _require_valid(K)
    for s in sections:
        check_section(K, s)
    if f.has_antimomenta() or any(K.chart.mono_grading(m).weight[0] for m in f.terms):
        raise SectionError(f"{f} is not a weight-0 base function")
    return skew_bracket(K.P, list(sections) + [f])


def quasi_derivation_sign(sections: Sequence[Poly], f: Poly) -> int:
    """Exponent ``|f| (|s_1| + ... + |s_k| + k + 1)`` for ``k`` leading sections."""
    k = len(sections)
    return (f.parity * (sum(s.parity for s in sections) + k + 1)) & 1


def quasi_derivation_defect(K, sections: Sequence[Poly], f: Poly) -> Poly:
    """``[s.., f s_last] - rho(s..)(f) s_last - (-1)^chi f [s.., s_last]``; zero when the rule holds."""
    K = _require_valid(K)
    *lead, last = sections
    lhs = kirillov_bracket(K, lead + [f * last])
    rho = anchor(K, lead, f) * last
    rest = f * kirillov_bracket(K, lead + [last])
    if quasi_derivation_sign(lead, f):
        rest = -rest
    return lhs - rho - rest


# ---------------------------------------------------------------------------
# normal-form components


class ComponentError(ValueError):
    def __init__(self, msg: str, witness: str):
        super().__init__(msg)
        self.witness = witness


@dataclass
class Components:
    """Coefficient tables of the normal form.

    ``plain[k]`` and ``bar[k]`` map sorted index tuples (positions into
    ``momenta``) to base polynomials; ``bar`` terms carry ``ts``.  Other
    orderings follow from graded symmetry, see :meth:`entry`.
    """

    K: KirillovStructure
    momenta: tuple[str, ...]
    plain: dict[int, dict[tuple[int, ...], Poly]]
    bar: dict[int, dict[tuple[int, ...], Poly]]
    order: int

    def _factor_sign(self, idx: Sequence[int], with_ts: bool) -> tuple[tuple[int, ...], int]:
        ch = self.K.chart
        prod = ch.one()
        for i in reversed(idx):
            prod = prod * ch.var(self.momenta[i])
        if with_ts:
            prod = prod * ch.var(self.K.ts)
        if not prod:
            return (), 0
        (m, c), = prod.terms.items()
        return m, c

    def entry(self, kind: str, idx: Sequence[int]) -> Poly:
        """Component with indices in the given order."""
        table = (self.bar if kind == "bar" else self.plain).get(len(idx), {})
        key = tuple(sorted(idx))
        if key not in table:
            return self.K.chart.zero()
        _, s_sorted = self._factor_sign(key, kind == "bar")
        _, s = self._factor_sign(tuple(idx), kind == "bar")
        if not s:
            return self.K.chart.zero()
        return table[key] * (s_sorted * s)

    def reconstruct(self) -> Poly:
        ch = self.K.chart
        t = ch.var(self.K.t)
        total = ch.zero()
        for kind, tables in (("plain", self.plain), ("bar", self.bar)):
            for k, table in tables.items():
                for key, comp in table.items():
                    mono, sign = self._factor_sign(key, kind == "bar")
                    mult = 1
                    for i in set(key):
                        mult *= factorial(key.count(i))
                    total = total + comp * (t ** (1 - k)) * Poly(ch, {mono: sign}) / mult
        return total


def extract_components(K) -> Components:
    K = _require_valid(K)
    ch = K.chart
    tpos, tspos = ch.position(K.t), ch.position(K.ts)
    momenta = tuple(ch.variables[a].name for b, a in ch.pairs if a != tspos)
    mpos = [ch.position(n) for n in momenta]
    plain: dict = {}
    bar: dict = {}
    comps = Components(K, momenta, plain, bar, K.order)
    for mono, c in K.P.sorted_terms():
        key = []
        for i, p in enumerate(mpos):
            key += [i] * mono[p]
        k = len(key)
        if mono[tpos] != 1 - k:
            w = Poly(ch, {mono: c}).witness()
            raise ComponentError(f"term {w} does not carry t^{1 - k}", w)
        with_ts = bool(mono[tspos])
        base = list(mono)
        base[tpos] = 0
        base[tspos] = 0
        for p in mpos:
            base[p] = 0
        _, sign = comps._factor_sign(tuple(key), with_ts)
        mult = 1
        for i in set(key):
            mult *= factorial(key.count(i))
        comp = Poly(ch, {tuple(base): c}) * Fraction(mult, sign)
        table = (bar if with_ts else plain).setdefault(k, {})
        table[tuple(key)] = table.get(tuple(key), ch.zero()) + comp
    return comps


# ---------------------------------------------------------------------------
# Poissonisation and morphisms


def poissonise(Phat: Poly, t: str = "t", ts: str = "ts") -> KirillovStructure:
    """``sum_k t^(1-k) Phat_k`` on the chart extended by ``(t, ts)``."""
    src = Phat.chart
    if Phat and set(Phat.parity_classes()) != {0}:
        raise GradingError("homotopy Poisson structure must be even")
    sq = schouten(Phat, Phat) if src.pairs else src.zero()
    if sq:
        raise MasterEquationError(f"input fails its master equation at {sq.witness()}", sq)
    if t in src or ts in src:
        raise ValueError(f"chart already has a variable named {t} or {ts}")
    base = [v for i, v in enumerate(src.variables) if i not in src.anti]
    anti = [v for i, v in enumerate(src.variables) if i in src.anti]
    vs = [Variable(t, 0, (1, 0), True)]
    vs += [Variable(v.name, v.parity, (0, 0), index=v.index) for v in base]
    vs.append(Variable(ts, 1, (0, 1)))
    vs += [Variable(v.name, v.parity, (1, 1), index=v.index) for v in anti]
    pairs = [(t, ts)] + [(src.variables[b].name, src.variables[a].name) for b, a in src.pairs]
    chart = Chart(vs, pairs, name=f"poissonised[{src.name or ''}]")
    lifted = embed(Phat, chart)
    tvar = chart.var(t)
    P = chart.zero()
    for k, part in lifted.split(chart.anti_degree).items():
        P = P + part * tvar ** (1 - k)
    res = validate_kirillov(P)
    if not res:
        raise MasterEquationError(f"Poissonisation failed: {res.check} at {res.witness}",
                                  res.residue or chart.zero(), P)
    return res


def relation_chart(K1: KirillovStructure, K2: KirillovStructure) -> tuple[Chart, dict[str, str]]:
    """Chart ``(t, x, s*, y*)`` carrying both sides of the relatedness equation.

    Returns the chart and the renaming applied to ``K2``'s antimomenta.
    """
    c1, c2 = K1.chart, K2.chart
    base1 = [v for i, v in enumerate(c1.variables) if i not in c1.anti]
    anti2 = [v for i, v in enumerate(c2.variables) if i in c2.anti]
    taken = {v.name for v in base1}
    rename = {}
    for v in anti2:
        n = v.name
        while n in taken:
            n += "_r"
        rename[v.name] = n
        taken.add(n)
    vs = list(base1) + [Variable(rename[v.name], v.parity, v.weight, index=v.index) for v in anti2]
    return Chart(vs, name="relation"), rename


def check_morphism(K1, K2, psi: Poly, phi: Mapping[str, Poly]) -> bool:
    """Whether ``K1`` and ``K2`` are related by ``(psi, phi)``.

    ``psi = t psi(x)`` and ``phi`` (keyed by ``K2``'s base names other than
    its ``t``) are base polynomials on ``K1``'s chart.
    """
    return not morphism_defect(K1, K2, psi, phi)


def morphism_defect(K1, K2, psi: Poly, phi: Mapping[str, Poly]) -> Poly:
    """Difference of the two sides of the relatedness equation on the relation chart."""
    K1, K2 = _require_valid(K1), _require_valid(K2)
    c1, c2 = K1.chart, K2.chart
    tpos = c1.position(K1.t)
    if psi.chart != c1 or psi.has_antimomenta():
        raise ValueError("psi must be a base polynomial on the source chart")
    if not psi or any(m[tpos] != 1 for m in psi.terms):
        raise ValueError("psi must be linear in t")
    if psi.parity != 0:
        raise GradingError("psi must be even")
    base2 = [c2.variables[b].name for b, _ in c2.pairs if c2.variables[b].name != K2.t]
    missing = set(base2) - set(phi)
    if missing or set(phi) - set(base2):
        raise ValueError(f"phi must give exactly the base coordinates {base2}")
    for name, img in phi.items():
        if img.chart != c1 or img.has_antimomenta():
            raise ValueError(f"phi[{name}] must be a base polynomial on the source chart")
        if img and img.parity != c2[name].parity:
            raise GradingError(f"phi[{name}] has the wrong parity")

    R, rename = relation_chart(K1, K2)
    to_r = lambda p: embed(p, R)
    psiR = to_r(psi)
    phiR = {n: to_r(p) for n, p in phi.items()}
    sstar = R.var(rename[K2.ts])

    # left side: P1(t, x, dpsi/dt s*, dphi/dx y* + dpsi/dx s*)
    from .algebra import partial as d
    m1 = {K1.ts: d(K1.t, psiR) * sstar}
    for b, a in c1.pairs:
        zb, za = c1.variables[b].name, c1.variables[a].name
        if zb == K1.t:
            continue
        img = d(zb, psiR) * sstar
        for b2, a2 in c2.pairs:
            yb, ya = c2.variables[b2].name, c2.variables[a2].name
            if yb == K2.t:
                continue
            img = img + d(zb, phiR[yb]) * R.var(rename[ya])
        m1[za] = img
    lhs = substitute(K1.P, m1, R)

    # right side: P2(psi, phi, s*, y*)
    m2 = {K2.t: psiR}
    m2.update(phiR)
    for a2 in c2.anti:
        n = c2.variables[a2].name
        m2[n] = R.var(rename[n])
    rhs = substitute(K2.P, m2, R)
    return lhs - rhs
