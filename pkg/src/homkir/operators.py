"""Normal-ordered graded differential operators.

An operator is a finite sum ``c_beta(z) d^beta`` with all coefficients to the
left of the derivative symbols.  ``d^beta`` is a product of left derivatives
in chart declaration order; applying it differentiates by the highest-index
symbol first.
"""

from __future__ import annotations

from itertools import product as iproduct
from typing import Iterable, Mapping

from .algebra import Chart, ChartMismatch, Poly, Variable, embed, partial


class DiffOperator:
    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: Mapping[tuple[int, ...], Poly] | None = None):
        self.chart = chart
        clean = {}
        for sym, c in (terms or {}).items():
            if c:
                if c.chart != chart:
                    raise ChartMismatch("operator coefficient lives on another chart")
                clean[tuple(sym)] = c
        self.terms = clean

    # constructors
    @classmethod
    def zero(cls, chart: Chart) -> DiffOperator:
        return cls(chart, {})

    @classmethod
    def mult(cls, p: Poly) -> DiffOperator:
        return cls(p.chart, {(0,) * p.chart.n: p})

    @classmethod
    def identity(cls, chart: Chart) -> DiffOperator:
        return cls.mult(chart.one())

    @classmethod
    def derivative(cls, chart: Chart, name: str, coef: Poly | None = None) -> DiffOperator:
        sym = [0] * chart.n
        sym[chart.position(name)] = 1
        return cls(chart, {tuple(sym): coef if coef is not None else chart.one()})

    # structure
    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, DiffOperator) and self.chart == other.chart \
            and self.terms == other.terms

    def __hash__(self):
        return hash((self.chart, frozenset(self.terms.items())))

    def symbol_parity(self, sym: tuple[int, ...]) -> int:
        return sum(e for i, e in enumerate(sym) if e and self.chart.variables[i].parity) & 1

    @property
    def order(self) -> int:
        return max((sum(s) for s in self.terms), default=0)

    def parity_classes(self) -> dict[int, DiffOperator]:
        out: dict[int, dict] = {}
        for sym, c in self.terms.items():
            sp = self.symbol_parity(sym)
            for cp, cc in c.parity_classes().items():
                d = out.setdefault((cp + sp) & 1, {})
                d[sym] = d[sym] + cc if sym in d else cc
        return {p: DiffOperator(self.chart, t) for p, t in sorted(out.items())}

    @property
    def parity(self) -> int:
        classes = self.parity_classes()
        if len(classes) > 1:
            raise ValueError("operator is inhomogeneous in parity")
        return next(iter(classes), 0)

    def weights(self, component: int = 0) -> set[int]:
        out = set()
        for sym, c in self.terms.items():
            sw = sum(e * self.chart.variables[i].weight[component] for i, e in enumerate(sym))
            out |= {w - sw for w in c.weights(component)}
        return out

    # linear structure
    def __add__(self, other: DiffOperator) -> DiffOperator:
        self._same(other)
        t = dict(self.terms)
        for s, c in other.terms.items():
            t[s] = t[s] + c if s in t else c
        return DiffOperator(self.chart, t)

    def __neg__(self):
        return DiffOperator(self.chart, {s: -c for s, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k) -> DiffOperator:
        return DiffOperator(self.chart, {s: c * k for s, c in self.terms.items()})

    def lmul(self, p: Poly) -> DiffOperator:
        """``p`` times the operator (coefficients multiplied on the left)."""
        return DiffOperator(self.chart, {s: p * c for s, c in self.terms.items()})

    def _same(self, other):
        if not isinstance(other, DiffOperator) or other.chart != self.chart:
            raise ChartMismatch("operators live on different charts")

    def __call__(self, p: Poly) -> Poly:
        return op_apply(self, p)

    def __matmul__(self, other):
        return op_compose(self, other)

    def __repr__(self):
        return f"DiffOperator({op_text(self)})"

    def __str__(self):
        return op_text(self)


def _apply_symbol(chart: Chart, sym: tuple[int, ...], p: Poly) -> Poly:
    for i in range(chart.n - 1, -1, -1):
        name = chart.variables[i].name
        for _ in range(sym[i]):
            p = partial(name, p)
            if not p:
                return p
    return p


def op_apply(D: DiffOperator, p: Poly) -> Poly:
    if p.chart != D.chart:
        raise ChartMismatch("operator and polynomial live on different charts")
    out = D.chart.zero()
    for sym, c in D.terms.items():
        out = out + c * _apply_symbol(D.chart, sym, p)
    return out


def _merge_symbol(chart: Chart, pos: int, sym: tuple[int, ...]) -> tuple[tuple[int, ...] | None, int]:
    """``d_pos * d^sym`` in normal order: (new symbol or None, sign)."""
    v = chart.variables[pos]
    if v.parity:
        if sym[pos]:
            return None, 0
        swaps = sum(sym[i] for i in range(pos) if chart.variables[i].parity)
        sign = -1 if swaps & 1 else 1
    else:
        sign = 1
    s = list(sym)
    s[pos] += 1
    return tuple(s), sign


def _symbol_after(chart: Chart, pos: int, terms: dict) -> dict:
    """``d_pos o X`` for ``X`` given as symbol -> coefficient."""
    v = chart.variables[pos]
    out: dict = {}

    def add(sym, c):
        if c:
            out[sym] = out[sym] + c if sym in out else c

    for sym, c in terms.items():
        add(sym, partial(v.name, c))
        new, sign = _merge_symbol(chart, pos, sym)
        if new is None:
            continue
        if v.parity:
            odd_part = c.parity_classes()
            for cp, cc in odd_part.items():
                add(new, cc * (-sign if cp else sign))
        else:
            add(new, c * sign)
    return {s: c for s, c in out.items() if c}


def op_compose(A: DiffOperator, B: DiffOperator) -> DiffOperator:
    A._same(B)
    ch = A.chart
    total: dict = {}
    for sym, c in A.terms.items():
        cur = dict(B.terms)
        for i in range(ch.n - 1, -1, -1):
            for _ in range(sym[i]):
                cur = _symbol_after(ch, i, cur)
                if not cur:
                    break
            if not cur:
                break
        for s, cc in cur.items():
            v = c * cc
            if v:
                total[s] = total[s] + v if s in total else v
    return DiffOperator(ch, total)


def op_commutator(A: DiffOperator, B: DiffOperator) -> DiffOperator:
    """Graded commutator, distributed over parity classes."""
    A._same(B)
    out = DiffOperator.zero(A.chart)
    for pa, Ac in A.parity_classes().items():
        for pb, Bc in B.parity_classes().items():
            ab = op_compose(Ac, Bc)
            ba = op_compose(Bc, Ac)
            out = out + (ab + ba if pa * pb else ab - ba)
    return out


def op_text(D: DiffOperator) -> str:
    if not D.terms:
        return "0"
    parts = []
    for sym in sorted(D.terms, key=lambda s: (sum(s), tuple(-e for e in s))):
        c = D.terms[sym]
        syms = []
        for v, e in zip(D.chart.variables, sym):
            if e:
                syms.append(f"D[{v.name}]" + (f"^{e}" if e > 1 else ""))
        body = "*".join(syms)
        parts.append(f"({c})" + (f" {body}" if body else ""))
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# antitangent charts, de Rham differential, interior derivative


class AntitangentChart(Chart):
    """Chart ``(t, x..., dt, dx...)``; ``dmap`` sends a coordinate to its differential."""

    def __init__(self, variables, dmap: Mapping[str, str], source: Chart | None = None,
                 name: str | None = None):
        super().__init__(variables, (), name=name)
        self.dmap = dict(dmap)
        self.source = source
        self._key = (self._key, tuple(sorted(self.dmap.items())))
        self._hash = hash(self._key)


def antitangent_chart(chart: Chart) -> AntitangentChart:
    """The antitangent chart matching an anticotangent chart.

    Differentials are ordered like the antimomenta so that symbol order and
    monomial order agree.  Weights: ``dt`` is (0, 1); ``dx`` is
    (weight(x) - 1, 1) in the action component.
    """
    from .kirillov import kirillov_roles
    t, _ = kirillov_roles(chart)
    base = [chart.variables[i] for i in range(chart.n) if i not in chart.anti]
    vs = [Variable(v.name, v.parity, (v.weight[0], 0), v.invertible, v.index) for v in base]
    dmap = {}
    anti_sorted = sorted(chart.pairs, key=lambda ba: ba[1])
    for b, _ in anti_sorted:
        v = chart.variables[b]
        dn = "d" + v.name
        if dn in chart:
            raise ValueError(f"differential name {dn} clashes with a chart variable")
        w = (0, 1) if v.name == t else (v.weight[0] - 1, 1)
        vs.append(Variable(dn, 1 - v.parity, w, index=v.index))
        dmap[v.name] = dn
    return AntitangentChart(vs, dmap, chart, name=f"antitangent[{chart.name or ''}]")


def de_rham(chart: AntitangentChart) -> DiffOperator:
    if not isinstance(chart, AntitangentChart):
        raise ValueError("de Rham differential needs an antitangent chart")
    D = DiffOperator.zero(chart)
    for z, dz in chart.dmap.items():
        D = D + DiffOperator.derivative(chart, z, chart.var(dz))
    return D


def interior(P: Poly, target: AntitangentChart | None = None) -> DiffOperator:
    """``i_P``: antimomenta become derivatives by the differentials, with an overall minus."""
    src = P.chart
    if isinstance(src, AntitangentChart):
        raise ValueError("interior derivative expects a function on the anticotangent chart")
    target = target or antitangent_chart(src)
    sym_pos = {}
    for b, a in src.pairs:
        sym_pos[a] = target.position(target.dmap[src.variables[b].name])
    terms: dict = {}
    for mono, c in P.terms.items():
        base = tuple(0 if i in src.anti else e for i, e in enumerate(mono))
        anti = tuple(e if i in src.anti else 0 for i, e in enumerate(mono))
        # sign of splitting the canonical monomial as base * antimomenta
        split = Poly(src, {base: 1}) * Poly(src, {anti: 1})
        sign = split.terms[mono]
        sym = [0] * target.n
        for a, e in enumerate(anti):
            if e:
                sym[sym_pos[a]] = e
        coef = embed(Poly(src, {base: -c * sign}), target)
        sym = tuple(sym)
        terms[sym] = terms[sym] + coef if sym in terms else coef
    # the symbol product must follow antimomentum order; verify monotonicity once
    order = [sym_pos[a] for a in sorted(sym_pos)]
    if order != sorted(order):
        raise ValueError("differential order does not follow antimomentum order")
    return DiffOperator(target, terms)


def koszul_brylinski(K, target: AntitangentChart | None = None) -> DiffOperator:
    from .kirillov import _require_valid
    K = _require_valid(K)
    target = target or antitangent_chart(K.chart)
    return op_commutator(de_rham(target), interior(K.P, target))


# ---------------------------------------------------------------------------
# semantic comparison


def spanning_monomials(chart: Chart, degree: int, names: Iterable[str] | None = None,
                       negative: int = 0) -> list[Poly]:
    """All monomials of total degree <= ``degree`` in ``names``.

    Invertible variables additionally range down to exponent ``-negative``.
    """
    names = list(names) if names is not None else list(chart.names)
    ranges = []
    for n in names:
        v = chart[n]
        hi = 1 if v.parity else degree
        lo = -negative if v.invertible else 0
        ranges.append(range(lo, hi + 1))
    out = []
    for exps in iproduct(*ranges):
        if sum(abs(e) for e in exps) > degree:
            continue
        out.append(chart.monomial(dict(zip(names, exps))))
    out.sort(key=lambda p: next(iter(p.terms)) and
             (sum(abs(e) for e in next(iter(p.terms))), tuple(-e for e in next(iter(p.terms)))))
    return out


def semantically_equal(A: DiffOperator, B: DiffOperator, degree: int = 3) -> bool:
    A._same(B)
    return all(op_apply(A, m) == op_apply(B, m) for m in spanning_monomials(A.chart, degree))
