"""Exact supercommutative polynomial arithmetic.

Polynomials live on a :class:`Chart`, an ordered list of even and odd
variables carrying integer multi-weights.  Monomials are stored as exponent
tuples in declaration order, which is also the canonical factor order; odd
factors are reordered with Koszul signs.  Even variables flagged invertible
may carry negative exponents.  Coefficients are exact rationals (``int`` when
integral, otherwise ``Fraction``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from . import _kernels as K

Scalar = Union[int, Fraction]


class ChartMismatch(ValueError):
    """Raised when operands live on different charts."""


class GradingError(ValueError):
    """Raised on parity or invertibility violations."""


def as_scalar(c) -> Scalar:
    if isinstance(c, bool) or not isinstance(c, (int, Fraction)):
        raise TypeError(f"expected an exact rational, got {type(c).__name__}")
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


@dataclass(frozen=True)
class Variable:
    name: str
    parity: int
    weight: tuple[int, ...]
    invertible: bool = False
    index: int | None = None

    def __post_init__(self):
        if self.parity not in (0, 1):
            raise GradingError(f"parity of {self.name} must be 0 or 1")
        if self.invertible and self.parity:
            raise GradingError(f"invertible variable {self.name} must be even")


class Chart:
    """An ordered graded coordinate system with conjugate pairs.

    ``pairs`` lists ``(base, antimomentum)`` names; the antimomentum must have
    the opposite parity of its base variable.
    """

    def __init__(self, variables: Iterable[Variable], pairs: Iterable[tuple[str, str]] = (),
                 name: str | None = None):
        self.variables = tuple(variables)
        self.name = name
        if not self.variables:
            self.gradings = 0
        else:
            self.gradings = len(self.variables[0].weight)
        self._pos: dict[str, int] = {}
        for i, v in enumerate(self.variables):
            if v.name in self._pos:
                raise GradingError(f"duplicate variable name {v.name!r}")
            if len(v.weight) != self.gradings:
                raise GradingError(f"variable {v.name} has {len(v.weight)} weight components, "
                                   f"chart has {self.gradings}")
            self._pos[v.name] = i
        self.n = len(self.variables)
        self.odd = tuple(i for i, v in enumerate(self.variables) if v.parity)
        seen: set[int] = set()
        pair_pos = []
        for base, anti in pairs:
            b, a = self.position(base), self.position(anti)
            if b in seen or a in seen or a == b:
                raise GradingError(f"pair ({base}, {anti}) overlaps another pair")
            if self.variables[a].parity != 1 - self.variables[b].parity:
                raise GradingError(f"antimomentum {anti} must have the opposite parity of {base}")
            if self.variables[a].invertible:
                raise GradingError(f"antimomentum {anti} cannot be invertible")
            seen.update((a, b))
            pair_pos.append((b, a))
        self.pairs = tuple(pair_pos)
        self.anti = frozenset(a for _, a in self.pairs)
        self.partner = {}
        for b, a in self.pairs:
            self.partner[b] = a
            self.partner[a] = b
        self._key = (tuple(self.variables), self.pairs)
        self._hash = hash(self._key)

    # identity
    def __eq__(self, other):
        return self is other or (isinstance(other, Chart) and self._key == other._key)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        label = self.name or "Chart"
        return f"<{label}: {', '.join(v.name for v in self.variables)}>"

    # lookup
    def __contains__(self, name) -> bool:
        return name in self._pos

    def __getitem__(self, name: str) -> Variable:
        return self.variables[self.position(name)]

    def position(self, name) -> int:
        if isinstance(name, Variable):
            name = name.name
        try:
            return self._pos[name]
        except KeyError:
            raise KeyError(f"chart has no variable {name!r}") from None

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def base_names(self) -> list[str]:
        return [v.name for i, v in enumerate(self.variables) if i not in self.anti]

    def anti_names(self) -> list[str]:
        return [v.name for i, v in enumerate(self.variables) if i in self.anti]

    def partner_of(self, name: str) -> str | None:
        p = self.partner.get(self.position(name))
        return None if p is None else self.variables[p].name

    # constructors
    def zero(self) -> Poly:
        return Poly(self, {})

    def one(self) -> Poly:
        return self.const(1)

    def const(self, c) -> Poly:
        c = as_scalar(c)
        return Poly(self, {(0,) * self.n: c} if c else {})

    def var(self, name: str) -> Poly:
        e = [0] * self.n
        e[self.position(name)] = 1
        return Poly(self, {tuple(e): 1})

    def gens(self) -> dict[str, Poly]:
        return {v.name: self.var(v.name) for v in self.variables}

    def monomial(self, exps: Mapping[str, int], coef=1) -> Poly:
        e = [0] * self.n
        for name, k in exps.items():
            e[self.position(name)] = k
        return Poly.from_terms(self, {tuple(e): coef})

    def mono_grading(self, mono: tuple[int, ...]) -> Grading:
        par = 0
        w = [0] * self.gradings
        for v, k in zip(self.variables, mono):
            if k:
                par += v.parity * k
                for j, wj in enumerate(v.weight):
                    w[j] += wj * k
        return Grading(par & 1, tuple(w))

    def anti_degree(self, mono: tuple[int, ...]) -> int:
        return sum(mono[a] for a in self.anti)


@dataclass(frozen=True)
class Grading:
    parity: int
    weight: tuple[int, ...]


@dataclass(frozen=True)
class Inhomogeneous:
    classes: frozenset = field(default_factory=frozenset)


def _term_key(mono: tuple[int, ...]):
    return (sum(abs(e) for e in mono), tuple(-e for e in mono))


class Poly:
    """Immutable supercommutative polynomial on a chart."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: dict | None = None):
        self.chart = chart
        self.terms = terms if terms is not None else {}

    @classmethod
    def from_terms(cls, chart: Chart, terms: Mapping) -> Poly:
        out: dict = {}
        for mono, c in terms.items():
            mono = tuple(mono)
            if len(mono) != chart.n:
                raise ValueError("exponent tuple has wrong length")
            for i, e in enumerate(mono):
                v = chart.variables[i]
                if v.parity and e not in (0, 1):
                    if e > 1:
                        break
                    raise GradingError(f"negative power of odd variable {v.name}")
                if e < 0 and not v.invertible:
                    raise GradingError(f"negative power of non-invertible variable {v.name}")
            else:
                c = as_scalar(c)
                s = out.get(mono, 0) + c
                if s:
                    out[mono] = as_scalar(s)
                else:
                    out.pop(mono, None)
        return cls(chart, out)

    # structure
    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self) -> Scalar:
        return self.terms.get((0,) * self.chart.n, 0)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Scalar]]:
        return sorted(self.terms.items(), key=lambda t: _term_key(t[0]))

    def term_polys(self) -> list[Poly]:
        return [Poly(self.chart, {m: c}) for m, c in self.sorted_terms()]

    def parity_classes(self) -> dict[int, Poly]:
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            out.setdefault(self.chart.mono_grading(m).parity, {})[m] = c
        return {p: Poly(self.chart, t) for p, t in sorted(out.items())}

    def split(self, key) -> dict:
        """Group terms by ``key(mono)``."""
        out: dict = {}
        for m, c in self.terms.items():
            out.setdefault(key(m), {})[m] = c
        return {k: Poly(self.chart, t) for k, t in out.items()}

    @property
    def parity(self) -> int:
        g = grading_of(self)
        if isinstance(g, Inhomogeneous):
            pars = {c.parity for c in g.classes}
            if len(pars) > 1:
                raise GradingError(f"{self} is inhomogeneous in parity")
            return pars.pop()
        return g.parity

    def weights(self, component: int) -> set[int]:
        return {self.chart.mono_grading(m).weight[component] for m in self.terms}

    def anti_degree(self) -> int:
        """Maximal total antimomentum degree (0 for the zero polynomial)."""
        return max((self.chart.anti_degree(m) for m in self.terms), default=0)

    def has_antimomenta(self) -> bool:
        return any(self.chart.anti_degree(m) for m in self.terms)

    # arithmetic
    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.chart != self.chart:
                raise ChartMismatch(f"{self.chart!r} vs {other.chart!r}")
            return other
        return self.chart.const(other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return Poly(self.chart, K.add_terms(self.terms, other.terms))

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.chart, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return Poly(self.chart, K.add_terms(self.terms, other.terms, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Poly):
            other = self._coerce(other)
            return Poly(self.chart, K.mul_terms(self.terms, other.terms, self.chart.odd))
        try:
            c = as_scalar(other)
        except TypeError:
            return NotImplemented
        return self.scale(c)

    def __rmul__(self, other):
        try:
            c = as_scalar(other)
        except TypeError:
            return NotImplemented
        return self.scale(c)

    def scale(self, c) -> Poly:
        c = as_scalar(c)
        if not c:
            return self.chart.zero()
        return Poly(self.chart, {m: as_scalar(v * c) for m, v in self.terms.items()})

    def __truediv__(self, c):
        c = as_scalar(c)
        return self.scale(Fraction(1) / c)

    def __pow__(self, n: int) -> Poly:
        if not isinstance(n, int):
            raise TypeError("exponent must be an integer")
        if n < 0:
            return self.inverse() ** (-n)
        result = self.chart.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self) -> Poly:
        """Inverse of a single monomial in invertible variables."""
        if len(self.terms) != 1:
            raise GradingError(f"cannot invert non-monomial {self}")
        (m, c), = self.terms.items()
        for v, e in zip(self.chart.variables, m):
            if e and not v.invertible:
                raise GradingError(f"cannot invert {self}: {v.name} is not invertible")
        return Poly(self.chart, {tuple(-e for e in m): as_scalar(Fraction(1) / c)})

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.chart == other.chart and self.terms == other.terms
        try:
            return self == self.chart.const(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.chart, frozenset(self.terms.items())))

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"Poly({to_text(self)})"

    def witness(self) -> str:
        """Canonical text of the first term (for failure reports)."""
        if not self.terms:
            return "0"
        m, c = self.sorted_terms()[0]
        return to_text(Poly(self.chart, {m: c}))


# ---------------------------------------------------------------------------
# operations


def grading_of(p: Poly) -> Grading | Inhomogeneous:
    if not p.terms:
        return Grading(0, (0,) * p.chart.gradings)
    classes = {p.chart.mono_grading(m) for m in p.terms}
    if len(classes) == 1:
        return classes.pop()
    return Inhomogeneous(frozenset(classes))


def partial(v, p: Poly) -> Poly:
    """Left derivative of ``p`` with respect to the variable ``v``."""
    pos = p.chart.position(v)
    odd = bool(p.chart.variables[pos].parity)
    return Poly(p.chart, K.partial_terms(p.terms, pos, odd, p.chart.odd))


def restrict_to_base(p: Poly) -> Poly:
    """Set every antimomentum to zero."""
    anti = p.chart.anti
    if not anti:
        return p
    return Poly(p.chart, {m: c for m, c in p.terms.items() if not any(m[a] for a in anti)})


def embed(p: Poly, chart: Chart) -> Poly:
    """Re-express ``p`` on ``chart`` by matching variable names."""
    if p.chart == chart:
        return p
    src = p.chart
    index = []
    for v in src.variables:
        if v.name in chart:
            w = chart[v.name]
            if w.parity != v.parity:
                raise GradingError(f"variable {v.name} changes parity")
            index.append(chart.position(v.name))
        else:
            index.append(None)
    out = {}
    odd_src = [i for i in src.odd]
    for m, c in p.terms.items():
        e = [0] * chart.n
        for i, k in enumerate(m):
            if k:
                j = index[i]
                if j is None:
                    raise ChartMismatch(f"target chart lacks variable {src.variables[i].name}")
                e[j] = k
        # reorder odd factors into the target declaration order
        order = [index[i] for i in odd_src if m[i]]
        inversions = sum(1 for a in range(len(order)) for b in range(a + 1, len(order))
                         if order[a] > order[b])
        out[tuple(e)] = -c if inversions & 1 else c
    return Poly.from_terms(chart, out)


def substitute(p: Poly, mapping: Mapping, target: Chart | None = None) -> Poly:
    """Simultaneous substitution of variables by polynomials.

    ``mapping`` maps variable names (or :class:`Variable`) of ``p``'s chart to
    polynomials on ``target`` (default: the same chart).  Unmapped variables
    go to the equally named variable of ``target``.
    """
    src = p.chart
    target = target or src
    images: list[Poly] = []
    mp = {(k.name if isinstance(k, Variable) else k): v for k, v in mapping.items()}
    for k in mp:
        src.position(k)
    for v in src.variables:
        if v.name in mp:
            img = mp[v.name]
            if not isinstance(img, Poly):
                img = target.const(img)
            if img.chart != target:
                raise ChartMismatch(f"image of {v.name} lives on another chart")
            if img.terms:
                pars = {target.mono_grading(m).parity for m in img.terms}
                if pars != {v.parity}:
                    raise GradingError(f"image of {v.name} has the wrong parity")
        elif v.name in target:
            if target[v.name].parity != v.parity:
                raise GradingError(f"variable {v.name} changes parity")
            img = target.var(v.name)
        else:
            img = None
        images.append(img)

    powers: dict[tuple[int, int], Poly] = {}

    def power(i: int, e: int) -> Poly:
        key = (i, e)
        if key not in powers:
            img = images[i]
            if img is None:
                raise ChartMismatch(f"no image for variable {src.variables[i].name}")
            if e < 0:
                try:
                    powers[key] = img.inverse() ** (-e)
                except GradingError as exc:
                    raise GradingError(f"substituting into a negative power of "
                                       f"{src.variables[i].name}: {exc}") from None
            else:
                powers[key] = img ** e
        return powers[key]

    total: dict = {}
    for m, c in p.terms.items():
        term = target.const(c)
        for i, e in enumerate(m):
            if e:
                term = term * power(i, e)
                if not term:
                    break
        total = K.add_terms(total, term.terms)
    return Poly(target, total)


# ---------------------------------------------------------------------------
# canonical text form


def scalar_text(c: Scalar) -> str:
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def monomial_text(chart: Chart, mono: tuple[int, ...]) -> str:
    parts = []
    for v, e in zip(chart.variables, mono):
        if e == 1:
            parts.append(v.name)
        elif e:
            parts.append(f"{v.name}^{e}")
    return "*".join(parts)


def to_text(p: Poly) -> str:
    if not p.terms:
        return "0"
    out = []
    for m, c in p.sorted_terms():
        mono = monomial_text(p.chart, m)
        out.append(f"{scalar_text(c)} * {mono}" if mono else scalar_text(c))
    return " + ".join(out)
