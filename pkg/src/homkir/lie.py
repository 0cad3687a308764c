"""Lie-algebra constructions: linear Poisson structure, Killing form, Cartan
3-cocycle and the higher Jacobi structure built from an odd cocycle."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Sequence

from .algebra import Chart, Poly, Variable, as_scalar, embed
from .algebroid import AlgebroidStructure, validate_algebroid
from .brackets import schouten
from .kirillov import KirillovStructure, MasterEquationError, validate_kirillov


class JacobiError(ValueError):
    pass


class CocycleError(ValueError):
    def __init__(self, msg, residue: Poly):
        super().__init__(msg)
        self.residue = residue


@dataclass(frozen=True)
class StructureConstants:
    """``Q[k][i][j]`` is the coefficient of ``e_k`` in ``[e_i, e_j]`` (0-based)."""

    dim: int
    Q: tuple

    def __post_init__(self):
        n = self.dim
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    if self.Q[k][i][j] != -self.Q[k][j][i]:
                        raise ValueError(f"structure constants not skew at Q^{k + 1}_{i + 1}{j + 1}")

    @classmethod
    def from_entries(cls, dim: int, entries: Sequence[Sequence[int]]) -> StructureConstants:
        """From 1-based ``[i, j, k, num, den]`` rows with ``i < j``; skew completion is automatic."""
        Q = [[[0] * dim for _ in range(dim)] for _ in range(dim)]
        for row in entries:
            if len(row) != 5:
                raise ValueError(f"entry {row} must be [i, j, k, num, den]")
            i, j, k, num, den = row
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in row):
                raise ValueError(f"entry {row} must contain integers")
            if not (1 <= i < j <= dim and 1 <= k <= dim):
                raise ValueError(f"entry {row} has indices out of range or i >= j")
            if den == 0:
                raise ValueError(f"entry {row} has zero denominator")
            c = as_scalar(Fraction(num, den))
            Q[k - 1][i - 1][j - 1] = c
            Q[k - 1][j - 1][i - 1] = -c
        return cls(dim, tuple(tuple(tuple(r) for r in m) for m in Q))

    @classmethod
    def from_json(cls, text: str) -> StructureConstants:
        data = json.loads(text)
        if not isinstance(data, dict) or "dim" not in data or "Q" not in data:
            raise ValueError('structure constants JSON needs "dim" and "Q"')
        return cls.from_entries(int(data["dim"]), data["Q"])

    def to_json(self) -> str:
        rows = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k in range(self.dim):
                    c = Fraction(self.Q[k][i][j])
                    if c:
                        rows.append([i + 1, j + 1, k + 1, c.numerator, c.denominator])
        return json.dumps({"dim": self.dim, "Q": rows})

    def perturbed(self, i: int, j: int, k: int, value) -> StructureConstants:
        """Copy with ``Q^k_{ij}`` (1-based) replaced by ``value`` (and skew partner)."""
        Q = [[list(r) for r in m] for m in self.Q]
        Q[k - 1][i - 1][j - 1] = as_scalar(value)
        Q[k - 1][j - 1][i - 1] = -as_scalar(value)
        return StructureConstants(self.dim, tuple(tuple(tuple(r) for r in m) for m in Q))


def so3() -> StructureConstants:
    return StructureConstants.from_json(
        resources.files("homkir").joinpath("data/so3.json").read_text())


def abelian(n: int) -> StructureConstants:
    return StructureConstants.from_entries(n, [])


def jacobi_residues(S: StructureConstants) -> dict[tuple[int, int, int, int], object]:
    n, Q = S.dim, S.Q
    out = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for m in range(n):
                    s = 0
                    for l in range(n):
                        s += Q[m][i][l] * Q[l][j][k] + Q[m][j][l] * Q[l][k][i] \
                            + Q[m][k][l] * Q[l][i][j]
                    if s:
                        out[(i, j, k, m)] = s
    return out


def jacobi_check(S: StructureConstants) -> bool:
    return not jacobi_residues(S)


def ce_chart(n: int, *, spectators: int = 0) -> Chart:
    """``(t, x..., y_1..y_n, ts, xs..., xi^1..xi^n)`` with ``(y_i, xi^i)`` paired."""
    vs = [Variable("t", 0, (1, 0), True)]
    vs += [Variable(f"x{a}", 0, (0, 0), index=a) for a in range(1, spectators + 1)]
    vs += [Variable(f"y{i}", 0, (0, 0), index=i) for i in range(1, n + 1)]
    vs.append(Variable("ts", 1, (0, 1)))
    vs += [Variable(f"xs{a}", 1, (1, 1), index=a) for a in range(1, spectators + 1)]
    vs += [Variable(f"xi{i}", 1, (1, 1), index=i) for i in range(1, n + 1)]
    pairs = [("t", "ts")] + [(f"x{a}", f"xs{a}") for a in range(1, spectators + 1)]
    pairs += [(f"y{i}", f"xi{i}") for i in range(1, n + 1)]
    return Chart(vs, pairs, name=f"ce{n}")


def _xi(ch: Chart, i: int) -> Poly:
    return ch.var(f"xi{i + 1}")


def _y(ch: Chart, i: int) -> Poly:
    return ch.var(f"y{i + 1}")


def ce_structures(S: StructureConstants, chart: Chart | None = None,
                  check: bool = True) -> tuple[Poly, Poly]:
    """Linear Poisson structure ``-1/2 xi^i xi^j Q^k_ji y_k`` and Euler field ``xi^i y_i``."""
    if check and not jacobi_check(S):
        raise JacobiError("structure constants violate the Jacobi identity")
    ch = chart or ce_chart(S.dim)
    n = S.dim
    lam = ch.zero()
    for i in range(n):
        for j in range(n):
            for k in range(n):
                q = S.Q[k][j][i]
                if q:
                    lam = lam + _xi(ch, i) * _xi(ch, j) * _y(ch, k) * (Fraction(-1, 2) * q)
    euler = ch.zero()
    for i in range(n):
        euler = euler + _xi(ch, i) * _y(ch, i)
    return lam, euler


def killing_form(S: StructureConstants) -> list[list]:
    """Trace form ``k_ij = sum_{k,l} Q^k_il Q^l_jk``."""
    n, Q = S.dim, S.Q
    return [[as_scalar(sum(Q[k][i][l] * Q[l][j][k] for k in range(n) for l in range(n)) + 0)
             for j in range(n)] for i in range(n)]


def cartan_tensor(S: StructureConstants) -> dict[tuple[int, int, int], object]:
    """``C_ijk = k_il Q^l_kj + k_jl Q^l_ki + k_kl Q^l_ij`` (nonzero entries, 0-based)."""
    n, Q = S.dim, S.Q
    kf = killing_form(S)
    out = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                s = sum(kf[i][l] * Q[l][k][j] + kf[j][l] * Q[l][k][i] + kf[k][l] * Q[l][i][j]
                        for l in range(n))
                if s:
                    out[(i, j, k)] = as_scalar(s)
    return out


def cartan_3cocycle(S: StructureConstants, chart: Chart | None = None, check: bool = True) -> Poly:
    """``C3 = 1/3! C_ijk xi^k xi^j xi^i``; the cocycle condition is asserted."""
    ch = chart or ce_chart(S.dim)
    C = ch.zero()
    for (i, j, k), c in cartan_tensor(S).items():
        C = C + _xi(ch, k) * _xi(ch, j) * _xi(ch, i) * Fraction(c, 6)
    if check:
        lam, _ = ce_structures(S, ch)
        res = schouten(lam, C)
        if res:
            raise CocycleError(f"cocycle condition fails at {res.witness()}", res)
    return C


def xi_degree(C: Poly) -> int:
    ch = C.chart
    degs = {sum(m[ch.position(v.name)] for v in ch.variables if v.name.startswith("xi"))
            for m in C.terms}
    if len(degs) != 1:
        raise ValueError("cocycle must be homogeneous in xi")
    return degs.pop()


def build_cocycle_jacobi(S: StructureConstants, C: Poly | None = None,
                         chart: Chart | None = None) -> KirillovStructure:
    """``P = t^-1 Lambda + t^-m C E + t^(1-m) C ts`` for an odd cocycle ``C`` of xi-degree ``m``.

    Inconsistent input (structure constants violating Jacobi, or a cochain
    that is not closed) surfaces as a ``MasterEquationError`` carrying the
    nonzero residue of the self-bracket.
    """
    ch = chart or (C.chart if C is not None else ce_chart(S.dim))
    lam, euler = ce_structures(S, ch, check=False)
    t = ch.var("t")
    if C is None:
        C = cartan_3cocycle(S, ch, check=False)
    C = embed(C, ch)
    P = t ** -1 * lam
    if C:
        if set(C.parity_classes()) != {1}:
            raise CocycleError("cocycle must be odd", C)
        m = xi_degree(C)
        P = P + t ** (-m) * C * euler + t ** (1 - m) * C * ch.var("ts")
    out = validate_kirillov(P)
    if not out:
        raise MasterEquationError(f"structure fails the {out.check} check at {out.witness}",
                                  out.residue if out.residue is not None else P, P)
    res = schouten(lam, C)
    if res:
        raise CocycleError(f"cocycle condition fails at {res.witness()}", res)
    return out


def summand_weights(S: StructureConstants, C: Poly) -> list[set[int]]:
    """Action weights of the three summands (each must be {1})."""
    ch = C.chart
    lam, euler = ce_structures(S, ch)
    t = ch.var("t")
    m = xi_degree(C) if C else 0
    parts = [t ** -1 * lam, t ** (-m) * C * euler, t ** (1 - m) * C * ch.var("ts")]
    return [p.weights(0) for p in parts]


# ---------------------------------------------------------------------------
# the associated algebroid


def algebroid_ce_chart(n: int, spectators: int = 0) -> Chart:
    """Tri-graded chart: ``y`` takes the linear-weight role, ``xi`` the fibre antimomenta."""
    vs = [Variable("t", 0, (1, 0, 0), True)]
    vs += [Variable(f"x{a}", 0, (0, 0, 0), index=a) for a in range(1, spectators + 1)]
    vs += [Variable(f"y{i}", 0, (0, 1, 0), index=i) for i in range(1, n + 1)]
    vs.append(Variable("ts", 1, (0, 1, 1)))
    vs += [Variable(f"xs{a}", 1, (1, 1, 1), index=a) for a in range(1, spectators + 1)]
    vs += [Variable(f"xi{i}", 1, (1, 0, 1), index=i) for i in range(1, n + 1)]
    pairs = [("t", "ts")] + [(f"x{a}", f"xs{a}") for a in range(1, spectators + 1)]
    pairs += [(f"y{i}", f"xi{i}") for i in range(1, n + 1)]
    return Chart(vs, pairs, name=f"ce-algebroid{n}")


def build_algebroid(S: StructureConstants, C: Poly | None = None,
                    spectators: int = 1) -> AlgebroidStructure:
    """The linear structure re-graded as a higher Jacobi algebroid.

    ``spectators`` adds inert base coordinates so that anchors can be probed
    on non-constant base functions.
    """
    K = build_cocycle_jacobi(S, C)
    ch = algebroid_ce_chart(S.dim, spectators)
    res = validate_algebroid(embed(K.P, ch))
    if not res:
        raise MasterEquationError(f"algebroid fails the {res.check} check at {res.witness}",
                                  res.residue or ch.zero())
    return res


def contraction(S: StructureConstants, a: Sequence, b: Sequence, c: Sequence):
    """``a^i b^j c^k C_kji``."""
    C = cartan_tensor(S)
    n = S.dim
    return as_scalar(sum(Fraction(a[i]) * b[j] * c[k] * C.get((k, j, i), 0)
                         for i in range(n) for j in range(n) for k in range(n)) + 0)


def algebroid_section(ch: Chart, coeffs: Sequence) -> Poly:
    """``t a^i y_i``."""
    t = ch.var("t")
    out = ch.zero()
    for i, a in enumerate(coeffs):
        if a:
            out = out + t * ch.var(f"y{i + 1}") * a
    return out
