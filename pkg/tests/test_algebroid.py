from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from helpers import classical_structure, flow_structure, homogeneous, polys, so3_structure
from homkir.algebra import partial
from homkir.algebroid import (AlgebroidStructure, algebroid_anchor, algebroid_chart,
                              check_representation_laws, connection_law_signs, d_T,
                              higher_representation, representation_law_defects, tangent_chart,
                              tangent_lift, validate_algebroid)
from homkir.brackets import jacobiator, schouten
from homkir.kirillov import ValidationReport, kirillov_chart, validate_kirillov
from homkir.lie import algebroid_section, build_algebroid, contraction, so3

AC = algebroid_chart(1, 1)
ga = AC.gens()
KQ = kirillov_chart(1, 1)
gq = KQ.gens()
Q_LIFT = validate_kirillov(gq["x1"] ** 2 * gq["xi1"] * gq["xs1"]
                           + 2 * gq["t"] * gq["x1"] * gq["xi1"] * gq["ts"])


def sgn(e):
    return -1 if e & 1 else 1


def det3(a, b, c):
    return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


# ---------------------------------------------------------------------------
# validation


def test_validate_examples():
    # y ys is odd for either fibre parity; ts ys is the even one-dimensional fixture
    assert validate_algebroid(ga["y1"] * ga["ys1"]).check == "parity"
    for c in (1, Fraction(-5, 2)):
        A = validate_algebroid(c * ga["ts"] * ga["ys1"])
        assert isinstance(A, AlgebroidStructure)
        assert A.families["tstar"] == c * ga["ts"] * ga["ys1"]
    r = validate_algebroid(ga["t"] * ga["ts"] * ga["ys1"])
    assert isinstance(r, ValidationReport) and r.check == "weight"
    assert isinstance(validate_algebroid(AC.zero()), AlgebroidStructure)


def test_validate_master_failure():
    # [e1, e2] = e1 with anchor rho(e1) = d/dx, rho(e2) = 0: the anchor is not a morphism
    ch = algebroid_chart(1, 2)
    g = ch.gens()
    bracket = g["t"] ** -1 * g["y1"] * g["ys1"] * g["ys2"]
    assert isinstance(validate_algebroid(bracket), AlgebroidStructure)
    r = validate_algebroid(bracket + g["t"] ** -1 * g["ys1"] * g["xs1"])
    assert not r and r.check == "master" and r.residue


def test_zero_algebroid_has_zero_connection():
    A = validate_algebroid(AC.zero())
    s = ga["t"] * ga["x1"]
    a = ga["t"] * ga["y1"]
    assert higher_representation(A, [a], s) == AC.zero()
    assert higher_representation(A, [a, a * ga["x1"]], s) == AC.zero()


def test_section_weights_are_checked():
    A = validate_algebroid(ga["ts"] * ga["ys1"])
    with pytest.raises(ValueError):
        higher_representation(A, [ga["t"]], ga["t"])
    with pytest.raises(ValueError):
        higher_representation(A, [ga["t"] * ga["y1"]], ga["t"] * ga["y1"])
    with pytest.raises(ValueError):
        algebroid_anchor(A, [ga["t"] * ga["y1"]], ga["t"])


# ---------------------------------------------------------------------------
# the so(3) algebroid

SO3 = so3()
A3 = build_algebroid(SO3, spectators=1)
g3 = A3.chart.gens()
vec = st.lists(st.integers(-3, 3), min_size=3, max_size=3)


def test_so3_algebroid_families():
    assert A3.families["anchor"] == A3.chart.zero()
    assert A3.families["linear"] and A3.families["tstar"]


def test_so3_connection_example():
    a, b, c = (1, 2, 0), (0, 1, 3), (2, 0, 1)
    secs = [algebroid_section(A3.chart, v) for v in (a, b, c)]
    s = 5 * g3["t"]
    assert contraction(SO3, a, b, c) == 26 == 2 * det3(a, b, c)
    assert higher_representation(A3, secs, s) == -130 * g3["t"]


@given(vec, vec, vec, polys(A3.chart, names=["x1"], max_degree=2))
def test_so3_connection_third_order(a, b, c, f):
    secs = [algebroid_section(A3.chart, v) for v in (a, b, c)]
    s = g3["t"] * f
    # C_ijk = -2 eps_ijk, so a^i b^j c^k C_kji = 2 det(a, b, c); the sign c0 is -1
    assert higher_representation(A3, secs, s) == -2 * det3(a, b, c) * s
    assert higher_representation(A3, secs[:1], s) == A3.chart.zero()
    assert higher_representation(A3, secs[:2], s) == A3.chart.zero()


@given(vec, vec, polys(A3.chart, names=["x1"], max_degree=3))
def test_so3_anchors_vanish(a, b, f):
    secs = [algebroid_section(A3.chart, v) for v in (a, b)]
    for r in (1, 2):
        assert algebroid_anchor(A3, secs[:r], f) == A3.chart.zero()


@given(st.data())
def test_so3_representation_laws(data):
    r = data.draw(st.integers(0, 3))
    secs = [algebroid_section(A3.chart, data.draw(vec)) * data.draw(
        polys(A3.chart, names=["x1"], max_degree=1, max_terms=2)) for _ in range(r)]
    secs = [s for s in secs if s] or secs[:0]
    f = data.draw(polys(A3.chart, names=["x1"], max_degree=1))
    s = g3["t"] * data.draw(polys(A3.chart, names=["x1"], max_degree=2))
    assert check_representation_laws(A3, secs, s, f)
    assert check_representation_laws(A3, secs, s, A3.chart.one())


def test_corrupted_so3_algebroid_fails_jacobi():
    # rescaling a coefficient keeps so(3) a Lie algebra; an off-pattern constant does not.
    # The residue has no ts, so it shows in the Jacobiator of sections, not in flatness
    bad = A3.P + g3["t"] ** -1 * g3["y1"] * g3["xi1"] * g3["xi2"]
    assert validate_algebroid(bad).check == "master"
    secs = [algebroid_section(A3.chart, v) for v in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    # half the residue 2 t^-2 y2 xi1 xi2 xi3, fed three sections t y_i
    assert validate_algebroid(bad).residue == 2 * g3["t"] ** -2 * g3["y2"] * g3["xi1"] * g3["xi2"] * g3["xi3"]
    assert jacobiator(bad, secs) == -g3["t"] * g3["y2"]


# ---------------------------------------------------------------------------
# tangent lift

FIXTURES = [classical_structure(), flow_structure(), Q_LIFT, so3_structure()]


@pytest.mark.parametrize("K", FIXTURES, ids=["classical", "flow", "qlift", "so3"])
def test_tangent_lift_validates(K):
    A = tangent_lift(K)
    assert isinstance(A, AlgebroidStructure)
    assert A.P == d_T(K.P, tangent_chart(K.chart, K.t))


def test_tangent_lift_examples():
    K1 = kirillov_chart(1)
    g = K1.gens()
    T = tangent_chart(K1, "t")
    tg = T.gens()
    assert d_T(g["t"] * g["ts"], T) == tg["tdot"] * tg["ts"] + tg["t"] * tg["tsdot"]
    assert tangent_lift(validate_kirillov(K1.zero())).P == T.zero()
    with pytest.raises(ValueError):
        tangent_lift(g["t"] * g["ts"])


def test_tangent_chart_pairing_and_weights():
    T = tangent_chart(kirillov_chart(1), "t")
    assert ("t", "tsdot") in [(T.variables[b].name, T.variables[a].name) for b, a in T.pairs]
    assert ("tdot", "ts") in [(T.variables[b].name, T.variables[a].name) for b, a in T.pairs]
    assert T["t"].weight == (1, 0, 0) and T["tdot"].weight == (1, 1, 0)
    assert T["ts"].weight == (0, 0, 1) and T["tsdot"].weight == (0, 1, 1)
    assert T["x1"].weight == (0, 0, 0) and T["xs1"].weight == (1, 0, 1)


KS = kirillov_chart(1, 1)
TS = tangent_chart(KS, "t")


@given(homogeneous(KS, max_terms=3, negative=1), polys(KS, max_terms=3, negative=1))
def test_d_T_is_a_bracket_morphism(F, G):
    assert schouten(d_T(F, TS), d_T(G, TS)) == d_T(schouten(F, G), TS)


def test_d_T_is_a_derivation():
    F, G = gq["x1"] * gq["xi1"], gq["t"] * gq["xs1"] + gq["x1"] ** 2
    T = tangent_chart(KQ, "t")
    from homkir.algebra import embed
    lhs = d_T(F * G, T)
    rhs = d_T(F, T) * embed(G, T) + embed(F, T) * d_T(G, T)
    assert lhs == rhs


# ---------------------------------------------------------------------------
# connection laws on the lift of the super structure

FA = tangent_lift(flow_structure())
fa = FA.chart.gens()
lin = ["x1dot", "x2dot", "xi1dot", "xi2dot"]
base0 = ["x1", "x2", "xi1", "xi2"]


@st.composite
def lifted_sections(draw, n):
    """Sections ``t ydot b`` with a linear fibre coordinate and an optional base factor."""
    out = []
    for _ in range(n):
        y = fa[draw(st.sampled_from(lin))]
        b = fa[draw(st.sampled_from(base0))] ** draw(st.integers(0, 1))
        out.append(fa["t"] * y * b)
    return out


@given(st.data())
def test_lifted_representation_laws(data):
    r = data.draw(st.integers(0, 3))
    secs = data.draw(lifted_sections(r))
    f = data.draw(homogeneous(FA.chart, names=base0, max_degree=2, max_terms=2))
    s = fa["t"] * data.draw(homogeneous(FA.chart, names=base0, max_degree=1, max_terms=2))
    defects = representation_law_defects(FA, secs, s, f)
    assert defects["law1"] == FA.chart.zero()
    assert defects["law2"] == FA.chart.zero()
    assert defects["flatness"] == FA.chart.zero()


def test_representation_outputs_have_line_weight():
    secs = [fa["t"] * fa["x1dot"], fa["t"] * fa["xi2dot"] * fa["x2"]]
    for r in range(3):
        out = higher_representation(FA, secs[:r], fa["t"] * fa["xi1"])
        for m in out.terms:
            assert FA.chart.mono_grading(m).weight[:2] == (1, 0)


def test_printed_connection_signs_fail_for_odd_f():
    f = fa["xi1"]
    failures = [0, 0]
    samples = 0
    pool = [fa["t"] * fa[y] * fa[b] ** e for y in lin for b in base0 for e in (0, 1)]
    s_pool = [fa["t"], fa["t"] * fa["x2"], fa["t"] * fa["xi2"]]
    for i, a in enumerate(pool):
        for s in s_pool:
            args = [a]
            nab = higher_representation(FA, args, s)
            if not (f * nab):
                continue
            samples += 1
            r = len(args)
            pars = [x.parity for x in args]
            chi1_printed = f.parity * (sum(pars) + r)
            chi2_printed = f.parity * (sum(pars) + r + 1)
            lhs1 = higher_representation(FA, args, f * s)
            rhs1 = algebroid_anchor(FA, args, f) * s + sgn(chi1_printed) * (f * nab)
            lhs2 = higher_representation(FA, args[:-1] + [f * args[-1]], s)
            failures[0] += lhs1 != rhs1
            failures[1] += lhs2 != sgn(chi2_printed) * (f * nab)
            assert check_representation_laws(FA, args, s, f)
    assert samples and failures[0] and failures[1]
    assert connection_law_signs([fa["t"] * fa["x1dot"]], f) == (0, 0)
    assert connection_law_signs([fa["t"] * fa["xi1dot"]], f) == (1, 0)


@given(st.sampled_from(base0[:2]), st.data())
def test_anchor_linear_in_even_functions(h, data):
    secs = data.draw(lifted_sections(2))
    g = data.draw(homogeneous(FA.chart, names=base0, max_degree=2, max_terms=2))
    fh = fa[h]
    assert (algebroid_anchor(FA, [fh * secs[0], secs[1]], g)
            == fh * algebroid_anchor(FA, secs, g))
    assert partial(h, fh) == FA.chart.one()


def test_corrupted_lift_fails_flatness():
    bad = FA.P + FA.P.term_polys()[0]
    assert validate_algebroid(bad).check == "master"
    args, s = [fa["t"] * fa["xi2dot"]], fa["t"] * fa["x1"]
    assert check_representation_laws(FA, args, s, FA.chart.one())
    assert not check_representation_laws(bad, args, s, FA.chart.one())
    A = AlgebroidStructure(bad, "t", "ts", {})
    assert representation_law_defects(A, args, s, FA.chart.one())["flatness"] == s
