import json
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from homkir.brackets import schouten
from homkir.kirillov import MasterEquationError, validate_kirillov
from homkir.lie import (CocycleError, JacobiError, StructureConstants, abelian, build_algebroid,
                        build_cocycle_jacobi, cartan_3cocycle, cartan_tensor, ce_chart,
                        ce_structures, jacobi_check, jacobi_residues, killing_form, so3,
                        summand_weights, xi_degree)


def levi_civita(i, j, k):
    """Sign of the permutation (i, j, k) of (0, 1, 2), zero on repeats."""
    if len({i, j, k}) < 3:
        return 0
    return 1 if (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1


def killing_oracle():
    """``sum_{k,l} eps_kil eps_ljk`` written out without the engine's tensors."""
    return [[sum(levi_civita(i, l, k) * levi_civita(j, k, l) for k in range(3) for l in range(3))
             for j in range(3)] for i in range(3)]


SO3 = so3()
PAIRS = [(1, 2), (1, 3), (2, 3)]
SINGLE_PERTURBATIONS = [(i, j, k) for i, j in PAIRS for k in (1, 2, 3)]


def perturb(S, i, j, k):
    """Switch an absent constant on, or double a present one."""
    c = S.Q[k - 1][i - 1][j - 1]
    return S.perturbed(i, j, k, 2 * c if c else 1)


# ---------------------------------------------------------------------------
# structure constants


def test_so3_constants():
    for i, j, k in product(range(3), repeat=3):
        assert SO3.Q[k][i][j] == levi_civita(i, j, k)


def test_jacobi_check_examples():
    assert jacobi_check(SO3)
    assert jacobi_check(abelian(4))
    bad = SO3.perturbed(1, 2, 1, 1)
    assert not jacobi_check(bad)
    assert jacobi_residues(bad)


def test_rescaled_so3_is_still_a_lie_algebra():
    # every three-dimensional bracket [e_i, e_j] = c_k e_k satisfies Jacobi,
    # so rescaling one so(3) constant is caught by the Killing form instead
    S = SO3.perturbed(1, 2, 3, 2)
    assert jacobi_check(S)
    assert killing_form(S) != killing_form(SO3)


@pytest.mark.parametrize("ijk", SINGLE_PERTURBATIONS, ids=lambda t: "Q%d_%d%d" % (t[2], t[0], t[1]))
def test_single_perturbation_detected(ijk):
    S = perturb(SO3, *ijk)
    if jacobi_check(S):
        assert killing_form(S) != [[-2 if i == j else 0 for j in range(3)] for i in range(3)]
    else:
        with pytest.raises(MasterEquationError) as exc:
            build_cocycle_jacobi(S)
        assert exc.value.residue


def test_from_entries_validation():
    with pytest.raises(ValueError):
        StructureConstants.from_entries(3, [[2, 1, 3, 1, 1]])
    with pytest.raises(ValueError):
        StructureConstants.from_entries(3, [[1, 2, 4, 1, 1]])
    with pytest.raises(ValueError):
        StructureConstants.from_entries(3, [[1, 2, 3, 1, 0]])
    with pytest.raises(ValueError):
        StructureConstants.from_entries(3, [[1, 2, 3, 1]])
    with pytest.raises(ValueError):
        StructureConstants.from_entries(3, [[1, 2, 3, 1.5, 1]])
    with pytest.raises(ValueError):
        StructureConstants(2, (((0, 1), (1, 0)), ((0, 0), (0, 0))))
    with pytest.raises(ValueError):
        StructureConstants.from_json('{"dim": 2}')


def test_half_entries_are_exact():
    S = StructureConstants.from_entries(2, [[1, 2, 2, 1, 2]])
    assert S.Q[1][0][1] == Fraction(1, 2) and S.Q[1][1][0] == Fraction(-1, 2)


@st.composite
def constants(draw, n=3):
    rows = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(1, n + 1):
                num = draw(st.integers(-3, 3))
                if num:
                    rows.append([i, j, k, num, draw(st.integers(1, 3))])
    return StructureConstants.from_entries(n, rows)


@given(constants())
def test_json_round_trip(S):
    assert StructureConstants.from_json(S.to_json()) == S
    assert json.loads(S.to_json())["dim"] == 3


@given(constants())
def test_killing_form_is_symmetric(S):
    k = killing_form(S)
    assert all(k[i][j] == k[j][i] for i in range(3) for j in range(3))


@given(constants(n=2))
def test_linear_poisson_master_iff_jacobi(S):
    lam, _ = ce_structures(S, check=False)
    assert (not schouten(lam, lam)) == jacobi_check(S)


# ---------------------------------------------------------------------------
# Chevalley-Eilenberg data


def test_ce_structures_so3():
    ch = ce_chart(3)
    g = ch.gens()
    lam, euler = ce_structures(SO3)
    assert lam == (g["y1"] * g["xi2"] * g["xi3"] - g["y2"] * g["xi1"] * g["xi3"]
                   + g["y3"] * g["xi1"] * g["xi2"])
    assert euler == sum((g[f"y{i}"] * g[f"xi{i}"] for i in (1, 2, 3)), ch.zero())
    assert not schouten(lam, lam)
    with pytest.raises(JacobiError):
        ce_structures(SO3.perturbed(1, 2, 1, 1))


def test_killing_form_so3():
    assert killing_form(SO3) == killing_oracle() == [[-2, 0, 0], [0, -2, 0], [0, 0, -2]]
    assert killing_form(abelian(3)) == [[0] * 3 for _ in range(3)]


def test_cartan_tensor_so3():
    C = cartan_tensor(SO3)
    for i, j, k in product(range(3), repeat=3):
        assert C.get((i, j, k), 0) == -2 * levi_civita(i, j, k)
    assert cartan_tensor(abelian(3)) == {}


def test_cartan_3cocycle_so3():
    ch = ce_chart(3)
    g = ch.gens()
    C3 = cartan_3cocycle(SO3)
    assert C3 == 2 * g["xi1"] * g["xi2"] * g["xi3"]
    assert C3.parity == 1 and xi_degree(C3) == 3
    lam, _ = ce_structures(SO3)
    assert not schouten(lam, C3)
    assert not cartan_3cocycle(abelian(3))


# ---------------------------------------------------------------------------
# higher Jacobi structures from cocycles


def test_so3_order_four_structure():
    K = build_cocycle_jacobi(SO3)
    ch = K.chart
    g = ch.gens()
    t = g["t"]
    lam, _ = ce_structures(SO3)
    assert K.order == 4
    assert K.P == t ** -1 * lam - 2 * t ** -2 * g["ts"] * g["xi1"] * g["xi2"] * g["xi3"]
    assert validate_kirillov(K.P)


def test_summand_weights():
    C3 = cartan_3cocycle(SO3)
    w = summand_weights(SO3, C3)
    # C3 E vanishes for so(3) since C3 already contains every xi
    assert w[0] == {1} and w[2] == {1} and w[1] <= {1}


def test_zero_cocycle_gives_poissonisation():
    K = build_cocycle_jacobi(SO3, ce_chart(3).zero())
    lam, _ = ce_structures(SO3)
    assert K.P == K.chart.var("t") ** -1 * lam
    assert K.order == 2


def test_one_cocycle_linear_jacobi():
    # [e1, e2] = e2 with the one-cocycle xi^1 (phi_k Q^k_ij = 0)
    S = StructureConstants.from_entries(2, [[1, 2, 2, 1, 1]])
    ch = ce_chart(2)
    g = ch.gens()
    K = build_cocycle_jacobi(S, g["xi1"])
    assert K.order == 2
    assert K.P == 2 * g["t"] ** -1 * g["y2"] * g["xi1"] * g["xi2"] - g["ts"] * g["xi1"]
    assert summand_weights(S, g["xi1"]) == [{1}, {1}, {1}]
    with pytest.raises(MasterEquationError):
        build_cocycle_jacobi(S, g["xi2"])


def test_even_cochain_rejected():
    ch = ce_chart(2)
    with pytest.raises(CocycleError):
        build_cocycle_jacobi(abelian(2), ch.var("xi1") * ch.var("xi2"))


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_abelian_one_cocycles_are_valid(phi):
    ch = ce_chart(3)
    C = sum((c * ch.var(f"xi{i + 1}") for i, c in enumerate(phi)), ch.zero())
    assert validate_kirillov(build_cocycle_jacobi(abelian(3), C).P)


def test_algebroid_abelian_vanishes():
    A = build_algebroid(abelian(3))
    assert not A.P
