import itertools

import numpy as np
import pytest

from oracles import brute_force_coulomb_constants, fock_hamiltonian, fock_ops, random_table, sector_ground_energy
from qsim.errors import ContractError, DimensionError, NonHermitianError, ParseError
from qsim.fermion import (
    ANNIHILATE,
    CREATE,
    IntegralTable,
    LadderTerm,
    build_hamiltonian,
    group_hamiltonian,
    jw_lower_ladder,
    jw_lower_term,
    loads_integrals,
    lower_grouped,
    template_ladder,
    template_lower,
)
from qsim.pauli import PauliSum, anticommutator, commutator


def generic(terms, n):
    total = PauliSum.zero(n)
    for t in terms:
        total = total + jw_lower_term(t, n)
    return total


# --------------------------------------------------------------------------
# integrals files


def test_bundled_table_symmetry(h2):
    assert h2.n_spin_orbitals == 4
    assert h2.two(2, 1, 1, 2) == 0.674493
    assert h2.two(4, 1, 3, 2) == h2.two(1, 4, 2, 3) == 0.181287
    assert h2.one(1, 1) == -1.252477
    assert [h2.spin[p] for p in (1, 2, 3, 4)] == ["a", "b", "a", "b"]


def test_pair_swap_completion():
    t = loads_integrals("norb 4\nh2 1 2 2 1 0.674493\n")
    assert t.two(2, 1, 1, 2) == 0.674493
    assert t.two(1, 2, 2, 1) == 0.674493


def test_one_body_only_file():
    t = loads_integrals("norb 4\nh1 1 1 -0.5\n")
    assert t.h2 == {}
    assert t.one(1, 1) == -0.5


@pytest.mark.parametrize(
    "text, line",
    [
        ("norb 4\nh1 1 5 0.1\n", 2),
        ("norb 4\n\n# comment\nbogus 1\n", 4),
        ("h1 1 1 0.1\nnorb 4\n", 1),
        ("norb 4\nh1 1 2 0.1\nh1 2 1 0.2\n", 3),
        ("norb 2\nh2 1 2 2 1 x\n", 2),
        ("norb 2\nspin 1 c\n", 2),
        ("norb 2\nsymmetry complex\n", 2),
        ("norb 2\nh1 1 1\n", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as err:
        loads_integrals(text)
    assert err.value.line == line
    assert str(err.value).startswith(f"line {line}:")


def test_missing_norb():
    with pytest.raises(ParseError):
        loads_integrals("# nothing\n")


def test_real8_expansion():
    t = loads_integrals("norb 4\nsymmetry real8\nh2 1 4 2 3 0.3\n")
    # p~s hold electron 1 and q~r electron 2: swap within each pair or swap pairs
    orbit = {(1, 4, 2, 3), (4, 1, 3, 2), (3, 4, 2, 1), (1, 2, 4, 3),
             (3, 2, 4, 1), (2, 1, 3, 4), (4, 3, 1, 2), (2, 3, 1, 4)}
    assert set(t.h2) == orbit
    assert all(v == 0.3 for v in t.h2.values())


def test_non_hermitian_table_rejected():
    t = IntegralTable(2, h1={(1, 2): 0.3, (2, 1): 0.1})
    with pytest.raises(NonHermitianError):
        build_hamiltonian(t)


# --------------------------------------------------------------------------
# ladder lowering


def test_annihilator_first_mode():
    a1 = jw_lower_ladder((1, ANNIHILATE), 4)
    assert a1 == PauliSum(4, {"XZZZ": 0.5, "YZZZ": 0.5j})


def test_creator_last_mode():
    c4 = jw_lower_ladder((4, CREATE), 4)
    assert c4 == PauliSum(4, {"IIIX": 0.5, "IIIY": -0.5j})


def test_anticommutator_identity_small():
    a2, c2 = jw_lower_ladder((2, ANNIHILATE), 3), jw_lower_ladder((2, CREATE), 3)
    assert anticommutator(a2, c2) == PauliSum.identity(3)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_ladder_matches_fock_oracle(n):
    ann, cre = fock_ops(n)
    for j in range(1, n + 1):
        np.testing.assert_array_equal(jw_lower_ladder((j, ANNIHILATE), n).matrix(), ann[j - 1])
        np.testing.assert_array_equal(jw_lower_ladder((j, CREATE), n).matrix(), cre[j - 1])


def test_table_a2_examples():
    assert jw_lower_term(LadderTerm.normal(1, [1], [1]), 1) == PauliSum(1, {"I": 0.5, "Z": -0.5})
    coulomb = jw_lower_term(LadderTerm.normal(1, [1, 2], [2, 1]), 2)
    assert coulomb == PauliSum(2, {"II": 0.25, "ZI": -0.25, "IZ": -0.25, "ZZ": 0.25})
    assert len(jw_lower_term(LadderTerm(1, ((1, ANNIHILATE), (1, ANNIHILATE))), 3)) == 0
    h = 0.37
    assert template_lower("excitation", (3, 1), h, 3) == PauliSum(3, {"XZX": h / 2, "YZY": h / 2})


def test_out_of_range_ladder():
    with pytest.raises(DimensionError):
        jw_lower_ladder((5, CREATE), 4)


# --------------------------------------------------------------------------
# templates


def test_double_excitation_matches_generic():
    h = 0.4 - 0.25j
    t = LadderTerm.normal(h, [4, 3], [2, 1])
    assert template_lower("double_excitation", (4, 3, 2, 1), h, 4).allclose(generic([t, t.dagger()], 4), 1e-13)


def test_number_excitation_z_placement():
    h = 0.3
    inside = template_lower("number_excitation", (4, 2, 1), h, 4)
    outside = template_lower("number_excitation", (3, 4, 1), h, 4)
    for kind_idx, tmpl in (((4, 2, 1), inside), ((3, 4, 1), outside)):
        p, q, r = kind_idx
        t = LadderTerm.normal(h, [p, q], [q, r])
        assert tmpl.allclose(generic([t, t.dagger()], 4), 1e-13)
    # q inside the string cancels its Z; outside it adds one
    assert inside["XZZX"] == pytest.approx(h / 4)
    assert inside["XIZX"] == pytest.approx(-h / 4)
    assert outside["XZXZ"] == pytest.approx(-h / 4)


@pytest.mark.parametrize(
    "kind, idx",
    [("excitation", (1, 3)), ("coulomb", (2, 2)), ("number_excitation", (1, 2, 3)),
     ("number_excitation", (3, 3, 1)), ("double_excitation", (4, 2, 3, 1))],
)
def test_template_ordering_contract(kind, idx):
    with pytest.raises(ContractError):
        template_lower(kind, idx, 0.1, 4)


def test_template_ladder_meaning():
    rng = np.random.default_rng(4)
    for kind, idx in [("number", (2,)), ("excitation", (3, 1)), ("coulomb", (3, 2)),
                      ("number_excitation", (4, 1, 2)), ("double_excitation", (4, 3, 2, 1))]:
        h = complex(rng.normal(), 0 if kind in ("number", "coulomb") else rng.normal())
        assert template_lower(kind, idx, h, 4).allclose(generic(template_ladder(kind, idx, h), 4), 1e-13)


# --------------------------------------------------------------------------
# Hamiltonians


def test_singles_only_hamiltonian(h2):
    singles = IntegralTable(4, dict(h2.spin), dict(h2.h1))
    h = build_hamiltonian(singles)
    expected = PauliSum.zero(4)
    for p in range(1, 5):
        expected = expected + h2.one(p, p) * PauliSum.from_string("IIII", 0.5) \
            - h2.one(p, p) * 0.5 * PauliSum(4, {"".join("Z" if k == p else "I" for k in range(1, 5)): 1})
    assert h.allclose(expected, 1e-15)
    assert h2.one(1, 1) == -1.252477


def test_empty_table_is_constant():
    assert build_hamiltonian(IntegralTable(3, energy_shift=0.7)) == PauliSum.identity(3, 0.7)


def test_h2_against_fock_oracle(h2, h2_ham):
    np.testing.assert_allclose(h2_ham.matrix(), fock_hamiltonian(h2), atol=1e-13)
    assert h2_ham.is_hermitian(atol=0)


def test_h2_ground_energy_in_two_electron_sector(h2, h2_spectrum, golden):
    e_sector = sector_ground_energy(h2, 2)
    assert h2_spectrum.ground_energy == pytest.approx(e_sector, abs=1e-12)
    assert golden["fci_energy"] == pytest.approx(e_sector, abs=1e-12)


@pytest.mark.parametrize("seed, n", [(0, 3), (1, 4), (2, 4), (3, 5)])
def test_random_tables(seed, n):
    rng = np.random.default_rng(seed)
    t = random_table(rng, n)
    h = build_hamiltonian(t)
    assert h.is_hermitian(atol=1e-13)
    np.testing.assert_allclose(h.matrix(), fock_hamiltonian(t), atol=1e-12)
    assert lower_grouped(group_hamiltonian(t)).allclose(h, 1e-13)
    number = sum((jw_lower_term(LadderTerm.normal(1, [p], [p]), n) for p in range(1, n + 1)),
                 PauliSum.zero(n))
    assert np.abs(commutator(h, number).matrix()).max() < 1e-12


def test_h2_grouping(h2, h2_grouped, h2_ham):
    g = h2_grouped
    assert lower_grouped(g).allclose(h2_ham, 1e-13)
    assert len(g.double_excitation_terms) == 1
    quad = g.double_excitation_terms[0]
    assert quad.indices == (1, 2, 3, 4)
    assert quad.h1 == pytest.approx(-quad.h2, abs=1e-15)
    assert quad.h3 == 0
    assert g.eta[(3, 4)] == pytest.approx(0.697397 / 4, abs=1e-15)
    assert g.eta[(1, 3)] == pytest.approx((0.663472 - 0.181287) / 4, abs=1e-15)
    theta_cap, theta_p, eta = brute_force_coulomb_constants(h2)
    assert g.theta_cap == pytest.approx(theta_cap, abs=1e-12)
    for p in theta_p:
        assert g.theta_p[p] == pytest.approx(theta_p[p], abs=1e-12)
    for k in eta:
        assert g.eta[k] == pytest.approx(eta[k], abs=1e-12)


def test_h2_excitation_family_coefficients(h2_ham):
    theta = 0.181287 + 0.181287
    for letters, sign in (("XXYY", -1), ("YYXX", -1), ("XYYX", 1), ("YXXY", 1)):
        assert h2_ham[letters] == pytest.approx(sign * theta / 8, abs=1e-15)
    for letters in ("XXXX", "YYYY", "XYXY", "YXYX"):
        assert h2_ham[letters] == 0


def test_degenerate_quadruples_route_to_other_classes():
    t = IntegralTable(4, {1: "a", 2: "a", 3: "a", 4: "a"}).with_symmetry()
    t = IntegralTable(4, t.spin, {}, {(1, 2, 2, 3): 0.2, (2, 1, 3, 2): 0.2,
                                      (3, 2, 2, 1): 0.2, (2, 3, 1, 2): 0.2})
    g = group_hamiltonian(t)
    assert g.double_excitation_terms == []
    assert g.number_excitation_terms
    assert lower_grouped(g).allclose(build_hamiltonian(t), 1e-13)
