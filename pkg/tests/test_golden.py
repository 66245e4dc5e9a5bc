import pytest

from oracles import brute_force_coulomb_constants, sector_ground_energy
from qsim.golden import SCHEMA_VERSION, compute_golden


def test_fixture_matches_oracle_path(golden):
    fresh = compute_golden()
    assert golden["schema_version"] == SCHEMA_VERSION
    assert set(golden) == set(fresh)
    for key in ("fci_energy", "first_excited_energy", "hf_overlap", "theta_cap", "min_gap", "min_gap_s"):
        assert golden[key] == pytest.approx(fresh[key], abs=1e-12)
    assert golden["spectrum"] == pytest.approx(fresh["spectrum"], abs=1e-12)
    assert golden["theta_p"] == pytest.approx(fresh["theta_p"], abs=1e-12)
    assert golden["eta"] == pytest.approx(fresh["eta"], abs=1e-12)


def test_fixture_against_independent_oracles(golden, h2):
    assert golden["fci_energy"] == pytest.approx(sector_ground_energy(h2, 2), abs=1e-12)
    theta_cap, theta_p, eta = brute_force_coulomb_constants(h2)
    assert golden["theta_cap"] == pytest.approx(theta_cap, abs=1e-12)
    assert golden["theta_p"] == pytest.approx({str(p): v for p, v in theta_p.items()}, abs=1e-12)
    assert golden["eta"] == pytest.approx({f"{p}{q}": v for (p, q), v in eta.items()}, abs=1e-12)
    assert 0.9 < golden["hf_overlap"] < 1
