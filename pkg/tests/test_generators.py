import numpy as np
import pytest
from conftest import SIGMA

from diracsym.catalog import build_candidate
from diracsym.errors import ConstraintViolation, DomainError, UsageError
from diracsym.generators import (
    PotentialConstants,
    breaking_term,
    corrupted,
    generators,
    hermiticity_residual,
    momentum_hamiltonian,
    spin_vector_s,
    su2_residual,
    symmetry_commutator_residual,
    verify_generators,
)

P = np.array([0.3, -1.2, 0.7])
CONST = PotentialConstants(V_O=1.3, V_v=-0.4, C_minus=2.1, C_plus=-0.6)


def test_s_is_scale_invariant():
    for scale in (1e-3, 1.0, 1e3):
        assert np.max(np.abs(spin_vector_s(scale * P) - spin_vector_s(P))) < 1e-13


def test_s_undefined_at_zero_momentum():
    with pytest.raises(DomainError):
        spin_vector_s(np.zeros(3))


@pytest.mark.parametrize("kind", ["scalar", "pseudoscalar"])
@pytest.mark.parametrize("variant", ["minus", "plus"])
def test_full_triple(kind, variant):
    g = generators(build_candidate(kind), variant, P)
    assert g.full
    assert su2_residual(g) < 1e-13
    assert hermiticity_residual(g.S) < 1e-14
    for S in g.S:
        assert np.max(np.abs(S @ S - np.eye(4))) < 1e-13
    assert symmetry_commutator_residual(build_candidate(kind), variant, P, CONST) < 1e-13


def test_corrupted_triple_fails_closure():
    g = generators(build_candidate("scalar"), "minus", P)
    assert su2_residual(corrupted(g)) > 0.1


def test_u1_candidate_gives_axis_component_only():
    cand = build_candidate("tensor", "z")
    g = generators(cand, "minus", (0, 0, 2.0))
    assert not g.full and g.S.shape == (1, 4, 4)
    with pytest.raises(DomainError):
        su2_residual(g)
    with pytest.raises(UsageError):
        generators(cand, "minus", (0, 0, 2.0), component=(1, 0, 0))


def test_tensor_generator_reduces_to_sigma_z_along_axis():
    # for p along the axis, s_z = Sigma_z, so S_z is Sigma_z on both sectors
    g = generators(build_candidate("tensor", "z"), "minus", (0, 0, 1.5))
    assert np.max(np.abs(g.S[0] - SIGMA[2])) < 1e-14


def test_tensor_momentum_constraint():
    with pytest.raises(ConstraintViolation) as info:
        symmetry_commutator_residual(build_candidate("tensor", "z"), "minus", (0.1, 0, 1), CONST)
    assert info.value.condition == "λ×p̂ψ=0"


def test_breaking_term_spoils_commutator():
    cand = build_candidate("pseudoscalar")
    H = momentum_hamiltonian(cand, "minus", P, CONST)
    assert hermiticity_residual(H) < 1e-15
    assert symmetry_commutator_residual(cand, "minus", P, CONST, breaking_term(cand)) > 1e-2


def test_sweep_is_seeded():
    a = verify_generators("scalar", samples=10, seed=4)
    b = verify_generators("scalar", samples=10, seed=4)
    c = verify_generators("scalar", samples=10, seed=5)
    assert a["rows"] == b["rows"]
    assert a["rows"] != c["rows"]
    assert a["max_commutator_residual"] < 1e-12
    assert a["min_control_su2_residual"] > 0.1


def test_bad_variant():
    with pytest.raises(UsageError):
        generators(build_candidate("scalar"), "sideways", P)
