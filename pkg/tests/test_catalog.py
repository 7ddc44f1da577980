from fractions import Fraction

import numpy as np
import pytest
from conftest import ALPHA, SIGMA

from diracsym.catalog import (
    CONDITION_TEXT,
    EpsilonConstraint,
    Group,
    MomentumConstraint,
    build_candidate,
    catalog,
    check_user_matrix,
    classify,
    epsilon_constraint_check,
    parse_axis,
)
from diracsym.errors import CertificateError, UsageError
from diracsym.generators import projectors


@pytest.mark.parametrize("kind,axis,group,mom", [
    ("scalar", None, Group.SU2, MomentumConstraint.NONE),
    ("pseudoscalar", None, Group.SU2, MomentumConstraint.NONE),
    ("space_vector", "x", Group.U1, MomentumConstraint.PERPENDICULAR_TO_AXIS),
    ("tensor", "y", Group.U1, MomentumConstraint.PARALLEL_TO_AXIS),
    ("tensor", (0.0, 0.6, 0.8), Group.U1, MomentumConstraint.PARALLEL_TO_AXIS),
])
def test_classification(kind, axis, group, mom):
    rep = classify(build_candidate(kind, axis))
    assert rep.group is group
    assert rep.momentum_constraint is mom
    assert rep.squares_to_identity


def test_catalog_has_four_structures():
    kinds = [c.kind.value for c in catalog()]
    assert kinds == ["scalar", "pseudoscalar", "space_vector", "tensor"]


def test_condition_text():
    assert CONDITION_TEXT[MomentumConstraint.PARALLEL_TO_AXIS] == "λ×p̂ψ=0"
    assert CONDITION_TEXT[MomentumConstraint.PERPENDICULAR_TO_AXIS] == "λ·p̂ψ=0"


def test_parse_axis():
    assert parse_axis("z") == (0, 0, 1)
    assert parse_axis([0.6, 0.8, 0]) == (Fraction(3, 5), Fraction(4, 5), 0)
    assert parse_axis("0.6,0.8,0") == parse_axis([0.6, 0.8, 0])
    s = 2 ** -0.5
    assert parse_axis((s, s, 0.0)) == pytest.approx((s, s, 0.0))
    for bad in ("q", (1, 1, 0), (1, 0), ("a", 0, 0), (float("nan"), 0, 1)):
        with pytest.raises(UsageError):
            parse_axis(bad)


def test_axis_rules():
    with pytest.raises(UsageError):
        build_candidate("tensor")
    with pytest.raises(UsageError):
        build_candidate("scalar", "z")
    with pytest.raises(UsageError):
        build_candidate("vectorish")


def test_certificate_for_non_involution():
    cand = build_candidate("scalar")
    bad = type(cand)(cand.kind, None, cand.matrix * 2)
    with pytest.raises(CertificateError) as info:
        classify(bad)
    assert info.value.certificate[:3] == ("O^2 - I", 0, 0)


def test_user_matrix_report():
    rep = check_user_matrix(np.eye(4))
    assert rep["hermitian"] is None and rep["squares_to_identity"] is None
    assert rep["anticommutes_alpha1"] is not None
    assert rep["commutes_Sigma3"] is None
    rep = check_user_matrix(ALPHA[2])
    assert rep["anticommutes_alpha3"] is not None
    assert rep["anticommutes_alpha1"] is None


def test_space_vector_projector_relation():
    # P± = (I ± lambda.alpha)/2 for the space-vector coupling
    for axis in ("x", (0.0, 0.6, 0.8)):
        cand = build_candidate("space_vector", axis)
        la = np.tensordot(cand.axis_array(), ALPHA, axes=1)
        Pp, Pm = (m.array for m in projectors(cand))
        assert np.max(np.abs(Pp - (np.eye(4) + la) / 2)) < 1e-15
        assert np.max(np.abs(Pm - (np.eye(4) - la) / 2)) < 1e-15


def test_epsilon_constraint_scaling():
    cand = build_candidate("tensor", "z")
    assert classify(cand).epsilon_constraint is EpsilonConstraint.PARALLEL_TO_AXIS
    for scale in (1, 3, 0.25):
        assert epsilon_constraint_check(cand, (0, 0, scale)).is_zero()
        r1 = epsilon_constraint_check(cand, (1, 0, 0)).array
        rs = epsilon_constraint_check(cand, (scale, 0, 0)).array
        assert np.max(np.abs(rs - scale * r1)) < 1e-14
    assert not epsilon_constraint_check(cand, (1, 0, 0)).is_zero()


def test_scalar_commutes_with_spin():
    O = build_candidate("scalar").matrix.array
    for s in SIGMA:
        assert np.max(np.abs(O @ s - s @ O)) == 0
