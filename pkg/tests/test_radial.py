import math

import numpy as np
import pytest
from scipy.integrate import simpson

from diracsym import radial
from diracsym.errors import UsageError

GRID = radial.RadialGrid(8.0, 4000)


@pytest.fixture(scope="module")
def spin_pots():
    return radial.RadialPotentials(1.0, radial.quadratic(1.0), radial.constant(0.0), "spin")


@pytest.fixture(scope="module")
def s_states(spin_pots):
    return radial.solve_channel(spin_pots, -1, (1.0, 5.0), GRID)


@pytest.mark.parametrize("kappa,l,lt,j2,label", [
    (-1, 0, 1, 1, "s1/2"), (1, 1, 0, 1, "p1/2"), (-2, 1, 2, 3, "p3/2"),
    (2, 2, 1, 3, "d3/2"), (-3, 2, 3, 5, "d5/2"),
])
def test_kappa_channels(kappa, l, lt, j2, label):
    ch = radial.KappaChannel(kappa)
    assert (ch.l, ch.l_tilde, ch.j2, ch.label) == (l, lt, j2, label)
    if ch.spin_partner is not None:
        assert ch.spin_partner.l == l
    if ch.pseudospin_partner is not None:
        assert ch.pseudospin_partner.l_tilde == lt


def test_partnerless_channels():
    assert radial.KappaChannel(-1).spin_partner is None
    assert radial.KappaChannel(1).pseudospin_partner is None
    with pytest.raises(UsageError):
        radial.KappaChannel(0)


def test_woods_saxon_shape():
    f = radial.woods_saxon(-50.0, 4.0, 0.5)
    assert f(np.array([4.0]))[0] == pytest.approx(-25.0)
    assert f(np.array([0.0]))[0] == pytest.approx(-50.0 / (1 + math.exp(-8)))
    assert f(np.array([1e4]))[0] == 0.0
    with pytest.raises(UsageError):
        radial.woods_saxon(-50.0, 4.0, 0.0)


def test_free_particle_has_no_bound_states():
    free = radial.RadialPotentials(1.0, radial.constant(0.0), radial.constant(0.0), "spin")
    assert radial.solve_channel(free, -1, (-0.99, 0.99), radial.RadialGrid(20.0, 2000)) == []


def test_oscillator_levels_and_nodes(s_states):
    assert [s.n for s in s_states] == [0, 1]
    for s in s_states:
        assert s.nodes_G == s.n
        want = radial.oscillator_oracle(1.0, 1.0, s.n, -1, "spin")
        assert s.E == pytest.approx(want, rel=1e-9)


def test_states_are_normalised(s_states):
    for s in s_states:
        norm = simpson(s.G**2 + s.F**2, x=s.r)
        assert norm == pytest.approx(1.0, abs=1e-8)


def test_first_order_residual(s_states, spin_pots):
    assert radial.first_order_residual(s_states[0], spin_pots, GRID) < 1e-7


def test_grid_refinement(s_states, spin_pots):
    finer = radial.solve_channel(spin_pots, -1, (1.0, 5.0), GRID.refined())
    for a, b in zip(s_states, finer):
        assert abs(a.E - b.E) < 1e-9


def test_staggered_grid_cross_check(s_states, spin_pots):
    ev = radial.grid_spectrum(spin_pots, -1, 8.0, 4000, (1.0, 5.0))
    assert np.allclose(ev[: len(s_states)], [s.E for s in s_states], rtol=1e-3)


def test_massless_oscillator_closed_form():
    pots = radial.RadialPotentials(0.0, radial.quadratic(1.0), radial.constant(0.0), "spin")
    ground = radial.solve_channel(pots, -1, (1.0, 3.0), GRID)[0]
    # E² = 3 √E for n = 0, l = 0
    assert ground.E == pytest.approx(3 ** (2 / 3), rel=1e-9)


def test_symmetry_violation_rejected():
    pots = radial.RadialPotentials(1.0, radial.quadratic(1.0), radial.quadratic(0.1), "spin")
    with pytest.raises(UsageError, match="constant Delta"):
        radial.solve_channel(pots, -1, (1.0, 5.0), GRID)


def test_doublet_report_pairs_partners(spin_pots):
    states = {k: radial.solve_channel(spin_pots, k, (1.0, 5.0), GRID) for k in (-1, 1, -2)}
    pairs, missing = radial.doublet_report(states, "spin")
    assert {(p.kappa_a, p.kappa_b) for p in pairs} == {(-2, 1)}
    assert all(p.relative < 1e-9 for p in pairs)
    assert not missing
