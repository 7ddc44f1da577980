import numpy as np
import pytest

from diracsym import slab
from diracsym.catalog import build_candidate
from diracsym.errors import ConstraintViolation, UsageError

TENSOR = build_candidate("tensor", "z")


def quadratic_tensor(n=256, L=20.0, boundary="periodic"):
    g = slab.Grid1D(n, L, boundary)
    f, df = slab.potential_form(g, "quadratic", {"a": 1.0})
    return g, slab.make_profile(g, f, df, coupling=TENSOR)


def test_free_massive_scalar_dispersion():
    g = slab.Grid1D(128, 20.0)
    f, df = slab.potential_form(g, "zero")
    sc = build_candidate("scalar")
    prof = slab.make_profile(g, f, df, mass=1.0, coupling=sc)
    spec = slab.eigensolve(slab.assemble(g, prof, sc, (0.5, 0.0)), (-2.0, 2.0))
    p = 2 * np.pi * np.arange(-10, 11) / g.length
    want = np.unique(np.round(np.sqrt(p**2 + 1.25), 12))
    want = want[want <= 2.0]
    got = [E for E, _ in slab.cluster_levels(spec.energies, 1e-10) if E > 0]
    assert np.allclose(got, want, rtol=0, atol=1e-12)
    # E -> -E symmetry of the free spectrum
    e = spec.energies
    assert np.max(np.abs(np.sort(e) + np.sort(e)[::-1])) < 1e-10


def test_tensor_rejects_transverse_momentum():
    g, prof = quadratic_tensor(n=64)
    with pytest.raises(ConstraintViolation) as info:
        slab.assemble(g, prof, TENSOR, (0.1, 0.0))
    assert info.value.condition == "λ×p̂ψ=0"


def test_tensor_axis_must_follow_profile():
    g = slab.Grid1D(64, 10.0, coordinate="x")
    f, df = slab.potential_form(g, "zero")
    prof = slab.make_profile(g, f, df, coupling=TENSOR)
    with pytest.raises(ConstraintViolation):
        slab.assemble(g, prof, TENSOR)


def test_free_pseudoscalar_and_tensor_fourfold():
    for cand in (build_candidate("pseudoscalar"), TENSOR):
        g = slab.Grid1D(64, 10.0)
        f, df = slab.potential_form(g, "zero")
        prof = slab.make_profile(g, f, df, coupling=cand)
        spec = slab.eigensolve(slab.assemble(g, prof, cand), (0.01, 2.0), vectors=False)
        counts = {c for _, c in slab.cluster_levels(spec.energies, 1e-10)}
        assert counts == {4}


def test_box_grid_converges():
    errs = []
    for n in (256, 512, 1024):
        g, prof = quadratic_tensor(n, boundary="box")
        spec = slab.eigensolve(slab.assemble(g, prof, TENSOR), (0.01, 1.5), vectors=False)
        # decoupled equation p² φ = E (E - q²/2) gives E^(3/2) = 1 for the ground level
        errs.append(abs(spec.energies[0] - 1.0))
    assert errs[0] > errs[1] > errs[2]
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.05)


def test_grid_validation():
    for n in (65, 32):
        with pytest.raises(UsageError):
            slab.Grid1D(n, 10.0)
    with pytest.raises(UsageError):
        slab.Grid1D(64, 10.0, boundary="open")


def test_mass_only_with_scalar():
    g = slab.Grid1D(64, 10.0)
    f, df = slab.potential_form(g, "zero")
    with pytest.raises(UsageError):
        slab.make_profile(g, f, df, mass=1.0, coupling=TENSOR)


def test_profile_condition_checked():
    g, prof = quadratic_tensor(n=64)
    with pytest.raises(UsageError):
        slab.PotentialProfile(prof.V_O, prof.V_v + 0.1, prof.scenario)


def test_oracle_refuses_broken_profile():
    g, prof = quadratic_tensor(n=64)
    shape, _ = slab.potential_form(g, "gauss")
    with pytest.raises(UsageError, match="oracle undefined off-condition"):
        slab.schrodinger_oracle(prof.broken(0.01, shape), TENSOR, g, (0, 0), 2, (0.01, 3))


def test_unbalanced_pairing_flagged():
    levels = [slab.Level(1.0, 1.0, 1, 0), slab.Level(1.0, 1.0, -1, 0), slab.Level(2.0, 1.0, 1, 1)]
    res = slab.SpectrumResult(levels, (0, 3))
    rep = slab.pair_doublets(res)
    assert len(rep.pairs) == 1 and not rep.balanced
    assert rep.unmatched[0].E == 2.0


def test_levels_weights_and_nodes():
    g, prof = quadratic_tensor()
    asm = slab.assemble(g, prof, TENSOR)
    spec = slab.eigensolve(asm, (0.01, 2.5))
    for lv, psi in zip(spec.levels, spec.states):
        assert 0.0 <= lv.p_plus_weight <= 1.0 + 1e-12
        assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)
    nodes = sorted({(round(lv.E, 6), lv.node_count) for lv in spec.levels})
    assert [nd for _, nd in nodes] == list(range(len(nodes)))
    assert spec.doublets.balanced
    assert spec.doublets.max_splitting < 1e-10 * spec.span


def test_realified_blocks_match_full_matrix():
    g, prof = quadratic_tensor(n=64, L=12.0)
    asm = slab.assemble(g, prof, TENSOR)
    assert all(sec.real for sec in asm.sectors)
    full = np.linalg.eigvalsh(asm.matrix)
    blocks = np.sort(np.concatenate([np.linalg.eigvalsh(s.matrix) for s in asm.sectors]))
    assert np.max(np.abs(full - blocks)) < 1e-10
    assert asm.leakage < 1e-14


def test_pseudospin_slab_matches_oracle():
    cand = build_candidate("pseudoscalar")
    g = slab.Grid1D(256, 20.0)
    f, df = slab.potential_form(g, "quadratic", {"a": 1.0})
    prof = slab.make_profile(g, f, df, scenario="pseudospin", coupling=cand)
    spec = slab.eigensolve(slab.assemble(g, prof, cand), (-4.0, -0.01))
    clusters = slab.cluster_levels(spec.energies, 1e-8)
    oracle = slab.schrodinger_oracle(prof, cand, g, (0, 0), len(clusters), (-4.0, -0.01))
    assert np.allclose([E for E, _ in clusters], oracle, rtol=1e-6, atol=0)
    assert {c for _, c in clusters} == {2}


def test_divided_residual_excludes_turning_points():
    g, prof = quadratic_tensor()
    spec = slab.eigensolve(slab.assemble(g, prof, TENSOR), (0.01, 1.5))
    r = slab.residual_second_order(spec.levels[0].E, spec.states[0], prof, g, TENSOR,
                                   form="divided")
    assert r.excluded and np.isnan(r.r_minus)
    assert r.crossing is not None


def test_free_plane_wave_residual():
    g = slab.Grid1D(64, 10.0)
    f, df = slab.potential_form(g, "zero")
    prof = slab.make_profile(g, f, df, coupling=TENSOR)
    spec = slab.eigensolve(slab.assemble(g, prof, TENSOR), (0.01, 2.0))
    checked = 0
    for lv, psi in zip(spec.levels, spec.states):
        if lv.p_plus_weight < 1e-8:
            continue
        assert slab.residual_second_order(lv.E, psi, prof, g, TENSOR).r_plus < 1e-10
        checked += 1
    assert checked


def test_breaking_scan_requires_zero():
    g, prof = quadratic_tensor(n=64)
    shape, _ = slab.potential_form(g, "gauss")
    with pytest.raises(UsageError):
        slab.breaking_scan(prof, shape, [0.01, 0.02], g, TENSOR, (0, 0), (0.01, 2))
