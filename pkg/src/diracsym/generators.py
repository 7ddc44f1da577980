"""Projectors, SU(2) generators and their checks in momentum representation.

For a coupling matrix O the projectors are ``P± = (I ± O)/2``. With the
momentum-dependent spin vector ``s = (alpha.p) Sigma (alpha.p) / p^2`` the
generators are

    S⁻ = Sigma P₊ + s P₋   (commutes with alpha.p + V₊ P₊ + C₋ P₋)
    S⁺ = Sigma P₋ + s P₊   (commutes with alpha.p + V₋ P₋ + C₊ P₊)

All checks here use constant potentials, where the momentum representation
is exact. Candidates with a U(1) group only get the generator component
along their axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import ALPHA, BETA, GAMMA5, SIGMA, SpinorMatrix
from .catalog import (
    CONDITION_TEXT,
    CouplingCandidate,
    Group,
    MomentumConstraint,
    build_candidate,
    classify,
)
from .errors import ConstraintViolation, DomainError, UsageError

MINUS = "minus"
PLUS = "plus"
DEFAULT_SEED = 7
CONSTRAINT_TOL = 1e-12

_LEVI = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _LEVI[_i, _j, _k] = 1.0
    _LEVI[_i, _k, _j] = -1.0


def _variant(variant: str) -> str:
    v = str(variant).lower()
    if v not in (MINUS, PLUS):
        raise UsageError(f"variant must be 'minus' or 'plus', got {variant!r}")
    return v


def projectors(candidate: CouplingCandidate) -> tuple[SpinorMatrix, SpinorMatrix]:
    """``(P₊, P₋)`` in the candidate's arithmetic mode."""
    O = candidate.matrix
    ident = SpinorMatrix.identity(O.mode)
    if not (O @ O).is_identity():
        raise UsageError("projectors need an involutive O (O^2 = I)")
    half = Fraction(1, 2) if O.exact else 0.5
    return (ident + O) * half, (ident - O) * half


def _momentum(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (3,):
        raise UsageError("momentum must be a 3-vector")
    if not np.all(np.isfinite(p)) or np.linalg.norm(p) == 0.0:
        raise DomainError("s is undefined at zero momentum")
    return p


def alpha_dot(p) -> np.ndarray:
    return np.tensordot(np.asarray(p, dtype=float), ALPHA, axes=1)


def spin_vector_s(p) -> np.ndarray:
    """Stack ``s_i = (alpha.p) Sigma_i (alpha.p) / |p|^2`` of shape (3, 4, 4)."""
    p = _momentum(p)
    ap = alpha_dot(p)
    return np.einsum("ab,ibc,cd->iad", ap, SIGMA, ap) / float(p @ p)


@dataclass(frozen=True)
class GeneratorSet:
    S: np.ndarray  # (k, 4, 4)
    variant: str
    momentum: np.ndarray
    components: tuple  # "full" axes (0, 1, 2) or a single axis vector

    @property
    def full(self) -> bool:
        return self.S.shape[0] == 3


@dataclass(frozen=True)
class _Prepared:
    report: object
    P_plus: np.ndarray
    P_minus: np.ndarray


def _prepare(candidate: CouplingCandidate) -> _Prepared:
    P_plus, P_minus = (m.array for m in projectors(candidate))
    return _Prepared(classify(candidate), P_plus, P_minus)


def generators(candidate: CouplingCandidate, variant: str, p, *,
               component=None, _prep: _Prepared | None = None) -> GeneratorSet:
    """Generators ``S⁻`` (variant minus) or ``S⁺`` (variant plus) at momentum p.

    SU(2) candidates give the full triple. U(1) candidates give only the
    component along their axis; asking for any other component raises.
    """
    variant = _variant(variant)
    p = _momentum(p)
    prep = _prep or _prepare(candidate)
    report = prep.report
    P_plus, P_minus = prep.P_plus, prep.P_minus
    P_a, P_b = (P_plus, P_minus) if variant == MINUS else (P_minus, P_plus)
    s = spin_vector_s(p)
    if report.group is Group.SU2 and component is None:
        S = SIGMA @ P_a + s @ P_b
        return GeneratorSet(S, variant, p, (0, 1, 2))
    lam = candidate.axis_array()
    if component is not None:
        comp = np.asarray(component, dtype=float)
        comp = comp / np.linalg.norm(comp)
        if report.group is Group.U1 and np.linalg.norm(np.cross(comp, lam)) > CONSTRAINT_TOL:
            raise UsageError("U(1) candidate: only the generator along its axis exists")
    else:
        comp = lam
    sig = np.tensordot(comp, SIGMA, axes=1)
    sc = np.tensordot(comp, s, axes=1)
    S = (sig @ P_a + sc @ P_b)[None]
    return GeneratorSet(S, variant, p, (tuple(comp),))


def su2_residual(g: GeneratorSet) -> float:
    """``max_ij |[S_i, S_j] - 2i eps_ijk S_k|`` over all entries."""
    if not g.full:
        raise DomainError("SU(2) residual needs the full generator triple")
    S = g.S
    comm = np.einsum("iab,jbc->ijac", S, S) - np.einsum("jab,ibc->ijac", S, S)
    rhs = 2j * np.einsum("ijk,kab->ijab", _LEVI, S)
    return float(np.max(np.abs(comm - rhs)))


@dataclass(frozen=True)
class PotentialConstants:
    V_O: float = 0.0
    V_v: float = 0.0
    C_minus: float = 0.0
    C_plus: float = 0.0

    @property
    def V_plus(self) -> float:
        return self.V_v + self.V_O

    @property
    def V_minus(self) -> float:
        return self.V_v - self.V_O


def momentum_hamiltonian(candidate: CouplingCandidate, variant: str, p,
                         constants: PotentialConstants, extra=None, *,
                         _prep: _Prepared | None = None) -> np.ndarray:
    """``alpha.p + V₊P₊ + C₋P₋`` (minus) or ``alpha.p + V₋P₋ + C₊P₊`` (plus).

    ``extra`` is an optional 4x4 term added verbatim (used for breaking
    controls).
    """
    variant = _variant(variant)
    p = np.asarray(p, dtype=float)
    prep = _prep or _prepare(candidate)
    P_plus, P_minus = prep.P_plus, prep.P_minus
    if variant == MINUS:
        H = alpha_dot(p) + constants.V_plus * P_plus + constants.C_minus * P_minus
    else:
        H = alpha_dot(p) + constants.V_minus * P_minus + constants.C_plus * P_plus
    if extra is not None:
        H = H + np.asarray(extra, dtype=complex)
    return H


def check_momentum_constraint(candidate: CouplingCandidate, p, report=None) -> None:
    report = report or classify(candidate)
    mc = report.momentum_constraint
    if mc is MomentumConstraint.NONE:
        return
    p = np.asarray(p, dtype=float)
    lam = candidate.axis_array()
    scale = max(np.linalg.norm(p), 1.0)
    if mc is MomentumConstraint.PERPENDICULAR_TO_AXIS:
        bad = abs(lam @ p) > CONSTRAINT_TOL * scale
    else:
        bad = np.linalg.norm(np.cross(lam, p)) > CONSTRAINT_TOL * scale
    if bad:
        text = CONDITION_TEXT[mc]
        raise ConstraintViolation(
            f"momentum {p.tolist()} violates {text} for {candidate.label}", condition=text)


def symmetry_commutator_residual(candidate: CouplingCandidate, variant: str, p,
                                 constants: PotentialConstants, extra=None, *,
                                 _prep: _Prepared | None = None) -> float:
    """``max_i |[S_i, H]|`` (only the axis component for U(1) candidates)."""
    prep = _prep or _prepare(candidate)
    check_momentum_constraint(candidate, p, prep.report)
    g = generators(candidate, variant, p, _prep=prep)
    H = momentum_hamiltonian(candidate, variant, p, constants, extra, _prep=prep)
    comm = g.S @ H - H @ g.S
    return float(np.max(np.abs(comm)))


def corrupted(g: GeneratorSet, shift: float = 0.1) -> GeneratorSet:
    """Copy with ``S_3 -> S_3 + shift * I``; a sensitivity control for the SU(2) check."""
    S = g.S.copy()
    S[-1] = S[-1] + shift * np.eye(4)
    return GeneratorSet(S, g.variant, g.momentum, g.components)


def breaking_term(candidate: CouplingCandidate, size: float = 0.3) -> np.ndarray:
    """An off-condition 4x4 term anticommuting with O (so it cannot be absorbed).

    ``size * beta``, or ``size * i beta gamma5`` when O is beta itself.
    """
    O = candidate.matrix.array
    term = BETA if not np.allclose(O, BETA) else 1j * (BETA @ GAMMA5)
    return size * term


def hermiticity_residual(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - np.conj(np.swapaxes(m, -1, -2)))))


def sample_momenta(n: int, seed: int = DEFAULT_SEED, low: float = 1e-3,
                   high: float = 1e3) -> np.ndarray:
    """Random momenta: isotropic directions, log-uniform magnitudes."""
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    mags = np.exp(rng.uniform(np.log(low), np.log(high), size=n))
    return dirs * mags[:, None]


def project_to_constraint(candidate: CouplingCandidate, p, report=None) -> np.ndarray:
    """Project p onto the momenta allowed by the candidate's constraint."""
    report = report or classify(candidate)
    mc = report.momentum_constraint
    p = np.asarray(p, dtype=float)
    if mc is MomentumConstraint.NONE:
        return p
    lam = candidate.axis_array()
    if mc is MomentumConstraint.PERPENDICULAR_TO_AXIS:
        return p - (lam @ p) * lam
    return (lam @ p) * lam


def verify_generators(kind, variant: str = MINUS, samples: int = 100,
                      seed: int = DEFAULT_SEED, axis=None) -> dict:
    """Sweep random momenta and constants; return residual maxima and rows.

    Constant potentials are drawn from a generator seeded from ``seed``.
    Two controls must fail: the SU(2) check on a corrupted triple
    (S_3 + 0.1 I) and the commutator with an off-condition term
    term from :func:`breaking_term` added to H.
    """
    candidate = build_candidate(kind, axis)
    prep = _prepare(candidate)
    report = prep.report
    breaking = breaking_term(candidate)
    rng = np.random.default_rng(seed + 1)
    rows = []
    for p in sample_momenta(samples, seed):
        p = project_to_constraint(candidate, p, report)
        V_O, V_v, C_m, C_p = rng.uniform(-5.0, 5.0, size=4)
        const = PotentialConstants(V_O, V_v, C_m, C_p)
        g = generators(candidate, variant, p, _prep=prep)
        su2 = su2_residual(g) if g.full else None
        comm = symmetry_commutator_residual(candidate, variant, p, const, _prep=prep)
        H = momentum_hamiltonian(candidate, variant, p, const, _prep=prep)
        herm = max(hermiticity_residual(g.S), hermiticity_residual(H))
        ctrl_su2 = su2_residual(corrupted(g)) if g.full else None
        ctrl_comm = symmetry_commutator_residual(candidate, variant, p, const, breaking,
                                                 _prep=prep)
        rows.append({"px": p[0], "py": p[1], "pz": p[2], "su2_residual": su2,
                     "commutator_residual": comm, "hermiticity_residual": herm,
                     "control_su2_residual": ctrl_su2, "control_commutator_residual": ctrl_comm})
    su2_vals = [r["su2_residual"] for r in rows if r["su2_residual"] is not None]
    return {
        "kind": candidate.kind.value,
        "axis": None if candidate.axis is None else [str(x) for x in candidate.axis],
        "variant": _variant(variant),
        "group": report.group.value,
        "samples": samples,
        "seed": seed,
        "max_su2_residual": max(su2_vals) if su2_vals else None,
        "max_commutator_residual": max(r["commutator_residual"] for r in rows),
        "max_hermiticity_residual": max(r["hermiticity_residual"] for r in rows),
        "min_control_su2_residual": (min(r["control_su2_residual"] for r in rows)
                                     if su2_vals else None),
        "min_control_commutator_residual": min(r["control_commutator_residual"] for r in rows),
        "rows": rows,
    }


def identity_suite() -> list[dict]:
    """Exact Clifford and projector identities for the scalar and pseudoscalar couplings.

    Every check is an exact comparison in Gaussian-rational arithmetic; a
    failing check carries the first offending entry as its certificate.
    """
    from .algebra import DIRAC, anticommutator, commutator

    ident = SpinorMatrix.identity()
    zero = SpinorMatrix.zeros()
    checks = []

    def record(name, lhs, rhs):
        diff = lhs - rhs
        bad = diff.first_nonzero(tol=0.0)
        checks.append({"name": name, "passed": bad is None,
                       "certificate": None if bad is None else f"entry ({bad[0]},{bad[1]}) = {bad[2]}"})

    b, al = DIRAC.beta, DIRAC.alpha
    record("beta^2 = I", b @ b, ident)
    for i in range(3):
        record(f"{{alpha_{i + 1}, beta}} = 0", anticommutator(al[i], b), zero)
        for j in range(3):
            record(f"{{alpha_{i + 1}, alpha_{j + 1}}} = 2 delta", anticommutator(al[i], al[j]),
                   ident * (2 if i == j else 0))
    for kind in ("scalar", "pseudoscalar"):
        cand = build_candidate(kind)
        O = cand.matrix
        record(f"{kind}: O^2 = I", O @ O, ident)
        record(f"{kind}: O Hermitian", O.adjoint(), O)
        for i in range(3):
            record(f"{kind}: {{alpha_{i + 1}, O}} = 0", anticommutator(al[i], O), zero)
            record(f"{kind}: [O, Sigma_{i + 1}] = 0", commutator(O, DIRAC.sigma[i]), zero)
        Pp, Pm = projectors(cand)
        record(f"{kind}: P+ P+ = P+", Pp @ Pp, Pp)
        record(f"{kind}: P- P- = P-", Pm @ Pm, Pm)
        record(f"{kind}: P+ P- = 0", Pp @ Pm, zero)
        record(f"{kind}: P- P+ = 0", Pm @ Pp, zero)
        record(f"{kind}: P+ + P- = I", Pp + Pm, ident)
    return checks
