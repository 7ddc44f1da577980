"""Lorentz-structure candidates for the symmetry matrix O and their classification.

A candidate O must square to the identity and (strongly) anticommute with
every alpha_i for a full SU(2) spin or pseudospin symmetry in three
dimensions. The space-vector ``lambda.alpha`` and tensor ``i beta lambda.alpha``
structures only meet the anticommutation requirement on spinors whose
momentum is restricted relative to the axis lambda, and only rotations about
lambda survive; :func:`classify` works these restrictions out by direct
matrix computation rather than by lookup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import (
    DIRAC,
    EXACT,
    I_UNIT,
    NUMERIC,
    NUMERIC_TOL,
    SpinorMatrix,
    anticommutator,
    commutator,
    dot_alpha,
    dot_sigma,
)
from .errors import CertificateError, UsageError


class CouplingKind(str, Enum):
    SCALAR = "scalar"
    PSEUDOSCALAR = "pseudoscalar"
    SPACE_VECTOR = "space_vector"
    TENSOR = "tensor"

    @classmethod
    def parse(cls, value) -> "CouplingKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"spacevector": "space_vector", "vector": "space_vector"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise UsageError(f"unknown coupling kind {value!r}") from None

    @property
    def needs_axis(self) -> bool:
        return self in (CouplingKind.SPACE_VECTOR, CouplingKind.TENSOR)


class MomentumConstraint(str, Enum):
    NONE = "none"
    PERPENDICULAR_TO_AXIS = "perpendicular_to_axis"  # lambda . p psi = 0
    PARALLEL_TO_AXIS = "parallel_to_axis"  # lambda x p psi = 0


class EpsilonConstraint(str, Enum):
    FREE = "free"
    PARALLEL_TO_AXIS = "parallel_to_axis"


class Group(str, Enum):
    SU2 = "SU2"
    U1 = "U1"


class Dimensionality(str, Enum):
    THREE_D = "3D"
    TWO_D = "2D_plane_perp_axis"
    ONE_D = "1D_along_axis"


CONDITION_TEXT = {
    MomentumConstraint.PERPENDICULAR_TO_AXIS: "λ·p̂ψ=0",
    MomentumConstraint.PARALLEL_TO_AXIS: "λ×p̂ψ=0",
}


_NAMED_AXES = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}


def parse_axis(axis) -> tuple:
    """Normalise an axis to a 3-tuple of Fractions (exact) or floats.

    Accepts ``"x"``, ``"y"``, ``"z"``, sequences of numbers/strings or a
    comma separated string.
    Float components are read back through their decimal repr so that
    ``0.6`` becomes exactly ``3/5``. A unit check is made exactly when the
    result is rational and to ``1e-12`` otherwise.
    """
    if isinstance(axis, str) and axis.strip().lower() in _NAMED_AXES:
        axis = _NAMED_AXES[axis.strip().lower()]
    if isinstance(axis, str):
        axis = [s for s in axis.replace(" ", "").split(",") if s]
    comps = list(axis)
    if len(comps) != 3:
        raise UsageError(f"axis needs 3 components, got {len(comps)}")
    exact = []
    for c in comps:
        try:
            if isinstance(c, float):
                if not math.isfinite(c):
                    raise ValueError
                exact.append(Fraction(repr(c)))
            else:
                exact.append(Fraction(c))
        except (ValueError, TypeError):
            raise UsageError(f"bad axis component {c!r}") from None
    norm2 = sum(x * x for x in exact)
    if norm2 == 1:
        return tuple(exact)
    floats = tuple(float(x) for x in exact)
    if abs(math.sqrt(sum(x * x for x in floats)) - 1.0) < 1e-12:
        return floats
    raise UsageError(f"axis {tuple(str(x) for x in exact)} is not a unit vector")


def _is_exact_vec(v) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in v)


@dataclass(frozen=True)
class CouplingCandidate:
    kind: CouplingKind
    axis: tuple | None
    matrix: SpinorMatrix = field(repr=False)

    @property
    def label(self) -> str:
        if self.axis is None:
            return self.kind.value
        return f"{self.kind.value}({','.join(str(x) for x in self.axis)})"

    def axis_array(self) -> np.ndarray | None:
        return None if self.axis is None else np.array([float(x) for x in self.axis])


def build_candidate(kind, axis=None) -> CouplingCandidate:
    """Matrix O for one of the four Lorentz structures.

    scalar -> beta, pseudoscalar -> i beta gamma5, space_vector -> lambda.alpha,
    tensor -> i beta lambda.alpha.
    """
    kind = CouplingKind.parse(kind)
    b = DIRAC
    if kind.needs_axis:
        if axis is None:
            raise UsageError(f"{kind.value} coupling requires an axis")
        lam = parse_axis(axis)
        mode = EXACT if _is_exact_vec(lam) else NUMERIC
        la = dot_alpha(lam, mode=mode)
        if kind is CouplingKind.SPACE_VECTOR:
            matrix = la
        else:
            beta = b.beta if mode == EXACT else b.beta.numeric()
            matrix = (beta @ la) * (I_UNIT if mode == EXACT else 1j)
        return CouplingCandidate(kind, lam, matrix)
    if axis is not None:
        raise UsageError(f"{kind.value} coupling takes no axis")
    if kind is CouplingKind.SCALAR:
        return CouplingCandidate(kind, None, b.beta)
    return CouplingCandidate(kind, None, (b.beta @ b.gamma5) * I_UNIT)


@dataclass(frozen=True)
class ConditionReport:
    squares_to_identity: bool
    strong_anticommute: bool
    momentum_constraint: MomentumConstraint
    epsilon_constraint: EpsilonConstraint
    group: Group
    dimensionality: Dimensionality
    axis: tuple | None = None
    kind: str | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "axis": None if self.axis is None else [str(x) for x in self.axis],
            "squares_to_identity": self.squares_to_identity,
            "strong_anticommute": self.strong_anticommute,
            "momentum_constraint": self.momentum_constraint.value,
            "epsilon_constraint": self.epsilon_constraint.value,
            "group": self.group.value,
            "dimensionality": self.dimensionality.value,
        }


def frame(axis) -> tuple[tuple, tuple, tuple]:
    """``(lambda, u, v)`` with u, v spanning the plane perpendicular to lambda.

    u and v are not normalised, which keeps them rational for rational
    lambda; only the spans matter for constraint detection.
    """
    lam = tuple(axis)
    k = min(range(3), key=lambda i: abs(lam[i]))
    e = [0, 0, 0]
    e[k] = 1
    u = _cross(lam, e)
    v = _cross(lam, u)
    return lam, u, v


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _vanishes(m: SpinorMatrix) -> bool:
    return m.is_zero(NUMERIC_TOL)


def _independent(mats: Sequence[SpinorMatrix]) -> bool:
    stack = np.stack([m.array.ravel() for m in mats], axis=1)
    s = np.linalg.svd(stack, compute_uv=False)
    return bool(s[-1] > 1e-9 * max(1.0, s[0]))


def _same_mode(vec, matrix: SpinorMatrix):
    if matrix.exact:
        return tuple(vec)
    return tuple(float(x) for x in vec)


def classify(candidate: CouplingCandidate) -> ConditionReport:
    """Certify which symmetry conditions the candidate meets.

    Raises :class:`CertificateError` (with the failing entry) when
    ``O^2 != I``, and when no momentum restriction along or perpendicular to
    the axis restores ``{O, alpha.p} = 0``.
    """
    O = candidate.matrix
    mode = O.mode
    sq = O @ O - SpinorMatrix.identity(mode)
    if not sq.is_zero():
        raise CertificateError("O^2 != I", certificate=("O^2 - I",) + sq.first_nonzero())

    alphas = [a if mode == EXACT else a.numeric() for a in DIRAC.alpha]
    strong = all(anticommutator(a, O).is_zero() for a in alphas)

    if candidate.axis is not None:
        basis = frame(_same_mode(candidate.axis, O))
    else:
        basis = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    vec_mode = EXACT if O.exact else NUMERIC

    if strong:
        mom = MomentumConstraint.NONE
    else:
        images = [anticommutator(O, dot_alpha(p, mode=vec_mode)) for p in basis]
        zero = [_vanishes(m) for m in images]
        if candidate.axis is None:
            raise CertificateError(
                "{alpha_i, O} != 0 and no axis to restrict momenta",
                certificate=("{alpha,O}",) + images[zero.index(False)].first_nonzero())
        if zero[0] and not any(zero[1:]) and _independent(images[1:]):
            mom = MomentumConstraint.PARALLEL_TO_AXIS
        elif not zero[0] and zero[1] and zero[2]:
            mom = MomentumConstraint.PERPENDICULAR_TO_AXIS
        else:
            bad = images[zero.index(False)]
            raise CertificateError("no axial momentum restriction restores {O, alpha.p} = 0",
                                   certificate=("{O,alpha.p}",) + bad.first_nonzero())

    eps_images = [commutator(O, dot_sigma(e, mode=vec_mode)) for e in basis]
    eps_zero = [_vanishes(m) for m in eps_images]
    if all(eps_zero):
        eps = EpsilonConstraint.FREE
    elif eps_zero[0] and candidate.axis is not None and _independent(eps_images[1:]):
        eps = EpsilonConstraint.PARALLEL_TO_AXIS
    else:
        bad = eps_images[eps_zero.index(False)]
        raise CertificateError("[O, eps.Sigma] vanishes for no admissible eps",
                               certificate=("[O,eps.Sigma]",) + bad.first_nonzero())

    group = Group.SU2 if eps is EpsilonConstraint.FREE else Group.U1
    dim = {
        MomentumConstraint.NONE: Dimensionality.THREE_D,
        MomentumConstraint.PERPENDICULAR_TO_AXIS: Dimensionality.TWO_D,
        MomentumConstraint.PARALLEL_TO_AXIS: Dimensionality.ONE_D,
    }[mom]
    return ConditionReport(
        squares_to_identity=True,
        strong_anticommute=strong,
        momentum_constraint=mom,
        epsilon_constraint=eps,
        group=group,
        dimensionality=dim,
        axis=candidate.axis,
        kind=candidate.kind.value,
    )


def epsilon_constraint_check(candidate: CouplingCandidate, eps: Sequence) -> SpinorMatrix:
    """Residual ``[O, eps.Sigma]``; zero iff the rotation about eps is a symmetry."""
    O = candidate.matrix
    if O.exact and _is_exact_vec([Fraction(x) if isinstance(x, int) else x for x in eps]):
        es = dot_sigma(tuple(eps), mode=EXACT)
    else:
        es = dot_sigma(tuple(float(x) for x in eps), mode=NUMERIC)
        O = O.numeric()
    return commutator(O, es)


def check_user_matrix(matrix) -> dict:
    """Report which conditions an arbitrary 4x4 matrix fails.

    Returns a dict of condition name -> ``None`` (holds) or a certificate
    ``(i, j, value)`` of the first offending entry. No classification is
    attempted beyond the raw conditions.
    """
    if not isinstance(matrix, SpinorMatrix):
        arr = np.asarray(matrix, dtype=complex)
        matrix = SpinorMatrix(arr, NUMERIC)
    O = matrix
    mode = O.mode
    out = {}
    ident = SpinorMatrix.identity(mode)
    out["hermitian"] = (O - O.adjoint()).first_nonzero()
    out["squares_to_identity"] = (O @ O - ident).first_nonzero()
    for i, a in enumerate(DIRAC.alpha):
        a = a if mode == EXACT else a.numeric()
        out[f"anticommutes_alpha{i + 1}"] = anticommutator(a, O).first_nonzero()
    for i, s in enumerate(DIRAC.sigma):
        s = s if mode == EXACT else s.numeric()
        out[f"commutes_Sigma{i + 1}"] = commutator(O, s).first_nonzero()
    return out


CATALOG_AXIS_DEFAULT = (0, 0, 1)


def catalog(axis=CATALOG_AXIS_DEFAULT) -> list[CouplingCandidate]:
    """The four catalog structures (axis-carrying ones along ``axis``)."""
    return [
        build_candidate(CouplingKind.SCALAR),
        build_candidate(CouplingKind.PSEUDOSCALAR),
        build_candidate(CouplingKind.SPACE_VECTOR, axis),
        build_candidate(CouplingKind.TENSOR, axis),
    ]
