"""Four-component Dirac spectra for potentials varying along one coordinate.

The spinor depends on one coordinate ``q`` (x or z) on a uniform grid, with
plane-wave momenta ``k = (k_a, k_b)`` along the two transverse axes. The
Hamiltonian is

    H = alpha_q p_q + alpha.k + V_O(q) O + V_v(q)

with ``p_q = -i d/dq`` discretised by Fourier spectral differentiation
(periodic) or central differences (box). H commutes with a local 4x4
generator G, so it is assembled and diagonalised one G-sector at a time.
Each sector block is rotated to a real symmetric matrix when possible.

Box grids use the plain central-difference first derivative. That stencil
has the usual lattice doubling: every physical level appears once more at
the edge of the Brillouin zone, so level multiplicities double.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sps
from scipy.optimize import brentq

from .algebra import ALPHA, GAMMA5, I4, SIGMA
from .catalog import (
    CONDITION_TEXT,
    CouplingCandidate,
    CouplingKind,
    MomentumConstraint,
    classify,
)
from .errors import ConstraintViolation, NumericalFailure, UsageError
from .generators import projectors

log = logging.getLogger(__name__)

PERIODIC = "periodic"
BOX = "box"
SPIN = "spin"
PSEUDOSPIN = "pseudospin"
BROKEN = "broken"

COORD_AXIS = {"x": 0, "z": 2}
TRANSVERSE_AXES = {"z": (0, 1), "x": (1, 2)}
GEOM_TOL = 1e-12
PAIR_REL_TOL = 1e-8


# --------------------------------------------------------------------------
# grid and differentiation


@dataclass(frozen=True)
class Grid1D:
    n_points: int
    length: float
    boundary: str = PERIODIC
    coordinate: str = "z"

    def __post_init__(self):
        if self.boundary not in (PERIODIC, BOX):
            raise UsageError(f"boundary must be 'periodic' or 'box', got {self.boundary!r}")
        if self.coordinate not in COORD_AXIS:
            raise UsageError(f"coordinate must be 'x' or 'z', got {self.coordinate!r}")
        if int(self.n_points) != self.n_points or self.n_points < 64:
            raise UsageError("n_points must be an integer >= 64")
        if self.n_points % 2:
            raise UsageError("n_points must be even for spectral differentiation")
        if not self.length > 0:
            raise UsageError("length must be positive")

    @property
    def spacing(self) -> float:
        if self.boundary == PERIODIC:
            return self.length / self.n_points
        return self.length / (self.n_points + 1)

    @property
    def points(self) -> np.ndarray:
        h = self.spacing
        j = np.arange(self.n_points)
        if self.boundary == PERIODIC:
            return -0.5 * self.length + h * j
        return -0.5 * self.length + h * (j + 1)

    @property
    def axis_index(self) -> int:
        return COORD_AXIS[self.coordinate]

    @property
    def axis_vector(self) -> np.ndarray:
        e = np.zeros(3)
        e[self.axis_index] = 1.0
        return e

    def transverse_vector(self, transverse_k) -> np.ndarray:
        ka, kb = (float(x) for x in transverse_k)
        k = np.zeros(3)
        a, b = TRANSVERSE_AXES[self.coordinate]
        k[a], k[b] = ka, kb
        return k

    @property
    def lattice_doubling(self) -> int:
        return 2 if self.boundary == BOX else 1


def first_derivative(grid: Grid1D) -> np.ndarray:
    """Real antisymmetric d/dq matrix (so that ``-i D`` is Hermitian)."""
    n, h = grid.n_points, grid.spacing
    if grid.boundary == PERIODIC:
        j = np.arange(1, n)
        col = np.zeros(n)
        col[1:] = (math.pi / grid.length) * (-1.0) ** j / np.tan(j * math.pi / n)
        # D[i, k] = col[(i - k) mod n]
        return sla.circulant(col)
    off = np.full(n - 1, 0.5 / h)
    return np.diag(off, 1) - np.diag(off, -1)


# central second-derivative stencils: coefficients for offsets 0..b
_FD2 = {
    2: (-2.0, 1.0),
    4: (-5.0 / 2, 4.0 / 3, -1.0 / 12),
    6: (-49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90),
    8: (-205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560),
}


def _zigzag(n: int) -> np.ndarray:
    """Ordering 0, n-1, 1, n-2, ... which turns a ring into a band."""
    order = np.empty(n, dtype=int)
    order[0::2] = np.arange((n + 1) // 2)
    order[1::2] = n - 1 - np.arange(n // 2)
    return order


def _stencil_matrix(grid: Grid1D, order: int):
    if order not in _FD2:
        raise UsageError(f"finite-difference order must be one of {sorted(_FD2)}")
    n = grid.n_points
    coef = np.array(_FD2[order]) / grid.spacing**2
    K = sps.diags([np.full(n, -coef[0])], [0], shape=(n, n), format="lil")
    for d in range(1, len(coef)):
        i = np.arange(n if grid.boundary == PERIODIC else n - d)
        j = (i + d) % n
        K[i, j] = -coef[d]
        K[j, i] = -coef[d]
    return K.tocsr(), len(coef) - 1


def _mirror(grid: Grid1D) -> np.ndarray:
    n = grid.n_points
    j = np.arange(n)
    return (n - j) % n if grid.boundary == PERIODIC else n - 1 - j


def _to_band(M: np.ndarray, bw: int) -> np.ndarray:
    n = M.shape[0]
    band = np.zeros((bw + 1, n))
    for d in range(bw + 1):
        band[d, : n - d] = np.diagonal(M, -d)
    return band


class BandedKinetic:
    """``-d²/dq²`` by a central finite-difference stencil in LAPACK band form.

    With ``mirror=True`` the operator is split into the even and odd
    subspaces of q -> -q, each banded with the stencil half-width; only
    valid for potentials with that symmetry. Otherwise periodic grids are
    reordered with :func:`_zigzag` so the wrap-around couplings fall inside
    a band of twice the stencil half-width.
    """

    def __init__(self, grid: Grid1D, order: int = 8, mirror: bool = False):
        K, half = _stencil_matrix(grid, order)
        n = grid.n_points
        self.blocks = []
        if mirror:
            R = _mirror(grid)
            j = np.arange(n)
            for sign in (1.0, -1.0):
                reps = j[j < R] if sign < 0 else j[j <= R]
                cols = []
                for col, r in enumerate(reps):
                    if R[r] == r:
                        cols.append(([r], [1.0], col))
                    else:
                        cols.append(([r, R[r]], [1 / math.sqrt(2), sign / math.sqrt(2)], col))
                rows = [i for c in cols for i in c[0]]
                vals = [v for c in cols for v in c[1]]
                cidx = [c[2] for c in cols for _ in c[0]]
                T = sps.csr_matrix((vals, (rows, cidx)), shape=(n, len(reps)))
                Kf = (T.T @ K @ T).toarray()
                self.blocks.append((_to_band(Kf, half), reps))
        elif grid.boundary == PERIODIC:
            perm = _zigzag(n)
            Kz = K[perm][:, perm].toarray()
            self.blocks.append((_to_band(Kz, 2 * half), perm))
        else:
            self.blocks.append((_to_band(K.toarray(), half), np.arange(n)))

    def lowest(self, diagonal: np.ndarray, count: int) -> np.ndarray:
        out = []
        for band, idx in self.blocks:
            ab = band.copy()
            ab[0] += diagonal[idx]
            top = min(count, ab.shape[1]) - 1
            out.append(sla.eig_banded(ab, lower=True, eigvals_only=True, select="i",
                                      select_range=(0, top), check_finite=False))
        return np.sort(np.concatenate(out))[:count]


# --------------------------------------------------------------------------
# potentials


@dataclass(frozen=True)
class Scenario:
    """Symmetry tag of a profile.

    ``constant`` is the value of V₋ (spin) or V₊ (pseudospin). A broken
    scenario records its ``base`` tag, ``strength`` and ``shape``; its
    deviation from the base condition is ``strength * shape``.
    """

    kind: str
    constant: float = 0.0
    base: str | None = None
    strength: float = 0.0
    shape: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in (SPIN, PSEUDOSPIN, BROKEN):
            raise UsageError(f"scenario kind must be spin, pseudospin or broken, got {self.kind!r}")
        if self.kind == BROKEN and self.base not in (SPIN, PSEUDOSPIN):
            raise UsageError("broken scenario needs base 'spin' or 'pseudospin'")

    @property
    def symmetric(self) -> bool:
        return self.kind in (SPIN, PSEUDOSPIN)

    @property
    def family(self) -> str:
        return self.base if self.kind == BROKEN else self.kind


@dataclass(frozen=True, eq=False)
class PotentialProfile:
    V_O: np.ndarray
    V_v: np.ndarray
    scenario: Scenario
    dV_O: np.ndarray | None = None
    dV_v: np.ndarray | None = None

    def __post_init__(self):
        for name in ("V_O", "V_v", "dV_O", "dV_v"):
            val = getattr(self, name)
            if val is not None:
                arr = np.array(val, dtype=float)
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)
        if self.V_O.shape != self.V_v.shape or self.V_O.ndim != 1:
            raise UsageError("V_O and V_v must be 1-D arrays of equal length")
        sc = self.scenario
        scale = 1e-12 * max(1.0, float(np.max(np.abs(self.V_O))), float(np.max(np.abs(self.V_v))))
        if sc.family == SPIN:
            dev = self.V_minus - sc.constant
        else:
            dev = self.V_plus - sc.constant
        target = 0.0 if sc.symmetric else sc.strength * np.asarray(sc.shape)
        if np.max(np.abs(dev - target)) > scale:
            raise UsageError(f"profile does not satisfy its {sc.kind} scenario condition")

    def __len__(self):
        return len(self.V_O)

    @property
    def V_plus(self) -> np.ndarray:
        return self.V_v + self.V_O

    @property
    def V_minus(self) -> np.ndarray:
        return self.V_v - self.V_O

    def gradients(self, grid: Grid1D) -> tuple[np.ndarray, np.ndarray]:
        """``(dV_O/dq, dV_v/dq)``: analytic samples when known, else np.gradient."""
        h = grid.spacing
        dO = self.dV_O if self.dV_O is not None else np.gradient(self.V_O, h)
        dv = self.dV_v if self.dV_v is not None else np.gradient(self.V_v, h)
        return dO, dv

    def broken(self, strength: float, shape, dshape=None) -> "PotentialProfile":
        """Copy whose base condition is violated by ``strength * shape`` (added to V_v)."""
        if not self.scenario.symmetric:
            raise UsageError("break a symmetric profile, not an already broken one")
        shape = np.asarray(shape, dtype=float)
        sc = Scenario(BROKEN, self.scenario.constant, self.scenario.kind, float(strength), shape)
        dv = None
        if self.dV_v is not None and dshape is not None:
            dv = self.dV_v + strength * np.asarray(dshape)
        return PotentialProfile(self.V_O, self.V_v + strength * shape, sc, self.dV_O, dv)


def potential_form(grid: Grid1D, form: str, params: dict | None = None, samples=None):
    """Samples ``(f, df/dq)`` of a named profile shape on the grid.

    Forms: ``quadratic`` (a q²/2), ``gauss_well`` (depth exp(-(q-c)²/(2w²))),
    ``gauss`` (same, unit depth by default), ``linear`` (slope q),
    ``constant`` (value), ``zero`` and ``table`` (explicit samples).
    """
    q = grid.points
    params = dict(params or {})
    if form == "quadratic":
        a = float(params.get("a", 1.0))
        c = float(params.get("center", 0.0))
        return 0.5 * a * (q - c) ** 2, a * (q - c)
    if form in ("gauss_well", "gauss"):
        depth = float(params.get("depth", -1.0 if form == "gauss_well" else 1.0))
        w = float(params.get("width", 1.0))
        c = float(params.get("center", 0.0))
        if w <= 0:
            raise UsageError("gaussian width must be positive")
        f = depth * np.exp(-((q - c) ** 2) / (2 * w * w))
        return f, -(q - c) / (w * w) * f
    if form == "linear":
        s = float(params.get("slope", 1.0))
        return s * q, np.full_like(q, s)
    if form == "constant":
        v = float(params.get("value", 0.0))
        return np.full_like(q, v), np.zeros_like(q)
    if form == "zero":
        return np.zeros_like(q), np.zeros_like(q)
    if form == "table":
        if samples is None:
            raise UsageError("table potential needs 'samples'")
        f = np.asarray(samples, dtype=float)
        if f.shape != q.shape:
            raise UsageError(f"table has {f.size} samples, grid has {q.size}")
        return f, None
    raise UsageError(f"unknown potential form {form!r}")


def make_profile(grid: Grid1D, f, df=None, *, scenario: str = SPIN, C: float = 0.0,
                 mass: float = 0.0, coupling: CouplingCandidate | None = None,
                 strength: float = 0.0, shape=None, dshape=None) -> PotentialProfile:
    """Build (V_O, V_v) from one shape function and a symmetry relation.

    spin: ``V_O = f + m``, ``V_v = f + C`` so V₋ = C - m is constant.
    pseudospin: ``V_O = f + m``, ``V_v = -f + C`` so V₊ = C + m is constant.
    broken: the base relation plus ``strength * shape`` added to V_v.
    A mass ``m`` is accepted for scalar coupling only.
    """
    f = np.asarray(f, dtype=float)
    if mass and (coupling is None or coupling.kind is not CouplingKind.SCALAR):
        raise UsageError("a mass term is only accepted with scalar coupling")
    base = scenario
    if scenario == BROKEN:
        raise UsageError("pass the base scenario plus strength/shape for broken profiles")
    if base == SPIN:
        V_O, V_v, const = f + mass, f + C, C - mass
        dO, dv = df, df
    elif base == PSEUDOSPIN:
        V_O, V_v, const = f + mass, -f + C, C + mass
        dO, dv = df, (None if df is None else -np.asarray(df))
    else:
        raise UsageError(f"unknown scenario {scenario!r}")
    prof = PotentialProfile(V_O, V_v, Scenario(base, const), dO, dv)
    if strength or shape is not None:
        if shape is None:
            raise UsageError("breaking strength given without a shape")
        prof = prof.broken(strength, shape, dshape)
    return prof


# --------------------------------------------------------------------------
# assembly


def check_slab_constraint(coupling: CouplingCandidate, grid: Grid1D, transverse_k, report=None):
    """Reject couplings whose momentum restriction the slab geometry violates."""
    report = report or classify(coupling)
    mc = report.momentum_constraint
    if mc is MomentumConstraint.NONE:
        return
    lam = coupling.axis_array()
    eq = grid.axis_vector
    k = grid.transverse_vector(transverse_k)
    text = CONDITION_TEXT[mc]
    if mc is MomentumConstraint.PERPENDICULAR_TO_AXIS:
        if abs(lam @ eq) > GEOM_TOL:
            raise ConstraintViolation(
                f"{coupling.label}: profile varies along {grid.coordinate}, which is not "
                f"perpendicular to the axis; requires {text}", condition=text)
        if abs(lam @ k) > GEOM_TOL:
            raise ConstraintViolation(
                f"{coupling.label}: transverse momentum {k.tolist()} has a component along "
                f"the axis; requires {text}", condition=text)
    else:
        if np.linalg.norm(np.cross(lam, eq)) > GEOM_TOL:
            raise ConstraintViolation(
                f"{coupling.label}: profile must vary along the axis; requires {text}",
                condition=text)
        if np.linalg.norm(k) > GEOM_TOL:
            raise ConstraintViolation(
                f"{coupling.label}: transverse momentum {k.tolist()} must vanish; "
                f"requires {text}", condition=text)


def _commutes(a, b, tol=1e-12) -> bool:
    return float(np.max(np.abs(a @ b - b @ a))) < tol


def conserved_generator(coupling: CouplingCandidate, grid: Grid1D, transverse_k) -> np.ndarray:
    """A local Hermitian involution commuting with every matrix in H.

    Preference: lambda.Sigma, Sigma_q, gamma5, then the normalised product of
    alpha_q, alpha.k_hat and O (three mutually anticommuting involutions).
    """
    A = ALPHA[grid.axis_index]
    k = grid.transverse_vector(transverse_k)
    parts = [A, coupling.matrix.array]
    if np.linalg.norm(k) > 0:
        parts.append(np.tensordot(k / np.linalg.norm(k), ALPHA, axes=1))
    cands = []
    if coupling.axis is not None:
        cands.append(np.tensordot(coupling.axis_array(), SIGMA, axes=1))
    cands.append(SIGMA[grid.axis_index])
    cands.append(GAMMA5)
    if len(parts) == 3:
        M = parts[0] @ parts[2] @ parts[1]
        if np.allclose(M @ M, -I4):
            M = 1j * M
        cands.append(M)
    for G in cands:
        if (np.allclose(G, G.conj().T) and np.allclose(G @ G, I4)
                and all(_commutes(G, P) for P in parts)):
            return G
    raise NumericalFailure("no local conserved generator found for this geometry")


_Y = np.array([[1, 1], [1j, -1j]]) / math.sqrt(2)


def _realifier(a, others) -> np.ndarray | None:
    """2x2 unitary W making ``-i W a W†`` and ``W o W†`` real, or None."""
    w, v = np.linalg.eigh(a)
    if not (np.isclose(w[0], -w[1]) and abs(w[1]) > 1e-12):
        return None
    vp, vm = v[:, 1], v[:, 0]
    for o in others:
        beta = vp.conj() @ o @ vm
        if abs(beta) > 1e-12:
            vm = vm * np.exp(-1j * np.angle(beta))
            break
    V = np.stack([vp, vm], axis=1)
    return _Y @ V.conj().T


@dataclass(eq=False)
class SectorBlock:
    label: int
    matrix: np.ndarray = field(repr=False)
    basis: np.ndarray = field(repr=False)  # 4x2 isometry: psi_site = basis @ c_site
    real: bool
    projector_reduced: np.ndarray = field(repr=False)  # P_+ in sector coordinates


@dataclass(eq=False)
class HamiltonianAssembly:
    grid: Grid1D
    profile: PotentialProfile
    coupling: CouplingCandidate
    transverse_k: tuple
    generator: np.ndarray
    sectors: list
    hermiticity_residual: float
    leakage: float
    derivative: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        n = 4 * self.grid.n_points
        return (n, n)

    @property
    def matrix(self) -> np.ndarray:
        """Full 4n x 4n Hermitian matrix, site-major ordering (site*4 + spinor)."""
        g, prof = self.grid, self.profile
        A = ALPHA[g.axis_index]
        B = np.tensordot(g.transverse_vector(self.transverse_k), ALPHA, axes=1)
        O = self.coupling.matrix.array
        n = g.n_points
        return (np.kron(-1j * self.derivative, A) + np.kron(np.eye(n), B)
                + np.kron(np.diag(prof.V_O), O) + np.kron(np.diag(prof.V_v), I4))


def assemble(grid: Grid1D, profile: PotentialProfile, coupling: CouplingCandidate,
             transverse_k=(0.0, 0.0)) -> HamiltonianAssembly:
    if len(profile) != grid.n_points:
        raise UsageError(f"profile has {len(profile)} samples, grid has {grid.n_points}")
    transverse_k = tuple(float(x) for x in transverse_k)
    if len(transverse_k) != 2:
        raise UsageError("transverse_k needs two components")
    report = classify(coupling)
    check_slab_constraint(coupling, grid, transverse_k, report)

    D = first_derivative(grid)
    A = ALPHA[grid.axis_index]
    B = np.tensordot(grid.transverse_vector(transverse_k), ALPHA, axes=1)
    O = coupling.matrix.array
    P_plus = projectors(coupling)[0].array
    G = conserved_generator(coupling, grid, transverse_k)
    leakage = max(float(np.max(np.abs(G @ X - X @ G))) for X in (A, B, O))

    w, U = np.linalg.eigh(G)
    n = grid.n_points
    eye = np.eye(n)
    sectors = []
    herm = 0.0
    for label in (1, -1):
        Us = U[:, np.isclose(w, label)]
        if Us.shape[1] != 2:
            raise NumericalFailure("conserved generator does not split spinor space 2+2")
        red = [Us.conj().T @ X @ Us for X in (A, B, O, P_plus)]
        W = _realifier(red[0], [red[1], red[2]])
        if W is not None:
            red_w = [W @ X @ W.conj().T for X in red]
            kin = -1j * red_w[0]
            real = all(np.max(np.abs(np.imag(X))) < 1e-14 for X in (kin, red_w[1], red_w[2]))
        else:
            real = False
        if real:
            a, b, o, p = (np.real(X) for X in (kin, red_w[1], red_w[2], red_w[3]))
            basis = Us @ W.conj().T
            H = (np.kron(D, a) + np.kron(eye, b) + np.kron(np.diag(profile.V_O), o)
                 + np.kron(np.diag(profile.V_v), np.eye(2)))
            p_red = red_w[3]
        else:
            a, b, o = red[0], red[1], red[2]
            basis = Us
            H = (np.kron(-1j * D, a) + np.kron(eye, b) + np.kron(np.diag(profile.V_O), o)
                 + np.kron(np.diag(profile.V_v), np.eye(2)))
            p_red = red[3]
        scale = float(np.max(np.abs(H)))
        herm = max(herm, float(np.max(np.abs(H - H.conj().T))) / scale)
        sectors.append(SectorBlock(label, H, basis, real, p_red))
    if herm > 1e-12:
        raise NumericalFailure(f"assembled Hamiltonian not Hermitian (residual {herm:.3g})")
    return HamiltonianAssembly(grid, profile, coupling, transverse_k, G, sectors, herm,
                               leakage, D)


# --------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class Level:
    E: float
    p_plus_weight: float
    block_label: int
    node_count: int

    @property
    def p_minus_weight(self) -> float:
        return 1.0 - self.p_plus_weight


@dataclass(frozen=True)
class Doublet:
    E_a: float
    E_b: float
    splitting: float


@dataclass
class DoubletReport:
    pairs: list
    unmatched: list
    span: float

    @property
    def max_splitting(self) -> float:
        return max((d.splitting for d in self.pairs), default=0.0)

    @property
    def mean_splitting(self) -> float:
        return float(np.mean([d.splitting for d in self.pairs])) if self.pairs else 0.0

    @property
    def balanced(self) -> bool:
        return not self.unmatched


@dataclass(eq=False)
class SpectrumResult:
    levels: list
    window: tuple
    states: list | None = field(default=None, repr=False)  # (n, 4) complex per level
    doublets: DoubletReport | None = None
    hermiticity_residual: float = 0.0

    @property
    def energies(self) -> np.ndarray:
        return np.array([lv.E for lv in self.levels])

    @property
    def span(self) -> float:
        e = self.energies
        return float(e.max() - e.min()) if e.size else 0.0


def _count_nodes(f: np.ndarray, rel: float = 1e-6) -> int:
    f = np.asarray(f)
    k = int(np.argmax(np.abs(f)))
    f = np.real(f * np.exp(-1j * np.angle(f[k])))
    keep = f[np.abs(f) > rel * np.abs(f).max()]
    return int(np.count_nonzero(np.signbit(keep[1:]) != np.signbit(keep[:-1])))


def eigensolve(assembly: HamiltonianAssembly, window, *, vectors: bool = True,
               pair: bool = True) -> SpectrumResult:
    """All eigenvalues in ``(lo, hi]``, ascending, with weights and labels.

    Node counts refer to the component that obeys the decoupled
    Schrödinger-like equation: P₊ψ for the spin family, P₋ψ for pseudospin.
    """
    lo, hi = (float(x) for x in window)
    if not hi > lo:
        raise UsageError("window must satisfy Emin < Emax")
    fam = assembly.profile.scenario.family
    entries = []
    for sec in assembly.sectors:
        try:
            if vectors:
                w, v = sla.eigh(sec.matrix, subset_by_value=(lo, hi), driver="evr",
                                check_finite=False)
            else:
                w = sla.eigh(sec.matrix, subset_by_value=(lo, hi), driver="evr",
                             eigvals_only=True, check_finite=False)
                v = None
        except (np.linalg.LinAlgError, ValueError) as exc:
            H = sec.matrix
            raise NumericalFailure(
                f"eigensolver failed in sector {sec.label}: {exc}",
                diagnostics={"dimension": H.shape[0], "max_abs": float(np.max(np.abs(H))),
                             "hermiticity_residual": assembly.hermiticity_residual,
                             "finite": bool(np.all(np.isfinite(H)))}) from exc
        # sector-local vector spanning the decoupled component
        pw, pv = np.linalg.eigh(sec.projector_reduced)
        u = pv[:, 1] if fam == SPIN else pv[:, 0]
        for idx, E in enumerate(w):
            if v is None:
                entries.append((float(E), sec.label, math.nan, -1, None))
                continue
            c = v[:, idx].reshape(-1, 2)
            psi = c @ sec.basis.T
            wp = float(np.real(np.einsum("ja,ab,jb->", c.conj(), sec.projector_reduced, c)))
            nodes = _count_nodes(c @ u.conj())
            entries.append((float(E), sec.label, wp, nodes, psi))
    entries.sort(key=lambda t: (t[0], -t[1]))
    levels = [Level(E, wp, lab, nodes) for E, lab, wp, nodes, _ in entries]
    states = [t[4] for t in entries] if vectors else None
    result = SpectrumResult(levels, (lo, hi), states,
                            hermiticity_residual=assembly.hermiticity_residual)
    if pair:
        result.doublets = pair_doublets(result)
    return result


def pair_doublets(spectrum: SpectrumResult) -> DoubletReport:
    """Greedy nearest-energy matching of block +1 levels with block -1 levels."""
    plus = [lv for lv in spectrum.levels if lv.block_label == 1]
    minus = [lv for lv in spectrum.levels if lv.block_label == -1]
    cand = sorted(((abs(a.E - b.E), i, j) for i, a in enumerate(plus)
                   for j, b in enumerate(minus)))
    used_a, used_b, pairs = set(), set(), []
    for d, i, j in cand:
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        a, b = plus[i], minus[j]
        lo_, hi_ = sorted((a.E, b.E))
        pairs.append(Doublet(lo_, hi_, d))
    pairs.sort(key=lambda p: p.E_a)
    unmatched = [lv for i, lv in enumerate(plus) if i not in used_a]
    unmatched += [lv for j, lv in enumerate(minus) if j not in used_b]
    return DoubletReport(pairs, unmatched, spectrum.span)


def cluster_levels(energies, rel_tol: float = PAIR_REL_TOL) -> list[tuple[float, int]]:
    """Group sorted energies whose neighbours agree to ``rel_tol`` (relative)."""
    e = np.sort(np.asarray(energies, dtype=float))
    out = []
    start = 0
    for i in range(1, e.size + 1):
        if i == e.size or abs(e[i] - e[i - 1]) > rel_tol * max(abs(e[i]), abs(e[i - 1]), 1e-300):
            out.append((float(np.mean(e[start:i])), i - start))
            start = i
    return out


# --------------------------------------------------------------------------
# decoupled (Schrödinger-like) oracle


def _decoupled(profile: PotentialProfile) -> tuple[np.ndarray, float]:
    sc = profile.scenario
    if not sc.symmetric:
        raise UsageError("oracle undefined off-condition")
    if sc.kind == SPIN:
        return profile.V_plus, sc.constant
    return profile.V_minus, sc.constant


def schrodinger_oracle(profile: PotentialProfile, coupling: CouplingCandidate, grid: Grid1D,
                       transverse_k, level_count: int, window, *, samples: int = 400,
                       kinetic: str = "fd8", extra_levels: int = 6,
                       xtol: float = 1e-12) -> list[float]:
    """Levels of ``p²φ = (E - C)(E - W)φ`` with no spinor structure.

    W is V₊ and C the constant V₋ (spin), or W = V₋ and C = V₊ (pseudospin).
    For trial E the matrix ``A(E) = p² + (E - C) diag(W)`` is diagonalised;
    the m-th level solves ``mu_m(E) = (E - C) E``. Roots are bracketed on a
    uniform scan of the window and refined with Brent's method.

    ``kinetic``: ``fd2``..``fd8`` (banded finite differences, independent of
    the four-spinor discretisation) or ``consistent`` (``-D @ D`` with the
    solver's own first-derivative matrix).
    """
    W, C = _decoupled(profile)
    check_slab_constraint(coupling, grid, transverse_k)
    k2 = float(np.sum(grid.transverse_vector(transverse_k) ** 2))
    lo, hi = (float(x) for x in window)
    M = int(level_count) + int(extra_levels)
    M = min(M, grid.n_points)

    if kinetic == "consistent":
        D = first_derivative(grid)
        K = -(D @ D)

        def mu(E, count):
            A = K + np.diag((E - C) * W + k2)
            return sla.eigh(A, eigvals_only=True, subset_by_index=(0, count - 1),
                            driver="evr", check_finite=False)
    elif kinetic.startswith("fd"):
        try:
            order = int(kinetic[2:])
        except ValueError:
            raise UsageError(f"unknown oracle kinetic {kinetic!r}") from None
        R = _mirror(grid)
        mirror = bool(np.max(np.abs(W - W[R])) <= 1e-12 * max(1.0, float(np.max(np.abs(W)))))
        if mirror:
            W = 0.5 * (W + W[R])
        band = BandedKinetic(grid, order, mirror)

        def mu(E, count):
            return band.lowest((E - C) * W + k2, count)
    else:
        raise UsageError(f"unknown oracle kinetic {kinetic!r}")

    Es = np.linspace(lo, hi, int(samples))
    g = np.array([mu(E, M) - (E - C) * E for E in Es])  # (samples, M)
    roots = []
    for m in range(M):
        s = np.sign(g[:, m])
        for i in np.nonzero(s[:-1] * s[1:] < 0)[0]:
            f = lambda E, m=m: mu(E, m + 1)[m] - (E - C) * E  # noqa: E731
            roots.append(brentq(f, Es[i], Es[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps))
        for i in np.nonzero(s == 0)[0]:
            roots.append(float(Es[i]))
    roots.sort()
    if len(roots) < level_count:
        raise NumericalFailure(f"no root for level {len(roots)} in window {window}")
    return roots[:level_count]


# --------------------------------------------------------------------------
# second-order residuals


@dataclass(frozen=True)
class SecondOrderResidual:
    r_plus: float
    r_minus: float
    excluded: bool = False
    crossing: float | None = None


def residual_second_order(E: float, psi: np.ndarray, profile: PotentialProfile, grid: Grid1D,
                          coupling: CouplingCandidate, transverse_k=(0.0, 0.0), *,
                          darwin: bool = True, form: str = "regular") -> SecondOrderResidual:
    """Residuals of the decoupled and the coupled second-order equations.

    For the spin family with V₋ = C:

        r_plus:  p² ψ₊ - (E - C)(E - V₊) ψ₊
        r_minus: (E - V₊) p² ψ₋ + (∇V₊ × p·Σ - i ∇V₊·p) ψ₋ - (E - C)(E - V₊)² ψ₋

    ``r_minus`` is the coupled equation multiplied through by (E - V₊), which
    is regular at classical turning points. ``form="divided"`` evaluates it
    divided by (E - V₊) instead and excludes states where E - V₊ changes
    sign on the grid. Pseudospin swaps the roles of ψ₊ and ψ₋. Both
    residuals are normalised by the norm of the component they act on.
    """
    W, C = _decoupled(profile)
    sc = profile.scenario
    P_plus, P_minus = (m.array for m in projectors(coupling))
    P_dec, P_cpl = (P_plus, P_minus) if sc.kind == SPIN else (P_minus, P_plus)
    psi = np.asarray(psi)
    D = first_derivative(grid)
    k = grid.transverse_vector(transverse_k)
    k2 = float(k @ k)
    eq = grid.axis_vector

    def p2(f):
        return -(D @ (D @ f)) + k2 * f

    dec = psi @ P_dec.T
    cpl = psi @ P_cpl.T
    r_dec = p2(dec) - ((E - C) * (E - W))[:, None] * dec
    r_plus = float(np.linalg.norm(r_dec) / np.linalg.norm(dec))

    dO, dv = profile.gradients(grid)
    dW = dv + dO if sc.kind == SPIN else dv - dO
    so_mat = np.tensordot(np.cross(eq, k), SIGMA, axes=1)  # (ê_q × k)·Σ
    pq = -1j * (D @ cpl)
    coupling_term = dW[:, None] * (cpl @ so_mat.T)
    if darwin:
        coupling_term = coupling_term - 1j * dW[:, None] * pq
    gap = E - W
    if form == "regular":
        res = gap[:, None] * p2(cpl) + coupling_term - ((E - C) * gap**2)[:, None] * cpl
    elif form == "divided":
        s = np.sign(gap)
        cross = np.nonzero(s[:-1] * s[1:] <= 0)[0]
        if cross.size:
            return SecondOrderResidual(r_plus, math.nan, True, float(grid.points[cross[0]]))
        res = p2(cpl) + coupling_term / gap[:, None] - ((E - C) * gap)[:, None] * cpl
    else:
        raise UsageError(f"unknown residual form {form!r}")
    r_minus = float(np.linalg.norm(res) / np.linalg.norm(cpl))
    return SecondOrderResidual(r_plus, r_minus)


# --------------------------------------------------------------------------
# symmetry breaking scan


@dataclass
class BreakingScan:
    strengths: list
    max_splitting: list
    slope: float | None
    spans: list

    @property
    def monotone(self) -> bool:
        s = self.max_splitting
        return all(b > a for a, b in zip(s, s[1:]))

    def rows(self):
        return list(zip(self.strengths, self.max_splitting))


def breaking_scan(base: PotentialProfile, shape, strengths, grid: Grid1D,
                  coupling: CouplingCandidate, transverse_k, window, *, dshape=None,
                  workers: int = 1) -> BreakingScan:
    """Maximum doublet splitting as a function of the breaking strength.

    Each strength is an independent diagonalisation; ``workers > 1`` runs
    them in a thread pool, results are kept in input order.
    """
    strengths = [float(s) for s in strengths]
    if 0.0 not in strengths:
        raise UsageError("breaking scan strengths must include 0")
    shape = np.asarray(shape, dtype=float)

    def run(eps):
        prof = base if eps == 0.0 else base.broken(eps, shape, dshape)
        spec = eigensolve(assemble(grid, prof, coupling, transverse_k), window, vectors=False)
        return spec.doublets.max_splitting, spec.span

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            out = list(pool.map(run, strengths))
    else:
        out = [run(e) for e in strengths]
    splits = [o[0] for o in out]
    spans = [o[1] for o in out]
    nz = sorted((e, s) for e, s in zip(strengths, splits) if e != 0.0)[:3]
    slope = None
    if len(nz) >= 2:
        x = np.array([e for e, _ in nz])
        y = np.array([s for _, s in nz])
        slope = float(np.linalg.lstsq(x[:, None], y, rcond=None)[0][0])
    return BreakingScan(strengths, splits, slope, spans)
