"""Bound states of the radial Dirac equation with scalar and vector potentials.

With Σ = V + S and Δ = V − S the upper and lower radial amplitudes obey

    G' + (κ/r) G = (E + m − Δ) F
    F' − (κ/r) F = −(E − m − Σ) G

Spin symmetry is Δ = const (partners κ and −κ−1 share l); pseudospin
symmetry is Σ = const (partners κ and 1−κ share l̃). The pair is
integrated in t = ln r with classical RK4, outward from a small r_min and
inward from r_max, and matched at the outermost classical turning point.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numba import njit
from scipy.linalg import eigvalsh_tridiagonal
from scipy.optimize import brentq

from .errors import NumericalFailure, UsageError

SPIN = "spin"
PSEUDOSPIN = "pseudospin"
NONE = "none"
SYMMETRIES = (SPIN, PSEUDOSPIN, NONE)

_RESCALE = 1e150
DECAY_TOL = 1e-8

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class KappaChannel:
    kappa: int

    def __post_init__(self):
        if int(self.kappa) != self.kappa or self.kappa == 0:
            raise UsageError(f"kappa must be a nonzero integer, got {self.kappa!r}")
        object.__setattr__(self, "kappa", int(self.kappa))

    @property
    def l(self) -> int:
        k = self.kappa
        return k if k > 0 else -k - 1

    @property
    def l_tilde(self) -> int:
        k = self.kappa
        return k - 1 if k > 0 else -k

    @property
    def j2(self) -> int:
        """2j."""
        return 2 * abs(self.kappa) - 1

    @property
    def spin_partner(self) -> "KappaChannel | None":
        """Channel with the same l, or None for s1/2 (κ = -1)."""
        k = -self.kappa - 1
        return KappaChannel(k) if k else None

    @property
    def pseudospin_partner(self) -> "KappaChannel | None":
        """Channel with the same l̃, or None for p1/2 (κ = 1)."""
        k = 1 - self.kappa
        return KappaChannel(k) if k else None

    def partner(self, mode: str) -> "KappaChannel":
        if mode == SPIN:
            return self.spin_partner
        if mode == PSEUDOSPIN:
            return self.pseudospin_partner
        raise UsageError(f"partner mode must be spin or pseudospin, got {mode!r}")

    @property
    def label(self) -> str:
        return f"{'spdfghik'[self.l] if self.l < 8 else 'l=' + str(self.l)}{self.j2}/2"


# --------------------------------------------------------------------------
# potentials


def woods_saxon(depth: float, radius: float, diffuseness: float) -> Callable:
    """``f(r) = depth / (1 + exp((r - radius) / diffuseness))`` as a vectorised callable."""
    if not radius > 0 or not diffuseness > 0:
        raise UsageError("Woods-Saxon radius and diffuseness must be positive")
    depth, radius, diffuseness = float(depth), float(radius), float(diffuseness)

    def f(r):
        r = np.asarray(r, dtype=float)
        # exp overflow far outside is harmless: f -> 0
        with np.errstate(over="ignore"):
            return depth / (1.0 + np.exp((r - radius) / diffuseness))

    f.params = {"form": "woods_saxon", "depth": depth, "radius": radius,
                "diffuseness": diffuseness}
    return f


def quadratic(a: float) -> Callable:
    a = float(a)

    def f(r):
        return a * np.asarray(r, dtype=float) ** 2

    f.params = {"form": "quadratic", "a": a}
    return f


def constant(value: float) -> Callable:
    value = float(value)

    def f(r):
        return np.full_like(np.asarray(r, dtype=float), value)

    f.params = {"form": "constant", "value": value}
    return f


def tabulated(r_samples, values) -> Callable:
    """Linear interpolation of a sampled profile (held constant outside)."""
    rs = np.asarray(r_samples, dtype=float)
    vs = np.asarray(values, dtype=float)
    if rs.ndim != 1 or rs.shape != vs.shape or rs.size < 2 or np.any(np.diff(rs) <= 0):
        raise UsageError("table needs matching, strictly increasing r samples")

    def f(r):
        return np.interp(np.asarray(r, dtype=float), rs, vs)

    f.params = {"form": "table"}
    return f


@dataclass(frozen=True)
class RadialPotentials:
    """Mass and the two combinations Σ = V + S, Δ = V − S as functions of r."""

    m: float
    sigma: Callable
    delta: Callable
    symmetry: str = NONE

    def __post_init__(self):
        if self.symmetry not in SYMMETRIES:
            raise UsageError(f"symmetry must be one of {SYMMETRIES}, got {self.symmetry!r}")

    @classmethod
    def from_scalar_vector(cls, m, S, V, symmetry=NONE):
        return cls(m, lambda r: V(r) + S(r), lambda r: V(r) - S(r), symmetry)

    def check_symmetry(self, r: np.ndarray, tol: float = 1e-12) -> None:
        """Raise unless the declared symmetry holds pointwise on ``r``."""
        if self.symmetry == NONE:
            return
        vals = self.delta(r) if self.symmetry == SPIN else self.sigma(r)
        vals = np.asarray(vals, dtype=float)
        if np.ptp(vals) > tol * max(1.0, float(np.max(np.abs(vals)))):
            which = "Delta" if self.symmetry == SPIN else "Sigma"
            raise UsageError(f"{self.symmetry} symmetry requires constant {which}")


# --------------------------------------------------------------------------
# integration


@dataclass(frozen=True)
class RadialGrid:
    r_max: float
    n_points: int = 20000
    r_min: float = 1e-6

    def __post_init__(self):
        if not self.r_max > self.r_min > 0:
            raise UsageError("radial grid needs 0 < r_min < r_max")
        if int(self.n_points) != self.n_points or self.n_points < 100:
            raise UsageError("radial n_points must be an integer >= 100")

    @property
    def t(self) -> np.ndarray:
        return np.linspace(math.log(self.r_min), math.log(self.r_max), self.n_points)

    @property
    def r(self) -> np.ndarray:
        return np.exp(self.t)

    @property
    def dt(self) -> float:
        return (math.log(self.r_max) - math.log(self.r_min)) / (self.n_points - 1)

    @property
    def r_fine(self) -> np.ndarray:
        """Grid plus midpoints, where RK4 evaluates the potentials."""
        t = np.linspace(math.log(self.r_min), math.log(self.r_max), 2 * self.n_points - 1)
        return np.exp(t)

    def refined(self) -> "RadialGrid":
        return RadialGrid(self.r_max, 2 * self.n_points - 1, self.r_min)


@njit(cache=True)
def _rhs(kappa, E, m, r, sig, dlt, G, F):
    dG = -kappa * G + r * (E + m - dlt) * F
    dF = kappa * F - r * (E - m - sig) * G
    return dG, dF


@njit(cache=True)
def _integrate(kappa, E, m, r_f, sig_f, dlt_f, dt, G0, F0, start, stop):
    """RK4 in t between coarse indices ``start`` and ``stop`` (either direction).

    Fine arrays hold samples at t_0 + k dt/2; coarse index i is fine 2i.
    Returns coarse-grid G, F (zero outside the integrated range) and the
    accumulated log scale of each sample.
    """
    n = (r_f.size + 1) // 2
    G = np.zeros(n)
    F = np.zeros(n)
    logscale = np.zeros(n)
    step = 1 if stop > start else -1
    h = dt * step
    g, f = G0, F0
    acc = 0.0
    G[start] = g
    F[start] = f
    i = start
    while i != stop:
        a = 2 * i
        b = a + step
        c = a + 2 * step
        k1g, k1f = _rhs(kappa, E, m, r_f[a], sig_f[a], dlt_f[a], g, f)
        k2g, k2f = _rhs(kappa, E, m, r_f[b], sig_f[b], dlt_f[b], g + 0.5 * h * k1g, f + 0.5 * h * k1f)
        k3g, k3f = _rhs(kappa, E, m, r_f[b], sig_f[b], dlt_f[b], g + 0.5 * h * k2g, f + 0.5 * h * k2f)
        k4g, k4f = _rhs(kappa, E, m, r_f[c], sig_f[c], dlt_f[c], g + h * k3g, f + h * k3f)
        g = g + h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
        f = f + h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f)
        i += step
        big = max(abs(g), abs(f))
        if big > _RESCALE:
            g /= big
            f /= big
            acc += math.log(big)
        G[i] = g
        F[i] = f
        logscale[i] = acc
    return G, F, logscale


@dataclass(eq=False)
class _Shot:
    G: np.ndarray
    F: np.ndarray
    match: int
    mismatch: float


class _ChannelProblem:
    def __init__(self, pots: RadialPotentials, kappa: int, grid: RadialGrid):
        self.pots = pots
        self.kappa = int(kappa)
        self.grid = grid
        self.r_f = grid.r_fine
        self.sig_f = np.ascontiguousarray(pots.sigma(self.r_f), dtype=float)
        self.dlt_f = np.ascontiguousarray(pots.delta(self.r_f), dtype=float)
        if not (np.all(np.isfinite(self.sig_f)) and np.all(np.isfinite(self.dlt_f))):
            raise UsageError("potentials are not finite on the radial grid")
        self.r = self.r_f[::2]
        self.sig = self.sig_f[::2]
        self.dlt = self.dlt_f[::2]
        self.n = self.r.size

    def _start_out(self, E):
        k, m, r0 = self.kappa, self.pots.m, self.r[0]
        s0, d0 = self.sig[0], self.dlt[0]
        if k < 0:
            l = -k - 1
            G = r0 ** (l + 1)
            F = -(E - m - s0) * r0 ** (l + 2) / (2 * l + 3)
        else:
            F = r0**k
            G = (E + m - d0) * r0 ** (k + 1) / (2 * k + 1)
        big = max(abs(G), abs(F))
        return G / big, F / big

    def _start_in(self, E):
        m, r1 = self.pots.m, self.r[-1]
        a = E + m - self.dlt[-1]
        b = E - m - self.sig[-1]
        q2 = -a * b
        if q2 <= 0 or a == 0:
            return None
        G = 1.0
        F = (-math.sqrt(q2) + self.kappa / r1) * G / a
        big = max(1.0, abs(F))
        return G / big, F / big

    def match_index(self, E) -> int:
        m = self.pots.m
        q2 = -(E + m - self.dlt) * (E - m - self.sig)
        lo, hi = int(0.1 * self.n), int(0.9 * self.n)
        allowed = np.nonzero(q2 < 0)[0]
        if allowed.size == 0:
            return self.n // 2
        return int(min(max(allowed[-1], lo), hi))

    def shoot(self, E) -> _Shot:
        E = float(E)
        start_in = self._start_in(E)
        if start_in is None:
            return _Shot(None, None, -1, math.nan)
        im = self.match_index(E)
        m, dt = self.pots.m, self.grid.dt
        Go, Fo, _ = _integrate(self.kappa, E, m, self.r_f, self.sig_f, self.dlt_f, dt,
                               *self._start_out(E), 0, im)
        Gi, Fi, _ = _integrate(self.kappa, E, m, self.r_f, self.sig_f, self.dlt_f, dt,
                               *start_in, self.n - 1, im)
        no = math.hypot(Go[im], Fo[im])
        ni = math.hypot(Gi[im], Fi[im])
        w = (Go[im] * Fi[im] - Fo[im] * Gi[im]) / (no * ni)
        return _Shot((Go, Gi), (Fo, Fi), im, w)

    def mismatch(self, E) -> float:
        return self.shoot(E).mismatch

    def assemble_state(self, E):
        """Matched, normalised (G, F) on the coarse grid, plus the match index."""
        m, dt = self.pots.m, self.grid.dt
        im = self.match_index(E)
        Go, Fo, so = _integrate(self.kappa, E, m, self.r_f, self.sig_f, self.dlt_f, dt,
                                *self._start_out(E), 0, im)
        Gi, Fi, si = _integrate(self.kappa, E, m, self.r_f, self.sig_f, self.dlt_f, dt,
                                *self._start_in(E), self.n - 1, im)
        # undo the running rescaling so each branch is one continuous solution
        so = so - so[im]
        si = si - si[im]
        Go[: im + 1] *= np.exp(so[: im + 1])
        Fo[: im + 1] *= np.exp(so[: im + 1])
        Gi[im:] *= np.exp(si[im:])
        Fi[im:] *= np.exp(si[im:])
        c = (Go[im] * Gi[im] + Fo[im] * Fi[im]) / (Gi[im] ** 2 + Fi[im] ** 2)
        G = np.concatenate([Go[:im], c * Gi[im:]])
        F = np.concatenate([Fo[:im], c * Fi[im:]])
        norm = math.sqrt(_integral(G**2 + F**2, self.r, dt))
        sign = 1.0 if G[np.argmax(np.abs(G))] > 0 else -1.0
        return sign * G / norm, sign * F / norm, im


def _integral(f, r, dt):
    """∫ f dr on the log grid (trapezoid in t with dr = r dt)."""
    y = f * r
    return float(dt * (y.sum() - 0.5 * (y[0] + y[-1])))


def _count_nodes(f: np.ndarray, rel: float = 1e-7) -> int:
    keep = f[np.abs(f) > rel * np.abs(f).max()]
    return int(np.count_nonzero(np.signbit(keep[1:]) != np.signbit(keep[:-1])))


@dataclass(eq=False)
class BoundState:
    E: float
    kappa: int
    n: int
    r: np.ndarray = field(repr=False)
    G: np.ndarray = field(repr=False)
    F: np.ndarray = field(repr=False)
    match_index: int = field(repr=False, default=-1)
    nodes_G: int = 0
    nodes_F: int = 0
    tail: float = 0.0

    @property
    def channel(self) -> KappaChannel:
        return KappaChannel(self.kappa)


def solve_channel(pots: RadialPotentials, kappa: int, window, grid: RadialGrid, *,
                  samples: int = 400, xtol: float = 1e-12) -> list[BoundState]:
    """All bound states of channel κ with energy in ``window``, sorted by n.

    A uniform scan of the normalised Wronskian between the outward and
    inward solutions brackets each level; Brent's method refines it.
    ``n`` counts the nodes of G, or of F under pseudospin symmetry. Levels
    whose amplitude at r_max exceeds 1e-8 of the maximum are dropped with a
    warning: the grid is too short to resolve them.
    """
    ch = KappaChannel(kappa)
    lo, hi = (float(x) for x in window)
    if not hi > lo:
        raise UsageError("window must satisfy Emin < Emax")
    pots.check_symmetry(grid.r_fine)
    prob = _ChannelProblem(pots, ch.kappa, grid)
    Es = np.linspace(lo, hi, int(samples))
    W = np.array([prob.mismatch(E) for E in Es])
    roots = []
    for i in range(len(Es) - 1):
        a, b = W[i], W[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        if a == 0.0:
            roots.append(Es[i])
        elif a * b < 0:
            try:
                roots.append(brentq(prob.mismatch, Es[i], Es[i + 1], xtol=xtol,
                                    rtol=4 * np.finfo(float).eps))
            except (ValueError, RuntimeError) as exc:
                raise NumericalFailure(
                    f"matching did not converge in [{Es[i]}, {Es[i + 1]}] for kappa={kappa}",
                    diagnostics={"kappa": kappa, "bracket": [Es[i], Es[i + 1]],
                                 "mismatch": [a, b]}) from exc
    states = []
    for E in roots:
        G, F, im = prob.assemble_state(E)
        # a genuine level makes both branches continuous; a sign flip of the
        # mismatch through a pole would leave a jump at the match point
        amp = max(np.abs(G).max(), np.abs(F).max())
        jump = abs(G[im] - G[im - 1]) + abs(F[im] - F[im - 1])
        if jump > 0.5 * amp:
            continue
        nG, nF = _count_nodes(G), _count_nodes(F)
        n = nF if pots.symmetry == PSEUDOSPIN else nG
        tail = max(abs(G[-1]), abs(F[-1])) / amp
        if tail > DECAY_TOL:
            log.warning("kappa=%d level at E=%.10g not decayed at r_max (tail %.2g); dropped",
                        ch.kappa, E, tail)
            continue
        states.append(BoundState(float(E), ch.kappa, n, prob.r, G, F, im, nG, nF, tail))
    states.sort(key=lambda s: (s.n, s.E))
    return states


def first_order_residual(state: BoundState, pots: RadialPotentials, grid: RadialGrid,
                         exclude: int = 8) -> float:
    """Max pointwise residual of both radial equations over max amplitude.

    Derivatives use fourth-order central differences in t; points within
    ``exclude`` of the match point and of the grid ends are skipped.
    """
    r, G, F, E, k, m = state.r, state.G, state.F, state.E, state.kappa, pots.m
    dt = grid.dt

    def d(y):
        out = np.full_like(y, np.nan)
        out[2:-2] = (-y[4:] + 8 * y[3:-1] - 8 * y[1:-3] + y[:-4]) / (12 * dt) / r[2:-2]
        return out

    sig, dlt = pots.sigma(r), pots.delta(r)
    r1 = d(G) + k / r * G - (E + m - dlt) * F
    r2 = d(F) - k / r * F + (E - m - sig) * G
    mask = np.ones(r.size, bool)
    mask[: exclude + 2] = False
    mask[-exclude - 2:] = False
    im = state.match_index
    mask[max(0, im - exclude): im + exclude] = False
    amp = max(np.abs(G).max(), np.abs(F).max())
    return float(max(np.nanmax(np.abs(r1[mask])), np.nanmax(np.abs(r2[mask]))) / amp)


# --------------------------------------------------------------------------
# oracle and doublets


def oscillator_oracle(a: float, m: float, n: int, channel, symmetry: str,
                      bracket_hi: float | None = None, tol: float = 1e-12) -> float:
    """Closed-form oscillator levels by bisection on the transcendental relation.

    spin (Δ = 0, Σ = a r²):       E² − m² = 2 √((E + m) a) (2n + l + 3/2)
    pseudospin (Σ = 0, Δ = a r²): E² − m² = 2 √((E − m) a) (2n + l̃ + 3/2)
    """
    if not a > 0:
        raise UsageError("oscillator coefficient must be positive")
    ch = channel if isinstance(channel, KappaChannel) else KappaChannel(channel)
    if symmetry == SPIN:
        N = 2 * n + ch.l + 1.5
        g = lambda E: E * E - m * m - 2 * math.sqrt((E + m) * a) * N  # noqa: E731
    elif symmetry == PSEUDOSPIN:
        N = 2 * n + ch.l_tilde + 1.5
        g = lambda E: E * E - m * m - 2 * math.sqrt(max(E - m, 0.0) * a) * N  # noqa: E731
    else:
        raise UsageError("oscillator oracle needs symmetry spin or pseudospin")
    # g(|m|) <= 0 in both modes (g(m) = 0 for pseudospin), and g grows like E²
    lo = abs(m)
    hi = bracket_hi or (abs(m) + 4.0 * (1.0 + (a * N * N) ** (1 / 3)))
    if g(lo) > 0 or g(hi) <= 0:
        raise NumericalFailure(f"no oscillator root bracketed in [{lo}, {hi}]")
    while hi - lo > tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class RadialDoublet:
    n: int
    kappa_a: int
    kappa_b: int
    E_a: float
    E_b: float

    @property
    def splitting(self) -> float:
        return abs(self.E_a - self.E_b)

    @property
    def relative(self) -> float:
        return self.splitting / max(abs(self.E_a), abs(self.E_b))


def doublet_report(states: dict, mode: str) -> tuple[list[RadialDoublet], list[tuple]]:
    """Pair channel results ``{kappa: [BoundState, ...]}`` with their partners.

    Returns ``(pairs, missing)``; ``missing`` lists (kappa, n) whose partner
    channel or level is absent. Channels without a partner (κ = -1 for spin,
    κ = 1 for pseudospin) are skipped.
    """
    if mode not in (SPIN, PSEUDOSPIN):
        raise UsageError(f"doublet mode must be spin or pseudospin, got {mode!r}")
    pairs, missing, seen = [], [], set()
    for kappa in sorted(states):
        partner = (-kappa - 1) if mode == SPIN else (1 - kappa)
        if partner == 0:
            continue
        for st in states[kappa]:
            key = tuple(sorted((kappa, partner))) + (st.n,)
            if key in seen:
                continue
            other = [s for s in states.get(partner, []) if s.n == st.n]
            if not other:
                missing.append((kappa, st.n))
                continue
            seen.add(key)
            a, b = (st, other[0]) if kappa < partner else (other[0], st)
            pairs.append(RadialDoublet(st.n, a.kappa, b.kappa, a.E, b.E))
    pairs.sort(key=lambda p: (p.n, p.kappa_a))
    return pairs, missing


def grid_spectrum(pots: RadialPotentials, kappa: int, r_max: float, n_points: int,
                  window) -> np.ndarray:
    """Eigenvalues in ``window`` of a staggered-grid discretisation.

    G lives on r_j = j h, F on r_{j-1/2}; the resulting symmetric
    tridiagonal matrix is free of the doubling of collocated grids. Second
    order accurate; meant as a cross-check of the shooting solver.
    """
    n = int(n_points)
    h = r_max / n
    j = np.arange(1, n + 1)
    rG = j * h
    rF = (j - 0.5) * h
    m = pots.m
    diag = np.empty(2 * n)
    diag[0::2] = pots.delta(rF) - m      # F_{j-1/2}
    diag[1::2] = pots.sigma(rG) + m      # G_j
    off = np.empty(2 * n - 1)
    off[0::2] = 1.0 / h + kappa / (2 * rG)             # F_{j-1/2} -- G_j
    off[1::2] = -1.0 / h + kappa / (2 * rG[:-1])       # G_j -- F_{j+1/2}
    lo, hi = window
    return eigvalsh_tridiagonal(diag, off, select="v", select_range=(lo, hi))
