"""Exact observables of the 1D anisotropic transverse-field XY chain.

Closed-form transverse magnetization and two-point correlators, evaluated
either as discrete momentum sums for a finite periodic chain of N sites
(momenta phi_p = 2*pi*p/N, p = 1..N/2) or as momentum integrals over
[0, pi] in the thermodynamic limit.  All quantities are dimensionless:
the driving field lam, the anisotropy gamma (nonzero, gamma = 1 is the
transverse Ising chain) and the inverse temperature beta_tilde, where
``math.inf`` selects the zero-temperature ground state exactly (the
thermal tanh factor is replaced by 1, never by a large finite argument).

The thermodynamic limit is requested with ``system_size=None``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .quadrature import integrate

#: tolerance for thermodynamic-limit momentum integrals
QUAD_TOL = 1e-10

_OBSERVABLE_NAMES = ("mz", "txx", "tyy", "tzz", "g")


@dataclass(frozen=True)
class ModelParams:
    """Chain parameters: field lam, anisotropy gamma, inverse temperature
    beta_tilde (inf = ground state), and system_size (None = infinite)."""

    lam: float
    gamma: float
    beta_tilde: float = math.inf
    system_size: int | None = None

    def __post_init__(self):
        if self.gamma == 0.0:
            raise ValueError("gamma must be nonzero (XX point is excluded)")
        if not self.beta_tilde > 0.0:
            raise ValueError("beta_tilde must be positive")
        if self.system_size is not None:
            n = self.system_size
            if n < 4 or n % 2 != 0:
                raise ValueError(f"system_size must be an even integer >= 4, got {n}")


@dataclass(frozen=True)
class ObservableKind:
    """Tag for one of the supported observables: mz, txx, tyy, tzz, or the
    string correlator g at integer offset r."""

    name: str
    r: int = 0

    def __post_init__(self):
        if self.name not in _OBSERVABLE_NAMES:
            raise ValueError(f"unknown observable {self.name!r}")

    @classmethod
    def parse(cls, text: str) -> "ObservableKind":
        """Parse 'mz', 'txx', ... or 'g:R' with integer offset R."""
        if text.startswith("g:"):
            return cls("g", int(text[2:]))
        if text == "g":
            return cls("g", 0)
        return cls(text)

    def label(self) -> str:
        return f"g:{self.r}" if self.name == "g" else self.name


def dispersion(phi, lam, gamma):
    """Quasiparticle energy sqrt(gamma^2 sin^2 phi + (lam - cos phi)^2).

    Accepts scalars or arrays; even in gamma by construction.
    """
    s = gamma * np.sin(phi)
    c = lam - np.cos(phi)
    return np.sqrt(s * s + c * c)


def _thermal_factor(energy, beta_tilde):
    """tanh(beta_tilde * energy / 2); exactly 1 at beta_tilde = inf."""
    if math.isinf(beta_tilde):
        return np.ones_like(np.asarray(energy, dtype=float))
    return np.tanh(0.5 * beta_tilde * np.asarray(energy, dtype=float))


def _momenta(size: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(1, size // 2 + 1) / size


def mz_curve(lams, gamma, beta_tilde=math.inf, size=None) -> np.ndarray:
    """Transverse magnetization at each field in lams (vectorized).

    Finite size: -(2/N) sum_p tanh(bt*L_p/2)(cos phi_p - lam)/L_p.
    Infinite size: the same integrand averaged over [0, pi] by quadrature.
    """
    lams = np.asarray(lams, dtype=float)
    if size is None:
        out = np.array([_mz_inf(lam, gamma, beta_tilde) for lam in np.atleast_1d(lams)])
        return out.reshape(lams.shape)
    phi = _momenta(size)
    lam_col = np.atleast_1d(lams)[:, None]
    energy = dispersion(phi[None, :], lam_col, gamma)
    num = _thermal_factor(energy, beta_tilde) * (np.cos(phi)[None, :] - lam_col)
    terms = np.where(energy == 0.0, 0.0, num / np.where(energy == 0.0, 1.0, energy))
    out = -(2.0 / size) * terms.sum(axis=1)
    return out.reshape(lams.shape)


def _mz_inf(lam, gamma, beta_tilde) -> float:
    zero_t = math.isinf(beta_tilde)

    def f(p):
        e = math.sqrt((gamma * math.sin(p)) ** 2 + (lam - math.cos(p)) ** 2)
        if e == 0.0:
            return 0.0
        t = 1.0 if zero_t else math.tanh(0.5 * beta_tilde * e)
        return t * (math.cos(p) - lam) / e

    return -integrate(f, 0.0, math.pi, tol=QUAD_TOL) / math.pi


def magnetization(params: ModelParams) -> float:
    """Transverse magnetization M_z for the given parameters."""
    return float(
        mz_curve(params.lam, params.gamma, params.beta_tilde, params.system_size)
    )


def correlator_curve(r: int, lams, gamma, size=None) -> np.ndarray:
    """String correlator G(r, lam) at zero temperature (vectorized in lam).

    Infinite size: (1/pi) int_0^pi [gamma sin(r phi) sin phi
    - cos(r phi)(cos phi - lam)] / Lambda dphi.  Finite size: the discrete
    momentum sum with the same integrand, (1/pi)int -> (2/N)sum.
    """
    lams = np.asarray(lams, dtype=float)
    if size is not None and abs(r) > size // 2:
        raise ValueError(f"offset |r|={abs(r)} exceeds N/2={size // 2}")
    if size is None:
        out = np.array([_g_inf(r, lam, gamma) for lam in np.atleast_1d(lams)])
        return out.reshape(lams.shape)
    phi = _momenta(size)
    lam_col = np.atleast_1d(lams)[:, None]
    energy = dispersion(phi[None, :], lam_col, gamma)
    num = gamma * np.sin(r * phi)[None, :] * np.sin(phi)[None, :] - np.cos(r * phi)[
        None, :
    ] * (np.cos(phi)[None, :] - lam_col)
    terms = np.where(energy == 0.0, 0.0, num / np.where(energy == 0.0, 1.0, energy))
    out = (2.0 / size) * terms.sum(axis=1)
    return out.reshape(lams.shape)


def _g_inf(r: int, lam, gamma) -> float:
    def f(p):
        e = math.sqrt((gamma * math.sin(p)) ** 2 + (lam - math.cos(p)) ** 2)
        if e == 0.0:
            return 0.0
        return (
            gamma * math.sin(r * p) * math.sin(p)
            - math.cos(r * p) * (math.cos(p) - lam)
        ) / e

    return integrate(f, 0.0, math.pi, tol=QUAD_TOL) / math.pi


def correlator_G(r: int, lam: float, gamma: float, size: int | None = None) -> float:
    """Zero-temperature two-point correlator G(r, lam)."""
    return float(correlator_curve(r, lam, gamma, size))


def correlators_nn(lam: float, gamma: float, size: int | None = None):
    """Nearest-neighbor correlators (T_xx, T_yy, T_zz) at zero temperature.

    T_xx = G(-1), T_yy = G(+1), T_zz = M_z^2 - G(-1) G(+1).
    """
    g_minus = correlator_G(-1, lam, gamma, size)
    g_plus = correlator_G(1, lam, gamma, size)
    mz = magnetization(ModelParams(lam, gamma, math.inf, size))
    return g_minus, g_plus, mz * mz - g_minus * g_plus


@dataclass(frozen=True)
class ObservableCurve:
    """Picklable vectorized observable lam-array -> value-array.

    Carries everything but the field, so profiling code can sweep lam.
    Correlator-based observables require beta_tilde = inf (the closed
    forms used here are zero-temperature only).
    """

    kind: ObservableKind
    gamma: float
    beta_tilde: float = math.inf
    size: int | None = None

    def __post_init__(self):
        ModelParams(0.0, self.gamma, self.beta_tilde, self.size)
        if self.kind.name != "mz" and not math.isinf(self.beta_tilde):
            raise ValueError(
                "finite-temperature correlators are not supported; "
                "only mz accepts finite beta_tilde"
            )
        if self.size is not None and abs(self.kind.r) > self.size // 2:
            raise ValueError("correlator offset exceeds N/2")

    @property
    def label(self) -> str:
        return self.kind.label()

    def __call__(self, lams) -> np.ndarray:
        name = self.kind.name
        if name == "mz":
            return mz_curve(lams, self.gamma, self.beta_tilde, self.size)
        if name == "txx":
            return correlator_curve(-1, lams, self.gamma, self.size)
        if name == "tyy":
            return correlator_curve(1, lams, self.gamma, self.size)
        if name == "g":
            return correlator_curve(self.kind.r, lams, self.gamma, self.size)
        # tzz
        gm = correlator_curve(-1, lams, self.gamma, self.size)
        gp = correlator_curve(1, lams, self.gamma, self.size)
        mz = mz_curve(lams, self.gamma, self.beta_tilde, self.size)
        return mz * mz - gm * gp


def observable_curve(
    kind: ObservableKind,
    lambda_grid: Sequence[float],
    gamma: float,
    beta_tilde: float = math.inf,
    size: int | None = None,
) -> list[tuple[float, float]]:
    """Evaluate one observable over a strictly increasing field grid.

    Returns (lam, value) pairs in grid order; evaluation is a single
    deterministic vectorized pass, so output never depends on scheduling.
    """
    grid = np.asarray(lambda_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("lambda_grid is empty")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("lambda_grid must be strictly increasing")
    values = ObservableCurve(kind, gamma, beta_tilde, size)(grid)
    return list(zip(grid.tolist(), values.tolist()))
