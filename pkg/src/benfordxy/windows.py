"""Sliding-window digit-violation profiles over a field sweep.

An observable curve is scanned with overlapping windows [a + m*eps,
a + w + m*eps].  Within each window the curve is sampled at n evenly
spaced points (endpoints included), min-max normalized, and the first-k
significant digits of the nonzero normalized values are compared against
the Benford expectation with one of the three distances from
:mod:`benfordxy.benford`.  The profile keys each window's distance by the
window midpoint a + w/2 + m*eps.

Windows are independent work units; `jobs > 1` farms fixed-size blocks of
window indices to a process pool and assembles results by index, so the
output is bit-identical for any worker count.  `profile_set` evaluates
several (k, distance) combinations from one shared sampling pass, which
is how the scaling pipeline keeps its runtime sane.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import benford

_BLOCK = 32  # windows per work unit; fixed so partitioning never depends on jobs


class DegenerateWindowError(ValueError):
    """The observable is constant over a window: no digit statistics exist."""


class ConvergenceError(RuntimeError):
    """The doubling schedule ran out of budget before meeting tolerance."""


@dataclass(frozen=True)
class WindowSpec:
    """Sweep interval [a, b], window width w, shift epsilon, samples n."""

    a: float
    b: float
    w: float
    epsilon: float
    n: int

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"need b > a, got [{self.a}, {self.b}]")
        if not 0.0 < self.epsilon < self.w:
            raise ValueError(f"need 0 < epsilon < w, got eps={self.epsilon} w={self.w}")
        if not self.w <= (self.b - self.a) / 2.0:
            raise ValueError(f"window width {self.w} exceeds (b - a)/2")
        if self.n < 100:
            raise ValueError(f"need n >= 100 samples per window, got {self.n}")

    @property
    def count(self) -> int:
        """Number of windows, floor((b - a - w)/epsilon) + 1."""
        return int(math.floor((self.b - self.a - self.w) / self.epsilon + 1e-9)) + 1


def windows(spec: WindowSpec) -> list[tuple[float, float]]:
    """All window intervals [a + m*eps, a + w + m*eps], m = 0..m_max."""
    return [
        (spec.a + m * spec.epsilon, spec.a + spec.w + m * spec.epsilon)
        for m in range(spec.count)
    ]


def midpoints(spec: WindowSpec) -> np.ndarray:
    """Window midpoints a + w/2 + m*eps, computed per-index (no accumulation)."""
    m = np.arange(spec.count)
    return spec.a + spec.w / 2.0 + m * spec.epsilon


def normalize(data) -> np.ndarray:
    """Min-max map onto [0, 1]; rejects constant data."""
    arr = np.asarray(data, dtype=float)
    if arr.size < 2:
        raise ValueError("normalization needs at least 2 points")
    lo = arr.min()
    hi = arr.max()
    if not hi > lo:
        raise DegenerateWindowError("constant data has no min-max normalization")
    return (arr - lo) / (hi - lo)


def _window_deltas(values: np.ndarray, combos) -> list[float]:
    """Distances for each (k, distance) combo from one sampled window."""
    normed = normalize(values)
    nonzero = normed[normed != 0.0]
    if nonzero.size == 0:
        raise DegenerateWindowError("all normalized samples are zero")
    out = []
    counts_by_k: dict[int, np.ndarray] = {}
    for k, dist in combos:
        counts = counts_by_k.get(k)
        if counts is None:
            counts = benford._count_keys(nonzero, k)
            counts_by_k[k] = counts
        expected = counts.sum() * benford.benford_probabilities(k)
        out.append(benford._RAW_DISTANCES[dist](counts, expected))
    return out


def window_violation(observable, window, n: int, k: int, distance: str) -> float:
    """Distance of one window's normalized samples from the Benford law."""
    _check_distance(distance)
    lo, hi = window
    lams = np.linspace(lo, hi, n)
    values = np.asarray(observable(lams), dtype=float)
    return _window_deltas(values, [(k, distance)])[0]


def _check_distance(distance: str):
    if distance not in benford.DISTANCES:
        raise ValueError(
            f"unknown distance {distance!r}, expected one of {sorted(benford.DISTANCES)}"
        )


@dataclass(frozen=True)
class ProfileMeta:
    """Provenance of a profile: observable identity, digit depth, distance,
    and window geometry."""

    observable: str
    gamma: float | None
    beta_tilde: float | None
    size: int | None
    k: int
    distance: str
    spec: WindowSpec


@dataclass(frozen=True)
class ViolationProfile:
    """Ordered (midpoint, delta) points plus their provenance."""

    points: tuple[tuple[float, float], ...]
    meta: ProfileMeta

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def deltas(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


def _eval_block(observable, spec: WindowSpec, start: int, stop: int, combos):
    """Distances for windows start..stop-1; shape (stop-start, len(combos))."""
    out = np.empty((stop - start, len(combos)))
    for row, m in enumerate(range(start, stop)):
        lo = spec.a + m * spec.epsilon
        hi = spec.a + spec.w + m * spec.epsilon
        lams = np.linspace(lo, hi, spec.n)
        values = np.asarray(observable(lams), dtype=float)
        out[row] = _window_deltas(values, combos)
    return out


def _meta_for(observable, spec: WindowSpec, k: int, distance: str) -> ProfileMeta:
    label = getattr(observable, "label", None)
    if label is None:
        label = getattr(observable, "__name__", "custom")
    return ProfileMeta(
        observable=str(label),
        gamma=getattr(observable, "gamma", None),
        beta_tilde=getattr(observable, "beta_tilde", None),
        size=getattr(observable, "size", None),
        k=k,
        distance=distance,
        spec=spec,
    )


def profile_set(observable, spec: WindowSpec, ks, distances, jobs: int = 1):
    """Profiles for every (k, distance) pair from one shared sampling pass.

    Returns a dict {(k, distance): ViolationProfile}.  Each window is
    sampled and normalized once; digit counts are reused across distances
    at equal k.
    """
    ks = list(dict.fromkeys(ks))
    distances = list(dict.fromkeys(distances))
    for d in distances:
        _check_distance(d)
    combos = [(k, d) for k in ks for d in distances]
    if not combos:
        raise ValueError("need at least one (k, distance) combination")
    count = spec.count
    blocks = [(s, min(s + _BLOCK, count)) for s in range(0, count, _BLOCK)]
    table = np.empty((count, len(combos)))
    if jobs > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_eval_block, observable, spec, s, t, combos)
                for s, t in blocks
            ]
            for (s, t), fut in zip(blocks, futures):
                table[s:t] = fut.result()
    else:
        for s, t in blocks:
            table[s:t] = _eval_block(observable, spec, s, t, combos)
    mids = midpoints(spec)
    result = {}
    for col, (k, d) in enumerate(combos):
        pts = tuple((float(mids[m]), float(table[m, col])) for m in range(count))
        result[(k, d)] = ViolationProfile(pts, _meta_for(observable, spec, k, d))
    return result


def profile(observable, spec: WindowSpec, k: int, distance: str, jobs: int = 1):
    """Violation profile over all windows for a single (k, distance)."""
    return profile_set(observable, spec, [k], [distance], jobs=jobs)[(k, distance)]


@dataclass(frozen=True)
class ConvergenceResult:
    """Smallest converged n, its achieved relative deviation, and the
    (n, deviation) pairs tested along the doubling schedule."""

    n: int
    deviation: float
    history: tuple[tuple[int, float], ...]


def convergence_check(
    observable,
    spec: WindowSpec,
    k: int,
    distance: str,
    tolerance: float = 0.01,
    n0: int = 2500,
    max_n: int = 160000,
    jobs: int = 1,
) -> ConvergenceResult:
    """First n in {n0, 2*n0, 4*n0, ...} whose profile is stable under
    doubling: max over windows of |D(2n) - D(n)| / max(D(n), 1e-6) < tolerance.
    """
    if not tolerance > 0.0:
        raise ValueError("tolerance must be positive")
    cache: dict[int, np.ndarray] = {}

    def deltas_at(n: int) -> np.ndarray:
        if n not in cache:
            sp = dataclasses.replace(spec, n=n)
            cache[n] = profile(observable, sp, k, distance, jobs=jobs).deltas
        return cache[n]

    history = []
    n = n0
    while 2 * n <= max_n:
        d1 = deltas_at(n)
        d2 = deltas_at(2 * n)
        dev = float(np.max(np.abs(d2 - d1) / np.maximum(d1, 1e-6)))
        history.append((n, dev))
        if dev < tolerance:
            return ConvergenceResult(n, dev, tuple(history))
        n *= 2
    raise ConvergenceError(
        f"no n <= {max_n // 2} met tolerance {tolerance}; "
        f"deviations {[(m, f'{d:.3g}') for m, d in history]}"
    )


def fmt17(x: float) -> str:
    """Render a float at 17 significant digits (lossless round-trip)."""
    return f"{x:.17g}"


def profile_csv_text(prof: ViolationProfile) -> str:
    lines = ["lambda_mid,delta"]
    lines += [f"{fmt17(lam)},{fmt17(d)}" for lam, d in prof.points]
    return "\n".join(lines) + "\n"


def profile_meta_text(prof: ViolationProfile) -> str:
    """Key-value sidecar; parses back as a CLI config for an identical rerun."""
    m = prof.meta
    sp = m.spec
    pairs = [("observable", m.observable)]
    pairs.append(("n_sites", "inf" if m.size is None else str(m.size)))
    if m.gamma is not None:
        pairs.append(("gamma", fmt17(m.gamma)))
    if m.beta_tilde is not None and math.isfinite(m.beta_tilde):
        pairs.append(("beta_tilde", fmt17(m.beta_tilde)))
    pairs += [
        ("k", str(m.k)),
        ("distance", m.distance),
        ("a", fmt17(sp.a)),
        ("b", fmt17(sp.b)),
        ("w", fmt17(sp.w)),
        ("epsilon", fmt17(sp.epsilon)),
        ("n", str(sp.n)),
    ]
    return "".join(f"{key} = {val}\n" for key, val in pairs)


def write_profile(prof: ViolationProfile, csv_path, meta_path=None):
    """Write the profile CSV and (optionally) its metadata sidecar."""
    with open(csv_path, "w") as fh:
        fh.write(profile_csv_text(prof))
    if meta_path is not None:
        with open(meta_path, "w") as fh:
            fh.write(profile_meta_text(prof))


def default_jobs() -> int:
    return os.cpu_count() or 1
