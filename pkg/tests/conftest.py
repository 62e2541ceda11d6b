"""Shared fixtures for the test suite.

The expensive inputs (sliding-window violation profiles of the XY chain at
the coarse preset, for every system size and observable the exponent table
needs) are computed once per session and shared.  They are lazy: running
only the unit-test modules never triggers them.
"""

import time

import pytest

from benfordxy import scaling as sc
from benfordxy.windows import WindowSpec, default_jobs, profile_set
from benfordxy.xy_model import ObservableCurve, ObservableKind

SIZES = (14, 20, 24, 30, 34, 40)
COARSE_SPEC = WindowSpec(0.5, 1.5, 0.05, 1e-3, 10000)
#: converged samples per digit depth at the coarse window geometry
CONVERGED_N = {1: 10000, 2: 10000, 3: 11000, 4: 40000}
#: exponent-table columns: distances evaluated per observable
TABLE_DISTANCES = {"mz": ("md", "sd", "bd"), "txx": ("md",)}


def xy_curve(obs: str, size: int) -> ObservableCurve:
    """The gamma = 0.5 chain observable used throughout the pipeline tests."""
    return ObservableCurve(ObservableKind.parse(obs), gamma=0.5, size=size)


def cell_points(tables, obs: str, k: int, dist: str):
    """(N, lambda_c^N) points for one exponent-table cell.

    Propagates FitError so callers can report unfittable cells.
    """
    pts = []
    for size in SIZES:
        prof = tables[(obs, size)][(k, dist)]
        lam_c, _ = sc.profile_pseudo_critical(list(prof.points))
        pts.append((size, lam_c))
    return pts


@pytest.fixture(scope="session")
def coarse_tables():
    """{(obs, N): {(k, dist): ViolationProfile}} at the coarse preset.

    Returns a dict with the tables and the wall-clock seconds they took,
    so runtime-budget checks can charge the shared cost honestly.
    """
    jobs = default_jobs()
    start = time.monotonic()
    tables = {}
    for obs, dists in TABLE_DISTANCES.items():
        for size in SIZES:
            tables[(obs, size)] = profile_set(
                xy_curve(obs, size), COARSE_SPEC, (1, 2, 3, 4), dists, jobs=jobs
            )
    return {"tables": tables, "elapsed": time.monotonic() - start}


@pytest.fixture(scope="session")
def converged_tables(coarse_tables):
    """Same layout as coarse_tables but with the converged per-k sample
    counts; depths whose converged n equals the coarse n reuse the coarse
    profiles outright."""
    jobs = default_jobs()
    tables = {}
    for obs, dists in TABLE_DISTANCES.items():
        for size in SIZES:
            merged = {}
            for k in (1, 2, 3, 4):
                n = CONVERGED_N[k]
                if n == COARSE_SPEC.n:
                    for d in dists:
                        merged[(k, d)] = coarse_tables["tables"][(obs, size)][(k, d)]
                    continue
                spec = WindowSpec(
                    COARSE_SPEC.a, COARSE_SPEC.b, COARSE_SPEC.w, COARSE_SPEC.epsilon, n
                )
                merged.update(
                    profile_set(xy_curve(obs, size), spec, (k,), dists, jobs=jobs)
                )
            tables[(obs, size)] = merged
    return tables
