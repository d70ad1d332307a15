"""Gram-matrix spectra and Marchenko-Pastur analytics.

The sample covariance matrix S = (1/N1) J^T J of an N1 x N2 coupling matrix
has N2 eigenvalues mu_1 >= ... >= mu_{N2} >= 0. Their limiting density is
the Marchenko-Pastur law on [d-, d+] with

    d- = (sqrt(r1) - sqrt(r2))^2 / r1,     d+ = (sqrt(r1) + sqrt(r2))^2 / r1,

where r1 = N1/N, r2 = N2/N. This module computes the eigenvalues, the
density, its Stieltjes and log transforms in closed form, the classical
(quantile) locations, and rigidity diagnostics against them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO

import numpy as np

from .disorder import DisorderMatrix
from .errors import DimensionError, DomainError, ParameterError, SolverError

RATIO_TOL = 1e-12

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(96)
_GL01_NODES = 0.5 * (_GL_NODES + 1.0)
_GL01_WEIGHTS = 0.5 * _GL_WEIGHTS


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues of (1/N1) J^T J, sorted descending, clamped to >= 0."""

    values: np.ndarray
    n1: int
    n2: int


@dataclass(frozen=True)
class MPLaw:
    """Marchenko-Pastur law for aspect ratios (r1, r2), r1 >= r2."""

    r1: float
    r2: float
    d_minus: float
    d_plus: float
    swapped: bool = False


@dataclass(frozen=True, eq=False)
class ClassicalLocations:
    """Quantile locations g_1 > g_2 > ... > g_n of an MP law."""

    g: np.ndarray


@dataclass(frozen=True)
class RigidityReport:
    max_ratio: float
    violations: int


def gram_eigenvalues(J: DisorderMatrix) -> Spectrum:
    """Eigenvalues of the sample covariance matrix (1/rows) J^T J.

    Uses a symmetric eigensolver on the cols x cols Gram matrix; values are
    clamped to zero once they pass the -1e-10 * mu_1 floor.
    """
    a = np.asarray(J.entries, dtype=np.float64)
    gram = (a.T @ a) / J.rows
    try:
        vals = np.linalg.eigvalsh(gram)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"symmetric eigensolver did not converge: {exc}") from exc
    vals = vals[::-1].copy()
    top = max(float(vals[0]), 0.0)
    floor = -1e-10 * top
    if vals[-1] < floor:
        idx = int(np.argmin(vals))
        raise SolverError(
            f"eigenvalue {idx} = {vals[idx]:.3e} below the negativity floor {floor:.3e}"
        )
    np.clip(vals, 0.0, None, out=vals)
    vals.setflags(write=False)
    return Spectrum(values=vals, n1=J.rows, n2=J.cols)


def mp_law(r1: float, r2: float) -> MPLaw:
    """Build the MP law for ratios summing to one; swaps so that r1 >= r2."""
    if not (r1 > 0.0 and r2 > 0.0):
        raise ParameterError(f"ratios must be positive, got r1={r1}, r2={r2}")
    if abs(r1 + r2 - 1.0) > RATIO_TOL:
        raise ParameterError(f"ratios must satisfy r1 + r2 = 1, got sum {r1 + r2!r}")
    swapped = r1 < r2
    if swapped:
        r1, r2 = r2, r1
    # (sqrt(r1) +- sqrt(r2))^2 = 1 +- 2 sqrt(r1 r2); this form is exact at
    # representable products like r1 r2 = 1/4
    cross = 2.0 * math.sqrt(r1 * r2)
    return MPLaw(
        r1=r1,
        r2=r2,
        d_minus=(1.0 - cross) / r1,
        d_plus=(1.0 + cross) / r1,
        swapped=swapped,
    )


def mp_density(law: MPLaw, x):
    """MP density: 2 sqrt((d+ - x)(x - d-)) / (pi (sqrt(d+) - sqrt(d-))^2 x)."""
    x = np.asarray(x, dtype=np.float64)
    c = (math.sqrt(law.d_plus) - math.sqrt(law.d_minus)) ** 2
    out = np.zeros_like(x)
    inside = (x > law.d_minus) & (x < law.d_plus)
    xi = x[inside]
    out[inside] = 2.0 * np.sqrt((law.d_plus - xi) * (xi - law.d_minus)) / (math.pi * c * xi)
    if out.ndim == 0:
        return float(out)
    return out


def _sqrt_branch(law: MPLaw, z: float) -> float:
    # R(z) = sqrt((z - d-)(z - d+)), signed so that s(z) ~ 1/z at infinity.
    prod = (z - law.d_minus) * (z - law.d_plus)
    r = math.sqrt(max(prod, 0.0))
    return r if z >= law.d_plus else -r


def mp_stieltjes(law: MPLaw, z: float) -> float:
    """Stieltjes transform s(z) = int dMP(x) / (z - x), z outside (d-, d+)."""
    if z == 0.0:
        raise DomainError("Stieltjes transform is singular at z = 0")
    if law.d_minus < z < law.d_plus:
        raise DomainError(
            f"z = {z} lies inside the support ({law.d_minus}, {law.d_plus})"
        )
    r1, r2 = law.r1, law.r2
    R = _sqrt_branch(law, z)
    return (r1 * z - r1 * R - (r1 - r2)) / (2.0 * r2 * z)


def mp_stieltjes_edge(law: MPLaw) -> float:
    """s(d+), finite thanks to the square-root edge decay."""
    return law.r1 / (math.sqrt(law.r2) * (math.sqrt(law.r1) + math.sqrt(law.r2)))


def _log_transform(law: MPLaw, z: float) -> float:
    r1, r2 = law.r1, law.r2
    R = _sqrt_branch(law, z)
    t = r1 * z - 1.0 - r1 * R - (r1 - r2) * math.log(z)
    t += math.log((r1 * z - 1.0 + r1 * R) / (2.0 * r1))
    if r1 != r2:
        t += (r1 - r2) * math.log(
            (r1 * z - (r1 - r2) * r1 * R - (r1 - r2) ** 2) / (2.0 * r1 * r2 * z)
        )
    return t / (2.0 * r2)


def mp_log_transform(law: MPLaw, z: float) -> float:
    """Log transform H(z) = int log(z - x) dMP(x) for z > d+ (closed form)."""
    if not z > law.d_plus:
        raise DomainError(f"log transform requires z > d+ = {law.d_plus}, got {z}")
    return _log_transform(law, z)


def mp_log_transform_edge(law: MPLaw) -> float:
    """H(d+); the transform extends continuously to the upper edge."""
    return _log_transform(law, law.d_plus)


def mp_stieltjes_prime(law: MPLaw, z: float) -> float:
    """Derivative s'(z) = H''(z) for z strictly outside [d-, d+]."""
    if law.d_minus <= z <= law.d_plus:
        raise DomainError(f"s'(z) requires z outside [{law.d_minus}, {law.d_plus}]")
    if z == 0.0:
        raise DomainError("s'(z) is singular at z = 0")
    r1, r2 = law.r1, law.r2
    R = _sqrt_branch(law, z)
    Rp = (2.0 * z - law.d_minus - law.d_plus) / (2.0 * R)
    s = (r1 * z - r1 * R - (r1 - r2)) / (2.0 * r2 * z)
    return (r1 - r1 * Rp) / (2.0 * r2 * z) - s / z


def mp_tail(law: MPLaw, g) -> np.ndarray:
    """Tail mass int_g^{d+} dMP, by Gauss-Legendre under an edge substitution.

    The substitution x = d+ - t^2 (or x = d- + s^2 on the lower half) removes
    the square-root edge singularity, so a fixed 96-node rule is accurate to
    machine precision.
    """
    g = np.atleast_1d(np.asarray(g, dtype=np.float64))
    dm, dp, width = law.d_minus, law.d_plus, law.d_plus - law.d_minus
    c = (math.sqrt(dp) - math.sqrt(dm)) ** 2
    mid = 0.5 * (dm + dp)
    out = np.empty_like(g)
    out[g <= dm] = 1.0
    out[g >= dp] = 0.0
    hi = (g >= mid) & (g < dp)
    lo = (g > dm) & (g < mid)
    if hi.any():
        tmax = np.sqrt(dp - g[hi])
        t = tmax[:, None] * _GL01_NODES[None, :]
        f = 4.0 * t**2 * np.sqrt(np.maximum(width - t**2, 0.0)) / (math.pi * c * (dp - t**2))
        out[hi] = (f * _GL01_WEIGHTS[None, :]).sum(axis=1) * tmax
    if lo.any():
        smax = np.sqrt(g[lo] - dm)
        s = smax[:, None] * _GL01_NODES[None, :]
        f = 4.0 * s**2 * np.sqrt(np.maximum(width - s**2, 0.0)) / (math.pi * c * (dm + s**2))
        out[lo] = 1.0 - (f * _GL01_WEIGHTS[None, :]).sum(axis=1) * smax
    return out


def classical_locations(law: MPLaw, n: int) -> ClassicalLocations:
    """Solve tail(g_k) = (k - 1/2)/n for k = 1..n by vectorized bisection."""
    if n < 1:
        raise ParameterError(f"need n >= 1 quantiles, got {n}")
    target = (np.arange(1, n + 1) - 0.5) / n
    lo = np.full(n, law.d_minus)
    hi = np.full(n, law.d_plus)
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        too_small = mp_tail(law, mid) > target  # tail too big: quantile lies right
        lo[too_small] = mid[too_small]
        hi[~too_small] = mid[~too_small]
    g = 0.5 * (lo + hi)
    resid = np.max(np.abs(mp_tail(law, g) - target))
    if resid > 1e-12:
        raise SolverError(f"quantile bisection residual {resid:.3e} above 1e-12")
    g.setflags(write=False)
    return ClassicalLocations(g=g)


def rigidity_report(spec: Spectrum, locs: ClassicalLocations, epsilon: float) -> RigidityReport:
    """Compare |mu_k - g_k| against khat^{-1/3} n^{-2/3+eps}, khat = min(k, n+1-k)."""
    mu = spec.values
    g = locs.g
    if mu.shape != g.shape:
        raise DimensionError(f"length mismatch: {mu.shape} eigenvalues vs {g.shape} locations")
    n = len(mu)
    k = np.arange(1, n + 1)
    khat = np.minimum(k, n + 1 - k)
    bound = khat ** (-1.0 / 3.0) * n ** (-2.0 / 3.0 + epsilon)
    ratios = np.abs(mu - g) / bound
    return RigidityReport(max_ratio=float(ratios.max()), violations=int((ratios > 1.0).sum()))


def spectrum_to_csv(spec: Spectrum, fh: IO[str]) -> None:
    fh.write("index,eigenvalue\n")
    for i, v in enumerate(spec.values, start=1):
        fh.write(f"{i},{v:.17g}\n")


def rigidity_to_json(report: RigidityReport) -> str:
    return json.dumps(
        {"max_ratio": float(f"{report.max_ratio:.17g}"), "violations": report.violations}
    )
