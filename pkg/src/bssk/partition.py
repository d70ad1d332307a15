"""Finite-size partition function three ways.

* direct Monte Carlo over the two spheres,
* numerical contour quadrature of the random double integral Q_n,
* assembled asymptotic predictions.

The double integral

    Q_n = - int int e^{n B_n (z1+z2)} z1^{-n alpha_n}
              prod_i (4 z1 z2 - mu_i)^{-1/2} dz2 dz1

over vertical lines through the saddle is evaluated after two exact contour
reductions. Substituting p = z1 z2 and integrating out z1 with Schlaefli's
loop representation of the modified Bessel function turns the double
integral into a single contour integral,

    Q_n = -4 pi i int_W w^{1 - nu} I_nu(2 n B_n w) prod_i (4 w^2 - mu_i)^{-1/2} dw,

with nu = n alpha_n and W the vertical line through w0 = sqrt(gamma1 gamma2).
On W the factors 4 w^2 - mu_i keep a fixed-sign imaginary part, so the
principal square root never meets a branch cut, and |I_nu| stays of order
e^{2 n B_n w0}. The surviving tails decay only algebraically with an
oscillation of known half-period pi / (2 n B_n); iterated averaging of the
partial sums over half-period panels (an Euler transform) resums them to
near machine precision. The truncated-box tensor quadrature of the raw
double integral is kept as a slow cross-check oracle.

Connection to the partition function (N1 >= N2, N = N1 + N2):

    Z = Q(N2, (N1-N2)/(2 N2), N1 beta / sqrt(N2 N))
        * 2^{N2} (pi^2 N / (N1^2 N2 beta^2))^{(N-4)/4} / (|S^{N1-1}| |S^{N2-1}|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .disorder import DisorderMatrix, stream_rng
from .errors import ParameterError, QuadratureError, RareEventError, RegimeError
from .saddle import SaddleInput, solve_gamma
from .spectra import Spectrum, mp_law, mp_log_transform
from .theory import CRITICAL, HIGH, regime_constants

SPHERE_MC_CHUNK = 1 << 16


@dataclass(frozen=True)
class QuadratureSpec:
    """Contour quadrature controls.

    truncation: half-width of the densely sampled core of the contour, in
    units of the saddle abscissa w0. nodes_per_line: Gauss-Legendre nodes
    per panel. panels: oscillatory half-period panels summed beyond the core
    before the averaging acceleration is read off.
    """

    truncation: float = 4.0
    nodes_per_line: int = 64
    panels: int = 64

    def __post_init__(self):
        if not self.truncation > 0.0:
            raise ParameterError("truncation must be positive")
        if self.nodes_per_line < 64:
            raise ParameterError("need at least 64 nodes per line")
        if self.panels < 8:
            raise ParameterError("need at least 8 tail panels")


@dataclass(frozen=True)
class PartitionEstimate:
    value: float
    std_error: float | None
    method: str


def sphere_area_log(n: int) -> float:
    """log of the surface area of the unit sphere in R^n."""
    if n < 1:
        raise ParameterError(f"dimension must be >= 1, got {n}")
    return math.log(2.0) + 0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n)


def sphere_mc_partition(
    J: DisorderMatrix, beta: float, samples: int, seed: int
) -> PartitionEstimate:
    """Monte Carlo average of exp(beta <s, J t> / sqrt(N)) over the spheres.

    Uniform sphere points come from normalized Gaussian vectors. Samples are
    drawn in fixed-size chunks with per-chunk derived streams and combined by
    a fixed-order reduction, so the result does not depend on scheduling.
    Accumulation happens in shifted log space, which keeps the estimate
    finite for weight exponents up to about 700.
    """
    if samples < 1:
        raise ParameterError(f"need at least one sample, got {samples}")
    n1, n2 = J.rows, J.cols
    scale = beta / math.sqrt(n1 + n2)
    chunk_stats = []  # (max, sum e^{w-max}, sum e^{2(w-max)}) per chunk
    done = 0
    chunk_index = 0
    while done < samples:
        m = min(SPHERE_MC_CHUNK, samples - done)
        rng = stream_rng(seed, chunk_index)
        g = rng.standard_normal((m, n1))
        h = rng.standard_normal((m, n2))
        s = math.sqrt(n1) * g / np.linalg.norm(g, axis=1, keepdims=True)
        t = math.sqrt(n2) * h / np.linalg.norm(h, axis=1, keepdims=True)
        w = scale * np.einsum("ij,jk,ik->i", s, J.entries, t)
        mx = float(w.max())
        e = np.exp(w - mx)
        chunk_stats.append((mx, float(e.sum()), float((e * e).sum())))
        done += m
        chunk_index += 1
    gmax = max(c[0] for c in chunk_stats)
    s1 = float(np.add.reduce([c[1] * math.exp(c[0] - gmax) for c in chunk_stats]))
    s2 = float(np.add.reduce([c[2] * math.exp(2.0 * (c[0] - gmax)) for c in chunk_stats]))
    mean_shifted = s1 / samples
    value = math.exp(gmax) * mean_shifted
    if samples > 1:
        var_shifted = max(s2 / samples - mean_shifted**2, 0.0) * samples / (samples - 1)
        std_error = math.exp(gmax) * math.sqrt(var_shifted / samples)
    else:
        std_error = 0.0
    return PartitionEstimate(value=value, std_error=std_error, method="sphere_mc")


def _bessel_integrand(inp: SaddleInput, w0: float, y: np.ndarray) -> np.ndarray:
    """Scaled integrand w^{1-nu} I_nu(2 n B w) e^{-2 n B w0} prod (4w^2-mu)^{-1/2}."""
    n, nu = inp.n, inp.n * inp.alpha_n
    w = w0 + 1j * y
    x = 2.0 * n * inp.b_n * w
    vals = w ** (1.0 - nu) * special.ive(nu, x)  # ive = iv * exp(-Re x)
    for m in inp.eigenvalues:
        vals = vals / np.sqrt(4.0 * w**2 - m)
    return vals


def contour_q_numeric(inp: SaddleInput, quad: QuadratureSpec | None = None) -> float:
    """Q_n by contour quadrature through the saddle (intended for n <= 12).

    The contour passes through w0 = sqrt(gamma1 gamma2); a dense core covers
    the saddle peak (with extra refinement when gamma - mu_1 is small), and
    the algebraic oscillatory tails are resummed by iterated averaging of
    half-period partial sums. Raises QuadratureError when the acceleration
    has not converged, the conjugate-symmetry residual is too large, or the
    result is not positive.
    """
    quad = quad or QuadratureSpec()
    point = solve_gamma(inp)
    w0 = math.sqrt(point.gamma1 * point.gamma2)
    n = inp.n
    log_scale = 2.0 * n * inp.b_n * w0
    if log_scale + math.log(4.0 * math.pi) > 700.0:
        raise QuadratureError(f"value overflows double precision (exponent {log_scale:.1f})")
    xg, wg = np.polynomial.legendre.leggauss(quad.nodes_per_line)
    half_period = math.pi / (2.0 * n * inp.b_n)

    # Panel edges: log-refined near the saddle to resolve the (4w^2 - mu_1)^{-1/2}
    # spike when gamma sits close to mu_1, then uniform half-period panels.
    spike = (point.gamma - float(inp.eigenvalues[0])) / (8.0 * w0)
    edges = [0.0]
    step = max(min(spike, half_period), half_period * 1e-12)
    while step < half_period:
        edges.append(step)
        step *= 2.0
    edges.append(half_period)
    core_panels = max(int(math.ceil(quad.truncation * w0 / half_period)), 16)
    for k in range(1, core_panels + quad.panels + 1):
        edges.append((k + 1) * half_period)
    edges = np.asarray(edges)

    def panel_sums(sign: float) -> np.ndarray:
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1:] - edges[:-1])
        y = sign * (mid[:, None] + half[:, None] * xg[None, :])
        f = _bessel_integrand(inp, w0, y.ravel()).reshape(y.shape)
        return (half[:, None] * wg[None, :] * f).sum(axis=1)

    sums = panel_sums(1.0) + panel_sums(-1.0)
    ntail = quad.panels
    core = complex(np.sum(sums[:-ntail]))
    partial = np.cumsum(sums[-ntail:]) + core
    apexes = [complex(partial[0])]
    while len(partial) > 1:
        partial = 0.5 * (partial[:-1] + partial[1:])
        apexes.append(complex(partial[0]))
    total = apexes[-1]
    if len(apexes) > 1:
        delta = abs(apexes[-1] - apexes[-2])
        if delta > 1e-10 * max(abs(total), 1e-300):
            raise QuadratureError(
                f"oscillatory tail not converged (last averaging step {delta:.3e})"
            )
    if abs(total.imag) > 1e-8 * abs(total.real):
        raise QuadratureError(
            f"conjugate-symmetry residual {abs(total.imag):.3e} vs {abs(total.real):.3e}"
        )
    value = 4.0 * math.pi * total.real * math.exp(log_scale)
    if not value > 0.0:
        raise QuadratureError(f"contour quadrature returned a nonpositive value {value}")
    return value


def q_tensor_box(
    inp: SaddleInput, truncation: float = 120.0, points_per_period: int = 10
) -> float:
    """Cross-check oracle: raw tensor quadrature over the truncated box
    [gamma1 - iT, gamma1 + iT] x [gamma2 - iT, gamma2 + iT].

    Truncation error decays only algebraically, so this is useful for
    validating contour_q_numeric at moderate accuracy and n >= 4.
    """
    point = solve_gamma(inp)
    n, an, bn = inp.n, inp.alpha_n, inp.b_n
    mu = inp.eigenvalues
    period = 2.0 * math.pi / (n * bn)
    panels = max(int(truncation / period * points_per_period), 64)
    xg, wg = np.polynomial.legendre.leggauss(12)
    e = np.linspace(-truncation, truncation, panels + 1)
    halfw = 0.5 * (e[1] - e[0])
    y = ((0.5 * (e[:-1] + e[1:]))[:, None] + halfw * xg[None, :]).ravel()
    wts = np.tile(halfw * wg, panels)
    z1 = point.gamma1 + 1j * y
    z2 = point.gamma2 + 1j * y
    f1 = np.exp(1j * n * bn * y) * z1 ** (-n * an) * wts
    f2 = np.exp(1j * n * bn * y) * wts
    total = 0.0 + 0.0j
    block = 512
    for s in range(0, len(y), block):
        zz1 = z1[s : s + block][:, None]
        pr = np.ones((zz1.shape[0], len(z2)), dtype=complex)
        for m in mu:
            pr = pr / np.sqrt(4.0 * zz1 * z2[None, :] - m)
        total += np.sum(f1[s : s + block][:, None] * f2[None, :] * pr)
    return float(total.real * math.exp(n * bn * (point.gamma1 + point.gamma2)))


def assemble_free_energy(log_q: float, n1: int, n2: int, beta: float) -> float:
    """Free energy (1/N) log Z from log Q_n and the exact prefactor."""
    if n1 < n2 or n2 < 1:
        raise ParameterError(f"need n1 >= n2 >= 1, got ({n1}, {n2})")
    if beta <= 0.0:
        raise ParameterError(f"beta must be positive, got {beta}")
    N = n1 + n2
    return (
        log_q
        + n2 * math.log(2.0)
        + 0.25 * (N - 4) * math.log(math.pi**2 * N / (n1**2 * n2 * beta**2))
        - sphere_area_log(n1)
        - sphere_area_log(n2)
    ) / N


def finite_n_prediction(spec: Spectrum, beta: float, r1: float, r2: float) -> float:
    """Eigenvalue-based free-energy prediction at finite size.

    High regime: F(beta) - (1/2N)[sum log(z_c - mu_i) - N2 H(z_c)]
                 + (1/N)[log(1 - r1 r2 beta^4)/2 - log 2].
    Low regime:  F(beta) + (mu_1 - d+) r1 (sqrt(S) - sqrt(r1) - sqrt(r2))
                 / (4 (sqrt(r1) + sqrt(r2))).
    """
    rc = regime_constants(beta, r1, r2)
    if rc.regime == CRITICAL:
        raise RegimeError(f"no finite-size prediction inside the critical band at {rc.beta_c}")
    law = mp_law(r1, r2)
    mu = spec.values
    N = spec.n1 + spec.n2
    if rc.regime == HIGH:
        if rc.z_c <= mu[0]:
            raise RareEventError(f"z_c = {rc.z_c} does not exceed mu_1 = {mu[0]}")
        q = rc.r1 * rc.r2 * beta**4
        stat = float(np.sum(np.log(rc.z_c - mu)) - spec.n2 * mp_log_transform(law, rc.z_c))
        return rc.f_limit - stat / (2.0 * N) + (0.5 * math.log1p(-q) - math.log(2.0)) / N
    s1, s2 = math.sqrt(rc.r1), math.sqrt(rc.r2)
    slope = rc.r1 * (math.sqrt(rc.s_param) - s1 - s2) / (4.0 * (s1 + s2))
    return rc.f_limit + (float(mu[0]) - law.d_plus) * slope
