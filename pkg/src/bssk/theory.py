"""Closed-form limiting constants for the bipartite spherical SK model.

Everything here is deterministic arithmetic in the model parameters
(beta, r1, r2, w4): the critical temperature, the limiting free energy in
both regimes, the Gaussian fluctuation constants of the high-temperature
phase, the Tracy-Widom scale of the low-temperature phase, the
Auffinger-Chen variational value, and the linear-statistics CLT constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from .errors import CriticalRegimeError, EvaluationError, ParameterError, RegimeError
from .spectra import MPLaw, mp_law, mp_stieltjes_edge

CRITICAL_BAND = 1e-12

HIGH = "high"
LOW = "low"
CRITICAL = "critical"


@dataclass(frozen=True)
class RegimeConstants:
    """All closed-form predictions for one parameter point.

    z_c, mu, sigma2 are populated in the high regime only; a_scale in the
    low regime only. Every populated field is symmetric in r1 <-> r2.
    """

    beta: float
    r1: float
    r2: float
    w4: float
    beta_c: float
    regime: str
    s_param: float
    f_limit: float
    z_c: float | None = None
    mu: float | None = None
    sigma2: float | None = None
    a_scale: float | None = None


@dataclass(frozen=True)
class CltConstants:
    """Mean/variance of the log linear statistic and its building blocks."""

    big_m: float
    big_v: float
    m_goe: float
    v_goe: float
    tau0: float
    tau1: float
    tau2: float


@dataclass(frozen=True)
class VariationalPoint:
    value: float
    a: float
    b: float


def _check_ratios(r1: float, r2: float) -> tuple[float, float]:
    if not (r1 > 0.0 and r2 > 0.0):
        raise ParameterError(f"ratios must be positive, got r1={r1}, r2={r2}")
    if abs(r1 + r2 - 1.0) > 1e-12:
        raise ParameterError(f"ratios must sum to 1, got {r1 + r2!r}")
    return (r1, r2) if r1 >= r2 else (r2, r1)


def beta_critical(r1: float, r2: float) -> float:
    return (r1 * r2) ** -0.25


def _f_low(beta: float, r1: float, r2: float) -> float:
    s1, s2 = math.sqrt(r1), math.sqrt(r2)
    S = (s1 - s2) ** 2 + 4.0 * r1 * r2 * beta**2
    rS = math.sqrt(S)
    return (
        ((s1 + s2) * rS - s1 * s2 - 1.0) / 2.0
        - (r1 - r2) / 4.0 * math.log((rS + s1 - s2) / (rS - s1 + s2))
        - r2 / 4.0 * math.log(r1)
        - r1 / 4.0 * math.log(r2)
        - 0.5 * math.log(beta)
    )


def regime_constants(beta: float, r1: float, r2: float, w4: float = 3.0) -> RegimeConstants:
    """Classify the regime and evaluate every applicable closed form.

    Within a relative band of 1e-12 around beta_c the point is reported as
    critical and the regime-specific fields stay absent.
    """
    if beta <= 0.0:
        raise ParameterError(f"beta must be positive, got {beta}")
    r1, r2 = _check_ratios(r1, r2)
    bc = beta_critical(r1, r2)
    S = (math.sqrt(r1) - math.sqrt(r2)) ** 2 + 4.0 * r1 * r2 * beta**2
    if abs(beta - bc) <= CRITICAL_BAND * bc:
        return RegimeConstants(
            beta=beta, r1=r1, r2=r2, w4=w4, beta_c=bc, regime=CRITICAL,
            s_param=S, f_limit=r1 * r2 * beta**2 / 2.0,
        )
    if beta < bc:
        q = r1 * r2 * beta**4
        z_c = (1.0 + beta**2 + q) / (r1 * beta**2)
        mu = 0.25 * math.log1p(-q) - math.log(2.0) - (w4 - 3.0) * q / 4.0
        sigma2 = -0.5 * math.log1p(-q) + (w4 - 3.0) * q / 4.0
        return RegimeConstants(
            beta=beta, r1=r1, r2=r2, w4=w4, beta_c=bc, regime=HIGH,
            s_param=S, f_limit=r1 * r2 * beta**2 / 2.0,
            z_c=z_c, mu=mu, sigma2=sigma2,
        )
    a_scale = (
        (math.sqrt(r1) + math.sqrt(r2)) ** (1.0 / 3.0)
        * (math.sqrt(S) - math.sqrt(r1) - math.sqrt(r2))
        / (4.0 * (r1 * r2) ** (1.0 / 6.0))
    )
    return RegimeConstants(
        beta=beta, r1=r1, r2=r2, w4=w4, beta_c=bc, regime=LOW,
        s_param=S, f_limit=_f_low(beta, r1, r2), a_scale=a_scale,
    )


def variational_objective(a, b, beta: float, r1: float, r2: float):
    """Auffinger-Chen two-parameter objective P(a, b) on [0,1)^2."""
    return (
        r1 / 2.0 * (a / (1.0 - a) + np.log1p(-a))
        + r2 / 2.0 * (b / (1.0 - b) + np.log1p(-b))
        + r1 * r2 * beta**2 / 2.0 * (1.0 - a * b)
    )


def auffinger_chen_value(beta: float, r1: float, r2: float) -> VariationalPoint:
    """Closed-form minimizer of P over [0,1)^2 and its value.

    Below beta_c the minimum sits at the corner (0,0); above it the unique
    interior stationary point takes over. The returned value coincides with
    the limiting free energy.
    """
    if beta <= 0.0:
        raise ParameterError(f"beta must be positive, got {beta}")
    r1, r2 = _check_ratios(r1, r2)
    bc = beta_critical(r1, r2)
    if abs(beta - bc) <= CRITICAL_BAND * bc:
        raise CriticalRegimeError(f"beta = {beta} is inside the critical band at {bc}")
    if beta < bc:
        a = b = 0.0
    else:
        s1, s2 = math.sqrt(r1), math.sqrt(r2)
        rS = math.sqrt((s1 - s2) ** 2 + 4.0 * r1 * r2 * beta**2)
        a = 1.0 - (rS - s1 + s2) / (2.0 * s1 * r2 * beta**2)
        b = 1.0 - (rS + s1 - s2) / (2.0 * r1 * s2 * beta**2)
    return VariationalPoint(value=float(variational_objective(a, b, beta, r1, r2)), a=a, b=b)


def auffinger_chen_grid_value(
    beta: float, r1: float, r2: float, grid: int = 400
) -> VariationalPoint:
    """Independent oracle: dense grid search over [0,1)^2 plus local refinement."""
    r1, r2 = _check_ratios(r1, r2)
    pts = np.linspace(0.0, 0.999, grid)
    A, B = np.meshgrid(pts, pts, indexing="ij")
    vals = variational_objective(A, B, beta, r1, r2)
    i, j = np.unravel_index(np.argmin(vals), vals.shape)

    def fun(x):
        return variational_objective(x[0], x[1], beta, r1, r2)

    def jac(x):
        a, b = x
        da = r1 / 2.0 * a / (1.0 - a) ** 2 - r1 * r2 * beta**2 / 2.0 * b
        db = r2 / 2.0 * b / (1.0 - b) ** 2 - r1 * r2 * beta**2 / 2.0 * a
        return np.array([da, db])

    res = optimize.minimize(
        fun,
        x0=np.array([pts[i], pts[j]]),
        jac=jac,
        method="L-BFGS-B",
        bounds=[(0.0, 1.0 - 1e-9)] * 2,
        options={"ftol": 1e-16, "gtol": 1e-13, "maxiter": 500},
    )
    return VariationalPoint(value=float(res.fun), a=float(res.x[0]), b=float(res.x[1]))


def ssk_free_energy(beta: float) -> float:
    """Limiting free energy of the one-species spherical SK model."""
    if beta <= 0.0:
        raise ParameterError(f"beta must be positive, got {beta}")
    if abs(beta - 0.5) <= CRITICAL_BAND * 0.5:
        raise CriticalRegimeError("beta = 1/2 is the SSK critical point")
    if beta < 0.5:
        return beta**2
    return 2.0 * beta - 0.75 - 0.5 * math.log(2.0 * beta)


def b_critical(alpha: float, law: MPLaw) -> float:
    """Critical coupling B_c = sqrt(d+ s(d+)^2 + 2 alpha s(d+))."""
    if alpha < 0.0:
        raise ParameterError(f"alpha must be nonnegative, got {alpha}")
    s_edge = mp_stieltjes_edge(law)
    return math.sqrt(law.d_plus * s_edge**2 + 2.0 * alpha * s_edge)


def clt_log_constants(beta: float, r1: float, r2: float, w4: float = 3.0) -> CltConstants:
    """CLT constants for the linear statistic with phi(x) = log(z_c - x).

    Valid below beta_c only, where z_c lies outside the support. With
    q = r1 r2 beta^4: M_GOE = log(1-q)/2, V_GOE = -2 log(1-q),
    tau1 = -sqrt(r1 r2) beta^2, tau2 = -q/2.
    """
    r1, r2 = _check_ratios(r1, r2)
    bc = beta_critical(r1, r2)
    if not beta < bc * (1.0 - CRITICAL_BAND):
        raise RegimeError(f"log-statistic constants need beta < beta_c = {bc}, got {beta}")
    q = r1 * r2 * beta**4
    law = mp_law(r1, r2)
    rc = regime_constants(beta, r1, r2, w4)
    # tau0 keeps the affine-map shift: Phi = log((d+-d-)/4) + log(ztilde - y)
    half = 0.5 * (law.d_plus + law.d_minus)
    Rzc = math.sqrt((rc.z_c - law.d_minus) * (rc.z_c - law.d_plus))
    tau0 = math.log((rc.z_c - half + Rzc) / 2.0)
    m_goe = 0.5 * math.log1p(-q)
    v_goe = -2.0 * math.log1p(-q)
    tau1 = -math.sqrt(r1 * r2) * beta**2
    tau2 = -q / 2.0
    return CltConstants(
        big_m=m_goe - (w4 - 3.0) * tau2,
        big_v=v_goe + (w4 - 3.0) * tau1**2,
        m_goe=m_goe,
        v_goe=v_goe,
        tau0=tau0,
        tau1=tau1,
        tau2=tau2,
    )


def chebyshev_tau(phi: Callable, ell: int, nodes: int = 1024) -> float:
    """tau_ell(Phi) = (1/2pi) int_{-pi}^{pi} Phi(2 cos t) cos(ell t) dt.

    Composite Gauss-Legendre with at least 512 nodes; absolute error is
    below 1e-10 for Phi analytic near [-2, 2].
    """
    if ell < 0:
        raise ParameterError(f"ell must be nonnegative, got {ell}")
    nodes = max(nodes, 512)
    panels = 16
    per = int(np.ceil(nodes / panels))
    xg, wg = np.polynomial.legendre.leggauss(per)
    edges = np.linspace(-math.pi, math.pi, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    theta = (mids[:, None] + half * xg[None, :]).ravel()
    weights = np.tile(half * wg, panels)
    vals = np.asarray(phi(2.0 * np.cos(theta)), dtype=np.float64)
    if not np.all(np.isfinite(vals)):
        raise EvaluationError("phi produced non-finite values on [-2, 2]")
    return float(np.sum(weights * vals * np.cos(ell * theta)) / (2.0 * math.pi))


def clt_general(
    phi: Callable, law: MPLaw, w4: float = 3.0, cheb_nodes: int = 400
) -> CltConstants:
    """CLT constants for a general analytic test function on [d-, d+].

    phi is pulled back to [-2, 2] through the affine map
    x = (d+ - d-)/4 * y + (d+ + d-)/2; V_GOE uses tensor Gauss-Chebyshev
    quadrature of the squared divided difference, with the diagonal handled
    by a central-difference derivative at the midpoint.
    """
    quarter = (law.d_plus - law.d_minus) / 4.0
    center = (law.d_plus + law.d_minus) / 2.0

    def Phi(y):
        return phi(quarter * np.asarray(y) + center)

    taus = [chebyshev_tau(Phi, ell) for ell in range(3)]
    edge_vals = np.asarray(Phi(np.array([-2.0, 2.0])), dtype=np.float64)
    if not np.all(np.isfinite(edge_vals)):
        raise EvaluationError("phi is singular at a support edge")
    m_goe = float(edge_vals.sum() / 4.0 - taus[0] / 2.0)

    m = cheb_nodes
    theta = (2.0 * np.arange(1, m + 1) - 1.0) * math.pi / (2.0 * m)
    x = 2.0 * np.cos(theta)
    fx = np.asarray(Phi(x), dtype=np.float64)
    if not np.all(np.isfinite(fx)):
        raise EvaluationError("phi produced non-finite values on the support")
    diff = fx[:, None] - fx[None, :]
    dx = x[:, None] - x[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        dd = diff / dx
    close = np.abs(dx) < 1e-6
    if close.any():
        h = 1e-7
        mid = (x[:, None] + x[None, :]) / 2.0
        deriv = (Phi(mid[close] + h) - Phi(mid[close] - h)) / (2.0 * h)
        dd[close] = deriv
    kernel = 4.0 - x[:, None] * x[None, :]
    v_goe = float((math.pi / m) ** 2 * np.sum(dd**2 * kernel) / (2.0 * math.pi**2))
    return CltConstants(
        big_m=m_goe - (w4 - 3.0) * taus[2],
        big_v=v_goe + (w4 - 3.0) * taus[1] ** 2,
        m_goe=m_goe,
        v_goe=v_goe,
        tau0=taus[0],
        tau1=taus[1],
        tau2=taus[2],
    )
