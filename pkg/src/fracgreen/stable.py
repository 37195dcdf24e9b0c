"""Stable densities: the symmetric family g and the one-sided extremal family w.

g(y; alpha, sigma) is the inverse Fourier transform of exp(-a sigma |p|^alpha).
It is scale-free up to sigma_eff = a * sigma:

    g(y) = sigma_eff^{-d/alpha} * F_d(|y| / sigma_eff^{1/alpha})

and the profile F_d is computed by radial quadrature (cosine transform in
d = 1, Bessel kernels for d >= 2), a Gaussian closed form for alpha = 2, and
a Hankel-transform power series in u^{-alpha} in the far field.

w(x; beta, 1) is the fully skewed density with Laplace exponent s^beta.  Its
Fourier integral is oscillatory; for beta <= 1/2, or x away from the origin,
the integration ray p -> -i q turns it into the absolutely convergent

    w(x) = (1/pi) Int_0^inf exp(-q x - cos(pi b) q^b) sin(sin(pi b) q^b) dq,

while the remaining corner (beta > 1/2 at small x) is handled by a Filon-type
cosine/sine rule after splitting the phase.  Far out, the power series in
x^{-beta} (convergent for beta < 1) takes over.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import gammaln, j0, jv, rgamma

from .errors import DomainError, PrecisionError

__all__ = [
    "SymStableParams",
    "OneSidedParams",
    "AsymptoticOracle",
    "g_sym",
    "g_sym_grid",
    "w_onesided",
    "g_near_field_oracle",
    "g_far_field_oracle_d1",
    "w_far_field_oracle",
]

# switch points between quadrature and the power-series branches
_G_FAR_U = 60.0
_W_SERIES_X = 500.0
_W_ROTATED_MIN_X = 2.0


def _sin_snapped(x: float) -> float:
    """sin with values within 1e-10 of zero snapped to exact zero.

    The w power series drops every term whose sin(k pi beta) vanishes; for
    rational beta that zero must be exact or the convergence tests misfire.
    """
    s = math.sin(x)
    return 0.0 if abs(s) < 1e-10 else s


@dataclass(frozen=True)
class SymStableParams:
    """Stability alpha, scale sigma, diffusivity a, and dimension."""

    alpha: float
    sigma: float = 1.0
    a: float = 1.0
    dim: int = 1

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise DomainError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not (self.sigma > 0.0):
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if not (self.a > 0.0):
            raise DomainError(f"a must be positive, got {self.a}")
        if self.dim < 1:
            raise DomainError(f"dim must be >= 1, got {self.dim}")

    @property
    def sigma_eff(self) -> float:
        return self.a * self.sigma


@dataclass(frozen=True)
class OneSidedParams:
    beta: float

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise DomainError(f"beta must lie in (0, 1), got {self.beta}")


@dataclass(frozen=True)
class AsymptoticOracle:
    """Leading-term law value(x) ~ leading_coefficient * x^exponent."""

    kind: str
    leading_coefficient: float
    exponent: float

    def __post_init__(self):
        if self.kind not in ("near_field", "far_field_d1"):
            raise DomainError(f"unknown oracle kind {self.kind!r}")
        if self.kind == "far_field_d1" and self.exponent >= -1.0:
            raise DomainError("far-field exponent must be below -1")

    def evaluate(self, x: float) -> float:
        return self.leading_coefficient * x ** self.exponent


# ---------------------------------------------------------------------------
# one-sided density w
# ---------------------------------------------------------------------------

def _w_series(beta, x, tol=1e-14):
    """Convergent power series w(x) = (1/pi) sum_k (-1)^{k+1} G(1+kb) sin(k pi b)/k! x^{-1-kb}.

    Returns (value, error_bound); the bound is the first omitted term.
    """
    s = 0.0
    prev = math.inf
    k = 1
    while True:
        t = ((-1) ** (k + 1) * math.exp(gammaln(1 + k * beta) - gammaln(k + 1))
             * _sin_snapped(k * math.pi * beta) * x ** (-1 - k * beta))
        if t != 0.0:
            if abs(t) > abs(prev):
                return s / math.pi, abs(t) / math.pi
            if abs(t) < tol * max(abs(s + t), 1e-300):
                return (s + t) / math.pi, abs(t) / math.pi
            s += t
            prev = t
        k += 1
        if k > 400:
            return s / math.pi, abs(prev) / math.pi


def _w_rotated(beta, x, tol):
    """Rotated-ray integral; absolutely convergent, no oscillation in p."""
    cb = math.cos(math.pi * beta)
    sb = math.sin(math.pi * beta)

    def f(q):
        return np.exp(-q * x - cb * q ** beta) * np.sin(sb * q ** beta)

    Q = 45.0 / x
    if cb < 0.0:
        Q = max(Q, (2.0 * abs(cb) / x) ** (1.0 / (1.0 - beta)) + 45.0 / x)
    with warnings.catch_warnings():
        # deep in the underflow region the requested tolerance sits below
        # the roundoff floor; the caller clamps those values anyway
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(f, 0.0, Q, limit=500, epsabs=0.1 * tol, epsrel=1e-12)
    return val / math.pi, abs(err) / math.pi


def _w_filon(beta, x, tol):
    """Cosine/sine split of the Fourier integral (QUADPACK Filon-type rules)."""
    c1 = math.cos(math.pi * beta / 2.0)
    s1 = math.sin(math.pi * beta / 2.0)
    P = (45.0 / c1) ** (1.0 / beta)
    fc = lambda p: np.exp(-c1 * p ** beta) * np.cos(s1 * p ** beta)
    fs = lambda p: np.exp(-c1 * p ** beta) * np.sin(s1 * p ** beta)
    vc, ec = quad(fc, 0.0, P, weight="cos", wvar=x, limit=800, epsabs=0.05 * tol)
    vs, es = quad(fs, 0.0, P, weight="sin", wvar=x, limit=800, epsabs=0.05 * tol)
    return (vc + vs) / math.pi, (abs(ec) + abs(es)) / math.pi


def w_onesided(params: OneSidedParams, x: float, tol: float = 1e-10) -> float:
    """Density of the one-sided (fully skewed) stable law; zero for x < 0."""
    beta = params.beta
    if not np.isfinite(x):
        raise DomainError(f"x must be finite, got {x}")
    if x <= 0.0:
        return 0.0
    # left tail ~ exp(-B x^{-b/(1-b)}): below the double-precision floor no
    # quadrature can see the value; report the underflowed zero directly
    B = (1.0 - beta) * beta ** (beta / (1.0 - beta))
    if B * x ** (-beta / (1.0 - beta)) > 600.0:
        return 0.0
    if x >= _W_SERIES_X:
        val, err = _w_series(beta, x)
        if err > tol * max(1.0, abs(val)):
            raise PrecisionError("w series bound too large", best_value=val,
                                 error_estimate=err)
        return val
    if beta <= 0.5 or x >= _W_ROTATED_MIN_X:
        val, err = _w_rotated(beta, x, tol)
    else:
        val, err = _w_filon(beta, x, tol)
    if val < -tol:
        raise PrecisionError(f"w({x}; {beta}) evaluated to {val} < -tol",
                             best_value=val, error_estimate=err)
    return max(val, 0.0)


def w_far_field_oracle(beta: float, x_ref: float = 150.0) -> AsymptoticOracle:
    """Tail law w(x) ~ A x^{-1-beta}, with A measured at x_ref (not asserted)."""
    params = OneSidedParams(beta)
    a_meas = w_onesided(params, x_ref) * x_ref ** (1.0 + beta)
    return AsymptoticOracle("far_field_d1", a_meas, -1.0 - beta)


def w_tail_mass(beta: float, x_cut: float) -> float:
    """Integral of w over [x_cut, inf), term-by-term from the power series."""
    OneSidedParams(beta)
    if x_cut < 30.0:
        raise DomainError("series tail mass needs x_cut >= 30")
    s = 0.0
    prev = math.inf
    k = 1
    while True:
        t = ((-1) ** (k + 1) * math.exp(gammaln(1 + k * beta) - gammaln(k + 1))
             * _sin_snapped(k * math.pi * beta) * x_cut ** (-k * beta) / (k * beta))
        if t != 0.0:
            if abs(t) > abs(prev):
                break
            s += t
            prev = t
            if abs(t) < 1e-16 * max(abs(s), 1e-300):
                break
        k += 1
        if k > 400:
            break
    return s / math.pi


# ---------------------------------------------------------------------------
# symmetric density g
# ---------------------------------------------------------------------------

def _surface_area(d: int) -> float:
    """|S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)."""
    return 2.0 * math.pi ** (d / 2.0) * rgamma(d / 2.0)


def _g_profile_zero(alpha: float, d: int) -> float:
    """F_d(0) = |S^{d-1}| Gamma(d/alpha) / ((2 pi)^d alpha)."""
    return _surface_area(d) / (2.0 * math.pi) ** d * math.gamma(d / alpha) / alpha


def _g_profile_quad(alpha, d, u, tol):
    """Radial quadrature of the scale-free profile F_d(u)."""
    if u == 0.0:
        return _g_profile_zero(alpha, d), 0.0
    P = 50.0 ** (1.0 / alpha)
    if d == 1:
        f = lambda q: np.exp(-q ** alpha)
        val, err = quad(f, 0.0, P, weight="cos", wvar=u, limit=800,
                        epsabs=0.05 * tol)
        return val / math.pi, abs(err) / math.pi
    if d == 3:
        f = lambda q: q * np.exp(-q ** alpha)
        val, err = quad(f, 0.0, P, weight="sin", wvar=u, limit=800,
                        epsabs=0.05 * tol)
        return val / (2.0 * math.pi ** 2 * u), abs(err) / (2.0 * math.pi ** 2 * u)
    # general d via the Hankel kernel; panel edges follow the oscillation
    nu = d / 2.0 - 1.0
    bessel = j0 if d == 2 else (lambda t: jv(nu, t))

    def f(q):
        return bessel(q * u) * q ** (d / 2.0) * np.exp(-q ** alpha)

    npan = int(max(24, min(3000, 4 * P * u / math.pi)))
    edges = np.linspace(0.0, P, npan + 1)
    from ._quad import adaptive_panels
    val, err, _ = adaptive_panels(f, edges, tol_abs=0.1 * tol, tol_rel=1e-10, n=8)
    pref = (2.0 * math.pi) ** (-d / 2.0) * u ** (1.0 - d / 2.0)
    return pref * val, pref * abs(err)


def _g_far_series(alpha, d, u):
    """Hankel-transform far-field series of F_d in powers of u^{-alpha}.

    F_d(u) = (2 pi)^{-d/2} sum_{k>=1} (-1)^k/k! 2^{alpha k + d/2}
             Gamma((alpha k + d)/2) / Gamma(-alpha k / 2) u^{-d - alpha k}.

    Returns (value, error_bound ~ first omitted term).  Empty for alpha = 2
    (the Gaussian has no algebraic tail; every coefficient vanishes).
    """
    s = 0.0
    prev = math.inf
    k = 1
    while True:
        rg = rgamma(-alpha * k / 2.0)
        t = ((-1) ** k / math.gamma(k + 1) * 2.0 ** (alpha * k + d / 2.0)
             * math.gamma((alpha * k + d) / 2.0) * rg * u ** (-d - alpha * k))
        if t != 0.0:
            if abs(t) > abs(prev):
                return s * (2.0 * math.pi) ** (-d / 2.0), abs(t)
            s += t
            prev = t
            if abs(t) < 1e-15 * max(abs(s), 1e-300) and k > 3:
                return s * (2.0 * math.pi) ** (-d / 2.0), abs(t)
        k += 1
        if k > 200:
            return s * (2.0 * math.pi) ** (-d / 2.0), abs(prev)


def _g_profile(alpha, d, u, tol):
    """Scale-free profile F_d(u) with quadrature/series dispatch."""
    if alpha == 2.0:
        return (4.0 * math.pi) ** (-d / 2.0) * math.exp(-u * u / 4.0), 0.0
    if u >= _G_FAR_U:
        return _g_far_series(alpha, d, u)
    return _g_profile_quad(alpha, d, u, tol)


def _norm_y(y) -> float:
    arr = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(~np.isfinite(arr)):
        raise DomainError("y must be finite")
    return float(np.linalg.norm(arr))


def g_sym(params: SymStableParams, y, tol: float = 1e-10) -> float:
    """Symmetric stable density at a point y in R^d."""
    u_abs = _norm_y(y)
    se = params.sigma_eff
    scale = se ** (-params.dim / params.alpha)
    u = u_abs / se ** (1.0 / params.alpha)
    val, err = _g_profile(params.alpha, params.dim, u, tol / max(scale, 1.0))
    out = scale * val
    if out < -tol:
        raise PrecisionError(f"g_sym({y}) evaluated to {out} < -tol",
                             best_value=out, error_estimate=scale * err)
    return max(out, 0.0)


def g_sym_grid(params: SymStableParams, ys, tol: float = 1e-10):
    """g on a set of points, with the negative-clamp rate checked (<= 1%)."""
    ys = np.asarray(ys, dtype=float)
    flat = ys.reshape(-1) if params.dim == 1 else ys.reshape(-1, params.dim)
    vals = np.empty(len(flat))
    clamped = 0
    for i, y in enumerate(flat):
        se = params.sigma_eff
        scale = se ** (-params.dim / params.alpha)
        u = _norm_y(y) / se ** (1.0 / params.alpha)
        v, _ = _g_profile(params.alpha, params.dim, u, tol / max(scale, 1.0))
        v *= scale
        if v < 0.0:
            if v < -tol:
                raise PrecisionError(f"g_sym at {y} gave {v} < -tol", best_value=v)
            clamped += 1
            v = 0.0
        vals[i] = v
    if clamped > 0.01 * len(flat):
        raise PrecisionError(
            f"negative-clamp rate {clamped}/{len(flat)} exceeds 1%",
            diagnostics={"clamped": clamped, "total": len(flat)})
    return vals.reshape(ys.shape[:1] if params.dim > 1 else ys.shape)


# ---------------------------------------------------------------------------
# asymptotic oracles for g
# ---------------------------------------------------------------------------

def g_near_field_oracle(params: SymStableParams, y, terms: int) -> float:
    """Short-range Taylor partial sum, valid for |y|/sigma_eff^{1/alpha} <= 0.3.

    Coefficients a_k = Gamma((2k+d)/alpha) B(k+1/2, (d-1)/2) / alpha with the
    surface prefactor |S^{d-2}| / (2 pi sigma_eff^{1/alpha})^d.  In d = 1 the
    angular Beta factor degenerates; the exact Taylor expansion of the cosine
    transform is used instead (same structure, Beta factor absent, |S^0| = 2).
    """
    if terms < 1:
        raise DomainError("terms must be >= 1")
    se = params.sigma_eff
    alpha, d = params.alpha, params.dim
    u = _norm_y(y) / se ** (1.0 / alpha)
    if u > 0.3:
        raise DomainError(f"near-field oracle valid for u <= 0.3, got u = {u}")
    if d == 1:
        pref = 2.0 / (2.0 * math.pi * se ** (1.0 / alpha))
        a_k = lambda k: math.gamma((2 * k + 1) / alpha) / alpha
    else:
        pref = _surface_area(d - 1) / (2.0 * math.pi * se ** (1.0 / alpha)) ** d
        a_k = lambda k: (math.gamma((2 * k + d) / alpha) / alpha
                         * math.gamma(k + 0.5) * math.gamma((d - 1) / 2.0)
                         / math.gamma(k + 0.5 + (d - 1) / 2.0))
    s = 0.0
    for k in range(terms):
        s += (-1) ** k / math.gamma(2 * k + 1) * a_k(k) * u ** (2 * k)
    return pref * s


def g_radial_tail_mass(params: SymStableParams, y_cut: float) -> float:
    """Integral of g over |y| >= y_cut, term-by-term from the far-field series."""
    alpha, d = params.alpha, params.dim
    if alpha == 2.0:
        raise DomainError("Gaussian tail mass is exponentially small; not served here")
    se = params.sigma_eff
    u_cut = y_cut / se ** (1.0 / alpha)
    if u_cut < _G_FAR_U:
        raise DomainError(f"series tail mass needs |y|/sigma_eff^(1/alpha) >= {_G_FAR_U}")
    surf = _surface_area(d)
    s = 0.0
    prev = math.inf
    k = 1
    while True:
        rg = rgamma(-alpha * k / 2.0)
        t = ((-1) ** k / math.gamma(k + 1) * 2.0 ** (alpha * k + d / 2.0)
             * math.gamma((alpha * k + d) / 2.0) * rg * u_cut ** (-alpha * k)
             / (alpha * k))
        if t != 0.0:
            if abs(t) > abs(prev):
                break
            s += t
            prev = t
            if abs(t) < 1e-16 * max(abs(s), 1e-300):
                break
        k += 1
        if k > 200:
            break
    return surf * (2.0 * math.pi) ** (-d / 2.0) * s


def g_far_field_oracle_d1(params: SymStableParams, y) -> float:
    """One-term tail law (1/pi) Gamma(1+alpha) sin(pi alpha/2) a sigma |y|^{-1-alpha}."""
    if params.dim != 1:
        raise DomainError("far-field oracle is one-dimensional")
    if params.alpha >= 2.0:
        raise DomainError("no power tail at alpha = 2")
    u = _norm_y(y) / params.sigma_eff ** (1.0 / params.alpha)
    if u < 10.0:
        raise DomainError(f"far-field oracle valid for u >= 10, got u = {u}")
    ay = abs(_norm_y(y))
    return (math.gamma(1.0 + params.alpha) * math.sin(math.pi * params.alpha / 2.0)
            / math.pi * params.sigma_eff * ay ** (-1.0 - params.alpha))
