"""Deformed factorials, the generalized exponential and the moment weight.

The weight ``w_q`` on ``[0, inf)`` has moments ``n! q**(n(n+1)/2)``.  It is
evaluated two independent ways:

* ``weight_laplace`` -- the Laplace-transform form rewritten with ``u = e^v``
  as a Gaussian expectation
  ``w_q(t) = E[exp(-t e^(V - lam/2))]`` with ``V ~ N(lam, lam)``,
  integrated by Gauss-Hermite quadrature centred on the integrand's peak;
* ``weight_mellin_barnes`` -- the inverse Mellin transform of
  ``Gamma(s) q**(s(s-1)/2)`` along a vertical line, by the trapezoid rule.

All factorial-sized quantities are carried as natural logarithms.
"""

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import digamma, gammaln, lambertw, logsumexp, polygamma, roots_hermite

from .errors import AccuracyError, ConfigError, DegenerateCaseError, DomainError, RangeError
from .special import log_gamma

__all__ = [
    "ConditioningWarning",
    "QDeformation",
    "GeneralizedFactorial",
    "QuadratureConfig",
    "MomentReport",
    "as_deformation",
    "x_seq",
    "log_x_seq",
    "generalized_factorial",
    "eq_exp",
    "log_eq_exp",
    "weight_laplace",
    "log_weight_laplace",
    "weight_mellin_barnes",
    "log_weight_mellin_barnes",
    "moment_exact_log",
    "moment_numeric_log",
    "verify_moments",
]

_LOG_2PI = math.log(2.0 * math.pi)
# stopping rules never ask for less than this many ulps of the estimate
_ULP_FLOOR = 64 * np.finfo(float).eps


class ConditioningWarning(RuntimeWarning):
    """Emitted for 1 < q < 1.001, where ``ln q`` sits in denominators."""


@dataclass(frozen=True)
class QDeformation:
    """Deformation parameter ``q >= 1`` together with ``lam = ln q``.

    Build from ``q`` directly or with :meth:`from_lambda` when the squeeze
    exponent is the natural input (``q = e**2`` is ``from_lambda(2.0)``).
    """

    q: float
    lam: Optional[float] = None

    def __post_init__(self):
        q = float(self.q)
        if not math.isfinite(q) or q < 1.0:
            raise DomainError(f"q must be a finite number >= 1, got {self.q!r}")
        lam = math.log(q) if self.lam is None else float(self.lam)
        if lam < 0.0 or not math.isclose(math.exp(lam), q, rel_tol=1e-14):
            raise DomainError(f"lam={lam!r} is not ln(q) for q={q!r}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "lam", lam)
        if 1.0 < q < 1.001:
            warnings.warn(
                f"q={q!r} is close to 1; the q > 1 integral forms are ill-conditioned",
                ConditioningWarning,
                stacklevel=3,
            )

    @classmethod
    def from_lambda(cls, lam):
        return cls(math.exp(lam), lam)

    @property
    def is_degenerate(self):
        """True for the undeformed case q = 1."""
        return self.q == 1.0


def as_deformation(q):
    """Accept a QDeformation or a bare number."""
    return q if isinstance(q, QDeformation) else QDeformation(q)


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerance and node budget shared by all quadratures.

    ``max_log_t`` bounds how far the outer moment integral may push its upper
    cutoff in ``ln t`` before giving up with a RangeError.
    """

    rel_tol: float = 1e-8
    max_nodes: int = 2**16
    node_doubling_start: int = 32
    max_log_t: float = 400.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ConfigError(f"rel_tol must be positive, got {self.rel_tol!r}")
        if self.node_doubling_start < 8:
            raise ConfigError("node_doubling_start must be at least 8")
        if self.max_nodes < self.node_doubling_start:
            raise ConfigError("max_nodes must be >= node_doubling_start")
        if not self.max_log_t > 0:
            raise ConfigError("max_log_t must be positive")


DEFAULT_CONFIG = QuadratureConfig()


# -- deformed sequence -------------------------------------------------------


def _check_order(n):
    if int(n) != n or n < 0:
        raise DomainError(f"order must be a non-negative integer, got {n!r}")
    return int(n)


def x_seq(n, q):
    """Deformed integer ``x_n = n q**n``."""
    n = _check_order(n)
    q = as_deformation(q)
    if n == 0:
        return 0.0
    return math.exp(log_x_seq(n, q)) if n * q.lam > 700 else n * q.q**n


def log_x_seq(n, q):
    """``ln x_n = ln n + n lam`` for ``n >= 1``."""
    n = _check_order(n)
    if n == 0:
        raise DomainError("ln x_0 is undefined (x_0 = 0)")
    return math.log(n) + n * as_deformation(q).lam


@dataclass(frozen=True)
class GeneralizedFactorial:
    """Table of ``ln(x_n!)`` for ``n = 0..n_max``."""

    n_max: int
    log_values: tuple

    def __getitem__(self, n):
        return self.log_values[n]

    def as_array(self):
        return np.asarray(self.log_values)


def generalized_factorial(q, n_max):
    """Build ``ln(x_n!)`` by accumulating ``ln x_n`` (the defining product)."""
    q = as_deformation(q)
    n_max = _check_order(n_max)
    values = [0.0]
    for n in range(1, n_max + 1):
        values.append(values[-1] + math.log(n) + q.lam * n)
    return GeneralizedFactorial(n_max, tuple(values))


@lru_cache(maxsize=64)
def _log_factorials(lam, n_max):
    n = np.arange(n_max + 1)
    return gammaln(n + 1.0) + lam * n * (n + 1) / 2.0


def log_factorials(q, n_max):
    """Vector ``ln(x_n!)`` for ``n = 0..n_max`` from the closed form."""
    q = as_deformation(q)
    return _log_factorials(q.lam, int(n_max)).copy()


# -- generalized exponential -------------------------------------------------


def log_eq_exp(t, q, tol=1e-17, max_terms=100_000):
    """``ln E_q(t)`` where ``E_q(t) = sum t**n / x_n!``.

    Terms are accumulated in log form until the next one drops below
    ``tol`` times the running sum.
    """
    if not tol > 0:
        raise ConfigError(f"tol must be positive, got {tol!r}")
    t = float(t)
    if t < 0:
        raise DomainError("E_q is only provided for t >= 0")
    if t == 0:
        return 0.0
    q = as_deformation(q)
    log_t = math.log(t)
    log_tol = math.log(tol)
    log_sum = 0.0
    log_fact = 0.0
    for n in range(1, max_terms):
        log_fact += math.log(n) + q.lam * n
        log_term = n * log_t - log_fact
        log_sum = np.logaddexp(log_sum, log_term)
        # the ratio of successive terms t / x_{n+1} must also be below 1
        log_ratio = log_t - math.log(n + 1) - q.lam * (n + 1)
        if log_ratio < 0 and log_term + log_ratio < log_tol + log_sum:
            return float(log_sum)
    raise AccuracyError(f"E_q({t}) did not converge in {max_terms} terms", where={"t": t})


def eq_exp(t, q, tol=1e-17):
    """Generalized exponential ``E_q(t)`` for real ``t >= 0``."""
    return math.exp(log_eq_exp(t, q, tol))


# -- Laplace-form weight -----------------------------------------------------


@lru_cache(maxsize=32)
def _hermite_rule(n):
    x, w = roots_hermite(n)
    with np.errstate(divide="ignore"):
        return x, np.log(w)


def _require_deformed(q):
    q = as_deformation(q)
    if q.is_degenerate:
        raise DegenerateCaseError("q = 1: the weight is exp(-t); no integral representation applies")
    return q


def log_weight_laplace(t, q, cfg=DEFAULT_CONFIG):
    """Natural log of the weight from its Laplace-transform representation.

    With ``u = e^v`` the integral becomes
    ``(2 pi lam)^(-1/2) int exp(h(v)) dv`` with
    ``h(v) = -(t / sqrt q) e^v - (v - lam)^2 / (2 lam)``.  ``h`` is concave
    with its maximum at ``v* = lam - W(lam t sqrt q)`` (Lambert W) and
    curvature ``-(1 + W) / lam`` there, so Gauss-Hermite nodes are placed
    around ``v*`` at that scale.  Works for arrays of ``t``.
    """
    q = _require_deformed(q)
    lam = q.lam
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise DomainError("weight requires finite t >= 0")

    w = lambertw(lam * t * math.exp(lam / 2)).real
    v_star = lam - w
    scale = np.sqrt(2.0 * lam / (1.0 + w))
    a = t * math.exp(-lam / 2)

    def h(v):
        return -a[:, None] * np.exp(v) - (v - lam) ** 2 / (2 * lam)

    h_star = h(v_star[:, None])[:, 0]
    base = -0.5 * (_LOG_2PI + math.log(lam)) + np.log(scale) + h_star

    def estimate(n):
        x, log_w = _hermite_rule(n)
        v = v_star[:, None] + scale[:, None] * x[None, :]
        g = h(v) - h_star[:, None] + x[None, :] ** 2 + log_w[None, :]
        return base + logsumexp(g, axis=1)

    n = cfg.node_doubling_start
    prev = estimate(n)
    while True:
        n *= 2
        if n > cfg.max_nodes:
            raise AccuracyError(
                f"Laplace-form weight did not converge within {cfg.max_nodes} nodes",
                estimates=tuple(np.exp(prev[:1])),
                where={"t": float(t[0])},
            )
        cur = estimate(n)
        change = np.abs(cur - prev)
        # log-domain difference is the relative change of the weight
        if np.all(change < np.maximum(cfg.rel_tol, _ULP_FLOOR * (1 + np.abs(cur)))):
            break
        if n * 2 > cfg.max_nodes:
            worst = int(np.argmax(change))
            raise AccuracyError(
                f"Laplace-form weight did not converge within {cfg.max_nodes} nodes",
                estimates=(float(np.exp(prev[worst])), float(np.exp(cur[worst]))),
                where={"t": float(t[worst])},
            )
        prev = cur
    return float(cur[0]) if scalar else cur


def weight_laplace(t, q, cfg=DEFAULT_CONFIG):
    """Weight ``w_q(t)`` via the Gaussian-expectation form (q > 1)."""
    return np.exp(log_weight_laplace(t, q, cfg))


# -- Mellin-Barnes weight ----------------------------------------------------


def _saddle_abscissa(log_x, lam):
    """Minimiser over c > 0 of ``-c ln x + ln Gamma(c) + lam c (c - 1) / 2``."""

    def slope(c):
        return -log_x + digamma(c) + lam * (c - 0.5)

    lo, hi = 1e-12, 1.0
    while slope(hi) < 0:
        hi *= 2.0
    if slope(lo) > 0:
        return lo
    return brentq(slope, lo, hi, xtol=1e-13, rtol=1e-13)


def _log_mb_single(t, q, cfg, abscissa):
    lam = q.lam
    log_x = math.log(t)
    c = _saddle_abscissa(log_x, lam) if abscissa is None else float(abscissa)
    if c <= 0:
        raise DomainError("Mellin-Barnes abscissa must be positive")
    # all factors are normalised by the integrand's modulus at tau = 0
    log_peak = -c * log_x + gammaln(c) + lam * c * (c - 1) / 2
    # |Gamma(c + i tau)| <= Gamma(c), so the Gaussian factor bounds the tail
    span = math.sqrt(2.0 * math.log(1.0 / (cfg.rel_tol * 1e-2)) / lam)
    step = 1.0 / math.sqrt(polygamma(1, c) + lam)

    prev = None
    while True:
        half = int(math.ceil(span / step))
        if 2 * half + 1 > cfg.max_nodes:
            raise AccuracyError(
                f"Mellin-Barnes weight did not converge within {cfg.max_nodes} nodes",
                estimates=() if prev is None else (prev.real,),
                where={"t": t},
            )
        tau = np.arange(-half, half + 1) * step
        s = c + 1j * tau
        phase = -s * log_x + log_gamma(s) + lam * s * (s - 1) / 2 - log_peak
        total = np.sum(np.exp(phase)) * step
        if prev is not None and abs(total - prev) <= max(cfg.rel_tol, _ULP_FLOOR) * abs(total):
            break
        prev = total
        step /= 2.0

    if total.real <= 0 or abs(total.imag) > cfg.rel_tol * abs(total.real):
        raise AccuracyError(
            f"Mellin-Barnes integral at t={t} has a non-negligible imaginary part",
            estimates=(total.real, total.imag),
            where={"t": t},
        )
    return log_peak + math.log(total.real) - _LOG_2PI


def log_weight_mellin_barnes(t, q, cfg=DEFAULT_CONFIG, abscissa=None):
    """Natural log of the weight by Mellin-Barnes inversion.

    ``w_q(x) = (1/2pi) int x**-(c+i tau) Gamma(c+i tau) q**((c+i tau)(c+i tau-1)/2) dtau``.

    With ``abscissa=None`` the line ``Re s = c`` passes through the real
    saddle of the integrand, which keeps the oscillatory cancellation mild
    for large ``t``; pass ``abscissa=1.0`` for the unit line.
    """
    q = _require_deformed(q)
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if np.any(t <= 0) or not np.all(np.isfinite(t)):
        raise DomainError("Mellin-Barnes path requires finite t > 0")
    out = np.array([_log_mb_single(float(ti), q, cfg, abscissa) for ti in t])
    return float(out[0]) if scalar else out


def weight_mellin_barnes(t, q, cfg=DEFAULT_CONFIG, abscissa=None):
    """Weight ``w_q(t)`` via Mellin-Barnes inversion (q > 1, t > 0)."""
    return np.exp(log_weight_mellin_barnes(t, q, cfg, abscissa))


# -- moments ------------------------------------------------------------------


def moment_exact_log(n, q):
    """``ln(n! q**(n(n+1)/2))``."""
    n = _check_order(n)
    q = as_deformation(q)
    return math.lgamma(n + 1) + q.lam * n * (n + 1) / 2


def _moment_fubini_log(n, q, cfg):
    # integrating t out first: int t^n exp(-t b) dt = n! / b^(n+1), b = e^(v - lam/2),
    # leaving n! (2 pi lam)^(-1/2) int exp(g(v)) dv with quadratic g
    lam = q.lam

    def g(v):
        return -(n + 1) * (v - lam / 2) - (v - lam) ** 2 / (2 * lam)

    # g'(v) = 0 and g'' = -1/lam
    center = lam - (n + 1) * lam
    scale = math.sqrt(2.0 * lam)
    g_star = g(center)
    size = cfg.node_doubling_start
    prev = None
    while size <= cfg.max_nodes:
        x, log_w = _hermite_rule(size)
        v = center + scale * x
        est = g_star + float(logsumexp(g(v) - g_star + x**2 + log_w)) + math.log(scale)
        if prev is not None and abs(est - prev) < max(cfg.rel_tol, _ULP_FLOOR * (1 + abs(est))):
            return math.lgamma(n + 1) - 0.5 * (_LOG_2PI + math.log(lam)) + est
        prev = est
        size *= 2
    raise AccuracyError(f"moment {n} (Fubini form) did not converge", where={"n": n})


def _trapezoid_log(log_f, lo, hi, step, cfg, n):
    """Log of the trapezoid sum of ``exp(log_f)`` on [lo, hi], halving the step."""
    prev = None
    while True:
        count = int(math.ceil((hi - lo) / step)) + 1
        if count > cfg.max_nodes:
            raise AccuracyError(
                f"moment {n}: outer quadrature did not converge within {cfg.max_nodes} nodes",
                estimates=() if prev is None else (prev,),
                where={"n": n},
            )
        s = np.linspace(lo, hi, count)
        h = (hi - lo) / (count - 1)
        vals = log_f(s)
        vals[0] -= math.log(2.0)
        vals[-1] -= math.log(2.0)
        est = float(logsumexp(vals)) + math.log(h)
        if prev is not None and abs(est - prev) < max(cfg.rel_tol * 1e-1, _ULP_FLOOR * (1 + abs(est))):
            return est
        prev = est
        step = h / 2.0


def _moment_quadrature_log(n, q, cfg):
    # integrate t^n w(t) dt = int exp((n+1) s + ln w(e^s)) ds over s = ln t
    inner = QuadratureConfig(
        rel_tol=cfg.rel_tol * 1e-2,
        max_nodes=cfg.max_nodes,
        node_doubling_start=cfg.node_doubling_start,
        max_log_t=cfg.max_log_t,
    )

    def log_f(s):
        return (n + 1) * s + log_weight_laplace(np.exp(s), q, inner)

    log_drop = math.log(cfg.rel_tol * 1e-3)
    # coarse scan for the peak; the integrand is unimodal in s
    s_grid = np.arange(-40.0, cfg.max_log_t + 0.5, 0.5)
    profile = log_f(s_grid)
    peak = int(np.argmax(profile))
    if peak == len(s_grid) - 1:
        raise RangeError(f"moment {n}: integrand peaks beyond ln t = {cfg.max_log_t}", where={"n": n})
    top = profile[peak]

    # w <= 1, so the part below s_lo is at most exp((n+1) s_lo) / (n+1)
    s_lo = (log_drop + top) / (n + 1)
    s_lo = min(s_lo, s_grid[peak] - 1.0)

    # grow the upper cutoff until the next window is negligible
    s_hi = s_grid[peak] + 1.0
    width = 1.0
    while True:
        if s_hi > cfg.max_log_t:
            raise RangeError(
                f"moment {n}: upper cutoff exceeds ln t = {cfg.max_log_t}", where={"n": n}
            )
        tail = np.linspace(s_hi, s_hi + width, 9)
        if np.max(log_f(tail)) < top + log_drop:
            break
        s_hi += width
        width *= 2.0

    step = min(0.25, 1.0 / (n + 1))
    return _trapezoid_log(log_f, s_lo, s_hi, step, cfg, n)


def moment_numeric_log(n, q, cfg=DEFAULT_CONFIG, method="quadrature"):
    """Log of ``int_0^inf t**n w_q(t) dt`` evaluated numerically.

    Parameters
    ----------
    method : {"quadrature", "fubini"}
        ``"quadrature"`` integrates ``t**n * weight_laplace(t)`` over
        ``s = ln t`` with a growing upper cutoff.  ``"fubini"`` integrates
        ``t`` out analytically first and evaluates the remaining Gaussian
        integral by Gauss-Hermite quadrature (fast path).
    """
    n = _check_order(n)
    q = _require_deformed(q)
    if method == "quadrature":
        return _moment_quadrature_log(n, q, cfg)
    if method == "fubini":
        return _moment_fubini_log(n, q, cfg)
    raise ConfigError(f"unknown moment method {method!r}")


@dataclass(frozen=True)
class MomentReport:
    q: float
    orders: tuple
    numeric_log: tuple
    exact_log: tuple
    discrepancies: tuple
    tolerance: float

    @property
    def max_discrepancy(self):
        return max(self.discrepancies)

    @property
    def passed(self):
        return self.max_discrepancy < self.tolerance


def verify_moments(q, n_max, cfg=DEFAULT_CONFIG, method="quadrature"):
    """Compare numerically integrated moments with ``ln(n!) + lam n(n+1)/2``.

    Passes when every log-domain discrepancy is below ``cfg.rel_tol``.
    """
    q = _require_deformed(q)
    n_max = _check_order(n_max)
    numeric, exact, diff = [], [], []
    for n in range(n_max + 1):
        num = moment_numeric_log(n, q, cfg, method)
        ref = moment_exact_log(n, q)
        numeric.append(num)
        exact.append(ref)
        diff.append(abs(num - ref))
    return MomentReport(q.q, tuple(range(n_max + 1)), tuple(numeric), tuple(exact), tuple(diff), cfg.rel_tol)
