"""Coherent-state quantization of polynomial symbols and lower symbols.

For a monomial ``f = zeta^a conj(zeta)^b`` the plane integral defining
``f_hat`` splits in polar coordinates.  The angular part is
``2 pi delta(m + a, n + b)``; with ``t = r^2`` the radial part is the weight
moment of order ``k = (m + n + a + b) / 2 = n + b``, so

    <m| f_hat |n> = delta(m - n, b - a) * M_k / sqrt(x_m! x_n!)

and ``f_hat`` is supported on a single diagonal.  ``M_k`` comes from the
moments module (Gauss-Laguerre at q = 1).
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp, roots_laguerre

from .errors import DimensionError, DomainError, RangeError
from .fock import build_ladder, build_qp, cs_coeffs, cs_truncation, x_values
from .moments import DEFAULT_CONFIG, as_deformation, log_eq_exp, log_factorials, moment_numeric_log

__all__ = [
    "MAX_MOMENT_ORDER",
    "RadialPolynomial",
    "SymbolReport",
    "radial_moment_log",
    "quantize",
    "resolution_check",
    "lower_symbol",
    "lower_symbols",
    "uncertainty_product",
    "uncertainty_product_direct",
    "time_evolved_symbol",
    "time_evolved_symbol_matrix",
    "smoothness_probe",
]

# highest radial moment the quadratures are verified for
MAX_MOMENT_ORDER = 160


@dataclass(frozen=True)
class RadialPolynomial:
    """``f(zeta, zeta_bar) = sum coeff * zeta**a * zeta_bar**b`` over ``terms``."""

    terms: tuple

    def __post_init__(self):
        cleaned = []
        for a, b, coeff in self.terms:
            if int(a) != a or int(b) != b or a < 0 or b < 0:
                raise DomainError(f"exponents must be non-negative integers, got ({a}, {b})")
            cleaned.append((int(a), int(b), complex(coeff)))
        object.__setattr__(self, "terms", tuple(cleaned))

    @classmethod
    def monomial(cls, a, b, coeff=1.0):
        return cls(((a, b, coeff),))

    @classmethod
    def constant(cls, value=1.0):
        return cls(((0, 0, value),))

    def __add__(self, other):
        return RadialPolynomial(self.terms + other.terms)

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return sum(c * zeta**a * np.conj(zeta) ** b for a, b, c in self.terms)

    @property
    def degree(self):
        return max(max(a, b) for a, b, _ in self.terms)


@dataclass(frozen=True)
class SymbolReport:
    zeta: complex
    value: complex


@lru_cache(maxsize=4096)
def _laguerre_moment_log(k):
    # Gauss-Laguerre with n nodes is exact for t^k when k <= 2n - 1
    nodes, weights = roots_laguerre(max(16, k // 2 + 2))
    return float(logsumexp(np.log(weights) + k * np.log(nodes)))


def radial_moment_log(k, q, cfg=DEFAULT_CONFIG, method="fubini"):
    """``ln int_0^inf t^k w_q(t) dt`` evaluated numerically."""
    q = as_deformation(q)
    if k > MAX_MOMENT_ORDER:
        raise RangeError(f"radial moment {k} exceeds the verified range {MAX_MOMENT_ORDER}", where={"n": k})
    if q.is_degenerate:
        return _laguerre_moment_log(int(k))
    return moment_numeric_log(k, q, cfg, method)


def _as_polynomial(f):
    if isinstance(f, RadialPolynomial):
        return f
    if isinstance(f, (int, float, complex)):
        return RadialPolynomial.constant(f)
    return RadialPolynomial(tuple(f))


def quantize(f, q, n_trunc=32, cfg=DEFAULT_CONFIG, method="fubini"):
    """Matrix of the quantized polynomial ``f`` on ``|0>..|N>``.

    Parameters
    ----------
    f : RadialPolynomial, number, or iterable of ``(a, b, coeff)``
    method : {"fubini", "quadrature"}
        Radial moment evaluation for q > 1, see
        :func:`~stieltjes_cs.moments.moment_numeric_log`.
    """
    f = _as_polynomial(f)
    q = as_deformation(q)
    dim = int(n_trunc) + 1
    top = dim - 1 + f.degree
    log_fact = log_factorials(q, top)
    moments = {}
    out = np.zeros((dim, dim), dtype=complex)
    for a, b, coeff in f.terms:
        for n in range(dim):
            m = n + b - a
            if not 0 <= m < dim:
                continue
            twice_k = m + n + a + b
            assert twice_k % 2 == 0, "angular selection rule forces an integral radial order"
            k = twice_k // 2
            if k not in moments:
                moments[k] = radial_moment_log(k, q, cfg, method)
            out[m, n] += coeff * math.exp(moments[k] - 0.5 * (log_fact[m] + log_fact[n]))
    return out


def resolution_check(q, n_trunc, cfg=DEFAULT_CONFIG, method="fubini"):
    """Max-norm distance of the quantized constant 1 from the identity."""
    op = quantize(RadialPolynomial.constant(1.0), q, n_trunc, cfg, method)
    return float(np.max(np.abs(op - np.eye(op.shape[0]))))


def _state_for(op, zeta, q):
    coeffs = cs_coeffs(zeta, q)
    dim = op.shape[0]
    if coeffs.size > dim:
        raise DimensionError(
            f"operator dimension {dim} is smaller than the coherent-state support {coeffs.size}"
        )
    state = np.zeros(dim, dtype=complex)
    state[: coeffs.size] = coeffs
    return state


def lower_symbol(op, zeta, q):
    """Coherent-state expectation ``<zeta| op |zeta>``."""
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionError("operator must be a square matrix")
    state = _state_for(op, zeta, as_deformation(q))
    return complex(np.vdot(state, op @ state))


def lower_symbols(op, zetas, q):
    return [SymbolReport(complex(z), lower_symbol(op, z, q)) for z in zetas]


def _support(zeta, q, n_trunc, spare):
    needed = cs_truncation(zeta, q) + spare
    if n_trunc is None:
        return needed
    if n_trunc < needed:
        raise DimensionError(f"truncation {n_trunc} is below the required {needed}")
    return int(n_trunc)


def uncertainty_product(zeta, q, n_trunc=None):
    """``(1/2) <zeta| x_{N+1} - x_N |zeta>``."""
    q = as_deformation(q)
    n_trunc = _support(zeta, q, n_trunc, 0)
    x = x_values(q, n_trunc + 1)
    gap = np.diag(x[1:] - x[:-1])
    return 0.5 * lower_symbol(gap, zeta, q).real


def uncertainty_product_direct(zeta, q, n_trunc=None):
    """``Delta q * Delta p`` from first and second moments of the quadratures.

    Two spare basis states keep the truncation corner of ``q^2`` and ``p^2``
    outside the state's support.
    """
    q = as_deformation(q)
    n_trunc = _support(zeta, q, n_trunc, 2)
    qhat, phat = build_qp(q, n_trunc)
    state = _state_for(qhat, zeta, q)

    def variance(op):
        mean = np.vdot(state, op @ state).real
        second = np.vdot(state, op @ (op @ state)).real
        return second - mean**2

    return math.sqrt(variance(qhat) * variance(phat))


def time_evolved_symbol(zeta, t, q, n_trunc=None):
    """Series for the lower symbol of the evolved lowering operator.

    ``zeta / E_q(|zeta|^2) * sum |zeta|^(2n) / x_n! * exp(-i (x_{n+2} - x_{n+1}) t)``
    with magnitudes in log form.
    """
    q = as_deformation(q)
    zeta = complex(zeta)
    if zeta == 0:
        return 0j
    n_max = _support(zeta, q, n_trunc, 0)
    n = np.arange(n_max + 1)
    r2 = abs(zeta) ** 2
    log_w = n * math.log(r2) - log_factorials(q, n_max) - log_eq_exp(r2, q)
    x = x_values(q, n_max + 2)
    gaps = x[n + 2] - x[n + 1]
    return zeta * complex(np.sum(np.exp(log_w) * np.exp(-1j * gaps * t)))


def time_evolved_symbol_matrix(zeta, t, q, n_trunc=None):
    """Matrix route: ``<zeta| e^{iHt} A e^{-iHt} |zeta>`` with ``H = diag(x_{n+1})``.

    This ordering reproduces the phases ``exp(-i (x_{n+2} - x_{n+1}) t)`` of
    :func:`time_evolved_symbol`.
    """
    q = as_deformation(q)
    n_trunc = _support(zeta, q, n_trunc, 0)
    a, _ = build_ladder(q, n_trunc)
    h = x_values(q, n_trunc + 1)[1:]
    phase = np.exp(1j * h * t)
    evolved = phase[:, None] * a * np.conj(phase)[None, :]
    return lower_symbol(evolved, zeta, q)


def smoothness_probe(f, q, q_coords, p_coords, steps=(1e-2, 5e-3), n_trunc=None, cfg=DEFAULT_CONFIG):
    """Finite-difference gradients of the lower symbol of ``quantize(f)``.

    Points are ``zeta = (q + i p) / sqrt 2``.  Returns a dict with the
    largest gradient modulus at each step and the largest change between the
    two step sizes; a bounded gradient that settles under refinement is the
    numerical evidence that the lower symbol is smooth.
    """
    f = _as_polynomial(f)
    q_def = as_deformation(q)
    centres = [(x + 1j * y) / math.sqrt(2.0) for x in q_coords for y in p_coords]
    reach = max(abs(z) for z in centres) + max(steps)
    if n_trunc is None:
        n_trunc = cs_truncation(reach, q_def) + f.degree + 1
    op = quantize(f, q_def, n_trunc, cfg)

    def symbol(z):
        return lower_symbol(op, z, q_def)

    grads = []
    for h in steps:
        g = []
        for z in centres:
            d_q = (symbol(z + h / math.sqrt(2.0)) - symbol(z - h / math.sqrt(2.0))) / (2 * h)
            d_p = (symbol(z + 1j * h / math.sqrt(2.0)) - symbol(z - 1j * h / math.sqrt(2.0))) / (2 * h)
            g.append((d_q, d_p))
        grads.append(np.array(g))
    return {
        "max_gradient": [float(np.max(np.abs(g))) for g in grads],
        "refinement_change": float(np.max(np.abs(grads[0] - grads[-1]))),
    }
