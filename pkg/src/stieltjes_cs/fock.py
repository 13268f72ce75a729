"""Truncated Fock-space matrices and coherent-state coefficient vectors.

One mode is truncated at ``n_trunc`` (basis ``|0>..|N>``, dimension N + 1).
Two-mode vectors are stored as ``kron(orbit_centre, relative)``, i.e. the
index of ``|m, n>`` is ``m * (N + 1) + n``.

The dimensionless single-mode algebra uses ``x_n = n q**n`` directly; the
physical scale ``sqrt(2 / (mu omega))`` only enters through
:class:`PhysicalParams`.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, RangeError
from .moments import QDeformation, as_deformation, log_eq_exp, log_factorials

__all__ = [
    "PhysicalParams",
    "DEFAULT_TRUNCATION",
    "MAX_DIMENSION",
    "x_values",
    "build_ladder",
    "build_number",
    "build_hamiltonian",
    "build_qp",
    "commutator",
    "cs_truncation",
    "cs_coeffs",
    "glauber_coeffs",
    "two_mode_cs",
    "half_integer_spectrum_coeffs",
    "build_J",
    "build_Z_lambda",
    "evolve_labels",
]

DEFAULT_TRUNCATION = 32
MAX_DIMENSION = 4096
# coherent-state truncation thresholds, relative to E_q(|zeta|^2)
LOG_TAIL_TOL = math.log(1e-16)
LOG_RESIDUAL_TOL = math.log(1e-24)


@dataclass(frozen=True)
class PhysicalParams:
    """Charge ``e_charge`` and mass ``mu`` in a field ``B``, with squeeze ``lambda_squeeze``.

    ``omega`` (cyclotron frequency) and ``ladder_scale`` are derived.
    """

    mu: float
    e_charge: float
    B: float
    lambda_squeeze: float = 2.0
    omega: float = field(init=False)
    ladder_scale: float = field(init=False)

    def __post_init__(self):
        if not self.mu > 0:
            raise DomainError("mass must be positive")
        if self.e_charge == 0:
            raise DomainError("charge must be non-zero")
        if not self.B > 0:
            raise DomainError("field magnitude must be positive")
        if not self.lambda_squeeze >= 0:
            raise DomainError("squeeze parameter must be >= 0")
        omega = self.e_charge * self.B / self.mu
        if not self.mu * omega > 0:
            raise DomainError("mu * omega must be positive for the ladder normalisation")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "ladder_scale", math.sqrt(2.0 / (self.mu * omega)))

    @property
    def deformation(self):
        return QDeformation.from_lambda(self.lambda_squeeze)


def _check_trunc(n_trunc, minimum=0):
    if int(n_trunc) != n_trunc or n_trunc < minimum:
        raise DomainError(f"truncation must be an integer >= {minimum}, got {n_trunc!r}")
    if n_trunc + 1 > MAX_DIMENSION:
        raise RangeError(f"truncation {n_trunc} exceeds the maximum dimension {MAX_DIMENSION}")
    return int(n_trunc)


def x_values(q, n_max):
    """Array ``x_0..x_{n_max}``."""
    q = as_deformation(q)
    n = np.arange(n_max + 1, dtype=float)
    if q.is_degenerate:
        return n
    with np.errstate(over="ignore"):
        return n * q.q**n


def build_ladder(q, n_trunc=DEFAULT_TRUNCATION):
    """Lowering ``A`` and raising ``A_dag`` on ``|0>..|N>``.

    ``A[n-1, n] = sqrt(x_n)``; ``A_dag`` is the exact transpose, which is the
    raising operator with the transition out of ``|N>`` dropped.
    """
    n_trunc = _check_trunc(n_trunc, 2)
    a = np.diag(np.sqrt(x_values(q, n_trunc)[1:]), k=1)
    return a, a.T.copy()


def build_number(q, n_trunc=DEFAULT_TRUNCATION):
    """``x_N = diag(x_0, ..., x_N)``."""
    n_trunc = _check_trunc(n_trunc, 2)
    return np.diag(x_values(q, n_trunc))


def build_hamiltonian(q, n_trunc=DEFAULT_TRUNCATION):
    """Quantized ``|zeta|^2``: ``A A_dag = diag(x_1, ..., x_{N+1})`` (no corner artifact)."""
    n_trunc = _check_trunc(n_trunc, 2)
    return np.diag(x_values(q, n_trunc + 1)[1:])


def build_qp(q, n_trunc=DEFAULT_TRUNCATION):
    """Quadratures ``qhat = (A + A_dag)/sqrt 2`` and ``phat = (A - A_dag)/(i sqrt 2)``."""
    a, a_dag = build_ladder(q, n_trunc)
    qhat = (a + a_dag) / math.sqrt(2.0)
    # -1j * (real antisymmetric) keeps phat exactly Hermitian
    phat = (-1j * (a - a_dag)) / math.sqrt(2.0)
    return qhat, phat


def commutator(x, y):
    return x @ y - y @ x


def cs_truncation(zeta, q, max_dim=MAX_DIMENSION):
    """Smallest N such that the coherent state is resolved on ``|0>..|N>``.

    Three conditions, all relative to ``E_q(|zeta|^2)``:

    * the term ratio ``|zeta|^2 / x_{n+1}`` is below 1/2 from N on, so the
      omitted tail is at most twice its first term;
    * the first omitted weight ``|zeta|^(2(N+1)) / x_{N+1}!`` is below 1e-16;
    * ``|zeta|^2`` times the last kept weight is below 1e-24, which bounds
      the lowering-operator eigen-residual ``|zeta| |c_N|`` by 1e-12.
    """
    q = as_deformation(q)
    r2 = abs(zeta) ** 2
    if r2 == 0:
        return 2
    log_r2 = math.log(r2)
    log_norm = log_eq_exp(r2, q)
    log_fact = 0.0
    for n in range(max_dim):
        if n > 0:
            log_fact += math.log(n) + q.lam * n
        log_kept = n * log_r2 - log_fact - log_norm
        log_x_next = math.log(n + 1) + q.lam * (n + 1)
        log_omitted = log_kept + log_r2 - log_x_next
        if (
            log_r2 - log_x_next < -math.log(2.0)
            and log_omitted < LOG_TAIL_TOL
            and log_r2 + log_kept < LOG_RESIDUAL_TOL
        ):
            return max(n, 2)
    raise RangeError(
        f"coherent state at |zeta|={abs(zeta):g} needs more than {max_dim} basis states",
        where={"zeta": abs(zeta)},
    )


def cs_coeffs(zeta, q, n_trunc=None):
    """Coefficients ``zeta^n / sqrt(x_n! E_q(|zeta|^2))`` on ``|0>..|N>``.

    With ``n_trunc=None`` the truncation comes from :func:`cs_truncation`;
    an explicit ``n_trunc`` smaller than that raises RangeError.
    """
    q = as_deformation(q)
    zeta = complex(zeta)
    needed = cs_truncation(zeta, q)
    if n_trunc is None:
        n_trunc = needed
    else:
        n_trunc = _check_trunc(n_trunc)
        if n_trunc < needed:
            raise RangeError(
                f"truncation {n_trunc} too small for |zeta|={abs(zeta):g} (needs {needed})",
                where={"zeta": abs(zeta)},
            )
    out = np.zeros(n_trunc + 1, dtype=complex)
    if zeta == 0:
        out[0] = 1.0
        return out
    n = np.arange(needed + 1)
    log_mod = (
        n * math.log(abs(zeta))
        - 0.5 * log_factorials(q, needed)
        - 0.5 * log_eq_exp(abs(zeta) ** 2, q)
    )
    out[: needed + 1] = np.exp(log_mod) * np.exp(1j * n * np.angle(zeta))
    return out


def glauber_coeffs(z, n_trunc=None):
    """Standard coherent state ``e^{-|z|^2/2} z^m / sqrt(m!)``."""
    return cs_coeffs(z, 1.0, n_trunc)


def two_mode_cs(z, zeta, q, m_trunc=None, n_trunc=None):
    """Two-mode coherent state ``|z, zeta>`` as a flat vector.

    Returns ``(vector, (M + 1, N + 1))``; entry ``m * (N + 1) + n`` holds the
    ``|m, n>`` coefficient.
    """
    centre = glauber_coeffs(z, m_trunc)
    relative = cs_coeffs(zeta, q, n_trunc)
    return np.kron(centre, relative), (centre.size, relative.size)


def half_integer_spectrum_coeffs(zeta, n_trunc):
    """Unnormalised relative-mode coefficients ``zeta^n e^{-(n+1/2)^2/2} / sqrt(n!)``.

    This is the q = e^2 family written with the half-integer spectrum of J;
    it differs from :func:`cs_coeffs` at q = e^2 by one global factor.
    """
    n = np.arange(_check_trunc(n_trunc) + 1)
    log_mod = -0.5 * (n + 0.5) ** 2 - 0.5 * log_factorials(1.0, n_trunc)
    with np.errstate(divide="ignore"):
        log_r = np.log(abs(zeta)) if zeta != 0 else -np.inf
    mod = np.exp(log_mod + np.where(n > 0, n * log_r, 0.0))
    return mod * np.exp(1j * n * np.angle(zeta))


def build_J(n_trunc=DEFAULT_TRUNCATION):
    """Relative angular momentum ``J = diag(-(n + 1/2))``."""
    n = np.arange(_check_trunc(n_trunc) + 1)
    return np.diag(-(n + 0.5))


def build_Z_lambda(params, n_trunc=DEFAULT_TRUNCATION):
    """``Z_lambda = exp[(lambda/2)(1/2 - J)] r_plus`` on the relative mode.

    ``r_plus = ladder_scale * L`` with ``L[n-1, n] = sqrt(n)``.  J is
    diagonal, so the exponential is taken entrywise.
    """
    n_trunc = _check_trunc(n_trunc, 2)
    n = np.arange(n_trunc + 1)
    lowering = np.diag(np.sqrt(n[1:].astype(float)), k=1)
    r_plus = params.ladder_scale * lowering
    j = np.diag(build_J(n_trunc))
    squeeze = np.exp(0.5 * params.lambda_squeeze * (0.5 - j))
    return squeeze[:, None] * r_plus


def evolve_labels(z, zeta, t, params):
    """Labels after time ``t``: ``(z, zeta e^{-i omega t})``; ``z`` is conserved."""
    return complex(z), complex(zeta) * np.exp(-1j * params.omega * t)
