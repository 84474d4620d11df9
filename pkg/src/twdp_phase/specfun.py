"""Special functions needed by the TWDP phase density.

Only the parameter families that occur in the phase expressions are
covered: Tricomi ``U(a, a + 1 + m, z)`` for integer ``m``, the terminating
Humbert ``Phi_1(1, -m, 3/2; x, y)``, Humbert ``Phi_3`` and one instance of
the triple hypergeometric series ``F^(3)``.  Everything accepts numpy
arrays in the continuous argument unless noted otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import NumericError, ParameterDomainError


@dataclass(frozen=True)
class SeriesControl:
    rel_tol: float = 1e-14
    max_terms: int = 10_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ParameterDomainError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ParameterDomainError("max_terms must be >= 1")


DEFAULT_CONTROL = SeriesControl()


def ln_gamma(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ParameterDomainError("ln_gamma requires x > 0")
    out = special.gammaln(x)
    return float(out) if out.ndim == 0 else out


def reg_gamma_q(a, x):
    """Regularized upper incomplete gamma ``Q(a, x) = Gamma(a, x) / Gamma(a)``."""
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(a <= 0) or np.any(x < 0):
        raise ParameterDomainError("reg_gamma_q requires a > 0 and x >= 0")
    out = special.gammaincc(a, x)
    return float(out) if out.ndim == 0 else out


def pochhammer(x: float, n: int) -> float:
    """Rising factorial ``(x)_n``."""
    if n < 0 or int(n) != n:
        raise ParameterDomainError("pochhammer needs a nonnegative integer n")
    n = int(n)
    if n == 0:
        return 1.0
    if x == int(x) and x <= 0 and n > -x:
        return 0.0
    out = 1.0
    for i in range(n):
        out *= x + i
        if not math.isfinite(out):
            break
    if math.isfinite(out):
        return out
    # the running product overflowed; redo the magnitude in log space
    lg, sign = _log_poch(x, n)
    return float(sign * math.exp(lg)) if lg < 709.7 else float(sign * math.inf)


def _log_poch(x: float, n):
    """``(log|(x)_n|, sign)`` for an integer array ``n``; x not a nonpositive integer."""
    n = np.asarray(n, dtype=float)
    lg = special.gammaln(x + n) - special.gammaln(x)
    sign = special.gammasgn(x + n) * special.gammasgn(x)
    return lg, sign


def kummer_m(b, c, y, ctl: SeriesControl = DEFAULT_CONTROL, max_arg: float = 700.0):
    """Kummer ``M(b, c, y)`` by the ascending series, for ``0 < b``, ``c > 0``, ``y >= 0``.

    All terms are nonnegative in this regime so the sum has no cancellation.
    ``b`` may be an array broadcast against ``y``.
    """
    y = np.asarray(y, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(y < 0):
        raise ParameterDomainError("kummer_m is implemented for y >= 0")
    if np.any(y > max_arg):
        raise ParameterDomainError(f"kummer_m argument beyond {max_arg}")
    if np.any(b <= 0) or c <= 0:
        raise ParameterDomainError("kummer_m is implemented for b > 0, c > 0")
    b, y = np.broadcast_arrays(b, y)
    term = np.ones(y.shape)
    total = np.ones(y.shape)
    for n in range(ctl.max_terms):
        term = term * (b + n) / (c + n) * y / (n + 1)
        total = total + term
        # terms decrease once n + 1 > y; require that before stopping
        if n + 1 > np.max(y, initial=0.0) and np.all(term <= ctl.rel_tol * total):
            return total
    raise NumericError("kummer_m series did not converge", partial=total, where="kummer_m")


def tricomi_u_scaled(a: float, m: int, z):
    """``z**(a + m) * U(a, a + 1 + m, z)`` for integer ``m >= 0``.

    From the integral representation the integrand is ``(1 + t)**m`` times a
    gamma kernel, so the binomial expansion gives the finite positive sum
    ``sum_k C(m, k) (a)_k z**(m - k)``, which stays bounded as ``z -> 0``.
    """
    z = np.asarray(z, dtype=float)
    k = np.arange(m + 1)
    log_poch, _ = _log_poch(a, k)
    log_coef = special.gammaln(m + 1) - special.gammaln(k + 1) - special.gammaln(m - k + 1) + log_poch
    # Horner in z over the coefficients of z**(m - k), k = m..0
    coef = np.exp(log_coef)
    out = np.zeros(z.shape)
    for kk in range(0, m + 1):
        out = out * z + coef[kk]
    return out


def tricomi_u(a: float, b: float, z, ctl: SeriesControl = DEFAULT_CONTROL):
    """Tricomi confluent hypergeometric function ``U(a, b, z)`` for ``z > 0``.

    When ``b - a - 1`` is a nonnegative integer (the ``a = 1/2`` and ``a = 1``
    families used for the phase density) the value comes from the exact
    finite form of the integral; otherwise the integral is done by adaptive
    quadrature.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise ParameterDomainError("tricomi_u requires z > 0")
    if a <= 0:
        raise ParameterDomainError("tricomi_u is implemented for a > 0")
    m = b - a - 1.0
    if m >= 0 and m == round(m):
        m = int(round(m))
        out = tricomi_u_scaled(a, m, z) * z ** (-(a + m))
        return float(out) if out.ndim == 0 else out

    def one(zz):
        f = lambda t: math.exp(-zz * t) * t ** (a - 1.0) * (1.0 + t) ** (b - a - 1.0)
        val, err = integrate.quad(f, 0.0, np.inf, epsrel=1e-12, epsabs=0.0, limit=500)
        if not err <= 1e-9 * max(abs(val), 1e-300):
            raise NumericError("tricomi_u quadrature did not converge", partial=val / math.gamma(a), where="tricomi_u")
        return val / math.gamma(a)

    out = np.vectorize(one, otypes=[float])(z)
    return float(out) if out.ndim == 0 else out


def humbert_phi1_terminating(m: int, x, y, ctl: SeriesControl = DEFAULT_CONTROL):
    """Humbert ``Phi_1(1, -m, 3/2; x, y)`` for integer ``m >= 0``, ``0 <= x <= 1``, ``y >= 0``.

    The defining k-sum alternates in sign and loses about ``m log10 2``
    digits near ``x = 1``.  Writing ``1 - x t = (1 - t) + t (1 - x)`` inside the
    Euler integral gives an equivalent finite sum of nonnegative terms

        Phi_1 = 1/2 sum_j C(m, j) (1 - x)**j B(j + 1, m - j + 1/2) M(j + 1, m + 3/2, y)

    which is what is evaluated here.
    """
    if m < 0 or int(m) != m:
        raise ParameterDomainError("m must be a nonnegative integer")
    m = int(m)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(x > 1) or np.any(y < 0):
        raise ParameterDomainError("humbert_phi1_terminating needs 0 <= x <= 1, y >= 0")
    x, y = np.broadcast_arrays(x, y)
    j = np.arange(m + 1).reshape((-1,) + (1,) * x.ndim)
    log_w = (
        special.gammaln(m + 1) - special.gammaln(m - j + 1)
        + special.gammaln(m - j + 0.5) - special.gammaln(m + 1.5)
    )
    mvals = kummer_m(j + 1.0, m + 1.5, y[None, ...], ctl)
    one_minus_x = 1.0 - x
    with np.errstate(divide="ignore"):
        powers = np.where(j == 0, 1.0, one_minus_x[None, ...] ** j)
    out = 0.5 * np.sum(np.exp(log_w) * powers * mvals, axis=0)
    return float(out) if out.ndim == 0 else out


def _shell_sum(shell_fn, ctl: SeriesControl, where: str):
    """Sum shells ``N = 0, 1, ...`` until two consecutive shells are negligible.

    ``shell_fn(N)`` returns ``(signed_sum, abs_sum)`` of the terms of order N.
    Returns ``(total, abs_total)``; ``abs_total / |total|`` is the
    cancellation factor of the series.
    """
    total = 0.0
    abs_total = 0.0
    small = 0
    for n in range(ctl.max_terms):
        s, a = shell_fn(n)
        total += s
        abs_total += a
        if a <= ctl.rel_tol * abs(total):
            small += 1
            if small >= 2:
                return total, abs_total
        else:
            small = 0
    raise NumericError(f"{where} did not converge in {ctl.max_terms} shells", partial=total, where=where)


def _log_pow(x: float, n):
    """``n log|x|`` with ``0**0 = 1`` (log 0) and ``0**n = 0`` (-inf)."""
    n = np.asarray(n, dtype=float)
    if x == 0:
        return np.where(n == 0, 0.0, -np.inf)
    return n * math.log(abs(x))


def humbert_phi3(b: float, c: float, w: float, z: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Humbert ``Phi_3(b, c; w, z) = sum (b)_i w**i z**n / ((c)_{i+n} i! n!)``.

    Summed over anti-diagonal shells ``i + n = N``.
    """
    if c <= 0 and c == int(c):
        raise ParameterDomainError("c must not be a nonpositive integer")
    if z < 0:
        raise ParameterDomainError("humbert_phi3 needs z >= 0")
    b_is_negint = b <= 0 and b == int(b)

    def shell(n_order):
        i = np.arange(n_order + 1)
        n = n_order - i
        if b_is_negint:
            bi = np.array([pochhammer(b, int(ii)) for ii in i])
            lb, sb = np.log(np.abs(bi) + (bi == 0)), np.sign(bi)
        else:
            lb, sb = _log_poch(b, i)
        lc, sc = _log_poch(c, n_order)
        logt = lb + _log_pow(w, i) + _log_pow(z, n) - lc - special.gammaln(i + 1) - special.gammaln(n + 1)
        sign = sb * sc * np.where((w < 0) & (i % 2 == 1), -1.0, 1.0)
        t = sign * np.exp(logt)
        return float(np.sum(t)), float(np.sum(np.abs(t)))

    total, _ = _shell_sum(shell, ctl, "humbert_phi3")
    return total


def phi3_bound(b: float, c: float, w: float, z: float) -> float:
    """Growth envelope ``exp(2 sqrt|z| + 2|w| + |b w| / |c|)`` for ``|Phi_3|``."""
    return math.exp(2.0 * math.sqrt(abs(z)) + 2.0 * abs(w) + abs(b * w) / abs(c))


def triple_f3_instance(x: float, y: float, z: float, ctl: SeriesControl = DEFAULT_CONTROL,
                       return_cancellation: bool = False):
    """Triple series occurring in the cos**2 term of the closed-form phase density::

        F(x, y, z) = sum_{k,n,l} (1)_{k+n} / ((3/2)_{k+n} (1)_{k+l}) x**k y**n z**l / (k! n! l!)

    i.e. numerator ``(1)`` and denominator ``(3/2)`` on the index pair (k, n),
    denominator ``(1)`` on the pair (k, l).  Summed over shells ``k + n + l = N``.
    With ``return_cancellation`` also returns ``sum|terms| / |sum|``.
    """
    if y < 0 or z < 0:
        raise ParameterDomainError("triple_f3_instance needs y >= 0 and z >= 0")

    def shell(order):
        k, n = np.meshgrid(np.arange(order + 1), np.arange(order + 1), indexing="ij")
        mask = k + n <= order
        k, n = k[mask], n[mask]
        l = order - k - n
        kn = k + n
        logt = (
            special.gammaln(kn + 1) - (special.gammaln(kn + 1.5) - special.gammaln(1.5))
            - special.gammaln(k + l + 1)
            + _log_pow(x, k) + _log_pow(y, n) + _log_pow(z, l)
            - special.gammaln(k + 1) - special.gammaln(n + 1) - special.gammaln(l + 1)
        )
        sign = np.where((x < 0) & (k % 2 == 1), -1.0, 1.0)
        t = sign * np.exp(logt)
        return float(np.sum(t)), float(np.sum(np.abs(t)))

    total, abs_total = _shell_sum(shell, ctl, "triple_f3_instance")
    if return_cancellation:
        return total, abs_total / max(abs(total), 1e-300)
    return total
