"""Convergence bounds and the exact blow-up envelope recursion.

The envelope of an m-node network whose nodes all satisfy the factorial
growth bound with constants (Kbar, Mbar) obeys the scalar Abel equation
z' = (Mbar/Kbar)(z^2 + m z^3), z(0) = Kbar. Its Taylor coefficients give the
worst-case output derivatives a_n, the geometric growth rate M_inf, and the
minimal finite escape time t_star = 1/M_inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, NoConvergence
from .series import Coeff, as_coeff

_BRANCH_POINT = -math.exp(-1.0)
_BRANCH_GUARD = 1e-12


def _branch_series(p: float) -> float:
    # W(-exp(-1)(1 - p^2/2 ...)) expanded around the branch point; p carries
    # the branch sign: p >= 0 on the principal branch, p <= 0 on the lower one.
    return -1.0 + p * (
        1.0
        + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * (769.0 / 17280.0))))
    )


def _halley(x: float, w: float) -> float:
    for _ in range(50):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= 1e-14 * (1.0 + abs(w)):
            return w
    raise NoConvergence(f"Lambert W iteration did not settle for x = {x}")


def lambert_w(x: float) -> float:
    """Principal real branch: the solution of W e^W = x with W >= -1."""
    x = float(x)
    if math.isnan(x):
        raise DomainError("lambert_w of NaN")
    if x < _BRANCH_POINT:
        if x > _BRANCH_POINT - _BRANCH_GUARD:
            return -1.0
        raise DomainError(f"lambert_w needs x >= -1/e, got {x}")
    if x == 0.0:
        return 0.0
    p_sq = 2.0 * (math.e * x + 1.0)
    if p_sq <= 0.0:
        return -1.0
    p = math.sqrt(p_sq)
    if p < 1e-3:
        return _branch_series(p)
    if x < -0.25:
        seed = _branch_series(p)
    elif x < math.e:
        seed = x / (1.0 + x)
    else:
        log_x = math.log(x)
        seed = log_x - math.log(log_x)
    return _halley(x, seed)


def lambert_w_lower(x: float) -> float:
    """Lower real branch: the solution of W e^W = x with W <= -1, for x in [-1/e, 0)."""
    x = float(x)
    if math.isnan(x) or x >= 0.0:
        raise DomainError(f"lambert_w_lower needs -1/e <= x < 0, got {x}")
    if x < _BRANCH_POINT:
        if x > _BRANCH_POINT - _BRANCH_GUARD:
            return -1.0
        raise DomainError(f"lambert_w_lower needs x >= -1/e, got {x}")
    p_sq = 2.0 * (math.e * x + 1.0)
    if p_sq <= 0.0:
        return -1.0
    p = -math.sqrt(p_sq)
    if -p < 1e-3:
        return _branch_series(p)
    if x < -0.33:
        seed = _branch_series(p)
    else:
        # Asymptotic seed, tightened by the contraction w -> log(-x) - log(-w)
        # so Halley starts safely on this branch.
        log_mx = math.log(-x)
        seed = log_mx - math.log(-log_mx)
        for _ in range(8):
            seed = log_mx - math.log(-seed)
    return _halley(x, seed)


def _lambda(x: float) -> float:
    """1 - x log(1 + 1/x) for x > 0, stable for large x."""
    if x < 8.0:
        return 1.0 - x * math.log1p(1.0 / x)
    total = 0.0
    sign = 1.0
    power = x
    for k in range(2, 60):
        term = sign / (k * power)
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
        sign = -sign
        power *= x
    return total


@dataclass(frozen=True)
class GrowthBound:
    Kbar: Coeff
    Mbar: Coeff
    m: int
    M_inf: float
    t_star: float


def m_inf_bound(Kbar, Mbar, m: int) -> GrowthBound:
    """Geometric growth rate M_inf = Mbar / (1 - m Kbar log(1 + 1/(m Kbar))).

    t_star = 1/M_inf lower-bounds the escape time of every network dominated
    by the (Kbar, Mbar) envelope.
    """
    Kbar = as_coeff(Kbar)
    Mbar = as_coeff(Mbar)
    if Kbar <= 0 or Mbar <= 0:
        raise DomainError("growth constants must be positive")
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise DomainError("node count m must be a positive integer")
    x = float(Fraction(m) * Fraction(Kbar))
    m_inf = float(Fraction(Mbar)) / _lambda(x)
    return GrowthBound(Kbar, Mbar, m, m_inf, 1.0 / m_inf)


@dataclass(frozen=True)
class AbelSequence:
    """Exact Taylor data of the envelope: z_k, derivatives a_k = k! z_k, and
    the ratio estimates mhat[n-1] = n a_n / a_{n-1}."""

    m: int
    K: Coeff
    M: Coeff
    z: tuple[Coeff, ...]
    a: tuple[Coeff, ...]
    mhat: tuple[Coeff, ...]  # mhat[n-1] = a_n / (n a_{n-1}) = z_n / z_{n-1}

    def a_floats(self) -> list[float]:
        return [float(Fraction(v)) for v in self.a]

    def mhat_float(self, n: int) -> float:
        if not 1 <= n <= len(self.mhat):
            raise DomainError(f"mhat defined for 1 <= n <= {len(self.mhat)}")
        return float(Fraction(self.mhat[n - 1]))


def abel_taylor(m: int, K, M, n_max: int) -> AbelSequence:
    """Taylor coefficients of z' = (M/K)(z^2 + m z^3), z(0) = K, in exact arithmetic.

    (k+1) z_{k+1} = (M/K) (sum_{a+b=k} z_a z_b + m sum_{a+b+c=k} z_a z_b z_c).
    """
    K = as_coeff(K)
    M = as_coeff(M)
    if K <= 0 or M <= 0:
        raise DomainError("growth constants must be positive")
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise DomainError("node count m must be a positive integer")
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    ratio = Fraction(M) / Fraction(K)
    z: list[Coeff] = [K]
    pair_conv: list[Coeff] = [K * K]
    for k in range(n_max):
        conv2 = pair_conv[k]
        conv3 = sum(z[c] * pair_conv[k - c] for c in range(k + 1))
        nxt = as_coeff(ratio * (conv2 + m * conv3) / (k + 1))
        z.append(nxt)
        pair_conv.append(sum(z[a] * z[k + 1 - a] for a in range(k + 2)))
    a = [as_coeff(math.factorial(k) * Fraction(zk)) for k, zk in enumerate(z)]
    mhat = [
        as_coeff(Fraction(z[n]) / Fraction(z[n - 1]))
        for n in range(1, n_max + 1)
    ]
    return AbelSequence(m, K, M, tuple(z), tuple(a), tuple(mhat))


def closed_form_natural_response(m: int, K, M, t: float) -> float:
    """Envelope value at time t in [0, t_star), via the lower Lambert branch.

    z(t) = (-1/m) / (1 + W(-(1+1/(mK)) exp(M t/(m K) - (1+1/(mK))))), which
    satisfies z(0) = K exactly and blows up as t approaches t_star.
    """
    bound = m_inf_bound(K, M, m)
    t = float(t)
    if not 0.0 <= t < bound.t_star:
        raise DomainError(f"t must lie in [0, t_star) with t_star = {bound.t_star}")
    k_f = float(Fraction(as_coeff(K)))
    m_f = float(Fraction(as_coeff(M)))
    if t == 0.0:
        # W(-s e^{-s}) = -s on the lower branch, so the formula collapses to K
        return k_f
    s = 1.0 + 1.0 / (m * k_f)
    arg = -s * math.exp(m_f * t / (m * k_f) - s)
    if arg < _BRANCH_POINT:
        arg = _BRANCH_POINT
    w = lambert_w_lower(arg)
    return (-1.0 / m) / (1.0 + w)
