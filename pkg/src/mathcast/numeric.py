"""Numeric implementations of the functions the evaluators understand.

Every function takes and returns Python numbers (``int``, ``float``,
``complex`` or ``Fraction`` for exact inputs) and raises
``PoleOrSingularity`` within ``eps`` of a pole.  Integer-indexed sequences
(Euler, Bernoulli, prime counting) are computed exactly.
"""

from __future__ import annotations

import bisect
import cmath
import math
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import EvaluationError, PoleOrSingularity

SIEVE_LIMIT = 10 ** 6


def is_real(z) -> bool:
    return not isinstance(z, complex) or z.imag == 0


def real(z) -> float:
    return z.real if isinstance(z, complex) else z


def as_int(z, what: str) -> int:
    """Integer value of ``z``; ``EvaluationError`` when it is not one."""
    if not is_real(z):
        raise EvaluationError(f"{what} needs an integer argument, got {z}")
    r = real(z)
    if isinstance(r, float) and not math.isfinite(r):
        raise EvaluationError(f"{what} needs a finite argument")
    if r != int(r):
        raise EvaluationError(f"{what} needs an integer argument, got {r}")
    return int(r)


def exact(z):
    """Exact rational for real input, else the complex value itself."""
    if isinstance(z, (int, Fraction)):
        return Fraction(z)
    if is_real(z):
        r = real(z)
        if math.isfinite(r):
            return Fraction(r)
    return complex(z)


def simplify(value):
    """Collapse exact and complex results to the plainest Python number."""
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else float(value)
    if isinstance(value, complex) and value.imag == 0:
        return value.real
    return value


def is_exact(*values) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)


def rational(value, keep_exact: bool):
    """``value`` as an int or Fraction when ``keep_exact``, else as :func:`simplify` would."""
    if keep_exact and isinstance(value, (int, Fraction)):
        return int(value) if Fraction(value).denominator == 1 else Fraction(value)
    return simplify(value)


def _mp(z):
    return complex(z) if isinstance(z, complex) else float(z)


def _from_mp(v):
    c = complex(v)
    return c.real if c.imag == 0 else c


# -- elementary -----------------------------------------------------------------


def sqrt(z, eps=0.0):
    if is_real(z) and real(z) >= 0:
        return math.sqrt(real(z))
    return cmath.sqrt(z)


def exp(z, eps=0.0):
    if is_real(z):
        return math.exp(real(z))
    return cmath.exp(z)


def ln(z, eps=1e-300):
    if abs(z) <= eps:
        raise PoleOrSingularity("ln at 0")
    if is_real(z) and real(z) > 0:
        return math.log(real(z))
    return cmath.log(z)


def _real_or_complex(real_fn, complex_fn):
    def fn(z, eps=0.0):
        if is_real(z):
            return real_fn(real(z))
        return complex_fn(z)
    return fn


def tan(z, eps=1e-300):
    if abs(cmath.cos(z)) <= eps:
        raise PoleOrSingularity("tan at an odd multiple of pi/2")
    return math.tan(real(z)) if is_real(z) else cmath.tan(z)


sin = _real_or_complex(math.sin, cmath.sin)
cos = _real_or_complex(math.cos, cmath.cos)
sinh = _real_or_complex(math.sinh, cmath.sinh)
cosh = _real_or_complex(math.cosh, cmath.cosh)
tanh = _real_or_complex(math.tanh, cmath.tanh)


def _ratio(num, den, name):
    def fn(z, eps=1e-300):
        d = den(z)
        if abs(d) <= eps:
            raise PoleOrSingularity(f"{name} at a zero of its denominator")
        return num(z) / d
    return fn


cot = _ratio(cos, sin, "cot")
sec = _ratio(lambda z: 1.0, cos, "sec")
csc = _ratio(lambda z: 1.0, sin, "csc")


def _inverse_trig(real_fn, complex_fn, bounded):
    def fn(z, eps=0.0):
        if is_real(z) and (not bounded or -1 <= real(z) <= 1):
            return real_fn(real(z))
        return complex_fn(z)
    return fn


arcsin = _inverse_trig(math.asin, cmath.asin, True)
arccos = _inverse_trig(math.acos, cmath.acos, True)
arctan = _inverse_trig(math.atan, cmath.atan, False)


def absolute(z, eps=0.0):
    return abs(z)


# -- gamma and friends ------------------------------------------------------------


def _near_nonpositive_integer(z, eps) -> bool:
    if not is_real(z) and abs(z.imag) > eps:
        return False
    r = real(z)
    return r <= eps and abs(r - round(r)) <= eps


def gamma(z, eps=1e-12):
    if _near_nonpositive_integer(z, eps):
        raise PoleOrSingularity(f"Gamma at {real(z)}")
    if is_real(z):
        r = real(z)
        if r == int(r) and 0 < r <= 171:
            return float(math.factorial(int(r) - 1))
        return math.gamma(r)
    return _from_mp(mpmath.gamma(_mp(z)))


def digamma(z, eps=1e-12):
    if _near_nonpositive_integer(z, eps):
        raise PoleOrSingularity(f"digamma at {real(z)}")
    return _from_mp(mpmath.digamma(_mp(z)))


def factorial(z, eps=1e-12):
    if is_real(z) and real(z) == int(real(z)) and real(z) >= 0:
        return math.factorial(int(real(z)))
    return gamma(z + 1, eps)


def binomial(a, b, eps=1e-12):
    if all(is_real(v) and real(v) == int(real(v)) for v in (a, b)):
        n, k = int(real(a)), int(real(b))
        if n >= 0:
            return math.comb(n, k) if k >= 0 else 0
    return gamma(a + 1, eps) / (gamma(b + 1, eps) * gamma(a - b + 1, eps))


# -- number theory ----------------------------------------------------------------


@lru_cache(maxsize=1)
def _primes() -> list[int]:
    flags = bytearray([1]) * (SIEVE_LIMIT + 1)
    flags[0] = flags[1] = 0
    for p in range(2, int(SIEVE_LIMIT ** 0.5) + 1):
        if flags[p]:
            flags[p * p::p] = bytearray(len(range(p * p, SIEVE_LIMIT + 1, p)))
    return [i for i, f in enumerate(flags) if f]


def prime_pi(x, eps=0.0):
    """Number of primes not exceeding the real number ``x``."""
    if not is_real(x):
        raise EvaluationError("prime counting needs a real argument")
    r = real(x)
    if r > SIEVE_LIMIT:
        raise EvaluationError(f"prime counting is limited to arguments up to {SIEVE_LIMIT}")
    return bisect.bisect_right(_primes(), math.floor(r))


@lru_cache(maxsize=None)
def euler_number(n: int) -> int:
    """Euler numbers from the even recurrence sum_k C(n, 2k) E_2k = 0."""
    if n < 0:
        raise EvaluationError("Euler numbers need a non-negative index")
    if n % 2:
        return 0
    if n == 0:
        return 1
    return -sum(math.comb(n, k) * euler_number(k) for k in range(0, n, 2))


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """Bernoulli numbers with B_1 = -1/2 (sum_k C(m+1, k) B_k = 0)."""
    if n < 0:
        raise EvaluationError("Bernoulli numbers need a non-negative index")
    if n == 0:
        return Fraction(1)
    return -sum(math.comb(n + 1, k) * bernoulli_number(k) for k in range(n)) / (n + 1)


def euler_poly(n, x, eps=0.0):
    """E_n(x) = sum_k C(n,k) E_k / 2^k (x - 1/2)^(n-k); exact for rational x."""
    n = as_int(n, "EulerE")
    if n < 0:
        raise EvaluationError("Euler polynomials need a non-negative degree")
    t = exact(x) - Fraction(1, 2)
    total = sum(math.comb(n, k) * Fraction(euler_number(k), 2 ** k) * t ** (n - k)
                for k in range(n + 1))
    return rational(total, is_exact(x))


def euler_value(n, eps=0.0):
    return euler_number(as_int(n, "EulerNumber"))


def bernoulli_value(n, eps=0.0):
    return rational(bernoulli_number(as_int(n, "BernoulliB")), True)


def bernoulli_poly(n, x, eps=0.0):
    n = as_int(n, "BernoulliPoly")
    if n < 0:
        raise EvaluationError("Bernoulli polynomials need a non-negative degree")
    t = exact(x)
    return rational(sum(math.comb(n, k) * bernoulli_number(k) * t ** (n - k) for k in range(n + 1)),
                    is_exact(x))


# -- orthogonal polynomials ----------------------------------------------------------


def _degree(n, what):
    d = as_int(n, what)
    if d < 0:
        raise EvaluationError(f"{what} needs a non-negative degree")
    return d


def _three_term(n, x, p0, p1, step):
    if n == 0:
        return p0
    prev, cur = p0, p1
    for k in range(1, n):
        prev, cur = cur, step(k, prev, cur)
    return cur


def legendre(n, x, eps=0.0):
    n = _degree(n, "LegendrepolyP")
    t = exact(x)
    return rational(_three_term(n, t, 1, t,
                                lambda k, p, c: ((2 * k + 1) * t * c - k * p) / Fraction(k + 1)),
                    is_exact(x))


def chebyshev_t(n, x, eps=0.0):
    n = _degree(n, "ChebyshevpolyT")
    t = exact(x)
    return rational(_three_term(n, t, 1, t, lambda k, p, c: 2 * t * c - p), is_exact(x))


def hermite_h(n, x, eps=0.0):
    n = _degree(n, "HermitepolyH")
    t = exact(x)
    return rational(_three_term(n, t, 1, 2 * t, lambda k, p, c: 2 * t * c - 2 * k * p),
                    is_exact(x))


def _gen_binom(a, k: int):
    out = Fraction(1) if isinstance(a, Fraction) else 1
    for j in range(k):
        out = out * (a - j) / (j + 1)
    return out


def jacobi(alpha, beta, n, x, eps=0.0):
    """P_n^(alpha,beta)(x) by the explicit binomial sum."""
    n = _degree(n, "JacobipolyP")
    a, b, t = exact(alpha), exact(beta), exact(x)
    total = sum(_gen_binom(n + a, n - s) * _gen_binom(n + b, s)
                * ((t - 1) / 2) ** s * ((t + 1) / 2) ** (n - s) for s in range(n + 1))
    return rational(total, is_exact(alpha, beta, x))


# -- special functions through mpmath -------------------------------------------------


def besselj(nu, x, eps=0.0):
    return _from_mp(mpmath.besselj(_mp(nu), _mp(x)))


def zeta(s, eps=1e-12):
    if abs(s - 1) <= eps:
        raise PoleOrSingularity("zeta at 1")
    return _from_mp(mpmath.zeta(_mp(s)))


def erf(z, eps=0.0):
    if is_real(z):
        return math.erf(real(z))
    return _from_mp(mpmath.erf(_mp(z)))


def jacobi_theta1(z, q, eps=0.0):
    if abs(q) >= 1:
        raise EvaluationError("theta function needs |q| < 1")
    return _from_mp(mpmath.jtheta(1, _mp(z), _mp(q)))


def lambert_w(z, eps=0.0):
    return _from_mp(mpmath.lambertw(_mp(z)))


def heaviside(x, eps=0.0):
    if not is_real(x):
        raise EvaluationError("Heaviside step needs a real argument")
    r = real(x)
    return 0 if r < 0 else (1 if r > 0 else 0.5)


EULER_GAMMA = float(mpmath.euler)
GOLDEN_RATIO = (1 + math.sqrt(5)) / 2

#: Macro name -> (arity, implementation).
FUNCTIONS = {
    "sin": (1, sin), "cos": (1, cos), "tan": (1, tan), "cot": (1, cot), "sec": (1, sec),
    "csc": (1, csc), "sinh": (1, sinh), "cosh": (1, cosh), "tanh": (1, tanh),
    "arcsin": (1, arcsin), "arccos": (1, arccos), "arctan": (1, arctan),
    "exp": (1, exp), "ln": (1, ln), "log": (1, ln), "sqrt": (1, sqrt), "abs": (1, absolute),
    "Gamma": (1, gamma), "digamma": (1, digamma), "nprimes": (1, prime_pi),
    "EulerNumber": (1, euler_value), "EulerE": (2, euler_poly),
    "BernoulliB": (1, bernoulli_value), "BernoulliPoly": (2, bernoulli_poly),
    "JacobipolyP": (4, jacobi), "LegendrepolyP": (2, legendre), "ChebyshevpolyT": (2, chebyshev_t),
    "HermitepolyH": (2, hermite_h), "BesselJ": (2, besselj), "Riemannzeta": (1, zeta),
    "erf": (1, erf), "factorial": (1, factorial), "binomial": (2, binomial),
    "Heaviside": (1, heaviside), "Jacobitheta": (2, jacobi_theta1), "LambertW": (1, lambert_w),
    "EulerConstant": (0, lambda eps=0.0: EULER_GAMMA),
    "GoldenRatio": (0, lambda eps=0.0: GOLDEN_RATIO),
}
