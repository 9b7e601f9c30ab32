"""Finite-order transcendental self-maps of the punctured plane.

A map is ``f(z) = z**n * exp(P(z) + Q(1/z))`` with polynomials ``P`` (degree
p >= 1) and ``Q`` (degree q >= 1, no constant term).  Everything here works
in double precision on the plane; anything that would overflow the
exponential belongs in :mod:`cstar_rays.logspace`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DomainError,
    InvalidMapError,
    MapRangeError,
    OrbitSearchError,
)
from .roots import aberth

ANNULUS_MARGIN = 0.10
PARABOLIC_TOL = 1e-8
PARABOLIC_MAX_ORDER = 64

# exp() is finite and nonzero for real parts in this window
EXP_MAX = 709.0
EXP_MIN = -708.0


def _trim(coeffs: Sequence[complex]) -> tuple[complex, ...]:
    out = [complex(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class PuncturedPolyMap:
    """``z**index_n * exp(P(z) + Q(1/z))``.

    ``p_coeffs`` holds a_0..a_p (ascending), ``q_coeffs`` holds b_1..b_q.
    """

    index_n: int
    p_coeffs: tuple[complex, ...]
    q_coeffs: tuple[complex, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        p = _trim(self.p_coeffs)
        q = _trim(self.q_coeffs)
        if int(self.index_n) != self.index_n:
            raise InvalidMapError("index_n must be an integer", field="n")
        if len(p) < 2:
            raise InvalidMapError("P must have degree >= 1", field="P")
        if len(q) < 1:
            raise InvalidMapError("Q must have degree >= 1", field="Q")
        if not all(np.isfinite(c) for c in p + q):
            raise InvalidMapError("coefficients must be finite")
        object.__setattr__(self, "index_n", int(self.index_n))
        object.__setattr__(self, "p_coeffs", p)
        object.__setattr__(self, "q_coeffs", q)

    @property
    def p(self) -> int:
        return len(self.p_coeffs) - 1

    @property
    def q(self) -> int:
        return len(self.q_coeffs)

    @property
    def lead_inf(self) -> complex:
        return self.p_coeffs[-1]

    @property
    def lead_zero(self) -> complex:
        return self.q_coeffs[-1]

    # polyval-ready coefficient arrays (highest degree first)
    @property
    def P_poly(self) -> np.ndarray:
        return np.array(self.p_coeffs[::-1], dtype=complex)

    @property
    def Q_poly(self) -> np.ndarray:
        return np.array(self.q_coeffs[::-1] + (0j,), dtype=complex)

    def exponent(self, z):
        """P(z) + Q(1/z)."""
        return np.polyval(self.P_poly, z) + np.polyval(self.Q_poly, 1 / z)

    def __call__(self, z):
        return evaluate(self, z)

    def describe(self) -> str:
        def poly(cs, var, start):
            terms = []
            for k, c in enumerate(cs, start):
                if c == 0:
                    continue
                cs_ = f"{c.real:g}" if c.imag == 0 else f"({c.real:g}{c.imag:+g}i)"
                terms.append(cs_ if k == 0 else f"{cs_}*{var}^{k}")
            return " + ".join(terms) or "0"

        return (
            f"z^{self.index_n} * exp(P(z) + Q(1/z)), "
            f"P = {poly(self.p_coeffs, 'z', 0)}, Q = {poly(self.q_coeffs, 'w', 1)}"
        )


@dataclass(frozen=True)
class OrderData:
    rho_inf: int
    rho_zero: int

    # lower orders coincide with the orders for every transcendental self-map of C*
    @property
    def lambda_inf(self) -> int:
        return self.rho_inf

    @property
    def lambda_zero(self) -> int:
        return self.rho_zero


@dataclass(frozen=True)
class SingularData:
    critical_points: tuple[complex, ...]
    critical_values: tuple[complex, ...]
    annulus: tuple[float, float]
    residuals: tuple[float, ...] = ()


@dataclass(frozen=True)
class PeriodicOrbit:
    period: int
    points: tuple[complex, ...]
    multiplier: complex
    classification: str
    residual: float = 0.0


def _check_nonzero(z):
    if np.any(np.asarray(z) == 0):
        raise DomainError("the map is undefined at z = 0")


def evaluate(m: PuncturedPolyMap, z):
    """f(z). Accepts scalars or numpy arrays.

    Raises :class:`MapRangeError` when the value would overflow or underflow
    the double range; use the logarithmic transform for such points.
    """
    _check_nonzero(z)
    scalar = np.isscalar(z)
    zz = np.asarray(z, dtype=complex)
    e = m.exponent(zz)
    log_mod = e.real + m.index_n * np.log(np.abs(zz))
    if np.any(log_mod > EXP_MAX) or np.any(log_mod < EXP_MIN) or not np.all(np.isfinite(e)):
        raise MapRangeError(
            "exp(P(z)+Q(1/z)) leaves the double range; evaluate F in log coordinates",
            log_modulus=float(np.nanmax(np.abs(log_mod))),
        )
    val = zz**m.index_n * np.exp(e)
    return complex(val) if scalar else val


def log_evaluate(m: PuncturedPolyMap, z):
    """log f(z) = n log z + P(z) + Q(1/z) (principal log of z), never overflows."""
    _check_nonzero(z)
    return m.index_n * np.log(z) + m.exponent(z)


def log_derivative(m: PuncturedPolyMap, z):
    """f'(z)/f(z) = n/z + P'(z) - Q'(1/z)/z**2."""
    _check_nonzero(z)
    dP = np.polyder(m.P_poly)
    dQ = np.polyder(m.Q_poly)
    return m.index_n / z + np.polyval(dP, z) - np.polyval(dQ, 1 / z) / z**2


def derivative(m: PuncturedPolyMap, z):
    return evaluate(m, z) * log_derivative(m, z)


def order(m: PuncturedPolyMap) -> OrderData:
    return OrderData(rho_inf=m.p, rho_zero=m.q)


def critical_polynomial(m: PuncturedPolyMap) -> np.ndarray:
    """Coefficients (highest first) of z**(q+1) * f'/f, a polynomial of degree p+q."""
    p, q = m.p, m.q
    # ascending coefficient list
    c = np.zeros(p + q + 1, dtype=complex)
    c[q] += m.index_n
    for j in range(1, p + 1):
        c[q + j] += j * m.p_coeffs[j]
    for j in range(1, q + 1):
        c[q - j] -= j * m.q_coeffs[j - 1]
    return c[::-1]


def critical_points(m: PuncturedPolyMap, margin: float = ANNULUS_MARGIN) -> SingularData:
    """Critical points, critical values and an annulus around the singular values."""
    poly = critical_polynomial(m)
    cps = aberth(poly)
    cps = cps[np.lexsort((cps.imag, cps.real))]
    cvs = np.array([evaluate(m, c) for c in cps], dtype=complex)
    mods = np.abs(cvs)
    annulus = (float(mods.min() * (1 - margin)), float(mods.max() * (1 + margin)))
    res = np.abs(log_derivative(m, cps))
    return SingularData(
        critical_points=tuple(complex(c) for c in cps),
        critical_values=tuple(complex(v) for v in cvs),
        annulus=annulus,
        residuals=tuple(float(r) for r in res),
    )


def classify_multiplier(mult: complex, tol: float = PARABOLIC_TOL) -> str:
    a = abs(mult)
    if abs(a - 1) <= tol:
        theta = cmath.phase(mult) / (2 * math.pi)
        for q in range(1, PARABOLIC_MAX_ORDER + 1):
            k = round(theta * q)
            if abs(mult - cmath.exp(2j * math.pi * k / q)) <= tol:
                return "parabolic"
        return "indifferent"
    return "attracting" if a < 1 else "repelling"


def _iterate(m, z, k):
    pts = [z]
    for _ in range(k):
        pts.append(evaluate(m, pts[-1]))
    return pts


def find_periodic_orbit(
    m: PuncturedPolyMap,
    period: int,
    seed: complex,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> PeriodicOrbit:
    """Newton's method on f^period(z) - z from ``seed``.

    The returned orbit carries its exact period, which may be a proper
    divisor of ``period``.
    """
    if period < 1:
        raise ValueError("period must be >= 1")
    seed = complex(seed)
    if seed == 0:
        raise DomainError("seed must be nonzero")
    z = seed
    converged = False
    for _ in range(max_iter):
        try:
            pts = _iterate(m, z, period)
        except MapRangeError as exc:
            raise OrbitSearchError("orbit left the representable range", seed=seed) from exc
        g = pts[-1] - z
        scale = max(1.0, abs(z))
        if abs(g) < tol * scale:
            converged = True
            break
        dfp = 1 + 0j
        for u, v in zip(pts[:-1], pts[1:]):
            dfp *= v * log_derivative(m, u)
        denom = dfp - 1
        if denom == 0 or not np.isfinite(denom):
            raise OrbitSearchError("singular Newton step", z=z)
        step = g / denom
        lam = 1.0
        for _ in range(30):
            cand = z - lam * step
            if cand != 0:
                try:
                    gc = _iterate(m, cand, period)[-1] - cand
                    if abs(gc) < abs(g):
                        break
                except MapRangeError:
                    pass
            lam *= 0.5
        else:
            cand = z - step
        if cand == 0 or not np.isfinite(cand):
            raise OrbitSearchError("Newton iterate left C*", z=z)
        if abs(cand - z) < 1e-15 * scale:
            z = cand
            converged = abs(_iterate(m, z, period)[-1] - z) < 1e3 * tol * scale
            break
        z = cand
    if not converged:
        raise OrbitSearchError("Newton did not converge", seed=seed, last=z)

    pts = _iterate(m, z, period)
    residual = abs(pts[-1] - z)
    exact = period
    for d in range(1, period):
        if period % d == 0 and abs(pts[d] - z) < 1e-8 * max(1.0, abs(z)):
            exact = d
            break
    cycle = tuple(complex(u) for u in pts[:exact])
    mult = 1 + 0j
    for i, u in enumerate(cycle):
        mult *= pts[i + 1] * log_derivative(m, u)
    return PeriodicOrbit(
        period=exact,
        points=cycle,
        multiplier=complex(mult),
        classification=classify_multiplier(mult),
        residual=float(residual),
    )


@dataclass(frozen=True)
class PostsingularSample:
    orbits: tuple[tuple[complex, ...], ...]
    bounded: bool
    depth: int
    annulus: tuple[float, float]


def postsingular_sample(
    m: PuncturedPolyMap,
    depth: int,
    annulus: tuple[float, float] | None = None,
) -> PostsingularSample:
    """Forward orbits of the critical values, truncated at ``depth``.

    ``bounded`` is a heuristic: all computed points stayed inside
    ``annulus`` (default ``exp(-20) < |z| < exp(20)``).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    lo, hi = annulus if annulus is not None else (math.exp(-20), math.exp(20))
    sing = critical_points(m)
    bounded = True
    orbits = []
    for v in sing.critical_values:
        orb = [v]
        for _ in range(depth):
            if not lo <= abs(orb[-1]) <= hi:
                break
            try:
                orb.append(evaluate(m, orb[-1]))
            except MapRangeError:
                bounded = False
                break
        if any(not lo <= abs(u) <= hi for u in orb):
            bounded = False
        orbits.append(tuple(orb))
    return PostsingularSample(tuple(orbits), bounded, depth, (lo, hi))
