"""Polynomial roots by Aberth-Ehrlich simultaneous iteration.

Coefficients are given highest degree first, as for ``numpy.polyval``.
The companion-matrix eigenvalues (``numpy.roots``) serve as fallback when
the simultaneous iteration does not settle.
"""

from __future__ import annotations

import numpy as np

from .errors import RootFindingError

RESIDUAL_TOL = 1e-12


def _initial_guesses(coeffs: np.ndarray) -> np.ndarray:
    deg = len(coeffs) - 1
    # Cauchy-type radius bound, points spread on a circle with an irrational offset.
    ratios = np.abs(coeffs[1:] / coeffs[0]) ** (1.0 / np.arange(1, deg + 1))
    radius = 2.0 * float(np.max(ratios)) if deg else 1.0
    radius = max(radius, 1e-3)
    angles = 2 * np.pi * np.arange(deg) / deg + 0.4
    return radius * 0.5 * np.exp(1j * angles)


def relative_residual(coeffs, roots) -> np.ndarray:
    """|p(r)| / sum |c_k| |r|^k for every root."""
    coeffs = np.asarray(coeffs, dtype=complex)
    roots = np.asarray(roots, dtype=complex)
    scale = np.polyval(np.abs(coeffs), np.abs(roots))
    return np.abs(np.polyval(coeffs, roots)) / np.where(scale > 0, scale, 1.0)


def _polish(coeffs, roots, steps=3):
    dcoeffs = np.polyder(coeffs)
    for _ in range(steps):
        d = np.polyval(dcoeffs, roots)
        ok = d != 0
        step = np.zeros_like(roots)
        step[ok] = np.polyval(coeffs, roots[ok]) / d[ok]
        cand = roots - step
        better = relative_residual(coeffs, cand) <= relative_residual(coeffs, roots)
        roots = np.where(better, cand, roots)
    return roots


def aberth(coeffs, tol: float = RESIDUAL_TOL, max_iter: int = 500) -> np.ndarray:
    """All roots of the polynomial, with multiplicity."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "f")
    if len(c) == 0:
        raise RootFindingError("zero polynomial has no isolated roots")
    deg = len(c) - 1
    if deg == 0:
        return np.zeros(0, dtype=complex)
    dc = np.polyder(c)
    z = _initial_guesses(c)
    for _ in range(max_iter):
        p = np.polyval(c, z)
        dp = np.polyval(dc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        if np.all(np.abs(w) <= 1e-15 * np.maximum(1.0, np.abs(z))):
            break
    z = _polish(c, z)
    res = relative_residual(c, z)
    if np.all(res < tol) and np.all(np.isfinite(z)):
        return z
    fallback = _polish(c, np.roots(c).astype(complex))
    res_fb = relative_residual(c, fallback)
    if np.all(res_fb < tol):
        return fallback
    best = fallback if res_fb.max() < res.max() else z
    raise RootFindingError(
        "polynomial root finder did not reach the residual tolerance",
        residuals=relative_residual(c, best).tolist(),
        roots=best.tolist(),
    )
