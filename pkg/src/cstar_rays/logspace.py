"""Logarithmic coordinates: F(w) = n*w + P(e^w) + Q(e^-w).

``exp(F(w)) == f(exp(w))`` for every w, and ``F(w + 2 pi i) = F(w) + 2 pi i n``.
Tracts are labelled by the essential singularity they accumulate on (side
``"inf"``: Re w -> +inf, side ``"0"``: Re w -> -inf), an angular band index
and a strip index (translation by 2 pi i * strip).  For finite-order maps
the tracts are asymptotic to horizontal bands, so band geometry is read off
the leading coefficients of P and Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BoundaryError,
    BranchError,
    LogRangeError,
    NormalizationError,
    PreconditionError,
)
from .map_core import PuncturedPolyMap, critical_points

ZERO = "0"
INF = "inf"
SIDES = (INF, ZERO)
TWO_PI = 2 * math.pi

EXP_LIMIT = 700.0
R_GRID = 0.5 * 1.1 ** np.arange(200)
SLACK = 0.2
NEWTON_CAP = 200
HALVINGS = 30


@dataclass(frozen=True, order=True)
class TractId:
    side: str
    band: int
    strip: int = 0

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValueError(f"side must be '0' or 'inf', got {self.side!r}")
        object.__setattr__(self, "band", int(self.band))
        object.__setattr__(self, "strip", int(self.strip))

    def translate(self, k: int) -> "TractId":
        return TractId(self.side, self.band, self.strip + k)

    def __str__(self):
        return f"({self.side},{self.band},{self.strip})"


@dataclass(frozen=True)
class TractInfo:
    id: TractId
    target: str
    center_im: float
    band_width: float


def _side_data(m: PuncturedPolyMap, side: str):
    """(degree, leading coefficient, sign of Re w on this side)."""
    if side == INF:
        return m.p, m.lead_inf, 1.0
    return m.q, m.lead_zero, -1.0


def band_center(m: PuncturedPolyMap, side: str, band: int, strip: int = 0) -> float:
    deg, lead, _ = _side_data(m, side)
    phase = float(np.angle(lead))
    if side == INF:
        base = (band * math.pi - phase) / deg
    else:
        base = (band * math.pi + phase) / deg
    return base + TWO_PI * strip


def band_target(band: int) -> str:
    return INF if band % 2 == 0 else ZERO


def tract_info(m, tid: TractId) -> TractInfo:
    m = m.map if isinstance(m, LogTransform) else m
    deg, _, _ = _side_data(m, tid.side)
    if not 0 <= tid.band < 2 * deg:
        raise ValueError(f"band {tid.band} out of range [0, {2 * deg}) on side {tid.side}")
    return TractInfo(
        id=tid,
        target=band_target(tid.band),
        center_im=band_center(m, tid.side, tid.band, tid.strip),
        band_width=math.pi / deg,
    )


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _check_range(m: PuncturedPolyMap, w):
    re = np.real(w)
    if np.any(m.p * re > EXP_LIMIT):
        raise LogRangeError("dominant term a_p*e^(p*w) overflows", term="a_p e^(pw)")
    if np.any(-m.q * re > EXP_LIMIT):
        raise LogRangeError("dominant term b_q*e^(-q*w) overflows", term="b_q e^(-qw)")


def lift(m: PuncturedPolyMap, w):
    _check_range(m, w)
    return m.index_n * w + np.polyval(m.P_poly, np.exp(w)) + np.polyval(m.Q_poly, np.exp(-w))


def lift_deriv(m: PuncturedPolyMap, w):
    _check_range(m, w)
    e, ei = np.exp(w), np.exp(-w)
    return m.index_n + np.polyval(np.polyder(m.P_poly), e) * e - np.polyval(np.polyder(m.Q_poly), ei) * ei


def lift_second_deriv(m: PuncturedPolyMap, w):
    _check_range(m, w)
    e, ei = np.exp(w), np.exp(-w)
    dP, dQ = np.polyder(m.P_poly), np.polyder(m.Q_poly)
    d2P, d2Q = np.polyder(dP), np.polyder(dQ)
    return (
        np.polyval(d2P, e) * e * e + np.polyval(dP, e) * e
        + np.polyval(d2Q, ei) * ei * ei + np.polyval(dQ, ei) * ei
    )


def dominant_log(m: PuncturedPolyMap, w):
    """Log of the dominant exponential term of F at w and the side it belongs to.

    Valid far out in a tract where the real part of F cannot be represented.
    """
    w = np.asarray(w, dtype=complex)
    inf_log = np.log(m.lead_inf) + m.p * w
    zero_log = np.log(m.lead_zero) - m.q * w
    use_inf = inf_log.real >= zero_log.real
    return np.where(use_inf, inf_log, zero_log), use_inf


@dataclass(frozen=True)
class LogTransform:
    """The lift F of a map together with its normalization radius.

    ``r_norm`` and ``delta_line_im`` are computed on construction unless
    given explicitly.
    """

    map: PuncturedPolyMap
    r_norm: float | None = None
    delta_line_im: float | None = None
    samples_per_tract: int = field(default=10_000, compare=False)

    def __post_init__(self):
        if self.r_norm is None:
            object.__setattr__(self, "r_norm", normalization_radius(self))
        if self.delta_line_im is None:
            object.__setattr__(self, "delta_line_im", delta_line(self.map))

    def __call__(self, w):
        return F_eval(self, w)

    @property
    def n_bands(self) -> dict:
        return {INF: 2 * self.map.p, ZERO: 2 * self.map.q}


def F_eval(L: LogTransform, w):
    return lift(L.map, w)


def F_deriv(L: LogTransform, w):
    return lift_deriv(L.map, w)


def F_eval_asymptotic(L: LogTransform, w):
    """exp-free surrogate: log of the dominant term, usable beyond the double range."""
    lg, _ = dominant_log(L.map, w)
    return lg


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------


def _scan_extent(m: PuncturedPolyMap, side: str) -> float:
    """|Re w| beyond which the leading derivative term dwarfs the rest."""
    deg, lead, _ = _side_data(m, side)
    if side == INF:
        others = [j * abs(c) for j, c in enumerate(m.p_coeffs[:-1])]
        far = [j * abs(c) for j, c in enumerate(m.q_coeffs, 1)]
    else:
        others = [j * abs(c) for j, c in enumerate(m.q_coeffs[:-1], 1)]
        far = [j * abs(c) for j, c in enumerate(m.p_coeffs)]
    x = 0.5
    while x < EXP_LIMIT / deg - 1:
        lead_term = deg * abs(lead) * math.exp(deg * x)
        rest = abs(m.index_n) + sum(c * math.exp(j * x) for j, c in enumerate(others)) + sum(far) + 4.0
        if lead_term >= 1e3 * rest:
            return x + 0.5
        x += 0.25
    return EXP_LIMIT / deg


def _rng(seed):
    return np.random.default_rng(seed)


def normalization_samples(m: PuncturedPolyMap, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic sample of one 2 pi strip covering the non-expanding region."""
    x_inf = _scan_extent(m, INF)
    x_zero = _scan_extent(m, ZERO)
    rng = _rng(seed)
    n_grid = int(math.sqrt(count))
    re = np.linspace(-x_zero, x_inf, n_grid)
    im = np.linspace(0, TWO_PI, n_grid, endpoint=False)
    grid = (re[:, None] + 1j * im[None, :]).ravel()
    rand = rng.uniform(-x_zero, x_inf, count) + 1j * rng.uniform(0, TWO_PI, count)
    return np.concatenate([grid, rand])


def normalization_radius(L, samples_per_tract: int | None = None, seed: int = 0) -> float:
    """Smallest R on a fixed geometric grid for which the sampled checks pass.

    (i) |F'| >= 2 wherever |Re F| >= R, (ii) |Re F| < R on the imaginary
    axis, (iii) R exceeds |log| of the singular annulus radii.
    """
    m = L.map if isinstance(L, LogTransform) else L
    if samples_per_tract is None:
        samples_per_tract = L.samples_per_tract if isinstance(L, LogTransform) else 10_000
    n_tracts = 2 * (m.p + m.q)
    w = normalization_samples(m, samples_per_tract * n_tracts, seed)
    fw = lift(m, w)
    dw = lift_deriv(m, w)
    weak = np.abs(dw) < 2
    r_expand = float(np.abs(fw.real[weak]).max()) if np.any(weak) else 0.0
    axis = 1j * np.linspace(0, TWO_PI, 4096, endpoint=False)
    r_axis = float(np.abs(lift(m, axis).real).max())
    lo, hi = critical_points(m).annulus
    r_sing = max(abs(math.log(lo)), abs(math.log(hi)))
    need = max(r_expand, r_axis, r_sing)
    ok = R_GRID > need * (1 + 1e-9) + 1e-12
    if not np.any(ok):
        raise NormalizationError(
            "no grid radius certifies normalization; increase the sampling budget or grid",
            needed=need,
        )
    return float(R_GRID[np.argmax(ok)])


def delta_line(m: PuncturedPolyMap) -> float:
    """Height of the horizontal separating lines: midpoint of the widest gap
    between asymptotic band centers of both sides, in [0, 2 pi)."""
    centers = []
    for side in SIDES:
        deg, _, _ = _side_data(m, side)
        centers += [band_center(m, side, b) % TWO_PI for b in range(2 * deg)]
    c = np.sort(np.array(centers))
    gaps = np.diff(np.concatenate([c, [c[0] + TWO_PI]]))
    i = int(np.argmax(gaps))
    return float((c[i] + gaps[i] / 2) % TWO_PI)


def delta_clips(L: LogTransform, re_extent: float = 10.0, count: int = 2001) -> list[complex]:
    """Points of the line Im w = delta_line_im that fall in the normalized region."""
    x = np.linspace(-re_extent, re_extent, count)
    w = x + 1j * L.delta_line_im
    with np.errstate(over="ignore"):
        keep = (L.map.p * x < EXP_LIMIT) & (-L.map.q * x < EXP_LIMIT)
    fw = lift(L.map, w[keep])
    return [complex(u) for u in w[keep][np.abs(fw.real) > L.r_norm]]


# ---------------------------------------------------------------------------
# tracts
# ---------------------------------------------------------------------------


def tract_catalog(L, strip_range=(0, 0)) -> list[TractInfo]:
    m = L.map if isinstance(L, LogTransform) else L
    lo, hi = strip_range
    out = []
    for side in SIDES:
        deg, _, _ = _side_data(m, side)
        for k in range(lo, hi + 1):
            for b in range(2 * deg):
                out.append(tract_info(m, TractId(side, b, k)))
    return out


def _band_of(m: PuncturedPolyMap, side_inf: np.ndarray, im: np.ndarray):
    """Nearest asymptotic band (band, strip) for each point."""
    phi = float(np.angle(m.lead_inf))
    psi = float(np.angle(m.lead_zero))
    j_inf = np.round((m.p * im + phi) / math.pi).astype(np.int64)
    j_zero = np.round((m.q * im - psi) / math.pi).astype(np.int64)
    j = np.where(side_inf, j_inf, j_zero)
    nb = np.where(side_inf, 2 * m.p, 2 * m.q)
    band = np.mod(j, nb)
    strip = (j - band) // nb
    return band, strip


def locate_many(L: LogTransform, w, slack: float = SLACK, steps: int = 16):
    """Vectorized tract membership. Returns (is_inf_side, band, strip, ok)."""
    m = L.map
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    lg, side_inf = dominant_log(m, w)
    representable = (m.p * w.real <= EXP_LIMIT) & (-m.q * w.real <= EXP_LIMIT)
    re_f = np.full(w.shape, np.nan)
    if np.any(representable):
        re_f[representable] = lift(m, w[representable]).real
    # far out: the dominant term decides
    far = ~representable
    re_f[far] = np.sign(np.cos(lg[far].imag)) * np.inf
    band, strip = _band_of(m, side_inf, w.imag)
    target_inf = band % 2 == 0
    ok = (np.abs(re_f) > L.r_norm) & ((re_f > 0) == target_inf)
    centers = np.array(
        [band_center(m, INF if s else ZERO, int(b), int(k)) for s, b, k in zip(side_inf, band, strip)]
    ) if w.size else np.zeros(0)
    # march toward the band center at fixed Re w
    check = ok & representable
    for frac in np.linspace(0, 1, steps + 1)[1:]:
        if not np.any(check):
            break
        u = w[check].real + 1j * (w[check].imag + frac * (centers[check] - w[check].imag))
        fu = lift(m, u).real
        good = (np.abs(fu) > L.r_norm * (1 - slack)) & ((fu > 0) == target_inf[check])
        idx = np.flatnonzero(check)
        ok[idx[~good]] = False
        check[idx[~good]] = False
    return side_inf, band, strip, ok


def locate_tract(L: LogTransform, w, diagnostics: list | None = None) -> TractId | None:
    side_inf, band, strip, ok = locate_many(L, np.array([complex(w)]))
    if not ok[0]:
        if diagnostics is not None:
            diagnostics.append(f"w={complex(w)} is not certified inside a tract")
        return None
    return TractId(INF if side_inf[0] else ZERO, int(band[0]), int(strip[0]))


def in_tract_mask(L: LogTransform, w, tid: TractId) -> np.ndarray:
    side_inf, band, strip, ok = locate_many(L, w)
    return ok & (side_inf == (tid.side == INF)) & (band == tid.band) & (strip == tid.strip)


# ---------------------------------------------------------------------------
# inverse branches
# ---------------------------------------------------------------------------


def asymptotic_inverse(m: PuncturedPolyMap, zeta, tid: TractId, refine: int = 1):
    """Leading-term inversion of F on the band of ``tid``, with fixed-point
    refinement of the n*w correction."""
    info = tract_info(m, tid)
    deg, lead, sgn = _side_data(m, tid.side)
    zeta = np.asarray(zeta, dtype=complex)
    a0 = m.p_coeffs[0]
    wt = np.zeros_like(zeta)
    for _ in range(refine + 1):
        lg = np.log((zeta - m.index_n * wt - a0) / lead)
        if sgn > 0:
            j = np.round((deg * info.center_im - lg.imag) / TWO_PI)
            wt = (lg + 1j * TWO_PI * j) / deg
        else:
            j = np.round((-deg * info.center_im - lg.imag) / TWO_PI)
            wt = -(lg + 1j * TWO_PI * j) / deg
    return wt


def inverse_branch(L: LogTransform, zeta, tract: TractId, tol: float = 1e-10):
    """The unique preimage of ``zeta`` in ``tract``.

    Accepts a scalar or an array of targets; every target must lie in the
    half-plane |Re zeta| > r_norm that the tract covers.
    """
    m = L.map
    scalar = np.ndim(zeta) == 0
    z = np.atleast_1d(np.asarray(zeta, dtype=complex))
    info = tract_info(m, tract)
    if np.any(np.abs(z.real) <= L.r_norm):
        raise PreconditionError(
            f"targets must satisfy |Re zeta| > r_norm = {L.r_norm}", tract=str(tract)
        )
    want_pos = info.target == INF
    if np.any((z.real > 0) != want_pos):
        raise PreconditionError(
            f"tract {tract} maps onto the {'right' if want_pos else 'left'} half-plane",
            tract=str(tract),
        )
    w = asymptotic_inverse(m, z, tract)
    _, _, sgn = _side_data(m, tract.side)
    c, bw = info.center_im, info.band_width

    def residual(u):
        return np.abs(lift(m, u) - z)

    scale = np.maximum(1.0, np.abs(z))
    res = residual(w)
    active = np.ones(z.shape, dtype=bool)
    trace = []
    for it in range(NEWTON_CAP):
        if not np.any(active):
            break
        idx = np.flatnonzero(active)
        wa, za = w[idx], z[idx]
        step = (lift(m, wa) - za) / lift_deriv(m, wa)
        lam = np.ones(idx.shape)
        ra = res[idx]
        cand = wa - step
        for _ in range(HALVINGS):
            bad = (np.abs(cand.imag - c) >= bw) | (sgn * cand.real <= 0)
            ok_range = (m.p * cand.real <= EXP_LIMIT) & (-m.q * cand.real <= EXP_LIMIT)
            bad |= ~ok_range
            rc = np.full(cand.shape, np.inf)
            rc[~bad] = np.abs(lift(m, cand[~bad]) - za[~bad])
            bad |= ~(rc <= ra) & (ra > tol * scale[idx] * 1e-3)
            if not np.any(bad):
                break
            lam[bad] *= 0.5
            cand[bad] = wa[bad] - lam[bad] * step[bad]
        moved = np.abs(cand - wa)
        w[idx] = cand
        res[idx] = np.abs(lift(m, cand) - za)
        trace.append(float(res[idx].max()))
        done = (moved <= 4e-16 * np.maximum(1.0, np.abs(cand))) | (
            res[idx] <= 1e-15 * scale[idx]
        )
        active[idx[done]] = False
    bad = ~(res <= tol * scale)
    bad |= np.abs(w.imag - c) >= bw
    if np.any(bad):
        raise BranchError(
            f"inverse branch on {tract} failed for {int(bad.sum())} target(s)",
            tract=str(tract),
            worst_residual=float(np.max(res[bad] / scale[bad])),
            trace=trace[-5:],
        )
    return complex(w[0]) if scalar else w


def solve_preimage(m: PuncturedPolyMap, zeta: complex, seed: complex, tol: float = 1e-12, max_iter: int = 60):
    """Plain damped Newton for F(w) = zeta from ``seed``; None if it stalls."""
    w = complex(seed)
    scale = max(1.0, abs(zeta))
    try:
        r = abs(complex(lift(m, w)) - zeta)
        for _ in range(max_iter):
            if r <= 1e-15 * scale:
                break
            d = complex(lift_deriv(m, w))
            if d == 0:
                return None
            step = (complex(lift(m, w)) - zeta) / d
            lam = 1.0
            for _ in range(20):
                cand = w - lam * step
                rc = abs(complex(lift(m, cand)) - zeta)
                if rc < r or rc <= 1e-15 * scale:
                    break
                lam *= 0.5
            else:
                break
            if abs(cand - w) <= 4e-16 * max(1.0, abs(w)):
                w, r = cand, rc
                break
            w, r = cand, rc
    except LogRangeError:
        return None
    return w if r <= tol * scale else None


# ---------------------------------------------------------------------------
# fundamental domains
# ---------------------------------------------------------------------------


def fundamental_strip_of_im(L: LogTransform, im: float, boundary_tol: float = 1e-9) -> int:
    x = (im - L.delta_line_im) / TWO_PI
    k = math.floor(x)
    if min(x - k, k + 1 - x) * TWO_PI < boundary_tol:
        raise BoundaryError("point lies on a separating line", im=im)
    return k


def fundamental_domain_index(L: LogTransform, w) -> int:
    if locate_tract(L, w) is None:
        raise PreconditionError("w is not in a certified tract", w=complex(w))
    return fundamental_strip_of_im(L, float(np.imag(F_eval(L, w))))


def tract_strip_index(L: LogTransform, tid: TractId) -> int:
    """Fundamental strip containing the asymptotic center line of a tract."""
    return math.floor((tract_info(L.map, tid).center_im - L.delta_line_im) / TWO_PI)


# ---------------------------------------------------------------------------
# expansivity
# ---------------------------------------------------------------------------


@dataclass
class ExpansivityReport:
    n_points: int
    excluded: int
    min_abs_deriv: float
    deriv_violations: int
    lemma_violations: int
    min_lemma_margin: float
    n_pairs: int
    pair_violations: int
    min_pair_ratio: float
    r_norm: float

    @property
    def passed(self) -> bool:
        return self.deriv_violations == 0 and self.lemma_violations == 0 and self.pair_violations == 0


def sample_tract_points(
    L: LogTransform, tid: TractId, count: int, rng, re_max: float | None = None, stats: dict | None = None
):
    """Random points certified inside ``tid`` (|Re F| > r_norm).

    If ``stats`` is given, ``stats["below"]`` accumulates the number of raw
    candidates rejected because |Re F| <= r_norm there.
    """
    m = L.map
    info = tract_info(m, tid)
    deg, _, sgn = _side_data(m, tid.side)
    x_c = _scan_extent(m, tid.side)
    if re_max is None:
        re_max = min(8 * math.pi + 10.0, 600.0 / deg)
    got = []
    total = 0
    for _ in range(50):
        n = 2 * (count - total) + 64
        half = n // 2
        re = np.concatenate([rng.uniform(0, re_max, n - half), rng.uniform(0, x_c, half)])
        im = info.center_im + rng.uniform(-0.5, 0.5, n) * info.band_width
        w = sgn * re + 1j * im
        keep = in_tract_mask(L, w, tid)
        if stats is not None:
            with np.errstate(over="ignore", invalid="ignore"):
                below = np.abs(lift(m, w).real) <= L.r_norm
            stats["below"] = stats.get("below", 0) + int(below.sum())
        got.append(w[keep])
        total += int(keep.sum())
        if total >= count:
            break
    pts = np.concatenate(got)[:count]
    return pts


def expansivity_report(
    L: LogTransform, sample_count: int = 10_000, pair_count: int = 1000, seed: int = 1
) -> ExpansivityReport:
    rng = _rng(seed)
    tracts = tract_catalog(L)
    per = max(1, sample_count // len(tracts))
    R = L.r_norm
    n_points = excluded = dviol = lviol = 0
    min_d = math.inf
    min_margin = math.inf
    pts_by_tract = {}
    for info in tracts:
        stats: dict = {}
        w = sample_tract_points(L, info.id, per, rng, stats=stats)
        excluded += stats.get("below", 0)
        fw = lift(L.map, w)
        dw = np.abs(lift_deriv(L.map, w))
        sel = np.abs(fw.real) >= R
        excluded += int((~sel).sum())
        w, fw, dw = w[sel], fw[sel], dw[sel]
        n_points += w.size
        if w.size:
            min_d = min(min_d, float(dw.min()))
            dviol += int((dw < 2).sum())
            bound = np.abs(fw.real) / (4 * math.pi) - R
            lviol += int((dw < bound).sum())
            min_margin = min(min_margin, float((dw - bound).min()))
        pts_by_tract[info.id] = w
    # same-tract pairs at distance >= 8 pi
    pairs = 0
    pviol = 0
    min_ratio = math.inf
    keys = [k for k, v in pts_by_tract.items() if v.size >= 2]
    attempts = 0
    while pairs < pair_count and keys and attempts < 200:
        attempts += 1
        for k in keys:
            v = pts_by_tract[k]
            i = rng.integers(0, v.size, 4096)
            j = rng.integers(0, v.size, 4096)
            a, b = v[i], v[j]
            far = np.abs(a - b) >= 8 * math.pi
            a, b = a[far], b[far]
            if not a.size:
                continue
            need = pair_count - pairs
            a, b = a[:need], b[:need]
            fa, fb = lift(L.map, a), lift(L.map, b)
            lhs = np.abs(fa - fb)
            rhs = np.exp(np.abs(a - b) / (8 * math.pi)) * (np.minimum(np.abs(fa.real), np.abs(fb.real)) - R)
            pviol += int((lhs < rhs).sum())
            ratio = lhs / np.where(rhs > 0, rhs, np.nan)
            if np.any(np.isfinite(ratio)):
                min_ratio = min(min_ratio, float(np.nanmin(ratio)))
            pairs += a.size
            if pairs >= pair_count:
                break
    return ExpansivityReport(
        n_points=n_points,
        excluded=excluded,
        min_abs_deriv=min_d,
        deriv_violations=dviol,
        lemma_violations=lviol,
        min_lemma_margin=min_margin,
        n_pairs=pairs,
        pair_violations=pviol,
        min_pair_ratio=min_ratio,
        r_norm=R,
    )


# ---------------------------------------------------------------------------
# tract boundaries (for plotting)
# ---------------------------------------------------------------------------


def tract_boundary(L: LogTransform, tid: TractId, re_values, bisections: int = 50):
    """Upper and lower boundary curves |Re F| = r_norm of a tract, sampled at
    the given |Re w| values. Points where the center line is not inside the
    tract are skipped."""
    m = L.map
    info = tract_info(m, tid)
    _, _, sgn = _side_data(m, tid.side)
    want_pos = info.target == INF
    re = sgn * np.asarray(re_values, dtype=float)
    re = re[(m.p * re <= EXP_LIMIT) & (-m.q * re <= EXP_LIMIT)]

    def inside(x, y):
        v = lift(m, x + 1j * y).real
        return (np.abs(v) > L.r_norm) & ((v > 0) == want_pos)

    re = re[inside(re, np.full(re.shape, info.center_im))]
    curves = []
    for direction in (1, -1):
        x = re[~inside(re, np.full(re.shape, info.center_im + direction * info.band_width))]
        a, b = np.zeros(x.shape), np.full(x.shape, info.band_width)
        for _ in range(bisections):
            mid = 0.5 * (a + b)
            ok = inside(x, info.center_im + direction * mid)
            a = np.where(ok, mid, a)
            b = np.where(ok, b, mid)
        curves.append([complex(u, info.center_im + direction * h) for u, h in zip(x, 0.5 * (a + b))])
    return curves[0], curves[1]
