"""Dynamic rays: pullback tracing, landing, brokenness, head-start checks.

A ray point with address (T_0, T_1, ...) at parameter t is the limit, as
the depth N grows, of

    F_{T_0}^{-1} o ... o F_{T_{N-1}}^{-1} (seed_N(t)),

where seed_N(t) sits on the center line of T_N at |Re w| = t_N, with
t_0 = t and t_{k+1} = |lead(T_k)| * exp(deg(T_k) * t_k) (the growth of the
dominant term).  This parametrization satisfies F(ray_s(t)) = ray_{shift s}(t_1)
exactly, which the landing search relies on.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BranchError,
    CstarError,
    InadmissibleError,
    LogRangeError,
    OrbitSearchError,
    PreconditionError,
    SamplingError,
    SpeedOrderError,
    TraceError,
)
from .logspace import (
    EXP_LIMIT,
    INF,
    LogTransform,
    TractId,
    _side_data,
    in_tract_mask,
    inverse_branch,
    lift,
    lift_deriv,
    lift_second_deriv,
    sample_tract_points,
    solve_preimage,
    tract_catalog,
    tract_info,
)
from .map_core import PeriodicOrbit, critical_points, find_periodic_orbit
from .symbolic import (
    EssentialItinerary,
    ExternalAddress,
    HeadStartProfile,
    admissible,
    enumerate_addresses,
    sort_addresses,
)

LOG_SEED_MAX = 690.0
MAX_DEPTH = 16
BROKEN_TOL = 1e-6
T_SHRINK = 0.7
HEAD_START_SLOPES = (1.25, 1.5, 2.0, 4.0)
HEAD_START_OFFSETS = (1.0, 10.0, 100.0, 1000.0)


@dataclass
class RayTail:
    address: ExternalAddress
    t: np.ndarray
    w: np.ndarray
    depth_used: int
    converged: bool
    endpoint_estimate: complex | None = None
    depths: np.ndarray | None = None
    ratios: list = field(default_factory=list)
    # orbit[k][i] = F^k(w[i]) as produced by the pullback, k <= min depth
    orbit: list = field(default_factory=list)

    @property
    def z(self) -> np.ndarray:
        return np.exp(self.w)

    @property
    def samples(self) -> list[tuple[float, complex, complex]]:
        return [(float(t), complex(w), complex(z)) for t, w, z in zip(self.t, self.w, self.z)]

    def __len__(self):
        return len(self.t)


@dataclass
class LandingReport:
    ray: RayTail
    landing_point: complex | None
    orbit: PeriodicOrbit | None
    verdict: str
    cycle_rays: list = field(default_factory=list)
    rounds: int = 0
    diagnostics: list = field(default_factory=list)
    critical_hit: complex | None = None


# ---------------------------------------------------------------------------
# tracing
# ---------------------------------------------------------------------------


def _log_growth(m, tid: TractId, t):
    deg, lead, _ = _side_data(m, tid.side)
    return math.log(abs(lead)) + deg * np.asarray(t, dtype=float)


def _seed(m, tid: TractId, t, offset=0j):
    info = tract_info(m, tid)
    _, _, sgn = _side_data(m, tid.side)
    return sgn * np.asarray(t, dtype=float) + 1j * info.center_im + offset


def _chain_ratios(prev, cur):
    """|cur_k - prev_k| / |cur_{k+1} - prev_{k+1}| along two pullback chains.

    Each level is one inverse branch applied to the next, so every ratio is
    a measured contraction factor.  Denominators at rounding level are
    skipped.
    """
    out = []
    eps = np.finfo(float).eps
    for k in range(len(prev) - 1):
        num = abs(cur[k] - prev[k])
        den = abs(cur[k + 1] - prev[k + 1])
        if den > 1e3 * eps * max(1.0, abs(cur[k + 1])):
            out.append(float(num / den))
    return out


def trace_ray_tail(
    L: LogTransform,
    addr: ExternalAddress,
    t_grid,
    tol: float = 1e-12,
    max_depth: int = MAX_DEPTH,
    seed_offset: complex = 0j,
) -> RayTail:
    """Trace the ray tail of an admissible address at the parameters ``t_grid``."""
    if not admissible(addr):
        raise InadmissibleError(f"address {addr} is not admissible")
    m = L.map
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("t_grid must be a nonempty 1-d sequence")
    if np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    if t[0] <= L.r_norm:
        raise PreconditionError(f"t must exceed r_norm = {L.r_norm}", t_min=float(t[0]))

    n = t.size
    # parameters along the seed chain; None once the next level is unrepresentable
    levels = [t]
    saturated_at = np.full(n, -1)
    for k in range(max_depth + 1):
        lg = _log_growth(m, addr[k], levels[k])
        nxt = np.where(lg < LOG_SEED_MAX, np.exp(np.minimum(lg, LOG_SEED_MAX)), np.inf)
        if np.any(nxt[np.isfinite(nxt)] <= L.r_norm):
            raise TraceError(
                f"seed chain drops below r_norm at depth {k + 1}; raise t_min", depth=k + 1
            )
        newly = (saturated_at < 0) & ~np.isfinite(nxt)
        saturated_at[newly] = k + 1
        levels.append(nxt)
        if np.all(saturated_at >= 0):
            break

    base = np.full(n, np.nan + 0j)
    done = np.zeros(n, dtype=bool)
    depth_of = np.zeros(n, dtype=int)
    ratios: list[float] = []
    orbits: dict[int, list] = {}

    # when level d+1 overflows, F^{-1}_{T_d}(seed_{d+1}) equals the bare
    # center-line point at level d to full precision, so no offset is applied
    exact0 = saturated_at == 1
    if np.any(exact0):
        idx = np.flatnonzero(exact0)
        base[idx] = _seed(m, addr[0], t[idx])
        for i in idx:
            orbits[i] = [base[i]]
        done[idx] = True

    for depth in range(1, max_depth + 1):
        if np.all(done):
            break
        idx = np.flatnonzero(~done)
        exact = saturated_at[idx] == depth + 1
        zeta = _seed(m, addr[depth], levels[depth][idx], np.where(exact, 0j, seed_offset))
        chain = [zeta]
        try:
            for k in range(depth - 1, -1, -1):
                zeta = inverse_branch(L, zeta, addr[k])
                chain.append(zeta)
        except (BranchError, PreconditionError) as exc:
            raise TraceError(f"pullback failed at depth {depth}, level {k}: {exc}", depth=depth) from exc
        new = zeta
        disp = np.abs(new - base[idx])
        levels_new = chain[::-1]  # levels_new[k] lies in T_k
        for i_local, i in enumerate(idx):
            prev = orbits.get(i)
            if prev is not None:
                ratios.extend(_chain_ratios(prev, [c[i_local] for c in levels_new]))
            orbits[i] = [c[i_local] for c in levels_new]
        base[idx] = new
        depth_of[idx] = depth
        conv = exact | (~np.isnan(disp) & (disp < tol * np.maximum(1.0, np.abs(new))))
        done[idx[conv]] = True

    converged = bool(np.all(done))
    min_len = min(len(orbits[i]) for i in range(n))
    orbit = [np.array([orbits[i][k] for i in range(n)]) for k in range(min_len)]
    return RayTail(
        address=addr,
        t=t,
        w=base,
        depth_used=int(depth_of.max()),
        converged=converged,
        depths=depth_of,
        ratios=ratios,
        orbit=orbit,
    )


# ---------------------------------------------------------------------------
# brokenness
# ---------------------------------------------------------------------------


def _forward(m, w):
    """One step of F on an array, NaN where the result is not representable."""
    out = np.full(w.shape, np.nan + 0j)
    ok = np.isfinite(w) & (m.p * w.real <= EXP_LIMIT) & (-m.q * w.real <= EXP_LIMIT)
    if np.any(ok):
        out[ok] = lift(m, w[ok])
    return out


def _plane(w):
    out = np.full(w.shape, np.nan + 0j)
    ok = np.isfinite(w) & (np.abs(w.real) < EXP_LIMIT)
    out[ok] = np.exp(w[ok])
    return out


def _seg_dist(a, b, c):
    with np.errstate(over="ignore", invalid="ignore"):
        d = b - a
        denom = np.abs(d) ** 2
        s = np.where(denom > 0, ((c - a) * np.conj(d)).real / np.where(denom > 0, denom, 1), 0.0)
        s = np.clip(np.nan_to_num(s, nan=0.0), 0.0, 1.0)
        return np.abs(a + s * d - c)


def _image_after(m, w, n):
    for _ in range(n):
        w = _forward(m, w)
    return _plane(w)


def is_broken(
    L: LogTransform,
    ray: RayTail,
    horizon: int = 1,
    tol: float = BROKEN_TOL,
    refine_depth: int = 14,
) -> bool:
    """Does some forward image f^n(ray), n <= horizon, pass within ``tol`` of a
    critical point?  Distances are taken along the sampled polyline with
    local refinement of suspicious segments."""
    m = L.map
    cps = np.array(critical_points(m).critical_points)
    w = np.asarray(ray.w)
    for n in range(horizon + 1):
        z = _image_after(m, w, n)
        for c in cps:
            if np.any(np.abs(z - c) < tol):
                return True
            a, b = z[:-1], z[1:]
            fin = np.isfinite(a) & np.isfinite(b)
            d = np.full(a.shape, np.inf)
            d[fin] = _seg_dist(a[fin], b[fin], c)
            for i in np.flatnonzero(d < max(10 * tol, 1e-3)):
                if _refine_segment(m, w[i], w[i + 1], n, c, tol, refine_depth):
                    return True
    return False


def _refine_segment(m, wa, wb, n, c, tol, depth):
    u = wa + (wb - wa) * np.linspace(0, 1, 9)
    z = _image_after(m, u, n)
    if np.any(np.abs(z - c) < tol):
        return True
    if depth == 0:
        return False
    a, b = z[:-1], z[1:]
    fin = np.isfinite(a) & np.isfinite(b)
    if not np.any(fin):
        return False
    d = np.full(a.shape, np.inf)
    d[fin] = _seg_dist(a[fin], b[fin], c)
    best = np.argsort(d)[:2]
    return any(
        d[i] < max(10 * tol, 2 * np.abs(b[i] - a[i])) and _refine_segment(m, u[i], u[i + 1], n, c, tol, depth - 1)
        for i in best
    )


# ---------------------------------------------------------------------------
# landing
# ---------------------------------------------------------------------------


class _CriticalHit(Exception):
    def __init__(self, w_crit):
        self.w_crit = w_crit


def _critical_near(m, w, max_iter=60):
    """Newton on F'(w) = 0 from w."""
    for _ in range(max_iter):
        d1 = complex(lift_deriv(m, w))
        d2 = complex(lift_second_deriv(m, w))
        if d2 == 0:
            return None
        step = d1 / d2
        w = w - step
        if abs(step) < 1e-15 * max(1.0, abs(w)):
            break
    return w if abs(complex(lift_deriv(m, w))) < 1e-9 else None


def _continue_path(m, w_a, z_a, z_b, min_step):
    """Track the preimage of the segment [z_a, z_b] starting from w_a.

    Raises _CriticalHit when the path runs into a critical value.
    """
    w, za = w_a, z_a
    target = z_b
    stack = [z_b]
    while stack:
        zb = stack[-1]
        d = complex(lift_deriv(m, w))
        if d == 0:
            raise _CriticalHit(w)
        pred = w + (zb - za) / d
        cand = solve_preimage(m, zb, pred)
        ok = cand is not None and abs(cand - pred) <= 0.3 * abs(pred - w) + 1e-14 * max(1.0, abs(w))
        if ok:
            w, za = cand, zb
            stack.pop()
            continue
        if abs(zb - za) < min_step * max(1.0, abs(za)):
            wc = _critical_near(m, w)
            if wc is not None and abs(wc - w) < 1e-2:
                vc = complex(lift(m, wc))
                if _seg_dist(np.array([za]), np.array([target]), vc)[0] < 1e-9 * max(1.0, abs(vc)):
                    raise _CriticalHit(wc)
            raise TraceError("continuation stalled away from a critical value", w=w)
        stack.append(0.5 * (za + zb))
    return w


def _project_on_polyline(pts: np.ndarray, x: complex) -> int:
    """Index i of the inner vertex of the segment nearest to x."""
    if len(pts) == 1:
        return 0
    d = _seg_dist(pts[:-1], pts[1:], x)
    return int(np.argmin(d))


def _lower_t(m, addr: ExternalAddress, r_norm: float) -> float:
    t = r_norm * 1.05 + 0.05
    for _ in range(200):
        ok = True
        for k in range(len(addr.period)):
            if math.exp(float(_log_growth(m, addr[k], t))) <= r_norm * 1.05:
                ok = False
        if ok:
            return t
        t *= 1.05
    raise TraceError("no admissible lower parameter for this address")


def land_periodic_ray(
    L: LogTransform,
    addr: ExternalAddress,
    tol: float = 1e-10,
    land_tol: float = 1e-6,
    max_rounds: int = 200,
    t_count: int = 48,
    min_step: float = 1e-13,
) -> LandingReport:
    """Extend a periodic ray toward its landing point by pulling back the
    cycle of rays, then polish the endpoint as a periodic point."""
    if not addr.is_periodic:
        raise PreconditionError("land_periodic_ray needs a purely periodic address")
    if not admissible(addr):
        raise InadmissibleError(f"address {addr} is not admissible")
    m = L.map
    p = len(addr.period)
    shifts = [addr.shifted(j) for j in range(p)]
    t_lo = _lower_t(m, addr, L.r_norm)
    t_hi = max(math.exp(float(_log_growth(m, addr[j], t_lo))) for j in range(p)) * 1.25
    t_hi = max(t_hi, 2 * t_lo)
    t_grid = np.geomspace(t_lo, t_hi, t_count)
    tails = [trace_ray_tail(L, s, t_grid) for s in shifts]
    diagnostics = []
    if not all(r.converged for r in tails):
        diagnostics.append("tail trace did not converge")

    polys = [list(r.w) for r in tails]
    params = [list(r.t) for r in tails]
    crit_hit = None
    inner_prev = [pl[0] for pl in polys]
    rounds = 0
    stable = 0
    landed = False
    try:
        for rounds in range(1, max_rounds + 1):
            for j in reversed(range(p)):
                src = np.array(polys[(j + 1) % p])
                w0 = polys[j][0]
                z0 = complex(lift(m, w0))
                i = _project_on_polyline(src, z0)
                targets = [src[k] for k in range(i, -1, -1)]
                new_pts = []
                w, za = w0, z0
                for zb in targets:
                    if zb == za:
                        continue
                    try:
                        w = _continue_path(m, w, za, zb, min_step)
                    except _CriticalHit as hit:
                        crit_hit = (j, hit.w_crit)
                        new_pts.append(hit.w_crit)
                        raise
                    za = zb
                    new_pts.append(w)
                t0 = params[j][0]
                ts = [t0 * T_SHRINK ** ((k + 1) / max(1, len(new_pts))) for k in range(len(new_pts))]
                polys[j] = new_pts[::-1] + polys[j]
                params[j] = ts[::-1] + params[j]
            inner = [pl[0] for pl in polys]
            change = max(abs(a - b) for a, b in zip(inner, inner_prev))
            inner_prev = inner
            stable = stable + 1 if change < tol else 0
            if stable >= 2:
                landed = True
                break
    except _CriticalHit:
        j, wc = crit_hit
        polys[j] = [wc] + new_pts[:-1][::-1] + polys[j]
        t0 = params[j][0]
        params[j] = [t0 * T_SHRINK ** (k + 1) for k in range(len(new_pts))][::-1] + params[j]
    except TraceError as exc:
        diagnostics.append(f"extension stopped: {exc}")

    def make_ray(j):
        t = np.array(params[j])
        order = np.argsort(t, kind="stable")
        return RayTail(
            address=shifts[j],
            t=t[order],
            w=np.array(polys[j])[order],
            depth_used=tails[j].depth_used,
            converged=tails[j].converged,
            endpoint_estimate=complex(np.exp(polys[j][0])),
            depths=None,
            ratios=tails[j].ratios,
        )

    rays = [make_ray(j) for j in range(p)]
    ray = rays[0]
    report = LandingReport(
        ray=ray,
        landing_point=None,
        orbit=None,
        verdict="inconclusive",
        cycle_rays=rays,
        rounds=rounds,
        diagnostics=diagnostics,
        critical_hit=None if crit_hit is None else complex(np.exp(crit_hit[1])),
    )
    if crit_hit is not None or is_broken(L, ray, horizon=p):
        report.verdict = "broken"
        return report
    estimate = complex(np.exp(polys[0][0]))
    try:
        orbit = find_periodic_orbit(m, p, estimate)
    except (OrbitSearchError, CstarError) as exc:
        diagnostics.append(f"polish failed: {exc}")
        return report
    dist = min(abs(estimate - q) for q in orbit.points)
    report.orbit = orbit
    near = min(orbit.points, key=lambda q: abs(estimate - q))
    if orbit.classification == "repelling" and landed and dist < land_tol:
        report.landing_point = complex(near)
        report.verdict = "lands_repelling"
    elif orbit.classification == "parabolic" and dist < max(land_tol, 1e-2):
        report.landing_point = complex(near)
        report.verdict = "lands_parabolic"
    else:
        diagnostics.append(
            f"endpoint estimate {estimate} is {dist:.3g} from a {orbit.classification} orbit"
        )
    return report


# ---------------------------------------------------------------------------
# head start and speed ordering
# ---------------------------------------------------------------------------


@dataclass
class HeadStartReport:
    pair: tuple
    profile: HeadStartProfile | None
    pairs: int
    nonvacuous: int
    violations: int
    best: tuple | None
    table: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _sample_images(L, tid: TractId, count: int, rng):
    """Points of ``tid`` spread over many orders of magnitude of |Re|."""
    m = L.map
    info = tract_info(m, tid)
    deg, _, sgn = _side_data(m, tid.side)
    got = []
    total = 0
    lo = math.log(L.r_norm * 1.001)
    for _ in range(50):
        k = 2 * (count - total) + 64
        # half log-uniform up to 1e250, half near the tract boundary region
        mags = np.concatenate([
            np.exp(rng.uniform(lo, math.log(1e250), k // 2)),
            rng.uniform(L.r_norm * 1.001, 40.0, k - k // 2),
        ])
        im = info.center_im + rng.uniform(-0.5, 0.5, k) * info.band_width
        w = sgn * mags + 1j * im
        keep = in_tract_mask(L, w, tid)
        got.append(w[keep])
        total += int(keep.sum())
        if total >= count:
            break
    return np.concatenate(got)[:count]


def head_start_check(
    L: LogTransform,
    pair: tuple[TractId, TractId],
    profile: HeadStartProfile | None = None,
    sample_pairs: int = 10_000,
    seed: int = 7,
    slopes=HEAD_START_SLOPES,
    offsets=HEAD_START_OFFSETS,
) -> HeadStartReport:
    """Sample z, w in T with F(z), F(w) in T' and test
    |Re w| > phi(|Re z|)  =>  |Re F(w)| > phi(|Re F(z)|)
    for ``profile`` (if given) and for every profile of the search grid."""
    T, T2 = pair
    if tract_info(L.map, T).target != T2.side:
        raise PreconditionError(f"{T} does not map over {T2}")
    rng = np.random.default_rng(seed)
    zeta = _sample_images(L, T2, 2 * sample_pairs, rng)
    zeta = zeta[np.abs(zeta.real) > L.r_norm * (1 + 1e-9)]
    if zeta.size < 2 * sample_pairs:
        raise SamplingError(
            f"only {zeta.size // 2} valid pairs sampled, need {sample_pairs}", count=zeta.size // 2
        )
    z = inverse_branch(L, zeta, T)
    a, b = z[:sample_pairs], z[sample_pairs : 2 * sample_pairs]
    fa, fb = zeta[:sample_pairs], zeta[sample_pairs : 2 * sample_pairs]
    # both orders of each pair
    x_re = np.abs(np.concatenate([a.real, b.real]))
    y_re = np.abs(np.concatenate([b.real, a.real]))
    fx = np.abs(np.concatenate([fa.real, fb.real]))
    fy = np.abs(np.concatenate([fb.real, fa.real]))

    def count(phi: HeadStartProfile):
        ante = y_re > phi(x_re)
        viol = ante & ~(fy > phi(fx))
        return int(ante.sum()), int(viol.sum())

    table = {}
    best = None
    for K in slopes:
        for off in offsets:
            nv, v = count(HeadStartProfile(K, off))
            table[(K, off)] = v
            if v == 0 and best is None:
                best = (K, off)
    if profile is not None:
        nonvac, viol = count(profile)
    else:
        nonvac, viol = (count(HeadStartProfile(*best)) if best else (0, min(table.values())))
    return HeadStartReport(
        pair=(T, T2),
        profile=profile if profile is not None else (HeadStartProfile(*best) if best else None),
        pairs=sample_pairs,
        nonvacuous=nonvac,
        violations=viol,
        best=best,
        table=table,
    )


def consecutive_tract_pairs(L: LogTransform):
    cat = tract_catalog(L)
    return [(a.id, b.id) for a in cat for b in cat if a.target == b.id.side]


def speed_compare(
    L: LogTransform, z: complex, w: complex, profile: HeadStartProfile, horizon: int = 8
) -> int:
    """+1 if z is faster than w, -1 if slower, 0 if undecided within the horizon."""
    m = L.map
    a, b = complex(z), complex(w)
    decided = 0
    for k in range(horizon + 1):
        ra, rb = abs(a.real), abs(b.real)
        ahead = ra > profile(rb)
        behind = rb > profile(ra)
        if decided == 0:
            decided = 1 if ahead else (-1 if behind else 0)
        elif (decided == 1 and not ahead) or (decided == -1 and not behind):
            raise SpeedOrderError(
                f"speed ordering not persistent at iterate {k}", iterate=k
            )
        if k == horizon:
            break
        try:
            a = complex(lift(m, a))
            b = complex(lift(m, b))
        except LogRangeError:
            break
        if not (np.isfinite(a) and np.isfinite(b)):
            break
    return decided


# ---------------------------------------------------------------------------
# bouquets
# ---------------------------------------------------------------------------


@dataclass
class Bouquet:
    rays: list
    failures: dict

    def __iter__(self):
        return iter(self.rays)

    def __len__(self):
        return len(self.rays)


def sample_bouquet(
    L: LogTransform,
    e: EssentialItinerary,
    symbols,
    depth: int,
    t_grid,
    tol: float = 1e-12,
    workers: int = 1,
) -> Bouquet:
    """Trace every admissible address over ``symbols`` with itinerary ``e``
    and period at most ``depth``; converged rays in lexicographic order."""
    addrs = enumerate_addresses(e, symbols, depth)

    def job(addr):
        try:
            return trace_ray_tail(L, addr, t_grid, tol)
        except CstarError as exc:
            return exc

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(job, addrs))
    rays, failures = {}, {}
    for addr, res in zip(addrs, results):
        if isinstance(res, Exception):
            failures[str(addr)] = str(res)
        elif not res.converged:
            failures[str(addr)] = "not converged"
        else:
            rays[addr] = res
    ordered = sort_addresses(L.map, list(rays))
    return Bouquet([rays[a] for a in ordered], failures)


def first_difference(s1: ExternalAddress, s2: ExternalAddress) -> int | None:
    if s1 == s2:
        return None
    n = len(s1.preperiod) + len(s2.preperiod) + math.lcm(len(s1.period), len(s2.period))
    return next(k for k in range(n) if s1[k] != s2[k])


@dataclass
class BouquetCheck:
    pairs: int
    min_separation: float
    disjoint: bool
    ordered: bool
    disorder: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.disjoint and self.ordered


def check_bouquet(L: LogTransform, bouquet: Bouquet, tol: float = 1e-8) -> BouquetCheck:
    """Pairwise disjointness and vertical consistency of a sampled bouquet.

    Two rays sharing T_0..T_{k-1} are disjoint iff their F^k-images are,
    since F is injective on each tract; those images are the rays of the
    k-fold shifted addresses, which sit in different tracts of one
    half-plane.  Comparing there avoids the cancellation that makes rays
    with a long common prefix coincide in double precision.  The vertical
    order of the images at the largest t must match the address order
    (ascending on side inf, descending on side 0).
    """
    rays_ = list(bouquet)
    t_grid = rays_[0].t if rays_ else np.array([])
    shifted_cache: dict = {}

    def shifted_ray(r, k):
        key = (r.address, k)
        if key not in shifted_cache:
            shifted_cache[key] = r if k == 0 else trace_ray_tail(L, r.address.shifted(k), t_grid)
        return shifted_cache[key]

    min_sep = math.inf
    disorder = []
    pairs = 0
    for i in range(len(rays_)):
        for j in range(i + 1, len(rays_)):
            a, b = rays_[i], rays_[j]
            k = first_difference(a.address, b.address)
            ra, rb = shifted_ray(a, k), shifted_ray(b, k)
            sep = float(np.min(np.abs(ra.w[:, None] - rb.w[None, :])))
            min_sep = min(min_sep, sep)
            pairs += 1
            # a precedes b in lexicographic order
            up = rb.w[-1].imag > ra.w[-1].imag
            want_up = a.address[k].side == INF
            if up != want_up:
                disorder.append((str(a.address), str(b.address)))
    return BouquetCheck(pairs, min_sep, min_sep > tol, not disorder, disorder)
