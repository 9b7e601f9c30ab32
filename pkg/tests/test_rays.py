import math

import numpy as np
import pytest

from cstar_rays import presets
from cstar_rays.errors import InadmissibleError, PreconditionError, SpeedOrderError
from cstar_rays.escape import Viewport, classify_grid, classify_point
from cstar_rays.logspace import INF, ZERO, F_eval, LogTransform, TractId, locate_tract
from cstar_rays.rays import (
    check_bouquet,
    consecutive_tract_pairs,
    first_difference,
    head_start_check,
    is_broken,
    land_periodic_ray,
    sample_bouquet,
    speed_compare,
    trace_ray_tail,
)
from cstar_rays.symbolic import (
    EssentialItinerary,
    ExternalAddress,
    HeadStartProfile,
    itinerary_of_address,
    lex_compare_addresses,
    parse_address,
)

REAL_I = parse_address("[] ([(inf,0,0)])")
PAIR_II = parse_address("[] ([(inf,1,0),(0,0,0)])")


@pytest.fixture(scope="module")
def L1(transforms):
    return transforms("example_i")


@pytest.fixture(scope="module")
def L2(transforms):
    return transforms("example_ii")


@pytest.fixture(scope="module")
def grid1(L1):
    return np.geomspace(1.2 * L1.r_norm, 40, 100)


@pytest.fixture(scope="module")
def tail1(L1, grid1):
    return trace_ray_tail(L1, REAL_I, grid1)


@pytest.fixture(scope="module")
def landing2(L2):
    return land_periodic_ray(L2, PAIR_II)


@pytest.fixture(scope="module")
def tails2(L2):
    grid = np.geomspace(1.2 * L2.r_norm, 40, 60)
    return [trace_ray_tail(L2, PAIR_II.shifted(j), grid) for j in range(2)]


def test_example_i_ray_is_real(tail1):
    assert tail1.converged
    z = tail1.z
    assert np.max(np.abs(z.imag)) < 1e-8
    assert np.all(z.real > 1)
    assert np.all(np.diff(z.real) > 0)


def test_example_ii_branches(tails2):
    outer, inner = tails2
    assert outer.converged and inner.converged
    assert np.max(np.abs(outer.z.imag)) < 1e-8 and np.max(np.abs(inner.z.imag)) < 1e-8
    assert np.all(outer.z.real > 1)
    assert np.all((inner.z.real > 0) & (inner.z.real < 1))


def test_trace_errors(L1, grid1):
    with pytest.raises(InadmissibleError):
        trace_ray_tail(L1, parse_address("[] ([(inf,0,0),(0,0,0)])"), grid1)
    with pytest.raises(PreconditionError):
        trace_ray_tail(L1, REAL_I, [0.5 * L1.r_norm, 10])
    with pytest.raises(ValueError):
        trace_ray_tail(L1, REAL_I, [10, 5])


def test_uniqueness_under_seed_offsets(L2):
    grid = np.geomspace(1.2 * L2.r_norm, 40, 30)
    tol = 1e-12
    base = trace_ray_tail(L2, PAIR_II, grid, tol=tol)
    rng = np.random.default_rng(4)
    for off in rng.uniform(-0.3, 0.3, 10) + 1j * rng.uniform(-0.3, 0.3, 10):
        other = trace_ray_tail(L2, PAIR_II, grid, tol=tol, seed_offset=off)
        assert other.converged
        assert np.max(np.abs(other.w - base.w) / np.maximum(1, np.abs(base.w))) <= 10 * tol


def test_pullback_contraction(L1, L2, grid1):
    ratios = []
    for L, addr in ((L1, REAL_I), (L2, PAIR_II), (L2, PAIR_II.shifted(1))):
        grid = np.geomspace(1.2 * L.r_norm, 40, 30)
        for off in (0.2, 0.2j, -0.1 - 0.1j):
            ratios += trace_ray_tail(L, addr, grid, seed_offset=off).ratios
    assert ratios
    assert max(ratios) <= 0.5


def test_escape_along_ray(tail1, tails2):
    for ray in [tail1, *tails2]:
        q = len(ray.t) // 4
        for n in range(min(4, len(ray.orbit))):
            re = np.abs(ray.orbit[n][q:].real)
            assert np.all(np.diff(re) > 0)


def test_itinerary_consistency(L1, tail1, tails2):
    for ray in [tail1, *tails2]:
        e = itinerary_of_address(ray.address)
        for n, level in enumerate(ray.orbit):
            sides = np.where(level.real > 0, INF, ZERO)
            assert np.all(sides == e[n])
            # every stored level sits in the prescribed tract
            assert locate_tract(L1 if ray is tail1 else _L2_of(ray), level[-1]) == ray.address[n]


def _L2_of(ray):
    return LogTransform(presets.example_ii())


def test_is_broken_examples(L1, L2, tail1, landing2):
    rep = land_periodic_ray(L1, REAL_I)
    assert rep.verdict == "broken"
    assert is_broken(L1, rep.ray)
    assert abs(rep.critical_hit - 1) < 1e-6
    assert not is_broken(L2, landing2.ray, horizon=2)
    # the tail alone stays away from the critical point
    assert not is_broken(L1, tail1, horizon=0)


def test_landing_example_ii(landing2):
    rep = landing2
    assert rep.verdict == "lands_repelling"
    assert abs(rep.landing_point - 1) < 1e-9
    assert abs(rep.orbit.multiplier + 2) < 1e-9
    ends = [r.endpoint_estimate for r in rep.cycle_rays]
    assert all(abs(z - 1) < 1e-6 for z in ends)


def test_landing_needs_periodic_address(L2):
    with pytest.raises(PreconditionError):
        land_periodic_ray(L2, parse_address("[(inf,0,0)] ([(inf,1,0),(0,0,0)])"))


def test_head_start_example(L1):
    pair = (TractId(INF, 0, 0), TractId(INF, 0, 0))
    rep = head_start_check(L1, pair, HeadStartProfile(2.0, 1000.0))
    assert rep.pairs == 10_000
    assert rep.violations == 0
    assert rep.best == (1.25, 1.0)
    # the best grid profile is tested on many pairs, not vacuously
    assert head_start_check(L1, pair).nonvacuous > 1000


def test_head_start_rejects_non_consecutive(L1):
    with pytest.raises(PreconditionError):
        head_start_check(L1, (TractId(INF, 1, 0), TractId(INF, 0, 0)), sample_pairs=10)


def test_consecutive_pairs(L1):
    pairs = consecutive_tract_pairs(L1)
    # each of the 4 tracts maps over the 2 tracts of its target side
    assert len(pairs) == 8


def test_speed_compare_examples(tail1, L1):
    phi = HeadStartProfile(1.25, 1.0)
    far, near = tail1.w[-1], tail1.w[len(tail1.w) // 2]
    assert speed_compare(L1, far, near, phi) == 1
    assert speed_compare(L1, near, far, phi) == -1
    assert speed_compare(L1, near, near, phi) == 0


def test_speed_order_persists_on_ray(tail1, L1):
    phi = HeadStartProfile(1.25, 1.0)
    w = tail1.w
    for i in range(0, len(w), 7):
        for j in range(0, len(w), 11):
            speed_compare(L1, w[i], w[j], phi)


def test_speed_compare_detects_inconsistency(L1):
    class Flip:
        calls = 0

        def __call__(self, x):
            Flip.calls += 1
            return x * (0.5 if Flip.calls < 3 else 4.0)

    with pytest.raises(SpeedOrderError):
        speed_compare(L1, 5.0, 4.0, Flip(), horizon=3)


def test_bouquet_constant_itinerary(L1):
    e = EssentialItinerary((), (INF,))
    symbols = [TractId(INF, 0, 0), TractId(INF, 0, 1)]
    grid = np.geomspace(1.2 * L1.r_norm, 60, 40)
    b = sample_bouquet(L1, e, symbols, 3, grid, workers=2)
    assert len(b) == 10 and not b.failures
    for a, c in zip(b.rays, b.rays[1:]):
        assert lex_compare_addresses(L1.map, a.address, c.address) == -1
    chk = check_bouquet(L1, b)
    assert chk.pairs == 45
    assert chk.passed
    assert chk.min_separation > 1e-8


def test_bouquet_alternating_itinerary(L1):
    e = EssentialItinerary((), (ZERO, INF))
    grid = np.geomspace(1.2 * L1.r_norm, 40, 20)
    b = sample_bouquet(L1, e, [TractId(ZERO, 0, 0), TractId(INF, 1, 0)], 2, grid)
    assert [r.address for r in b] == [parse_address("[] ([(0,0,0),(inf,1,0)])")]


def test_first_difference():
    a = parse_address("[(inf,0,0),(inf,0,0)] ([(inf,0,1)])")
    b = parse_address("[] ([(inf,0,0)])")
    assert first_difference(a, b) == 2
    assert first_difference(a, a) is None


def test_rays_consistent_with_escape(L1, L2, landing2):
    """Ray samples classify as escaped with the ray's itinerary; at 512^2
    the pixels holding them are escaped and share the first two symbols."""
    vp = Viewport.square(0, 16, 512)
    ray1 = land_periodic_ray(L1, REAL_I).ray
    # drop the critical point z = 1 ending the broken ray: it lies on |z| = 1
    ray1.w, ray1.t = ray1.w[1:], ray1.t[1:]
    cases = [(L1, [ray1], True), (L2, [landing2.cycle_rays[0]], True), (L2, [landing2.cycle_rays[1]], False)]
    for L, rays, raster_check in cases:
        raster = classify_grid(L.map, vp, threads=1)
        for ray in rays:
            e = itinerary_of_address(ray.address)
            inside = [complex(z) for z in ray.z if abs(z.real) < 16 and abs(z.imag) < 16]
            assert inside
            for z in inside:
                pc = classify_point(L.map, z)
                assert pc.status == "escaped"
                assert pc.itinerary_prefix == tuple(e[k] for k in range(pc.prefix_len))
                if raster_check:
                    px = raster.pixel(*vp.pixel_of(z))
                    assert px.status == "escaped"
                    assert px.itinerary_prefix[:2] == (e[0], e[1])
