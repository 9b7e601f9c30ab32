import math

import numpy as np
import pytest
from hypothesis import given, settings

from cstar_rays import presets
from cstar_rays.errors import BoundaryError, InvalidMapError, LogRangeError, PreconditionError
from cstar_rays.logspace import (
    INF,
    ZERO,
    F_deriv,
    F_eval,
    LogTransform,
    TractId,
    band_target,
    delta_clips,
    expansivity_report,
    fundamental_domain_index,
    fundamental_strip_of_im,
    inverse_branch,
    locate_tract,
    tract_boundary,
    tract_catalog,
    tract_info,
)
from cstar_rays.map_core import PuncturedPolyMap, evaluate, log_evaluate

from strategies import maps

PRESET_NAMES = ["arnold", "disjoint", "example_i", "example_ii", "order32"]


def bare(m):
    # skips the normalization scan for pure evaluation tests
    return LogTransform(m, r_norm=1.0, delta_line_im=math.pi)


def test_F_eval_examples():
    assert F_eval(bare(presets.example_i()), 0) == pytest.approx(2)
    m = PuncturedPolyMap(1, (0, 1), (1,))
    assert F_eval(bare(m), 1j * math.pi) == pytest.approx(1j * math.pi - 2)
    v = F_eval(bare(presets.disjoint()), math.log(2.2373))
    assert abs(math.exp(v.real) - 2.2373) < 5e-4


def test_F_eval_range_error_names_term():
    L = bare(presets.example_i())
    with pytest.raises(LogRangeError) as info:
        F_eval(L, 800)
    assert info.value.context["term"] == "a_p e^(pw)"


def test_F_deriv_examples():
    assert F_deriv(bare(presets.example_i()), 0) == pytest.approx(0)
    assert F_deriv(bare(presets.example_ii()), 0) == pytest.approx(-2)
    with pytest.raises(InvalidMapError):
        PuncturedPolyMap(1, (0, 1), ())


def test_normalization_radius_examples(transforms):
    L = transforms("example_i")
    assert L.r_norm >= 2
    doubled = LogTransform(PuncturedPolyMap(0, (0, 2), (1,)))
    assert doubled.r_norm >= L.r_norm


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_normalization_derivative_bound(transforms, name):
    L = transforms(name)
    rng = np.random.default_rng(3)
    w = rng.uniform(-12, 12, 10_000) + 1j * rng.uniform(0, 2 * np.pi, 10_000)
    with np.errstate(over="ignore"):
        keep = (L.map.p * w.real < 700) & (-L.map.q * w.real < 700)
    w = w[keep]
    fw = F_eval(L, w)
    sel = np.abs(fw.real) >= L.r_norm
    assert np.all(np.abs(F_deriv(L, w[sel])) >= 2)


def test_tract_catalog_counts():
    m = presets.order32()
    L = bare(m)
    cat = tract_catalog(L)
    assert sum(t.id.side == INF for t in cat) == 2 * 3
    assert sum(t.id.side == ZERO for t in cat) == 2 * 2
    assert len(tract_catalog(L, strip_range=(-1, 1))) == 3 * len(cat)


@settings(max_examples=30)
@given(maps(max_p=4, max_q=4))
def test_tract_catalog_counts_property(m):
    cat = tract_catalog(m)
    assert sum(t.id.side == INF for t in cat) == 2 * m.p
    assert sum(t.id.side == ZERO for t in cat) == 2 * m.q
    # targets alternate with the band index
    for t in cat:
        assert t.target == band_target(t.id.band)


def test_tract_info_centers():
    m = presets.example_i()
    assert tract_info(m, TractId(INF, 0, 0)).center_im == pytest.approx(0)
    assert tract_info(m, TractId(INF, 1, 0)).target == ZERO
    assert tract_info(m, TractId(INF, 0, 1)).center_im == pytest.approx(2 * math.pi)
    with pytest.raises(ValueError):
        tract_info(m, TractId(INF, 2, 0))


def test_locate_tract_examples(transforms):
    L = transforms("example_i")
    assert locate_tract(L, 5) == TractId(INF, 0, 0)
    tid = locate_tract(L, 5 + 1j * math.pi)
    assert tid.side == INF and tract_info(L.map, tid).target == ZERO
    notes = []
    assert locate_tract(L, 0.1j, notes) is None
    assert notes


def test_inverse_branch_examples(transforms):
    L = transforms("example_i")
    zeta = math.exp(5)
    w = inverse_branch(L, zeta, TractId(INF, 0, 0))
    assert abs(w - 5) < 1e-2 and abs(w.imag) < 1e-12
    assert abs(F_eval(L, w) - zeta) < 1e-10 * zeta
    w1 = inverse_branch(L, zeta, TractId(INF, 0, 1))
    assert w1.imag == pytest.approx(2 * math.pi)
    assert abs(F_eval(L, w1) - zeta) < 1e-10 * zeta
    with pytest.raises(PreconditionError):
        inverse_branch(L, L.r_norm * 0.5, TractId(INF, 0, 0))
    with pytest.raises(PreconditionError):
        inverse_branch(L, -zeta, TractId(INF, 0, 0))


def _targets(L, tid, count, rng):
    sign = 1 if tract_info(L.map, tid).target == INF else -1
    re = np.exp(rng.uniform(math.log(L.r_norm * 1.001), math.log(1e6), count))
    return sign * re + 1j * rng.uniform(-1e3, 1e3, count)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_inverse_branch_right_inverse(transforms, name):
    L = transforms(name)
    rng = np.random.default_rng(11)
    for info in tract_catalog(L):
        zeta = _targets(L, info.id, 1000, rng)
        w = inverse_branch(L, zeta, info.id)
        assert np.all(np.abs(F_eval(L, w) - zeta) <= 1e-10 * np.maximum(1, np.abs(zeta)))
        assert np.all(np.abs(w.imag - info.center_im) < info.band_width)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_inverse_branch_contracts(transforms, name):
    L = transforms(name)
    rng = np.random.default_rng(12)
    for info in tract_catalog(L):
        z1 = _targets(L, info.id, 500, rng)
        z2 = _targets(L, info.id, 500, rng)
        w1 = inverse_branch(L, z1, info.id)
        w2 = inverse_branch(L, z2, info.id)
        assert np.all(np.abs(w1 - w2) <= 0.5 * np.abs(z1 - z2) * (1 + 1e-12))


@settings(max_examples=30)
@given(maps())
def test_lift_identity_property(m):
    rng = np.random.default_rng(5)
    w = rng.uniform(-5, 5, 1000) + 1j * rng.uniform(-10, 10, 1000)
    w = w[np.abs(log_evaluate(m, np.exp(w)).real) < 600]
    L = bare(m)
    direct = evaluate(m, np.exp(w))
    assert np.max(np.abs(np.exp(F_eval(L, w)) - direct) / np.abs(direct)) < 1e-10


@settings(max_examples=30)
@given(maps())
def test_quasi_periodicity(m):
    rng = np.random.default_rng(6)
    w = rng.uniform(-5, 5, 1000) + 1j * rng.uniform(-10, 10, 1000)
    L = bare(m)
    d = F_eval(L, w + 2j * math.pi) - F_eval(L, w) - 2j * math.pi * m.index_n
    scale = np.maximum(1, np.abs(F_eval(L, w)))
    assert np.max(np.abs(d) / scale) < 1e-12


def test_fundamental_strip_examples():
    L = bare(presets.example_i())
    assert fundamental_strip_of_im(L, 0.0) == -1
    assert fundamental_strip_of_im(L, 2 * math.pi + 0.1) == 0
    assert fundamental_strip_of_im(L, 3 * math.pi + 0.1) == 1
    with pytest.raises(BoundaryError):
        fundamental_strip_of_im(L, math.pi)


def test_fundamental_domain_index(transforms):
    L = transforms("example_i")
    k = fundamental_domain_index(L, 5.0)
    assert k == fundamental_strip_of_im(L, 0.0)
    with pytest.raises(PreconditionError):
        fundamental_domain_index(L, 0.1j)


def test_delta_line_avoids_band_centers(transforms):
    L = transforms("arnold")
    for info in tract_catalog(L):
        d = (info.center_im - L.delta_line_im) % (2 * math.pi)
        assert min(d, 2 * math.pi - d) > 0.1
    assert isinstance(delta_clips(L), list)


def test_expansivity_example_i(transforms):
    rep = expansivity_report(transforms("example_i"), 10_000, 1000)
    assert rep.passed
    assert rep.n_points > 9000
    assert rep.n_pairs == 1000
    assert rep.min_abs_deriv >= 2
    assert rep.excluded > 0


def test_expansivity_pair_on_center_line(transforms):
    L = transforms("example_i")
    a = L.r_norm + 1.0
    z, w = complex(a), complex(a + 8 * math.pi)
    fz, fw = F_eval(L, z), F_eval(L, w)
    lhs = abs(fz - fw)
    rhs = math.e * (min(abs(fz.real), abs(fw.real)) - L.r_norm)
    assert lhs >= rhs


def test_tract_boundary_brackets_center(transforms):
    L = transforms("example_i")
    upper, lower = tract_boundary(L, TractId(INF, 0, 0), [3, 5, 8])
    assert upper and lower
    for u in upper:
        assert 0 < u.imag < math.pi
    for v in lower:
        assert -math.pi < v.imag < 0
