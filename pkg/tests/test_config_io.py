import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cstar_rays import __version__, presets
from cstar_rays.config import (
    MapSpec,
    RunConfig,
    TGridSpec,
    ViewportSpec,
    config_from_dict,
    load_config,
    parse_config,
    serialize_config,
)
from cstar_rays.errors import ConfigError, OutputError
from cstar_rays.escape import BOUNDED, Raster, Viewport, classify_grid, classify_point
from cstar_rays.io import (
    ORANGE,
    Palette,
    colorize,
    header,
    phase_portrait,
    ppm_bytes,
    read_ppm,
    read_rays,
    rays_text,
    write_image,
    write_rays,
)
from cstar_rays.logspace import LogTransform
from cstar_rays.rays import trace_ray_tail
from cstar_rays.symbolic import parse_address


def test_config_examples():
    cfg = parse_config('{"map":{"preset":"arnold","params":[0.19725,0.48348]}}')
    m = cfg.map.to_map()
    assert m == presets.arnold()
    assert m.index_n == 1

    cfg = parse_config('{"map":{"n":0,"P":[[0,0],[0.3,0]],"Q":[[0.3,0]]}}')
    assert cfg.map.to_map() == presets.disjoint()

    with pytest.raises(ConfigError) as info:
        parse_config('{"map":{"n":0,"P":[[0,0]],"Q":[[1,0]]}}')
    assert info.value.context["field"] == "map.P"


@pytest.mark.parametrize(
    "text, field",
    [
        ('{"bogus": 1}', "bogus"),
        ('{"max_iter": 0}', "max_iter"),
        ('{"tol": -1}', "tol"),
        ('{"viewport": {"px_w": 2.5}}', "viewport.px_w"),
        ('{"map": {"preset": "nope"}}', "map.preset"),
        ('{"strip_range": [2, 1]}', "strip_range"),
        ('{"style": "neon"}', "style"),
        ('{"bounded_color": [0, 0, 300]}', "bounded_color"),
    ],
)
def test_config_invariant_errors_name_the_field(text, field):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert field in str(info.value)


def test_config_syntax_error_has_position():
    with pytest.raises(ConfigError) as info:
        parse_config('{\n  "max_iter": 10,\n  oops\n}')
    assert info.value.context["line"] == 3
    assert "line 3, column" in str(info.value)


def test_load_config(tmp_path):
    p = tmp_path / "run.json"
    p.write_text('{"max_iter": 17}')
    assert load_config(str(p)).max_iter == 17
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))


def test_preset_expansion_is_transparent():
    a = serialize_config(RunConfig(map=MapSpec.arnold(0.1, 0.2)))
    b = serialize_config(RunConfig(map=MapSpec.arnold(0.1, 0.2)))
    assert a == b
    assert MapSpec.arnold(0.1, 0.2).to_map() == presets.arnold(0.1, 0.2)


def test_t_grid_values():
    g = TGridSpec(t_min=2, t_max=8, count=4, spacing="geometric").values(1.0)
    assert g == pytest.approx([2, 3.1748, 5.0397, 8], rel=1e-4)
    assert TGridSpec(count=3).values(10.0)[0] == pytest.approx(12.0)
    with pytest.raises(ConfigError):
        TGridSpec(t_min=50).values(1.0)


finite = st.floats(-1e6, 1e6, allow_nan=False)
pos = st.floats(1e-6, 1e6)
pairs = st.builds(complex, finite, finite)


@st.composite
def run_configs(draw):
    if draw(st.booleans()):
        spec = MapSpec.arnold(draw(st.floats(-3, 3)), draw(st.floats(0.01, 2)))
    else:
        P = tuple(draw(st.lists(pairs, min_size=1, max_size=3))) + (complex(1, draw(finite)),)
        Q = tuple(draw(st.lists(pairs, max_size=2))) + (complex(draw(pos), 0),)
        spec = MapSpec(n=draw(st.integers(-4, 4)), P=P, Q=Q)
    px = draw(st.integers(1, 2000))
    half = draw(pos)
    return RunConfig(
        map=spec,
        viewport=ViewportSpec(draw(pairs), half, half, px, px),
        max_iter=draw(st.integers(1, 10_000)),
        escape_log_radius=draw(st.none() | pos),
        prefix_len=draw(st.integers(0, 56)),
        t_grid=TGridSpec(draw(st.none() | pos), draw(pos), draw(st.integers(1, 500)),
                         draw(st.sampled_from(["linear", "geometric"]))),
        address=draw(st.none() | st.just("[] ([(inf,0,0)])")),
        symbols=tuple(draw(st.lists(st.sampled_from(["(inf,0,0)", "(0,1,-1)"]), max_size=3))),
        tol=draw(pos),
        period=draw(st.integers(1, 16)),
        seed=draw(st.none() | pairs.filter(lambda z: z != 0)),
        on_circle=draw(st.booleans()),
        head_start_K=draw(st.none() | pos),
        head_start_offset=draw(st.floats(0, 1e4)),
        strip_range=tuple(sorted(draw(st.lists(st.integers(-5, 5), min_size=2, max_size=2)))),
        style=draw(st.sampled_from(["itinerary", "phase"])),
        bounded_color=tuple(draw(st.lists(st.integers(0, 255), min_size=3, max_size=3))),
        threads=draw(st.none() | st.integers(1, 64)),
        out=draw(st.none() | st.just("out.ppm")),
    )


@given(run_configs())
def test_config_round_trip(cfg):
    text = serialize_config(cfg)
    assert parse_config(text) == cfg
    assert serialize_config(parse_config(text)) == text


def test_default_config_round_trip():
    cfg = RunConfig()
    assert config_from_dict(json.loads(serialize_config(cfg))) == cfg


def _two_by_one_bounded():
    vp = Viewport(0j, 1.0, 0.5, 2, 1)
    shape = (1, 2)
    return Raster(
        vp,
        np.full(shape, BOUNDED, np.uint8),
        np.full(shape, -1, np.int32),
        np.zeros(shape, np.uint64),
        np.zeros(shape, np.uint8),
        np.zeros(shape, np.float64),
        10,
        50.0,
    )


def test_p6_exact_bytes(tmp_path):
    path = tmp_path / "tiny.ppm"
    write_image(_two_by_one_bounded(), path)
    data = path.read_bytes()
    assert data == b"P6\n2 1\n255\n" + bytes(ORANGE) * 2
    assert len(data) == 11 + 6
    assert read_ppm(path).shape == (1, 2, 3)


def test_palette_color_is_configurable():
    rgb = colorize(_two_by_one_bounded(), Palette(bounded=(1, 2, 3)))
    assert rgb.tolist() == [[[1, 2, 3], [1, 2, 3]]]


def test_ppm_rejects_bad_shape():
    with pytest.raises(ValueError):
        ppm_bytes(np.zeros((2, 2)))


def test_write_errors_are_output_errors(tmp_path):
    with pytest.raises(OutputError):
        write_image(_two_by_one_bounded(), tmp_path / "no" / "such" / "dir.ppm")


def test_render_is_byte_deterministic(tmp_path):
    m = presets.example_ii()
    vp = Viewport.square(0, 3, 48)
    for k, threads in enumerate((1, 4)):
        write_image(classify_grid(m, vp, threads=threads), tmp_path / f"r{k}.ppm")
    assert (tmp_path / "r0.ppm").read_bytes() == (tmp_path / "r1.ppm").read_bytes()


def test_phase_portrait_shape():
    rgb = phase_portrait(presets.example_i(), Viewport.square(0, 2, 16))
    assert rgb.shape == (16, 16, 3) and rgb.dtype == np.uint8


def test_empty_ray_file_is_header_only(tmp_path):
    path = tmp_path / "rays.txt"
    write_rays([], path)
    text = path.read_text()
    assert text == header("rays", ("address", "t", "re_w", "im_w", "re_z", "im_z"))
    assert text.count("\n") == 1
    assert __version__ in text
    assert read_rays(path) == []


def test_ray_file_round_trip(tmp_path):
    L = LogTransform(presets.example_i())
    ray = trace_ray_tail(L, parse_address("[] ([(inf,0,0)])"), np.linspace(4, 8, 5))
    path = tmp_path / "rays.txt"
    write_rays([ray], path)
    rows = read_rays(path)
    assert len(rows) == 5
    for (addr, t, w, z), t0, w0 in zip(rows, ray.t, ray.w):
        assert addr == str(ray.address)
        assert t == t0 and w == w0
        assert z == complex(np.exp(w0))
    assert rays_text([ray]) == path.read_text()


def test_extreme_start_points_stay_finite():
    m = presets.example_i()
    for z in (1e-300, 1e300, 5e-324, -1e-200j):
        pc = classify_point(m, z)
        assert np.isfinite(pc.last_log_modulus)
