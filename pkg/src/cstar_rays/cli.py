"""Command line interface.

    cstar-rays info      --preset arnold
    cstar-rays render    --preset disjoint --center 0 0 --half-width 16 --half-height 16 --out fig.ppm
    cstar-rays trace-ray --preset example_i --address "[] ([(inf,0,0)])" --out ray.txt
    cstar-rays periodic  --preset example_ii --address "[] ([(inf,1,0),(0,0,0)])"
    cstar-rays tracts    --preset order32 --out tracts.txt
    cstar-rays check     --preset example_i
    cstar-rays bouquet   --preset example_i --itinerary "[] ([inf])" --symbols "(inf,0,0)" "(inf,0,1)"

Settings come from ``--config FILE`` (JSON, see :mod:`cstar_rays.config`)
and are overridden by flags.  Exit status: 0 success, 1 a check or search
failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import escape, rays
from .config import RunConfig, config_from_dict, load_config
from .errors import AddressSyntaxError, ConfigError, CstarError, OrbitSearchError
from .io import (
    Palette,
    colorize,
    dump_raster,
    overlay_points,
    phase_portrait,
    write_image,
    write_orbits,
    write_polylines,
    write_rays,
)
from .logspace import LogTransform, delta_clips, expansivity_report, tract_boundary, tract_catalog
from .map_core import critical_points, find_periodic_orbit, order
from .symbolic import HeadStartProfile, parse_address, parse_itinerary

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CIRCLE_TOL = 1e-8
CIRCLE_SEEDS = 64

DEFAULT_OUT = {
    "render": "render.ppm",
    "trace-ray": "ray.txt",
    "tracts": "tracts.txt",
    "bouquet": "bouquet.txt",
}


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

# flag dest -> (config path, converter)
_FLAG_FIELDS = {
    "max_iter": ("max_iter", None),
    "escape_log_radius": ("escape_log_radius", None),
    "prefix_len": ("prefix_len", None),
    "center": ("viewport.center", list),
    "half_width": ("viewport.half_width", None),
    "half_height": ("viewport.half_height", None),
    "px_w": ("viewport.px_w", None),
    "px_h": ("viewport.px_h", None),
    "t_min": ("t_grid.t_min", None),
    "t_max": ("t_grid.t_max", None),
    "t_count": ("t_grid.count", None),
    "t_spacing": ("t_grid.spacing", None),
    "address": ("address", None),
    "itinerary": ("itinerary", None),
    "symbols": ("symbols", list),
    "max_period": ("max_period", None),
    "tol": ("tol", None),
    "land_tol": ("land_tol", None),
    "period": ("period", None),
    "seed": ("seed", list),
    "on_circle": ("on_circle", None),
    "sample_count": ("sample_count", None),
    "pair_count": ("pair_count", None),
    "sample_pairs": ("sample_pairs", None),
    "head_start_K": ("head_start_K", None),
    "head_start_offset": ("head_start_offset", None),
    "strip_range": ("strip_range", list),
    "style": ("style", None),
    "bounded_color": ("bounded_color", list),
    "threads": ("threads", None),
    "out": ("out", None),
}


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    g = p.add_argument_group("map and run settings")
    g.add_argument("--config", metavar="PATH", help="JSON run configuration")
    g.add_argument("--out", metavar="PATH", default=S, help="output file")
    g.add_argument("--threads", type=int, default=S, metavar="N",
                   help=f"worker threads (default: ${escape.THREADS_ENV} or CPU count)")
    g.add_argument("--style", choices=("itinerary", "phase"), default=S, help="render style")
    g.add_argument("--preset", metavar="NAME", help="named map (arnold, disjoint, example_i, example_ii, order32)")
    g.add_argument("--params", type=float, nargs="*", metavar="X", help="preset parameters")
    g.add_argument("--map", dest="map_json", metavar="JSON", help='explicit map, e.g. \'{"n":0,"P":[[0,0],[1,0]],"Q":[[1,0]]}\'')

    n = p.add_argument_group("numeric settings")
    n.add_argument("--max-iter", type=int, default=S)
    n.add_argument("--escape-log-radius", type=float, default=S)
    n.add_argument("--prefix-len", type=int, default=S)
    n.add_argument("--center", type=float, nargs=2, metavar=("RE", "IM"), default=S)
    n.add_argument("--half-width", type=float, default=S)
    n.add_argument("--half-height", type=float, default=S)
    n.add_argument("--px-w", type=int, default=S, help="raster width in pixels")
    n.add_argument("--px-h", type=int, default=S, help="raster height in pixels")
    n.add_argument("--t-min", type=float, default=S)
    n.add_argument("--t-max", type=float, default=S)
    n.add_argument("--t-count", type=int, default=S)
    n.add_argument("--t-spacing", choices=("linear", "geometric"), default=S)
    n.add_argument("--address", default=S, help='external address, e.g. "[] ([(inf,0,0)])"')
    n.add_argument("--itinerary", default=S, help='essential itinerary, e.g. "[] ([inf])"')
    n.add_argument("--symbols", nargs="+", default=S, help='tract triples, e.g. "(inf,0,0)"')
    n.add_argument("--max-period", type=int, default=S)
    n.add_argument("--tol", type=float, default=S)
    n.add_argument("--land-tol", type=float, default=S)
    n.add_argument("--period", type=int, default=S)
    n.add_argument("--seed", type=float, nargs=2, metavar=("RE", "IM"), default=S)
    n.add_argument("--on-circle", action="store_true", default=S, help="seed on |z|=1 and keep circle orbits")
    n.add_argument("--samples", dest="sample_count", type=int, default=S, help="expansivity sample count")
    n.add_argument("--pairs", dest="pair_count", type=int, default=S, help="expansivity pair count")
    n.add_argument("--sample-pairs", type=int, default=S, help="head-start pairs per tract pair")
    n.add_argument("--K", dest="head_start_K", type=float, default=S, help="head-start slope")
    n.add_argument("--offset", dest="head_start_offset", type=float, default=S, help="head-start offset")
    n.add_argument("--strip-range", type=int, nargs=2, metavar=("LO", "HI"), default=S)
    n.add_argument("--bounded-color", type=int, nargs=3, metavar=("R", "G", "B"), default=S)
    n.add_argument("--overlay", metavar="PATH", help="also render the viewport with the rays drawn in")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cstar-rays",
        description="Dynamic rays and escaping sets of z^n exp(P(z) + Q(1/z)).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = _common_parser()
    helps = {
        "info": "orders, critical data, normalization radius, tract catalog",
        "render": "classify a pixel grid and write a P6 image plus a raster dump",
        "trace-ray": "trace the ray tail of an external address",
        "periodic": "find periodic orbits, or land a periodic ray (--address)",
        "tracts": "write tract boundary polylines",
        "check": "expansivity and head-start property report",
        "bouquet": "trace all addresses with a given itinerary over a symbol set",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def _set_path(d: dict, path: str, value):
    keys = path.split(".")
    for k in keys[:-1]:
        d = d.setdefault(k, {})
    d[keys[-1]] = value


def resolve_config(args: argparse.Namespace) -> RunConfig:
    base = load_config(args.config) if args.config else RunConfig()
    d = base.to_dict()
    if args.map_json is not None:
        try:
            d["map"] = json.loads(args.map_json)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--map: {exc.msg} at column {exc.colno}", field="map") from None
    elif args.preset is not None:
        d["map"] = {"preset": args.preset, "params": list(args.params or [])}
    elif args.params is not None:
        raise ConfigError("--params needs --preset", field="map.params")
    given = vars(args)
    for dest, (path, conv) in _FLAG_FIELDS.items():
        if dest in given:
            value = given[dest]
            _set_path(d, path, conv(value) if conv else value)
    return config_from_dict(d)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _c(z: complex) -> str:
    return f"{z.real:+.12g}{z.imag:+.12g}i"


def cmd_info(cfg: RunConfig, args) -> int:
    m = cfg.map.to_map()
    L = LogTransform(m)
    od = order(m)
    sing = critical_points(m)
    print(f"map:        {m.name or m.describe()}")
    print(f"formula:    {m.describe()}")
    print(f"index n:    {m.index_n}")
    print(f"order:      rho_inf = {od.rho_inf}, rho_zero = {od.rho_zero}")
    print(f"critical points ({len(sing.critical_points)}):")
    for c, v, r in zip(sing.critical_points, sing.critical_values, sing.residuals):
        print(f"  c = {_c(c)}   f(c) = {_c(v)}   |f'/f| residual {r:.2e}")
    print(f"singular annulus: {sing.annulus[0]:.6g} < |z| < {sing.annulus[1]:.6g}")
    print(f"r_norm:     {L.r_norm:.6g}")
    print(f"delta line: Im w = {L.delta_line_im:.6g} + 2 pi k   ({len(delta_clips(L))} clip points)")
    print("tracts (strip 0):")
    for info in tract_catalog(L):
        print(f"  {str(info.id):<12} target {info.target:<3}  center Im {info.center_im:+.6f}  width {info.band_width:.6f}")
    return EXIT_OK


def _viewport(cfg: RunConfig) -> escape.Viewport:
    v = cfg.viewport
    return escape.Viewport(v.center, v.half_width, v.half_height, v.px_w, v.px_h)


def _render_rgb(cfg: RunConfig, m, vp) -> tuple[np.ndarray, escape.Raster | None]:
    if cfg.style == "phase":
        return phase_portrait(m, vp), None
    raster = escape.classify_grid(
        m, vp, cfg.max_iter, cfg.escape_log_radius, cfg.prefix_len, threads=cfg.threads
    )
    return colorize(raster, Palette(bounded=cfg.bounded_color)), raster


def cmd_render(cfg: RunConfig, args) -> int:
    m = cfg.map.to_map()
    vp = _viewport(cfg)
    out = Path(cfg.out or DEFAULT_OUT["render"])
    rgb, raster = _render_rgb(cfg, m, vp)
    write_image(rgb, out)
    print(f"wrote {out} ({vp.px_w}x{vp.px_h}, style {cfg.style})")
    if raster is not None:
        dump = out.with_suffix(".npz")
        dump_raster(raster, dump)
        print(f"wrote {dump}")
        counts = raster.counts()
        print("pixels: " + ", ".join(f"{k} {v}" for k, v in counts.items()))
        hist = escape.itinerary_histogram(raster)
        for key, count in sorted(hist.items(), key=lambda kv: (-kv[1], kv[0]))[:16]:
            print(f"  prefix {escape.format_prefix(key) or '-':<8} {count}")
    return EXIT_OK


def _write_overlay(cfg, m, ray_list, path):
    vp = _viewport(cfg)
    rgb, _ = _render_rgb(cfg, m, vp)
    pts = np.concatenate([r.z for r in ray_list]) if ray_list else np.array([])
    write_image(overlay_points(rgb, vp, pts), path)
    print(f"wrote {path}")


def _need(value, flag):
    if value is None:
        raise ConfigError(f"{flag} is required for this command", field=flag.lstrip("-"))
    return value


def cmd_trace_ray(cfg: RunConfig, args) -> int:
    m = cfg.map.to_map()
    L = LogTransform(m)
    addr = parse_address(_need(cfg.address, "--address"))
    ray = rays.trace_ray_tail(L, addr, cfg.t_grid.values(L.r_norm), cfg.tol)
    out = cfg.out or DEFAULT_OUT["trace-ray"]
    write_rays([ray], out)
    print(f"address {addr}: {len(ray)} samples, depth {ray.depth_used}, converged {ray.converged}")
    if ray.ratios:
        print(f"max depth-increment contraction ratio {max(ray.ratios):.3g} over {len(ray.ratios)} measurements")
    else:
        print("depth increments moved no point above rounding level (seeds were already exact)")
    print(f"wrote {out}")
    if args.overlay:
        _write_overlay(cfg, m, [ray], args.overlay)
    return EXIT_OK if ray.converged else EXIT_FAIL


def _circle_orbits(m, period: int) -> list:
    found = []
    for k in range(CIRCLE_SEEDS):
        seed = cmath.exp(2j * math.pi * (k + 0.5) / CIRCLE_SEEDS)
        try:
            orb = find_periodic_orbit(m, period, seed)
        except OrbitSearchError:
            continue
        if orb.period != period:
            continue
        if max(abs(abs(z) - 1) for z in orb.points) >= CIRCLE_TOL:
            continue
        if any(min(abs(z - q) for q in other.points) < 1e-8 for other in found for z in orb.points[:1]):
            continue
        found.append(orb)
    return found


def _grid_orbits(m, period: int) -> list:
    found = []
    for r in (0.25, 0.5, 1.0, 2.0, 4.0):
        for k in range(16):
            seed = r * cmath.exp(2j * math.pi * (k + 0.5) / 16)
            try:
                orb = find_periodic_orbit(m, period, seed)
            except OrbitSearchError:
                continue
            if any(min(abs(orb.points[0] - q) for q in other.points) < 1e-8 for other in found):
                continue
            found.append(orb)
    return found


def cmd_periodic(cfg: RunConfig, args) -> int:
    m = cfg.map.to_map()
    if cfg.address is not None:
        L = LogTransform(m)
        addr = parse_address(cfg.address)
        rep = rays.land_periodic_ray(L, addr, land_tol=cfg.land_tol)
        print(f"address {addr}: verdict {rep.verdict} after {rep.rounds} rounds")
        if rep.critical_hit is not None:
            print(f"  ray passes through the critical point {_c(rep.critical_hit)}")
        if rep.orbit is not None:
            o = rep.orbit
            print(f"  orbit period {o.period}, multiplier {_c(o.multiplier)} (|.| = {abs(o.multiplier):.12g}), {o.classification}")
        if rep.landing_point is not None:
            print(f"  landing point {_c(rep.landing_point)}")
        for d in rep.diagnostics:
            print(f"  note: {d}")
        print("  endpoint status unknown (escaping or not)")
        if cfg.out:
            write_rays(rep.cycle_rays, cfg.out)
            print(f"wrote {cfg.out}")
        if args.overlay:
            _write_overlay(cfg, m, rep.cycle_rays, args.overlay)
        return EXIT_OK if rep.verdict in ("lands_repelling", "lands_parabolic", "broken") else EXIT_FAIL

    if cfg.seed is not None:
        orbits = [find_periodic_orbit(m, cfg.period, cfg.seed, tol=min(cfg.tol, 1e-10))]
    elif cfg.on_circle:
        orbits = _circle_orbits(m, cfg.period)
    else:
        orbits = _grid_orbits(m, cfg.period)
    if cfg.on_circle and cfg.seed is None:
        print(f"orbits of exact period {cfg.period} with max ||z|-1| < {CIRCLE_TOL:g}: {len(orbits)}")
    for o in orbits:
        dev = max(abs(abs(z) - 1) for z in o.points)
        print(f"period {o.period}  {o.classification}  |multiplier| {abs(o.multiplier):.12g}  max||z|-1| {dev:.3e}")
        for z in o.points:
            print(f"  {_c(z)}   |z| = {abs(z):.15g}")
    if cfg.out:
        write_orbits(orbits, cfg.out)
        print(f"wrote {cfg.out}")
    return EXIT_OK if orbits else EXIT_FAIL


def cmd_tracts(cfg: RunConfig, args) -> int:
    m = cfg.map.to_map()
    L = LogTransform(m)
    re_values = np.geomspace(max(L.r_norm * 0.05, 1e-3), 40.0, 200)
    lines = {}
    cat = tract_catalog(L, cfg.strip_range)
    for info in cat:
        upper, lower = tract_boundary(L, info.id, re_values)
        lines[f"{info.id}/upper"] = np.array(upper, dtype=complex)
        lines[f"{info.id}/lower"] = np.array(lower, dtype=complex)
    out = cfg.out or DEFAULT_OUT["tracts"]
    write_polylines(lines, out)
    print(f"{len(cat)} tracts in strips {cfg.strip_range[0]}..{cfg.strip_range[1]}; wrote {out}")
    return EXIT_OK


def cmd_check(cfg: RunConfig, args) -> int:
    m = cfg.map.to_map()
    L = LogTransform(m)
    exp = expansivity_report(L, cfg.sample_count, cfg.pair_count)
    print(f"map {m.name or m.describe()}, r_norm {L.r_norm:.6g}")
    print(
        f"expansivity: {'PASS' if exp.passed else 'FAIL'}  points {exp.n_points} (excluded {exp.excluded}), "
        f"min |F'| {exp.min_abs_deriv:.4g}, |F'|>=2 violations {exp.deriv_violations}, "
        f"lemma violations {exp.lemma_violations}; pairs {exp.n_pairs}, pair violations {exp.pair_violations}"
    )
    profile = (
        HeadStartProfile(cfg.head_start_K, cfg.head_start_offset) if cfg.head_start_K is not None else None
    )
    hs_ok = True
    hs_rows = []
    for pair in rays.consecutive_tract_pairs(L):
        rep = rays.head_start_check(L, pair, profile, cfg.sample_pairs)
        ok = rep.passed and rep.profile is not None
        hs_ok &= ok
        prof = "none" if rep.profile is None else f"K={rep.profile.slope_K:g}, offset={rep.profile.offset:g}"
        hs_rows.append({"pair": [str(pair[0]), str(pair[1])], "violations": rep.violations,
                        "best": None if rep.best is None else list(rep.best)})
        print(
            f"head-start {pair[0]} -> {pair[1]}: {'PASS' if ok else 'FAIL'}  ({prof}; "
            f"{rep.violations} violations, {rep.nonvacuous} non-vacuous of {2 * rep.pairs})"
        )
    passed = exp.passed and hs_ok
    summary = {
        "command": "check",
        "version": __version__,
        "map": m.name or m.describe(),
        "r_norm": L.r_norm,
        "expansivity": {"passed": exp.passed, "points": exp.n_points, "pairs": exp.n_pairs,
                        "deriv_violations": exp.deriv_violations, "pair_violations": exp.pair_violations,
                        "min_abs_deriv": exp.min_abs_deriv},
        "head_start": {"passed": hs_ok, "pairs": hs_rows},
        "passed": passed,
    }
    print(json.dumps(summary, sort_keys=True))
    if cfg.out:
        Path(cfg.out).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_bouquet(cfg: RunConfig, args) -> int:
    m = cfg.map.to_map()
    L = LogTransform(m)
    e = parse_itinerary(_need(cfg.itinerary, "--itinerary"))
    if not cfg.symbols:
        raise ConfigError("--symbols is required for bouquet", field="symbols")
    symbols = [parse_address(f"[] ([{s}])").period[0] for s in cfg.symbols]
    threads = cfg.threads or escape.default_threads()
    b = rays.sample_bouquet(L, e, symbols, cfg.max_period, cfg.t_grid.values(L.r_norm), cfg.tol, workers=threads)
    chk = rays.check_bouquet(L, b)
    for r in b:
        print(f"  {r.address}")
    for addr, why in b.failures.items():
        print(f"  failed {addr}: {why}")
    print(
        f"{len(b)} rays; pairwise disjoint {chk.disjoint} (min separation {chk.min_separation:.3g}); "
        f"order consistent {chk.ordered}"
    )
    out = cfg.out or DEFAULT_OUT["bouquet"]
    write_rays(list(b), out)
    print(f"wrote {out}")
    if args.overlay:
        _write_overlay(cfg, m, list(b), args.overlay)
    return EXIT_OK if chk.passed and not b.failures else EXIT_FAIL


COMMANDS = {
    "info": cmd_info,
    "render": cmd_render,
    "trace-ray": cmd_trace_ray,
    "periodic": cmd_periodic,
    "tracts": cmd_tracts,
    "check": cmd_check,
    "bouquet": cmd_bouquet,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, AddressSyntaxError) as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CstarError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
