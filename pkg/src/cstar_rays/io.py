"""Output formats: P6 pixmaps, ray records, polylines and raster dumps.

Every writer is a deterministic function of its inputs and the package
version, which is embedded in data-file headers.
"""

from __future__ import annotations

import colorsys
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import OutputError
from .escape import BOUNDED, ESCAPED, Raster, Viewport
from .map_core import PuncturedPolyMap, log_evaluate

ORANGE = (255, 165, 0)
FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class Palette:
    """Colors for a classified raster.

    ``itinerary``: hue from the itinerary prefix, luminance from the escape
    iteration, a solid color for bounded pixels.
    """

    bounded: tuple[int, int, int] = ORANGE
    undecided: tuple[int, int, int] = (40, 40, 40)
    saturation: float = 0.75
    luminance_decay: float = 12.0


def _prefix_hue(bits: int, length: int) -> float:
    # binary fraction 0.e_0 e_1 e_2 ... keeps nearby itineraries close in hue
    h = sum(((bits >> k) & 1) * 2.0 ** -(k + 1) for k in range(length))
    return (h + 0.5 ** (length + 1) + 0.08) % 1.0


def _rgb8(r, g, b):
    return tuple(int(round(255 * c)) for c in (r, g, b))


def colorize(raster: Raster, palette: Palette = Palette()) -> np.ndarray:
    """(H, W, 3) uint8 image of a classified raster."""
    H, W = raster.status.shape
    out = np.empty((H, W, 3), dtype=np.uint8)
    out[...] = palette.undecided
    out[raster.status == BOUNDED] = palette.bounded
    esc = raster.status == ESCAPED
    if np.any(esc):
        keys = np.stack(
            [
                raster.prefix_bits[esc].astype(np.int64),
                raster.prefix_len[esc].astype(np.int64),
                raster.first_escape_iter[esc].astype(np.int64),
            ],
            axis=1,
        )
        uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
        table = np.empty((len(uniq), 3), dtype=np.uint8)
        for i, (bits, length, it) in enumerate(uniq.tolist()):
            light = 0.25 + 0.5 * math.exp(-it / palette.luminance_decay)
            table[i] = _rgb8(*colorsys.hls_to_rgb(_prefix_hue(bits, length), light, palette.saturation))
        out[esc] = table[inverse.ravel()]
    return out


def phase_portrait(m: PuncturedPolyMap, vp: Viewport, hue_levels: int = 360, light_levels: int = 64) -> np.ndarray:
    """Argument of f as hue, log-modulus as luminosity (cyclic bands)."""
    cols = np.arange(vp.px_w)
    rows = np.arange(vp.px_h)
    x = vp.center.real + (2 * cols + 1 - vp.px_w) / vp.px_w * vp.half_width
    y = vp.center.imag - (2 * rows + 1 - vp.px_h) / vp.px_h * vp.half_height
    z = x[None, :] + 1j * y[:, None]
    out = np.zeros((vp.px_h, vp.px_w, 3), dtype=np.uint8)
    ok = z != 0
    lw = log_evaluate(m, z[ok])
    hue = np.mod(lw.imag / (2 * math.pi), 1.0)
    band = np.mod(lw.real / math.log(2.0), 1.0)
    light = 0.3 + 0.45 * band
    hi = np.minimum((hue * hue_levels).astype(int), hue_levels - 1)
    li = np.minimum(((light - 0.3) / 0.45 * light_levels).astype(int), light_levels - 1)
    table = np.empty((hue_levels, light_levels, 3), dtype=np.uint8)
    for a in range(hue_levels):
        for b in range(light_levels):
            table[a, b] = _rgb8(*colorsys.hls_to_rgb(a / hue_levels, 0.3 + 0.45 * b / light_levels, 0.9))
    out[ok] = table[hi, li]
    return out


def ppm_bytes(rgb: np.ndarray) -> bytes:
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError("expected an (H, W, 3) array")
    h, w, _ = rgb.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + rgb.tobytes()


def _write(path, data: bytes | str):
    try:
        p = Path(path)
        if isinstance(data, bytes):
            p.write_bytes(data)
        else:
            p.write_text(data, encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}", path=str(path)) from None


def write_image(image, path, palette: Palette = Palette()):
    """Write a raster (colored with ``palette``) or an RGB array as binary P6."""
    rgb = colorize(image, palette) if isinstance(image, Raster) else image
    _write(path, ppm_bytes(rgb))


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    magic, dims, maxval, rest = data.split(b"\n", 3)
    if magic != b"P6" or maxval != b"255":
        raise ValueError("not an 8-bit P6 file")
    w, h = (int(v) for v in dims.split())
    return np.frombuffer(rest, dtype=np.uint8).reshape(h, w, 3)


def overlay_points(rgb: np.ndarray, vp: Viewport, points, color=(255, 255, 255)) -> np.ndarray:
    out = rgb.copy()
    for z in np.ravel(points):
        if not np.isfinite(z):
            continue
        row, col = vp.pixel_of(complex(z))
        if 0 <= row < vp.px_h and 0 <= col < vp.px_w:
            out[row, col] = color
    return out


def _fmt(x: float) -> str:
    return FLOAT_FMT % x


def header(kind: str, columns) -> str:
    return f"# cstar_rays {__version__} {kind}: " + "\t".join(columns) + "\n"


RAY_COLUMNS = ("address", "t", "re_w", "im_w", "re_z", "im_z")


def rays_text(rays) -> str:
    lines = [header("rays", RAY_COLUMNS)]
    for ray in rays:
        addr = str(ray.address)
        z = ray.z
        for t, w, zz in zip(ray.t, ray.w, z):
            lines.append(
                "\t".join((addr, _fmt(t), _fmt(w.real), _fmt(w.imag), _fmt(zz.real), _fmt(zz.imag))) + "\n"
            )
    return "".join(lines)


def write_rays(rays, path):
    """One record per sample: address, t, w, z, decimal at 17 significant digits."""
    _write(path, rays_text(rays))


def read_rays(path) -> list[tuple[str, float, complex, complex]]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#"):
            continue
        addr, t, rw, iw, rz, iz = line.split("\t")
        out.append((addr, float(t), complex(float(rw), float(iw)), complex(float(rz), float(iz))))
    return out


def write_polylines(polylines: dict, path, kind: str = "tracts"):
    """``polylines`` maps a label to an array of log-coordinate points."""
    lines = [header(kind, ("label", "index", "re_w", "im_w"))]
    for label, pts in polylines.items():
        for i, w in enumerate(np.ravel(pts)):
            if np.isfinite(w):
                lines.append(f"{label}\t{i}\t{_fmt(w.real)}\t{_fmt(w.imag)}\n")
    _write(path, "".join(lines))


def write_orbits(orbits, path):
    lines = [header("orbits", ("period", "index", "re_z", "im_z", "abs_z", "multiplier_abs", "class"))]
    for orb in orbits:
        for i, z in enumerate(orb.points):
            lines.append(
                f"{orb.period}\t{i}\t{_fmt(z.real)}\t{_fmt(z.imag)}\t{_fmt(abs(z))}\t"
                f"{_fmt(abs(orb.multiplier))}\t{orb.classification}\n"
            )
    _write(path, "".join(lines))


def dump_raster(raster: Raster, path):
    """Raw raster arrays as a compressed .npz next to the image."""
    vp = raster.viewport
    try:
        np.savez_compressed(
            path,
            status=raster.status,
            first_escape_iter=raster.first_escape_iter,
            prefix_bits=raster.prefix_bits,
            prefix_len=raster.prefix_len,
            last_log_modulus=raster.last_log_modulus,
            viewport=np.array([vp.center.real, vp.center.imag, vp.half_width, vp.half_height, vp.px_w, vp.px_h]),
            version=np.array(__version__),
        )
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}", path=str(path)) from None
