"""Escape-time classification of the plane, with essential-itinerary prefixes.

Orbits are iterated in the plane while |log|z|| stays below ``SWITCH_LOG``
and in logarithmic coordinates beyond it (imaginary part reduced mod 2*pi),
so nothing ever overflows.  A point is *escaped* once |log|f^n(z)|| exceeds
the escape radius, *bounded* if ``max_iter`` is reached with the last
quarter of the orbit inside |log|z|| <= ``bounded_log_radius``, and
*undecided* otherwise.

Itinerary prefixes are packed into a uint64, bit k = 1 meaning
|f^k(z)| > 1 (symbol ``inf``), bit k = 0 meaning |f^k(z)| <= 1 (symbol ``0``).
"""

from __future__ import annotations

import functools
import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .logspace import INF, ZERO, LogTransform
from .map_core import PuncturedPolyMap

ESCAPED, BOUNDED, UNDECIDED = 0, 1, 2
STATUS_NAMES = ("escaped", "bounded", "undecided")

SWITCH_LOG = 30.0
EXP_SAFE = 700.0
MAX_ITER = 256
PREFIX_LEN = 4
MAX_PREFIX = 56
BOUNDED_LOG_RADIUS = 8.0
THREADS_ENV = "CSTAR_THREADS"
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class Viewport:
    center: complex
    half_width: float
    half_height: float
    px_w: int
    px_h: int

    def __post_init__(self):
        if not (self.half_width > 0 and self.half_height > 0):
            raise ValueError("viewport half extents must be positive")
        if self.px_w < 1 or self.px_h < 1:
            raise ValueError("viewport needs at least one pixel per axis")
        pixel_aspect = (self.half_width / self.px_w) / (self.half_height / self.px_h)
        if abs(pixel_aspect - 1) > 1e-3:
            raise ValueError(
                f"pixels are not square: region aspect {self.half_width / self.half_height:.6g} "
                f"vs raster aspect {self.px_w / self.px_h:.6g}"
            )

    @classmethod
    def square(cls, center: complex, half: float, px: int) -> "Viewport":
        return cls(complex(center), float(half), float(half), int(px), int(px))

    def pixel_center(self, row: int, col: int) -> complex:
        x = self.center.real + (2 * col + 1 - self.px_w) / self.px_w * self.half_width
        y = self.center.imag - (2 * row + 1 - self.px_h) / self.px_h * self.half_height
        return complex(x, y)

    def pixel_of(self, z: complex) -> tuple[int, int]:
        col = math.floor((z.real - self.center.real + self.half_width) / (2 * self.half_width) * self.px_w)
        row = math.floor((self.center.imag + self.half_height - z.imag) / (2 * self.half_height) * self.px_h)
        return row, col

    @property
    def pixel_size(self) -> float:
        return 2 * self.half_width / self.px_w


@dataclass(frozen=True)
class PixelClass:
    status: str
    first_escape_iter: int | None
    prefix_bits: int
    prefix_len: int
    last_log_modulus: float

    @property
    def itinerary_prefix(self) -> tuple[str, ...]:
        return unpack_prefix(self.prefix_bits, self.prefix_len)


@dataclass
class Raster:
    viewport: Viewport
    status: np.ndarray
    first_escape_iter: np.ndarray
    prefix_bits: np.ndarray
    prefix_len: np.ndarray
    last_log_modulus: np.ndarray
    max_iter: int
    escape_log_radius: float

    def pixel(self, row: int, col: int) -> PixelClass:
        it = int(self.first_escape_iter[row, col])
        return PixelClass(
            status=STATUS_NAMES[self.status[row, col]],
            first_escape_iter=None if it < 0 else it,
            prefix_bits=int(self.prefix_bits[row, col]),
            prefix_len=int(self.prefix_len[row, col]),
            last_log_modulus=float(self.last_log_modulus[row, col]),
        )

    def counts(self) -> dict[str, int]:
        return {name: int(np.sum(self.status == k)) for k, name in enumerate(STATUS_NAMES)}

    def same_as(self, other: "Raster") -> bool:
        return all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("status", "first_escape_iter", "prefix_bits", "prefix_len", "last_log_modulus")
        )


def unpack_prefix(bits: int, length: int) -> tuple[str, ...]:
    return tuple(INF if (bits >> k) & 1 else ZERO for k in range(length))


def format_prefix(symbols) -> str:
    return "".join("∞" if s == INF else "0" for s in symbols)


# ---------------------------------------------------------------------------
# kernel
# ---------------------------------------------------------------------------


@numba.njit(cache=True, nogil=True)
def _horner(c, x):
    # c ascending
    acc = 0j
    for k in range(c.size - 1, -1, -1):
        acc = acc * x + c[k]
    return acc


@numba.njit(cache=True, nogil=True)
def _step_log(n, pc, qc, p, q, w):
    """One step in log coordinates. Returns (w_next, ok); ok is False when the
    dominant term would overflow."""
    if p * w.real > EXP_SAFE or -q * w.real > EXP_SAFE:
        return w, False
    z = np.exp(w)
    val = n * w + _horner(pc, z) + _horner(qc, 1.0 / z)
    im = val.imag - TWO_PI * math.floor(val.imag / TWO_PI)
    return complex(val.real, im), True


@numba.njit(cache=True, nogil=True)
def _target_bit(pc, qc, p, q, w):
    """Target of the tract containing w, judged by the dominant term."""
    if w.real > 0:
        a = pc[p]
        ang = p * w.imag + math.atan2(a.imag, a.real)
    else:
        b = qc[q]
        ang = -q * w.imag + math.atan2(b.imag, b.real)
    return 1 if math.cos(ang) > 0 else 0


@numba.njit(cache=True, nogil=True)
def _classify(n, pc, qc, p, q, z0, max_iter, esc, prefix_len, bounded_r):
    """Returns (status, first_escape_iter, bits, nbits, last_log_modulus)."""
    if z0 == 0:
        return UNDECIDED, -1, np.uint64(0), 0, 0.0
    z = z0
    w = complex(math.log(abs(z0)), math.atan2(z0.imag, z0.real))
    # tiny or huge starting points: 1/z or z**k would not be representable
    log_mode = abs(w.real) > SWITCH_LOG
    lm = w.real
    bits = np.uint64(0)
    nbits = 0
    escaped_at = -1
    frozen = False
    quarter = max_iter - max_iter // 4
    inside_tail = True
    prev = z
    it = 0
    while True:
        if nbits < prefix_len and not frozen:
            if lm > 0:
                bits |= np.uint64(1) << np.uint64(nbits)
            nbits += 1
        if escaped_at < 0 and abs(lm) > esc:
            escaped_at = it
        if escaped_at >= 0 and (nbits >= prefix_len or frozen):
            break
        if escaped_at < 0 and it >= quarter and abs(lm) > bounded_r:
            inside_tail = False
        if it >= max_iter:
            break
        # advance
        if not log_mode:
            e = _horner(pc, z) + _horner(qc, 1.0 / z)
            lnext = n * math.log(abs(z)) + e.real
            if abs(lnext) <= SWITCH_LOG:
                znew = z**n * np.exp(e) if n != 0 else np.exp(e)
                # exact cycles of length 1 or 2: nothing changes from here on
                if escaped_at < 0 and (znew == z or znew == prev):
                    period = 1 if znew == z else 2
                    lz = math.log(abs(znew))
                    lo = math.log(abs(z))
                    while nbits < prefix_len:
                        # symbols repeat with the cycle
                        idx = nbits - (it + 1)
                        lcur = lz if (period == 1 or idx % 2 == 0) else lo
                        if lcur > 0:
                            bits |= np.uint64(1) << np.uint64(nbits)
                        nbits += 1
                    last = lz if (period == 1 or (max_iter - it - 1) % 2 == 0) else lo
                    status = BOUNDED if abs(last) <= bounded_r and abs(lo) <= bounded_r else UNDECIDED
                    if not inside_tail:
                        status = UNDECIDED
                    return status, -1, bits, nbits, last
                prev = z
                z = znew
                lm = math.log(abs(z))
            else:
                arg = n * math.atan2(z.imag, z.real) + e.imag
                w = complex(lnext, arg - TWO_PI * math.floor(arg / TWO_PI))
                lm = lnext
                log_mode = True
        else:
            wn, ok = _step_log(n, pc, qc, p, q, w)
            if not ok:
                # saturation: record the current tract's target once, then stop
                if escaped_at >= 0:
                    if nbits < prefix_len:
                        if _target_bit(pc, qc, p, q, w) == 1:
                            bits |= np.uint64(1) << np.uint64(nbits)
                        nbits += 1
                    frozen = True
                    break
                # unreachable in practice: saturation implies |lm| > esc
                escaped_at = it
                frozen = True
                break
            w = wn
            lm = w.real
            if abs(lm) <= SWITCH_LOG:
                log_mode = False
                z = np.exp(w)
                prev = z
        it += 1
    if escaped_at >= 0:
        return ESCAPED, escaped_at, bits, nbits, lm
    if inside_tail and abs(lm) <= bounded_r:
        return BOUNDED, -1, bits, nbits, lm
    return UNDECIDED, -1, bits, nbits, lm


@numba.njit(cache=True, nogil=True)
def _classify_rows(n, pc, qc, p, q, cx, cy, hw, hh, W, H, r0, r1, max_iter, esc, prefix_len, bounded_r,
                   status, first, bits, nbits, lastlm):
    for row in range(r0, r1):
        y = cy - (2 * row + 1 - H) / H * hh
        for col in range(W):
            x = cx + (2 * col + 1 - W) / W * hw
            s, f, b, nb, lm = _classify(n, pc, qc, p, q, complex(x, y), max_iter, esc, prefix_len, bounded_r)
            status[row, col] = s
            first[row, col] = f
            bits[row, col] = b
            nbits[row, col] = nb
            lastlm[row, col] = lm


def _coeffs(m: PuncturedPolyMap):
    pc = np.array(m.p_coeffs, dtype=np.complex128)
    qc = np.array((0j,) + m.q_coeffs, dtype=np.complex128)
    return int(m.index_n), pc, qc, m.p, m.q


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=64)
def default_escape_log_radius(m: PuncturedPolyMap) -> float:
    return max(LogTransform(m).r_norm, 50.0)


def _validate(max_iter, escape_log_radius, prefix_len):
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if not escape_log_radius > 0:
        raise ValueError("escape_log_radius must be positive")
    if not 0 <= prefix_len <= MAX_PREFIX:
        raise ValueError(f"prefix_len must lie in [0, {MAX_PREFIX}]")


def classify_point(
    m: PuncturedPolyMap,
    z: complex,
    max_iter: int = MAX_ITER,
    escape_log_radius: float | None = None,
    prefix_len: int = PREFIX_LEN,
    bounded_log_radius: float = BOUNDED_LOG_RADIUS,
) -> PixelClass:
    if escape_log_radius is None:
        escape_log_radius = default_escape_log_radius(m)
    _validate(max_iter, escape_log_radius, prefix_len)
    n, pc, qc, p, q = _coeffs(m)
    s, f, b, nb, lm = _classify(
        n, pc, qc, p, q, complex(z), max_iter, float(escape_log_radius), prefix_len, bounded_log_radius
    )
    return PixelClass(STATUS_NAMES[s], None if f < 0 else int(f), int(b), int(nb), float(lm))


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "")))
    except ValueError:
        return os.cpu_count() or 1


def classify_grid(
    m: PuncturedPolyMap,
    vp: Viewport,
    max_iter: int = MAX_ITER,
    escape_log_radius: float | None = None,
    prefix_len: int = PREFIX_LEN,
    bounded_log_radius: float = BOUNDED_LOG_RADIUS,
    threads: int | None = None,
) -> Raster:
    """Classify every pixel center of ``vp``.

    Rows are split into contiguous blocks, one per worker; each pixel is
    written by exactly one worker, so the raster does not depend on the
    schedule.
    """
    if escape_log_radius is None:
        escape_log_radius = default_escape_log_radius(m)
    _validate(max_iter, escape_log_radius, prefix_len)
    threads = default_threads() if threads is None else max(1, int(threads))
    n, pc, qc, p, q = _coeffs(m)
    H, W = vp.px_h, vp.px_w
    status = np.empty((H, W), dtype=np.uint8)
    first = np.empty((H, W), dtype=np.int32)
    bits = np.empty((H, W), dtype=np.uint64)
    nbits = np.empty((H, W), dtype=np.uint8)
    lastlm = np.empty((H, W), dtype=np.float64)
    args = (n, pc, qc, p, q, vp.center.real, vp.center.imag, vp.half_width, vp.half_height, W, H)
    tail = (max_iter, float(escape_log_radius), prefix_len, bounded_log_radius, status, first, bits, nbits, lastlm)
    # more blocks than workers evens out rows of unequal cost
    blocks = min(H, threads * 8)
    edges = np.linspace(0, H, blocks + 1).astype(int)
    if threads == 1:
        for r0, r1 in zip(edges[:-1], edges[1:]):
            _classify_rows(*args, int(r0), int(r1), *tail)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_classify_rows, *args, int(r0), int(r1), *tail)
                       for r0, r1 in zip(edges[:-1], edges[1:])]
            for fut in futures:
                fut.result()
    return Raster(vp, status, first, bits, nbits, lastlm, max_iter, float(escape_log_radius))


def itinerary_histogram(raster: Raster) -> Counter:
    """Pixel counts of escaped pixels per itinerary prefix (a tuple of symbols)."""
    mask = raster.status == ESCAPED
    keys = raster.prefix_bits[mask].astype(np.uint64) | (raster.prefix_len[mask].astype(np.uint64) << np.uint64(56))
    uniq, counts = np.unique(keys, return_counts=True)
    out: Counter = Counter()
    for key, c in zip(uniq.tolist(), counts.tolist()):
        length = key >> 56
        out[unpack_prefix(key & ((1 << 56) - 1), length)] += c
    return out


def merge_histograms(*hists: Counter) -> Counter:
    out: Counter = Counter()
    for h in hists:
        out.update(h)
    return out
