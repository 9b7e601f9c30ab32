"""Symbolic dynamics: essential itineraries, external addresses, orderings.

Sequences are eventually periodic and stored in canonical form: the period
is primitive (not a power of a shorter word) and the preperiod is as short
as possible (its last symbol never equals the last symbol of the period).

Address text syntax, shared by every command::

    [(inf,0,0)] ([(inf,1,0),(0,0,0)])

a bracketed preperiod of (side, band, strip) triples followed by the
parenthesized, bracketed period.  Itineraries use the same layout over the
symbols ``0`` and ``inf``: ``[0] ([inf])``.
"""

from __future__ import annotations

import functools
import itertools
import math
import re
from dataclasses import dataclass
from typing import Hashable, Sequence

from .errors import AddressSyntaxError, IncomparableError, InadmissibleError, ProfileError
from .logspace import INF, SIDES, ZERO, LogTransform, TractId, band_center, band_target, tract_info

# ---------------------------------------------------------------------------
# canonical eventually-periodic words
# ---------------------------------------------------------------------------


def _primitive(word: tuple) -> tuple:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


def canonical(pre: Sequence[Hashable], period: Sequence[Hashable]) -> tuple[tuple, tuple]:
    pre, period = tuple(pre), tuple(period)
    if not period:
        raise ValueError("period must be nonempty")
    period = _primitive(period)
    # absorb trailing preperiod symbols into the period by rotation
    while pre and pre[-1] == period[-1]:
        pre = pre[:-1]
        period = (period[-1],) + period[:-1]
    return pre, period


class _Periodic:
    """Shared behaviour of eventually periodic sequences."""

    preperiod: tuple
    period: tuple

    def __getitem__(self, n: int):
        if n < len(self.preperiod):
            return self.preperiod[n]
        return self.period[(n - len(self.preperiod)) % len(self.period)]

    def prefix(self, k: int) -> tuple:
        return tuple(self[i] for i in range(k))

    @property
    def is_periodic(self) -> bool:
        return not self.preperiod

    def shifted(self, k: int):
        if k < 0:
            raise ValueError("shift must be >= 0")
        pre = self.preperiod[k:]
        r = max(0, k - len(self.preperiod)) % len(self.period)
        period = self.period[r:] + self.period[:r]
        return type(self)(pre, period)

    def symbols(self) -> set:
        return set(self.preperiod) | set(self.period)


@dataclass(frozen=True)
class EssentialItinerary(_Periodic):
    preperiod: tuple
    period: tuple

    def __post_init__(self):
        for s in self.preperiod + tuple(self.period):
            if s not in SIDES:
                raise ValueError(f"itinerary symbols must be '0' or 'inf', got {s!r}")
        pre, per = canonical(self.preperiod, self.period)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    def __str__(self):
        return f"[{','.join(self.preperiod)}] ([{','.join(self.period)}])"


@dataclass(frozen=True)
class ExternalAddress(_Periodic):
    preperiod: tuple
    period: tuple

    def __post_init__(self):
        for t in self.preperiod + tuple(self.period):
            if not isinstance(t, TractId):
                raise TypeError("address entries must be TractId")
        pre, per = canonical(self.preperiod, self.period)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    def __str__(self):
        fmt = lambda ts: ",".join(str(t) for t in ts)
        return f"[{fmt(self.preperiod)}] ([{fmt(self.period)}])"


@dataclass(frozen=True)
class HeadStartProfile:
    """phi(x) = slope_K * x + offset."""

    slope_K: float
    offset: float = 0.0

    def __post_init__(self):
        if not self.slope_K > 1:
            raise ProfileError("head-start slope must exceed 1", slope_K=self.slope_K)
        if not self.offset >= 0:
            raise ProfileError("head-start offset must be >= 0", offset=self.offset)

    def __call__(self, x):
        return self.slope_K * x + self.offset


# ---------------------------------------------------------------------------
# text syntax
# ---------------------------------------------------------------------------

_TRIPLE = re.compile(r"\(\s*(0|inf|∞)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")
_LAYOUT = re.compile(r"^\s*\[(?P<pre>[^\[\]]*)\]\s*\(\s*\[(?P<per>[^\[\]]*)\]\s*\)\s*$")


def _side(token: str) -> str:
    token = token.strip()
    if token in ("inf", "∞"):
        return INF
    if token == "0":
        return ZERO
    raise AddressSyntaxError(f"unknown side symbol {token!r}")


def _parse_triples(body: str, text: str) -> tuple:
    body = body.strip()
    if not body:
        return ()
    out = []
    pos = 0
    while pos < len(body):
        mt = _TRIPLE.match(body, pos)
        if not mt:
            raise AddressSyntaxError(f"malformed tract triple at column {pos} in {text!r}")
        out.append(TractId(_side(mt.group(1)), int(mt.group(2)), int(mt.group(3))))
        pos = mt.end()
        rest = body[pos:].lstrip()
        if rest.startswith(","):
            pos = len(body) - len(rest) + 1
            while pos < len(body) and body[pos].isspace():
                pos += 1
        elif rest:
            raise AddressSyntaxError(f"expected ',' at column {len(body) - len(rest)} in {text!r}")
        else:
            break
    return tuple(out)


def parse_address(text: str) -> ExternalAddress:
    mt = _LAYOUT.match(text)
    if not mt:
        raise AddressSyntaxError(f"expected '[preperiod] ([period])', got {text!r}")
    pre = _parse_triples(mt.group("pre"), text)
    per = _parse_triples(mt.group("per"), text)
    if not per:
        raise AddressSyntaxError("period must be nonempty")
    return ExternalAddress(pre, per)


def parse_itinerary(text: str) -> EssentialItinerary:
    mt = _LAYOUT.match(text)
    if not mt:
        raise AddressSyntaxError(f"expected '[preperiod] ([period])', got {text!r}")

    def syms(body):
        body = body.strip()
        return tuple(_side(s) for s in body.split(",")) if body else ()

    per = syms(mt.group("per"))
    if not per:
        raise AddressSyntaxError("period must be nonempty")
    return EssentialItinerary(syms(mt.group("pre")), per)


def format_address(addr: ExternalAddress) -> str:
    return str(addr)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def itinerary_of_address(addr: ExternalAddress) -> EssentialItinerary:
    return EssentialItinerary(
        tuple(t.side for t in addr.preperiod), tuple(t.side for t in addr.period)
    )


def admissible(addr: ExternalAddress) -> bool:
    """target(T_n) == side(T_{n+1}) along the whole sequence."""
    n = len(addr.preperiod) + len(addr.period)
    return all(band_target(addr[i].band) == addr[i + 1].side for i in range(n))


def shift(seq, k: int):
    return seq.shifted(k)


def _rotations_equal(a: tuple, b: tuple) -> bool:
    return len(a) == len(b) and any(a[i:] + a[:i] == b for i in range(len(a)))


def equivalent(e1: _Periodic, e2: _Periodic) -> bool:
    """Some shift of one equals some shift of the other."""
    return _rotations_equal(e1.period, e2.period)


def _cmp(a, b) -> int:
    return (a > b) - (a < b)


def lex_compare_tracts(m, t1: TractId, t2: TractId) -> int:
    """-1, 0, 1. Ascending vertical order on side inf, descending on side 0."""
    m = m.map if isinstance(m, LogTransform) else m
    if t1.side != t2.side:
        raise IncomparableError(f"tracts {t1} and {t2} cling to different singularities")
    if t1 == t2:
        return 0
    c1 = band_center(m, t1.side, t1.band, t1.strip)
    c2 = band_center(m, t2.side, t2.band, t2.strip)
    order = _cmp(c1, c2)
    return order if t1.side == INF else -order


def lex_compare_addresses(m, s1: ExternalAddress, s2: ExternalAddress) -> int:
    if s1 == s2:
        return 0
    n = len(s1.preperiod) + len(s2.preperiod) + math.lcm(len(s1.period), len(s2.period))
    for k in range(n):
        a, b = s1[k], s2[k]
        if a != b:
            if a.side != b.side:
                raise IncomparableError(
                    f"addresses first differ at index {k} across singularities", index=k
                )
            return lex_compare_tracts(m, a, b)
    return 0


def sort_addresses(m, addrs):
    return sorted(addrs, key=functools.cmp_to_key(lambda a, b: lex_compare_addresses(m, a, b)))


# ---------------------------------------------------------------------------
# fundamental-domain addressing
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class FundamentalLabel:
    """A fundamental domain of f: tract of f (side, band) plus the strip of
    the image that contains the next tract."""

    side: str
    band: int
    image_strip: int

    def __str__(self):
        return f"<{self.side},{self.band},{self.image_strip}>"


@dataclass(frozen=True)
class FundamentalAddress(_Periodic):
    preperiod: tuple
    period: tuple

    def __post_init__(self):
        pre, per = canonical(self.preperiod, self.period)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)


def _strip_of(L: LogTransform, t: TractId) -> int:
    return math.floor((tract_info(L.map, t).center_im - L.delta_line_im) / (2 * math.pi))


def tracts_to_fundamental(L: LogTransform, addr: ExternalAddress) -> FundamentalAddress:
    if not admissible(addr):
        raise InadmissibleError(f"address {addr} is not admissible")
    n_pre = len(addr.preperiod)
    n_per = len(addr.period)

    def label(i):
        t, nxt = addr[i], addr[i + 1]
        return FundamentalLabel(t.side, t.band, _strip_of(L, nxt))

    pre = tuple(label(i) for i in range(n_pre))
    per = tuple(label(i) for i in range(n_pre, n_pre + n_per))
    return FundamentalAddress(pre, per)


def fundamental_to_tracts(L: LogTransform, fa: FundamentalAddress, first_strip: int = 0) -> ExternalAddress:
    """Inverse of :func:`tracts_to_fundamental`, given the strip of T_0."""
    n_pre = len(fa.preperiod)
    n_per = len(fa.period)

    def strip_for(side, band, fund_strip):
        base = tract_info(L.map, TractId(side, band, 0)).center_im
        k = fund_strip - math.floor((base - L.delta_line_im) / (2 * math.pi))
        return k

    def tract(i):
        d = fa[i]
        if i == 0:
            return TractId(d.side, d.band, first_strip)
        prev = fa[i - 1]
        return TractId(d.side, d.band, strip_for(d.side, d.band, prev.image_strip))

    # T_n for n >= 1 depends on labels n-1 and n, so it is periodic from n_pre + 1 on
    seq = [tract(i) for i in range(n_pre + n_per + 1)]
    return ExternalAddress(tuple(seq[: n_pre + 1]), tuple(seq[n_pre + 1 :]))


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def enumerate_addresses(e: EssentialItinerary, symbols, max_period: int) -> list[ExternalAddress]:
    """Admissible addresses over ``symbols`` whose itinerary is ``e``.

    Preperiod length equals that of ``e``; period lengths are the multiples
    of len(e.period) up to ``max_period`` (at least one period of e).
    """
    symbols = sorted(set(symbols))
    by_side = {s: [t for t in symbols if t.side == s] for s in SIDES}
    pre_choices = [by_side[s] for s in e.preperiod]
    lp = len(e.period)
    lengths = [k for k in range(lp, max(max_period, lp) + 1) if k % lp == 0]
    found = set()
    for length in lengths:
        per_choices = [by_side[e.period[i % lp]] for i in range(length)]
        for pre in itertools.product(*pre_choices):
            for per in itertools.product(*per_choices):
                addr = ExternalAddress(pre, per)
                if itinerary_of_address(addr) == e and admissible(addr):
                    found.add(addr)
    return sorted(found, key=str)
