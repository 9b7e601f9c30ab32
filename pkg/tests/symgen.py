"""Random eventually-periodic sequences for the symbolic property tests."""

from cstar_rays.logspace import INF, ZERO, TractId, band_target
from cstar_rays.symbolic import EssentialItinerary, ExternalAddress

# tracts of a map with p = q = 1 over strips -1..1
TRACTS = [TractId(s, b, k) for s in (INF, ZERO) for b in (0, 1) for k in (-1, 0, 1)]


def random_word(rng, symbols, lo, hi):
    n = int(rng.integers(lo, hi + 1))
    return tuple(symbols[int(i)] for i in rng.integers(0, len(symbols), n))


def random_itinerary(rng, max_pre=3, max_per=4):
    sides = [INF, ZERO]
    return EssentialItinerary(random_word(rng, sides, 0, max_pre), random_word(rng, sides, 1, max_per))


def random_address(rng, max_pre=3, max_per=4):
    """Any address over TRACTS, admissible or not."""
    return ExternalAddress(random_word(rng, TRACTS, 0, max_pre), random_word(rng, TRACTS, 1, max_per))


def _walk(rng, start_side, n):
    out = []
    side = start_side
    for _ in range(n):
        choices = [t for t in TRACTS if t.side == side]
        t = choices[int(rng.integers(len(choices)))]
        out.append(t)
        side = band_target(t.band)
    return out


def random_admissible(rng, max_pre=3, max_per=4):
    """Admissible address built by a walk in the transition graph that closes up."""
    while True:
        pre_n = int(rng.integers(0, max_pre + 1))
        per_n = int(rng.integers(1, max_per + 1))
        seq = _walk(rng, [INF, ZERO][int(rng.integers(2))], pre_n + per_n)
        per = seq[pre_n:]
        if band_target(per[-1].band) == per[0].side:
            return ExternalAddress(tuple(seq[:pre_n]), tuple(per))


def random_with_itinerary(rng, e: EssentialItinerary, n_pre_extra=2):
    """Address (not necessarily admissible) whose itinerary is ``e``."""
    lp = len(e.period) * int(rng.integers(1, 3))
    pick = lambda side: [t for t in TRACTS if t.side == side][int(rng.integers(6))]
    pre = tuple(pick(s) for s in e.preperiod)
    per = tuple(pick(e.period[i % len(e.period)]) for i in range(lp))
    return ExternalAddress(pre, per)
