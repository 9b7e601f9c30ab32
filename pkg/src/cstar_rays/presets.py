"""Named maps used throughout the examples and tests."""

from __future__ import annotations

from .map_core import PuncturedPolyMap


def arnold(alpha: float = 0.19725, beta: float = 0.48348) -> PuncturedPolyMap:
    """Complexified standard family z*e^{i alpha}*e^{beta (z - 1/z)/2}."""
    return PuncturedPolyMap(
        1, (1j * alpha, beta / 2), (-beta / 2,), name=f"arnold({alpha:g},{beta:g})"
    )


def disjoint(c: float = 0.3) -> PuncturedPolyMap:
    """exp(c (z + 1/z)); c = 0.3 has an attracting fixed point near 2.2373."""
    return PuncturedPolyMap(0, (0, c), (c,), name=f"disjoint({c:g})")


def example_i() -> PuncturedPolyMap:
    """exp(z + 1/z): the positive reals form a fixed, broken ray."""
    return PuncturedPolyMap(0, (0, 1), (1,), name="example_i")


def example_ii() -> PuncturedPolyMap:
    """exp(-z + 1/z): (0,1) and (1,inf) form a 2-cycle of rays landing at 1."""
    return PuncturedPolyMap(0, (0, -1), (1,), name="example_ii")


def order32() -> PuncturedPolyMap:
    """exp(z^3 + 1/z^2), orders 3 at infinity and 2 at zero."""
    return PuncturedPolyMap(0, (0, 0, 0, 1), (0, 1), name="order32")


PRESETS = {
    "arnold": arnold,
    "disjoint": disjoint,
    "example_i": example_i,
    "example_ii": example_ii,
    "order32": order32,
}


def preset(name: str, params=()) -> PuncturedPolyMap:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None
    return factory(*params)


def acceptance_presets() -> list[PuncturedPolyMap]:
    return [arnold(), disjoint(), example_i(), example_ii(), order32()]
