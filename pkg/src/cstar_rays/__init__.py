"""Dynamic rays and escaping sets of finite-order self-maps of the punctured plane.

The maps are ``f(z) = z**n * exp(P(z) + Q(1/z))`` with nonconstant
polynomials P and Q.  Modules, bottom up:

- :mod:`map_core`: evaluation, derivatives, critical points, periodic orbits
- :mod:`logspace`: the lift F(w) = n w + P(e^w) + Q(e^-w), tracts, inverse branches
- :mod:`symbolic`: itineraries, external addresses, orderings
- :mod:`rays`: ray tracing by pullback, landing, head-start checks, bouquets
- :mod:`escape`: escape-time classification of pixel grids
- :mod:`config`, :mod:`io`, :mod:`cli`: configuration, file formats, command line
"""

__version__ = "0.1.0"

from .errors import CstarError  # noqa: E402
from .logspace import LogTransform, TractId, TractInfo  # noqa: E402
from .map_core import (  # noqa: E402
    OrderData,
    PeriodicOrbit,
    PuncturedPolyMap,
    SingularData,
    critical_points,
    evaluate,
    find_periodic_orbit,
    log_derivative,
    order,
    postsingular_sample,
)
from .presets import PRESETS, preset  # noqa: E402
from .symbolic import (  # noqa: E402
    EssentialItinerary,
    ExternalAddress,
    HeadStartProfile,
    parse_address,
    parse_itinerary,
)

__all__ = [
    "CstarError",
    "EssentialItinerary",
    "ExternalAddress",
    "HeadStartProfile",
    "LogTransform",
    "OrderData",
    "PRESETS",
    "PeriodicOrbit",
    "PuncturedPolyMap",
    "SingularData",
    "TractId",
    "TractInfo",
    "critical_points",
    "evaluate",
    "find_periodic_orbit",
    "log_derivative",
    "order",
    "parse_address",
    "parse_itinerary",
    "postsingular_sample",
    "preset",
    "__version__",
]
