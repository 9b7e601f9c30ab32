"""Exception hierarchy. Every error carries a module-qualified ``code``."""


class CstarError(Exception):
    code = "cstar.error"

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context


class DomainError(CstarError, ValueError):
    code = "map_core.domain"


class InvalidMapError(CstarError, ValueError):
    code = "map_core.invalid_map"


class MapRangeError(CstarError, OverflowError):
    """Exponential left the double range; evaluate in logarithmic coordinates."""

    code = "map_core.range"


class RootFindingError(CstarError, RuntimeError):
    code = "map_core.roots"


class OrbitSearchError(CstarError, RuntimeError):
    code = "map_core.orbit_search"


class LogRangeError(CstarError, OverflowError):
    code = "logspace.range"


class PreconditionError(CstarError, ValueError):
    code = "logspace.precondition"


class BranchError(CstarError, RuntimeError):
    code = "logspace.branch"


class NormalizationError(CstarError, RuntimeError):
    code = "logspace.normalization"


class BoundaryError(CstarError, ValueError):
    code = "logspace.boundary"


class AddressSyntaxError(CstarError, ValueError):
    code = "symbolic.syntax"


class IncomparableError(CstarError, ValueError):
    code = "symbolic.incomparable"


class InadmissibleError(CstarError, ValueError):
    code = "symbolic.inadmissible"


class ProfileError(CstarError, ValueError):
    code = "symbolic.profile"


class TraceError(CstarError, RuntimeError):
    code = "rays.trace"


class SamplingError(CstarError, RuntimeError):
    code = "rays.sampling"


class SpeedOrderError(CstarError, RuntimeError):
    code = "rays.speed_order"


class ConfigError(CstarError, ValueError):
    code = "cli_io.config"


class OutputError(CstarError, OSError):
    code = "cli_io.output"
