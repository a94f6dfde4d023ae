"""Exception hierarchy shared by all qwblow modules.

Two families matter for the CLI exit codes: bad user input (exit 1) and
numerical/runtime failures (exit 2).
"""


class InputError(ValueError):
    """Invalid user input: bad config values, malformed data, precondition violations."""


class TrivialDataError(InputError):
    """Both initial profiles vanish identically; the lifespan functional is undefined."""


class RunFailure(RuntimeError):
    """A computation failed at runtime (quadrature, inversion, path tracing, ...)."""


class QuadratureError(RunFailure):
    """Adaptive quadrature did not converge to the requested tolerance."""


class FoldError(RunFailure):
    """A characteristic fan was queried past its first fold (non-monotone q)."""


class NoAdmissiblePointError(RunFailure):
    """The scan found no grid point where the lifespan functional is defined."""
