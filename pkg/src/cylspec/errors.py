"""Exception hierarchy.

Every error carries a short ``code`` string so the CLI can map failures to
stable exit codes without string matching on messages.
"""


class CylSpecError(Exception):
    code = "error"


class InvalidParameter(CylSpecError, ValueError):
    code = "invalid-parameter"


class NoPeriodicOrbit(CylSpecError):
    code = "no-periodic-orbit"


class BracketFailure(CylSpecError):
    code = "bracket-failure"


class GridTooSmall(CylSpecError, ValueError):
    code = "grid-too-small"


class GridTooShort(CylSpecError, ValueError):
    code = "grid-too-short"


class ConvergenceFailure(CylSpecError, RuntimeError):
    code = "convergence-failure"

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class WeightOverflow(CylSpecError):
    code = "weight-overflow"


class Unsupported(CylSpecError):
    code = "unsupported"


class NotHyperbolic(CylSpecError):
    code = "not-hyperbolic"


class NotRightOfEssential(CylSpecError):
    code = "not-right-of-essential"


class InvalidWindow(CylSpecError, ValueError):
    code = "invalid-window"


class SingularFactorization(CylSpecError, ArithmeticError):
    code = "singular"


class ConfigError(CylSpecError):
    code = "config-error"
