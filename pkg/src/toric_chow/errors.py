class ToricChowError(Exception):
    """Base class for errors raised by toric-chow.

    Each subclass carries a machine-readable `reason`, used by the CLI.
    """

    reason = "error"
    exit_code = 2


class InstanceError(ToricChowError):
    reason = "invalid_instance"


class FanError(ToricChowError):
    reason = "invalid_fan"

    def __init__(self, message: str, witness: object = None):
        super().__init__(message)
        self.witness = witness


class RankError(ToricChowError):
    reason = "rank_deficient"


class NotSemiProjectiveError(ToricChowError):
    reason = "not_semiprojective"


class NotFiniteError(ToricChowError):
    reason = "not_finite"


class MalformedTripleError(ToricChowError):
    reason = "malformed_triple"


class NoIntegralLiftError(ToricChowError):
    reason = "no_integral_lift"


class NotGenericError(ToricChowError):
    reason = "not_generic"

    def __init__(self, message: str, witness: object = None):
        super().__init__(message)
        self.witness = witness


class BijectionError(ToricChowError):
    reason = "bijection_failed"
    exit_code = 3


class VerificationError(ToricChowError):
    reason = "verification_failed"
    exit_code = 3


class InternalError(ToricChowError):
    "A failure inside the library on an accepted instance."

    reason = "internal_error"
    exit_code = 4
