"""Exception hierarchy shared across the package."""


class AcoreError(Exception):
    """Base class for all acore errors."""


class ParameterError(AcoreError):
    """An argument violates a length or range precondition."""


class EncodingLimitError(AcoreError):
    """A field exceeds the limits of the wire encoding."""


class MalformedError(AcoreError):
    """Bytes that do not parse as a strict canonical container."""


class FrameTooLargeError(AcoreError):
    """Transport frame exceeds the 1 MiB cap."""


class PufError(AcoreError):
    """Base class for PUF group and instance errors."""


class InstanceUnavailableError(PufError):
    """Evaluation requested on a failed, retired, or seedless instance."""


class NotAMemberError(PufError):
    """Instance does not belong to the group."""


class MembershipError(PufError):
    """Duplicate add or removal of an unknown instance."""


class EmptyGroupError(PufError):
    """Group proof requested for a group with no active instances."""


class GroupExhaustedError(PufError):
    """No active instance left to select."""


class DuplicateSerialError(AcoreError):
    """Issuer already used this serial."""


class AuthorizationError(AcoreError):
    """Log submission from a CA that is not on the authorized list."""


class NotLoggedError(AcoreError):
    """Bundle requested for a certificate that was never appended."""


class RangeError(AcoreError):
    """Proof index or size outside the log bounds."""


class ValidationFailedError(AcoreError):
    """Domain did not answer the validation challenge."""
