"""Exception types raised across the package."""


class JointSigError(Exception):
    """Base class for all errors raised by jointsig."""


class DomainError(JointSigError, ValueError):
    """A polygon or window lies outside the domain of a signature family.

    ``index`` is the 1-based cyclic index of the offending vertex or window,
    or ``None`` when the error is not tied to one position.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class TooFewVertices(DomainError):
    pass


class DuplicateConsecutiveVertices(DomainError):
    pass


class CollinearTriple(DomainError):
    pass


class NoExactTransform(JointSigError):
    """No group element maps the source points onto the destination points."""


class DegenerateAnchor(JointSigError, ValueError):
    """Anchor points are coincident or collinear, so recovery is not unique."""


class EmptySolution(JointSigError):
    """No next vertex reproduces the requested signature point."""


class GroupMismatch(JointSigError, ValueError):
    pass


class LengthMismatch(JointSigError, ValueError):
    pass
