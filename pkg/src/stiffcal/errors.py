"""Exception types shared across the package."""


class StiffcalError(Exception):
    """Base class for all stiffcal errors."""


class SingularConfiguration(StiffcalError):
    """The arm is in (or too close to) a kinematic singularity."""


class NonPositiveForce(StiffcalError):
    """A force magnitude that must be positive is zero or negative."""


class UnidentifiablePlan(StiffcalError):
    """The experiment plan carries no information about one or more joints.

    ``joints`` lists 1-based joint indices that are unobservable when the
    singular direction of the information matrix is axis aligned; it is
    empty when the deficiency is not attributable to a single joint.
    """

    def __init__(self, message, joints=()):
        super().__init__(message)
        self.joints = tuple(joints)


class DegenerateTestPose(StiffcalError):
    """The test pose weights some compliance direction with zero sensitivity,
    so no plan can bound the compensation error in that direction."""


class NoConvergence(StiffcalError):
    """No optimizer start produced a finite objective."""
