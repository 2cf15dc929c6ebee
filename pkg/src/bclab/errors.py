"""Exception hierarchy.

Every error raised on purpose by the package derives from ``BclabError`` so
callers (the CLI in particular) can map failures onto exit codes.
"""


class BclabError(Exception):
    """Base class for all package errors."""


# geometry
class OutOfDomain(BclabError, ValueError):
    pass


class RankDeficient(BclabError):
    pass


class Degenerate(BclabError):
    pass


# analysis
class NearPole(BclabError):
    pass


class MeanCurvatureVanishes(BclabError):
    pass


class GradientVanishes(BclabError):
    pass


class UnstableFrame(BclabError):
    pass


class InsufficientSamples(BclabError, ValueError):
    pass


class CurveLeftDomain(BclabError):
    pass


# profile ODE
class PoleHit(BclabError):
    pass


class BadInitial(BclabError, ValueError):
    pass


class StepCollapse(BclabError):
    pass


# factory
class FamilyMismatch(BclabError, ValueError):
    pass


class PoleMargin(BclabError, ValueError):
    pass


class BadParams(BclabError, ValueError):
    pass
