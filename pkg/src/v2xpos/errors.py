"""Named domain errors.

Every error carries a short ``name`` string; the command line prints it on
standard error so scripts can match on it.
"""


class PositioningError(ValueError):
    name = "positioning-error"

    def __str__(self):
        msg = super().__str__()
        return f"{self.name}: {msg}" if msg else self.name


class ConfigError(PositioningError):
    name = "invalid-config"


class PackingError(PositioningError):
    name = "infeasible-packing"


class NoPeakError(PositioningError):
    name = "no-peak"


class ToneErasedError(PositioningError):
    name = "tone-erased"


class AmbiguityError(PositioningError):
    name = "ambiguity-failure"


class DegenerateLocusError(PositioningError):
    name = "degenerate-locus"


class UnderDeterminedError(PositioningError):
    name = "under-determined"


class IllConditionedError(PositioningError):
    name = "ill-conditioned"


class InfeasibleError(PositioningError):
    name = "infeasible"


class NoIntersectionError(PositioningError):
    name = "no-intersection"


class NoCrossingError(PositioningError):
    name = "no-crossing"


class InconsistentPathsError(PositioningError):
    name = "inconsistent-paths"


class ClassificationError(PositioningError):
    name = "classification-failure"
