"""Exception hierarchy shared across the pipeline."""


class TriageError(Exception):
    """Base class for all pipeline errors."""


class IoFailure(TriageError):
    """Filesystem or network I/O failed in a way the caller cannot ignore."""


class ConfigMismatch(TriageError):
    """A batch exists on disk but was produced under a different configuration."""


class InvalidElementId(TriageError):
    """Element id violates the filesystem-safe naming rules."""


class DuplicateElement(TriageError):
    """Element id already committed in this batch."""


class ConfigError(TriageError):
    """Run configuration is syntactically or semantically invalid."""


class ConfigSyntaxError(ConfigError):
    """YAML could not be parsed; message carries the offending line."""


class UnknownComponent(ConfigError):
    """Component name does not resolve in the registry."""


class MissingField(ConfigError):
    """Required configuration field is absent."""


class SpawnFailure(TriageError):
    """External process could not be started."""


class ExternalTimeout(TriageError):
    """External process exceeded its time budget and was killed."""


class EmptyOutput(TriageError):
    """External process exited 0 but produced no output files."""


class EndpointUnreachable(TriageError):
    """Index endpoint could not be contacted; fatal for the selector stage."""


class DownloadFailure(TriageError):
    """A single media download failed; the element fails, the stage continues."""


class DecodeFailure(TriageError):
    """Video container could not be decoded."""


class UnsupportedContainer(TriageError):
    """No decoder is available for this video container."""


class MissingSidecar(TriageError):
    """Sidecar score file expected next to a frame was not found."""


class MissingMask(TriageError):
    """Image element lacks the paired mask file required for annotation."""


class UnknownInstanceId(TriageError):
    """Mask contains an instance id absent from the class map."""


class DegenerateLabels(TriageError):
    """ROC metrics need at least one positive and one negative."""


class NoPositives(TriageError):
    """Precision/recall metrics need at least one positive."""


class MissingGroundTruth(TriageError):
    """A timeline has no ground-truth label."""


class BadQuery(TriageError):
    """HTTP query parameter out of range or unknown."""


class BindFailure(TriageError):
    """Viewer service could not bind its host:port."""
