"""Exception types shared across the package."""


class FlowError(ValueError):
    """Base class for errors raised while reading or building flow programs."""


class FlowSyntaxError(FlowError):
    """The program document is not a well-formed flow document."""


class MissingFieldError(FlowError):
    """A node record lacks a required field (id or type)."""


class DuplicateIdError(FlowError):
    """Two nodes in one program share an id."""


class DanglingWireError(FlowError):
    """A wire targets an id that no node in the program carries."""


class CycleError(FlowError):
    """The wire graph contains a directed cycle; the metric is defined on DAGs only."""


class FlatlandFormatError(FlowError):
    """A flatland program document violates the primitive/chain structure."""


class TooLargeError(ValueError):
    """Input exceeds the tractability bound of an exhaustive routine."""


class EmptyPoolError(ValueError):
    """A nearest-neighbour pool contains no reference programs."""


class InvalidConfigError(ValueError):
    """A simulation or dataset configuration is out of its documented range."""


class ManifestError(ValueError):
    """A manifest document violates the schema.

    ``path`` points at the offending field, e.g. ``curriculum.domains[0].sample_count``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class DepthExceededError(ValueError):
    """A flatland program nests loops deeper than the supported limit."""


class CannotSatisfyBoundError(RuntimeError):
    """Augmentation could not meet its divergence bound within the retry budget."""
