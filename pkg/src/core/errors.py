__all__ = [
    "DelaySNNError",
    "ConfigError",
    "ShapeMismatchError",
    "NonBinarySpikeError",
    "NonFiniteError",
    "InvalidSigmaError",
    "DivergenceError",
    "FoldError",
    "QueueOverflowError",
    "EngineInvariantError",
    "EquivalenceError",
    "EventFileError",
    "SynthSpecError",
    "CheckpointError",
]


class DelaySNNError(Exception):
    """Base class for every fault raised by the library."""


class ConfigError(DelaySNNError):
    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ShapeMismatchError(DelaySNNError):
    def __init__(self, what, expected, actual):
        self.what = what
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what}: expected {expected}, got {actual}")


class NonBinarySpikeError(DelaySNNError):
    def __init__(self, values):
        self.values = sorted(values)
        super().__init__(f"spike entries must be 0 or 1, found {self.values}")


class NonFiniteError(DelaySNNError):
    def __init__(self, what, index=None):
        self.what = what
        self.index = index
        where = f" at index {index}" if index is not None else ""
        super().__init__(f"non-finite {what}{where}")


class InvalidSigmaError(DelaySNNError):
    def __init__(self, sigma):
        self.sigma = sigma
        super().__init__(f"sigma must be > 0, got {sigma}")


class DivergenceError(DelaySNNError):
    def __init__(self, epoch, step, loss):
        self.epoch = epoch
        self.step = step
        self.loss = loss
        super().__init__(f"training diverged at epoch {epoch}, step {step} (loss={loss})")


class FoldError(DelaySNNError):
    def __init__(self, layer, channel):
        self.layer = layer
        self.channel = channel
        super().__init__(f"cannot fold batch norm of layer {layer}: channel {channel} has zero running variance")


class QueueOverflowError(DelaySNNError):
    def __init__(self, layer, step, capacity):
        self.layer = layer
        self.step = step
        self.capacity = capacity
        super().__init__(f"buffer of layer {layer} overflowed its capacity of {capacity} entries at step {step}")


class EngineInvariantError(DelaySNNError):
    pass


class EquivalenceError(DelaySNNError):
    pass


class EventFileError(DelaySNNError):
    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} (byte offset {offset})")


class SynthSpecError(DelaySNNError):
    pass


class CheckpointError(DelaySNNError):
    pass
