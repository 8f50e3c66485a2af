class WdroFailure(RuntimeError):
    """Base for numerical failures raised while evaluating robust risks"""


class InvalidArgument(ValueError):
    pass


class Unimplemented(NotImplementedError):
    pass


class ConfigError(ValueError):
    pass


class SamplingStalled(WdroFailure):
    pass


class NumericFailure(WdroFailure):
    pass


class UnboundedDual(WdroFailure):
    pass


class ConvergenceFailure(WdroFailure):
    pass


class LowEffectiveSampleSize(UserWarning):
    pass


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
