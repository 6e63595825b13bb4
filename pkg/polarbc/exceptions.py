class PolarBCError(Exception):
    """polarbc 에서 발생하는 모든 예외의 기반 클래스"""


class InvalidStateError(PolarBCError, ValueError):
    """Density matrix, probability table or prior violates its invariants."""


class ConfigError(PolarBCError, ValueError):
    """Experiment configuration or call arguments are inconsistent."""


class UnknownChannelError(ConfigError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown built-in channel '{name}'")


class BudgetExceededError(PolarBCError):
    def __init__(self, required: int, allowed: int, depth: int = 0):
        self.required = required
        self.allowed = allowed
        self.depth = depth
        super().__init__(
            f"synthesis budget exceeded at depth {depth}: requires {required}, allowed {allowed}"
        )


class InfeasibleScheduleError(PolarBCError):
    def __init__(self, deficit: int, detail: str = ""):
        self.deficit = deficit
        message = f"chaining schedule infeasible: deficit of {deficit} positions"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class CapacityExceededError(PolarBCError):
    def __init__(self, requested: int, maximum: int):
        self.requested = requested
        self.maximum = maximum
        super().__init__(
            f"common message needs {requested} positions per block, maximum is {maximum}"
        )
