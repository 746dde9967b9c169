"""Error hierarchy shared by every module.

Each error carries the exit code the command line reports for it:
2 for bad input, 3 for exceeded budgets, 1 for numerical-consistency failures.
"""

INPUT_ERROR = 2
BUDGET_ERROR = 3
NUMERICAL_ERROR = 1


class NisqError(Exception):
    """Base class for toolkit errors."""

    exit_code = INPUT_ERROR


class InputError(NisqError, ValueError):
    """Invalid user input."""


class CircuitSyntaxError(InputError):
    """Circuit text does not follow the grammar."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownGateError(InputError):
    """Gate name not in the standard set."""


class QubitIndexError(InputError):
    """Qubit index outside the register."""


class ParameterError(InputError):
    """Missing, unbound or out-of-range parameter."""


class WidthMismatchError(InputError):
    """Bitstring or observable width differs from the state width."""


class NonCliffordError(InputError):
    """Operation requires Clifford gates only."""


class BudgetError(NisqError):
    """A configured resource budget would be exceeded."""

    exit_code = BUDGET_ERROR


class MemoryBudgetError(BudgetError, MemoryError):
    """Dense state does not fit the memory budget."""

    def __init__(self, required_bytes: int, budget_bytes: int):
        super().__init__(
            f"State needs {required_bytes} bytes ({required_bytes / (1 << 30):.0f} GiB), "
            f"budget is {budget_bytes} bytes"
        )
        self.required_bytes = required_bytes
        self.budget_bytes = budget_bytes


class PathBudgetError(BudgetError):
    """Schrodinger-Feynman path count exceeds the budget."""

    def __init__(self, paths: int, budget: int):
        super().__init__(f"Path count {paths} exceeds budget {budget}")
        self.paths = paths


class ContractionBudgetError(BudgetError):
    """Tensor-network contraction cost exceeds the budget."""


class NumericalError(NisqError, ArithmeticError):
    """Numerical-consistency failure."""

    exit_code = NUMERICAL_ERROR


class FitError(NumericalError):
    """Model fit did not converge or is ill-posed."""

    def __init__(self, message: str, points=None):
        super().__init__(message)
        self.points = points


class RankDeficiencyError(NumericalError):
    """Linear system is singular or rank deficient."""


class DivergenceError(NumericalError):
    """Optimizer loss kept increasing."""


class BackendError(NisqError):
    """Backend cannot perform the requested operation."""


class IdealSimulationBudgetError(BudgetError):
    """Circuit is too wide for the ideal reference simulation."""

    def __init__(self, n_qubits: int, limit: int):
        super().__init__(f"Ideal simulation of {n_qubits} qubits exceeds the limit of {limit}")
        self.n_qubits = n_qubits
