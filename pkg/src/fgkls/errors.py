"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed input: non-finite entries, wrong shapes, broken invariants."""


class ContractError(ValueError):
    """Inputs are well formed but violate a documented precondition."""


class ConfigError(ContractError):
    """Integrator configuration outside its stability envelope."""


class NotReducibleError(ContractError):
    """Solution excites more than a single real decaying mode."""


class InternalError(RuntimeError):
    """Numerical inconsistency that indicates a bug or tolerance misclassification."""
