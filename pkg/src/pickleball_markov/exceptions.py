"""Exception hierarchy shared by every module."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class DegenerateChainError(DomainError):
    """Both serving probabilities are zero, so neither team can ever win.

    With ``p_A = p_B = 0`` the absorbing states are unreachable and
    ``I - Q`` is singular.
    """


class EvaluationError(DomainError):
    """A closed form was evaluated where its denominator vanishes."""


class RunawayGameError(RuntimeError):
    """A simulated game exceeded the rally guard; the rules are looping."""
