"""Exception hierarchy shared by all fracriesz modules."""


class FracRieszError(Exception):
    """Base class for every error raised by this package."""


class GraphValidationError(FracRieszError, ValueError):
    """An edge list does not describe a valid weighted graph."""


class DuplicateEdgeError(GraphValidationError):
    def __init__(self, u, v):
        self.pair = (u, v)
        super().__init__(f"duplicate edge for unordered pair ({u}, {v})")


class NonPositiveWeightError(GraphValidationError):
    def __init__(self, u, v, mu):
        self.pair = (u, v)
        self.weight = mu
        super().__init__(f"edge ({u}, {v}) has nonpositive weight {mu!r}")


class DisconnectedGraphError(GraphValidationError):
    def __init__(self, a, b, n_components):
        self.witnesses = (a, b)
        self.n_components = n_components
        super().__init__(
            f"graph has {n_components} components; vertices {a} and {b} "
            "lie in different components"
        )


class GraphMismatchError(FracRieszError, ValueError):
    """A vertex function or decomposition does not belong to the given graph."""


class CapExceededError(FracRieszError, ValueError):
    """A requested object would exceed a configured size cap."""


class BudgetExceededError(FracRieszError, ValueError):
    """A computation would exceed its work budget."""


class SeriesNotConvergedError(FracRieszError, ArithmeticError):
    def __init__(self, n_terms, tail_bound, tol):
        self.n_terms = n_terms
        self.tail_bound = tail_bound
        self.tol = tol
        super().__init__(
            f"series tail bound {tail_bound:.3e} still above tol {tol:.3e} "
            f"after {n_terms} terms"
        )


class SolverError(FracRieszError, ArithmeticError):
    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class AnalyticityError(FracRieszError):
    """No odd return time certifies analyticity within the searched range."""


class DegenerateRatioError(FracRieszError, ArithmeticError):
    """A ratio denominator fell below the degeneracy floor."""


class WitnessError(FracRieszError, ValueError):
    """A witness function cannot be realized inside the safe interior."""


class FitError(FracRieszError, ValueError):
    """Not enough usable samples to fit a scaling law."""


class ConfigError(FracRieszError, ValueError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class PipelineError(FracRieszError):
    def __init__(self, stage, diagnostic):
        self.stage = stage
        self.diagnostic = diagnostic
        super().__init__(f"stage '{stage}' failed: {diagnostic}")
