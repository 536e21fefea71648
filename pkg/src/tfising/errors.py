"""Exception hierarchy shared by the solvers, observables and CLI."""


class TfisingError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(TfisingError, ValueError):
    pass


class InvalidModelSize(InvalidParameter):
    """Chain length incompatible with the requested model (parity or bounds)."""


class NotSymmetric(TfisingError, ValueError):
    pass


class ConvergenceFailure(TfisingError, RuntimeError):
    pass


class ZeroMode(TfisingError, ArithmeticError):
    """Quasiparticle energy at or below the zero-mode threshold."""


class PoleAtK(TfisingError, ArithmeticError):
    """The transcendental equation has a pole at the requested quasi-momentum."""


class BranchError(TfisingError, ArithmeticError):
    """A complex-branch evaluation left an imaginary residue above tolerance."""


class InvalidRoot(TfisingError, ValueError):
    """Candidate quasi-momentum gives a negative squared energy."""


class AnsatzSingular(TfisingError, ArithmeticError):
    pass


class IncompleteSpectrum(TfisingError, RuntimeError):
    """Root search did not return exactly N modes.

    ``diagnostics`` carries per-branch counts and, when available, the
    numeric-path energies for comparison.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class InvalidSitePair(TfisingError, ValueError):
    pass


class TooLarge(TfisingError, ValueError):
    pass
