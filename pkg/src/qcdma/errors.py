"""Exception types shared across the package (the CLI maps them to exit codes)."""


class DivergenceError(RuntimeError):
    """Oscillator state left the configured bound."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class UnconvergedError(RuntimeError):
    """A Lyapunov estimate or truncation did not meet its convergence test."""


class TruncationError(UnconvergedError):
    """Fock-space truncation drops more population than allowed."""
