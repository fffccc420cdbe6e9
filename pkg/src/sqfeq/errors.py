"""Exception hierarchy shared across the package."""


class InputError(ValueError):
    """A caller supplied an argument outside an operation's domain."""


class ParseError(InputError):
    """Polynomial text failed to parse; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class StateError(RuntimeError):
    """An operation needed state (e.g. an earlier sequence entry) that is absent."""


class LedgerError(RuntimeError):
    """An identity record failed its decomposition checks (transcription bug)."""


class CertificateError(RuntimeError):
    """A symbolic derivation step failed its algebraic check."""

    def __init__(self, step: str, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step
