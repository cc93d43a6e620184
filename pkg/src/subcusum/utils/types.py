from typing import Optional


class SubspaceCusumError(Exception):
    def __init__(self, message):
        super().__init__(message)
        self.message = message

    def __str__(self):
        return self.message


class InvalidModelError(SubspaceCusumError, ValueError):
    """A model, scenario or projection violates its invariants."""


class DegenerateChangeError(SubspaceCusumError):
    """The post-change law equals the pre-change law after projection."""


class DomainError(SubspaceCusumError, ValueError):
    """An argument lies outside the domain of a formula."""


class WindowNotFullError(SubspaceCusumError):
    pass


class InfeasibleWindowError(SubspaceCusumError, ValueError):
    def __init__(self, w: float, w_min: float):
        super().__init__(
            f"Window w={w} is infeasible, it must exceed w_min={w_min:.6g}"
        )
        self.w = w
        self.w_min = w_min


class CalibrationError(SubspaceCusumError):
    pass


class ConfigError(SubspaceCusumError):
    def __init__(
        self,
        message: str,
        section: Optional[str] = None,
        key: Optional[str] = None,
        line: Optional[int] = None,
    ):
        where = ""
        if section is not None:
            where += f"[{section}]"
        if key is not None:
            where += f" {key}"
        if line is not None:
            where += f" (line {line})"
        super().__init__(f"{where.strip()}: {message}" if where else message)
        self.section = section
        self.key = key
        self.line = line
