from __future__ import annotations

from dataclasses import dataclass, field

METHODS = ("hurwitz_oracle", "afe", "smoothed_sum")


@dataclass(frozen=True)
class LValue:
    value: complex
    abs_error_estimate: float
    terms_used: int
    method: str
    details: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.abs_error_estimate >= 0:
            raise ValueError("abs_error_estimate must be a nonnegative number")

    def __complex__(self) -> complex:
        return complex(self.value)

    def __abs__(self) -> float:
        return abs(self.value)
