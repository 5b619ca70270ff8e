class Result:
    pass


class ValidationResult(Result):
    def __init__(self, valid: bool, message: str = ""):
        self.valid = valid
        self.message = message

    def __bool__(self) -> bool:
        return self.valid

    def __repr__(self) -> str:
        return f"ValidationResult(valid={self.valid}, message={self.message!r})"


def first_failure(*results: ValidationResult) -> ValidationResult:
    """Return the first invalid result, or a valid one if all passed."""

    for result in results:
        if not result.valid:
            return result
    return ValidationResult(True)
