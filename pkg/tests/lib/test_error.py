from radialdpp.lib import error


### Test for error classes ###


def test_to_dict():
    assert error.DataInvalidError("bad").to_dict() == {"error": "DataInvalidError", "message": "bad"}


def test_quadrature_error_carries_estimate():
    e = error.QuadratureError("no convergence", value=1.25, error_estimate=1e-3)
    assert e.to_dict() == {
        "error": "QuadratureError",
        "message": "no convergence",
        "value": 1.25,
        "error_estimate": 1e-3,
    }


def test_hierarchy():
    assert issubclass(error.DomainError, ValueError)
    assert issubclass(error.QuadratureError, error.NumericalError)
    assert issubclass(error.TruncationError, error.NumericalError)
    assert issubclass(error.DataInvalidError, error.DataError)
    for cls in (error.RegimeError, error.ExperimentRejected, error.UnsupportedError):
        assert issubclass(cls, error.BaseError)
