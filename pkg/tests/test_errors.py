"""
Tests for errors.

Covers:
- message formatting from context and detail
- exit codes of the input and computation families
- logging of every raised error
"""

import logging

import pytest

from contextBell.utils import errors


class TestAppError:
    """Tests for AppError and its subclasses"""

    def test_message_with_detail(self):
        error = errors.ConvergenceFailureError("scan", "moved by 1e-3")
        assert str(error) == (
            "Optimizer did not converge in scan: moved by 1e-3"
        )
        assert error.context == "scan"
        assert error.detail == "moved by 1e-3"

    def test_message_without_detail(self):
        error = errors.ZeroVectorError("dimension 3 vector")
        assert str(error) == "Cannot normalise zero vector: dimension 3 vector"

    def test_state_parse_error_names_field(self):
        error = errors.StateParseError("symmetric[1]", "expected [re, im]")
        assert "'symmetric[1]'" in str(error)

    @pytest.mark.parametrize(
        "cls",
        [
            errors.ZeroVectorError,
            errors.DimensionMismatchError,
            errors.NotHermitianError,
            errors.NotNormalizedError,
            errors.NotSymmetricError,
            errors.NotUnitError,
            errors.InvalidPentagramError,
            errors.InvalidConcurrenceError,
            errors.OutOfRangeError,
            errors.NotCommutingError,
            errors.NotDichotomicError,
            errors.StateParseError,
            errors.ConfigError,
        ],
    )
    def test_input_errors(self, cls):
        """Input errors exit with 2 and are ValueErrors."""
        error = cls("x")
        assert error.exit_code == 2
        assert isinstance(error, ValueError)
        assert isinstance(error, errors.AppError)

    @pytest.mark.parametrize(
        "cls",
        [
            errors.ConvergenceFailureError,
            errors.OutputWriteError,
            errors.CollapseError,
        ],
    )
    def test_computation_errors(self, cls):
        error = cls("x")
        assert error.exit_code == 1
        assert not isinstance(error, ValueError)

    def test_logged_on_creation(self, caplog):
        with caplog.at_level(logging.ERROR, logger="contextBell_logger"):
            errors.OutputWriteError("out.csv", "permission denied")
        assert "Failure writing: out.csv: permission denied" in caplog.text
