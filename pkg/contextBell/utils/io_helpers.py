"""
Reading state documents and writing result tables.

This module provides:
- parsing of a state given on the command line, either as a path to a
  JSON document, an inline JSON document, or an inline "a,b,c" triple of
  real symmetric amplitudes
- writing pandas DataFrames as CSV or as a JSON array of records, with
  floats rendered to a fixed number of significant digits

A state document holds exactly one of two keys, each a list of complex
amplitudes written as [re, im] pairs (a bare number is read as real):

    {"symmetric": [[a_re, a_im], [b_re, b_im], [c_re, c_im]]}
    {"two_qubit": [[re, im], [re, im], [re, im], [re, im]]}

Notes:
- Amplitudes are normalised on input; an all-zero vector is rejected.
- Every parse failure names the offending field.
"""

import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from contextBell.modules.quantum_core import PureState, normalize
from contextBell.modules.symmetric_map import (
    QutritPure,
    SymmetricTwoQubit,
    embed,
    project_symmetric,
    to_qutrit,
)
from contextBell.utils.errors import (
    OutputWriteError,
    StateParseError,
    ZeroVectorError,
)
from contextBell.utils.logger_config import logger

STATE_FORMS = {"symmetric": 3, "two_qubit": 4}


@dataclass(frozen=True, eq=False)
class StateSpec:
    """
    A parsed input state.

    Attributes
    ----------
    form : str
        "symmetric" for an (a, b, c) triple, "two_qubit" for a full
        4-amplitude vector.
    amplitudes : numpy.ndarray
        Normalised amplitudes of the given form.
    """

    form: str
    amplitudes: np.ndarray

    def symmetric(self) -> SymmetricTwoQubit:
        """The symmetric triple; a two-qubit vector must be symmetric."""
        if self.form == "symmetric":
            return SymmetricTwoQubit(*self.amplitudes)
        return project_symmetric(PureState(self.amplitudes))

    def qutrit(self) -> QutritPure:
        return to_qutrit(self.symmetric())

    def two_qubit(self) -> PureState:
        """The 4-amplitude vector, embedding a symmetric triple."""
        if self.form == "symmetric":
            return embed(SymmetricTwoQubit(*self.amplitudes))
        return PureState(self.amplitudes)


def _parse_amplitude(value, field):
    if isinstance(value, bool):
        raise StateParseError(field, f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(
            isinstance(v, (int, float)) and not isinstance(v, bool)
            for v in value
        )
    ):
        return complex(value[0], value[1])
    raise StateParseError(field, f"expected [re, im], got {value!r}")


def state_from_document(document) -> StateSpec:
    """
    Build a StateSpec from a parsed JSON document.

    Raises
    ------
    StateParseError
        If the document does not hold exactly one known form, an
        amplitude is malformed, or all amplitudes are zero.
    """
    if not isinstance(document, dict):
        raise StateParseError("<root>", "state must be a JSON object")

    unknown = set(document) - set(STATE_FORMS)
    if unknown:
        raise StateParseError(sorted(unknown)[0], "unknown key")
    forms = [form for form in STATE_FORMS if form in document]
    if len(forms) != 1:
        raise StateParseError(
            "<root>", "give exactly one of 'symmetric' or 'two_qubit'"
        )

    form = forms[0]
    values = document[form]
    if not isinstance(values, list) or len(values) != STATE_FORMS[form]:
        raise StateParseError(
            form, f"expected a list of {STATE_FORMS[form]} amplitudes"
        )
    amplitudes = [
        _parse_amplitude(value, f"{form}[{i}]")
        for i, value in enumerate(values)
    ]

    try:
        state = normalize(PureState(np.array(amplitudes)))
    except ZeroVectorError:
        raise StateParseError(form, "all amplitudes are zero")
    return StateSpec(form=form, amplitudes=state.amplitudes)


def _parse_triple(text):
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != 3:
        raise StateParseError(
            "state", f"expected three comma-separated numbers, got {text!r}"
        )
    values = []
    for name, part in zip("abc", parts):
        try:
            values.append(float(part))
        except ValueError:
            raise StateParseError(name, f"not a number: {part!r}")
    return {"symmetric": values}


def parse_state(text: str) -> StateSpec:
    """
    Parse a --state argument.

    Parameters
    ----------
    text : str
        Path to a JSON state document, an inline JSON document, or an
        inline real triple "a,b,c".

    Returns
    -------
    StateSpec
        The normalised state.

    Raises
    ------
    StateParseError
        If the file cannot be read or the content cannot be parsed.
    """
    text = text.strip()
    if text.startswith("{"):
        source, content = "inline", text
    elif Path(text).suffix == ".json" or Path(text).is_file():
        source = text
        try:
            content = Path(text).read_text(encoding="utf-8")
        except OSError as e:
            raise StateParseError(text, e)
    else:
        return state_from_document(_parse_triple(text))

    try:
        document = json.loads(content)
    except json.JSONDecodeError as e:
        raise StateParseError(source, f"malformed JSON: {e}")

    parsed = state_from_document(document)
    logger.info(f"Parsed {parsed.form} state from {source}")
    return parsed


def format_number(value, precision: int) -> str:
    """Render a number with `precision` significant digits."""
    if value is None:
        return "nan"
    return f"{value:.{precision}g}"


def _round_sig(value, precision):
    if isinstance(value, (float, np.floating)):
        if np.isnan(value):
            return None
        return float(f"{value:.{precision}g}")
    return value


def frame_to_records(frame: pd.DataFrame, precision: int) -> list:
    """Rows as dicts with floats rounded to `precision` significant
    digits and missing values as None."""
    records = frame.astype(object).where(frame.notna(), None)
    return [
        {key: _round_sig(value, precision) for key, value in row.items()}
        for row in records.to_dict(orient="records")
    ]


def write_table(
    frame: pd.DataFrame, fmt: str = "csv", path=None, precision: int = 6
) -> None:
    """
    Write a table as CSV or as a JSON array of records.

    Parameters
    ----------
    frame : pandas.DataFrame
        The table.
    fmt : str
        "csv" or "json".
    path : str or pathlib.Path, optional
        Destination file; stdout when omitted.
    precision : int
        Significant digits of every float.

    Raises
    ------
    OutputWriteError
        If the destination cannot be written.
    """
    if fmt == "csv":
        text = frame.to_csv(index=False, float_format=f"%.{precision}g")
    else:
        text = json.dumps(frame_to_records(frame, precision), indent=2) + "\n"

    if path is None:
        sys.stdout.write(text)
        return

    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise OutputWriteError(str(path), e)
    logger.info(f"Wrote {len(frame)} rows to {path} ({fmt})")
