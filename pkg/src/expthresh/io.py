"""JSON input and output for weight functions, families and certificates."""

import json
import os
import sys
import tempfile
from fractions import Fraction

from .errors import ParseError
from .interval import Const, Interval
from .weights import MonotoneFamily, WeightFunction, parse_fraction


def read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=_default)


def _default(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (Const, Interval)):
        return x.to_json()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def write_json(obj, path=None) -> None:
    """Write to ``path`` atomically (temp file then rename), or to stdout."""
    text = dumps(obj) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_weights(path: str) -> WeightFunction:
    obj = read_json(path)
    if isinstance(obj, dict) and "g" in obj and "entries" not in obj:
        obj = obj["g"]
    return WeightFunction.from_json(obj)


def load_family(path: str) -> MonotoneFamily:
    obj = read_json(path)
    if not isinstance(obj, dict) or "minimal" not in obj:
        raise ParseError("a monotone family needs 'n' and 'minimal'")
    try:
        return MonotoneFamily.from_json(obj)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def parse_number(text: str):
    """A rational from '3/4', '0.75' or '2'; ParseError otherwise."""
    return parse_fraction(text)
