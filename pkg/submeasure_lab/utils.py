"""Submeasure lab - helper utils."""
import json
import logging
import math
import os
from collections.abc import Iterator
from fractions import Fraction
from typing import Any

import numpy as np
import slugify as unicode_slug

from submeasure_lab import const
from submeasure_lab.exceptions import InvalidInputError

LOGGER = logging.getLogger(__name__)


def clamp(value: float, min_value: float, max_value: float) -> float:
    """Clamp a value between a min and max value."""
    return min(max(value, min_value), max_value)


def slugify(text: str) -> str:
    """Slugify a given text."""
    return unicode_slug.slugify(text, separator="_")  # type: ignore


# ----------------------------------------------------------------------
#  Bit masks
# ----------------------------------------------------------------------
def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Any) -> int:
    """Build a bit mask from an iterable of indices."""
    mask = 0
    for index in indices:
        mask |= 1 << int(index)
    return mask


# ----------------------------------------------------------------------
#  Rationals
# ----------------------------------------------------------------------
def parse_rational(value: Any) -> Fraction:
    """Parse a "p/q" string, an int or a Fraction into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidInputError(f"not a rational number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidInputError(f"not a finite number: {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as err:
            raise InvalidInputError(f"not a rational number: {value!r}") from err
    raise InvalidInputError(f"not a rational number: {value!r}")


def format_rational(value: Fraction | int) -> str:
    """Format a rational as a "p/q" string."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def lcm_of_denominators(values: Any) -> int:
    """Return the least common multiple of the denominators."""
    result = 1
    for value in values:
        result = math.lcm(result, Fraction(value).denominator)
    return result


# ----------------------------------------------------------------------
#  Statistics and randomness
# ----------------------------------------------------------------------
def wilson_interval(
    successes: int, trials: int, z: float = const.WILSON_Z
) -> tuple[float, float]:
    """Return the Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise InvalidInputError("trials must be positive")
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return clamp(center - half, 0.0, 1.0), clamp(center + half, 0.0, 1.0)


def spawn_rng(seed: int, stream: int) -> np.random.Generator:
    """Return the generator for one stream of a seeded experiment."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream])))


def resolve_threads(default: int | None = None) -> int:
    """Return the worker count, capped by the threads environment variable."""
    wanted = default or os.cpu_count() or 1
    raw = os.getenv(const.THREADS_ENV_VAR, "").strip()
    if raw:
        try:
            wanted = min(wanted, max(1, int(raw)))
        except ValueError:
            LOGGER.warning("Ignoring invalid %s=%s", const.THREADS_ENV_VAR, raw)
    return max(1, wanted)


# ----------------------------------------------------------------------
#  JSON persistence
# ----------------------------------------------------------------------
def read_json_document(filename: str) -> Any:
    """Load a JSON input document, raising on missing, unreadable or malformed files."""
    try:
        with open(filename, encoding="utf-8") as fdesc:
            text = fdesc.read()
    except UnicodeDecodeError as err:
        raise InvalidInputError(f"{filename} is not valid UTF-8: {err.reason}") from err
    except OSError as err:
        raise InvalidInputError(f"cannot read {filename}: {err.strerror}") from err
    return json.loads(text)


def save_json(filename: str, data: Any) -> None:
    """Save JSON data to a file."""
    safe_copy = filename + ".backup"
    if os.path.isfile(filename):
        os.replace(filename, safe_copy)
    try:
        json_data = json.dumps(data, sort_keys=True, indent=4, ensure_ascii=False)
        with open(filename, "w", encoding="utf-8") as file_obj:
            file_obj.write(json_data)
            file_obj.write("\n")
    except OSError:
        LOGGER.exception("Failed to serialize to JSON: %s", filename)
