import json
import math
from typing import Any, Callable

import numpy as np

from qillum.constants import SERIES_MAX_TERMS, SERIES_RTOL
from qillum.exceptions import ConvergenceError


def flatten_dict(
    input_dict: dict, keep_path: bool = True, separator: str = "."
) -> dict:
    """Flatten a nested report dictionary into a single row.

    Args:
        input_dict (dict): Nested dictionary to flatten.
        keep_path (bool): Keep the full path to the value or not. If True, the
            keys will be in the form of "config.N_B". Otherwise only the
            innermost key is kept. Defaults to True.
        separator (str): The separator to use when joining the keys. Defaults to
            ".".

    Returns:
        dict: Flattened dictionary. Lists of scalars are kept as values, lists
            of dictionaries are expanded with their position in the path.
    """
    output_dict: dict = {}
    for key, value in input_dict.items():
        if isinstance(value, dict):
            inner = flatten_dict(
                value, keep_path=keep_path, separator=separator
            )
            for inner_key, inner_value in inner.items():
                name = key + separator + inner_key if keep_path else inner_key
                output_dict[name] = inner_value
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            for i, item in enumerate(value):
                prefix = key + separator + str(i)
                inner = flatten_dict(
                    item, keep_path=keep_path, separator=separator
                )
                for inner_key, inner_value in inner.items():
                    name = (
                        prefix + separator + inner_key
                        if keep_path
                        else inner_key
                    )
                    output_dict[name] = inner_value
        else:
            output_dict[key] = value
    return output_dict


def sum_ratio_series(
    first_term: float,
    ratio: Callable[[int], float],
    rtol: float = SERIES_RTOL,
    max_terms: int = SERIES_MAX_TERMS,
) -> tuple[float, int]:
    """Sum a positive series given its first term and the ratio between
    consecutive terms.

    The ratio ``ratio(n) = t_{n+1} / t_n`` must be eventually decreasing, which
    holds for every hypergeometric-type series used in this package. Summation
    stops once the geometric bound on the remaining tail, ``t r / (1 - r)``,
    falls below ``rtol`` times the running sum.

    Args:
        first_term (float): The first term ``t_0``. Must be nonnegative.
        ratio (Callable[[int], float]): ``n -> t_{n+1} / t_n``.
        rtol (float): Relative tolerance on the tail. Defaults to
            SERIES_RTOL.
        max_terms (int): Hard cap on the number of terms. Defaults to
            SERIES_MAX_TERMS.

    Raises:
        ConvergenceError: If the cap is reached before the tail bound is met.

    Returns:
        tuple:
            float: The sum.
            int: The number of terms added.
    """
    if first_term == 0.0:
        return 0.0, 1
    total = first_term
    term = first_term
    for n in range(max_terms):
        r = ratio(n)
        term *= r
        total += term
        if r < 1.0 and term * r / (1.0 - r) < rtol * total:
            return total, n + 2
    raise ConvergenceError(
        f"Series did not converge within {max_terms} terms "
        + f"(partial sum {total:.6g}, last term {term:.3g})"
    )


def binomial_recurrence(kappa: int, count: int) -> np.ndarray:
    """Binomials ``C(n + kappa, kappa)`` for ``n = 0 .. count - 1`` via the
    multiplicative recurrence, avoiding factorial overflow.
    """
    values = np.ones(count)
    for n in range(1, count):
        values[n] = values[n - 1] * (n + kappa) / n
    return values


def to_jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": to_jsonable(value.real), "im": to_jsonable(value.imag)}
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) or math.isinf(value) else value
    return value


def dumps_json(payload: Any) -> str:
    return json.dumps(to_jsonable(payload), indent=2, sort_keys=True)


def parse_complex(value: Any) -> complex:
    """Read a complex number written either as a plain number or as
    ``{"re": x, "im": y}``.

    Args:
        value (Any): The serialized value.

    Raises:
        TypeError: If the value has neither form.

    Returns:
        complex: The parsed number.
    """
    if isinstance(value, dict):
        return complex(value.get("re", 0.0), value.get("im", 0.0))
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    raise TypeError(f"Cannot parse complex number from {value!r}")
