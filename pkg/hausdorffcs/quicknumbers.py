from fractions import Fraction


def try_int(value, default=None):
    """
    Attempt to read 'value' as a count (grid size, contour nodes, worker count, ...).

    Parameters:
      value: an int, an integral float, or a string such as "64", " 1000 ", "1e3" or "10_000".
      default: returned when 'value' is not a whole number.

    Returns:
      The integer if 'value' is a whole number; otherwise 'default' if provided, or else the original value.
      Fractional values such as 3.9 are not truncated.
    """
    # bool is an int subclass
    if isinstance(value, bool):
        return default if default is not None else value
    if isinstance(value, int):
        return value
    try:
        if isinstance(value, str):
            text = value.strip()
            if not text:
                raise ValueError("Empty string")
            try:
                return int(text)
            except ValueError:
                # "1e3", "2000.0"
                as_float = float(text)
        else:
            as_float = float(value)
        if not as_float.is_integer():
            raise ValueError(f"{value!r} is not a whole number")
        return int(as_float)
    except (ValueError, TypeError, OverflowError):
        return default if default is not None else value


def try_float(value, default=None):
    """
    Attempt to convert 'value' to a float.

    Accepts fractions written as "p/q" in addition to everything float() takes.
    """
    if isinstance(value, float):
        return value
    try:
        if isinstance(value, str):
            value = value.strip()
            if not value:
                raise ValueError("Empty string")
            if "/" in value:
                return float(Fraction(value))
        return float(value)
    except (ValueError, TypeError, ZeroDivisionError):
        return default if default is not None else value


def parse_fraction(value) -> Fraction:
    """
    Exact rational for values such as "1/4", "4/3", "0.5" or 2.

    Raises ValueError when 'value' is not a finite rational.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**9)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Not a rational number: {value!r}") from e
