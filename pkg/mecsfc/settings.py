"""
Package-wide solver options with a uniform API for reading and changing them.

Options are referenced by dot-separated keys such as
``numerics.convex.tol``. Keys are case-insensitive and any unambiguous
regular-expression fragment of a key can be used to look it up. Modules
register their own options at import time together with a default value, a
description and an optional validator.

Examples
--------
>>> import mecsfc
>>> mecsfc.options.numerics.convex.tol
1e-08
>>> mecsfc.set_option("convex.tol", 1e-9)
>>> mecsfc.get_option("numerics.convex.tol")
1e-09
>>> mecsfc.options.numerics.convex.tol = 1e-7
>>> mecsfc.reset_option("numerics.convex.tol")
>>> mecsfc.options.numerics.convex.tol
1e-08
>>> mecsfc.load_profile("fast")
"""
from __future__ import annotations

import keyword
import re
import tokenize
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np
import yaml


class RegisteredOption(NamedTuple):
    key: str
    defval: object
    doc: str
    validator: Optional[Callable[[object], Any]]


# option metadata, keyed on the fully-qualified key
_registered_options: Dict[str, RegisteredOption] = {}

# nested dict with the current values
_global_settings: Dict[str, Any] = {}


class OptionError(AttributeError, KeyError):
    pass


def _select_options(pat: str) -> List[str]:
    """Keys matching `pat`; "all" selects every registered option"""
    if pat in _registered_options:
        return [pat]

    keys = sorted(_registered_options.keys())
    if pat == "all":
        return keys

    return [k for k in keys if re.search(pat, k, re.I)]


def _get_single_key(pat: str) -> str:
    keys = _select_options(pat)
    if len(keys) == 0:
        raise OptionError(f"No such keys(s): {repr(pat)}")
    if len(keys) > 1:
        raise OptionError(f"Pattern {pat!r} matched multiple keys: {keys}")
    return keys[0]


def _get_root(key: str) -> Tuple[Dict[str, Any], str]:
    path = key.split(".")
    cursor = _global_settings
    for p in path[:-1]:
        cursor = cursor[p]
    return cursor, path[-1]


def get_option(pat: str) -> Any:
    """Get value of a single option matching a pattern

    Parameters
    ----------
    pat : str
        full key or unambiguous fragment of it

    Returns
    -------
    Any
        current value of the option
    """
    key = _get_single_key(pat)
    root, k = _get_root(key)
    return root[k]


def set_option(*args: Any, **kwargs: Any) -> None:
    """Set the value of one or more options

    Examples
    --------
    >>> mecsfc.set_option("numerics.root.tol", 1e-12)
    >>> mecsfc.set_option({"numerics.root.tol": 1e-12, "harness.workers": 4})
    >>> mecsfc.options.harness.workers = 4
    """
    if len(args) == 1 and isinstance(args[0], dict):
        kwargs.update(args[0])
    elif len(args) % 2 == 0:
        kwargs.update(dict(zip(args[::2], args[1::2])))
    else:
        raise ValueError("Must provide a value for each key, i.e. even number of args")

    for pat, value in kwargs.items():
        key = _get_single_key(pat)
        o = _registered_options[key]
        if o.validator:
            o.validator(value)
        root, k = _get_root(key)
        root[k] = value


def reset_option(pat: str = "all") -> None:
    """Reset one or more options (matching a pattern) to their default value

    Examples
    --------
    >>> mecsfc.reset_option("numerics.convex.tol")
    >>> mecsfc.reset_option("all")
    """
    keys = _select_options(pat)
    if len(keys) == 0:
        raise OptionError("No such keys(s)")

    if len(keys) > 1 and len(pat) < 4 and pat != "all":
        raise ValueError(
            "You must specify at least 4 characters when resetting multiple keys, "
            'use the special keyword "all" to reset all options to their default value'
        )

    for k in keys:
        set_option(k, _registered_options[k].defval)


def describe_option(pat: str = "all") -> str:
    """Description, default and current value of the matching options"""
    keys = _select_options(pat)
    if len(keys) == 0:
        raise OptionError("No such keys(s)")

    lines = []
    for k in keys:
        o = _registered_options[k]
        doc = o.doc.strip() or "No description available."
        lines.append(f"{k} {doc}\n    [default: {o.defval}] [currently: {get_option(k)}]")
    return "\n".join(lines)


class OptionsContainer:
    """Attribute-style access to the nested options, accessed by mecsfc.options"""

    def __init__(self, d: Dict[str, Any], prefix: str = "") -> None:
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "prefix", prefix)

    def _full_key(self, key: str) -> str:
        prefix = object.__getattribute__(self, "prefix")
        return f"{prefix}.{key}" if prefix else key

    def __setattr__(self, key: str, val: Any) -> None:
        # existing leaves only; subtrees cannot be overwritten
        if key in self.d and not isinstance(self.d[key], dict):
            set_option(self._full_key(key), val)
        else:
            raise OptionError("You can only set the value of existing options")

    def __getattr__(self, key: str) -> Any:
        try:
            v = object.__getattribute__(self, "d")[key]
        except KeyError as err:
            raise OptionError(f"No such option: {key}") from err
        if isinstance(v, dict):
            return OptionsContainer(v, self._full_key(key))
        return get_option(self._full_key(key))

    def to_dict(self) -> Dict[str, Any]:
        """Options as dictionary with full-name keys"""
        return {k: get_option(k) for k in _select_options(self.prefix)}

    def __repr__(self) -> str:
        return "\n".join(f"{k} : {v}" for k, v in self.to_dict().items())

    def __dir__(self) -> Iterable[str]:
        return list(self.d.keys())


options = OptionsContainer(_global_settings)


def register_option(
    key: str,
    defval: object,
    doc: str = "",
    validator: Optional[Callable[[Any], Any]] = None,
) -> None:
    """Register an option in the package-wide settings

    Parameters
    ----------
    key : str
        Fully-qualified key, e.g. "numerics.convex.tol".
    defval : object
        Default value of the option.
    doc : str
        Description of the option.
    validator : Callable, optional
        Function of a single argument, should raise `ValueError` if
        called with a value which is not a legal value for the option.

    Raises
    ------
    OptionError if the key is already registered or collides with a subtree
    ValueError if `validator` rejects `defval` or a key part is not an identifier
    """
    key = key.lower()

    if key in _registered_options:
        raise OptionError(f"Option '{key}' has already been registered")

    if validator:
        validator(defval)

    path = key.split(".")
    for k in path:
        if not re.match("^" + tokenize.Name + "$", k):
            raise ValueError(f"{k} is not a valid identifier")
        if keyword.iskeyword(k):
            raise ValueError(f"{k} is a python keyword")

    cursor = _global_settings
    msg = "Path prefix to option '{option}' is already an option"
    for i, p in enumerate(path[:-1]):
        if not isinstance(cursor, dict):
            raise OptionError(msg.format(option=".".join(path[:i])))
        cursor = cursor.setdefault(p, {})

    if not isinstance(cursor, dict):
        raise OptionError(msg.format(option=".".join(path[:-1])))

    cursor[path[-1]] = defval
    _registered_options[key] = RegisteredOption(
        key=key, defval=defval, doc=doc, validator=validator
    )


def is_type_factory(_type: type) -> Callable[[Any], None]:
    def inner(x: Any) -> None:
        if type(x) != _type:
            raise ValueError(f"Value must have type '{_type}'")

    return inner


is_int = is_type_factory(int)
is_bool = is_type_factory(bool)


def is_positive(value: Any) -> None:
    if isinstance(value, bool) or not (np.isreal(value) and value > 0):
        raise ValueError("Value must be a number greater than 0")


def is_positive_int(value: Any) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ValueError("Value must be an integer greater than 0")


def is_between_0_and_1(value: Any) -> None:
    if not (np.isreal(value) and 0 <= value <= 1):
        raise ValueError("Value must be a number between 0 and 1")


def optional(validator: Callable[[Any], None]) -> Callable[[Any], None]:
    """Accept None in addition to what `validator` accepts"""

    def inner(x: Any) -> None:
        if x is not None:
            validator(x)

    return inner


def load_profile(name: str) -> None:
    """Set a number of options from a named profile

    Parameters
    ----------
    name : str
        Name of the profile to load. Available profiles are:
        'fast': looser convex tolerance and faster barrier growth, for sweeps.
        'strict': tight tolerances on every numerical kernel.

    Raises
    ------
    KeyError
        If a named profile is not found.

    Examples
    --------
    >>> import mecsfc
    >>> mecsfc.load_profile("fast")
    """
    path = Path(__file__).parent / "profiles"
    named = {x.stem: x for x in path.glob("*.yml")}

    lname = name.lower()
    if lname not in named:
        raise KeyError(f"Profile '{name}' not found. Choose from {sorted(named)}")

    with open(named[lname], encoding="utf-8") as f:
        d = yaml.safe_load(f)

    set_option(d)
