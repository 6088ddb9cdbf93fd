"""Dict -> dataclass parsing for the hand-written training configs.

YAML 1.1 reads unquoted scientific notation without a dot ("1e-3") as a
string, so numeric fields accept numeric-looking strings here instead of
failing deep inside the optimizer.
"""

from dataclasses import fields
from typing import get_args

from .errors import ConfigError


def _numeric_target(annotation):
    if annotation is float or annotation is int:
        return annotation
    if isinstance(annotation, str):
        bare = annotation.replace(" ", "").replace("|None", "").replace("None|", "")
        return {"float": float, "int": int}.get(bare)
    non_none = [a for a in get_args(annotation) if a is not type(None)]
    if len(non_none) == 1 and non_none[0] in (float, int):
        return non_none[0]
    return None


def parse_config(cls, d, label):
    """Build cls(**d), rejecting unknown keys and coercing numeric strings."""
    known = {f.name: f for f in fields(cls)}
    unknown = set(d) - set(known)
    if unknown:
        raise ConfigError("unknown %s keys: %s" % (label, ", ".join(sorted(unknown))))
    parsed = {}
    for key, value in d.items():
        target = _numeric_target(known[key].type)
        if target is not None and isinstance(value, str):
            try:
                value = target(value)
            except ValueError:
                raise ConfigError("%s: expected a number for %s, got %r" % (label, key, value))
        parsed[key] = value
    return cls(**parsed)
