"""
Declarative property tables.

A table maps a property name to a dict keyed by ``Type``, ``Description``
and optionally ``DefaultValue``. ``fill_properties`` validates a plain
dict (typically loaded from JSON) against such a table.

The format and its marker keys are defined here; no external controller
framework reads these tables.
"""

import copy

from secure_rdi.errors import UsageError

Type = "type"
Description = "description"
DefaultValue = "default"
Required = "required"


def _coerce(name, value, kind):
    if kind is bool:
        if isinstance(value, bool):
            return value
        raise UsageError("property %r must be a boolean, got %r"
                         % (name, value))
    if kind in (int, float):
        try:
            number = float(value)
        except (TypeError, ValueError):
            number = None
        if isinstance(value, bool) or number is None:
            raise UsageError("property %r must be a number, got %r"
                             % (name, value))
        if kind is float:
            return number
        if not number.is_integer():
            raise UsageError("property %r must be an integer, got %r"
                             % (name, value))
        return int(number)
    if kind is str:
        if not isinstance(value, str):
            raise UsageError("property %r must be a string, got %r"
                             % (name, value))
        return value
    if kind is dict:
        if not isinstance(value, dict):
            raise UsageError("property %r must be an object, got %r"
                             % (name, value))
        return dict(value)
    if isinstance(kind, list):
        if not isinstance(value, (list, tuple)):
            raise UsageError("property %r must be a list" % name)
        return [_coerce(name, item, kind[0]) for item in value]
    return value


def fill_properties(table, values, where="configuration"):
    """Return a complete property dict, defaults filled and types checked."""
    values = dict(values or {})
    unknown = sorted(set(values) - set(table))
    if unknown:
        raise UsageError("%s: unknown properties %s" % (where, unknown))
    result = {}
    for name, spec in table.items():
        if name in values and values[name] is not None:
            result[name] = _coerce(name, values[name], spec[Type])
        elif DefaultValue in spec:
            result[name] = copy.deepcopy(spec[DefaultValue])
        elif spec.get(Required, False):
            raise UsageError("%s: missing property %r (%s)"
                             % (where, name, spec[Description]))
        else:
            result[name] = None
    return result


def param_table(param_def):
    """
    Property table of ``param_def`` rows ``[name, type, default, doc]``.
    A ``None`` default leaves the parameter optional without a value.
    """
    table = {}
    for name, kind, default, doc in param_def:
        table[name] = {Type: kind, Description: doc}
        if default is not None:
            table[name][DefaultValue] = default
    return table
