"""Growth of analytic functions in the unit disc."""

from ._core import (
    AbgError,
    bound,
    catalog,
    characteristic,
    check_triple,
    derivative,
    evaluable_prefix,
    evaluate,
    max_modulus,
    normalize,
    order,
    scenarios,
    solve,
    type,
    verify,
)

__all__ = [
    "AbgError",
    "bound",
    "catalog",
    "characteristic",
    "check_triple",
    "derivative",
    "evaluable_prefix",
    "evaluate",
    "max_modulus",
    "normalize",
    "order",
    "scenarios",
    "solve",
    "type",
    "verify",
]
