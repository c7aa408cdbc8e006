"""Alexandrov spaces, Alexandrov groupoids and the monoids behind them."""
from .ambient_group import GroupDescriptor, GroupElem, ball, parse_elem, format_elem
from .errors import (
    AlexToposError,
    ConfigurationError,
    NotAnArrow,
    ResourceError,
    UsageError,
    WindowError,
    WindowWarning,
)
from .monoid_core import MSet, QuotientMonoid, SubmonoidSpec, saturate_congruence, validate_mset
from .poset_core import WindowPoset

__version__ = "0.1.0"
