import abc
import json
from enum import Enum
from typing import Dict, Iterable, Optional

from addict import Dict as AttributeDict  # auto generates attribute, properties and getter/setter dynamically

from sdpkit.typedefs import JSON
from sdpkit.utils import json_ready


class Base(AttributeDict, abc.ABC):
    """
    Dictionary with extended attributes auto-``getter``/``setter`` for convenience.
    Explicitly overridden ``getter``/``setter`` attributes are called instead of ``dict``-key ``get``/``set``-item
    to ensure corresponding checks and/or value adjustments are executed before applying it to the sub-``dict``.

    All reports emitted by the toolkit derive from it so that they share the same JSON conversion.
    """

    __json__ = True  # repr as JSON
    __fields__ = ()  # type: Iterable[str]

    def __init__(self, *_, **kwargs):
        items = dict(*_)
        kwargs.update(items)
        super(Base, self).__init__()
        for key in self.__fields__:
            kwargs.setdefault(key, None)
        for key, val in kwargs.items():
            self.__setitem__(key, val)

    def __str__(self):
        # type: () -> str
        return f"{type(self).__name__} <{', '.join(str(key) for key in self.keys())}>"

    # default behavior ignores getter property, so enforce it if it exists
    # (not needed for __getattr__ already handled)
    def __getitem__(self, item):
        prop = getattr(self.__class__, item, None)
        if isinstance(prop, property) and prop.fget is not None:
            return prop.fget(self)
        return super(Base, self).__getitem__(item)

    # reports have a fixed set of fields, never auto-create nested entries on lookup
    def __missing__(self, key):
        raise KeyError(key)

    def __getattr__(self, item):
        try:
            return self.__getitem__(item)
        except KeyError:
            raise AttributeError(f"'{type(self).__name__}' has no field [{item}]")

    # default behavior ignores setter property, so enforce it if it exists
    def __setitem__(self, key, value):
        prop = getattr(self.__class__, key, None)
        if isinstance(prop, property) and prop.fset is not None:
            prop.fset(self, value)
        else:
            super(Base, self).__setitem__(key, value)

    # default behavior ignores setter property, so enforce it if it exists
    def __setattr__(self, name, value):
        prop = getattr(self.__class__, name, None)
        if isinstance(prop, property) and prop.fset is not None:
            prop.fset(self, value)
        else:
            super(Base, self).__setattr__(name, value)

    def __repr__(self):
        if self.__json__:
            cls = type(self)
            try:
                repr_ = json.dumps(self.json(), indent=2, ensure_ascii=False)
            except Exception:  # noqa
                return dict.__repr__(self)
            return f"{cls.__module__}.{cls.__name__}\n{repr_}"
        return dict.__repr__(self)

    def json(self, digits: Optional[int] = None) -> JSON:
        """
        JSON representation of the data.

        Arrays and numpy scalars are converted to lists and plain numbers, floats are rounded to the requested
        significant digits and enumerations are written with their string value.
        """
        base = {}
        for key in self.keys():
            value = self.__getitem__(key)  # resolve any applicable property
            base[str(key)] = value
        if digits is None:
            return json_ready(base)
        return json_ready(base, digits)


class EnumNameHyphenCase(Enum):
    def _generate_next_value_(self, start, count, last_values):
        return self.lower().replace("_", "-")

    def __str__(self):
        # when processing json() for report creation,
        # automatically convert to the generated value
        return self.value


class SdpkitError(Exception):
    """
    Base of every error raised by the toolkit.
    """


class NumericalError(SdpkitError):
    pass


class NumericalTrouble(NumericalError):
    pass


class FactorizationFailure(NumericalError):
    pass


class NotConvexified(NumericalError):
    pass


class InputError(SdpkitError, ValueError):
    pass


class UnsupportedSize(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class AsymmetricInput(InputError):
    pass


class DomainError(InputError):
    pass


class DegenerateInput(InputError):
    pass


class VariableCountMismatch(InputError):
    pass


class ParseError(InputError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super(ParseError, self).__init__(f"Parsing failed at line [{line}]: {reason}")


class MatrixClassError(SdpkitError, ValueError):
    pass


class NotPositiveDefinite(MatrixClassError):
    pass


class NotPsd(MatrixClassError):
    pass


class LeadingBlockNotPd(MatrixClassError):
    pass


class NotPositiveOnNullspace(MatrixClassError):
    pass


class NotPsdOnNullspace(MatrixClassError):
    pass


class ModelError(SdpkitError):
    pass


class InfeasibleLinearSystem(ModelError):
    pass


class DependentConstraintMatrices(ModelError):
    pass


class InfeasibleArgument(ModelError):
    pass


class InfeasibleModel(ModelError):
    pass


class Infeasible(ModelError):
    """
    Polynomial could not be certified as a sum of squares.

    The decision margin and the final solver residuals are attached for inspection of boundary cases.
    """

    def __init__(self, message: str, margin: float = float("nan"), residuals: Optional[Dict[str, float]] = None):
        self.margin = margin
        self.residuals = dict(residuals or {})
        super(Infeasible, self).__init__(message)


def check_size(name: str, value: int, limit: int) -> None:
    if value > limit:
        raise UnsupportedSize(f"Size of [{name}] is [{value}], exceeds supported maximum [{limit}]")
