"""Second-order forward-mode automatic differentiation on scalar jets.

Every chart component field is evaluated as a value / gradient / Hessian
triple with respect to a fixed set of chart coordinates, so downstream
curvature computations (which need exact second metric derivatives) never
touch finite differencing.

The Hessians produced here are exactly symmetric by construction: every
propagation rule assembles them from already-symmetric parts (scaled
Hessians and symmetrized outer products), and IEEE float addition and
multiplication are commutative, so no explicit symmetrization step is
needed anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "DomainError",
    "ScalarJet",
    "constant",
    "seed_coordinates",
    "evaluate_primitive",
    "UNARY_PRIMITIVES",
    "BINARY_PRIMITIVES",
]


class DomainError(ValueError):
    """A primitive was evaluated outside its real domain."""

    def __init__(self, primitive: str, value: float):
        self.primitive = primitive
        self.value = value
        super().__init__(f"primitive {primitive!r} undefined at argument {value!r}")


@dataclass(frozen=True)
class ScalarJet:
    """Value, gradient and Hessian of a scalar quantity at a point."""

    value: float
    grad: np.ndarray  # shape (d,)
    hess: np.ndarray  # shape (d, d), exactly symmetric

    @property
    def dim(self) -> int:
        return self.grad.shape[0]

    # -- coercion ---------------------------------------------------------

    def _lift(self, other) -> "ScalarJet | None":
        if isinstance(other, ScalarJet):
            if other.dim != self.dim:
                raise ValueError(
                    f"jet dimension mismatch: {self.dim} vs {other.dim}"
                )
            return other
        if isinstance(other, (int, float)) and not isinstance(other, bool):
            return constant(float(other), self.dim)
        return None

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return ScalarJet(self.value + o.value, self.grad + o.grad, self.hess + o.hess)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return ScalarJet(self.value - o.value, self.grad - o.grad, self.hess - o.hess)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o.__sub__(self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        hess = (
            self.value * o.hess
            + o.value * self.hess
            + np.outer(self.grad, o.grad)
            + np.outer(o.grad, self.grad)
        )
        return ScalarJet(
            self.value * o.value,
            self.value * o.grad + o.value * self.grad,
            hess,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.__mul__(_reciprocal(o))

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o.__mul__(_reciprocal(self))

    def __neg__(self):
        return ScalarJet(-self.value, -self.grad, -self.hess)

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or isinstance(exponent, bool):
            return NotImplemented
        return _pow_int(self, exponent)


def constant(value: float, dim: int) -> ScalarJet:
    """Jet of a constant: zero gradient, zero Hessian."""
    if dim < 1:
        raise ValueError("jet dimension must be at least 1")
    return ScalarJet(float(value), np.zeros(dim), np.zeros((dim, dim)))


def seed_coordinates(coords: Sequence[float]) -> list[ScalarJet]:
    """Seed the chart coordinates: jet k carries value coords[k], grad e_k, hess 0."""
    values = [float(c) for c in coords]
    d = len(values)
    if d == 0:
        raise ValueError("cannot seed an empty coordinate vector (dimension zero)")
    for k, v in enumerate(values):
        if not math.isfinite(v):
            raise ValueError(f"non-finite coordinate at index {k}: {v!r}")
    jets = []
    for k, v in enumerate(values):
        grad = np.zeros(d)
        grad[k] = 1.0
        jets.append(ScalarJet(v, grad, np.zeros((d, d))))
    return jets


# -- unary chain rule ------------------------------------------------------


def _chain(x: ScalarJet, value: float, d1: float, d2: float) -> ScalarJet:
    """Propagate f with f(x)=value, f'(x)=d1, f''(x)=d2 through the jet x."""
    return ScalarJet(
        value,
        d1 * x.grad,
        d1 * x.hess + d2 * np.outer(x.grad, x.grad),
    )


def _reciprocal(x: ScalarJet) -> ScalarJet:
    if x.value == 0.0:
        raise DomainError("div", 0.0)
    v = 1.0 / x.value
    return _chain(x, v, -v * v, 2.0 * v * v * v)


def _pow_int(x: ScalarJet, n: int) -> ScalarJet:
    if n == 0:
        return constant(1.0, x.dim)
    if n < 0 and x.value == 0.0:
        raise DomainError("pow-int", 0.0)
    v = x.value
    if n == 1:
        return _chain(x, v, 1.0, 0.0)
    return _chain(x, v**n, n * v ** (n - 1), n * (n - 1) * v ** (n - 2))


def _sinh(x: ScalarJet) -> ScalarJet:
    s, c = math.sinh(x.value), math.cosh(x.value)
    return _chain(x, s, c, s)


def _cosh(x: ScalarJet) -> ScalarJet:
    s, c = math.sinh(x.value), math.cosh(x.value)
    return _chain(x, c, s, c)


def _tanh(x: ScalarJet) -> ScalarJet:
    v = math.tanh(x.value)
    s = 1.0 - v * v
    return _chain(x, v, s, -2.0 * v * s)


def _coth(x: ScalarJet) -> ScalarJet:
    s = math.sinh(x.value)
    if s == 0.0:
        raise DomainError("coth", x.value)
    v = math.cosh(x.value) / s
    d = 1.0 - v * v
    return _chain(x, v, d, -2.0 * v * d)


def _sin(x: ScalarJet) -> ScalarJet:
    s, c = math.sin(x.value), math.cos(x.value)
    return _chain(x, s, c, -s)


def _cos(x: ScalarJet) -> ScalarJet:
    s, c = math.sin(x.value), math.cos(x.value)
    return _chain(x, c, -s, -c)


def _tan(x: ScalarJet) -> ScalarJet:
    # Poles sit at odd multiples of pi/2; no float lands on one exactly, so
    # treat anything within ~1e-12 radians of a pole as a domain violation.
    if abs(math.cos(x.value)) < 1e-12:
        raise DomainError("tan", x.value)
    v = math.tan(x.value)
    s = 1.0 + v * v
    return _chain(x, v, s, 2.0 * v * s)


def _exp(x: ScalarJet) -> ScalarJet:
    e = math.exp(x.value)
    return _chain(x, e, e, e)


def _ln(x: ScalarJet) -> ScalarJet:
    t = x.value
    if t <= 0.0:
        raise DomainError("ln", t)
    return _chain(x, math.log(t), 1.0 / t, -1.0 / (t * t))


def _sqrt(x: ScalarJet) -> ScalarJet:
    t = x.value
    if t <= 0.0:
        raise DomainError("sqrt", t)
    r = math.sqrt(t)
    return _chain(x, r, 0.5 / r, -0.25 / (t * r))


UNARY_PRIMITIVES: dict[str, Callable[[ScalarJet], ScalarJet]] = {
    "neg": lambda x: -x,
    "sinh": _sinh,
    "cosh": _cosh,
    "tanh": _tanh,
    "coth": _coth,
    "sin": _sin,
    "cos": _cos,
    "tan": _tan,
    "exp": _exp,
    "ln": _ln,
    "sqrt": _sqrt,
}

BINARY_PRIMITIVES: dict[str, Callable[[ScalarJet, ScalarJet], ScalarJet]] = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def evaluate_primitive(
    kind: str,
    args: Sequence[ScalarJet],
    exponent: int | None = None,
) -> ScalarJet:
    """Apply one named primitive to jet arguments.

    ``pow-int`` takes one jet argument plus the integer ``exponent`` keyword;
    all other primitives take one or two jet arguments.
    """
    if kind == "pow-int":
        if len(args) != 1:
            raise ValueError("pow-int takes exactly one jet argument")
        if exponent is None or not isinstance(exponent, int) or isinstance(exponent, bool):
            raise ValueError("pow-int requires an integer exponent")
        return _pow_int(args[0], exponent)
    if kind in BINARY_PRIMITIVES:
        if len(args) != 2:
            raise ValueError(f"primitive {kind!r} takes exactly two arguments")
        return BINARY_PRIMITIVES[kind](args[0], args[1])
    if kind in UNARY_PRIMITIVES:
        if len(args) != 1:
            raise ValueError(f"primitive {kind!r} takes exactly one argument")
        return UNARY_PRIMITIVES[kind](args[0])
    raise ValueError(f"unknown primitive {kind!r}")
