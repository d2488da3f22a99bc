"""Finite-difference cross-checks and a random-composite generator for jets.

The derivative audit is two-staged so each comparison stays within central
difference truncation error instead of stacking two rounds of roundoff:

* gradients are checked against central differences of plain values;
* Hessian columns are checked against central differences of exact jet
  gradients (a value-stencil second difference at h = 1e-5 carries roundoff
  of order 1e-6, which would drown the quantity being audited).
"""

from __future__ import annotations

import numpy as np

from hgeom import ScalarJet, evaluate_primitive, seed_coordinates
from hgeom.jets import constant

FD_STEP = 1e-5


def jet_at(f, coords: np.ndarray) -> ScalarJet:
    return f(seed_coordinates(list(coords)))


def fd_gradient(f, coords: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Central differences of the plain value."""
    coords = np.asarray(coords, dtype=float)
    out = np.empty(coords.size)
    for i in range(coords.size):
        plus = coords.copy()
        minus = coords.copy()
        plus[i] += h
        minus[i] -= h
        out[i] = (jet_at(f, plus).value - jet_at(f, minus).value) / (2 * h)
    return out


def fd_hessian_from_gradients(f, coords: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Central differences of exact first-order jet gradients."""
    coords = np.asarray(coords, dtype=float)
    dim = coords.size
    out = np.empty((dim, dim))
    for i in range(dim):
        plus = coords.copy()
        minus = coords.copy()
        plus[i] += h
        minus[i] -= h
        out[:, i] = (jet_at(f, plus).grad - jet_at(f, minus).grad) / (2 * h)
    return out


# -- random composites ---------------------------------------------------------

# (label, closure) pairs; every entry is total on all of R so random nesting
# stays inside every primitive's domain.
_SAFE_UNARY = (
    ("sinh", lambda x: evaluate_primitive("sinh", [x])),
    ("cosh", lambda x: evaluate_primitive("cosh", [x])),
    ("tanh", lambda x: evaluate_primitive("tanh", [x])),
    ("sin", lambda x: evaluate_primitive("sin", [x])),
    ("cos", lambda x: evaluate_primitive("cos", [x])),
    ("exp", lambda x: evaluate_primitive("exp", [x])),
    ("neg", lambda x: -x),
    ("ln(exp+3/2)", lambda x: evaluate_primitive("ln", [evaluate_primitive("exp", [x]) + 1.5])),
    ("sqrt(sq+1/2)", lambda x: evaluate_primitive("sqrt", [x * x + 0.5])),
    ("coth(sq+7/10)", lambda x: evaluate_primitive("coth", [x * x + 0.7])),
    ("tan(3/10 sin)", lambda x: evaluate_primitive("tan", [0.3 * evaluate_primitive("sin", [x])])),
    ("inv-sq", lambda x: (x * x + 1.0) ** -2),
    ("cube", lambda x: x**3),
)

_SAFE_BINARY = (
    ("add", lambda a, b: a + b),
    ("sub", lambda a, b: a - b),
    ("mul", lambda a, b: a * b),
    ("guarded-div", lambda a, b: a / (b * b + 1.0)),
)


def random_composite(rng: np.random.Generator, dim: int, depth: int = 4):
    """Build a random closed-form composite of primitives over ``dim`` inputs.

    Returns ``(label, f)`` where ``f`` maps a list of ScalarJets to a
    ScalarJet and ``label`` spells out the sampled expression tree.
    """

    def build(d: int):
        kind = rng.integers(0, 3) if d > 0 else 2
        if kind == 0:
            name, op = _SAFE_UNARY[rng.integers(0, len(_SAFE_UNARY))]
            sub_label, sub = build(d - 1)
            return f"{name}({sub_label})", (lambda jets, op=op, sub=sub: op(sub(jets)))
        if kind == 1:
            name, op = _SAFE_BINARY[rng.integers(0, len(_SAFE_BINARY))]
            left_label, left = build(d - 1)
            right_label, right = build(d - 1)
            return (
                f"{name}({left_label}, {right_label})",
                (lambda jets, op=op, left=left, right=right: op(left(jets), right(jets))),
            )
        if rng.random() < 0.25:
            value = float(rng.uniform(-2.0, 2.0))
            return f"{value:.3f}", (lambda jets, value=value: constant(value, len(jets)))
        index = int(rng.integers(0, dim))
        return f"u{index + 1}", (lambda jets, index=index: jets[index])

    return build(depth)
