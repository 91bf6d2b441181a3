"""Ready-made Finsler structures used by the verification suites and demos.

Each builder returns a fresh :class:`~finslerconn.finsler.FinslerStructure`.
The trio euclidean/hyperbolic/randers is the default verification set: one
flat metric (everything with curvature in it collapses), one genuinely
curved Riemannian metric with closed-form curvature, and one non-Riemannian
norm exercising the Cartan tensor terms.
"""

from __future__ import annotations

from .expr import ExprScalarField
from .finsler import FinslerStructure

__all__ = [
    "euclidean",
    "hyperbolic",
    "randers",
    "warped_flat",
    "curved_three_dim",
    "quartic_three_dim",
]


def euclidean(n: int = 2) -> FinslerStructure:
    """The flat Euclidean norm on R^n."""
    text = "sqrt(" + " + ".join(f"y{i + 1}^2" for i in range(n)) + ")"
    return FinslerStructure(n, ExprScalarField(n, text), name=f"euclidean{n}")

def hyperbolic() -> FinslerStructure:
    """The hyperbolic plane (constant curvature -1) as ``dx^2 + e^(2x) dy^2``."""
    return FinslerStructure(
        2,
        ExprScalarField(2, "sqrt(y1^2 + exp(2*x1)*y2^2)"),
        name="hyperbolic",
    )


def randers(drift: float = 0.5) -> FinslerStructure:
    """A conformally scaled Randers norm; ``|drift| < 1`` keeps it strongly
    convex everywhere."""
    if not abs(drift) < 1.0:
        raise ValueError("drift must have absolute value below 1")
    text = f"exp(x1)*(sqrt(y1^2 + y2^2) + {drift}*y1)"
    return FinslerStructure(2, ExprScalarField(2, text), name="randers")


def warped_flat() -> FinslerStructure:
    """A flat metric in exponentially warped coordinates; nonzero connection
    coefficients with simple closed forms."""
    return FinslerStructure(
        2,
        ExprScalarField(2, "sqrt(exp(2*x1)*y1^2 + y2^2)"),
        name="warped_flat",
    )


def curved_three_dim() -> FinslerStructure:
    """A three-dimensional Riemannian sample, diagonally dominant on the box
    ``|x_i| <= 0.5``, with every coordinate pulling on some metric entry."""
    text = (
        "sqrt((1 + 0.4*x2^2)*y1^2 + (1 + 0.4*x3^2)*y2^2"
        " + (1 + 0.4*x1^2)*y3^2 + 0.4*x3*y1*y2)"
    )
    return FinslerStructure(3, ExprScalarField(3, text), name="curved3d")


def quartic_three_dim() -> FinslerStructure:
    """A three-dimensional quartic norm with mild position weights.

    In dimension two the Cartan tensor is rank one, so every quadratic
    expression in it (notably the vertical curvature) collapses; Randers
    norms are similarly degenerate in that respect.  This sample is the
    smallest structure in the collection whose vertical curvature is
    genuinely nonzero.  Strong convexity holds away from the coordinate
    planes; keep directions in the positive octant (the default sampling
    shell ``0.4 <= y_i <= 1.6`` is verified safe on ``|x_i| <= 0.5``).
    """
    text = "((1 + 0.3*x1^2)*y1^4 + y2^4 + (1 - 0.2*x2)*y3^4)^(1/4)"
    return FinslerStructure(3, ExprScalarField(3, text), name="quartic3d")
