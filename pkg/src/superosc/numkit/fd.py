"""Central finite differences."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

__all__ = ["fd_gradient", "fd_derivative", "FiniteDifferenceError"]


class FiniteDifferenceError(ValueError):
    """A sample of the differentiated function was not finite."""


def fd_gradient(fn: Callable[..., float], point: Sequence[float], h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of ``fn(*point)``; error O(h^2).

    The step is scaled per coordinate as ``h * max(1, |x_i|)``.
    """
    if not (1e-8 <= h <= 1e-3):
        raise ValueError(f"step h={h} outside [1e-8, 1e-3]")
    x = np.asarray(point, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        hi = h * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += hi
        xm[i] -= hi
        fp = float(fn(*xp))
        fm = float(fn(*xm))
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise FiniteDifferenceError(f"non-finite sample along coordinate {i} at {x}")
        grad[i] = (fp - fm) / (2 * hi)
    return grad


def fd_derivative(fn: Callable[[float], float], x: float, order: int = 1, h: float = 1e-3) -> float:
    """Central-difference derivative of a scalar function, orders 1 to 4 (O(h^2))."""
    stencils = {
        1: ((-1, -0.5), (1, 0.5)),
        2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
        3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
        4: ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)),
    }
    if order not in stencils:
        raise ValueError("order must be 1, 2, 3 or 4")
    total = 0.0
    for k, c in stencils[order]:
        v = float(fn(x + k * h))
        if not np.isfinite(v):
            raise FiniteDifferenceError(f"non-finite sample at {x + k * h}")
        total += c * v
    return total / h ** order
