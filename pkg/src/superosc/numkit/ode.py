"""Explicit Dormand-Prince 5(4) integrator with PI step control and dense output.

The propagated solution is the 5th order one (local extrapolation); the
embedded 4th order solution only feeds the error estimate.  Dense output uses
the standard 4th order continuous extension of the pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = ["OdeProblem", "Trajectory", "integrate_ode", "IntegrationError"]


class IntegrationError(RuntimeError):
    """Raised by :meth:`Trajectory.require_success` for failed integrations."""


# Butcher tableau -----------------------------------------------------------

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# 5th minus 4th order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# dense output
_D = (
    -12715105075 / 11282082432,
    0.0,
    87487479700 / 32700410799,
    -10690763975 / 1880347072,
    701980252875 / 199316789632,
    -1453857185 / 822651844,
    69997945 / 29380423,
)

_SAFE = 0.9
_FAC_MIN = 0.2   # h_new >= 0.2 h
_FAC_MAX = 10.0  # h_new <= 10 h
_BETA = 0.04     # PI (Lund stabilisation) exponent
_EXPO = 0.2 - 0.75 * _BETA


@dataclass(frozen=True)
class OdeProblem:
    """Initial value problem ``y' = rhs(t, y)``, ``y(t_span[0]) = y0``.

    ``domain`` is an optional predicate on ``(t, y)``; trial steps that land
    outside it are rejected like steps with non-finite right-hand sides, so an
    integration approaching a singular boundary (for instance ``y -> 0`` with a
    negative power) ends with a ``step_underflow`` diagnostic instead of
    producing garbage.
    """

    rhs: Callable[[float, np.ndarray], np.ndarray]
    y0: np.ndarray
    t_span: tuple[float, float]
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = math.inf
    first_step: Optional[float] = None
    domain: Optional[Callable[[float, np.ndarray], bool]] = None
    max_steps: int = 200_000

    def __post_init__(self):
        y0 = np.atleast_1d(np.asarray(self.y0, dtype=float))
        object.__setattr__(self, "y0", y0)
        t0, t1 = (float(v) for v in self.t_span)
        object.__setattr__(self, "t_span", (t0, t1))
        if not (math.isfinite(t0) and math.isfinite(t1)):
            raise ValueError("t_span must be finite")
        if not (1e-14 <= self.rtol <= 1e-2):
            raise ValueError(f"rtol={self.rtol} outside [1e-14, 1e-2]")
        if not (0 < self.atol <= 1e-2):
            raise ValueError(f"atol={self.atol} must lie in (0, 1e-2]")
        if not np.all(np.isfinite(y0)):
            raise ValueError("initial state is not finite")

    @property
    def dim(self) -> int:
        return self.y0.shape[0]


@dataclass(frozen=True)
class Trajectory:
    """Accepted steps of an integration plus a piecewise-quartic interpolant.

    ``t`` is strictly monotone (increasing or decreasing following the
    direction of integration), ``y`` has shape ``(len(t), dim)``.  Calling the
    trajectory evaluates the dense output; at grid nodes the stored samples are
    returned bit-for-bit.
    """

    t: np.ndarray
    y: np.ndarray
    status: str
    message: str = ""
    nfev: int = 0
    _dense: np.ndarray = field(default=None, repr=False)  # (nsteps, 5, dim)

    @property
    def success(self) -> bool:
        return self.status == "success"

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    def require_success(self) -> "Trajectory":
        if not self.success:
            raise IntegrationError(f"{self.status}: {self.message}")
        return self

    def __call__(self, t):
        scalar = np.ndim(t) == 0
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        direction = 1.0 if self.t[-1] >= self.t[0] else -1.0
        lo, hi = sorted((self.t[0], self.t[-1]))
        if np.any(tt < lo - 1e-12 * max(1.0, abs(lo))) or np.any(tt > hi + 1e-12 * max(1.0, abs(hi))):
            raise ValueError(f"dense output requested outside [{lo}, {hi}]")
        key = direction * self.t
        idx = np.searchsorted(key, direction * tt, side="right") - 1
        idx = np.clip(idx, 0, len(self.t) - 2) if len(self.t) > 1 else np.zeros_like(idx)
        out = np.empty((tt.size, self.y.shape[1]))
        for j, (i, tj) in enumerate(zip(idx, tt)):
            if tj == self.t[i]:
                out[j] = self.y[i]
                continue
            if i + 1 < len(self.t) and tj == self.t[i + 1]:
                out[j] = self.y[i + 1]
                continue
            h = self.t[i + 1] - self.t[i]
            th = (tj - self.t[i]) / h
            r1, r2, r3, r4, r5 = self._dense[i]
            th1 = 1.0 - th
            out[j] = r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)))
        return out[0] if scalar else out

    def sample(self, num: int) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate the dense output on ``num`` equispaced times."""
        ts = np.linspace(self.t[0], self.t[-1], num)
        return ts, self(ts)


def _initial_step(rhs, t0, y0, f0, direction, rtol, atol, max_step):
    sc = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / sc) ** 2))
    d1 = np.sqrt(np.mean((f0 / sc) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, max_step)
    y1 = y0 + direction * h0 * f0
    f1 = np.asarray(rhs(t0 + direction * h0, y1), dtype=float)
    if not np.all(np.isfinite(f1)):
        return h0 * 1e-3
    d2 = np.sqrt(np.mean(((f1 - f0) / sc) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, max_step)


def integrate_ode(problem: OdeProblem) -> Trajectory:
    """Integrate ``problem`` over its full span.

    Never raises for numerical trouble: blow-up, non-finite right-hand sides
    or leaving ``problem.domain`` end the run early and the returned
    trajectory carries ``status`` in ``{"step_underflow", "nonfinite",
    "max_steps"}`` together with the accepted part of the solution.
    """
    rhs = problem.rhs
    t0, t_end = problem.t_span
    y = problem.y0.copy()
    dim = y.shape[0]
    if t_end == t0:
        return Trajectory(np.array([t0]), y[None, :].copy(), "success", "", 0,
                          np.zeros((0, 5, dim)))
    direction = 1.0 if t_end > t0 else -1.0
    rtol, atol = problem.rtol, problem.atol
    domain = problem.domain

    f = np.asarray(rhs(t0, y), dtype=float)
    nfev = 1
    if not np.all(np.isfinite(f)):
        return Trajectory(np.array([t0]), y[None, :].copy(), "nonfinite",
                          "right-hand side not finite at the initial state", nfev,
                          np.zeros((0, 5, dim)))
    h = problem.first_step or _initial_step(rhs, t0, y, f, direction, rtol, atol,
                                            problem.max_step)
    nfev += 1

    ts = [t0]
    ys = [y.copy()]
    dense = []
    t = t0
    facold = 1e-4
    rejected = False
    nonfinite_hits = 0
    status, message = "success", ""
    k = [None] * 7
    steps = 0

    while direction * (t_end - t) > 0:
        if steps >= problem.max_steps:
            status, message = "max_steps", f"exceeded {problem.max_steps} steps at t={t}"
            break
        h = min(h, problem.max_step, abs(t_end - t))
        if h < 16 * np.finfo(float).eps * max(1.0, abs(t)):
            status = "nonfinite" if nonfinite_hits else "step_underflow"
            message = f"step size underflow at t={t!r} (singularity or blow-up)"
            break
        hs = direction * h
        k[0] = f
        ok = True
        for s in range(1, 7):
            ys_stage = y + hs * sum(a * kj for a, kj in zip(_A[s], k[:s]) if a != 0.0)
            k[s] = np.asarray(rhs(t + _C[s] * hs, ys_stage), dtype=float)
            if not np.all(np.isfinite(k[s])):
                ok = False
                break
        nfev += 6
        if ok:
            y_new = ys_stage  # stage 7 argument is the 5th order solution (FSAL)
            if domain is not None and not domain(t + hs, y_new):
                ok = False
        if not ok:
            nonfinite_hits += 1
            h *= 0.25
            rejected = True
            continue

        err_vec = hs * sum(e * kj for e, kj in zip(_E, k) if e != 0.0)
        sc = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(float(np.mean((err_vec / sc) ** 2)))
        fac11 = err ** _EXPO if err > 0 else 0.0
        if err <= 1.0:
            fac = fac11 / facold ** _BETA
            fac = max(1 / _FAC_MAX, min(1 / _FAC_MIN, fac / _SAFE))
            h_new = h / fac
            if rejected:
                h_new = min(h_new, h)
            facold = max(err, 1e-4)
            r1 = y
            r2 = y_new - y
            r3 = hs * k[0] - r2
            r4 = r2 - hs * k[6] - r3
            r5 = hs * sum(d * kj for d, kj in zip(_D, k) if d != 0.0)
            dense.append(np.stack([r1, r2, r3, r4, r5]))
            # land exactly on the end point
            t = t_end if abs(t_end - (t + hs)) <= 4 * np.finfo(float).eps * max(1.0, abs(t_end)) else t + hs
            y = y_new
            f = k[6]
            ts.append(t)
            ys.append(y.copy())
            steps += 1
            rejected = False
            nonfinite_hits = 0
            h = h_new
        else:
            h = h / min(1 / _FAC_MIN, fac11 / _SAFE)
            rejected = True

    return Trajectory(
        np.asarray(ts),
        np.asarray(ys),
        status,
        message,
        nfev,
        np.asarray(dense) if dense else np.zeros((0, 5, dim)),
    )
