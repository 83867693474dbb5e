"""Oscillation threshold search: smallest gain where the loop determinant crosses zero."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cavity import CavitySpec, threshold_determinant

__all__ = ["ThresholdResult", "ThresholdMap", "NoThresholdInRange",
           "NoFeedback", "find_threshold", "threshold_map"]


class NoThresholdInRange(ValueError):
    """No determinant sign change up to the scanned maximum gain."""


class NoFeedback(ValueError):
    """A coupling constant is zero: the cavity cannot oscillate."""


@dataclass(frozen=True)
class ThresholdResult:
    xi_th: float                 # gain rate at threshold (1/m)
    pump_product: float          # P1 P2 at threshold (W^2); nan if gamma_nl = 0
    bracket: tuple               # final (xi_lo, xi_hi) with opposite det signs
    iterations: int
    residual: float              # determinant value at xi_th


@dataclass(frozen=True)
class ThresholdMap:
    l2_grid: np.ndarray
    l3_grid: np.ndarray
    pump_product: np.ndarray     # shape (len(l2), len(l3)); nan where flagged
    xi_th: np.ndarray
    ok: np.ndarray               # bool mask


def _default_xi_max(spec: CavitySpec) -> float:
    lengths = [spec.grating1.length, spec.grating2.length]
    if spec.mid_length > 0:
        lengths.append(spec.mid_length)
    return 10.0 / min(lengths)


def _pump_product(xi: float, gamma_nl: float) -> float:
    if gamma_nl <= 0:
        return float("nan")
    return (xi / (2.0 * gamma_nl)) ** 2


def find_threshold(spec: CavitySpec, xi_max: float | None = None,
                   scan_points: int = 400) -> ThresholdResult:
    """Locate the first zero crossing of the loop determinant in gain.

    A log-spaced coarse scan over (0, xi_max] brackets the first sign change;
    bisection then tightens the bracket to a relative width of 1e-13. The
    scan resolves thresholds far below xi_max without missing early
    crossings of the (monotone-to-first-zero) determinant.
    """
    if spec.grating1.kappa == 0 or spec.grating2.kappa == 0:
        raise NoFeedback("both gratings need kappa > 0 to form a cavity")
    if xi_max is None:
        xi_max = _default_xi_max(spec)

    det = lambda xi: threshold_determinant(spec, xi)
    grid = np.concatenate([[0.0], np.geomspace(xi_max * 1e-8, xi_max, scan_points)])
    prev_xi = grid[0]
    prev_det = det(prev_xi)
    bracket = None
    for xi in grid[1:]:
        d = det(float(xi))
        if prev_det > 0 and d <= 0:
            bracket = (float(prev_xi), float(xi))
            break
        prev_xi, prev_det = xi, d
    if bracket is None:
        raise NoThresholdInRange(
            f"no determinant sign change for gain up to {xi_max:.6g} 1/m")

    lo, hi = bracket
    iterations = 0
    while (hi - lo) > 1e-13 * hi and iterations < 200:
        mid = 0.5 * (lo + hi)
        if det(mid) > 0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    xi_th = 0.5 * (lo + hi)
    return ThresholdResult(
        xi_th=xi_th,
        pump_product=_pump_product(xi_th, spec.pumps.gamma_nl),
        bracket=(lo, hi),
        iterations=iterations,
        residual=det(xi_th))


def threshold_map(base: CavitySpec, l2_grid, l3_grid,
                  xi_max: float | None = None) -> ThresholdMap:
    """Threshold pump product over an (L2, L3) geometry grid (row-major).

    Cells where the search fails are flagged in the mask and left nan; the
    sweep always completes.
    """
    import dataclasses

    l2_grid = np.asarray(l2_grid, dtype=float)
    l3_grid = np.asarray(l3_grid, dtype=float)
    if np.any(l2_grid <= 0) or np.any(l3_grid < 0):
        raise ValueError("grating lengths must be positive, gap lengths >= 0")
    shape = (len(l2_grid), len(l3_grid))
    pump = np.full(shape, np.nan)
    xi = np.full(shape, np.nan)
    ok = np.zeros(shape, dtype=bool)
    for i, l2 in enumerate(l2_grid):
        for j, l3 in enumerate(l3_grid):
            spec = dataclasses.replace(
                base,
                grating2=dataclasses.replace(base.grating2, length=float(l2)),
                mid_length=float(l3))
            try:
                r = find_threshold(spec, xi_max=xi_max)
            except (NoThresholdInRange, NoFeedback):
                continue
            pump[i, j] = r.pump_product
            xi[i, j] = r.xi_th
            ok[i, j] = True
    return ThresholdMap(l2_grid=l2_grid, l3_grid=l3_grid,
                        pump_product=pump, xi_th=xi, ok=ok)
