"""Shared numerical utilities: grids, smooth cutoffs, Gaussian weights, power fits.

Everything here is deterministic and stateless. The smooth cutoff functions
are built from the classic exponential transition exp(-1/s), which gives
genuinely C-infinity profiles with compact support.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid1D",
    "Bump",
    "PartitionPair",
    "FitResult",
    "make_bump",
    "make_partition",
    "gaussian_weight",
    "fit_power_series",
    "richardson",
]


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D grid with at least 8 strictly increasing points."""

    points: np.ndarray
    spacing: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 8:
            raise ValueError("Grid1D needs a 1D array of at least 8 points")
        steps = np.diff(pts)
        if np.any(steps <= 0):
            raise ValueError("grid points must be strictly increasing")
        if not np.allclose(steps, self.spacing, rtol=1e-10, atol=0.0):
            raise ValueError("grid points must be uniformly spaced")

    @classmethod
    def uniform(cls, lo: float, hi: float, n: int) -> "Grid1D":
        if not hi > lo:
            raise ValueError("need hi > lo")
        pts, step = np.linspace(lo, hi, n, retstep=True)
        return cls(points=pts, spacing=float(step))

    @property
    def size(self) -> int:
        return self.points.size

    def halved(self) -> "Grid1D":
        """Same interval with the spacing halved (2n-1 points)."""
        return Grid1D.uniform(self.points[0], self.points[-1], 2 * self.size - 1)


# ---------------------------------------------------------------------------
# smooth transition profile
#
# f(s) = exp(-1/s) for s > 0 vanishes to all orders at 0.  The quotient
# step(s) = f(s) / (f(s) + f(1-s)) rises monotonically from 0 at s<=0 to 1 at
# s>=1 and is C-infinity on the whole line.


def _f(s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


def _fprime(s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos]) / s[pos] ** 2
    return out


def _step(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    a = _f(s)
    b = _f(1.0 - s)
    return a / (a + b)


def _step_prime(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    a, b = _f(s), _f(1.0 - s)
    ap, bp = _fprime(s), _fprime(1.0 - s)
    g = a + b
    # d/ds [a/g] with db/ds = -bp
    return (ap * g - a * (ap - bp)) / g**2


# ---------------------------------------------------------------------------
# bumps


@dataclass(frozen=True)
class Bump:
    """C-infinity cutoff: identically 1 on an inner plateau, 0 outside its ball.

    The profile depends only on t = |x - center| / radius, so all derivative
    sup norms obey the dilation rule sup |radius^k d^k phi| = const(k).
    """

    center: float
    radius: float
    order: int
    plateau: float = 0.5  # fraction of the radius where the bump is exactly 1

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("bump radius must be positive")
        if not 0 < self.plateau < 1:
            raise ValueError("plateau fraction must lie in (0, 1)")
        if self.order < 1:
            raise ValueError("order must be >= 1")

    def _s(self, x: np.ndarray) -> np.ndarray:
        t = np.abs(np.asarray(x, dtype=float) - self.center) / self.radius
        return (1.0 - t) / (1.0 - self.plateau)

    def __call__(self, x):
        val = _step(np.clip(self._s(x), 0.0, 1.0))
        return val if np.ndim(x) else float(val)

    def derivative(self, x):
        """First derivative, analytic."""
        x = np.asarray(x, dtype=float)
        s = self._s(x)
        inside = (s > 0.0) & (s < 1.0)
        out = np.zeros_like(x, dtype=float)
        sign = np.sign(x - self.center)
        out[inside] = (
            _step_prime(s[inside])
            * (-sign[inside])
            / ((1.0 - self.plateau) * self.radius)
        )
        return out if out.ndim else float(out)

    def derivative_sup_norms(self, max_order: int | None = None, samples: int = 4096):
        """Sampled sup_x |radius^k d^k phi / dx^k| for k = 1 .. max_order.

        Central finite differences on a fine dyadic grid; diagnostic use only,
        the high orders are noisy at the floor of double precision.
        """
        kmax = self.order if max_order is None else max_order
        lo = self.center - 1.05 * self.radius
        hi = self.center + 1.05 * self.radius
        x = np.linspace(lo, hi, samples)
        dx = x[1] - x[0]
        vals = self.__call__(x)
        sups = []
        d = vals
        for k in range(1, kmax + 1):
            d = np.gradient(d, dx)
            sups.append(float(np.max(np.abs(d)) * self.radius**k))
        return tuple(sups)


def make_bump(center: float, radius: float, order: int = 4) -> Bump:
    """Smooth bump, 1 on |x-center| <= radius/2, 0 outside |x-center| >= radius."""
    return Bump(center=center, radius=radius, order=order)


# ---------------------------------------------------------------------------
# quadratic partition of unity


@dataclass(frozen=True)
class PartitionPair:
    """Pair (inner, outer) with inner^2 + outer^2 = 1 exactly.

    Both are functions of a distance-like coordinate d >= 0; inner = 1 for
    d <= R, 0 for d >= 2R, and the pair is built as cos/sin of one smooth
    monotone angle so the quadratic identity holds pointwise by construction.
    """

    R: float

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError("localization radius R must be positive")

    def _theta(self, d):
        s = (np.asarray(d, dtype=float) - self.R) / self.R
        return 0.5 * np.pi * _step(np.clip(s, 0.0, 1.0))

    def _theta_prime(self, d):
        d = np.asarray(d, dtype=float)
        s = (d - self.R) / self.R
        out = np.zeros_like(d, dtype=float)
        inside = (s > 0.0) & (s < 1.0)
        out[inside] = 0.5 * np.pi * _step_prime(s[inside]) / self.R
        return out

    def inner(self, d):
        val = np.cos(self._theta(d))
        return val if np.ndim(d) else float(val)

    def outer(self, d):
        val = np.sin(self._theta(d))
        return val if np.ndim(d) else float(val)

    def inner_grad(self, d):
        val = -np.sin(self._theta(d)) * self._theta_prime(d)
        return val if np.ndim(d) else float(val)

    def outer_grad(self, d):
        val = np.cos(self._theta(d)) * self._theta_prime(d)
        return val if np.ndim(d) else float(val)

    def grad_sq_sum(self, d):
        """(d inner/dd)^2 + (d outer/dd)^2, which collapses to theta'(d)^2."""
        val = self._theta_prime(d) ** 2
        return val if np.ndim(d) else float(val)


def make_partition(R: float) -> PartitionPair:
    return PartitionPair(R=R)


# ---------------------------------------------------------------------------
# Gaussian weight


def gaussian_weight(b: float, v) -> float | np.ndarray:
    """Normalized Gaussian G_b(v) = (b/pi)^(n/2) exp(-b |v|^2) on R^n.

    v is a single point: a scalar means n = 1, a 1D array of length n is a
    point of R^n.  A 2D array is a batch of points (rows).
    """
    if b <= 0:
        raise ValueError("Gaussian parameter b must be positive")
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        n = 1
        sq = v**2
    elif v.ndim == 1:
        n = v.size
        sq = np.dot(v, v)
    else:
        n = v.shape[-1]
        sq = np.sum(v**2, axis=-1)
    val = (b / np.pi) ** (n / 2.0) * np.exp(-b * sq)
    return val if np.ndim(val) else float(val)


# ---------------------------------------------------------------------------
# power-law fits


@dataclass(frozen=True)
class FitResult:
    exponents: tuple
    coefficients: tuple
    residual_norm: float
    condition: float
    warnings: tuple = field(default_factory=tuple)

    def coefficient(self, exponent: float) -> float:
        """Coefficient attached to a given exponent."""
        for e, c in zip(self.exponents, self.coefficients):
            if e == exponent:
                return c
        raise KeyError(f"exponent {exponent} not in fit")


def fit_power_series(h_values, y_values, exponents) -> FitResult:
    """Least-squares fit of y(h) = sum_k c_k h^(e_k).

    Columns are scaled to unit max before solving so widely separated
    exponents (h^-3 against h^-2 at h ~ 0.05) stay well conditioned.
    """
    h = np.asarray(h_values, dtype=float)
    y = np.asarray(y_values, dtype=float)
    exps = tuple(float(e) for e in exponents)
    if h.ndim != 1 or y.shape != h.shape:
        raise ValueError("h_values and y_values must be 1D arrays of equal length")
    if np.any(h <= 0):
        raise ValueError("h values must be positive")
    if len(set(exps)) != len(exps):
        raise ValueError("exponents must be distinct")
    if h.size < len(exps):
        raise ValueError("need at least as many samples as exponents")
    if np.unique(h).size != h.size:
        raise ValueError("h values must be distinct")

    X = np.column_stack([h**e for e in exps])
    scale = np.max(np.abs(X), axis=0)
    Xs = X / scale
    coef_s, _, rank, sv = np.linalg.lstsq(Xs, y, rcond=None)
    warnings = []
    if rank < len(exps):
        warnings.append("rank-deficient design matrix")
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
    if h.max() / h.min() < 2.0:
        warnings.append("h range spans less than a factor 2; fit poorly conditioned")
    coef = coef_s / scale
    resid = y - X @ coef
    return FitResult(
        exponents=exps,
        coefficients=tuple(float(c) for c in coef),
        residual_norm=float(np.sqrt(np.mean(resid**2))),
        condition=cond,
        warnings=tuple(warnings),
    )


def richardson(coarse: float, fine: float, order: int = 2) -> float:
    """Eliminate the leading O(delta^order) error from a halved-step pair."""
    w = 2.0**order
    return (w * fine - coarse) / (w - 1.0)
