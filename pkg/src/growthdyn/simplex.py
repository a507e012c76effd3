"""Probability-simplex points: validated construction, sampling, renormalisation.

Every dynamical system in this package evolves a point of the standard
simplex {p : p_i >= 0, sum_i p_i = 1}. This module owns the validated
point type and the few primitive operations on it; everything else takes
these points (or raw arrays produced from them) as input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstraintError, DegenerateError, DimensionError

__all__ = [
    "Tolerance",
    "SimplexPoint",
    "make_simplex_point",
    "sample_uniform",
    "renormalize",
    "uniform_point",
    "as_point_array",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical slack used when validating and evolving simplex points."""

    sum_tol: float = 1e-9
    pos_tol: float = 1e-12
    conv_tol: float = 1e-8

    def __post_init__(self):
        for name in ("sum_tol", "pos_tol", "conv_tol"):
            if not getattr(self, name) > 0:
                raise ConstraintError(f"{name} must be positive")


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class SimplexPoint:
    """Immutable point of the probability simplex.

    Construction goes through ``make_simplex_point`` (or the samplers below),
    which clamp sub-tolerance negatives and renormalise so that stored
    coordinates satisfy p_i >= 0 and |sum p - 1| <= 1e-12.
    """

    p: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.p, dtype=float)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)

    @property
    def n(self) -> int:
        return self.p.shape[0]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        coords = ", ".join(format(x, ".6g") for x in self.p)
        return f"SimplexPoint({coords})"

    def as_array(self) -> np.ndarray:
        """Writable copy of the coordinates."""
        return np.array(self.p, dtype=float)


def make_simplex_point(raw, tol: Tolerance = DEFAULT_TOLERANCE) -> SimplexPoint:
    """Validate raw coordinates and return a clean simplex point.

    Entries in [-pos_tol, 0) are clamped to zero; the vector is then
    renormalised to unit sum. Anything further from the simplex than the
    tolerances allow raises ConstraintError.
    """
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 1:
        raise DimensionError(f"expected a 1-d vector, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise DimensionError(f"simplex points need at least 2 coordinates, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ConstraintError("coordinates must be finite")
    if np.any(arr < -tol.pos_tol):
        worst = float(arr.min())
        raise ConstraintError(f"coordinate {worst:.3g} below -pos_tol={-tol.pos_tol:.3g}")
    total = float(arr.sum())
    if abs(total - 1.0) > tol.sum_tol:
        raise ConstraintError(f"coordinate sum {total!r} differs from 1 by more than {tol.sum_tol:.3g}")
    clean = np.where(arr < 0.0, 0.0, arr)
    clean = clean / clean.sum()
    return SimplexPoint(clean)


def sample_uniform(n: int, seed: int) -> SimplexPoint:
    """Uniform sample from the simplex via normalised exponential spacings."""
    if n < 2:
        raise DimensionError(f"need n >= 2, got {n}")
    rng = np.random.default_rng(seed)
    gaps = rng.standard_exponential(n)
    return SimplexPoint(gaps / gaps.sum())


def renormalize(values) -> SimplexPoint:
    """Rescale a nonnegative vector to unit sum.

    Raises DegenerateError when the sum is not positive; subnormal but
    nonzero sums still renormalise (no artificial underflow cutoff).
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise DimensionError(f"expected a 1-d vector of length >= 2, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConstraintError("coordinates must be finite")
    if np.any(arr < 0.0):
        raise ConstraintError("renormalize requires nonnegative entries")
    total = float(arr.sum())
    if total <= 0.0:
        raise DegenerateError("cannot renormalize a vector with zero sum")
    return SimplexPoint(arr / total)


def uniform_point(n: int) -> SimplexPoint:
    """The barycentre (1/n, ..., 1/n)."""
    if n < 2:
        raise DimensionError(f"need n >= 2, got {n}")
    return SimplexPoint(np.full(n, 1.0 / n))


def as_point_array(point, n: int | None = None) -> np.ndarray:
    """Coerce a SimplexPoint or array-like to a plain float vector.

    Raw arrays are passed through with only shape checks so that callers
    such as finite-difference Jacobians may probe slightly off-simplex
    points; full simplex validation is the constructor's job.
    """
    arr = point.as_array() if isinstance(point, SimplexPoint) else np.asarray(point, dtype=float)
    if arr.ndim != 1:
        raise DimensionError(f"expected a 1-d vector, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise DimensionError(f"expected {n} coordinates, got {arr.shape[0]}")
    return arr
