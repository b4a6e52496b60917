"""Input validation helpers shared by the estimator API and the CLI."""

from __future__ import annotations

import numpy as np

from .model import Instance
from .multilinear import check_fractional_point  # re-exported for convenience

__all__ = ["check_instance", "check_fractional_point", "check_seed", "check_probabilities"]


def check_instance(instance) -> Instance:
    """Accept an Instance (or an instance document dict) and validate it."""
    if isinstance(instance, Instance):
        return instance
    if isinstance(instance, dict):
        from .serialization import instance_from_dict

        return instance_from_dict(instance)
    raise TypeError(
        f"expected an Instance or an instance document dict, got {type(instance).__name__}"
    )


def check_seed(seed) -> int:
    if seed is None:
        return 0
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    return seed


def check_probabilities(p, *, total=1.0, tol=1e-9) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if (p < -tol).any():
        raise ValueError("probabilities must be nonnegative")
    if abs(p.sum() - total) > tol:
        raise ValueError(f"probabilities sum to {p.sum()!r}, expected {total}")
    return np.clip(p, 0.0, None)
