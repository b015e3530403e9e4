"""Input checks shared by the estimator and the command line."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from sklearn.utils import check_array

from .errors import DimMismatch, SizeMismatch
from .filterbank import FilterBank
from .lattice import LatticeBasis, as_lattice
from .sequences import Sequence


def check_lattice(lattice) -> LatticeBasis:
    """Coerce an int, nested list or array to a :class:`LatticeBasis`."""
    return as_lattice(lattice)


def check_bank(fb, lattice: LatticeBasis | None = None) -> FilterBank:
    if not isinstance(fb, FilterBank):
        raise TypeError(f"expected a FilterBank, got {type(fb).__name__}")
    if lattice is not None and fb.lattice != lattice:
        raise DimMismatch("filter bank lives on a different lattice")
    return fb


def check_signal_shape(shape, dim: int) -> tuple[int, ...]:
    shape = (shape,) if np.isscalar(shape) else tuple(shape)
    if len(shape) != dim:
        raise DimMismatch(f"signal_shape {shape} has {len(shape)} axes for a {dim}-D lattice")
    if any(int(s) != s or s < 1 for s in shape):
        raise ValueError(f"signal_shape entries must be positive integers, got {shape}")
    return tuple(int(s) for s in shape)


def check_2d(X, n_features: int | None = None, name: str = "X", owner: str = "estimator") -> np.ndarray:
    """2-D finite numeric array; complex input stays complex.

    Real input goes through :func:`sklearn.utils.check_array`, which also
    produces the usual messages for sparse, empty and 1-D data.  Complex
    signals are legitimate here, so they take a separate path.
    """
    if not sp.issparse(X) and np.asarray(X).dtype.kind == "c":
        X = np.asarray(X)
        if X.ndim != 2:
            raise ValueError(f"Expected 2D array, got {X.ndim}D array instead. Reshape your data.")
        if X.size == 0:
            raise ValueError(f"{name} is empty")
        if not np.all(np.isfinite(X)):
            raise ValueError(f"{name} contains NaN or infinity")
    else:
        X = check_array(X, dtype=np.float64, input_name=name)
    if n_features is not None and X.shape[1] != n_features:
        raise SizeMismatch(f"{name} has {X.shape[1]} features, but {owner} is expecting {n_features} features as input")
    return X


def grid_points(shape: tuple[int, ...]) -> np.ndarray:
    """Row-major integer points of the box ``[0, shape)``."""
    return np.indices(shape).reshape(len(shape), -1).T.astype(np.int64)


def signal_from_grid(values: np.ndarray, shape: tuple[int, ...]) -> Sequence:
    return Sequence.from_arrays(grid_points(shape), np.asarray(values).reshape(-1), len(shape))
