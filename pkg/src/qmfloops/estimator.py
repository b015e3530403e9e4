"""scikit-learn style wrapper: one QMF analysis step on fixed-size signals.

Each row of ``X`` is a signal sampled on the box ``[0, signal_shape)`` of
``Z^n``.  ``transform`` returns the subband coefficients that such signals
can touch, channel after channel; ``inverse_transform`` synthesizes and crops
back to the box.  Because the analysis is an isometry, the round trip is
exact up to rounding.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .factorize import random_qmf
from .filterbank import DEFAULT_TOL, FilterBank, haar_bank, lazy_bank
from .sequences import Sequence
from .transform import analysis
from .validation import check_2d, check_bank, check_lattice, check_signal_shape, grid_points


class QMFTransformer(TransformerMixin, BaseEstimator):
    """Analysis with a QMF filter bank as a fitted linear map.

    Parameters
    ----------
    lattice : int or array-like, default=2
        Basis of the decimation lattice.
    bank : {"haar", "lazy", "random"} or FilterBank, default="haar"
    n_steps : int, default=3
        Number of elementary steps when ``bank="random"``.
    real_only : bool, default=True
        Real orthogonal steps for ``bank="random"``.
    random_state : int or None
        Seed for ``bank="random"``.
    signal_shape : int or tuple, optional
        Box shape of one sample.  Defaults to ``n_features`` for 1-D lattices.
    tol : float, default=1e-10
        QMF verification tolerance.

    Attributes
    ----------
    bank_ : FilterBank
    coef_points_ : list of ndarray
        Gamma-coordinates of the output columns, one array per channel.
    components_ : ndarray of shape (n_outputs, n_features)
        Dense analysis matrix.
    """

    def __init__(self, lattice=2, bank="haar", n_steps=3, real_only=True, random_state=None, signal_shape=None, tol=DEFAULT_TOL):
        self.lattice = lattice
        self.bank = bank
        self.n_steps = n_steps
        self.real_only = real_only
        self.random_state = random_state
        self.signal_shape = signal_shape
        self.tol = tol

    def _make_bank(self, lattice):
        if isinstance(self.bank, FilterBank):
            return check_bank(self.bank, lattice)
        if self.bank == "haar":
            return haar_bank(lattice)
        if self.bank == "lazy":
            return lazy_bank(lattice)
        if self.bank == "random":
            return random_qmf(lattice, self.n_steps, seed=self.random_state, real_only=self.real_only)
        raise ValueError(f"unknown bank {self.bank!r}")

    def fit(self, X, y=None):
        X = check_2d(X)
        lattice = check_lattice(self.lattice)
        if self.signal_shape is None:
            if lattice.dim != 1:
                raise ValueError("signal_shape is required for lattices of dimension > 1")
            shape = (X.shape[1],)
        else:
            shape = check_signal_shape(self.signal_shape, lattice.dim)
        if int(np.prod(shape)) != X.shape[1]:
            raise ValueError(f"signal_shape {shape} holds {int(np.prod(shape))} samples, X has {X.shape[1]} features")
        fb = self._make_bank(lattice)
        fb.check_qmf(self.tol)

        # one analysis per grid delta gives the columns of the dense map
        pts = grid_points(shape)
        cols = [analysis(fb, Sequence({tuple(p): 1.0}, dim=lattice.dim)) for p in pts]
        points, rows = [], []
        for k in range(fb.size):
            keys = sorted({m for c in cols for m in c.channels[k].taps})
            where = {m: i for i, m in enumerate(keys)}
            block = np.zeros((len(keys), len(pts)), dtype=complex)
            for j, c in enumerate(cols):
                for m, v in c.channels[k].taps.items():
                    block[where[m], j] = v
            points.append(np.array(keys, dtype=np.int64).reshape(-1, lattice.dim))
            rows.append(block)
        comp = np.vstack(rows)
        if fb.is_real():
            comp = comp.real

        self.bank_ = fb
        self.signal_shape_ = shape
        self.coef_points_ = points
        self.components_ = comp
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = check_2d(X, self.n_features_in_, owner=type(self).__name__)
        return X @ self.components_.T

    def inverse_transform(self, Y):
        check_is_fitted(self, "components_")
        Y = check_2d(Y, self.components_.shape[0], name="Y", owner=type(self).__name__)
        return Y @ self.components_.conj()

    def channel_slices(self) -> list[slice]:
        """Column ranges of each channel in the transformed output."""
        check_is_fitted(self, "coef_points_")
        out, start = [], 0
        for p in self.coef_points_:
            out.append(slice(start, start + len(p)))
            start += len(p)
        return out
