"""Finitely supported complex sequences on Z^n.

Filters, signals and subband channels are all the same object: an
immutable map from integer vectors to complex numbers with no stored zeros.
"""
from __future__ import annotations

from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import DimMismatch

__all__ = ["Sequence", "Filter", "Signal", "delta"]


def _key(k, dim):
    if isinstance(k, (int, np.integer)):
        k = (int(k),)
    else:
        k = tuple(int(v) for v in k)
    if dim is not None and len(k) != dim:
        raise DimMismatch(f"index {k} does not have dimension {dim}")
    return k


class Sequence:
    """Immutable finitely supported sequence ``Z^n -> C``.

    >>> s = Sequence({0: 1.0, 1: -1.0})
    >>> s.norm2()
    2.0
    """

    __slots__ = ("dim", "_taps", "_arrays")

    def __init__(self, taps: Mapping | None = None, dim: int | None = None):
        items: dict[tuple[int, ...], complex] = {}
        for k, c in (taps or {}).items():
            kk = _key(k, dim)
            if dim is None:
                dim = len(kk)
            items[kk] = items.get(kk, 0j) + complex(c)
        self.dim = 1 if dim is None else dim
        self._taps = MappingProxyType({k: c for k, c in sorted(items.items()) if c != 0})
        self._arrays = None

    def __reduce__(self):
        return (type(self), (dict(self._taps), self.dim))

    @classmethod
    def from_arrays(cls, keys: np.ndarray, values: np.ndarray, dim: int) -> "Sequence":
        """Build from index rows and values, summing duplicate indices."""
        keys = np.asarray(keys, dtype=np.int64).reshape(-1, dim)
        values = np.asarray(values, dtype=complex).reshape(-1)
        if len(keys) == 0:
            return cls({}, dim=dim)
        uniq, inv = np.unique(keys, axis=0, return_inverse=True)
        acc = np.zeros(len(uniq), dtype=complex)
        np.add.at(acc, inv.reshape(-1), values)
        return cls({tuple(int(v) for v in k): c for k, c in zip(uniq, acc)}, dim=dim)

    @classmethod
    def from_array(cls, values, start: int = 0) -> "Sequence":
        """1-D sequence with ``values[i]`` at index ``start + i``."""
        return cls({start + i: v for i, v in enumerate(np.asarray(values).ravel())}, dim=1)

    @property
    def taps(self) -> Mapping[tuple[int, ...], complex]:
        return self._taps

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``(keys, values)`` as arrays of shape ``(K, dim)`` and ``(K,)``."""
        if self._arrays is None:
            keys = np.array(list(self._taps.keys()), dtype=np.int64).reshape(-1, self.dim)
            vals = np.array(list(self._taps.values()), dtype=complex)
            keys.flags.writeable = False
            vals.flags.writeable = False
            self._arrays = (keys, vals)
        return self._arrays

    def __len__(self) -> int:
        return len(self._taps)

    def __bool__(self) -> bool:
        return bool(self._taps)

    def __iter__(self):
        return iter(self._taps.items())

    def __getitem__(self, k) -> complex:
        return self._taps.get(_key(k, self.dim), 0j)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({dict(self._taps)!r}, dim={self.dim})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sequence):
            return NotImplemented
        return self.dim == other.dim and dict(self._taps) == dict(other._taps)

    __hash__ = None

    def support(self) -> list[tuple[int, ...]]:
        return list(self._taps)

    def bounds(self) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
        """Per-coordinate ``(min, max)`` of the support, or ``None`` if empty."""
        if not self._taps:
            return None
        keys, _ = self.arrays()
        return tuple(int(v) for v in keys.min(axis=0)), tuple(int(v) for v in keys.max(axis=0))

    def is_real(self, tol: float = 0.0) -> bool:
        return all(abs(c.imag) <= tol for c in self._taps.values())

    def norm2(self) -> float:
        return float(sum(abs(c) ** 2 for c in self._taps.values()))

    def inner(self, other: "Sequence") -> complex:
        """``<self, other> = sum conj(self(x)) other(x)``."""
        self._check(other)
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        acc = 0j
        for k in small._taps:
            if k in big._taps:
                acc += self._taps[k].conjugate() * other._taps[k]
        return acc

    def translate(self, t) -> "Sequence":
        """``T_t s : x -> s(x - t)``."""
        t = _key(t, self.dim)
        return type(self)({tuple(a + b for a, b in zip(k, t)): c for k, c in self._taps.items()}, dim=self.dim)

    def tilde(self) -> "Sequence":
        """``x -> conj(s(-x))``."""
        return type(self)({tuple(-a for a in k): c.conjugate() for k, c in self._taps.items()}, dim=self.dim)

    def scale(self, c: complex) -> "Sequence":
        return type(self)({k: v * c for k, v in self._taps.items()}, dim=self.dim)

    def __add__(self, other: "Sequence") -> "Sequence":
        self._check(other)
        out = dict(self._taps)
        for k, c in other._taps.items():
            out[k] = out.get(k, 0j) + c
        return type(self)(out, dim=self.dim)

    def __sub__(self, other: "Sequence") -> "Sequence":
        return self + other.scale(-1)

    def max_abs_diff(self, other: "Sequence") -> float:
        self._check(other)
        keys = set(self._taps) | set(other._taps)
        return max((abs(self[k] - other[k]) for k in keys), default=0.0)

    def to_array(self, start: int, length: int) -> np.ndarray:
        """Dense 1-D window ``[start, start + length)``."""
        if self.dim != 1:
            raise DimMismatch("to_array is only defined for 1-D sequences")
        out = np.zeros(length, dtype=complex)
        for (k,), c in self._taps.items():
            if start <= k < start + length:
                out[k - start] = c
        return out

    def _check(self, other: "Sequence") -> None:
        if other.dim != self.dim:
            raise DimMismatch(f"dimensions {self.dim} and {other.dim} differ")


# Same representation, separate names for readability at call sites.
Filter = Sequence
Signal = Sequence


def delta(at=0, dim: int | None = None) -> Sequence:
    k = _key(at, dim)
    return Sequence({k: 1.0}, dim=len(k))
