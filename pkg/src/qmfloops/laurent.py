"""Multivariate Laurent polynomials and matrices of them (polynomial loops).

A :class:`LaurentPoly` is a finite sum ``p(w) = sum_k c_k exp(i <k, w>)``
over exponent vectors ``k`` in Z^n.  Exponents are exact; coefficients are
complex doubles.  After every arithmetic operation coefficients whose
magnitude is at most ``prune`` (default :data:`DEFAULT_PRUNE`) are dropped,
which keeps the representation in normal form.

A :class:`LoopMatrix` is an ``N x N`` grid of such polynomials; evaluated at
a point of the torus it gives an ordinary complex matrix.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimMismatch, SizeMismatch
from .lattice import DualCosetSystem, LatticeBasis, as_lattice

__all__ = [
    "DEFAULT_PRUNE",
    "LaurentPoly",
    "LoopMatrix",
    "ParaunitaryReport",
    "root_of_unity",
    "para_adjoint",
    "matmul",
    "is_paraunitary",
    "shift_periodicity",
    "is_gamma_periodic",
    "periodize",
    "deperiodize",
]

DEFAULT_PRUNE = 1e-14

Exponent = tuple[int, ...]


def root_of_unity(r: Fraction) -> complex:
    """``exp(2 pi i r)`` for rational ``r``, exact at quarter turns."""
    r = Fraction(r) % 1
    if r == 0:
        return 1 + 0j
    if r == Fraction(1, 2):
        return -1 + 0j
    if r == Fraction(1, 4):
        return 1j
    if r == Fraction(3, 4):
        return -1j
    if r > Fraction(1, 2):
        r -= 1
    return cmath.exp(2j * math.pi * float(r))


def _key(k, dim: int | None) -> Exponent:
    if isinstance(k, (int, np.integer)):
        k = (int(k),)
    else:
        k = tuple(int(v) for v in k)
    if dim is not None and len(k) != dim:
        raise DimMismatch(f"exponent {k} does not have dimension {dim}")
    return k


class LaurentPoly:
    """Immutable finite exponential sum.

    >>> p = LaurentPoly({1: 1.0, -1: 1.0})
    >>> p.scale(0.5)(np.array([0.0]))
    (1+0j)
    """

    __slots__ = ("dim", "_terms")

    def __init__(self, terms: Mapping | None = None, dim: int | None = None, prune: float = DEFAULT_PRUNE):
        items: dict[Exponent, complex] = {}
        for k, c in (terms or {}).items():
            kk = _key(k, dim)
            if dim is None:
                dim = len(kk)
            items[kk] = items.get(kk, 0j) + complex(c)
        if dim is None:
            dim = 1
        self.dim = dim
        self._terms = MappingProxyType({k: c for k, c in items.items() if abs(c) > prune})

    def __reduce__(self):
        return (type(self), (dict(self._terms), self.dim, 0.0))

    @classmethod
    def _raw(cls, terms: dict, dim: int, prune: float = DEFAULT_PRUNE) -> "LaurentPoly":
        obj = object.__new__(cls)
        obj.dim = dim
        obj._terms = MappingProxyType({k: c for k, c in terms.items() if abs(c) > prune})
        return obj

    @classmethod
    def constant(cls, c: complex, dim: int = 1) -> "LaurentPoly":
        return cls._raw({(0,) * dim: complex(c)}, dim, prune=0.0)

    @classmethod
    def monomial(cls, k, c: complex = 1.0, dim: int | None = None) -> "LaurentPoly":
        k = _key(k, dim)
        return cls._raw({k: complex(c)}, len(k), prune=0.0)

    @classmethod
    def zero(cls, dim: int = 1) -> "LaurentPoly":
        return cls._raw({}, dim)

    @property
    def terms(self) -> Mapping[Exponent, complex]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __iter__(self):
        return iter(sorted(self._terms.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {c!r}" for k, c in sorted(self._terms.items()))
        return f"LaurentPoly({{{body}}}, dim={self.dim})"

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, float, complex)):
            other = LaurentPoly.constant(other, self.dim)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.dim == other.dim and dict(self._terms) == dict(other._terms)

    __hash__ = None

    def coefficient(self, k) -> complex:
        return self._terms.get(_key(k, self.dim), 0j)

    def max_abs(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def _check(self, other: "LaurentPoly") -> None:
        if not isinstance(other, LaurentPoly):
            raise TypeError(f"expected LaurentPoly, got {type(other).__name__}")
        if other.dim != self.dim:
            raise DimMismatch(f"dimensions {self.dim} and {other.dim} differ")

    def add(self, other: "LaurentPoly", prune: float = DEFAULT_PRUNE) -> "LaurentPoly":
        self._check(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0j) + c
        return LaurentPoly._raw(out, self.dim, prune)

    def sub(self, other: "LaurentPoly", prune: float = DEFAULT_PRUNE) -> "LaurentPoly":
        self._check(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0j) - c
        return LaurentPoly._raw(out, self.dim, prune)

    def scale(self, c: complex, prune: float = DEFAULT_PRUNE) -> "LaurentPoly":
        c = complex(c)
        return LaurentPoly._raw({k: v * c for k, v in self._terms.items()}, self.dim, prune)

    def mul(self, other: "LaurentPoly", prune: float = DEFAULT_PRUNE) -> "LaurentPoly":
        self._check(other)
        out: dict[Exponent, complex] = {}
        # sorted iteration keeps the floating summation order reproducible
        for ka, ca in sorted(self._terms.items()):
            for kb, cb in sorted(other._terms.items()):
                k = tuple(a + b for a, b in zip(ka, kb))
                out[k] = out.get(k, 0j) + ca * cb
        return LaurentPoly._raw(out, self.dim, prune)

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.sub(other)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            return self.mul(other)
        return self.scale(other)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1)

    def conj(self) -> "LaurentPoly":
        """Pointwise complex conjugate: ``k -> -k`` and ``c -> conj(c)``."""
        return LaurentPoly._raw(
            {tuple(-v for v in k): c.conjugate() for k, c in self._terms.items()}, self.dim, prune=0.0
        )

    def shift(self, xi: Sequence) -> "LaurentPoly":
        """``w -> p(w + 2 pi xi)`` for an exact rational vector ``xi``."""
        xi = tuple(Fraction(v) for v in xi)
        if len(xi) != self.dim:
            raise DimMismatch(f"shift of dimension {len(xi)} for a dim {self.dim} polynomial")
        return LaurentPoly._raw(
            {k: c * root_of_unity(sum(a * b for a, b in zip(k, xi))) for k, c in self._terms.items()},
            self.dim,
            prune=0.0,
        )

    def substitute(self, matrix) -> "LaurentPoly":
        """Linear exponent substitution ``k -> matrix @ k``."""
        a = np.asarray(matrix, dtype=np.int64)
        out: dict[Exponent, complex] = {}
        for k, c in self._terms.items():
            nk = tuple(int(v) for v in a @ np.array(k, dtype=np.int64))
            out[nk] = out.get(nk, 0j) + c
        return LaurentPoly._raw(out, a.shape[0], prune=0.0)

    def __call__(self, omega) -> complex:
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        if omega.shape != (self.dim,):
            raise DimMismatch(f"evaluation point must have shape ({self.dim},)")
        if not self._terms:
            return 0j
        ks = np.array(list(self._terms.keys()), dtype=float)
        cs = np.array(list(self._terms.values()), dtype=complex)
        return complex(np.sum(cs * np.exp(1j * (ks @ omega))))


class LoopMatrix:
    """Immutable ``N x N`` matrix of :class:`LaurentPoly` sharing one ``dim``."""

    __slots__ = ("dim", "size", "entries")

    def __init__(self, entries: Iterable[Iterable[LaurentPoly]]):
        rows = tuple(tuple(r) for r in entries)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise SizeMismatch("loop matrices must be square and non-empty")
        dims = {p.dim for r in rows for p in r}
        if len(dims) != 1:
            raise DimMismatch(f"entries have mixed dimensions {sorted(dims)}")
        self.entries = rows
        self.size = n
        self.dim = dims.pop()

    @classmethod
    def identity(cls, n: int, dim: int = 1) -> "LoopMatrix":
        one, zero = LaurentPoly.constant(1, dim), LaurentPoly.zero(dim)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def constant(cls, matrix, dim: int = 1) -> "LoopMatrix":
        m = np.asarray(matrix, dtype=complex)
        return cls([[LaurentPoly({(0,) * dim: v}, dim, prune=0.0) for v in row] for row in m])

    def __getitem__(self, ij) -> LaurentPoly:
        i, j = ij
        return self.entries[i][j]

    def __repr__(self) -> str:
        return f"LoopMatrix(size={self.size}, dim={self.dim}, terms={self.num_terms()})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, LoopMatrix):
            return NotImplemented
        return self.entries == other.entries

    __hash__ = None

    def num_terms(self) -> int:
        return sum(len(p) for r in self.entries for p in r)

    def exponents(self) -> set[Exponent]:
        return {k for r in self.entries for p in r for k in p.terms}

    def map(self, fn) -> "LoopMatrix":
        return LoopMatrix([[fn(p) for p in r] for r in self.entries])

    def transpose(self) -> "LoopMatrix":
        return LoopMatrix(list(zip(*self.entries)))

    def conj(self) -> "LoopMatrix":
        """Entrywise pointwise conjugate (no transpose)."""
        return self.map(LaurentPoly.conj)

    def para_adjoint(self) -> "LoopMatrix":
        return self.conj().transpose()

    def __add__(self, other: "LoopMatrix") -> "LoopMatrix":
        _check_pair(self, other)
        return LoopMatrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __sub__(self, other: "LoopMatrix") -> "LoopMatrix":
        _check_pair(self, other)
        return LoopMatrix([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __matmul__(self, other: "LoopMatrix") -> "LoopMatrix":
        return matmul(self, other)

    def scale(self, c: complex) -> "LoopMatrix":
        return self.map(lambda p: p.scale(c))

    def shift(self, xi: Sequence) -> "LoopMatrix":
        return self.map(lambda p: p.shift(xi))

    def substitute(self, matrix) -> "LoopMatrix":
        return self.map(lambda p: p.substitute(matrix))

    def permute(self, left: np.ndarray, right: np.ndarray) -> "LoopMatrix":
        """``left @ self @ right`` for permutation matrices (exact reindexing)."""
        rows = [int(np.flatnonzero(r)[0]) for r in np.asarray(left)]
        cols = [int(np.flatnonzero(c)[0]) for c in np.asarray(right).T]
        return LoopMatrix([[self.entries[rows[i]][cols[j]] for j in range(self.size)] for i in range(self.size)])

    def max_abs_diff(self, other: "LoopMatrix") -> float:
        _check_pair(self, other)
        d = 0.0
        for ra, rb in zip(self.entries, other.entries):
            for a, b in zip(ra, rb):
                d = max(d, a.sub(b, prune=0.0).max_abs())
        return d

    def eval(self, omega) -> np.ndarray:
        return np.array([[p(omega) for p in r] for r in self.entries], dtype=complex)

    __call__ = eval


def _check_pair(a: LoopMatrix, b: LoopMatrix) -> None:
    if a.dim != b.dim:
        raise DimMismatch(f"dimensions {a.dim} and {b.dim} differ")
    if a.size != b.size:
        raise SizeMismatch(f"sizes {a.size} and {b.size} differ")


def para_adjoint(m: LoopMatrix) -> LoopMatrix:
    return m.para_adjoint()


def matmul(a: LoopMatrix, b: LoopMatrix, prune: float = DEFAULT_PRUNE) -> LoopMatrix:
    _check_pair(a, b)
    n = a.size
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc: dict[Exponent, complex] = {}
            for l in range(n):
                pa, pb = a.entries[i][l], b.entries[l][j]
                for ka, ca in sorted(pa.terms.items()):
                    for kb, cb in sorted(pb.terms.items()):
                        k = tuple(x + y for x, y in zip(ka, kb))
                        acc[k] = acc.get(k, 0j) + ca * cb
            row.append(LaurentPoly._raw(acc, a.dim, prune))
        out.append(row)
    return LoopMatrix(out)


@dataclass(frozen=True)
class ParaunitaryReport:
    """Outcome of :func:`is_paraunitary`; truthy iff the check passed."""

    ok: bool
    residual: float
    entry: tuple[int, int] | None = None
    exponent: Exponent | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_paraunitary(m: LoopMatrix, tol: float = 1e-10) -> ParaunitaryReport:
    """Check ``m @ para_adjoint(m) == I`` coefficient by coefficient."""
    prod = matmul(m, m.para_adjoint(), prune=0.0)
    worst, where, expo = 0.0, None, None
    zero = (0,) * m.dim
    for i in range(m.size):
        for j in range(m.size):
            p = prod.entries[i][j]
            terms = dict(p.terms)
            if i == j:
                terms[zero] = terms.get(zero, 0j) - 1
            for k, c in sorted(terms.items()):
                if abs(c) > worst:
                    worst, where, expo = abs(c), (i, j), k
    return ParaunitaryReport(worst <= tol, worst, where, expo)


def shift_periodicity(m: LoopMatrix, xi: Sequence) -> LoopMatrix:
    """``w -> m(w + 2 pi xi)`` with ``xi`` an exact rational vector."""
    return m.shift(xi)


def is_gamma_periodic(m: LoopMatrix, d: DualCosetSystem | LatticeBasis, tol: float = DEFAULT_PRUNE) -> bool:
    """True iff every exponent with a coefficient above ``tol`` lies in Gamma."""
    lattice = d.lattice if isinstance(d, DualCosetSystem) else as_lattice(d)
    if lattice.dim != m.dim:
        raise DimMismatch(f"lattice dimension {lattice.dim} vs loop dimension {m.dim}")
    for row in m.entries:
        for p in row:
            for k, c in p.terms.items():
                if abs(c) > tol and not lattice.contains(k):
                    return False
    return True


def periodize(m: LoopMatrix, lattice) -> LoopMatrix:
    """Map a loop onto a Gamma^perp-periodic one: ``k -> basis @ k``."""
    lattice = as_lattice(lattice)
    return m.substitute(lattice.matrix())


def deperiodize(m: LoopMatrix, lattice) -> LoopMatrix:
    """Inverse of :func:`periodize`; every exponent must already lie in Gamma."""
    lattice = as_lattice(lattice)

    def back(p: LaurentPoly) -> LaurentPoly:
        return LaurentPoly._raw({lattice.coordinates(k): c for k, c in p.terms.items()}, p.dim, prune=0.0)

    return m.map(back)
