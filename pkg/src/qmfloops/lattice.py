"""Integer lattices Gamma in Z^n, their quotient groups and dual quotients.

A lattice is given by an integer basis matrix whose *columns* generate
Gamma.  Everything here is exact integer / rational arithmetic; floats only
appear when a caller asks for frequencies in radians.

Canonical coset representatives come from a Hermite form of the basis that
is upper triangular (column ``j`` vanishes below row ``j``).  Reduction then
proceeds from the last coordinate to the first, and the representatives are
the box ``0 <= x_i < d_i`` where ``d_i`` are the Hermite pivots.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimMismatch, DomainNotFundamental, UnknownLabel, ZeroDeterminant

__all__ = [
    "LatticeBasis",
    "CosetSystem",
    "DualCosetSystem",
    "as_lattice",
    "index",
    "coset_representatives",
    "dual_coset_representatives",
    "reduce",
    "permutation_representation",
]

IntVector = tuple[int, ...]


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _bareiss_det(rows: list[list[int]]) -> int:
    m = [list(r) for r in rows]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for p in range(k + 1, n):
                if m[p][k] != 0:
                    m[k], m[p] = m[p], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _upper_hermite(rows: list[list[int]]) -> list[list[int]]:
    """Column-operation Hermite form: upper triangular, positive diagonal."""
    h = [list(r) for r in rows]
    n = len(h)

    def combine(i: int, j: int, a: int, b: int, c: int, d: int) -> None:
        # (col_i, col_j) <- (a*col_i + b*col_j, c*col_i + d*col_j), ad - bc = 1
        for r in range(n):
            hi, hj = h[r][i], h[r][j]
            h[r][i] = a * hi + b * hj
            h[r][j] = c * hi + d * hj

    for i in range(n - 1, -1, -1):
        for j in range(i):
            a, b = h[i][i], h[i][j]
            if b == 0:
                continue
            g, x, y = _ext_gcd(a, b)
            combine(i, j, x, y, -b // g, a // g)
        if h[i][i] == 0:
            raise ZeroDeterminant("lattice basis is singular")
        if h[i][i] < 0:
            for r in range(n):
                h[r][i] = -h[r][i]
    return h


class LatticeBasis:
    """Full-rank sublattice of Z^n generated by the columns of ``basis``.

    >>> LatticeBasis([[1, 1], [1, -1]]).index()
    2
    """

    __slots__ = ("dim", "basis", "det", "_adj", "_hermite", "_pivots")

    def __init__(self, basis):
        arr = np.asarray(basis)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DimMismatch(f"basis must be a non-empty square matrix, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.all(np.equal(np.mod(arr, 1), 0)):
                raise ValueError("lattice basis must have integer entries")
        rows = [[int(v) for v in row] for row in arr.tolist()]
        n = len(rows)
        det = _bareiss_det(rows)
        if det == 0:
            raise ZeroDeterminant("lattice basis is singular")
        self.dim = n
        self.basis = tuple(tuple(r) for r in rows)
        self.det = det
        self._hermite = _upper_hermite(rows)
        self._pivots = tuple(self._hermite[i][i] for i in range(n))
        # adjugate = det * inverse, exact integers
        inv = _fraction_inverse(rows)
        self._adj = tuple(tuple(int(v * det) for v in r) for r in inv)

    def __repr__(self) -> str:
        return f"LatticeBasis({[list(r) for r in self.basis]})"

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticeBasis) and self.basis == other.basis

    def __hash__(self) -> int:
        return hash(self.basis)

    def index(self) -> int:
        """Number of cosets ``|Z^n / Gamma| = |det(basis)|``."""
        return abs(self.det)

    def matrix(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.int64)

    def transpose(self) -> "LatticeBasis":
        return LatticeBasis([list(c) for c in zip(*self.basis)])

    @property
    def pivots(self) -> IntVector:
        """Diagonal of the Hermite form; the canonical residues form the box below it."""
        return self._pivots

    def contains(self, x: Sequence[int]) -> bool:
        return self.coordinates(x, strict=False) is not None

    def coordinates(self, x: Sequence[int], strict: bool = True):
        """Integer vector ``m`` with ``basis @ m == x``.

        Returns ``None`` (or raises ``ValueError`` when ``strict``) if ``x`` is
        not a lattice vector.
        """
        x = _as_vec(x, self.dim)
        out = []
        for row in self._adj:
            num = sum(a * b for a, b in zip(row, x))
            q, r = divmod(num, self.det)
            if r:
                if strict:
                    raise ValueError(f"{x} is not in the lattice")
                return None
            out.append(q)
        return tuple(out)

    def point(self, m: Sequence[int]) -> IntVector:
        """Lattice vector ``basis @ m``."""
        m = _as_vec(m, self.dim)
        return tuple(sum(b * c for b, c in zip(row, m)) for row in self.basis)

    def coordinates_many(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized :meth:`coordinates` returning ``(in_lattice_mask, coords)``."""
        pts = np.asarray(pts, dtype=np.int64).reshape(-1, self.dim)
        num = pts @ np.array(self._adj, dtype=np.int64).T
        mask = np.all(num % self.det == 0, axis=1)
        return mask, num // self.det

    def reduce_canonical(self, x: Sequence[int]) -> tuple[IntVector, IntVector]:
        """Split ``x = rep + gamma`` with ``rep`` in the canonical box."""
        x = list(_as_vec(x, self.dim))
        h = self._hermite
        gamma = [0] * self.dim
        for j in range(self.dim - 1, -1, -1):
            q = x[j] // h[j][j]
            if q:
                for r in range(self.dim):
                    x[r] -= q * h[r][j]
                    gamma[r] += q * h[r][j]
        return tuple(x), tuple(gamma)

    def reduce_canonical_many(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = np.array(pts, dtype=np.int64).reshape(-1, self.dim)
        orig = x.copy()
        h = np.array(self._hermite, dtype=np.int64)
        for j in range(self.dim - 1, -1, -1):
            q = np.floor_divide(x[:, j], h[j, j])
            x -= q[:, None] * h[:, j][None, :]
        return x, orig - x


def _as_vec(x, dim: int) -> IntVector:
    if isinstance(x, (int, np.integer)):
        t = (int(x),)
    else:
        t = tuple(int(v) for v in x)
    if len(t) != dim:
        raise DimMismatch(f"expected a vector of length {dim}, got {len(t)}")
    return t


def _fraction_inverse(rows: list[list[int]]) -> list[list[Fraction]]:
    n = len(rows)
    a = [[Fraction(v) for v in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [v / piv for v in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [vr - f * vc for vr, vc in zip(a[r], a[c])]
    return [r[n:] for r in a]


def as_lattice(obj) -> LatticeBasis:
    """Coerce an int, nested list, array or :class:`LatticeBasis`."""
    if isinstance(obj, LatticeBasis):
        return obj
    return LatticeBasis(obj)


def index(b: LatticeBasis) -> int:
    return as_lattice(b).index()


class CosetSystem:
    """A fundamental domain of ``Gamma``: one integer point per residue class.

    Built with ``reps=None`` it is the canonical system; any other list of
    ``N`` pairwise non-congruent points is accepted as well.  The group law
    of ``Z^n / Gamma`` on labels is tabulated once as ``table``.
    """

    __slots__ = ("lattice", "reps", "table", "_class_of", "_canon")

    def __init__(self, lattice, reps: Iterable[Sequence[int]] | None = None):
        lattice = as_lattice(lattice)
        self.lattice = lattice
        boxes = [range(p) for p in lattice.pivots]
        canon = [tuple(c) for c in itertools.product(*boxes)]
        self._canon = {c: i for i, c in enumerate(canon)}
        if reps is None:
            reps = canon
        reps = tuple(_as_vec(r, lattice.dim) for r in reps)
        if len(reps) != lattice.index():
            raise DomainNotFundamental(f"need {lattice.index()} points, got {len(reps)}")
        class_of = {}
        for label, r in enumerate(reps):
            c = self._canon[lattice.reduce_canonical(r)[0]]
            if c in class_of:
                raise DomainNotFundamental(f"points {reps[class_of[c]]} and {r} are congruent")
            class_of[c] = label
        self.reps: tuple[IntVector, ...] = reps
        self._class_of = tuple(class_of[c] for c in range(len(canon)))
        n = len(reps)
        self.table = tuple(
            tuple(self.label_of(tuple(a + b for a, b in zip(reps[i], reps[j]))) for j in range(n))
            for i in range(n)
        )

    def __len__(self) -> int:
        return len(self.reps)

    def __repr__(self) -> str:
        return f"CosetSystem({self.lattice!r}, reps={list(self.reps)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, CosetSystem) and self.lattice == other.lattice and self.reps == other.reps

    def __hash__(self) -> int:
        return hash((self.lattice, self.reps))

    @property
    def is_canonical(self) -> bool:
        return self.reps == tuple(self._canon)

    def label_of(self, x: Sequence[int]) -> int:
        canon, _ = self.lattice.reduce_canonical(x)
        return self._class_of[self._canon[canon]]

    def reduce(self, x: Sequence[int]) -> tuple[IntVector, IntVector]:
        """``x = rep + gamma`` with ``rep`` in this system and ``gamma`` in Gamma."""
        x = _as_vec(x, self.lattice.dim)
        rep = self.reps[self.label_of(x)]
        return rep, tuple(a - b for a, b in zip(x, rep))

    def reduce_many(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized :meth:`reduce` returning ``(labels, gammas)``."""
        pts = np.asarray(pts, dtype=np.int64).reshape(-1, self.lattice.dim)
        canon, _ = self.lattice.reduce_canonical_many(pts)
        flat = np.zeros(len(pts), dtype=np.int64)
        for p, col in zip(self.lattice.pivots, canon.T):
            flat = flat * p + col
        labels = np.asarray(self._class_of, dtype=np.int64)[flat]
        reps = np.asarray(self.reps, dtype=np.int64).reshape(-1, self.lattice.dim)
        return labels, pts - reps[labels]

    def shifted(self, offset: Sequence[int]) -> "CosetSystem":
        """The translated fundamental domain ``F + offset``, same ordering."""
        offset = _as_vec(offset, self.lattice.dim)
        return CosetSystem(self.lattice, [tuple(a + b for a, b in zip(r, offset)) for r in self.reps])


class DualCosetSystem:
    """Representatives of ``Gamma^perp / 2 pi Z^n``.

    Each frequency is stored exactly as ``xi / (2 pi)``: a tuple of
    :class:`~fractions.Fraction` in ``[0, 1)`` whose denominators divide
    ``|det|``.  Label 0 is always the zero frequency.
    """

    __slots__ = ("lattice", "freqs", "denominator", "table", "_label")

    def __init__(self, lattice):
        lattice = as_lattice(lattice)
        self.lattice = lattice
        bt = lattice.transpose()
        d = lattice.index()
        # (B^T)^{-1} m = adj(B^T) m / det
        adj_t = bt._adj
        freqs = []
        for m in CosetSystem(bt).reps:
            freqs.append(tuple(Fraction(sum(a * b for a, b in zip(row, m)), bt.det) % 1 for row in adj_t))
        self.freqs: tuple[tuple[Fraction, ...], ...] = tuple(freqs)
        self.denominator = d
        self._label = {f: i for i, f in enumerate(self.freqs)}
        n = len(freqs)
        self.table = tuple(tuple(self.label_of(_add_mod1(freqs[i], freqs[j])) for j in range(n)) for i in range(n))

    def __len__(self) -> int:
        return len(self.freqs)

    def __repr__(self) -> str:
        return f"DualCosetSystem({self.lattice!r})"

    def label_of(self, xi: Sequence) -> int:
        key = tuple(Fraction(v) % 1 for v in xi)
        try:
            return self._label[key]
        except KeyError:
            raise UnknownLabel(f"{xi} is not a dual coset representative") from None

    @property
    def numerators(self) -> tuple[IntVector, ...]:
        d = self.denominator
        return tuple(tuple(int(v * d) for v in f) for f in self.freqs)

    def radians(self, label: int) -> np.ndarray:
        return 2 * np.pi * np.array([float(v) for v in self.freqs[label]])

    def negate(self, label: int) -> int:
        return self.label_of(tuple(-v for v in self.freqs[label]))


def _add_mod1(a, b):
    return tuple((x + y) % 1 for x, y in zip(a, b))


def coset_representatives(b) -> CosetSystem:
    return CosetSystem(as_lattice(b))


def dual_coset_representatives(b) -> DualCosetSystem:
    return DualCosetSystem(as_lattice(b))


def reduce(x, c: CosetSystem) -> tuple[IntVector, IntVector]:
    return c.reduce(x)


def permutation_representation(rho, d: DualCosetSystem) -> np.ndarray:
    """Permutation matrix ``R(rho)`` with ``R[w, x] = 1`` iff ``w == x + rho``.

    ``rho`` is a dual label (int) or an exact frequency tuple.
    """
    if isinstance(rho, (int, np.integer)):
        if not 0 <= rho < len(d):
            raise UnknownLabel(f"dual label {rho} out of range")
        label = int(rho)
    else:
        label = d.label_of(rho)
    n = len(d)
    r = np.zeros((n, n), dtype=np.int64)
    for x in range(n):
        r[d.table[x][label], x] = 1
    return r
