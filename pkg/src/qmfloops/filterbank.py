"""QMF systems and their polyphase (QMF) matrices.

Fourier convention: ``fourier(f)(w) = sum_m f(m) exp(-i <w, m>)``, so the tap
at ``m`` becomes the coefficient of exponent ``-m``.  The exponential matrix
of :func:`f_matrix` uses the opposite sign ``exp(+i <w + xi, k>)``.

Row ``k`` of a :class:`QmfMatrix` follows the order of ``bank.cosets``;
column ``xi`` follows ``bank.dual``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence as Seq

import numpy as np

from .errors import DimMismatch, DimUnsupported, NotParaunitary, SizeMismatch
from .lattice import CosetSystem, DualCosetSystem, as_lattice, permutation_representation
from .laurent import (
    LaurentPoly,
    LoopMatrix,
    ParaunitaryReport,
    is_gamma_periodic,
    is_paraunitary,
    matmul,
    root_of_unity,
)
from .sequences import Sequence

__all__ = [
    "DEFAULT_TOL",
    "FilterBank",
    "QmfMatrix",
    "QmfReport",
    "FactorVerdict",
    "lazy_bank",
    "haar_bank",
    "fourier",
    "qmf_matrix",
    "is_qmf",
    "power_complementarity",
    "loop_from_qmf",
    "f_matrix",
    "is_twisted",
    "coset_factor",
    "twisted_factor",
    "vanishing_moments",
    "prefilters_1d",
    "bank_from_prefilters_1d",
]

DEFAULT_TOL = 1e-10


class FilterBank:
    """``N`` filters indexed by the coset representatives of a lattice."""

    __slots__ = ("lattice", "cosets", "dual", "filters", "_qmf_cache")

    def __init__(self, lattice, filters: Seq[Sequence], cosets: CosetSystem | None = None):
        lattice = as_lattice(lattice)
        if cosets is None:
            cosets = CosetSystem(lattice)
        elif cosets.lattice != lattice:
            raise ValueError("coset system belongs to a different lattice")
        filters = tuple(f if isinstance(f, Sequence) else Sequence(f, dim=lattice.dim) for f in filters)
        if len(filters) != lattice.index():
            raise SizeMismatch(f"lattice of index {lattice.index()} needs that many filters, got {len(filters)}")
        for f in filters:
            if f.dim != lattice.dim:
                raise DimMismatch(f"filter of dimension {f.dim} on a {lattice.dim}-D lattice")
        self.lattice = lattice
        self.cosets = cosets
        self.dual = DualCosetSystem(lattice)
        self.filters = filters
        self._qmf_cache: dict[float, "QmfReport"] = {}

    @property
    def size(self) -> int:
        return len(self.filters)

    @property
    def dim(self) -> int:
        return self.lattice.dim

    def __repr__(self) -> str:
        return f"FilterBank({self.lattice!r}, taps={[len(f) for f in self.filters]})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, FilterBank):
            return NotImplemented
        return self.cosets == other.cosets and self.filters == other.filters

    __hash__ = None

    def with_filters(self, filters: Seq[Sequence]) -> "FilterBank":
        return FilterBank(self.lattice, filters, self.cosets)

    def translate(self, t) -> "FilterBank":
        return self.with_filters([f.translate(t) for f in self.filters])

    def canonical(self) -> "FilterBank":
        """Same commuting unitary, re-expressed on the canonical domain.

        The filter attached to canonical rep ``c`` is ``T_gamma phi_k`` where
        ``c = rep_k + gamma``.
        """
        if self.cosets.is_canonical:
            return self
        target = CosetSystem(self.lattice)
        filters = []
        for c in target.reps:
            k = self.cosets.label_of(c)
            gamma = tuple(a - b for a, b in zip(c, self.cosets.reps[k]))
            filters.append(self.filters[k].translate(gamma))
        return FilterBank(self.lattice, filters, target)

    def max_abs_diff(self, other: "FilterBank") -> float:
        return max(a.max_abs_diff(b) for a, b in zip(self.filters, other.filters))

    def is_real(self, tol: float = 0.0) -> bool:
        return all(f.is_real(tol) for f in self.filters)

    def check_qmf(self, tol: float = DEFAULT_TOL) -> "QmfReport":
        """Cached :func:`is_qmf`; raises :class:`NotParaunitary` on failure."""
        rep = self._qmf_cache.get(tol)
        if rep is None:
            rep = is_qmf(self, tol)
            self._qmf_cache[tol] = rep
        if not rep.ok:
            raise NotParaunitary(
                f"bank is not a QMF system: residual {rep.residual:.3g} at {rep.pair} shift {rep.shift}"
            )
        return rep


def lazy_bank(lattice, cosets: CosetSystem | None = None) -> FilterBank:
    """Delta filters ``phi_k = delta_k`` at the coset representatives."""
    lattice = as_lattice(lattice)
    cosets = cosets or CosetSystem(lattice)
    return FilterBank(lattice, [Sequence({r: 1.0}, dim=lattice.dim) for r in cosets.reps], cosets)


def haar_bank(lattice=2) -> FilterBank:
    """Normalized DFT matrix placed on the canonical fundamental domain.

    For ``Gamma = 2Z`` this is ``phi_0 = (d_0 + d_1)/sqrt 2`` and
    ``phi_1 = (d_0 - d_1)/sqrt 2``.
    """
    lattice = as_lattice(lattice)
    cosets = CosetSystem(lattice)
    n = lattice.index()
    if n == 2:
        s = 1 / math.sqrt(2)
        u = np.array([[s, s], [s, -s]])
    else:
        j = np.arange(n)
        u = np.exp(-2j * np.pi * np.outer(j, j) / n) / math.sqrt(n)
    filters = [Sequence({cosets.reps[j]: u[j, k] for j in range(n)}, dim=lattice.dim) for k in range(n)]
    return FilterBank(lattice, filters, cosets)


def fourier(f: Sequence) -> LaurentPoly:
    return LaurentPoly({tuple(-v for v in k): c for k, c in f.taps.items()}, dim=f.dim, prune=0.0)


@dataclass(frozen=True)
class QmfMatrix:
    """``M[k, xi](w) = N^{-1/2} fourier(phi_k)(w + xi)``."""

    loop: LoopMatrix
    cosets: CosetSystem
    dual: DualCosetSystem

    @property
    def size(self) -> int:
        return self.loop.size

    def eval(self, omega) -> np.ndarray:
        return self.loop.eval(omega)


def qmf_matrix(fb: FilterBank) -> QmfMatrix:
    scale = 1 / math.sqrt(fb.size)
    rows = []
    for f in fb.filters:
        base = fourier(f).scale(scale, prune=0.0)
        rows.append([base.shift(xi) for xi in fb.dual.freqs])
    return QmfMatrix(LoopMatrix(rows), fb.cosets, fb.dual)


@dataclass(frozen=True)
class QmfReport:
    """Verdict of :func:`is_qmf`.

    ``pair = (k, k2)`` and ``shift = gamma`` locate the worst violation of
    ``<phi_k2, T_gamma phi_k> = delta(k - k2) delta(gamma)``.
    """

    ok: bool
    residual: float
    pair: tuple[int, int] | None
    shift: tuple[int, ...] | None

    def __bool__(self) -> bool:
        return self.ok


def is_qmf(fb: FilterBank, tol: float = DEFAULT_TOL) -> QmfReport:
    rep = is_paraunitary(qmf_matrix(fb).loop, tol)
    return QmfReport(rep.ok, rep.residual, rep.entry, rep.exponent)


def _abs2(p: LaurentPoly) -> LaurentPoly:
    """``|p(w)|^2`` as a polynomial."""
    return p.mul(p.conj(), prune=0.0)


def power_complementarity(f: Sequence, d: DualCosetSystem) -> float:
    """Largest coefficient of ``sum_xi |f^(w + xi)|^2 - N``."""
    if f.dim != d.lattice.dim:
        raise DimMismatch(f"filter dimension {f.dim} vs lattice dimension {d.lattice.dim}")
    p = fourier(f)
    total = LaurentPoly.zero(f.dim)
    for xi in d.freqs:
        total = total.add(_abs2(p.shift(xi)), prune=0.0)
    total = total.sub(LaurentPoly.constant(len(d), f.dim), prune=0.0)
    return total.max_abs()


def f_matrix(cosets: CosetSystem, dual: DualCosetSystem) -> LoopMatrix:
    """``F[k, xi](w) = N^{-1/2} exp(i <w + xi, k>)``."""
    if len(cosets) != len(dual):
        raise SizeMismatch("coset and dual systems of different size")
    scale = 1 / math.sqrt(len(cosets))
    rows = []
    for k in cosets.reps:
        rows.append(
            [LaurentPoly.monomial(k, scale * root_of_unity(sum(a * b for a, b in zip(k, xi)))) for xi in dual.freqs]
        )
    return LoopMatrix(rows)


def _loop_of(q, what: str = "loop") -> LoopMatrix:
    return q.loop if isinstance(q, QmfMatrix) else q


def _require_paraunitary(m: LoopMatrix, tol: float, what: str) -> ParaunitaryReport:
    rep = is_paraunitary(m, tol)
    if not rep:
        raise NotParaunitary(f"{what} is not paraunitary (residual {rep.residual:.3g})")
    return rep


def loop_from_qmf(q: QmfMatrix, tol: float = DEFAULT_TOL) -> LoopMatrix:
    """Twisted loop ``K[rho, xi] = sum_k F[k, xi] M[k, rho]`` of the unitary.

    Acting on the vector ``(s^(w + xi))_xi`` by matrix multiplication, ``K``
    realizes the translation-commuting unitary that sends ``delta_k`` to
    ``phi_k``.
    """
    _require_paraunitary(q.loop, tol, "QMF matrix")
    return matmul(q.loop.transpose(), f_matrix(q.cosets, q.dual))


def is_twisted(m: LoopMatrix, d: DualCosetSystem, tol: float = 1e-12) -> tuple[bool, float]:
    """Check ``m(w + rho) = R(rho)^T m(w) R(rho)`` for every dual label ``rho``.

    Returns the verdict and the largest coefficient discrepancy.
    """
    worst = 0.0
    for label, rho in enumerate(d.freqs):
        r = permutation_representation(label, d)
        worst = max(worst, m.shift(rho).max_abs_diff(m.permute(r.T, r)))
    return worst <= tol, worst


@dataclass(frozen=True)
class FactorVerdict:
    """Loop produced by :func:`coset_factor` / :func:`twisted_factor` and its test result."""

    loop: LoopMatrix
    ok: bool
    residual: float = 0.0

    def __bool__(self) -> bool:
        return self.ok


def _dual_of(q1, q2, dual):
    for q in (q1, q2):
        if isinstance(q, QmfMatrix):
            return q.dual
    if dual is None:
        raise ValueError("a DualCosetSystem is required when passing bare loops")
    return dual


def coset_factor(q1, q2, dual: DualCosetSystem | None = None, tol: float = DEFAULT_TOL) -> FactorVerdict:
    """``chi_1 @ para_adjoint(chi_2)`` and whether it is Gamma^perp-periodic."""
    d = _dual_of(q1, q2, dual)
    a, b = _loop_of(q1), _loop_of(q2)
    _require_paraunitary(a, tol, "first loop")
    _require_paraunitary(b, tol, "second loop")
    prod = matmul(a, b.para_adjoint())
    return FactorVerdict(prod, is_gamma_periodic(prod, d))


def twisted_factor(
    q1, q2, dual: DualCosetSystem | None = None, tol: float = DEFAULT_TOL, twist_tol: float = 1e-12
) -> FactorVerdict:
    """``para_adjoint(chi_1) @ chi_2`` and whether it satisfies the twisted condition."""
    d = _dual_of(q1, q2, dual)
    a, b = _loop_of(q1), _loop_of(q2)
    _require_paraunitary(a, tol, "first loop")
    _require_paraunitary(b, tol, "second loop")
    prod = matmul(a.para_adjoint(), b)
    ok, worst = is_twisted(prod, d, twist_tol)
    return FactorVerdict(prod, ok, worst)


def vanishing_moments(f: Sequence, p_max: int) -> list[complex]:
    """``[sum_m m^p f(m) for p in 0..p_max]`` for a 1-D filter."""
    if f.dim != 1:
        raise DimUnsupported("moments are only defined for 1-D filters")
    if p_max < 0:
        raise ValueError("p_max must be non-negative")
    return [sum((m**p) * c for (m,), c in f.taps.items()) + 0j for p in range(p_max + 1)]


def _check_two_channel(fb: FilterBank) -> None:
    if fb.dim != 1 or fb.size != 2:
        raise DimUnsupported("prefilters are defined for 1-D two-channel banks only")


def prefilters_1d(fb: FilterBank) -> tuple[Sequence, Sequence]:
    """Pre-filters ``(eta_0, eta_1)`` with ``phi_0 = eta_0~`` and ``phi_1 = T_1^* eta_1~``.

    The split ``s -> (even part of eta_0 * s, odd part of eta_1 * s)`` is
    then energy preserving exactly when ``fb`` is a QMF system.
    """
    _check_two_channel(fb)
    phi0, phi1 = fb.filters
    return phi0.tilde(), phi1.translate(1).tilde()


def bank_from_prefilters_1d(eta0: Sequence, eta1: Sequence, lattice=2) -> FilterBank:
    return FilterBank(lattice, [eta0.tilde(), eta1.tilde().translate(-1)])
