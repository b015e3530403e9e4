"""Signal-domain side: analysis, synthesis and the commuting unitary.

Subband channels are indexed by Gamma-coordinates: the coefficient stored at
``m`` belongs to the lattice vector ``gamma = basis @ m``.

All transforms are direct sums over the (small) supports.  For long signals
the same sums could be evaluated with FFTs per coset, at the price of dense
support bookkeeping; that upgrade is not implemented.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DimMismatch, SizeMismatch
from .filterbank import DEFAULT_TOL, FilterBank, fourier, lazy_bank
from .lattice import DualCosetSystem, LatticeBasis, as_lattice
from .laurent import LaurentPoly
from .sequences import Sequence

__all__ = [
    "SubbandSet",
    "analysis",
    "synthesis",
    "lazy_analysis",
    "apply_unitary",
    "poisson_project",
    "fourier_average",
    "energy_split",
]


@dataclass(frozen=True)
class SubbandSet:
    """``N`` channels on Gamma, stored in Gamma-coordinates."""

    lattice: LatticeBasis
    channels: tuple[Sequence, ...]

    def __post_init__(self):
        if len(self.channels) != self.lattice.index():
            raise SizeMismatch(f"expected {self.lattice.index()} channels, got {len(self.channels)}")

    def energies(self) -> list[float]:
        return [c.norm2() for c in self.channels]

    def max_abs_diff(self, other: "SubbandSet") -> float:
        return max(a.max_abs_diff(b) for a, b in zip(self.channels, other.channels))


def _check_dims(fb: FilterBank, s: Sequence) -> None:
    if s.dim != fb.dim:
        raise DimMismatch(f"signal of dimension {s.dim} for a {fb.dim}-D bank")


def _analyze_channel(lattice: LatticeBasis, phi: Sequence, s: Sequence) -> Sequence:
    # c(m) = sum_x conj(phi(x - B m)) s(x)
    dim = lattice.dim
    if not phi or not s:
        return Sequence({}, dim=dim)
    xs, sv = s.arrays()
    ys, fv = phi.arrays()
    diff = (xs[:, None, :] - ys[None, :, :]).reshape(-1, dim)
    prod = (sv[:, None] * fv.conj()[None, :]).reshape(-1)
    mask, coords = lattice.coordinates_many(diff)
    return Sequence.from_arrays(coords[mask], prod[mask], dim)


def analysis(fb: FilterBank, s: Sequence) -> SubbandSet:
    """Channel ``k`` at ``gamma`` is ``<T_gamma phi_k, s>``."""
    _check_dims(fb, s)
    return SubbandSet(fb.lattice, tuple(_analyze_channel(fb.lattice, f, s) for f in fb.filters))


def synthesis(fb: FilterBank, c: SubbandSet) -> Sequence:
    """``s = sum_k sum_gamma c_k(gamma) T_gamma phi_k``."""
    if c.lattice != fb.lattice:
        raise DimMismatch("subbands were produced on a different lattice")
    dim = fb.dim
    b = fb.lattice.matrix()
    keys, vals = [], []
    for phi, ch in zip(fb.filters, c.channels):
        if not phi or not ch:
            continue
        ms, cv = ch.arrays()
        ys, fv = phi.arrays()
        gammas = ms @ b.T
        keys.append((gammas[:, None, :] + ys[None, :, :]).reshape(-1, dim))
        vals.append((cv[:, None] * fv[None, :]).reshape(-1))
    if not keys:
        return Sequence({}, dim=dim)
    return Sequence.from_arrays(np.concatenate(keys), np.concatenate(vals), dim)


def lazy_analysis(fb: FilterBank, s: Sequence) -> SubbandSet:
    """Split ``s`` over the cosets of ``fb``: channel ``k`` holds ``s(rep_k + gamma)``."""
    _check_dims(fb, s)
    return analysis(lazy_bank(fb.lattice, fb.cosets), s)


def apply_unitary(fb: FilterBank, s: Sequence, tol: float = DEFAULT_TOL) -> Sequence:
    """Image of ``s`` under the Gamma-commuting unitary with ``delta_k -> phi_k``."""
    fb.check_qmf(tol)
    _check_dims(fb, s)
    # s = sum over x of s(x) T_gamma delta_k with x = rep_k + gamma
    dim = fb.dim
    if not s:
        return Sequence({}, dim=dim)
    xs, sv = s.arrays()
    labels, gammas = fb.cosets.reduce_many(xs)
    keys, vals = [], []
    for k, phi in enumerate(fb.filters):
        sel = labels == k
        if not phi or not sel.any():
            continue
        ys, fv = phi.arrays()
        keys.append((gammas[sel][:, None, :] + ys[None, :, :]).reshape(-1, dim))
        vals.append((sv[sel][:, None] * fv[None, :]).reshape(-1))
    if not keys:
        return Sequence({}, dim=dim)
    out = Sequence.from_arrays(np.concatenate(keys), np.concatenate(vals), dim)
    alt = synthesis(fb, lazy_analysis(fb, s))
    if out.max_abs_diff(alt) > 1e-12 * max(1.0, s.norm2() ** 0.5):
        raise ConsistencyError("direct unitary action and synthesis of the coset split disagree")
    return out


def fourier_average(lattice, p: LaurentPoly) -> LaurentPoly:
    """``(1/N) sum_xi p(w + xi)`` over the dual coset representatives."""
    dual = DualCosetSystem(as_lattice(lattice))
    acc = LaurentPoly.zero(p.dim)
    for xi in dual.freqs:
        acc = acc.add(p.shift(xi), prune=0.0)
    return acc.scale(1 / len(dual), prune=0.0)


def poisson_project(lattice, s: Sequence, verify: bool = True, tol: float = 1e-12) -> Sequence:
    """Restriction of ``s`` to Gamma, cross-checked against the Fourier average."""
    lattice = as_lattice(lattice)
    if s.dim != lattice.dim:
        raise DimMismatch(f"signal of dimension {s.dim} on a {lattice.dim}-D lattice")
    out = Sequence({k: c for k, c in s.taps.items() if lattice.contains(k)}, dim=s.dim)
    if verify:
        err = fourier_average(lattice, fourier(s)).sub(fourier(out), prune=0.0).max_abs()
        if err > tol:
            raise ConsistencyError(f"restriction and Fourier average differ by {err:.3g}")
    return out


def energy_split(fb: FilterBank, s: Sequence, tol: float = DEFAULT_TOL) -> tuple[float, list[float]]:
    """``(||s||^2, per-channel energies)``; the two sides agree for QMF banks."""
    fb.check_qmf(tol)
    per = analysis(fb, s).energies()
    total = s.norm2()
    if abs(total - sum(per)) > 1e-12 * total:
        raise ConsistencyError(f"energy not conserved: {total!r} vs {sum(per)!r}")
    return total, per
