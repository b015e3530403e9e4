"""Elementary unitaries on fundamental domains, product synthesis and the
two-channel 1-D peel-off factorization.

An elementary step ``U_u^F`` is the unique unitary commuting with the
Gamma-translations that acts as the finite unitary ``u`` on the span of the
deltas over the fundamental domain ``F``: for ``x = f_j + gamma`` it sends
``delta_x`` to ``sum_i u[i, j] delta_{f_i + gamma}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimUnsupported, DomainNotFundamental, NonUnitaryStep, SupportNotReducible
from .filterbank import DEFAULT_TOL, FilterBank, lazy_bank
from .lattice import CosetSystem, LatticeBasis, as_lattice
from .sequences import Sequence

__all__ = [
    "ElementaryStep",
    "FactorizationResult",
    "random_unitary",
    "elementary_apply",
    "synthesize",
    "factorize_1d",
    "reconstruct",
    "random_qmf",
    "alternating_domains",
]

UNITARY_TOL = 1e-12
RANK_TOL = 1e-9
ROUND_TRIP_TOL = 1e-8


def _unitarity_defect(u: np.ndarray) -> float:
    return float(np.max(np.abs(u @ u.conj().T - np.eye(len(u)))))


@dataclass(frozen=True, eq=False)
class ElementaryStep:
    unitary: np.ndarray
    domain: CosetSystem

    def __post_init__(self):
        u = np.array(self.unitary)
        u = u.astype(float if u.dtype.kind in "biuf" else complex)
        if u.shape != (len(self.domain), len(self.domain)):
            raise NonUnitaryStep(f"unitary of shape {u.shape} for a domain of {len(self.domain)} points")
        defect = _unitarity_defect(u)
        if defect > UNITARY_TOL:
            raise NonUnitaryStep(f"step matrix is not unitary (defect {defect:.3g})")
        u.flags.writeable = False
        object.__setattr__(self, "unitary", u)

    @classmethod
    def on(cls, lattice, points, unitary) -> "ElementaryStep":
        return cls(unitary, CosetSystem(as_lattice(lattice), points))

    @property
    def lattice(self) -> LatticeBasis:
        return self.domain.lattice

    def adjoint(self) -> "ElementaryStep":
        return ElementaryStep(self.unitary.conj().T, self.domain)

    def is_identity(self, tol: float = UNITARY_TOL) -> bool:
        return bool(np.max(np.abs(self.unitary - np.eye(len(self.unitary)))) <= tol)

    def is_real(self, tol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.unitary.imag)) <= tol)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ElementaryStep):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.unitary, other.unitary)

    __hash__ = None


def random_unitary(n: int, rng: np.random.Generator, real: bool = False) -> np.ndarray:
    """Haar-distributed ``U(n)`` (or ``O(n)``) sample via phase-corrected QR."""
    z = rng.standard_normal((n, n))
    if not real:
        z = (z + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))[None, :]
    return q.real.copy() if real else q


def _apply_to_filter(step: ElementaryStep, f: Sequence) -> Sequence:
    if not f:
        return f
    keys, vals = f.arrays()
    labels, gammas = step.domain.reduce_many(keys)
    reps = np.asarray(step.domain.reps, dtype=np.int64)
    u = step.unitary
    out_keys = (gammas[:, None, :] + reps[None, :, :]).reshape(-1, f.dim)
    out_vals = (u[:, labels].T * vals[:, None]).reshape(-1)
    return Sequence.from_arrays(out_keys, out_vals, f.dim)


def elementary_apply(step: ElementaryStep, fb: FilterBank) -> FilterBank:
    """Apply ``U_u^F`` to every filter of ``fb``."""
    if step.lattice != fb.lattice:
        raise DomainNotFundamental("step domain is a fundamental domain of a different lattice")
    return fb.with_filters([_apply_to_filter(step, f) for f in fb.filters])


def synthesize(lattice, steps=(), translation=None) -> FilterBank:
    """Apply ``steps`` in order to the lazy bank, then translate by ``translation``."""
    fb = lazy_bank(as_lattice(lattice))
    for step in steps:
        fb = elementary_apply(step, fb)
    if translation is not None and any(translation):
        fb = fb.translate(translation)
    return fb


@dataclass(frozen=True)
class FactorizationResult:
    """``steps`` applied to the lazy bank, then the global ``translation``.

    ``support_lengths`` records the support length before each peel and at
    the terminal rotation.
    """

    lattice: LatticeBasis
    translation: tuple[int, ...]
    steps: tuple[ElementaryStep, ...]
    support_lengths: tuple[int, ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.steps)


def reconstruct(r: FactorizationResult, lattice=None) -> FilterBank:
    return synthesize(lattice if lattice is not None else r.lattice, r.steps, r.translation)


def _complete(v: np.ndarray) -> np.ndarray:
    """Unit vector orthogonal to unit ``v``, Gram-Schmidt on the standard basis."""
    for e in np.eye(2, dtype=complex):
        w = e - np.vdot(v, e) * v
        nw = np.linalg.norm(w)
        if nw > 0.5:
            return w / nw
    raise AssertionError("unreachable in two dimensions")


def _dominant(vectors: list[np.ndarray]) -> np.ndarray | None:
    v = max(vectors, key=np.linalg.norm)
    nv = np.linalg.norm(v)
    return v / nv if nv > RANK_TOL else None


def _peel_unitary(left: list[np.ndarray], right: list[np.ndarray]) -> np.ndarray:
    # rows of u are conj(b), conj(a): u a = [0, 1], u b = [1, 0]
    a, b = _dominant(left), _dominant(right)
    if a is None and b is None:
        return np.eye(2, dtype=complex)
    if a is None:
        a = _complete(b)
    elif b is None:
        b = _complete(a)
    else:
        b = b - np.vdot(a, b) * a
        nb = np.linalg.norm(b)
        b = b / nb if nb > RANK_TOL else _complete(a)
    return np.vstack([b.conj(), a.conj()])


def _polar_unitary(a: np.ndarray) -> np.ndarray:
    w, _, vh = np.linalg.svd(a)
    return w @ vh


def factorize_1d(fb: FilterBank, tol: float = DEFAULT_TOL) -> FactorizationResult:
    """Factor a two-channel FIR QMF bank on ``2Z`` into elementary steps.

    Repeatedly translate the bank so its support starts at 0, pick ``u`` that
    moves the left boundary block onto position 1 and the right boundary
    block onto position ``2L - 2``, and apply ``U_u`` on ``{0, 1}``.  Each peel
    shortens the support by two; the last block is itself a unitary.  The
    recorded operations are then inverted and gathered into steps on domains
    ``{q, q + 1}`` plus one net translation.
    """
    if fb.dim != 1 or fb.lattice.basis != ((2,),):
        raise DimUnsupported("factorize_1d needs a 1-D bank on the lattice 2Z")
    fb.check_qmf(tol)
    psi = list(fb.canonical().filters)
    scale = max(1.0, max(f.norm2() for f in psi) ** 0.5)

    peels: list[tuple[int, np.ndarray]] = []
    lengths: list[int] = []
    dom01 = ElementaryStep.on(fb.lattice, [0, 1], np.eye(2))
    while True:
        lo = min(k[0] for f in psi for k in f.taps)
        hi = max(k[0] for f in psi for k in f.taps)
        length = hi - lo + 1
        lengths.append(length)
        psi = [f.translate(-lo) for f in psi]
        if length <= 2:
            break
        top = 2 * math.ceil(length / 2) - 1
        left = [np.array([f[0], f[1]]) for f in psi]
        right = [np.array([f[top - 1], f[top]]) for f in psi]
        u = _peel_unitary(left, right)
        step = ElementaryStep(u, dom01.domain)
        psi = [_apply_to_filter(step, f) for f in psi]
        leak = max(abs(f[p]) for f in psi for p in (0, top))
        if leak > ROUND_TRIP_TOL * scale:
            raise SupportNotReducible(f"boundary taps did not vanish (leak {leak:.3g}); input is not a QMF at this tolerance")
        psi = [Sequence({k: c for k, c in f.taps.items() if k[0] not in (0, top)}, dim=1) for f in psi]
        peels.append((lo, u))

    block = np.array([[f[0] for f in psi], [f[1] for f in psi]], dtype=complex)
    defect = _unitarity_defect(block)
    if defect > ROUND_TRIP_TOL * scale**2:
        raise SupportNotReducible(f"terminal block is not unitary (defect {defect:.3g})")
    terminal = _polar_unitary(block)

    # phi = T_{a_1} V_1 T_{a_2} V_2 ... T_{a_m} V_m (lazy); push translations left
    factors = [(t, u.conj().T) for t, u in peels] + [(lo, terminal)]
    total = sum(t for t, _ in factors)
    steps = []
    tail = 0
    for t, v in reversed(factors):
        d = (-tail) % 2
        steps.append(ElementaryStep.on(fb.lattice, [d, d + 1], v))
        tail += t
    if steps and steps[0].is_identity():
        steps = steps[1:]
    if fb.is_real():
        steps = [ElementaryStep(s.unitary.real, s.domain) if s.is_real() else s for s in steps]
    return FactorizationResult(fb.lattice, (total,), tuple(steps), tuple(lengths))


def alternating_domains(lattice, count: int) -> list[CosetSystem]:
    """Canonical domain, then translates by unit vectors outside Gamma, alternating."""
    lattice = as_lattice(lattice)
    base = CosetSystem(lattice)
    units = [tuple(int(i == j) for j in range(lattice.dim)) for i in range(lattice.dim)]
    off = [e for e in units if not lattice.contains(e)]
    out = []
    for j in range(count):
        if j % 2 == 0 or not off:
            out.append(base)
        else:
            out.append(base.shifted(off[(j // 2) % len(off)]))
    return out


def random_qmf(lattice, num_steps: int, seed=None, real_only: bool = False) -> FilterBank:
    """Seeded random FIR QMF bank built from ``num_steps`` elementary steps."""
    if num_steps < 0:
        raise ValueError("num_steps must be non-negative")
    lattice = as_lattice(lattice)
    rng = np.random.default_rng(seed)
    n = lattice.index()
    steps = [
        ElementaryStep(random_unitary(n, rng, real=real_only), dom)
        for dom in alternating_domains(lattice, num_steps)
    ]
    return synthesize(lattice, steps)
