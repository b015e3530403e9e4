"""Line-oriented text formats for banks, steps, signals and subbands.

Every file starts with ``<kind> <version>`` and continues with one record
per line, ``keyword field ...``.  Blank lines and ``#`` comments are
ignored.  Floats are written with :func:`repr`, the shortest string that
parses back to the same double, so files round-trip bit for bit.

Bank file::

    qmf-bank 1
    dim 1
    lattice 2
    coset 0 0
    coset 1 1
    filter 0
    tap 0 0.7071067811865476 0.0
    tap 1 0.7071067811865476 0.0
    filter 1
    ...

``lattice`` lists the basis row-major.  ``coset <index> <point>`` fixes the
fundamental domain, ``filter <coset_index>`` opens the tap list of the
filter attached to that coset, ``tap <k...> <re> <im>`` adds one tap.

Steps files use ``translation <vector>`` and, per step, a ``step`` line
followed by ``point <vector>`` lines (the domain) and ``row <re im ...>``
lines (the unitary).  Signal files hold ``sample <k...> <re> <im>`` lines;
subband files hold ``channel <index>`` markers followed by
``coef <m...> <re> <im>`` lines in Gamma-coordinates.
"""
from __future__ import annotations

import numpy as np

from .errors import ParseError, QMFError
from .factorize import ElementaryStep, FactorizationResult
from .filterbank import FilterBank
from .lattice import CosetSystem, LatticeBasis
from .sequences import Sequence
from .transform import SubbandSet

__all__ = [
    "FORMAT_VERSION",
    "dump_bank",
    "load_bank",
    "dump_steps",
    "load_steps",
    "dump_signal",
    "load_signal",
    "dump_subbands",
    "load_subbands",
    "detect_kind",
]

FORMAT_VERSION = 1


def _num(x: float) -> str:
    return repr(float(x))


def _ints(v) -> str:
    return " ".join(str(int(a)) for a in v)


def _coef_line(keyword: str, k, c: complex) -> str:
    return f"{keyword} {_ints(k)} {_num(c.real)} {_num(c.imag)}"


def _header(kind: str, dim: int) -> list[str]:
    return [f"{kind} {FORMAT_VERSION}", f"dim {dim}"]


def _lattice_line(b: LatticeBasis) -> str:
    return "lattice " + " ".join(str(v) for row in b.basis for v in row)


class _Reader:
    def __init__(self, text: str, kind: str):
        self.lines = []
        for no, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                self.lines.append((no, line.split()))
        if not self.lines:
            raise ParseError("empty file")
        no, head = self.lines[0]
        if len(head) != 2 or head[0] != kind:
            raise ParseError(f"line {no}: expected header '{kind} {FORMAT_VERSION}'")
        if head[1] != str(FORMAT_VERSION):
            raise ParseError(f"line {no}: unsupported format version {head[1]}")
        self.pos = 1
        (self.dim,) = self.ints(self.expect("dim", 1))
        if self.dim < 1:
            raise ParseError("dim must be positive")

    def peek(self):
        return self.lines[self.pos] if self.pos < len(self.lines) else (None, None)

    def next(self):
        item = self.peek()
        self.pos += 1
        return item

    def expect(self, keyword: str, count: int | None = None) -> list[str]:
        no, toks = self.next()
        if toks is None:
            raise ParseError(f"unexpected end of file, expected '{keyword}'")
        if toks[0] != keyword:
            raise ParseError(f"line {no}: expected '{keyword}', got '{toks[0]}'")
        if count is not None and len(toks) - 1 != count:
            raise ParseError(f"line {no}: '{keyword}' needs {count} fields, got {len(toks) - 1}")
        return toks[1:]

    def ints(self, toks: list[str], no=None) -> tuple[int, ...]:
        try:
            return tuple(int(t) for t in toks)
        except ValueError:
            raise ParseError(f"line {no or self.lines[self.pos - 1][0]}: expected integers, got {toks}") from None

    def coef(self, toks: list[str]) -> tuple[tuple[int, ...], complex]:
        no = self.lines[self.pos - 1][0]
        if len(toks) != self.dim + 2:
            raise ParseError(f"line {no}: expected {self.dim} indices and re, im")
        k = self.ints(toks[: self.dim], no)
        try:
            return k, complex(float(toks[-2]), float(toks[-1]))
        except ValueError:
            raise ParseError(f"line {no}: bad number in {toks[-2:]}") from None

    def lattice(self) -> LatticeBasis:
        vals = self.ints(self.expect("lattice", self.dim * self.dim))
        rows = [list(vals[i * self.dim : (i + 1) * self.dim]) for i in range(self.dim)]
        try:
            return LatticeBasis(rows)
        except QMFError as exc:
            raise ParseError(f"invalid lattice: {exc}") from None

    def coef_block(self, keyword: str) -> Sequence:
        taps = {}
        while True:
            no, toks = self.peek()
            if toks is None or toks[0] != keyword:
                break
            self.next()
            k, c = self.coef(toks[1:])
            if k in taps:
                raise ParseError(f"line {no}: duplicate index {k}")
            taps[k] = c
        return Sequence(taps, dim=self.dim)

    def done(self) -> None:
        no, toks = self.peek()
        if toks is not None:
            raise ParseError(f"line {no}: unexpected record '{toks[0]}'")


def detect_kind(text: str) -> str | None:
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            return line.split()[0]
    return None


def dump_bank(fb: FilterBank) -> str:
    out = _header("qmf-bank", fb.dim)
    out.append(_lattice_line(fb.lattice))
    for i, r in enumerate(fb.cosets.reps):
        out.append(f"coset {i} {_ints(r)}")
    for i, f in enumerate(fb.filters):
        out.append(f"filter {i}")
        out.extend(_coef_line("tap", k, c) for k, c in f.taps.items())
    return "\n".join(out) + "\n"


def load_bank(text: str) -> FilterBank:
    rd = _Reader(text, "qmf-bank")
    lattice = rd.lattice()
    n = lattice.index()
    reps = {}
    for _ in range(n):
        toks = rd.expect("coset", rd.dim + 1)
        idx, *point = rd.ints(toks)
        if idx in reps or not 0 <= idx < n:
            raise ParseError(f"bad or repeated coset index {idx}")
        reps[idx] = tuple(point)
    try:
        cosets = CosetSystem(lattice, [reps[i] for i in range(n)])
    except QMFError as exc:
        raise ParseError(f"cosets do not form a fundamental domain: {exc}") from None
    filters = {}
    while rd.peek()[1] is not None:
        (idx,) = rd.ints(rd.expect("filter", 1))
        if idx in filters or not 0 <= idx < n:
            raise ParseError(f"bad or repeated filter coset_index {idx}")
        filters[idx] = rd.coef_block("tap")
    if sorted(filters) != list(range(n)):
        raise ParseError(f"filter coset_index values must be a permutation of 0..{n - 1}")
    return FilterBank(lattice, [filters[i] for i in range(n)], cosets)


def dump_steps(r: FactorizationResult) -> str:
    out = _header("qmf-steps", r.lattice.dim)
    out.append(_lattice_line(r.lattice))
    out.append(f"translation {_ints(r.translation)}")
    for step in r.steps:
        out.append("step")
        out.extend(f"point {_ints(p)}" for p in step.domain.reps)
        u = np.asarray(step.unitary, dtype=complex)
        for row in u:
            out.append("row " + " ".join(f"{_num(c.real)} {_num(c.imag)}" for c in row))
    return "\n".join(out) + "\n"


def load_steps(text: str) -> FactorizationResult:
    """Parse a steps file.  A non-unitary matrix raises :class:`NonUnitaryStep`."""
    rd = _Reader(text, "qmf-steps")
    lattice = rd.lattice()
    n = lattice.index()
    translation = rd.ints(rd.expect("translation", rd.dim))
    steps = []
    while rd.peek()[1] is not None:
        rd.expect("step", 0)
        points = [rd.ints(rd.expect("point", rd.dim)) for _ in range(n)]
        rows = []
        for _ in range(n):
            toks = rd.expect("row", 2 * n)
            try:
                vals = [float(t) for t in toks]
            except ValueError:
                raise ParseError(f"bad number in row {toks}") from None
            rows.append([complex(vals[2 * j], vals[2 * j + 1]) for j in range(n)])
        u = np.array(rows, dtype=complex)
        if not np.any(u.imag):
            u = u.real
        try:
            domain = CosetSystem(lattice, points)
        except QMFError as exc:
            raise ParseError(f"step domain is not fundamental: {exc}") from None
        steps.append(ElementaryStep(u, domain))
    rd.done()
    return FactorizationResult(lattice, translation, tuple(steps))


def dump_signal(s: Sequence) -> str:
    out = _header("qmf-signal", s.dim)
    out.extend(_coef_line("sample", k, c) for k, c in s.taps.items())
    return "\n".join(out) + "\n"


def load_signal(text: str) -> Sequence:
    rd = _Reader(text, "qmf-signal")
    s = rd.coef_block("sample")
    rd.done()
    return s


def dump_subbands(c: SubbandSet) -> str:
    out = _header("qmf-subbands", c.lattice.dim)
    out.append(_lattice_line(c.lattice))
    for i, ch in enumerate(c.channels):
        out.append(f"channel {i}")
        out.extend(_coef_line("coef", k, v) for k, v in ch.taps.items())
    return "\n".join(out) + "\n"


def load_subbands(text: str) -> SubbandSet:
    rd = _Reader(text, "qmf-subbands")
    lattice = rd.lattice()
    channels = []
    for i in range(lattice.index()):
        (idx,) = rd.ints(rd.expect("channel", 1))
        if idx != i:
            raise ParseError(f"channels must appear in order, expected {i}, got {idx}")
        channels.append(rd.coef_block("coef"))
    rd.done()
    return SubbandSet(lattice, tuple(channels))
