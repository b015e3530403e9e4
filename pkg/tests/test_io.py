import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_signal
from qmfloops import CosetSystem, LatticeBasis, Sequence, analysis, factorize_1d, haar_bank, lazy_bank, random_qmf
from qmfloops import io as qio
from qmfloops.errors import NonUnitaryStep, ParseError


@pytest.mark.parametrize(
    "fb",
    [
        lazy_bank(2),
        haar_bank(),
        random_qmf(2, 4, seed=1),
        random_qmf([[1, 1], [1, -1]], 3, seed=2),
        random_qmf([[2, 1], [-1, 1]], 2, seed=3, real_only=True),
        lazy_bank(2, CosetSystem(LatticeBasis([[2]]), [(1,), (4,)])),
    ],
)
def test_bank_round_trip(fb):
    text = qio.dump_bank(fb)
    back = qio.load_bank(text)
    assert back == fb
    assert qio.dump_bank(back) == text
    assert qio.detect_kind(text) == "qmf-bank"


def test_steps_round_trip():
    for fb in (lazy_bank(2), haar_bank(), random_qmf(2, 5, seed=4), random_qmf(2, 3, seed=4, real_only=True)):
        r = factorize_1d(fb)
        text = qio.dump_steps(r)
        back = qio.load_steps(text)
        assert back == r
        assert qio.dump_steps(back) == text
        assert all(a.unitary.dtype == b.unitary.dtype for a, b in zip(r.steps, back.steps))


def test_signal_and_subband_round_trip(rng):
    for dim, fb in ((1, random_qmf(2, 2, seed=0)), (2, haar_bank([[1, 1], [1, -1]]))):
        s = random_signal(rng, dim, 16)
        assert qio.load_signal(qio.dump_signal(s)) == s
        sub = analysis(fb, s)
        back = qio.load_subbands(qio.dump_subbands(sub))
        assert back == sub
    empty = Sequence({}, dim=1)
    assert qio.load_signal(qio.dump_signal(empty)) == empty


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(-10**6, 10**6)), st.tuples(finite, finite), max_size=8))
def test_float_text_is_bit_exact(taps):
    s = Sequence({k: complex(*v) for k, v in taps.items()}, dim=1)
    back = qio.load_signal(qio.dump_signal(s))
    assert set(back.taps) == set(s.taps)
    for k, v in s.taps.items():
        assert back[k].real.hex() == v.real.hex() and back[k].imag.hex() == v.imag.hex()


HAAR = qio.dump_bank(haar_bank())


@pytest.mark.parametrize(
    "text, needle",
    [
        ("", "empty"),
        ("qmf-steps 1\ndim 1\n", "header"),
        ("qmf-bank 2\ndim 1\n", "version"),
        ("qmf-bank 1\ndim x\n", "integers"),
        (HAAR.replace("lattice 2", "lattice 0"), "lattice"),
        (HAAR.replace("coset 1 1", "coset 1 2"), "fundamental"),
        (HAAR.replace("coset 1 1", "coset 0 1"), "coset index"),
        (HAAR.replace("filter 1", "filter 0"), "filter"),
        (HAAR.replace(" 0.0\n", " 0.x\n", 1), "bad number"),
        (HAAR + "tap 0 1.0\n", "expected"),
        (HAAR.replace("tap 1 ", "tap 0 ", 1), "duplicate"),
    ],
)
def test_parse_errors(text, needle):
    with pytest.raises(ParseError, match=needle):
        qio.load_bank(text)


def test_comments_and_blank_lines_are_ignored():
    text = "# generated\n\n" + HAAR.replace("dim 1", "dim 1   # one axis")
    assert qio.load_bank(text) == haar_bank()


def test_non_unitary_step_file():
    text = qio.dump_steps(factorize_1d(haar_bank()))
    lines = text.splitlines()
    i = next(j for j, line in enumerate(lines) if line.startswith("row"))
    lines[i] = "row 1.0 0.0 1.0 0.0"
    with pytest.raises(NonUnitaryStep):
        qio.load_steps("\n".join(lines))


def test_step_domain_must_be_fundamental():
    text = qio.dump_steps(factorize_1d(haar_bank()))
    with pytest.raises(ParseError, match="fundamental"):
        qio.load_steps(text.replace("point 1", "point 2"))


def test_subband_channel_order():
    sub = analysis(haar_bank(), Sequence({(0,): 1.0}))
    text = qio.dump_subbands(sub).replace("channel 1", "channel 5")
    with pytest.raises(ParseError, match="order"):
        qio.load_subbands(text)


def test_written_floats_are_shortest_repr():
    text = qio.dump_signal(Sequence({(0,): 0.1 + 0.2j}))
    assert "sample 0 0.1 0.2" in text
    assert np.float64(0.1).hex() == float("0.1").hex()
