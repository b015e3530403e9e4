import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from helpers import perturb, random_signal
from qmfloops import Sequence, analysis, factorize_1d, haar_bank, is_qmf, lazy_bank, random_qmf
from qmfloops import io as qio
from qmfloops.cli import main

DATA = Path(__file__).parent / "data"


def run(*args, stdin=None):
    return subprocess.run(
        [sys.executable, "-m", "qmfloops", *args], input=stdin, capture_output=True, text=True, check=False
    )


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return _write


def test_gen_named_banks(capsys):
    assert main(["gen", "lazy", "--lattice", "2"]) == 0
    assert qio.load_bank(capsys.readouterr().out) == lazy_bank(2)
    assert main(["gen", "haar"]) == 0
    assert qio.load_bank(capsys.readouterr().out) == haar_bank()
    assert main(["gen", "haar", "--lattice", "1,1;1,-1"]) == 0
    assert qio.load_bank(capsys.readouterr().out) == haar_bank([[1, 1], [1, -1]])


def test_gen_random_matches_golden(capsys):
    assert main(["gen", "random", "--seed", "7", "--steps", "3"]) == 0
    out = capsys.readouterr().out
    assert out == (DATA / "random_seed7_steps3.bank").read_text()
    assert qio.load_bank(out) == random_qmf(2, 3, seed=7)


def test_gen_bad_lattice():
    r = run("gen", "lazy", "--lattice", "1,2;2,4")
    assert r.returncode == 2 and "invalid lattice" in r.stderr


def test_verify_exit_codes(write, capsys):
    assert main(["verify", write("lazy.bank", qio.dump_bank(lazy_bank(2)))]) == 0
    assert "QMF: yes" in capsys.readouterr().out
    h = haar_bank()
    bad = h.with_filters([h.filters[0].scale(0.5), h.filters[1]])
    assert main(["verify", write("bad.bank", qio.dump_bank(bad))]) == 1
    out = capsys.readouterr().out
    assert "QMF: no" in out and f"{is_qmf(bad).residual:.3e}" in out
    assert main(["verify", write("junk.bank", "not a bank\n")]) == 2
    assert main(["verify", "/nonexistent/file.bank"]) == 2


def test_verify_reads_stdin():
    r = run("verify", "-", stdin=qio.dump_bank(haar_bank()))
    assert r.returncode == 0
    assert "moments filter 1: 0.000e+00" in r.stdout


def test_verify_agrees_with_library_on_corpus(write, capsys):
    rng = np.random.default_rng(0)
    for i in range(50):
        basis = [[2]] if i % 2 else [[1, 1], [1, -1]]
        good = random_qmf(basis, 1 + i % 4, seed=i)
        for fb in (good, perturb(good, rng, 10.0 ** -rng.uniform(3, 8))):
            code = main(["verify", write(f"b{i}.bank", qio.dump_bank(fb))])
            capsys.readouterr()
            assert code == (0 if is_qmf(fb) else 1)


def test_factor_and_synth(write, capsys):
    assert main(["factor", write("haar.bank", qio.dump_bank(haar_bank()))]) == 0
    cap = capsys.readouterr()
    steps = qio.load_steps(cap.out)
    assert len(steps.steps) == 1 and "steps 1" in cap.err
    assert main(["synth", write("haar.steps", cap.out)]) == 0
    assert qio.load_bank(capsys.readouterr().out).max_abs_diff(haar_bank()) < 1e-15

    assert main(["factor", write("lazy.bank", qio.dump_bank(lazy_bank(2)))]) == 0
    cap = capsys.readouterr()
    assert "steps 0" in cap.err and qio.load_steps(cap.out).steps == ()
    assert main(["synth", write("lazy.steps", cap.out)]) == 0
    assert qio.load_bank(capsys.readouterr().out) == lazy_bank(2)


def test_factor_rejects_two_dimensional(write, capsys):
    assert main(["factor", write("q.bank", qio.dump_bank(haar_bank([[1, 1], [1, -1]])))]) == 1
    assert "1-D two-channel" in capsys.readouterr().err


def test_factor_rejects_non_qmf(write, capsys):
    h = haar_bank()
    bad = h.with_filters([h.filters[0].scale(0.5), h.filters[1]])
    assert main(["factor", write("bad.bank", qio.dump_bank(bad))]) == 1


def test_synth_rejects_non_unitary(write, capsys):
    text = qio.dump_steps(factorize_1d(haar_bank()))
    lines = text.splitlines()
    i = next(j for j, line in enumerate(lines) if line.startswith("row"))
    lines[i] = "row 1.0 0.0 1.0 0.0"
    assert main(["synth", write("bad.steps", "\n".join(lines))]) == 1
    assert "not unitary" in capsys.readouterr().err


def test_out_flag_sends_report_to_stdout(tmp_path, write, capsys):
    out = tmp_path / "s.steps"
    assert main(["factor", write("r.bank", qio.dump_bank(random_qmf(2, 3, seed=1))), "--out", str(out)]) == 0
    cap = capsys.readouterr()
    assert "round-trip error" in cap.out and cap.err == ""
    assert len(qio.load_steps(out.read_text()).steps) == 3


def test_transform_round_trip(write, capsys, rng):
    fb = random_qmf(2, 3, seed=2)
    bank = write("r.bank", qio.dump_bank(fb))
    s = random_signal(rng, 1, 20)
    sig = write("s.signal", qio.dump_signal(s))
    assert main(["transform", bank, sig, "--direction", "analyze"]) == 0
    cap = capsys.readouterr()
    assert qio.load_subbands(cap.out) == analysis(fb, s)
    assert "channel 0 energy" in cap.err
    sub = write("s.sub", cap.out)
    assert main(["transform", bank, sub, "--direction", "synthesize"]) == 0
    assert qio.load_signal(capsys.readouterr().out).max_abs_diff(s) <= 1e-10


def test_transform_special_cases(write, capsys, rng):
    zero = write("z.signal", qio.dump_signal(Sequence({}, dim=1)))
    bank = write("h.bank", qio.dump_bank(haar_bank()))
    assert main(["transform", bank, zero, "--direction", "unitary"]) == 0
    assert not qio.load_signal(capsys.readouterr().out)
    s = random_signal(rng, 1, 9)
    lazy = write("l.bank", qio.dump_bank(lazy_bank(2)))
    assert main(["transform", lazy, write("s.signal", qio.dump_signal(s)), "--direction", "unitary"]) == 0
    assert qio.load_signal(capsys.readouterr().out) == s


def test_transform_incompatible(write, capsys, rng):
    bank = write("h.bank", qio.dump_bank(haar_bank()))
    sig = write("s2.signal", qio.dump_signal(random_signal(rng, 2, 9)))
    assert main(["transform", bank, sig]) == 1
    qbank = write("q.bank", qio.dump_bank(haar_bank([[1, 1], [1, -1]])))
    sub = write("sub", qio.dump_subbands(analysis(haar_bank(), random_signal(rng, 1, 8))))
    assert main(["transform", qbank, sub, "--direction", "synthesize"]) == 1


def test_moments(write, capsys):
    assert main(["moments", write("h.bank", qio.dump_bank(haar_bank())), "--order", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[1].startswith("filter 1: 0.0+0.0j -0.7071067811865475+0.0j")


def test_console_script_pipeline(tmp_path):
    bank, steps, again = tmp_path / "a.bank", tmp_path / "a.steps", tmp_path / "b.bank"
    assert run("gen", "random", "--seed", "3", "--steps", "4", "--out", str(bank)).returncode == 0
    assert run("verify", str(bank)).returncode == 0
    assert run("factor", str(bank), "--out", str(steps)).returncode == 0
    assert run("synth", str(steps), "--out", str(again)).returncode == 0
    assert run("verify", str(again)).returncode == 0
    assert qio.load_bank(again.read_text()).max_abs_diff(qio.load_bank(bank.read_text())) <= 1e-8
