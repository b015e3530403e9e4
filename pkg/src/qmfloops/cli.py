"""Command line front end.

Exit status: 0 success, 1 domain failure (not a QMF, not factorizable,
non-unitary step, incompatible inputs), 2 I/O or parse failure.

When a command writes its file to standard output, its human-readable
report goes to standard error so the two never mix; with ``--out`` the
report is printed on standard output.
"""
from __future__ import annotations

import argparse
import sys

from . import io as qio
from .errors import ParseError, QMFError
from .factorize import factorize_1d, random_qmf, reconstruct, synthesize
from .filterbank import DEFAULT_TOL, haar_bank, is_qmf, lazy_bank, power_complementarity, vanishing_moments
from .lattice import LatticeBasis
from .transform import analysis, apply_unitary, synthesis

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2


class _IOFailure(Exception):
    pass


def parse_lattice(text: str) -> LatticeBasis:
    """``"2"`` is ``2Z``; ``"1,1;1,-1"`` lists the basis row by row."""
    try:
        rows = [[int(v) for v in row.replace(",", " ").split()] for row in text.split(";")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid lattice {text!r}") from None
    if len(rows) == 1 and len(rows[0]) == 1:
        rows = [[rows[0][0]]]
    try:
        return LatticeBasis(rows)
    except (QMFError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"invalid lattice {text!r}: {exc}") from None


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc}") from None


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {out}: {exc}") from None


def _report_stream(args):
    return sys.stdout if getattr(args, "out", None) not in (None, "-") else sys.stderr


def cmd_gen(args) -> int:
    if args.kind == "lazy":
        fb = lazy_bank(args.lattice)
    elif args.kind == "haar":
        fb = haar_bank(args.lattice)
    else:
        fb = random_qmf(args.lattice, args.steps, seed=args.seed, real_only=args.real)
    _emit(qio.dump_bank(fb), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    fb = qio.load_bank(_read(args.bank))
    rep = is_qmf(fb, args.tol)
    print(f"lattice {[list(r) for r in fb.lattice.basis]}  channels {fb.size}")
    where = "" if rep.pair is None else f"  worst (k={rep.pair[0]}, k'={rep.pair[1]}, shift={rep.shift})"
    print(f"paraunitarity residual {rep.residual:.3e}{where}")
    for k, f in enumerate(fb.filters):
        print(f"power complementarity filter {k}: {power_complementarity(f, fb.dual):.3e}")
    if fb.dim == 1:
        for k, f in enumerate(fb.filters):
            moms = vanishing_moments(f, args.moments)
            print(f"moments filter {k}: " + " ".join(f"{abs(m):.3e}" for m in moms))
    print("QMF: yes" if rep.ok else f"QMF: no (tol {args.tol:g})")
    return EXIT_OK if rep.ok else EXIT_DOMAIN


def cmd_factor(args) -> int:
    fb = qio.load_bank(_read(args.bank))
    if fb.dim != 1 or fb.size != 2:
        print(
            f"error: factorization needs a 1-D two-channel bank, got dim {fb.dim} with {fb.size} channels",
            file=sys.stderr,
        )
        return EXIT_DOMAIN
    result = factorize_1d(fb, args.tol)
    err = reconstruct(result).max_abs_diff(fb)
    _emit(qio.dump_steps(result), args.out)
    stream = _report_stream(args)
    print(f"steps {len(result.steps)}  translation {result.translation[0]}", file=stream)
    print(f"round-trip error {err:.3e}", file=stream)
    return EXIT_OK


def cmd_synth(args) -> int:
    result = qio.load_steps(_read(args.steps))
    fb = synthesize(result.lattice, result.steps, result.translation)
    rep = is_qmf(fb, args.tol)
    stream = _report_stream(args)
    if not rep.ok:
        print(f"error: synthesized bank fails verification (residual {rep.residual:.3e})", file=sys.stderr)
        return EXIT_DOMAIN
    _emit(qio.dump_bank(fb), args.out)
    print(f"synthesized {len(result.steps)} steps, paraunitarity residual {rep.residual:.3e}", file=stream)
    return EXIT_OK


def cmd_transform(args) -> int:
    fb = qio.load_bank(_read(args.bank))
    text = _read(args.signal)
    stream = _report_stream(args)
    if args.direction == "synthesize":
        sub = qio.load_subbands(text)
        if sub.lattice != fb.lattice:
            print("error: subbands were produced on a different lattice", file=sys.stderr)
            return EXIT_DOMAIN
        out = synthesis(fb, sub)
        energies = sub.energies()
        _emit(qio.dump_signal(out), args.out)
        total = out.norm2()
    else:
        sig = qio.load_signal(text)
        if sig.dim != fb.dim:
            print(f"error: signal of dimension {sig.dim} for a {fb.dim}-D bank", file=sys.stderr)
            return EXIT_DOMAIN
        total = sig.norm2()
        if args.direction == "analyze":
            sub = analysis(fb, sig)
            energies = sub.energies()
            _emit(qio.dump_subbands(sub), args.out)
        else:
            out = apply_unitary(fb, sig, args.tol)
            energies = analysis(fb, out).energies()
            _emit(qio.dump_signal(out), args.out)
    print(f"signal energy {total:.15g}", file=stream)
    for k, e in enumerate(energies):
        print(f"channel {k} energy {e:.15g}", file=stream)
    print(f"channel sum {sum(energies):.15g}", file=stream)
    return EXIT_OK


def cmd_moments(args) -> int:
    fb = qio.load_bank(_read(args.bank))
    for k, f in enumerate(fb.filters):
        moms = vanishing_moments(f, args.order)
        print(f"filter {k}: " + " ".join(f"{m.real!r}{m.imag:+}j" for m in moms))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmfloops", description="Build, verify, factor and apply QMF filter banks.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a lazy, Haar or random bank")
    g.add_argument("kind", choices=["lazy", "haar", "random"])
    g.add_argument("--lattice", type=parse_lattice, default=parse_lattice("2"))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--steps", type=int, default=2)
    g.add_argument("--real", action="store_true", help="random bank with real taps")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="check the QMF condition")
    v.add_argument("bank")
    v.add_argument("--tol", type=float, default=DEFAULT_TOL)
    v.add_argument("--moments", type=int, default=3, help="highest moment order in the report")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("factor", help="factor a 1-D two-channel bank into steps")
    f.add_argument("bank")
    f.add_argument("--tol", type=float, default=DEFAULT_TOL)
    f.add_argument("--out")
    f.set_defaults(func=cmd_factor)

    s = sub.add_parser("synth", help="synthesize a bank from a steps file")
    s.add_argument("steps")
    s.add_argument("--tol", type=float, default=DEFAULT_TOL)
    s.add_argument("--out")
    s.set_defaults(func=cmd_synth)

    t = sub.add_parser("transform", help="analyze, synthesize or apply the unitary")
    t.add_argument("bank")
    t.add_argument("signal", help="signal file, or subband file for --direction synthesize")
    t.add_argument("--direction", choices=["analyze", "synthesize", "unitary"], default="analyze")
    t.add_argument("--tol", type=float, default=DEFAULT_TOL)
    t.add_argument("--out")
    t.set_defaults(func=cmd_transform)

    m = sub.add_parser("moments", help="print filter moments")
    m.add_argument("bank")
    m.add_argument("--order", type=int, default=3)
    m.set_defaults(func=cmd_moments)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, _IOFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except QMFError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
