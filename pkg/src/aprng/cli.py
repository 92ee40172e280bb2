"""Command line front end.

One process, one command.  Letters print as ASCII digits by default
(``--raw`` switches to one byte per letter), generator streams are raw
little-endian 32-bit words, analysis results are JSON.  Identical
invocations produce byte-identical output; thread count comes from the
APRNG_THREADS environment variable and never changes results.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .errors import SpecParseError
from .lattice import (consecutive_tuples, dump_points, plane_count,
                      search_normals)
from .prng import stream_export
from .specs import (ShuffleSpec, build_word, parse_gen_list,
                    parse_gen_spec, parse_number, parse_word_spec)
from .stats import (LowBitsSource, ScaledSource, chi_square_equidist,
                    gap_test, serial_pairs)
from .welldoc import welldoc_scan
from .words import word_to_text

_TEXT_CHUNK = 1 << 20
_REPORT_CAP = 10          # search results included in lattice JSON
DEFAULT_WARMUP = 10 ** 9


def _num(text: str) -> int:
    try:
        return parse_number(text)
    except SpecParseError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _interval(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(
            f"expected lo,hi like 0.25,0.75, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"interval bounds must be numbers, got {text!r}") from None


def _normal(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma separated integers like 9,-6,1, got {text!r}") from None


def _print_json(obj, stream=None) -> None:
    stream = stream or sys.stdout
    json.dump(obj, stream, indent=2)
    stream.write("\n")


class _Sink:
    """Binary output target: a path, or '-' for stdout."""

    def __init__(self, path: str):
        self.path = path

    def __enter__(self):
        if self.path == "-":
            self._own = False
            self._f = sys.stdout.buffer
        else:
            self._own = True
            self._f = open(self.path, "wb")
        return self._f

    def __exit__(self, *exc):
        if self._own:
            self._f.close()
        else:
            self._f.flush()
        return False


def _make_gen(args) -> object:
    """Build the generator named by the subcommand's arguments and warm it."""
    if getattr(args, "word", None) is not None:
        word = parse_word_spec(args.word)
        spec = ShuffleSpec(word, parse_gen_list(",".join(args.gens)))
    else:
        spec = parse_gen_spec(args.spec)
    gen = spec.build(args.seed)
    if args.warmup:
        gen.warm_up(args.warmup)
    return gen


def _cmd_word(args) -> int:
    stream = build_word(parse_word_spec(args.spec),
                        block_cap=args.block_cap,
                        convention=args.convention)
    remaining = args.count
    if args.raw:
        with _Sink(args.out) as f:
            while remaining > 0:
                take = min(_TEXT_CHUNK, remaining)
                f.write(bytes(stream.take(take)))
                remaining -= take
        return 0
    out = sys.stdout if args.out == "-" else open(args.out, "w")
    try:
        while remaining > 0:
            take = min(_TEXT_CHUNK, remaining)
            out.write(word_to_text(bytes(stream.take(take))))
            remaining -= take
        out.write("\n")
    finally:
        if out is not sys.stdout:
            out.close()
        else:
            out.flush()
    return 0


def _cmd_gen(args) -> int:
    gen = _make_gen(args)
    with _Sink(args.out) as f:
        stream_export(gen, args.count, f)
    return 0


def _cmd_welldoc(args) -> int:
    stream = build_word(parse_word_spec(args.spec))
    reports = welldoc_scan(stream, args.m, args.factor_len,
                           max_prefix=args.prefix, threads=args.threads)
    factors = {word_to_text(k): v.as_dict() for k, v in reports.items()}
    verdict = ("COVERED" if all(v.verdict == "COVERED"
                                for v in reports.values())
               else "UNDETERMINED")
    _print_json({
        "word": args.spec,
        "modulus": args.m,
        "max_factor_len": args.factor_len,
        "prefix": args.prefix,
        "verdict": verdict,
        "factors": factors,
    })
    return 0


def _cmd_lattice(args) -> int:
    gen = _make_gen(args)
    scale = args.scale or getattr(gen, "out_range", None) or 1 << 32
    tuples = consecutive_tuples(gen, args.sample, args.t)
    if args.dump:
        dump_points(tuples, scale, args.dump)
    result = {
        "generator": args.spec if args.word is None else
        f"shuffle:{args.word}:{','.join(args.gens)}",
        "t": args.t,
        "scale": scale,
        "sample": args.sample,
    }
    if args.normal is not None:
        report = plane_count(tuples, args.normal, scale)
        result["best"] = report.as_dict()
        result["reports"] = [report.as_dict()]
    else:
        result["bound"] = args.bound
        reports = search_normals(tuples, scale, args.bound,
                                 threads=args.threads)
        result["best"] = reports[0].as_dict()
        result["reports"] = [r.as_dict() for r in reports[:_REPORT_CAP]]
    if args.json:
        _print_json(result)
    else:
        best = result["best"]
        print(f"best normal {tuple(best['normal'])}: "
              f"{best['plane_count']} of {best['comparison']} classes "
              f"(ratio {best['ratio']:.4f}) over {best['sample_size']} tuples")
    return 0


def _cmd_stats(args) -> int:
    gen = _make_gen(args)
    if args.lowbits:
        gen = LowBitsSource(gen, args.lowbits)
    elif getattr(gen, "out_range", 1 << 32) not in (None, 1 << 32):
        gen = ScaledSource(gen)
    if args.test == "chi2":
        report = chi_square_equidist(gen, args.bins, args.n)
    elif args.test == "serial":
        report = serial_pairs(gen, args.bins, args.n)
    else:
        report = gap_test(gen, args.interval, args.n)
    if args.json:
        _print_json(report.as_dict())
    else:
        print(f"{report.name}: statistic {report.statistic:.4f} "
              f"df {report.df} p {report.p_value:.6g} (n {report.n})")
    return 0


def _cmd_bench(args) -> int:
    stream = build_word(parse_word_spec(args.spec), block_cap=args.block_cap)
    remaining = args.letters
    t0 = time.perf_counter()
    while remaining > 0:
        take = min(1 << 22, remaining)
        stream.take(take)
        remaining -= take
    elapsed = time.perf_counter() - t0
    result = {
        "word": args.spec,
        "letters": args.letters,
        "seconds": elapsed,
        "letters_per_second": args.letters / elapsed if elapsed else None,
        "max_stack_depth": getattr(stream, "max_stack_depth", None),
    }
    if args.json:
        _print_json(result)
    else:
        rate = result["letters_per_second"]
        depth = result["max_stack_depth"]
        print(f"{args.letters} letters in {elapsed:.3f} s "
              f"({rate:.0f} letters/s), peak stack depth "
              f"{depth if depth is not None else 'n/a'}")
    return 0


def _add_gen_arguments(sub, shuffle: bool) -> None:
    if shuffle:
        sub.add_argument("word", help="steering word descriptor")
        sub.add_argument("gens", nargs="+",
                         help="source generator descriptors (commas or spaces)")
    else:
        sub.add_argument("spec", help="generator descriptor")
    sub.add_argument("--seed", type=_num, default=None,
                     help="override every source seed")
    sub.add_argument("--warmup", type=_num, default=DEFAULT_WARMUP,
                     help="outputs to skip before use (default 1e9; 0 disables)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="aprng",
        description="Aperiodic words, steered generators, and their analysis.")
    sp = p.add_subparsers(dest="command", required=True)

    w = sp.add_parser("word", help="emit letters of a word")
    w.add_argument("spec", help="word descriptor, e.g. fib or morphism:0->01,1->0")
    w.add_argument("--count", type=_num, default=64, help="letters to emit")
    w.add_argument("--raw", action="store_true",
                   help="one byte per letter instead of ASCII digits")
    w.add_argument("--out", default="-", help="output file, - for stdout")
    w.add_argument("--block-cap", type=_num, default=None,
                   help="morphic expansion block size limit")
    w.add_argument("--convention", choices=("left", "right"), default=None,
                   help="half-open interval side for rotation words")
    w.set_defaults(func=_cmd_word, word=None)

    g = sp.add_parser("gen", help="emit raw 32-bit outputs of a generator")
    _add_gen_arguments(g, shuffle=False)
    g.add_argument("--count", type=_num, required=True, help="outputs to emit")
    g.add_argument("--out", default="-", help="output file, - for stdout")
    g.set_defaults(func=_cmd_gen, word=None)

    s = sp.add_parser("shuffle",
                      help="emit outputs of a word-steered source mix")
    _add_gen_arguments(s, shuffle=True)
    s.add_argument("--count", type=_num, required=True, help="outputs to emit")
    s.add_argument("--out", default="-", help="output file, - for stdout")
    s.set_defaults(func=_cmd_gen, spec=None)

    wd = sp.add_parser("welldoc", help="letter-count coverage report (JSON)")
    wd.add_argument("spec", help="word descriptor")
    wd.add_argument("--m", type=_num, default=2, help="count modulus")
    wd.add_argument("--factor-len", type=_num, default=4,
                    help="largest factor length to scan")
    wd.add_argument("--prefix", type=_num, default=10 ** 7,
                    help="prefix length budget")
    wd.add_argument("--threads", type=_num, default=None,
                    help="worker threads (default APRNG_THREADS or 1)")
    wd.set_defaults(func=_cmd_welldoc)

    la = sp.add_parser("lattice", help="hyperplane structure of output tuples")
    _add_gen_arguments(la, shuffle=False)
    la.add_argument("--t", type=_num, default=3, help="tuple dimension")
    la.add_argument("--bound", type=_num, default=10,
                    help="largest |coefficient| searched")
    la.add_argument("--sample", type=_num, default=10 ** 6,
                    help="outputs sampled")
    la.add_argument("--scale", type=_num, default=None,
                    help="output range (default: inferred)")
    la.add_argument("--normal", type=_normal, default=None,
                    help="check one normal like 9,-6,1 instead of searching")
    la.add_argument("--dump", default=None, metavar="FILE",
                    help="also write the sample as normalized CSV points")
    la.add_argument("--threads", type=_num, default=None,
                    help="worker threads (default APRNG_THREADS or 1)")
    la.add_argument("--json", action="store_true", help="JSON output")
    la.set_defaults(func=_cmd_lattice, word=None)

    st = sp.add_parser("stats", help="desk-scale statistical tests")
    _add_gen_arguments(st, shuffle=False)
    st.add_argument("--test", choices=("chi2", "serial", "gap"),
                    required=True, help="which test to run")
    st.add_argument("--n", type=_num, default=10 ** 7, help="sample size")
    st.add_argument("--bins", type=_num, default=64,
                    help="cells for chi2/serial")
    st.add_argument("--interval", type=_interval, default=(0.25, 0.75),
                    help="gap test target interval lo,hi in [0,1)")
    st.add_argument("--lowbits", type=_num, default=0,
                    help="test only the lowest K state bits")
    st.add_argument("--json", action="store_true", help="JSON output")
    st.set_defaults(func=_cmd_stats, word=None)

    b = sp.add_parser("bench", help="generation throughput")
    b.add_argument("spec", help="word descriptor")
    b.add_argument("--letters", type=_num, default=10 ** 8,
                   help="letters to generate")
    b.add_argument("--block-cap", type=_num, default=None,
                   help="morphic expansion block size limit")
    b.add_argument("--json", action="store_true", help="JSON output")
    b.set_defaults(func=_cmd_bench)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
