"""Command-line front end: ``nbldpc <subcommand> ...``."""

import argparse
import io
import logging
import os
import sys
from dataclasses import replace

import numpy as np

from . import gf as gf_mod
from .code import load_alist, random_regular, save_alist
from .errors import ConfigurationError, DomainError, ParseError
from .ijdd import IjddParams, decode
from .modem import build_qam
from .qspa import channel_likelihoods, fft_qspa_decode
from .sim import (DECODERS, SOURCES, load_config, run_sweep, scatter_dump, write_curve_csv,
                  write_scatter_csv, write_trajectory_csv)

log = logging.getLogger("nbldpc")


def _config_overrides(p):
    g = p.add_argument_group("config overrides")
    g.add_argument("--seed", type=int, help="master seed (overrides the config)")
    g.add_argument("--decoder", choices=DECODERS)
    g.add_argument("--source", choices=SOURCES)
    g.add_argument("--k-max", dest="k_max", type=int)
    g.add_argument("--r-factor", dest="r_factor", type=float)
    g.add_argument("--T", dest="T", type=int)
    g.add_argument("--min-word-errors", dest="min_word_errors", type=int)
    g.add_argument("--max-frames", dest="max_frames", type=int)
    g.add_argument("--rate", type=float, help="code rate used for Eb/N0 normalization")
    g.add_argument("--batch", type=int, help="frames per work unit")


def _overrides(args):
    keys = ("seed", "decoder", "source", "k_max", "r_factor", "T", "min_word_errors",
            "max_frames", "rate", "batch")
    return {k: getattr(args, k) for k in keys}


def build_parser():
    p = argparse.ArgumentParser(prog="nbldpc", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="Eb/N0 sweep from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True, help="curve CSV path ('-' for stdout)")
    s.add_argument("--ebn0", type=float, nargs="+", help="override the config sweep")
    s.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    s.add_argument("--figure", help="also render the curves to this image file")
    _config_overrides(s)

    d = sub.add_parser("decode", help="decode one received-vector file")
    d.add_argument("--code", required=True, help="alist file")
    d.add_argument("--input", required=True, help="text file, one 're im' sample per line")
    d.add_argument("--decoder", choices=("ijdd", "fft-qspa"), default="ijdd")
    d.add_argument("--k-max", dest="k_max", type=int, default=50)
    d.add_argument("--r-factor", dest="r_factor", type=float, default=1.415)
    d.add_argument("--T", dest="T", type=int, default=3)
    d.add_argument("--n0", type=float, help="noise density (required for fft-qspa)")
    d.add_argument("--trajectory", help="write per-iteration y snapshots (ijdd) to this CSV")
    d.add_argument("--out", help="write the codeword here instead of stdout")

    m = sub.add_parser("make-code", help="write a random regular code as alist")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--dv", type=int, required=True)
    m.add_argument("--dc", type=int, required=True)
    m.add_argument("--q", type=int, required=True)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out", required=True)

    c = sub.add_parser("scatter", help="received vs corrected signal space (IJDD)")
    c.add_argument("--config", required=True)
    c.add_argument("--ebn0", type=float, default=8.0)
    c.add_argument("--frames", type=int, default=20)
    c.add_argument("--iters", type=int, default=10)
    c.add_argument("--out", required=True)
    c.add_argument("--figure", help="also render the scatter plot to this image file")
    c.add_argument("--seed", type=int)

    f = sub.add_parser("field-check", help="verify GF(2^p) arithmetic")
    f.add_argument("--p", type=int, nargs="+", default=list(range(2, 9)))
    f.add_argument("--samples", type=int, default=100_000)
    return p


def read_received(path):
    """Samples from a text file with one ``re im`` (or ``re,im``) pair per line."""
    with open(path) as f:
        text = f.read().replace(",", " ")
    try:
        data = np.loadtxt(io.StringIO(text), ndmin=2)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if data.shape[1] != 2:
        raise ParseError(f"{path}: expected two columns (re im), got {data.shape[1]}")
    return data[:, 0] + 1j * data[:, 1]


def cmd_simulate(args):
    cfg = load_config(args.config, **_overrides(args))
    if args.ebn0:
        cfg = replace(cfg, ebn0=tuple(args.ebn0))
    results = run_sweep(cfg, workers=max(1, args.workers))
    if args.out == "-":
        write_curve_csv(results, sys.stdout)
    else:
        write_curve_csv(results, args.out)
    if args.figure:
        from .plots import plot_curves
        plot_curves({cfg.decoder: results}, args.figure)
    return 0


def cmd_decode(args):
    h = load_alist(args.code)
    c = build_qam(h.q)
    y = read_received(args.input)
    if args.decoder == "ijdd":
        res = decode(h, c, y, IjddParams(args.k_max, args.r_factor, args.T),
                     record=bool(args.trajectory))
        if args.trajectory:
            write_trajectory_csv(res.trajectory, args.trajectory)
    else:
        if args.n0 is None:
            raise ConfigurationError("--n0 is required for fft-qspa")
        res = fft_qspa_decode(h, channel_likelihoods(c, y, args.n0), args.k_max)
    line = " ".join(map(str, res.codeword.tolist())) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(line)
    else:
        sys.stdout.write(line)
    log.info("%s after %d iterations", res.status, res.iterations_used)
    if not res.success:
        print(f"decoding failure after {res.iterations_used} iterations", file=sys.stderr)
    return 0 if res.success else 1


def cmd_make_code(args):
    h = random_regular(args.n, args.dv, args.dc, args.q, args.seed)
    save_alist(h, args.out)
    log.info("wrote %r to %s", h, args.out)
    return 0


def cmd_scatter(args):
    overrides = {"seed": args.seed} if args.seed is not None else {}
    cfg = load_config(args.config, **overrides)
    data = scatter_dump(cfg, args.ebn0, args.frames, k_max=args.iters)
    write_scatter_csv(data, args.out)
    if args.figure:
        from .plots import plot_scatter
        plot_scatter(build_qam(cfg.q), data.initial_y, data.final_y, args.figure)
    return 0


def cmd_field_check(args):
    failures = []
    for p in args.p:
        f = gf_mod.build_field(p)
        bad = gf_mod.self_check(f, samples=args.samples)
        status = "FAIL" if bad else "ok"
        print(f"GF({f.q}) poly={f.primitive_poly:#x}: {status}")
        failures += bad
    for msg in failures:
        print(msg, file=sys.stderr)
    return 1 if failures else 0


COMMANDS = {"simulate": cmd_simulate, "decode": cmd_decode, "make-code": cmd_make_code,
            "scatter": cmd_scatter, "field-check": cmd_field_check}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (ConfigurationError, ParseError, DomainError, OSError) as exc:
        print(f"nbldpc {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
