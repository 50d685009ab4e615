"""Command-line front end.

Subcommands::

    rissm simulate   Monte Carlo BER curve       -> snr_db,ber,bit_errors,bits,seed,flags
    rissm analyze    union-bound ABEP curve      -> snr_db,abep_bound,Q
    rissm validate   simulation vs. analysis     -> per-point gap in standard errors
    rissm reproduce  --figure {2,3,4,5}          -> one CSV per curve in --out DIR

Settings come from built-in defaults, then an optional ``--config`` file of
flat ``key = value`` lines (keys are the long flag names without dashes),
then command-line flags.

Exit codes: 0 success, 1 I/O or runtime failure, 2 usage error,
3 validation found divergent points.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import logging
import math
import os
import sys
from dataclasses import dataclass, replace
from typing import Optional

from .analytic import DEFAULT_Q, abep_union_bound
from .channel import PhaseErrorSpec
from .errors import ParameterError
from .modem import Scheme, build_constellation
from .montecarlo import SimConfig, simulate_curve

log = logging.getLogger("rissm")

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_DIVERGED = 3

# CLT regime where simulation and analysis are expected to agree
CLT_MIN_L = 80
VALIDATE_SIGMAS = 3.0

DEFAULTS = {
    "nt": "2",
    "mod": "psk",
    "m": "2",
    "ris-elements": "100",
    "snr-start": "-40",
    "snr-stop": "-10",
    "snr-step": "2",
    "seed": "0",
    "min-errors": "100",
    "max-trials": "1000000",
    "gcq-nodes": str(DEFAULT_Q),
    "phase-error": "ideal",
    "workers": "1",
}

SIM_HEADER = ["snr_db", "ber", "bit_errors", "bits", "seed", "flags"]
ANALYZE_HEADER = ["snr_db", "abep_bound", "Q"]
VALIDATE_HEADER = ["snr_db", "ber", "abep_bound", "bit_errors", "bits", "z", "status"]


@dataclass(frozen=True)
class ExperimentSpec:
    mode: str
    sim: SimConfig
    Q: int
    out: str
    workers: int = 1
    figure: Optional[int] = None


class UsageError(Exception):
    pass


def snr_grid(start: float, stop: float, step: float) -> tuple:
    """Inclusive grid ``start, start+step, ... <= stop`` rounded to 1e-9 dB."""
    if step <= 0:
        raise UsageError("snr-step must be positive")
    if stop < start:
        return ()
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 9) for i in range(n))


def _fmt_snr(v: float) -> str:
    return f"{v:.2f}"


def _fmt_prob(v: float) -> str:
    return f"{v:.6e}"


# ---------------------------------------------------------------------------
# settings


def _read_config(path: str) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_string("[rissm]\n" + fh.read(), source=path)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise UsageError(f"bad config file {path}: {exc}") from exc
    values = {k.replace("_", "-"): v for k, v in parser["rissm"].items()}
    unknown = sorted(set(values) - set(DEFAULTS) - {"out"})
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return values


def _settings(args) -> dict:
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(_read_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            merged[key] = str(val)
    if getattr(args, "out", None) is not None:
        merged["out"] = args.out
    return merged


def build_spec(mode: str, args) -> ExperimentSpec:
    s = _settings(args)
    try:
        sim = SimConfig(
            N_t=int(s["nt"]),
            M=int(s["m"]),
            L=int(s["ris-elements"]),
            scheme=Scheme(s["mod"].lower()),
            phase_error=PhaseErrorSpec.parse(s["phase-error"]),
            snr_db=snr_grid(float(s["snr-start"]), float(s["snr-stop"]), float(s["snr-step"])),
            min_bit_errors=int(s["min-errors"]),
            max_trials=int(float(s["max-trials"])),
            seed=int(s["seed"]),
        )
        Q = int(s["gcq-nodes"])
        workers = int(s["workers"])
    except (ValueError, ParameterError) as exc:
        raise UsageError(str(exc)) from exc
    if Q < 1:
        raise UsageError("gcq-nodes must be >= 1")
    return ExperimentSpec(mode, sim, Q, s.get("out", "-"), max(workers, 1), getattr(args, "figure", None))


# ---------------------------------------------------------------------------
# CSV


def _write_csv(path: str, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    text = buf.getvalue()
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def simulate_rows(sim: SimConfig, workers: int = 1):
    curve = simulate_curve(sim, workers=workers)
    rows = []
    for p in curve.points:
        flags = "" if p.converged else "insufficient_errors"
        rows.append([_fmt_snr(p.snr_db), _fmt_prob(p.ber), p.bit_errors, p.bits, sim.seed, flags])
    return curve, rows


def analyze_rows(sim: SimConfig, Q: int):
    c = build_constellation(sim.scheme, sim.M)
    values = [abep_union_bound(sim.N_t, c, sim.L, 10.0 ** (v / 10.0), Q) for v in sim.snr_db]
    rows = [[_fmt_snr(v), _fmt_prob(b), Q] for v, b in zip(sim.snr_db, values)]
    return values, rows


def validate_rows(sim: SimConfig, Q: int, workers: int = 1):
    """Compare simulation with the bound point by point.

    For ``N_t = 2, M = 1`` the bound is exact and the gap is checked on both
    sides; otherwise only ``ber - bound`` (the bound being violated) counts.
    Points short of ``min_bit_errors`` are reported but not judged.
    """
    curve = simulate_curve(sim, workers=workers)
    bounds, _ = analyze_rows(sim, Q)
    exact = sim.N_t == 2 and sim.M == 1
    rows, diverged = [], 0
    for p, b in zip(curve.points, bounds):
        if not p.converged or p.bit_errors == 0:
            z, status = float("nan"), "insufficient_errors"
        else:
            z = (p.ber - b) / p.std_error
            bad = abs(z) > VALIDATE_SIGMAS if exact else z > VALIDATE_SIGMAS
            status = "diverged" if bad else "pass"
            diverged += bad
        rows.append(
            [_fmt_snr(p.snr_db), _fmt_prob(p.ber), _fmt_prob(b), p.bit_errors, p.bits, f"{z:.3f}", status]
        )
    return rows, diverged


def run_simulate(spec: ExperimentSpec) -> int:
    _, rows = simulate_rows(spec.sim, spec.workers)
    _write_csv(spec.out, SIM_HEADER, rows)
    return EXIT_OK


def run_analyze(spec: ExperimentSpec) -> int:
    _, rows = analyze_rows(spec.sim, spec.Q)
    _write_csv(spec.out, ANALYZE_HEADER, rows)
    return EXIT_OK


def run_validate(spec: ExperimentSpec) -> int:
    rows, diverged = validate_rows(spec.sim, spec.Q, spec.workers)
    _write_csv(spec.out, VALIDATE_HEADER, rows)
    if diverged:
        regime = "inside" if spec.sim.L >= CLT_MIN_L else "outside"
        log.warning(
            "%d point(s) diverge by more than %.0f standard errors (L=%d, %s the CLT regime L >= %d)",
            diverged, VALIDATE_SIGMAS, spec.sim.L, regime, CLT_MIN_L,
        )
        return EXIT_DIVERGED
    return EXIT_OK


# ---------------------------------------------------------------------------
# figure presets

PRESET_GRIDS = {
    2: (-45.0, 10.0, 5.0),
    3: (-40.0, -10.0, 2.0),
    4: (-40.0, -10.0, 2.0),
    5: (-40.0, 30.0, 5.0),
}


def preset_curves(figure: int, base: SimConfig):
    """``(tag, SimConfig, with_analysis)`` for every curve of a figure."""
    if figure == 2:
        return [
            (f"L{L}", replace(base, N_t=2, M=1, L=L, scheme=Scheme.PSK, phase_error=PhaseErrorSpec.ideal()), True)
            for L in (10, 20, 40, 80, 160)
        ]
    if figure == 3:
        return [
            (f"M{M}", replace(base, N_t=2, M=M, L=100, phase_error=PhaseErrorSpec.ideal()), True)
            for M in (2, 4, 8)
        ]
    if figure == 4:
        return [
            (f"Nt{nt}", replace(base, N_t=nt, M=2, L=100, scheme=Scheme.PSK, phase_error=PhaseErrorSpec.ideal()), True)
            for nt in (4, 16)
        ]
    if figure == 5:
        errs = [("ideal", PhaseErrorSpec.ideal())]
        errs += [(f"k{k}", PhaseErrorSpec.uniform(k)) for k in (2, 4, 8)]
        errs += [("random", PhaseErrorSpec.random())]
        return [
            (tag, replace(base, N_t=2, M=2, L=100, scheme=Scheme.PSK, phase_error=pe), pe.kind == "ideal")
            for tag, pe in errs
        ]
    raise UsageError(f"unknown figure {figure}; choose 2, 3, 4 or 5")


def run_reproduce(spec: ExperimentSpec, grid_overridden: bool) -> int:
    base = spec.sim
    if not grid_overridden:
        base = replace(base, snr_db=snr_grid(*PRESET_GRIDS[spec.figure]))
    outdir = spec.out if spec.out != "-" else f"figure{spec.figure}"
    os.makedirs(outdir, exist_ok=True)
    for tag, cfg, with_analysis in preset_curves(spec.figure, base):
        log.info("figure %d: %s", spec.figure, tag)
        _, rows = simulate_rows(cfg, spec.workers)
        _write_csv(os.path.join(outdir, f"fig{spec.figure}_{tag}_sim.csv"), SIM_HEADER, rows)
        if with_analysis:
            _, rows = analyze_rows(cfg, spec.Q)
            _write_csv(os.path.join(outdir, f"fig{spec.figure}_{tag}_analytic.csv"), ANALYZE_HEADER, rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value settings file")
    p.add_argument("--nt", type=int, help="transmit antennas (power of two)")
    p.add_argument("--mod", choices=["psk", "qam"], help="symbol constellation")
    p.add_argument("--m", type=int, help="modulation order (1 gives space shift keying)")
    p.add_argument("--ris-elements", type=int, help="number of RIS elements L")
    p.add_argument("--snr-start", type=float, help="first SNR point [dB]")
    p.add_argument("--snr-stop", type=float, help="last SNR point [dB], inclusive")
    p.add_argument("--snr-step", type=float, help="SNR spacing [dB]")
    p.add_argument("--seed", type=int, help="64-bit RNG seed")
    p.add_argument("--min-errors", type=int, help="bit errors to collect per point")
    p.add_argument("--max-trials", type=int, help="trial cap per point")
    p.add_argument("--gcq-nodes", type=int, help="quadrature nodes Q")
    p.add_argument("--phase-error", help="ideal | uniform:<k> | random")
    p.add_argument("--workers", type=int, help="threads for SNR points")
    p.add_argument("--out", help="output CSV path ('-' for stdout); a directory for reproduce")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rissm", description="RIS-assisted spatial modulation: BER simulation and ABEP union bound"
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("simulate", "Monte Carlo BER curve"),
        ("analyze", "union-bound ABEP curve"),
        ("validate", "compare simulation with analysis"),
        ("reproduce", "run a figure preset"),
    ]:
        p = sub.add_parser(name, help=text)
        _add_common(p)
        if name == "reproduce":
            p.add_argument("--figure", type=int, required=True, choices=[2, 3, 4, 5])
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        spec = build_spec(args.command, args)
        if args.command == "simulate":
            return run_simulate(spec)
        if args.command == "analyze":
            return run_analyze(spec)
        if args.command == "validate":
            return run_validate(spec)
        grid_overridden = any(
            getattr(args, k) is not None for k in ("snr_start", "snr_stop", "snr_step")
        ) or bool(args.config and {"snr-start", "snr-stop", "snr-step"} & set(_read_config(args.config)))
        return run_reproduce(spec, grid_overridden)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"rissm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"rissm: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
