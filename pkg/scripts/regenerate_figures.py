"""Regenerate every figure family as CSV + SVG under one output directory.

    python3 scripts/regenerate_figures.py                 # all jobs, full grids
    python3 scripts/regenerate_figures.py --quick         # 10x10 grids, short traces
    python3 scripts/regenerate_figures.py --only rates_vs_xi concurrence_plane_asymmetric

Each job is a call to the ``floqent`` command line with fixed overrides, so
any job can be repeated by hand from the command printed before it runs.
"""
import argparse
import os
import shlex
import sys
import time

from floqent.cli import main as floqent

OFF_RESONANCE = ["model.eps0=3.7", "drive.amplitude=3.8"]

JOBS = {
    "spectrum_negative_J": ("spectrum", ["model.J=-2.5"]),
    "spectrum_positive_J": ("spectrum", ["model.J=2.5"]),
    "concurrence_plane_symmetric": (
        "sweep", ["bath.xi=1", "sweep.x=A,0,5,{n}", "sweep.y=eps0,0,5,{n}"]),
    "concurrence_plane_asymmetric": (
        "sweep", ["bath.xi=0.1", "sweep.x=A,0,5,{n}", "sweep.y=eps0,0,5,{n}"]),
    "populations_off_resonance": ("trace", OFF_RESONANCE + ["bath.xi=0.1", "numerics.horizon={h}"]),
    "rates_vs_xi": ("rates", OFF_RESONANCE),
    "rates_vs_xi_undriven": ("rates", ["model.eps0=3.7", "drive.amplitude=0"]),
    "rates_vs_xi_positive_J": ("rates", OFF_RESONANCE + ["model.J=2.5"]),
    "concurrence_xi_amplitude": (
        "sweep", ["model.eps0=3.7", "sweep.x=xi,0,1,{n}", "sweep.y=A,0,5,{n}"]),
    "concurrence_vs_eps0_strong_drive": (
        "sweep", ["bath.xi=0.1", "drive.amplitude=3.8", "sweep.x=eps0,0,5,{m}"]),
    "concurrence_near_resonances": (
        "sweep", ["bath.xi=0.1", "drive.amplitude=1.5", "sweep.x=eps0,3,4,{m}"]),
    "populations_ground_entangled_resonance": (
        "trace", ["model.eps0=3.25", "drive.amplitude=3.8", "bath.xi=0.1", "numerics.horizon={h}"]),
    "populations_entangled_upper_resonance": (
        "trace", ["model.eps0=3.75", "drive.amplitude=3.8", "bath.xi=0.1", "numerics.horizon={h}"]),
    "concurrence_J_eps0_symmetric": (
        "sweep", ["bath.xi=1", "drive.amplitude=3.8", "sweep.x=J,-4,4,{n}", "sweep.y=eps0,0,5,{n}"]),
    "concurrence_J_eps0_asymmetric": (
        "sweep", ["bath.xi=0.1", "drive.amplitude=3.8", "sweep.x=J,-4,4,{n}", "sweep.y=eps0,0,5,{n}"]),
}


def command_line(name, out, quick, workers):
    command, overrides = JOBS[name]
    sizes = dict(n=10, m=41, h=2000) if quick else dict(n=40, m=401, h=100_000)
    argv = [command, "--out", os.path.join(out, name)]
    for item in overrides:
        argv += ["--set", item.format(**sizes)]
    if workers is not None and command == "sweep":
        argv += ["--workers", str(workers)]
    return argv


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="figures")
    parser.add_argument("--only", nargs="+", choices=sorted(JOBS), default=list(JOBS))
    parser.add_argument("--quick", action="store_true", help="coarse grids for a smoke run")
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args(argv)
    failed = []
    for name in args.only:
        cmd = command_line(name, args.out, args.quick, args.workers)
        print("floqent " + " ".join(shlex.quote(c) for c in cmd), flush=True)
        start = time.perf_counter()
        code = floqent(cmd)
        print(f"  {name}: exit {code} in {time.perf_counter() - start:.1f}s", flush=True)
        if code:
            failed.append(name)
    if failed:
        print("failed: " + ", ".join(failed), file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
