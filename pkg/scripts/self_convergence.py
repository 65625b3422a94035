"""Observed order of the solver on the unperturbed reference composite.

Runs N, 2N, 4N on nested grids and reports log2 of the ratio of successive
sup-norm differences, for each half-width L given.

    python scripts/self_convergence.py --L 600 150 --N 1500
"""
import argparse

from wavepatterns.composite import build_composite
from wavepatterns.gas import GasParams, ThermoState
from wavepatterns.riemann import build_forward
from wavepatterns.solver import SolverConfig, self_convergence


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--L", type=float, nargs="+", default=[600.0])
    p.add_argument("--N", type=int, default=1500)
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--limiter", choices=["vanleer", "none"], default="vanleer")
    p.add_argument("--art-visc", type=float, default=0.05)
    args = p.parse_args(argv)
    params = GasParams()
    wave = build_composite(params, build_forward(params, ThermoState(1.0, 0.0, 1.0), 1.003, 1.097, 1.1))
    cfg = SolverConfig(limiter=args.limiter, art_visc=args.art_visc)
    for L in args.L:
        order, (e1, e2) = self_convergence(wave, params, L, args.N, args.t_end, cfg)
        print(f"L={L:g} dx={2 * L / args.N:g}: order {order:.3f} (e1 {e1:.3e}, e2 {e2:.3e})")


if __name__ == "__main__":
    main()
