"""Fitted decay exponents of rarefaction-profile derivatives for several anchors.

The L-infinity exponent approaches -1 only slowly when the fan is narrow or
cold, because the sup sits near the fan edge. This script tabulates the fitted
exponents over t in [20, 200] so the anchor used in the acceptance suite can be
compared with alternatives.

    python scripts/rarefaction_rates.py
"""
import argparse

import numpy as np

from wavepatterns.diagnostics import decay_fit
from wavepatterns.gas import GasParams, ThermoState
from wavepatterns.rarefaction import derivative_norms, make_rarefaction, strength


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--cases", default="1:1.2,1:1.5,4:1.5,4:2.0",
                   help="comma-separated theta-:v-^m pairs for a family-1 wave from (1, 0, theta-)")
    args = p.parse_args(argv)
    params = GasParams()
    ts = np.geomspace(20, 200, 10)
    print(f"{'theta-':>7} {'v-^m':>6} {'L2':>7} {'Linf':>7} {'d2 L2':>7} {'d2 Linf':>8} {'L1/delta':>9}")
    for item in args.cases.split(","):
        th, vm = (float(s) for s in item.split(":"))
        spec = make_rarefaction(params, 1, ThermoState(1.0, 0.0, th), vm)
        rows = [derivative_norms(spec, params, t) for t in ts]
        ex = [decay_fit(ts, [r[k] for r in rows]).exponent
              for k in (("d1", 2), ("d1", np.inf), ("d2", 2), ("d2", np.inf))]
        l1 = max(r[("d1", 1)] for r in rows) / strength(spec, params)
        print(f"{th:7.2f} {vm:6.2f} " + " ".join(f"{e:7.3f}" for e in ex) + f" {l1:9.3f}")


if __name__ == "__main__":
    main()
