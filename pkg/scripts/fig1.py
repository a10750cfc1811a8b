"""Damping exponents and cat coherence for the four (varkappa, kappa) sets.

Prints Re Gamma at a few common values of gamma0 t and at zeta t = 50, then
(optionally) draws C12 against gamma0 t with matplotlib.

    python3 scripts/fig1.py [--plot fig1.png] [--t-max 5]
"""

import argparse

import numpy as np

from nsmode.decoherence import c12, c12_from_gamma
from nsmode.kernel import big_gamma_trace, samples_per_period, stationary_reference
from nsmode.params import ReservoirSpec, derive_groups, modulation_from_groups

SETS = [(0.1, 0.1), (0.5, 0.1), (0.1, 0.5), (0.5, 0.5)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-max", type=float, default=5.0, help="gamma0 t horizon")
    ap.add_argument("--alpha0", type=float, default=1.0)
    ap.add_argument("--plot", help="write a PNG with matplotlib")
    args = ap.parse_args()

    res = ReservoirSpec.from_rate(1.0, 1.0)
    traces = {}
    for vk, k in SETS:
        mod = modulation_from_groups(vk, k, res, omega0=1e4)
        # Long enough to reach zeta t = 50 for every set.
        t_end = max(args.t_max, 50 / mod.zeta)
        n = samples_per_period(mod, t_end, 101)
        traces[vk, k] = (mod, big_gamma_trace(derive_groups(mod, res), mod, t_end, n))

    print(f"{'set':>12} " + " ".join(f"G0t={x:<6g}" for x in (1, 2, 5)) + "  zeta t=50")
    for (vk, k), (mod, tr) in traces.items():
        vals = [tr.big_gamma_at(x).real for x in (1.0, 2.0, 5.0)]
        print(f"{vk:>5g},{k:<6g} " + " ".join(f"{v:<10.4f}" for v in vals)
              + f"  {tr.big_gamma_at(50 / mod.zeta).real:.4f}")
    print(f"{'stationary':>12} " + " ".join(f"{0.5 * x:<10.4f}" for x in (1, 2, 5)))

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        t = np.linspace(0, args.t_max, 401)
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(t, c12_from_gamma(args.alpha0, stationary_reference(res, t)), "k-",
                label="stationary")
        for (vk, k), (_, tr) in traces.items():
            ax.plot(t, c12(args.alpha0, tr, t), "--", label=f"varkappa={vk:g}, kappa={k:g}")
        ax.set_xlabel(r"$\Gamma_0 t$")
        ax.set_ylabel(r"$C_{12}$")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)


if __name__ == "__main__":
    main()
