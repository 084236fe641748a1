#!/usr/bin/env python3
"""Convergence of the total drift time to its asymptotic form as eps -> 0.

Prints T_d / ((T_s/eps) * 2 log(C/eps)) and the share of time spent under
the rotor for a ladder of perturbation sizes.
"""
import argparse

from scatmap import ModelParams
from scatmap.diffusion import diffusion_time


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a10", type=float, default=0.6)
    ap.add_argument("--a01", type=float, default=1.0)
    ap.add_argument("--Istar", type=float, default=4.0)
    ap.add_argument("--c", type=float, default=0.5)
    ap.add_argument("--a", type=float, default=0.15)
    ap.add_argument("--eps", default="1e-2,1e-3,1e-4")
    args = ap.parse_args()

    print(f"{'eps':>8} {'Ns':>9} {'Nss':>5} {'Th':>8} {'Ti':>9} "
          f"{'Td':>12} {'ratio':>7} {'rotor share':>12}")
    for tok in args.eps.split(","):
        eps = float(tok)
        params = ModelParams(a00=0.0, a10=args.a10, a01=args.a01, eps=eps)
        est = diffusion_time(params, args.Istar, c=args.c, a=args.a)
        print(f"{eps:8.0e} {est.Ns:9d} {est.Nss:5d} {est.Th:8.2f} {est.Ti:9.1f} "
              f"{est.Td:12.4g} {est.ratio:7.4f} {est.inner_share:12.4f}")


if __name__ == "__main__":
    main()
