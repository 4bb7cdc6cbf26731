#!/usr/bin/env python3
"""Local-error orders and the iteration-complexity planner.

The randomized midpoint discretization pays the same strong (pathwise)
error as plain LMC but gains a full power of the step size in the weak
(mean) error -- the cancellation that the KL framework converts into a
sqrt(d) iteration complexity.  This demo measures both orders on a
Gaussian target, where the coupled errors are available in closed form,
then prints the nine-cell planning table.
"""

from klbounds import chains, schemes
from klbounds.verify import fit_loglog_slope

pot = chains.PotentialSpec.quadratic_potential(1.0)
hs = (0.2, 0.1, 0.05, 0.025)

print("one-step errors against the exact diffusion (x = 1, unit quadratic)")
print(f"{'h':>7} {'LMC weak':>12} {'RMD weak':>12} {'LMC strong':>12} {'RMD strong':>12}")
rows = []
for h in hs:
    lmc = chains.estimate_local_errors(pot, "LMC", 1.0, h)
    rmd = chains.estimate_local_errors(pot, "RMLMC", 1.0, h)
    rows.append((lmc.weak, rmd.weak, lmc.strong, rmd.strong))
    print(f"{h:>7} {lmc.weak:>12.3e} {rmd.weak:>12.3e} "
          f"{lmc.strong:>12.3e} {rmd.strong:>12.3e}")

cols = list(zip(*rows))
print()
print("log-log slopes in h:")
print(f"  LMC weak   {fit_loglog_slope(hs, cols[0]):.3f}   (h^2 mean error)")
print(f"  RMD weak   {fit_loglog_slope(hs, cols[1]):.3f}   (h^3: one extra power)")
print(f"  strong     {fit_loglog_slope(hs, cols[2]):.3f} / "
      f"{fit_loglog_slope(hs, cols[3]):.3f} (h^{{3/2}} noise-dominated at x = 1)")

print()
print("the strong-error formulas carry an h^2 gradient term; deep in the")
print("gradient-dominated regime (x = 64) the measured order moves to 2:")
for scheme in ("LMC", "RMLMC"):
    errs = [chains.estimate_local_errors(pot, scheme, 64.0, h).strong for h in hs]
    print(f"  {scheme:<6} strong slope at x=64: {fit_loglog_slope(hs, errs):.3f}")

print()
print("nine-cell iteration planner (alpha=1, beta=2, d=4, eps=0.5, W=3)")
params = schemes.PlanParams(alpha=1.0, beta=2.0, d=4, eps=0.5, w2_init=3.0)
print(f"{'scheme':<12} {'setting':<8} {'h':>12} {'N':>8} {'N core':>10}")
for scheme in schemes.PLAN_SCHEMES:
    for setting in schemes.SETTINGS:
        res = schemes.plan_iterations(setting, scheme, params)
        print(f"{scheme:<12} {setting:<8} {res.h:>12.6f} "
              f"{res.n_iterations:>8} {res.n_powerlaw:>10.1f}")

print()
print("doubling the dimension multiplies the LMC core by 2 but the RMD core")
print("by sqrt(2); halving eps costs eps^-6 for LMC-WLC vs eps^-10/3 for RMD:")
p2 = schemes.PlanParams(alpha=1.0, beta=2.0, d=8, eps=0.5, w2_init=3.0)
pe = schemes.PlanParams(alpha=1.0, beta=2.0, d=4, eps=0.25, w2_init=3.0)
for scheme, setting in [("LMC", "SLC"), ("RMLMC", "SLC"), ("LMC", "WLC"), ("RMLMC", "WLC")]:
    base = schemes.plan_iterations(setting, scheme, params).n_powerlaw
    rd = schemes.plan_iterations(setting, scheme, p2).n_powerlaw / base
    re = schemes.plan_iterations(setting, scheme, pe).n_powerlaw / base
    print(f"  {scheme}-{setting}: N(2d)/N(d) = {rd:.4f}, N(eps/2)/N(eps) = {re:.4f}")
