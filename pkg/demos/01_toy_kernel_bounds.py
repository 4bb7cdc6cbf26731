#!/usr/bin/env python3
"""Exactly solvable warm-up: bounding a biased random walk against a clean one.

The reference kernel P adds N(0,1) noise per step; the perturbed kernel
Phat additionally convolves with N(w, sigma^2), a stand-in for
discretization error with bias w and fluctuation sigma.  After N steps
from a common start the exact KL divergence is

    KL = (N w^2 + sigma^2 - log(1 + sigma^2)) / 2,

so every bound can be judged against the truth.  The walk shows the key
phenomenon: the bias w accumulates over all N steps while the
fluctuation sigma is paid essentially once, and the certified
shifted-schedule bound tracks that behavior (up to a log N factor on the
fluctuation term), while a naive per-step accounting would charge
N * (w^2 + sigma^2).
"""

from klbounds import bounds, gauss

W, SIGMA = 0.1, 1.0

print(f"toy kernel pair: bias w = {W}, fluctuation sigma = {SIGMA}")
print(f"{'N':>4} {'exact KL':>12} {'simple':>12} {'certified':>12} "
      f"{'naive N*(w^2+s^2)':>18}")

k = bounds.toy_assumptions(W, SIGMA)
for n in (1, 2, 4, 8, 16, 32, 64, 128, 256):
    exact = gauss.toy_exact_kl(n, W, SIGMA)
    simple = bounds.kl_simple_bound(k, n, 0.0).value
    certified = bounds.kl_framework_bound(k, n, 0.0, mode="certified").value
    naive = 0.5 * n * (W**2 + SIGMA**2)
    print(f"{n:>4} {exact:>12.5f} {simple:>12.5f} {certified:>12.5f} {naive:>18.1f}")

print()
print("Both bounds stay above the exact KL at every N (validity), and both")
print("grow like N w^2 rather than N (w^2 + sigma^2): the sigma^2 term enters")
print("once.  The certified column carries no hidden constants; it is the")
print("exact objective of a feasible shift schedule.")

n = 64
rep = bounds.kl_framework_bound(k, n, 0.0, mode="certified")
growth = rep.value - bounds.kl_framework_bound(k, 1, 0.0, "certified").value
exact_growth = gauss.toy_exact_kl(n, W, SIGMA) - gauss.toy_exact_kl(1, W, SIGMA)
print()
print(f"growth from N=1 to N={n}: certified {growth:.4f} vs exact "
      f"{exact_growth:.4f} (= {(n - 1) * W**2 / 2:.4f} from the bias alone)")
print(f"schedule used at N={n}: eta_k = 1/(N-k), first entries "
      f"{[round(v, 4) for v in rep.schedule.eta[:4]]} ... final {rep.schedule.eta[-1]}")
