"""
Minimax lower bounds from explicit packings
===========================================

No estimator can beat the structured rates by more than log factors.  The
witness is constructive: a separated binary code is placed onto a "free"
index set of the expansion class (coordinates the class can set to anything),
and the Fano method converts the packing geometry plus the Gaussian-noise
KL divergence into a lower bound on worst-case error.
"""

import numpy as np

import samplex as sx

# --- a separated binary code ------------------------------------------------

code = sx.constant_weight_code(64, seed=0)
print(f"greedy code in {{0,1}}^64: {code.n_words} words, "
      f"min pairwise Hamming distance {code.min_pairwise_hamming} "
      f"(floor {int(np.ceil(64 / 4))})")

# --- free segments: the class hits any pattern on these coordinates ---------

spec = sx.ModelSpec("ca", d=64, m=16, s=4)
u = np.arange(1.0, 17.0)
w = sx.free_segment_ca(u, spec)
print("\nfilter whose expansion starts with 1..16:",
      np.allclose(sx.expand_ca(w, spec)[:16], u))

rnn = sx.ModelSpec("rnn", d=6, r=3, L=8)
target = sx.rng_from(1).standard_normal(18)
A, B = sx.free_segment_rnn(target, rnn)
print("recurrence whose expansion ends with a chosen pattern:",
      np.allclose(sx.expand_rnn(A, B, rnn)[-18:], target, atol=1e-9))
print("  (diagonal transition, pattern recovered through a Vandermonde solve)")

# --- packing + Fano bound ----------------------------------------------------

n, sigma = 1024, 1.0
packing = sx.build_packing(spec, None, sx.matched_eps_scale(16, n, sigma), seed=0)
print(f"\npacking of {packing.M + 1} expansions: rho_min={packing.rho_min:.4f}, "
      f"rho_avg={packing.rho_avg:.4f}")
print(f"  KL between neighbor label laws: "
      f"{sx.kl_gaussian_pair(packing.thetas[1], packing.thetas[0], n, sigma):.3f} nats")
bound = sx.fano_lower_bound(packing, n, sigma)
print(f"  Fano lower bound at n={n}: {bound:.5f}")
print(f"  matched-rate upper guide:  {sx.theory_rate(spec, n, sigma):.5f}")

# --- exact scaling in n -------------------------------------------------------

print("\nquadrupling n (with the matched pattern scale) halves the bound:")
for nn in (n, 4 * n, 16 * n):
    p = sx.build_packing(spec, None, sx.matched_eps_scale(16, nn, sigma), seed=0)
    print(f"  n={nn:6d}: bound {sx.fano_lower_bound(p, nn, sigma):.6f}")

# --- the recurrence class needs a calibrated scale ---------------------------

big = sx.ModelSpec("rnn", d=50, r=8, L=50)
cal = sx.build_calibrated_packing(big, None, 1024, sigma, seed=0)
print(f"\nrecurrence packing (information term calibrated): "
      f"bound {sx.fano_lower_bound(cal, 1024, sigma):.5f}")
print("  the diagonal-transition embedding carries mass outside the free set,")
print("  so its scale is chosen from the measured packing spread instead")
