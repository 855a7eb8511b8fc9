"""
Sampling designs and inclusion probabilities
============================================

Egos are drawn uniformly (UIS) or with probability proportional to a
weight (WIS). We compare the closed-form inclusion probabilities with
simulated frequencies.
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import egoclique as ec

N, draws = 20, 5
rng = np.random.default_rng(0)

###############################################################################
# Probability that a node (or at least one member of a 4-node clique)
# appears in the sample, with and without replacement.

for repl in (False, True):
    d = ec.uis(N, draws, replacement=repl)
    print(f"UIS {'WR ' if repl else 'WOR'}  p_j={ec.node_inclusion_prob(d, 0):.4f}"
          f"  p_jk={ec.joint_inclusion_prob(d, 0, 1):.4f}"
          f"  pi(4-clique)={ec.clique_inclusion_prob(d, [0, 1, 2, 3]):.4f}")

###############################################################################
# Weighted draws with replacement: the formula against 20 000 simulated samples.

w = rng.uniform(0.5, 4.0, N)
d = ec.wis(w, draws)
formula = np.array([ec.node_inclusion_prob(d, j) for j in range(N)])
hits = np.zeros(N)
reps = 20_000
for _ in range(reps):
    hits[np.unique(ec.draw_sequence(d, rng))] += 1

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot(formula, hits / reps, "o")
ax.plot([0, formula.max()], [0, formula.max()], "k--", lw=1)
ax.set_xlabel("closed form p_j")
ax.set_ylabel("simulated frequency")
fig.tight_layout()
fig.savefig("sampling_designs.svg")
print("max |freq - p_j| =", np.abs(hits / reps - formula).max().round(4))

###############################################################################
# When weights are only known up to a constant (a crawler that reports
# degrees, say), the Hansen-Hurwitz approximation rescales them from the
# observed draws.

true = w / w.sum()
for n in (5, 50, 500):
    d_n = ec.wis(w * 37.0, n, proportional=True)
    approx = ec.approximate_draw_probs(d_n, ec.draw_sequence(d_n, rng))
    est = np.array([approx.draw_prob(j) for j in range(N)])
    print(f"n'={n:3d}  max relative error of p'_j: {np.max(np.abs(est / true - 1)):.3f}")
