"""
Estimating the clique distribution from egonets
===============================================

A clustered synthetic graph stands in for a social network. We sample
egonets uniformly without replacement and estimate C_i two ways: from
clique degrees (CDS) and from distinct, deduplicated cliques (CC).
"""

import matplotlib
matplotlib.use("Agg")
import networkx as nx
import numpy as np

import egoclique as ec

G = nx.powerlaw_cluster_graph(2000, 4, 0.6, seed=7)
g = ec.Graph.from_edges(G.edges())
truth = ec.census(g)
print("true C_i:", truth.order_counts)

###############################################################################
# One sample of 300 egos. CDS carries an H-T standard error. The CC
# variance formula overstates the error by orders of magnitude here, so
# only its point estimates are shown.

d = ec.uis(g.N, 300)
sample = ec.draw_sample(g, d, seed=1)
profiles = ec.profile_sample(sample)
for name in ("cds", "cc"):
    est = ec.estimate_distribution(sample, profiles, name)
    err = ec.nmae({i: e.value for i, e in est.items()}, truth.order_counts)
    row = "  ".join(f"C_{i}={e.value:.0f}" + (f"±{e.std_error:.0f}" if name == "cds" else "")
                    for i, e in est.items())
    print(f"{name.upper():3s} NMAE={err:.3f}  {row}")

###############################################################################
# Repeating the draw shows the spread of each estimator around the truth.

reps = {"cds": [], "cc": []}
for seed in range(40):
    s = ec.draw_sample(g, d, seed=seed)
    prof = ec.profile_sample(s)
    for name in reps:
        reps[name].append({i: e.value for i, e in
                           ec.estimate_distribution(s, prof, name, variance=False).items()})
for name, runs in reps.items():
    errs = [ec.nmae(r, truth.order_counts) for r in runs]
    print(f"{name.upper()} median NMAE over 40 samples: {np.median(errs):.3f}")
    ec.plot_distribution(truth.order_counts, runs, f"estimates_{name}.svg", name.upper())
