"""
When do labels pay off?
=======================

CC beats CDS once egonets overlap, because overlapping egonets reveal
the same cliques repeatedly. The average edge count measures that
overlap without any clique enumeration. A sweep over sample sizes shows
the crossover.
"""

import networkx as nx

import egoclique as ec

G = nx.powerlaw_cluster_graph(3000, 3, 0.7, seed=3)
g = ec.Graph.from_edges(G.edges())

report = ec.run_sweep(g, ec.uis(g.N, 1), sizes=[50, 200, 800, 2400], replications=40, seed=0)
print(" n     CDS    CC     avg edge count  verdict")
for n, s in report.summary.items():
    print(f"{n:5d}  {s['nmae']['cds']['median']:.3f}  {s['nmae']['cc']['median']:.3f}"
          f"  {s['saturation']['avg_edge_count']:14.2f}  {s['recommended']}")
ec.plot_nmae(report, "nmae_vs_n.svg")

###############################################################################
# The same heuristic on a single sample, before any enumeration.

sample = ec.draw_sample(g, ec.uis(g.N, 800), seed=11)
m = ec.saturation_metrics(sample, g)
print(m)
print("recommended:", ec.recommend_estimator(m))
