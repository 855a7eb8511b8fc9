"""
Clique census and per-ego clique degrees
========================================

Two triangles joined by a bridge, with a sex attribute on every node.
We list the maximal cliques, count them by order and by composition,
then look at the same graph one egonet at a time.
"""

from collections import Counter

import egoclique as ec

edges = [(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6), (3, 4)]
sex = {1: "F", 2: "F", 5: "F", 6: "F", 3: "M", 4: "M"}
g = ec.Graph.from_edges(edges, attributes=sex)
print(f"N={g.N}  |E|={g.num_edges}  categories={g.category_labels}")

###############################################################################
# Whole-graph census: C_2 = 1 (the bridge) and C_3 = 2 (the triangles).

c = ec.census(g)
print("by order:      ", c.order_counts)
print("by composition:", c.composition_counts)

###############################################################################
# An egonet holds every clique its ego belongs to, so the per-ego clique
# degrees can be read off locally. Node 3 sits on the bridge and in a
# triangle.

ego = g.dense_id(3)
prof = ec.profile_ego(ec.extract_egonet(g, ego), g.category_count)
print("ego 3 degrees:", prof.degree_by_order, prof.degree_by_composition)

###############################################################################
# Summed over all egos, each order-i clique is counted i times. This is the
# identity the degree-sum estimator builds on.

D = Counter()
for v in range(g.N):
    D.update(ec.profile_ego(ec.extract_egonet(g, v)).degree_by_order)
for i, d in sorted(D.items()):
    print(f"D_{i} = {d} = {i} * C_{i}")
    assert d == i * c.order_counts[i]
