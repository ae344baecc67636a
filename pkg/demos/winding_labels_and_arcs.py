"""Winding labels on hole boundaries and the Hamiltonian closure.

Filling a subtemplate's holes induces a curve through every face; the
cumulative turning of that curve at the hole-boundary vertices does not
depend on which filling was chosen.  Those labels classify the arcs a
filling may draw through each hole, and any winding-compatible noncrossing
choice of arcs closes the face chains into a single cycle; breaking the
compatibility breaks the cycle.
"""

import itertools
import math

from quiltlab import quilt as qt
from quiltlab import quilt_enum as qe
from quiltlab import quilt_winding as qw
from quiltlab._builder import Builder

b = Builder()
for move in ((1, 1), (1, 1), (1, 1), (1, 2), (1, 3)):
    b.add_face(t=move[0], s=move[1])
b.close()
template, _, _ = b.build()
order = template.face_order
tsub = qt.mark_subtemplate(
    template, [f for f in order if f not in (order[2], order[4], order[6])]
)
print("holes:", tsub.n_holes,
      "| cluster sizes:", [len(c) for c in tsub.cluster_faces])

fills = qe.enumerate_fillings(tsub, 2)
geom = qw.embed_subtemplate(tsub)
graph = qw.subtemplate_curve_graph(tsub)
print("curve-graph nodes:", sorted(graph.nodes))

worst = 0.0
for other in fills[1:]:
    rep = qw.winding_labels(tsub, fills[0], other, geom=geom)
    worst = max(worst, rep.max_difference)
theta = qw.winding_label_values(geom, fills[0])
print("labels (units of pi):",
      {v: round(t / math.pi, 3) for v, t in sorted(theta.items())})
print(f"max label difference across {len(fills)} fillings: {worst:.2e}")

theta[graph.start] = 0.0
systems = [
    qw.admissible_arc_sets(tsub, geom, theta, j) for j in range(tsub.n_holes)
]
print("admissible arc systems per hole:", [len(s) for s in systems])
for combo in itertools.product(*systems):
    choices = {j: arcs for j, arcs in enumerate(combo)}
    assert qw.hamiltonian_closure(tsub, choices)
print("every admissible product closes one Hamiltonian cycle")

big = max(graph.vertices_by_hole, key=lambda j: len(graph.vertices_by_hole[j]))
arcs = qw.arcs_from_filling(tsub, fills[0], big)
swapped = ((arcs[0][0], arcs[1][1]), (arcs[1][0], arcs[0][1]))
choices = {
    j: qw.arcs_from_filling(tsub, fills[0], j) for j in range(tsub.n_holes)
}
choices[big] = swapped
print("winding-incompatible swap still one cycle?",
      qw.hamiltonian_closure(tsub, choices))
