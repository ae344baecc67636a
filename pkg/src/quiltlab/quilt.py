"""Templates and quilts: planar maps with marked faces, hole subtemplates,
and the side-length change of variables.

A template is a planar map (sphere topology) with a possibly empty set of
faces marked as holes and, on each non-hole face, a cyclic list of marked
vertices, one distinguished as the face's root.  A face with k marked
vertices is a k-gon; the edges between consecutive marked vertices form its
sides.  A quilt assigns a positive length to each edge.

Mark tuples are stored in face-cycle order (face on the left, so interior
faces run counterclockwise) starting at the root.  With ccw marks
(w_0=root, w_1, ..., w_{k-1}):

* side j runs from w_j to w_{j+1 mod k};
* side k-1 (ending at the root) is the side clockwise of the root: the
  "left" side L^- for 4-gons and 2-gons, and L^+ for the 3-gon;
* side 0 is the side counterclockwise of the root (R^-).

The orderable templates have faces F_ext (1-gon), F_0 (3-gon),
F_1..F_n (4-gons), F_{n+1} (2-gon) subject to:

(a) F_ext and F_0 share their root vertex and F_0's side 0 lies on the
    boundary of F_ext;
(b) the terminal vertex of F_i is the root vertex of F_{i+1}, cyclically
    (terminal = vertex clockwise of the root for the 3-gon, opposite vertex
    for 2- and 4-gons);
(c) the root vertex of F_i (i >= 1) has degree 2, and marked vertices that
    are not the root of any face have degree 3 (terminal vertices are the
    next face's root, so they are exempt: they keep degree 2);
(d) for i = 1..n the two sides of F_i at its root lie on the boundary of
    F_ext u F_0 u ... u F_{i-1}, while the two far sides meet that boundary
    only at endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import planar_map as pm
from .errors import (
    DisconnectedSelection,
    MissingOrder,
    SingularMap,
    TemplateError,
    WrongGonProfile,
)
from .fields import bareiss_determinant

DET_TOL = 1e-9


@dataclass(frozen=True)
class Template:
    """Planar map with holes and per-face marked vertices (root first, in
    face-cycle order).  ``face_order``, when present, lists face ids as
    (F_ext, F_0, ..., F_{n+1})."""

    map: pm.HalfEdgeMap
    marks: dict
    holes: frozenset = frozenset()
    face_order: tuple = None

    def __post_init__(self):
        m = self.map
        all_faces = set(range(m.n_faces))
        if not set(self.holes) <= all_faces:
            raise TemplateError("hole ids out of range")
        if set(self.marks) != all_faces - set(self.holes):
            raise TemplateError("marks must cover exactly the non-hole faces")
        for f, mk in self.marks.items():
            if len(mk) < 1:
                raise TemplateError(f"face {f} has no marked vertices")
            self.mark_positions(f)  # raises if marks not in cycle order

    # -- marks along the face cycle ------------------------------------------

    def mark_positions(self, f):
        """Positions of the marked vertices within the face dart cycle."""
        cyc = self.map.face_cycles[f]
        tails = [self.map.vertex_of[d] for d in cyc]
        mk = self.marks[f]
        pos = []
        for v in mk:
            hits = [i for i, t in enumerate(tails) if t == v]
            if len(hits) != 1:
                raise TemplateError(
                    f"marked vertex {v} occurs {len(hits)} times on face {f}"
                )
            pos.append(hits[0])
        # cyclic increase starting from the root position
        k = len(pos)
        for i in range(1, k):
            a = (pos[i - 1] - pos[0]) % len(cyc)
            b = (pos[i] - pos[0]) % len(cyc)
            if not a < b:
                raise TemplateError(f"marks of face {f} not in face-cycle order")
        return pos

    def k_gon(self, f):
        return len(self.marks[f])

    def root_vertex(self, f):
        return self.marks[f][0]

    def terminal_vertex(self, f):
        """Clockwise of the root for 3-gons; opposite the root for 2-/4-gons."""
        k = self.k_gon(f)
        if k == 3:
            return self.marks[f][2]
        if k == 4:
            return self.marks[f][2]
        if k == 2:
            return self.marks[f][1]
        raise TemplateError(f"face {f} is a {k}-gon and has no terminal vertex")

    def side_dart_paths(self, f):
        """Dart paths of the k sides (side j from mark j to mark j+1)."""
        cyc = self.map.face_cycles[f]
        pos = self.mark_positions(f)
        k = len(pos)
        n = len(cyc)
        out = []
        for j in range(k):
            a, b = pos[j], pos[(j + 1) % k]
            path = []
            i = a
            while True:
                path.append(cyc[i])
                i = (i + 1) % n
                if i == b:
                    break
            out.append(path)
        return out

    def side_edges(self, f):
        return [[d >> 1 for d in path] for path in self.side_dart_paths(f)]

    @property
    def n_added_gons(self):
        """Number of 4-gon faces (n in the F_ext, F_0, .., F_{n+1} profile)."""
        return sum(1 for f in self.marks if self.k_gon(f) == 4)


@dataclass(frozen=True)
class Quilt:
    """A template plus a positive length per edge (edge id = dart // 2)."""

    template: Template
    lengths: tuple

    def __post_init__(self):
        if len(self.lengths) != self.template.map.n_edges:
            raise TemplateError("one length per edge required")
        if any(not x > 0 for x in self.lengths):
            raise TemplateError("edge lengths must be positive")

    def side_lengths(self, f):
        return [sum(self.lengths[e] for e in side) for side in self.template.side_edges(f)]

    def boundary_length(self):
        """Total length of the 1-gon (external) face boundary."""
        t = self.template
        ext = [f for f in t.marks if t.k_gon(f) == 1]
        if len(ext) != 1:
            raise TemplateError("no unique 1-gon face")
        cyc = t.map.face_cycles[ext[0]]
        return sum(self.lengths[d >> 1] for d in cyc)


# --- validation -------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionResult:
    name: str
    passed: bool
    offending_face: int = None
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    n: int
    conditions: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.conditions)

    def failures(self):
        return [c for c in self.conditions if not c.passed]


def _gon_profile_order(t: Template):
    if t.face_order is None:
        raise MissingOrder("template has no face order")
    order = tuple(t.face_order)
    if t.holes:
        raise TemplateError("orderable templates have no holes")
    if sorted(order) != sorted(t.marks):
        raise TemplateError("face_order must list every face exactly once")
    n = len(order) - 3
    if n < 0:
        raise WrongGonProfile("need at least 3 faces (1-gon, 3-gon, 2-gon)")
    want = [1, 3] + [4] * n + [2]
    got = [t.k_gon(f) for f in order]
    if got != want:
        raise WrongGonProfile(f"gon profile {got} != {want}")
    return order, n


def validate_template(t: Template) -> ValidationReport:
    """Check conditions (a)-(d) for an ordered template; per-condition report."""
    order, n = _gon_profile_order(t)
    f_ext, f0 = order[0], order[1]
    seq = order[1:]  # F_0 .. F_{n+1}
    results = []

    # (a) shared root; F_0's side ccw of the root lies on the outer boundary
    ok = t.root_vertex(f_ext) == t.root_vertex(f0)
    side0 = t.side_dart_paths(f0)[0]
    ok = ok and all(t.map.face_of[d ^ 1] == f_ext for d in side0)
    results.append(ConditionResult("a", ok, None if ok else f0))

    # (b) terminal chain
    bad = None
    for i in range(len(seq)):
        nxt = seq[(i + 1) % len(seq)]
        if t.terminal_vertex(seq[i]) != t.root_vertex(nxt):
            bad = seq[i]
            break
    results.append(ConditionResult("b", bad is None, bad))

    # (c) root degrees 2; non-root marked vertices degree 3
    roots = {t.root_vertex(f) for f in order}
    bad = None
    detail = ""
    for f in seq[1:]:
        if t.map.degree(t.root_vertex(f)) != 2:
            bad, detail = f, f"root degree {t.map.degree(t.root_vertex(f))}"
            break
        for v in t.marks[f][1:]:
            if v not in roots and t.map.degree(v) != 3:
                bad, detail = f, f"marked vertex {v} degree {t.map.degree(v)}"
                break
        if bad is not None:
            break
    results.append(ConditionResult("c", bad is None, bad, detail))

    # (d) near sides on the explored boundary; far sides touch it at endpoints only
    explored = {f_ext, f0}
    bad = None
    detail = ""
    for f in seq[1:-1]:  # the 4-gons
        paths = t.side_dart_paths(f)
        for d in paths[0] + paths[3]:
            if t.map.face_of[d ^ 1] not in explored:
                bad, detail = f, "near side leaves the explored boundary"
                break
        if bad is None:
            for path in (paths[1], paths[2]):
                for d in path:
                    if t.map.face_of[d ^ 1] in explored:
                        bad, detail = f, "far side edge on the explored boundary"
                        break
                for d in path[1:]:
                    v = t.map.vertex_of[d]
                    if any(g in explored for g in t.map.vertex_faces(v)):
                        bad, detail = f, "far side interior vertex on the explored boundary"
                        break
                if bad is not None:
                    break
        if bad is not None:
            break
        explored.add(f)
    results.append(ConditionResult("d", bad is None, bad, detail))

    return ValidationReport(n=n, conditions=tuple(results))


def recover_face_order(t: Template) -> tuple:
    """Reconstruct (F_ext, F_0, ..., F_{n+1}) from the marks alone.

    The chain is forced: each terminal vertex has degree 2, so the next face
    is the one at its other corner.  Raises TemplateError when no valid
    order exists.
    """
    ones = [f for f in t.marks if t.k_gon(f) == 1]
    threes = [f for f in t.marks if t.k_gon(f) == 3]
    twos = [f for f in t.marks if t.k_gon(f) == 2]
    if len(ones) != 1 or len(threes) != 1 or len(twos) != 1:
        raise WrongGonProfile("need exactly one 1-gon, one 3-gon, one 2-gon")
    f_ext, f0, f_last = ones[0], threes[0], twos[0]
    if t.root_vertex(f_ext) != t.root_vertex(f0):
        raise TemplateError("1-gon and 3-gon roots differ")
    order = [f_ext, f0]
    cur = f0
    seen = {f_ext, f0}
    while cur != f_last:
        v = t.terminal_vertex(cur)
        cand = [g for g in set(t.map.vertex_faces(v)) if g != cur]
        cand = [g for g in cand if g in t.marks and t.root_vertex(g) == v and g not in seen]
        if len(cand) != 1:
            raise TemplateError(f"face order breaks at vertex {v}")
        cur = cand[0]
        order.append(cur)
        seen.add(cur)
    if len(seen) != len(t.marks):
        raise TemplateError("face order does not reach every face")
    if t.terminal_vertex(f_last) != t.root_vertex(f0):
        raise TemplateError("2-gon terminal is not the 3-gon root")
    return tuple(order)


def with_face_order(t: Template) -> Template:
    if t.face_order is not None:
        return t
    return Template(map=t.map, marks=t.marks, holes=t.holes,
                    face_order=recover_face_order(t))


# --- side-length change of variables -----------------------------------------------


def coordinate_sides(t: Template):
    """The 4n+3 coordinate sides in canonical order.

    Returns (rows, left_flags) where rows are (face, side_index, name) and
    left_flags marks the "left" sides (l0+, li-, li+).
    """
    order, n = _gon_profile_order(t)
    f0 = order[1]
    rows = [(f0, 2, "l0+"), (f0, 0, "r0-"), (f0, 1, "r0+")]
    left = [True, False, False]
    for i, f in enumerate(order[2:-1], start=1):
        rows += [(f, 3, f"l{i}-"), (f, 2, f"l{i}+"), (f, 0, f"r{i}-"), (f, 1, f"r{i}+")]
        left += [True, True, False, False]
    return rows, left


@dataclass(frozen=True)
class DeterminantReport:
    n: int
    det: int
    det_float: float
    left_tree_size: int
    bijection_ok: bool
    triangular_ok: bool
    dropped_edge: int

    @property
    def unit(self):
        return abs(self.det) == 1


def _left_tree_contour(t: Template, tree_edges, f0):
    """First-visit order of tree edges along the contour of the left tree,
    starting at the root of F_0 along the l0+ side."""
    m = t.map
    in_tree = set(tree_edges)
    last = t.side_dart_paths(f0)[2][-1]  # l0+ side ends at the root vertex
    start = last ^ 1
    first_visit = {}
    d = start
    steps = 0
    limit = 2 * len(in_tree) + 1
    while True:
        e = d >> 1
        if e not in first_visit:
            first_visit[e] = steps
        steps += 1
        c = m.next_dart[d ^ 1]
        while (c >> 1) not in in_tree:
            c = m.next_dart[c]
        d = c
        if d == start:
            break
        if steps > 2 * limit:
            raise TemplateError("left-tree contour failed to close")
    if steps != 2 * len(in_tree):
        raise TemplateError("left-tree contour did not traverse each edge twice")
    return first_visit


def side_length_map_determinant(t: Template) -> DeterminantReport:
    """Determinant of the 0/1 matrix taking edge lengths to side lengths.

    Rows are the coordinate side lengths (l0+, r0-, r0+, li-/+, ri-/+);
    columns are all edges except the single edge bordered only by the
    external face and the final 2-gon.  Also verifies the structure behind
    the unit-determinant proof: the left sides' edges form a spanning tree
    with 2n+1 edges, each of which is the contour-earliest edge of exactly
    one left side, making the left block unitriangular.  Raises SingularMap
    if |det| != 1.
    """
    t = with_face_order(t)
    rows, left_flags = coordinate_sides(t)
    order, n = _gon_profile_order(t)
    f0 = order[1]

    side_edge_sets = []
    covered = set()
    left_edges = set()
    right_edges = set()
    for (f, j, _name), is_left in zip(rows, left_flags):
        edges = t.side_edges(f)[j]
        side_edge_sets.append(edges)
        covered.update(edges)
        (left_edges if is_left else right_edges).update(edges)

    if left_edges & right_edges:
        raise SingularMap("an edge lies on both a left and a right side")
    dropped = sorted(set(range(t.map.n_edges)) - covered)
    if len(dropped) != 1:
        raise SingularMap(f"expected exactly one uncovered edge, got {dropped}")

    cols = sorted(covered)
    col_of = {e: i for i, e in enumerate(cols)}
    matrix = [[0] * len(cols) for _ in rows]
    for r, edges in enumerate(side_edge_sets):
        for e in edges:
            matrix[r][col_of[e]] = 1
    if len(cols) != len(rows):
        raise SingularMap(f"matrix is {len(rows)}x{len(cols)}, not square")

    det = bareiss_determinant(matrix)
    sign, logabs = np.linalg.slogdet(np.array(matrix, dtype=float))
    det_float = float(sign * np.exp(logabs)) if sign != 0 else 0.0

    # left-tree structure: 2n+1 edges forming a tree containing F_0's root
    tree = sorted(left_edges)
    tree_ok = len(tree) == 2 * n + 1
    span = set()
    adj = {}
    for e in tree:
        u, v = t.map.edge_vertices(e)
        span.update((u, v))
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    root_v = t.root_vertex(f0)
    reached = set()
    if root_v in span:
        stack = [root_v]
        reached.add(root_v)
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in reached:
                    reached.add(w)
                    stack.append(w)
    acyclic = reached == span and len(span) == len(tree) + 1
    bijection_ok = False
    triangular_ok = False
    if tree_ok and acyclic:
        visit = _left_tree_contour(t, tree, f0)
        left_sides = [
            t.side_edges(f)[j]
            for (f, j, _), is_left in zip(rows, left_flags)
            if is_left
        ]
        earliest = [min(edges, key=lambda e: visit[e]) for edges in left_sides]
        bijection_ok = sorted(earliest) == tree
        if bijection_ok:
            # rows ordered by their earliest edge, columns by visit order:
            # each side may only contain edges at or after its earliest one
            rank = {e: i for i, e in enumerate(sorted(tree, key=lambda e: visit[e]))}
            pairs = sorted(zip(earliest, left_sides), key=lambda p: rank[p[0]])
            triangular_ok = all(
                min(rank[e] for e in edges) == i
                for i, (_, edges) in enumerate(pairs)
            )

    report = DeterminantReport(
        n=n,
        det=det,
        det_float=det_float,
        left_tree_size=len(tree),
        bijection_ok=bool(bijection_ok),
        triangular_ok=bool(triangular_ok),
        dropped_edge=dropped[0],
    )
    if abs(abs(det) - 1) > 0 or abs(abs(det_float) - 1.0) > DET_TOL:
        raise SingularMap(f"|det| != 1: exact {det}, float {det_float}")
    return report


# --- marked subtemplates -------------------------------------------------------------


@dataclass(frozen=True)
class MarkedSubtemplate:
    """Reduction of a template to a marked face subset: complement components
    become labelled holes and unneeded degree-2 vertices are smoothed away
    (merging their edges).

    ``hole_labels[i]`` is the face id of hole i+1 in the reduced template;
    ``dart_expansion`` maps each reduced dart to the ordered parent darts it
    traverses; ``cluster_faces[i]`` is the parent face set swallowed by hole
    i+1.
    """

    template: Template
    hole_labels: tuple
    parent: Template
    parent_faces: frozenset
    cluster_faces: tuple
    dart_expansion: dict = field(compare=False, repr=False)

    @property
    def n_holes(self):
        return len(self.hole_labels)

    def vertex_to_parent(self):
        """Reduced vertex id -> parent vertex id."""
        out = {}
        for d, path in self.dart_expansion.items():
            out[self.template.map.vertex_of[d]] = self.parent.map.vertex_of[path[0]]
        return out

    def parent_vertex_to_reduced(self):
        return {pv: v for v, pv in self.vertex_to_parent().items()}


def _face_bfs_order(t: Template):
    """Deterministic face BFS from the root dart's face, edges in id order."""
    m = t.map
    start = m.face_of[m.root]
    seen = [False] * m.n_faces
    seen[start] = True
    queue = [start]
    order = [start]
    head = 0
    while head < len(queue):
        f = queue[head]
        head += 1
        neighbors = []
        for d in m.face_cycles[f]:
            g = m.face_of[d ^ 1]
            if not seen[g]:
                neighbors.append((d >> 1, g))
        for _, g in sorted(neighbors):
            if not seen[g]:
                seen[g] = True
                queue.append(g)
                order.append(g)
    return order


def mark_subtemplate(t: Template, faces) -> MarkedSubtemplate:
    """Reduce a hole-free template to the marked subtemplate of ``faces``.

    The selection must be connected under edge adjacency.  Each connected
    component of the complement becomes a hole (labelled by first encounter
    in a rooted face BFS); vertices that are not marked vertices of selected
    faces and are not corners of two distinct selected faces are deleted,
    merging their edges.
    """
    if t.holes:
        raise TemplateError("mark_subtemplate expects a hole-free template")
    m = t.map
    sel = frozenset(faces)
    if not sel or not sel <= set(t.marks):
        raise DisconnectedSelection("selection must be a nonempty set of faces")

    # connectivity of the selection under shared edges
    adj = {f: set() for f in range(m.n_faces)}
    for e in range(m.n_edges):
        a, b = m.edge_faces(e)
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    comp = {next(iter(sel))}
    stack = [next(iter(sel))]
    while stack:
        f = stack.pop()
        for g in adj[f]:
            if g in sel and g not in comp:
                comp.add(g)
                stack.append(g)
    if comp != sel:
        raise DisconnectedSelection("marked faces are not edge-connected")

    # complement clusters in first-encounter order
    bfs = _face_bfs_order(t)
    cluster_of = {}
    clusters = []
    for f in bfs:
        if f in sel or f in cluster_of:
            continue
        cid = len(clusters)
        bucket = {f}
        stack = [f]
        while stack:
            g = stack.pop()
            cluster_of[g] = cid
            for h in adj[g]:
                if h not in sel and h not in bucket:
                    bucket.add(h)
                    stack.append(h)
        clusters.append(frozenset(bucket))

    kept_edge = [
        (m.edge_faces(e)[0] in sel) or (m.edge_faces(e)[1] in sel)
        for e in range(m.n_edges)
    ]
    kept_dart = lambda d: kept_edge[d >> 1]

    # rotations restricted to kept darts
    rot = {}
    for v, cyc in enumerate(m.vertex_cycles):
        kept = [d for d in cyc if kept_dart(d)]
        if kept:
            rot[v] = kept

    marked_vertices = {v for f in sel for v in t.marks[f]}

    def sel_corner_count(v):
        return len({g for g in m.vertex_faces(v) if g in sel})

    twin = {}
    for v, darts in rot.items():
        for d in darts:
            twin[d] = d ^ 1
    path = {d: (d,) for v in rot for d in rot[v]}

    # smooth removable degree-2 vertices
    for v in sorted(rot):
        if v in marked_vertices or sel_corner_count(v) >= 2:
            continue
        if len(rot[v]) != 2:
            continue
        d1, d2 = rot[v]
        t1, t2 = twin[d1], twin[d2]
        if t1 == d2:  # would close an edge into a loop; keep the vertex
            continue
        path_t1, path_t2 = path[t1], path[t2]
        twin[t1] = t2
        twin[t2] = t1
        path[t1] = path_t1 + path[d2]
        path[t2] = path_t2 + path[d1]
        for d in (d1, d2):
            del path[d]
            del twin[d]
        del rot[v]

    survivors = sorted(path)
    # dense relabel with twins adjacent, edge order by smallest survivor dart
    new_id = {}
    k = 0
    for d in survivors:
        if d in new_id:
            continue
        new_id[d] = 2 * k
        new_id[twin[d]] = 2 * k + 1
        k += 1
    nxt = [0] * (2 * k)
    for v, darts in rot.items():
        darts = [d for d in darts if d in new_id]
        for i, d in enumerate(darts):
            nxt[new_id[d]] = new_id[darts[(i + 1) % len(darts)]]
    twn = [0] * (2 * k)
    for d in survivors:
        twn[new_id[d]] = new_id[twin[d]]

    # root: carried by the surviving dart whose path starts at the old root
    root_candidates = [d for d in survivors if path[d][0] == m.root]
    new_root = new_id[root_candidates[0]] if root_candidates else 0

    reduced = pm.build_map(nxt, twn, new_root)
    # build_map's first-come normalization is the identity on our labels
    expansion = {new_id[d]: path[d] for d in survivors}

    # identify reduced faces with selected faces / clusters
    face_from_parent = {}
    for d_new, pth in expansion.items():
        face_from_parent.setdefault(m.face_of[pth[0]], set()).add(
            reduced.face_of[d_new]
        )
    new_marks = {}
    for f in sel:
        imgs = face_from_parent.get(f, set())
        if len(imgs) != 1:
            raise TemplateError(f"selected face {f} did not survive cleanly")
        (nf,) = imgs
        vert_map = {}
        for d_new, pth in expansion.items():
            vert_map[m.vertex_of[pth[0]]] = reduced.vertex_of[d_new]
        new_marks[nf] = tuple(vert_map[v] for v in t.marks[f])
    hole_face = {}
    for cid, bucket in enumerate(clusters):
        imgs = set()
        for f in bucket:
            imgs |= face_from_parent.get(f, set())
        if len(imgs) != 1:
            raise TemplateError(f"cluster {cid} is not a disk (boundary has {len(imgs)} rings)")
        hole_face[cid] = next(iter(imgs))
    holes = frozenset(hole_face.values())
    if len(holes) != len(clusters):
        raise TemplateError("two clusters merged into one hole")

    sub = Template(map=reduced, marks=new_marks, holes=holes, face_order=None)
    return MarkedSubtemplate(
        template=sub,
        hole_labels=tuple(hole_face[c] for c in range(len(clusters))),
        parent=t,
        parent_faces=sel,
        cluster_faces=tuple(clusters),
        dart_expansion=expansion,
    )


# --- canonical forms ------------------------------------------------------------------


def template_key(t: Template, marked=None) -> bytes:
    """Isomorphism key of a rooted template (optionally with a marked-face
    set): BFS-canonical map code plus relabeled marks, holes (labelled by
    first encounter), and tags."""
    label = pm.canonical_labeling(t.map)

    def vkey(v):
        return min(label[d] for d in t.map.vertex_cycles[v])

    def fkey(f):
        return min(label[d] for d in t.map.face_cycles[f])

    parts = [pm.canonical_code(t.map).decode("ascii")]
    for f in sorted(range(t.map.n_faces), key=fkey):
        if f in t.holes:
            parts.append(f"F{fkey(f)}:HOLE")
        else:
            mk = ",".join(str(vkey(v)) for v in t.marks[f])
            tag = ""
            if marked is not None:
                tag = ":M" if f in marked else ":U"
            parts.append(f"F{fkey(f)}:{mk}{tag}")
    return "|".join(parts).encode("ascii")


def template_iso(a: Template, b: Template):
    """Dart bijection realizing a rooted isomorphism a -> b, or None."""
    if template_key(a) != template_key(b):
        return None
    la = pm.canonical_labeling(a.map)
    lb = pm.canonical_labeling(b.map)
    inv_b = {lab: d for d, lab in enumerate(lb)}
    return {d: inv_b[la[d]] for d in range(a.map.n_darts)}


def canonical_hole_order(t: Template):
    """Hole face ids in first-encounter order of the rooted face BFS."""
    return [f for f in _face_bfs_order(t) if f in t.holes]


# --- serialization ---------------------------------------------------------------------


def template_to_text(t: Template) -> str:
    lines = [pm.to_text(t.map).rstrip("\n")]
    lines.append(f"ROOT {t.map.root}")
    if t.face_order is not None:
        lines.append("ORDER " + " ".join(str(f) for f in t.face_order))
    for f in sorted(t.holes):
        lines.append(f"HOLE {f}")
    for f in sorted(t.marks):
        lines.append(f"MARKS {f} " + " ".join(str(v) for v in t.marks[f]))
    return "\n".join(lines) + "\n"


def template_from_text(text: str) -> Template:
    lines = [ln for ln in (s.strip() for s in text.splitlines()) if ln]
    if not lines[0].startswith("E="):
        raise TemplateError("expected 'E=<n>' header")
    n_edges = int(lines[0][2:])
    map_lines = lines[: 1 + 2 * n_edges]
    rest = lines[1 + 2 * n_edges:]
    root = 0
    order = None
    holes = set()
    marks = {}
    for ln in rest:
        parts = ln.split()
        if parts[0] == "ROOT":
            root = int(parts[1])
        elif parts[0] == "ORDER":
            order = tuple(int(x) for x in parts[1:])
        elif parts[0] == "HOLE":
            holes.add(int(parts[1]))
        elif parts[0] == "MARKS":
            marks[int(parts[1])] = tuple(int(v) for v in parts[2:])
        else:
            raise TemplateError(f"unrecognized line {ln!r}")
    body = "\n".join(map_lines) + "\n"
    m = pm.from_text(body)
    m = pm.build_map(list(m.next_dart), [d ^ 1 for d in range(m.n_darts)], root)
    return Template(map=m, marks=marks, holes=frozenset(holes), face_order=order)
