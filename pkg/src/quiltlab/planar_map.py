"""Half-edge (rotation system) representation of rooted planar maps.

Darts are dense integers ``0..2E-1``.  ``next_dart[d]`` is the next dart
counterclockwise around the tail vertex of ``d``; ``twin`` pairs the two darts
of each edge and is normalized at construction so that ``twin(2k) = 2k+1``
(hence edge ``k`` owns darts ``2k`` and ``2k+1``).

Orientation convention, fixed once and used everywhere: vertices are the
orbits of ``next``; faces are the orbits of ``d -> next[twin[d]]`` and are
traced with the face on the LEFT.  When the map is drawn in the plane with
the root face as the outer face, interior faces are traced counterclockwise
and the outer face clockwise.

Maps are immutable after construction and safe to share between workers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DisconnectedMap,
    FixedPointInTwin,
    MapError,
    NonInvolution,
    NonPermutation,
    SizeMismatch,
)


@dataclass(frozen=True)
class HalfEdgeMap:
    """Rooted combinatorial planar map.

    ``next_dart`` is the ccw rotation; twins are implicit (``d ^ 1``).
    Use :func:`build_map` / :func:`from_faces` instead of the raw constructor.
    """

    next_dart: tuple
    root: int
    vertex_of: tuple      # dart -> vertex id
    face_of: tuple        # dart -> face id
    vertex_cycles: tuple  # vertex id -> tuple of darts (rotation order)
    face_cycles: tuple    # face id -> tuple of darts (face on the left)

    # -- basic counts ---------------------------------------------------------

    @property
    def n_darts(self):
        return len(self.next_dart)

    @property
    def n_edges(self):
        return len(self.next_dart) // 2

    @property
    def n_vertices(self):
        return len(self.vertex_cycles)

    @property
    def n_faces(self):
        return len(self.face_cycles)

    @property
    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + self.n_faces

    @property
    def is_spherical(self):
        return self.euler_characteristic == 2

    @property
    def genus(self):
        return (2 - self.euler_characteristic) // 2

    # -- navigation -----------------------------------------------------------

    def twin(self, dart):
        return dart ^ 1

    def next(self, dart):
        return self.next_dart[dart]

    def face_next(self, dart):
        """Next dart around the face of ``dart`` (face kept on the left)."""
        return self.next_dart[dart ^ 1]

    def edge_of(self, dart):
        return dart >> 1

    def darts_of_edge(self, edge):
        return (2 * edge, 2 * edge + 1)

    def degree(self, vertex):
        return len(self.vertex_cycles[vertex])

    def vertex_faces(self, vertex):
        """Faces at the corners of ``vertex``, one per incident dart."""
        return [self.face_of[d] for d in self.vertex_cycles[vertex]]

    def edge_faces(self, edge):
        d = 2 * edge
        return (self.face_of[d], self.face_of[d ^ 1])

    def edge_vertices(self, edge):
        d = 2 * edge
        return (self.vertex_of[d], self.vertex_of[d ^ 1])


def _orbits(perm):
    n = len(perm)
    seen = [False] * n
    cycles = []
    for start in range(n):
        if seen[start]:
            continue
        cyc = []
        d = start
        while not seen[d]:
            seen[d] = True
            cyc.append(d)
            d = perm[d]
        cycles.append(tuple(cyc))
    return cycles


def build_map(next_permutation, twin_involution, root):
    """Validate and build a rooted map from a rotation system.

    Dart labels are normalized so that ``twin(2k) = 2k+1``; the returned map
    may therefore use different dart indices than the input (the root is
    carried along).  Raises SizeMismatch / NonInvolution / FixedPointInTwin /
    NonPermutation / DisconnectedMap on bad input.
    """
    nxt = list(next_permutation)
    twn = list(twin_involution)
    n = len(nxt)
    if len(twn) != n:
        raise SizeMismatch(f"next acts on {n} darts but twin on {len(twn)}")
    if n == 0 or n % 2:
        raise SizeMismatch(f"dart set must be nonempty and even, got {n}")
    if sorted(nxt) != list(range(n)):
        raise NonPermutation("next is not a permutation of 0..%d" % (n - 1))
    for d in range(n):
        t = twn[d]
        if not (0 <= t < n) or twn[t] != d:
            raise NonInvolution(f"twin fails to be an involution at dart {d}")
        if t == d:
            raise FixedPointInTwin(f"twin fixes dart {d}")
    if not (0 <= root < n):
        raise MapError(f"root dart {root} out of range")

    # Relabel darts so that edge k owns darts 2k, 2k+1 (first-come order).
    relabel = [-1] * n
    k = 0
    for d in range(n):
        if relabel[d] < 0:
            relabel[d] = 2 * k
            relabel[twn[d]] = 2 * k + 1
            k += 1
    new_next = [0] * n
    for d in range(n):
        new_next[relabel[d]] = relabel[nxt[d]]
    return _finish(tuple(new_next), relabel[root])


def _finish(next_dart, root):
    n = len(next_dart)
    vertex_cycles = _orbits(next_dart)
    face_perm = [next_dart[d ^ 1] for d in range(n)]
    face_cycles = _orbits(face_perm)

    # connectivity: BFS over darts via next and twin
    seen = [False] * n
    stack = [root]
    seen[root] = True
    count = 1
    while stack:
        d = stack.pop()
        for e in (next_dart[d], d ^ 1):
            if not seen[e]:
                seen[e] = True
                count += 1
                stack.append(e)
    if count != n:
        raise DisconnectedMap(f"only {count} of {n} darts reachable from root")

    # canonical id order: cycles sorted by smallest dart, rotated to start there
    def canon(cycles):
        out = []
        for cyc in cycles:
            i = cyc.index(min(cyc))
            out.append(cyc[i:] + cyc[:i])
        out.sort(key=lambda c: c[0])
        return tuple(out)

    vertex_cycles = canon(vertex_cycles)
    face_cycles = canon(face_cycles)
    vertex_of = [0] * n
    for vid, cyc in enumerate(vertex_cycles):
        for d in cyc:
            vertex_of[d] = vid
    face_of = [0] * n
    for fid, cyc in enumerate(face_cycles):
        for d in cyc:
            face_of[d] = fid
    return HalfEdgeMap(
        next_dart=tuple(next_dart),
        root=root,
        vertex_of=tuple(vertex_of),
        face_of=tuple(face_of),
        vertex_cycles=vertex_cycles,
        face_cycles=face_cycles,
    )


def faces(m: HalfEdgeMap):
    """Face orbits of ``next o twin`` as dart cycles; they partition the darts."""
    return list(m.face_cycles)


def from_faces(face_vertex_cycles, root_pair=None):
    """Build a map from faces given as vertex cycles (face on the left).

    Each face is a cyclic sequence of vertex labels; every oriented pair
    ``(u, v)`` must occur in exactly one face (so parallel edges between the
    same two vertices are not expressible here).  Returns ``(map, dart_of)``
    where ``dart_of[(u, v)]`` locates oriented edges in the result.
    ``root_pair`` picks the root dart; defaults to the first pair of the
    first face.
    """
    pair_ids = {}
    order = []
    for cyc in face_vertex_cycles:
        k = len(cyc)
        if k < 2:
            raise MapError("face cycles need at least 2 vertices")
        for i in range(k):
            u, v = cyc[i], cyc[(i + 1) % k]
            if u == v:
                raise MapError(f"degenerate edge at vertex {u!r}")
            if (u, v) in pair_ids:
                raise MapError(f"oriented edge {(u, v)!r} occurs twice")
            pair_ids[(u, v)] = None
            order.append((u, v))
    for (u, v) in order:
        if (v, u) not in pair_ids:
            raise MapError(f"unmatched edge {(u, v)!r}: faces do not close up")

    # assign dart ids in first-come edge order, twin-paired
    k = 0
    for (u, v) in order:
        if pair_ids[(u, v)] is None:
            pair_ids[(u, v)] = 2 * k
            pair_ids[(v, u)] = 2 * k + 1
            k += 1
    n = 2 * k

    # face successor phi (faces on the left), then ccw rotation = phi o twin
    face_next = [0] * n
    for cyc in face_vertex_cycles:
        m = len(cyc)
        for i in range(m):
            u, v, w = cyc[i], cyc[(i + 1) % m], cyc[(i + 2) % m]
            face_next[pair_ids[(u, v)]] = pair_ids[(v, w)]
    nxt = [face_next[d ^ 1] for d in range(n)]
    if root_pair is None:
        cyc = face_vertex_cycles[0]
        root_pair = (cyc[0], cyc[1])
    root = pair_ids[root_pair]
    m = _finish(tuple(nxt), root)
    return m, pair_ids


def from_face_edge_cycles(cycles, root_key=None):
    """Build a map from faces given as cycles of ``(tail_vertex, edge_label)``.

    Each entry travels from its tail vertex along the labelled edge to the
    next entry's tail; every edge label must occur exactly twice, with
    distinct tails (no loop edges).  Parallel edges are fine since labels
    disambiguate.  Returns ``(map, dart_of)`` with ``dart_of[(tail, edge)]``
    locating darts; ``root_key`` is such a pair (default: first entry of the
    first face).
    """
    occurrences = {}
    for ci, cyc in enumerate(cycles):
        k = len(cyc)
        if k < 2:
            raise MapError("face cycles need at least two entries")
        for i, (tail, e) in enumerate(cyc):
            head = cyc[(i + 1) % k][0]
            occurrences.setdefault(e, []).append((tail, head, ci, i))
    for e, occ in occurrences.items():
        if len(occ) != 2:
            raise MapError(f"edge {e!r} occurs {len(occ)} times, expected 2")
        if occ[0][0] == occ[1][0]:
            raise MapError(f"edge {e!r} is a loop or doubly-traversed")
        if occ[0][0] != occ[1][1] or occ[0][1] != occ[1][0]:
            raise MapError(f"edge {e!r} endpoints disagree between its two sides")

    edge_ids = {e: i for i, e in enumerate(occurrences)}
    dart_of = {}
    for e, occ in occurrences.items():
        k = edge_ids[e]
        dart_of[(occ[0][0], e)] = 2 * k
        dart_of[(occ[1][0], e)] = 2 * k + 1
    n = 2 * len(occurrences)
    # face successor phi (faces on the left), then ccw rotation = phi o twin
    face_next = [0] * n
    for cyc in cycles:
        k = len(cyc)
        for i, (tail, e) in enumerate(cyc):
            nxt_entry = cyc[(i + 1) % k]
            face_next[dart_of[(tail, e)]] = dart_of[nxt_entry]
    nxt = [face_next[d ^ 1] for d in range(n)]
    if root_key is None:
        root_key = cycles[0][0]
    m = _finish(tuple(nxt), dart_of[root_key])
    return m, dart_of


def canonical_code(m: HalfEdgeMap) -> bytes:
    """Root-preserving isomorphism invariant.

    Two rooted maps are isomorphic (there is a dart bijection commuting with
    next and twin and matching roots) iff their codes are equal: the code is
    the next/twin tables written in breadth-first visit order from the root.
    """
    label = canonical_labeling(m)
    n = m.n_darts
    inv = [0] * n
    for d, lab in enumerate(label):
        inv[lab] = d
    parts = []
    for lab in range(n):
        d = inv[lab]
        parts.append(f"{label[m.next_dart[d]]},{label[d ^ 1]}")
    return (f"E={m.n_edges};" + ";".join(parts)).encode("ascii")


def canonical_labeling(m: HalfEdgeMap):
    """BFS-from-root dart labeling used by :func:`canonical_code`."""
    n = m.n_darts
    label = [-1] * n
    label[m.root] = 0
    queue = [m.root]
    nxt = 1
    head = 0
    while head < len(queue):
        d = queue[head]
        head += 1
        for e in (m.next_dart[d], d ^ 1):
            if label[e] < 0:
                label[e] = nxt
                nxt += 1
                queue.append(e)
    return label


def relabel_map(m: HalfEdgeMap, dart_permutation):
    """Apply a dart relabeling (conjugation); used by property tests."""
    n = m.n_darts
    nxt = [0] * n
    twn = [0] * n
    for d in range(n):
        nxt[dart_permutation[d]] = dart_permutation[m.next_dart[d]]
        twn[dart_permutation[d]] = dart_permutation[d ^ 1]
    return build_map(nxt, twn, dart_permutation[m.root])


# --- serialization -------------------------------------------------------------

def to_text(m: HalfEdgeMap) -> str:
    """Line-based text format: ``E=<n>`` then one ``next twin`` pair per dart."""
    lines = [f"E={m.n_edges}"]
    for d in range(m.n_darts):
        lines.append(f"{m.next_dart[d]} {d ^ 1}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> HalfEdgeMap:
    lines = [ln for ln in (s.strip() for s in text.splitlines()) if ln]
    if not lines or not lines[0].startswith("E="):
        raise MapError("expected header line 'E=<n>'")
    n_edges = int(lines[0][2:])
    body = lines[1 : 1 + 2 * n_edges]
    if len(body) != 2 * n_edges:
        raise SizeMismatch("wrong number of dart lines")
    nxt, twn = [], []
    for ln in body:
        a, b = ln.split()
        nxt.append(int(a))
        twn.append(int(b))
    return build_map(nxt, twn, 0)


# --- small classical fixtures ----------------------------------------------------

def polygon_map(k: int) -> HalfEdgeMap:
    """Cycle on k vertices (k >= 2): V=k, E=k, F=2."""
    cycle = list(range(k))
    m, _ = from_faces([cycle, list(reversed(cycle))])
    return m


def single_edge_map() -> HalfEdgeMap:
    """One edge, two vertices, one face of two darts."""
    return build_map([0, 1], [1, 0], 0)


def tetrahedron_map() -> HalfEdgeMap:
    """Skeleton of the tetrahedron: V=4, E=6, F=4."""
    faces_ = [(0, 1, 2), (0, 2, 3), (0, 3, 1), (3, 2, 1)]
    m, _ = from_faces(faces_)
    return m
