"""Enumeration of hole fillings and the product bijection check.

Given a marked subtemplate, a filling is an ordered hole-free template
containing it as marked subtemplate; the unmarked faces form one cluster
per hole, all 4-gons.  Fillings are enumerated by replaying the iterative
construction: every ordered template arises from a unique sequence of
(left split, right split) choices plus a marked/unmarked tag per 4-gon, so
a depth-first search over (t, s, tag) sequences with a final reduce-and-
compare is exhaustive.  Budgets are per hole.

Pruning keeps the search at desk scale: tag counts, per-step side-profile
matching (the near sides of a marked 4-gon must collapse to the side
profile of an unused subtemplate 4-gon), and a closing profile check for
the 2-gon.  All prunes are sound: they never reject a sequence that could
reduce to the target subtemplate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import planar_map as pm
from ._builder import EXT, Builder
from .errors import BijectionViolation, BudgetExhausted, TemplateError
from .quilt import (
    MarkedSubtemplate,
    Template,
    mark_subtemplate,
    recover_face_order,
    template_iso,
    template_key,
    validate_template,
)


@dataclass(frozen=True)
class Filling:
    """An element of the filling set: ordered template plus its marking.

    ``clusters[i]`` is the face set filling hole i (position in the
    subtemplate's hole label order); ``added[i]`` its size.
    """

    template: Template
    marked: frozenset
    clusters: tuple
    key: bytes

    @property
    def added(self):
        return tuple(len(c) for c in self.clusters)


def _normalize_budgets(tsub: MarkedSubtemplate, n_max):
    b = tsub.n_holes
    if isinstance(n_max, int):
        return (n_max,) * b
    budgets = tuple(int(x) for x in n_max)
    if len(budgets) != b:
        raise TemplateError(f"need {b} budgets, got {len(budgets)}")
    return budgets


# --- side profiles for pruning ------------------------------------------------------


def _collapse(tags):
    out = []
    for t in tags:
        if t == "H" and out and out[-1] == "H":
            continue
        out.append(t)
    return tuple(out)


def _tsub_side_profile(tsub: MarkedSubtemplate, face, side_idx):
    t = tsub.template
    tags = []
    for d in t.side_dart_paths(face)[side_idx]:
        g = t.map.face_of[d ^ 1]
        tags.append("H" if g in t.holes else f"M{t.k_gon(g)}")
    return _collapse(tags)


def _tsub_profiles(tsub: MarkedSubtemplate):
    """Near-side profiles of the subtemplate's 4-gons, and the 2-gon's."""
    t = tsub.template
    four = []
    two = None
    for f in t.marks:
        k = t.k_gon(f)
        if k == 4:
            # sides 3 (L-, from b to a) and 0 (R-, from a to c)
            four.append((_tsub_side_profile(tsub, f, 3), _tsub_side_profile(tsub, f, 0)))
        elif k == 2:
            two = (_tsub_side_profile(tsub, f, 1), _tsub_side_profile(tsub, f, 0))
    return four, two


def _frontier_profile(builder: Builder, arc, count, tags):
    """Collapsed tags of the first ``count`` frontier edges of ``arc``."""
    out = []
    for eid, _, _ in arc[:count]:
        f = builder.edge_face[eid]
        if f == EXT:
            out.append("M1")
        elif f == 0:
            out.append("M3")
        elif tags[f - 1] == "M":
            out.append("M4")
        else:
            out.append("H")
    return out


# --- the search -----------------------------------------------------------------------


def enumerate_fillings(tsub: MarkedSubtemplate, n_max):
    """All fillings of the subtemplate, per-hole budgets ``n_max``.

    Output is duplicate-free (construction sequences biject with ordered
    templates) and sorted by canonical key; every result passes
    validate_template and reduces back to the subtemplate.
    """
    budgets = _normalize_budgets(tsub, n_max)
    b = tsub.n_holes
    t = tsub.template
    n4 = sum(1 for f in t.marks if t.k_gon(f) == 4)
    four_profiles, two_profile = _tsub_profiles(tsub)
    tsub_key = template_key(t)
    total_budget = sum(budgets)

    results = []
    seen = set()

    def close_profile_ok(builder):
        left = _frontier_profile(builder, builder.left, len(builder.left), tags)
        right = _frontier_profile(builder, builder.right, len(builder.right), tags)
        lpat = _collapse(list(reversed(left)))
        rpat = _collapse(right)
        return (lpat, rpat) == two_profile

    def finish(builder):
        builder = builder.clone()
        builder.close()
        template, seq_to_face, _ = builder.build()
        report = validate_template(template)
        if not report.passed:
            raise TemplateError(f"search produced an invalid template: {report.failures()}")
        marked = {seq_to_face[EXT], seq_to_face[0], seq_to_face[len(builder.cycles) - 1]}
        for i, tag in enumerate(tags):
            if tag == "M":
                marked.add(seq_to_face[i + 1])
        marked = frozenset(marked)
        try:
            red = mark_subtemplate(template, marked)
        except TemplateError:
            return
        if template_key(red.template) != tsub_key:
            return
        iso = template_iso(red.template, t)
        # hole labels of the reduction, matched to the subtemplate's labels
        clusters = [None] * b
        for pos, hole_face in enumerate(red.hole_labels):
            d = red.template.map.face_cycles[hole_face][0]
            target_face = t.map.face_of[iso[d]]
            target_pos = tsub.hole_labels.index(target_face)
            clusters[target_pos] = red.cluster_faces[pos]
        if any(c is None for c in clusters):
            return
        if any(len(c) > budgets[i] for i, c in enumerate(clusters)):
            return
        key = template_key(template, marked=marked)
        if key in seen:
            raise TemplateError("duplicate filling found; construction not unique")
        seen.add(key)
        results.append(
            Filling(template=template, marked=marked, clusters=tuple(clusters), key=key)
        )

    tags = []

    def search(builder, marked_used, unmarked_used, available):
        if marked_used == n4 and unmarked_used >= b and close_profile_ok(builder):
            finish(builder)
        for t_i in range(1, len(builder.left) + 1):
            for s_i in range(1, len(builder.right) + 1):
                lraw = _frontier_profile(builder, builder.left, t_i, tags)
                rraw = _frontier_profile(builder, builder.right, s_i, tags)
                prof = (_collapse(list(reversed(lraw))), _collapse(rraw))
                if unmarked_used < total_budget:
                    child = builder.clone()
                    child.add_face(t=t_i, s=s_i)
                    tags.append("U")
                    search(child, marked_used, unmarked_used + 1, available)
                    tags.pop()
                if marked_used < n4 and prof in available:
                    child = builder.clone()
                    child.add_face(t=t_i, s=s_i)
                    tags.append("M")
                    next_av = available.copy()
                    next_av[prof] -= 1
                    if not next_av[prof]:
                        del next_av[prof]
                    search(child, marked_used + 1, unmarked_used, next_av)
                    tags.pop()

    available = {}
    for prof in four_profiles:
        available[prof] = available.get(prof, 0) + 1
    search(Builder(), 0, 0, available)
    if not results:
        raise BudgetExhausted(
            f"no filling of the subtemplate within budgets {budgets}"
        )
    results.sort(key=lambda f: f.key)
    return results


# --- projections and the product bijection ---------------------------------------------


def project_filling(tsub: MarkedSubtemplate, filling: Filling, hole_pos: int):
    """The hole-``hole_pos`` projection: re-holify every other cluster."""
    keep = set(filling.marked) | set(filling.clusters[hole_pos])
    return mark_subtemplate(filling.template, keep)


@dataclass(frozen=True)
class BijectionReport:
    n_fillings: int
    factor_sizes: tuple
    injective: bool
    surjective: bool
    composed_checked: int

    @property
    def product(self):
        p = 1
        for s in self.factor_sizes:
            p *= s
        return p


def verify_product_bijection(tsub: MarkedSubtemplate, n_max, constructive=True,
                             fillings=None):
    """Check that fillings factor as the product of per-hole filling sets.

    Enumerates the filling set at the given per-hole budgets, projects each
    filling to its per-hole factors, and verifies the product map is
    injective with image size equal to the product of the factor sizes.
    With ``constructive=True`` every factor combination is also glued back
    together (compose_fillings) and checked to be a filling with the right
    projections, which exhibits surjectivity directly rather than by
    counting.  Raises BijectionViolation on failure.
    """
    budgets = _normalize_budgets(tsub, n_max)
    b = tsub.n_holes
    if fillings is None:
        fillings = enumerate_fillings(tsub, budgets)
    if not fillings:
        raise BijectionViolation("no fillings within budget")

    factors = [dict() for _ in range(b)]  # key -> representative filling
    tuples = []
    for f in fillings:
        keys = []
        for i in range(b):
            proj = project_filling(tsub, f, i)
            k = template_key(proj.template)
            factors[i].setdefault(k, f)
            keys.append(k)
        tuples.append(tuple(keys))

    injective = len(set(tuples)) == len(tuples)
    if not injective:
        raise BijectionViolation("two fillings share all their projections")
    sizes = tuple(len(d) for d in factors)
    product = 1
    for s in sizes:
        product *= s
    if product != len(fillings):
        raise BijectionViolation(
            f"|fillings| = {len(fillings)} but product of factors = {product}"
        )

    composed = 0
    if constructive and b >= 1:
        reps = [list(d.items()) for d in factors]
        tuple_set = set(tuples)
        for combo in itertools.product(*reps):
            want = tuple(k for k, _ in combo)
            sources = [f for _, f in combo]
            template, marked = compose_fillings(tsub, sources)
            red = mark_subtemplate(template, marked)
            if template_key(red.template) != template_key(tsub.template):
                raise BijectionViolation("composed template has the wrong subtemplate")
            comp_filling = _filling_from(tsub, template, marked)
            got = tuple(
                template_key(project_filling(tsub, comp_filling, i).template)
                for i in range(b)
            )
            if got != want:
                raise BijectionViolation("composed filling has wrong projections")
            if want not in tuple_set:
                raise BijectionViolation(
                    "composed a valid filling missing from the enumeration"
                )
            composed += 1

    return BijectionReport(
        n_fillings=len(fillings),
        factor_sizes=sizes,
        injective=True,
        surjective=True,
        composed_checked=composed,
    )


def _filling_from(tsub: MarkedSubtemplate, template: Template, marked):
    """Package an ordered template + marking as a Filling of ``tsub``."""
    red = mark_subtemplate(template, marked)
    iso = template_iso(red.template, tsub.template)
    if iso is None:
        raise TemplateError("template does not reduce to the subtemplate")
    b = tsub.n_holes
    clusters = [None] * b
    for pos, hole_face in enumerate(red.hole_labels):
        d = red.template.map.face_cycles[hole_face][0]
        target_face = tsub.template.map.face_of[iso[d]]
        clusters[tsub.hole_labels.index(target_face)] = red.cluster_faces[pos]
    return Filling(
        template=template,
        marked=frozenset(marked),
        clusters=tuple(clusters),
        key=template_key(template, marked=frozenset(marked)),
    )


# --- gluing fillings hole by hole --------------------------------------------------------


def compose_fillings(tsub: MarkedSubtemplate, sources):
    """Glue per-hole fillings: hole i is filled as in ``sources[i]``.

    Returns (template, marked_faces).  Each source must be a filling of
    ``tsub``; only its cluster for the corresponding hole is used.
    """
    t = tsub.template
    b = tsub.n_holes
    if len(sources) != b:
        raise TemplateError(f"need {b} sources, one per hole")

    # per-hole data extracted from each source's reduction
    hole_data = []
    for j, g in enumerate(sources):
        red = mark_subtemplate(g.template, g.marked)
        iso = template_iso(t, red.template)  # tsub dart -> reduced dart
        if iso is None:
            raise TemplateError(f"source {j} does not reduce to the subtemplate")
        gmap = g.template.map
        rmap = red.template.map
        # reduced vertex -> source vertex, then tsub vertex -> source vertex
        expansion = red.dart_expansion
        tsub_to_g_vertex = {}
        for d in range(t.map.n_darts):
            rd = iso[d]
            tsub_to_g_vertex[t.map.vertex_of[d]] = gmap.vertex_of[expansion[rd][0]]
        g_vertex_to_tsub = {gv: tv for tv, gv in tsub_to_g_vertex.items()}
        hole_face = tsub.hole_labels[j]
        # which source faces fill this hole
        rd0 = iso[t.map.face_cycles[hole_face][0]]
        g_face0 = gmap.face_of[expansion[rd0][0]]
        cluster = None
        for c in g.clusters:
            if g_face0 in c:
                cluster = c
        if cluster is None:
            raise TemplateError(f"source {j}: hole image is not an unmarked cluster")
        boundary_pieces = {}
        for d in range(t.map.n_darts):
            if t.map.face_of[d] == hole_face or t.map.face_of[d ^ 1] == hole_face:
                boundary_pieces[d] = expansion[iso[d]]
        piece_edges = {
            x >> 1 for path in boundary_pieces.values() for x in path
        }
        hole_data.append(
            dict(
                g=g,
                gmap=gmap,
                cluster=cluster,
                boundary_pieces=boundary_pieces,
                piece_edges=piece_edges,
                g_vertex_to_tsub=g_vertex_to_tsub,
            )
        )

    hole_of_dart = {}
    for j in range(b):
        hf = tsub.hole_labels[j]
        for d in range(t.map.n_darts):
            if t.map.face_of[d ^ 1] == hf:
                hole_of_dart[d] = j

    def vname(j, gv):
        data = hole_data[j]
        if gv in data["g_vertex_to_tsub"]:
            return ("t", data["g_vertex_to_tsub"][gv])
        return ("s", j, gv)

    cycles = []
    face_tags = []
    root_entry = None
    root_dart = t.map.root

    # marked faces: tsub cycles with hole-boundary edges expanded
    for f in sorted(t.marks):
        entries = []
        for d in t.map.face_cycles[f]:
            if d in hole_of_dart:
                j = hole_of_dart[d]
                data = hole_data[j]
                for x in data["boundary_pieces"][d]:
                    entry = (vname(j, data["gmap"].vertex_of[x]), ("e", j, x >> 1))
                    if d == root_dart and root_entry is None:
                        root_entry = entry
                    entries.append(entry)
            else:
                entry = (("t", t.map.vertex_of[d]), ("t", d >> 1))
                if d == root_dart:
                    root_entry = entry
                entries.append(entry)
        cycles.append(entries)
        face_tags.append(("marked", f))

    # hole interiors from the sources
    for j in range(b):
        data = hole_data[j]
        gmap = data["gmap"]
        for gf in sorted(data["cluster"]):
            entries = []
            for x in gmap.face_cycles[gf]:
                ge = x >> 1
                label = ("e", j, ge) if ge in data["piece_edges"] else ("i", j, ge)
                entries.append((vname(j, gmap.vertex_of[x]), label))
            cycles.append(entries)
            face_tags.append(("hole", j, gf))

    hmap, dart_of = pm.from_face_edge_cycles(cycles, root_key=root_entry)

    vmap = {}
    for (tail, _e), dd in dart_of.items():
        vmap.setdefault(tail, hmap.vertex_of[dd])

    marks = {}
    marked_faces = set()
    for entries, tag in zip(cycles, face_tags):
        fid = hmap.face_of[dart_of[entries[0]]]
        if tag[0] == "marked":
            f = tag[1]
            marks[fid] = tuple(vmap[("t", v)] for v in t.marks[f])
            marked_faces.add(fid)
        else:
            _, j, gf = tag
            g = hole_data[j]["g"]
            marks[fid] = tuple(
                vmap[vname(j, v)] for v in g.template.marks[gf]
            )
    template = Template(map=hmap, marks=marks, holes=frozenset(), face_order=None)
    template = Template(
        map=hmap, marks=marks, holes=frozenset(),
        face_order=recover_face_order(template),
    )
    report = validate_template(template)
    if not report.passed:
        raise BijectionViolation(
            f"composed template violates the template conditions: {report.failures()}"
        )
    return template, frozenset(marked_faces)
