"""Locally ordered triangulation of the closed genus-g surface.

The fundamental domain is a 4g-gon cut into g wedges.  Wedge ``k`` has
outer boundary (read counter-clockwise)::

    v0 a1 a2 v1 *b1 *b2 v2 *a2 *a1 v3 b2 b1 v4

with sides ``a = (v0, a1, a2, v1)``, ``*b = (v1, *b1, *b2, v2)``,
``*a = (v3, *a1, *a2, v2)`` and ``b = (v4, b1, b2, v3)``, and an inner path
``w0 .. w4`` with ``v4^k = v0^{k+1}`` and ``w4^k = w0^{k+1}`` (indices mod g).
Each of the four segments between ``v_i`` and ``v_{i+1}`` is a ladder of four
triangles::

    (v_i, x1, w_i)  (x1, w_i, w_{i+1})  (x1, x2, w_{i+1})  (x2, v_{i+1}, w_{i+1})

and the central 4g-gon of inner vertices is fanned from ``w0^1``.
Gluing ``a`` to ``*a``, ``b`` to ``*b`` and all corners to one vertex ``v``
gives the surface.  Vertex ids follow the local order: ``v`` first, then
``a1^k < a2^k < b1^k < b2^k`` handle by handle, then the inner vertices
``w0^1 < w1^1 < ... < w3^g``.

Every vertex of the fundamental domain carries a *sheet word*: the deck
transformation taking its tree lift to it.  The group element of an edge
``x -> y`` is ``sheet(x)^-1 sheet(y)``, pushed through the section of the
surface group.
"""
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEmbedding, NotAnEdge, UnclassifiedEdge
from .groups import alpha, beta, build_surface_group, evaluate_word, identity_word

DELTA = 0.1
COLLAR = 1.0 / 3.0 - DELTA


@dataclass(frozen=True)
class SurfaceComplex:
    genus: int
    vertices: tuple          # names in local order; index = vertex id
    vertex_class: tuple      # "v", "a", "b" or "w"
    edges: tuple             # (i, j) with i < j
    triangles: tuple         # (i, j, k) with i < j < k
    tree_edges: frozenset
    root: int
    triangle_lifts: tuple    # per triangle: lift names of (i, j, k)
    triangle_coords: tuple   # per triangle: 3x2 array, planar coords of the lifts
    edge_lifts: dict         # edge -> list of (lift name i, lift name j)
    lift_sheets: dict        # lift name -> sheet word

    @property
    def euler_characteristic(self):
        return len(self.vertices) - len(self.edges) + len(self.triangles)

    def vertex_id(self, name):
        return self.vertices.index(name)

    def triangle_id(self, lift_names):
        target = set(lift_names)
        for t, names in enumerate(self.triangle_lifts):
            if set(names) == target:
                return t
        raise KeyError(lift_names)

    @property
    def exceptional_triangle(self):
        g = self.genus
        return self.triangle_id((f"v1^{g}", f"a2^{g}", f"w1^{g}"))


def _lift_to_vertex(name, g):
    """Name in the surface of a vertex of the fundamental domain."""
    if name.startswith("v"):
        return "v"
    if name.startswith("*"):
        return name[1:]
    if name.startswith("w"):
        i, k = name[1:].split("^")
        i, k = int(i), int(k)
        if i == 4:
            return f"w0^{k % g + 1}"
        return name
    return name


def _canonical_lift(name, g):
    """Collapse the aliases v4^k = v0^{k+1} and w4^k = w0^{k+1}."""
    if name[0] in "vw" and name[1] == "4":
        k = int(name.split("^")[1])
        return f"{name[0]}0^{k % g + 1}"
    return name


def build_complex(g):
    if g < 1:
        raise ValueError("genus must be >= 1")
    sg = build_surface_group(g)
    kap = sg.kappa_words

    vertices = ["v"]
    for k in range(1, g + 1):
        vertices += [f"a1^{k}", f"a2^{k}", f"b1^{k}", f"b2^{k}"]
    for k in range(1, g + 1):
        vertices += [f"w{i}^{k}" for i in range(4)]
    vid = {n: i for i, n in enumerate(vertices)}
    vclass = tuple(n[0] for n in vertices)

    # sheets and planar coordinates of the fundamental-domain vertices
    sheets = {}
    coords = {}
    n_outer = 12 * g
    for k in range(1, g + 1):
        a, b, kp = alpha(g, k), beta(g, k), kap[k - 1]
        sheets[f"v0^{k}"] = kp.inverse()
        sheets[f"v1^{k}"] = (kp * a * b * a.inverse()).inverse()
        sheets[f"v2^{k}"] = (kp * a * b).inverse()
        sheets[f"v3^{k}"] = (kp * a).inverse()
        for i in (1, 2):
            sheets[f"a{i}^{k}"] = a
            sheets[f"b{i}^{k}"] = b
            sheets[f"*a{i}^{k}"] = identity_word(g)
            sheets[f"*b{i}^{k}"] = identity_word(g)
        for i in range(4):
            sheets[f"w{i}^{k}"] = identity_word(g)
        ring = ["v0", "a1", "a2", "v1", "*b1", "*b2", "v2", "*a2", "*a1", "v3", "b2", "b1"]
        for j, nm in enumerate(ring):
            ang = 2 * math.pi * (12 * (k - 1) + j) / n_outer
            coords[f"{nm}^{k}"] = (math.cos(ang), math.sin(ang))
            if nm[0] == "v":
                coords[f"w{nm[1]}^{k}"] = (0.5 * math.cos(ang), 0.5 * math.sin(ang))

    tri_lifts = []
    for k in range(1, g + 1):
        segs = [("a1", "a2"), ("*b1", "*b2"), ("*a2", "*a1"), ("b2", "b1")]
        for i, (x1, x2) in enumerate(segs):
            vi, vj = f"v{i}^{k}", f"v{i + 1}^{k}"
            wi, wj = f"w{i}^{k}", f"w{i + 1}^{k}"
            x1, x2 = f"{x1}^{k}", f"{x2}^{k}"
            tri_lifts += [(vi, x1, wi), (x1, wi, wj), (x1, x2, wj), (x2, vj, wj)]
    ring_w = [f"w{i}^{k}" for k in range(1, g + 1) for i in range(4)]
    for j in range(1, len(ring_w) - 1):
        tri_lifts.append((ring_w[0], ring_w[j], ring_w[j + 1]))

    triangles, t_lifts, t_coords = [], [], []
    edge_lifts = defaultdict(list)
    for lift in tri_lifts:
        lift = tuple(_canonical_lift(n, g) for n in lift)
        ids = [vid[_lift_to_vertex(n, g)] for n in lift]
        order = np.argsort(ids)
        lift = tuple(lift[o] for o in order)
        ids = tuple(ids[o] for o in order)
        if len(set(ids)) != 3:
            raise UnclassifiedEdge(f"degenerate triangle {lift}")
        triangles.append(ids)
        t_lifts.append(lift)
        t_coords.append(np.array([coords[n] for n in lift]))
        for p, q in ((0, 1), (1, 2), (0, 2)):
            e = (ids[p], ids[q])
            pair = (lift[p], lift[q])
            if pair not in edge_lifts[e]:
                edge_lifts[e].append(pair)
    edges = tuple(sorted(edge_lifts))

    tree = {tuple(sorted((vid["v"], vid["w0^1"])))}
    for j in range(len(ring_w) - 1):
        tree.add(tuple(sorted((vid[ring_w[j]], vid[ring_w[j + 1]]))))
    for k in range(1, g + 1):
        for x, w in (("b1", "w1"), ("b2", "w2"), ("a2", "w2"), ("a1", "w3")):
            tree.add(tuple(sorted((vid[f"{x}^{k}"], vid[f"{w}^{k}"]))))

    return SurfaceComplex(
        genus=g,
        vertices=tuple(vertices),
        vertex_class=vclass,
        edges=edges,
        triangles=tuple(triangles),
        tree_edges=frozenset(tree),
        root=vid["v"],
        triangle_lifts=tuple(t_lifts),
        triangle_coords=tuple(t_coords),
        edge_lifts=dict(edge_lifts),
        lift_sheets=sheets,
    )


# ---------------------------------------------------------------------------
# structural checks

def edge_incidence(c):
    count = defaultdict(int)
    for i, j, k in c.triangles:
        for e in ((i, j), (j, k), (i, k)):
            count[e] += 1
    return dict(count)


def vertex_links_are_cycles(c):
    """True if the link of every vertex is one closed cycle."""
    for x in range(len(c.vertices)):
        link = defaultdict(list)
        for t in c.triangles:
            if x in t:
                p, q = [y for y in t if y != x]
                link[p].append(q)
                link[q].append(p)
        if not link or any(len(nb) != 2 for nb in link.values()):
            return False
        start = next(iter(link))
        prev, cur, n = None, start, 0
        while True:
            nxt = link[cur][0] if link[cur][0] != prev else link[cur][1]
            prev, cur = cur, nxt
            n += 1
            if cur == start:
                break
        if n != len(link):
            return False
    return True


def tree_is_spanning(c):
    n = len(c.vertices)
    if len(c.tree_edges) != n - 1 or not set(c.tree_edges) <= set(c.edges):
        return False
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in c.tree_edges:
        ri, rj = find(i), find(j)
        if ri == rj:
            return False
        parent[ri] = rj
    return len({find(x) for x in range(n)}) == 1


# ---------------------------------------------------------------------------
# edge labels

class EdgeLabeling(dict):
    """Map ``(i, j) -> FreeWord`` for ordered edges; reversed keys give inverses."""

    def __missing__(self, key):
        i, j = key
        if (j, i) in self.keys():
            return dict.__getitem__(self, (j, i)).inverse()
        raise KeyError(key)

    def __contains__(self, key):
        return dict.__contains__(self, key) or dict.__contains__(self, key[::-1])


def edge_labels(c, sg=None):
    """Section images of the edge group elements.

    Every lift of a surface edge must give the same element; a mismatch or an
    element outside the alphabet signals a malformed complex.
    """
    sg = sg or build_surface_group(c.genus)
    labels = EdgeLabeling()
    for e in c.edges:
        images = set()
        for x, y in c.edge_lifts[e]:
            raw = c.lift_sheets[x].inverse() * c.lift_sheets[y]
            try:
                images.add(sg.section_image(raw))
            except KeyError:
                raise UnclassifiedEdge(f"edge {x}-{y} gives {raw}, not in the label alphabet")
        if len(images) != 1:
            raise UnclassifiedEdge(f"lifts of edge {e} disagree: {sorted(map(str, images))}")
        labels[e] = images.pop()
    return labels


def cocycle_defect_word(labels, tri):
    """``label(i,j) label(j,k) label(i,k)^-1``; empty where the section is multiplicative."""
    i, j, k = tri
    return labels[(i, j)] * labels[(j, k)] * labels[(i, k)].inverse()


# ---------------------------------------------------------------------------
# orientation

def signed_area(p):
    p = np.asarray(p, dtype=float)
    return 0.5 * ((p[1, 0] - p[0, 0]) * (p[2, 1] - p[0, 1])
                  - (p[2, 0] - p[0, 0]) * (p[1, 1] - p[0, 1]))


def orientation_sign_from_points(p):
    """0 if the ordered triple is counter-clockwise, 1 if clockwise.

    With the counter-clockwise orientation, the boundary of the dual cell
    block of the first vertex runs barycenter -> midpoint of the long edge
    exactly when the triple is counter-clockwise.
    """
    a = signed_area(p)
    if abs(a) < 1e-12:
        raise DegenerateEmbedding(f"signed area {a:.3e}")
    return 0 if a > 0 else 1


def orientation_signs(c):
    return [orientation_sign_from_points(p) for p in c.triangle_coords]


# ---------------------------------------------------------------------------
# dual cells, partition of unity, transitions

def in_dual_block(t, vertex):
    """Barycentric max rule for the dual cell block of local vertex 0, 1 or 2."""
    t = np.asarray(t, dtype=float)
    return bool(t[vertex] >= t.max() - 1e-15)


def partition_of_unity_at(c, triangle, t, delta=DELTA):
    """Weights of the three vertices of ``triangle`` at barycentric point ``t``.

    ``chi_i = max(t_i - (1/3 - delta), 0)``, renormalized.  Since some
    coordinate is at least 1/3 the normalizer never vanishes.
    """
    t = np.asarray(t, dtype=float)
    if t.shape != (3,) or np.any(t < -1e-14) or abs(t.sum() - 1) > 1e-12:
        raise ValueError("point outside the closed standard simplex")
    w = np.maximum(t - (1.0 / 3.0 - delta), 0.0)
    return w / w.sum()


def label_matrices(c, labels, tup, triangle):
    """``(pi(s_ij), pi(s_jk), pi(s_ik))`` for the ordered triangle."""
    i, j, k = c.triangles[triangle]
    return (evaluate_word(tup, labels[(i, j)]),
            evaluate_word(tup, labels[(j, k)]),
            evaluate_word(tup, labels[(i, k)]))


def transition_at(c, labels, tup, triangle, pair, parameter):
    """Transition function on the edge ``pair`` (local positions, e.g. (0, 2)).

    The long edge (0, 2) interpolates linearly from ``pi(s_ik)`` at
    ``parameter = 0`` (edge midpoint) to ``pi(s_ij) pi(s_jk)`` at
    ``parameter = 1`` (start of the collar around the barycenter); the two
    short edges are constant.  Reversed pairs give inverses.
    """
    if not 0.0 <= parameter <= 1.0:
        raise ValueError("parameter must lie in [0, 1]")
    p, q = pair
    if p == q or p not in (0, 1, 2) or q not in (0, 1, 2):
        raise NotAnEdge(f"{pair} is not an edge of the triangle")
    if p > q:
        return np.linalg.inv(transition_at(c, labels, tup, triangle, (q, p), parameter))
    sij, sjk, sik = label_matrices(c, labels, tup, triangle)
    if (p, q) == (0, 1):
        return sij
    if (p, q) == (1, 2):
        return sjk
    return (1.0 - parameter) * sik + parameter * (sij @ sjk)


def collar_parameter(t, delta=DELTA):
    """Interpolation parameter of the long edge at barycentric point ``t``."""
    return min(float(t[1]) / (1.0 / 3.0 - delta), 1.0)


def export_text(c, labels=None):
    """Human-readable dump for inspection and regression snapshots."""
    lines = [f"genus {c.genus}", f"euler {c.euler_characteristic}", "vertices"]
    for i, n in enumerate(c.vertices):
        lines.append(f"  {i} {n} {c.vertex_class[i]}")
    lines.append("edges")
    for e in c.edges:
        tag = " tree" if e in c.tree_edges else ""
        lab = f" {labels[e]}" if labels is not None else ""
        lines.append(f"  {e[0]} {e[1]}{lab}{tag}")
    lines.append("triangles")
    signs = orientation_signs(c)
    for t, (tri, lift) in enumerate(zip(c.triangles, c.triangle_lifts)):
        xy = " ".join(f"({x:.6f},{y:.6f})" for x, y in c.triangle_coords[t])
        lines.append(f"  {t} {tri[0]} {tri[1]} {tri[2]} s={signs[t]} lifts={','.join(lift)} {xy}")
    return "\n".join(lines) + "\n"
