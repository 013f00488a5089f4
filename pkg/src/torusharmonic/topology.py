"""Toroidal cell complexes with integer translation labels.

A complex stores vertices ``0..V-1``, edges with a tail, a head and an
integer label ``(dx, dy)``, and faces as cyclic lists of signed edge ids.
The label of an edge is the deck translation, in units of the two marking
generators, that carries the base lift of the tail's neighbour to the lift
actually reached by the edge.  Summed along a closed walk the labels give the
homotopy class of the walk, so they fix the marking of the torus.

Faces are oriented counterclockwise: ``+e`` appears in the face to the left
of ``e`` and ``-e`` in the face to its right.  The dual edge ``*e`` runs from
the right face to the left face.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidComplexError, ParseError


@dataclass(frozen=True)
class Issue:
    kind: str
    message: str
    face: int | None = None
    edge: int | None = None
    vertex: int | None = None

    def __str__(self) -> str:
        where = []
        if self.face is not None:
            where.append(f"face {self.face}")
        if self.edge is not None:
            where.append(f"edge {self.edge}")
        if self.vertex is not None:
            where.append(f"vertex {self.vertex}")
        loc = f" [{', '.join(where)}]" if where else ""
        return f"{self.kind}: {self.message}{loc}"


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)
    euler_characteristic: int | None = None
    marking_degree: int | None = None

    @property
    def valid(self) -> bool:
        return not self.issues

    def add(self, kind: str, message: str, **where) -> None:
        self.issues.append(Issue(kind, message, **where))

    def summary(self) -> str:
        if self.valid:
            return "valid"
        return "\n".join(str(i) for i in self.issues)

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "euler_characteristic": self.euler_characteristic,
            "marking_degree": self.marking_degree,
            "issues": [
                {k: v for k, v in vars(i).items() if v is not None} for i in self.issues
            ],
        }


@dataclass(frozen=True)
class EdgeWeights:
    """One real weight per undirected edge, in edge-index order."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def uniform(cls, num_edges: int, value: float = 1.0) -> "EdgeWeights":
        return cls(np.full(num_edges, float(value)))

    def __len__(self) -> int:
        return self.values.size

    @property
    def positive(self) -> bool:
        return bool(np.all(self.values > 0))

    @property
    def has_zero(self) -> bool:
        return bool(np.any(self.values == 0))

    def scaled(self, factor: float) -> "EdgeWeights":
        return EdgeWeights(self.values * factor)

    def reciprocal(self) -> "EdgeWeights":
        if self.has_zero:
            raise ValueError("reciprocal weights undefined: some edge weight is zero")
        return EdgeWeights(1.0 / self.values)


@dataclass(frozen=True, eq=False)
class ToroidalComplex:
    """Combinatorial cell decomposition of the torus with a marking.

    ``faces`` holds, per face, a tuple of ``(edge_id, sign)`` pairs in
    cyclic order.  Construction does not validate; call
    :func:`validate_complex` or :meth:`require_valid`.
    """

    num_vertices: int
    edge_ids: tuple[int, ...]
    tails: np.ndarray
    heads: np.ndarray
    labels: np.ndarray
    faces: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self):
        for name, dtype, shape in (
            ("tails", np.int64, (-1,)),
            ("heads", np.int64, (-1,)),
            ("labels", np.int64, (-1, 2)),
        ):
            arr = np.array(getattr(self, name), dtype=dtype).reshape(shape)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "edge_ids", tuple(int(i) for i in self.edge_ids))
        object.__setattr__(
            self,
            "faces",
            tuple(tuple((int(e), 1 if s > 0 else -1) for e, s in f) for f in self.faces),
        )

    # -- construction -----------------------------------------------------

    @classmethod
    def from_arrays(cls, num_vertices, tails, heads, labels, faces_signed):
        """Build from 0-based arrays; ``faces_signed`` uses the ``±(id+1)`` encoding."""
        faces = tuple(tuple((abs(s) - 1, 1 if s > 0 else -1) for s in f) for f in faces_signed)
        return cls(num_vertices, tuple(range(len(tails))), tails, heads, labels, faces)

    # -- sizes and lookups --------------------------------------------------

    @property
    def num_edges(self) -> int:
        return len(self.edge_ids)

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        return self.num_vertices - self.num_edges + self.num_faces

    @cached_property
    def index_of(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for k, eid in enumerate(self.edge_ids):
            out.setdefault(eid, k)
        return out

    @cached_property
    def face_edges(self) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
        """Per face, ``(edge_indices, signs)`` arrays.  Valid complexes only."""
        out = []
        for f in self.faces:
            idx = np.array([self.index_of[e] for e, _ in f], dtype=np.int64)
            sg = np.array([s for _, s in f], dtype=np.int64)
            out.append((idx, sg))
        return tuple(out)

    @cached_property
    def left_right(self) -> tuple[np.ndarray, np.ndarray]:
        """Face index to the left and to the right of every edge."""
        left = np.full(self.num_edges, -1, dtype=np.int64)
        right = np.full(self.num_edges, -1, dtype=np.int64)
        for fi, (idx, sg) in enumerate(self.face_edges):
            left[idx[sg > 0]] = fi
            right[idx[sg < 0]] = fi
        return left, right

    def is_dual(self) -> bool:
        return False

    @cached_property
    def dual(self) -> "DualComplex":
        return build_dual(self)

    # -- validation -----------------------------------------------------------

    @cached_property
    def report(self) -> ValidationReport:
        return validate_complex(self)

    def require_valid(self) -> "ToroidalComplex":
        if not self.report.valid:
            raise InvalidComplexError(self.report)
        return self

    # -- spanning tree machinery ----------------------------------------------

    @cached_property
    def spanning_tree(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """BFS tree from vertex 0: ``(order, parent_edge, tree_mask)``.

        ``order`` lists reachable vertices root first; ``parent_edge[v]`` is
        the edge by which ``v`` was reached (-1 for the root and for
        unreachable vertices).
        """
        V = self.num_vertices
        adj: list[list[int]] = [[] for _ in range(V)]
        for k, (t, h) in enumerate(zip(self.tails, self.heads)):
            if t != h:
                adj[t].append(k)
                adj[h].append(k)
        parent = np.full(V, -1, dtype=np.int64)
        seen = np.zeros(V, dtype=bool)
        order = []
        if V:
            seen[0] = True
            queue = deque([0])
            while queue:
                v = queue.popleft()
                order.append(v)
                for k in adj[v]:
                    w = self.heads[k] if self.tails[k] == v else self.tails[k]
                    if not seen[w]:
                        seen[w] = True
                        parent[w] = k
                        queue.append(w)
        mask = np.zeros(self.num_edges, dtype=bool)
        mask[parent[parent >= 0]] = True
        return np.array(order, dtype=np.int64), parent, mask

    def tree_potential(self, values: np.ndarray) -> np.ndarray:
        """Integrate edge values along the spanning tree, root fixed at zero.

        Works for real or complex arrays and for trailing dimensions.
        """
        values = np.asarray(values)
        order, parent, _ = self.spanning_tree
        pot = np.zeros((self.num_vertices,) + values.shape[1:], dtype=values.dtype)
        tails, heads = self.tails, self.heads
        for v in order[1:]:
            k = parent[v]
            if heads[k] == v:
                pot[v] = pot[tails[k]] + values[k]
            else:
                pot[v] = pot[heads[k]] - values[k]
        return pot

    def tree_defects(self, values: np.ndarray) -> np.ndarray:
        """``values`` minus the coboundary of its tree potential (zero on tree edges)."""
        values = np.asarray(values)
        pot = self.tree_potential(values)
        return values - (pot[self.heads] - pot[self.tails])

    @cached_property
    def label_defects(self) -> np.ndarray:
        return self.tree_defects(self.labels)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def _as_int(x, what):
    if isinstance(x, bool) or not isinstance(x, int):
        if isinstance(x, float) and x.is_integer():
            return int(x)
        raise ParseError(f"{what} must be an integer, got {x!r}")
    return x


def complex_from_dict(data: dict) -> tuple[ToroidalComplex, EdgeWeights]:
    """Decode the JSON graph format.  Structural problems are left for validation."""
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object")
    try:
        nv = _as_int(data["num_vertices"], "num_vertices")
        raw_edges = data["edges"]
        raw_faces = data["faces"]
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}") from None
    if nv < 0:
        raise ParseError("num_vertices must be non-negative")
    if not isinstance(raw_edges, list) or not isinstance(raw_faces, list):
        raise ParseError("'edges' and 'faces' must be lists")
    ids, tails, heads, labels, weights = [], [], [], [], []
    for n, e in enumerate(raw_edges):
        if not isinstance(e, dict):
            raise ParseError(f"edge entry {n} must be an object")
        try:
            ids.append(_as_int(e["id"], "edge id"))
            tails.append(_as_int(e["tail"], "tail"))
            heads.append(_as_int(e["head"], "head"))
            labels.append((_as_int(e.get("dx", 0), "dx"), _as_int(e.get("dy", 0), "dy")))
            w = e.get("weight", 1.0)
        except KeyError as exc:
            raise ParseError(f"edge entry {n} is missing {exc.args[0]!r}") from None
        if isinstance(w, bool) or not isinstance(w, (int, float)):
            raise ParseError(f"edge entry {n}: weight must be a number")
        weights.append(float(w))
    faces = []
    for n, f in enumerate(raw_faces):
        if not isinstance(f, list):
            raise ParseError(f"face {n} must be a list of signed edge references")
        entries = []
        for s in f:
            s = _as_int(s, f"face {n} entry")
            if s == 0:
                raise ParseError(f"face {n}: 0 is not a valid signed reference (use ±(id+1))")
            entries.append((abs(s) - 1, 1 if s > 0 else -1))
        faces.append(tuple(entries))
    cx = ToroidalComplex(nv, tuple(ids), tails, heads, np.array(labels, dtype=np.int64).reshape(-1, 2), tuple(faces))
    return cx, EdgeWeights(weights)


def complex_to_dict(cx: ToroidalComplex, weights: EdgeWeights | None = None) -> dict:
    w = weights.values if weights is not None else np.ones(cx.num_edges)
    return {
        "num_vertices": int(cx.num_vertices),
        "edges": [
            {
                "id": int(eid),
                "tail": int(cx.tails[k]),
                "head": int(cx.heads[k]),
                "dx": int(cx.labels[k, 0]),
                "dy": int(cx.labels[k, 1]),
                "weight": float(w[k]),
            }
            for k, eid in enumerate(cx.edge_ids)
        ],
        "faces": [[s * (e + 1) for e, s in f] for f in cx.faces],
    }


def load_json(path: str | Path) -> tuple[ToroidalComplex, EdgeWeights]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {path}: {exc}") from None
    return complex_from_dict(data)


def dump_json(cx: ToroidalComplex, weights: EdgeWeights | None, path: str | Path) -> None:
    Path(path).write_text(json.dumps(complex_to_dict(cx, weights), indent=1) + "\n")


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def _face_degree_twice(cx: ToroidalComplex) -> int:
    """Twice the total signed area of the faces when every vertex sits at a
    lattice point of the square unit torus and edges follow their labels.

    The result is twice the degree of the marking map: ``2`` when face
    orientation and marking agree and the labels generate all of Z^2.
    """
    total = 0
    for idx, sg in cx.face_edges:
        steps = cx.labels[idx] * sg[:, None]
        pts = np.cumsum(steps, axis=0)
        prev = np.roll(pts, 1, axis=0)
        total += int(np.sum(prev[:, 0] * pts[:, 1] - prev[:, 1] * pts[:, 0]))
    return total


def validate_complex(cx: ToroidalComplex) -> ValidationReport:
    """Check every structural invariant and list the violations found."""
    rep = ValidationReport()
    V, E = cx.num_vertices, cx.num_edges

    seen: dict[int, int] = {}
    for k, eid in enumerate(cx.edge_ids):
        if eid < 0:
            rep.add("edge-id", "edge ids must be non-negative", edge=eid)
        if eid in seen:
            rep.add("duplicate-edge-id", f"edge id {eid} used more than once", edge=eid)
        seen[eid] = k
    for k, eid in enumerate(cx.edge_ids):
        for end, v in (("tail", cx.tails[k]), ("head", cx.heads[k])):
            if not 0 <= v < V:
                rep.add("vertex-range", f"{end} {int(v)} outside 0..{V - 1}", edge=eid)
    for fi, f in enumerate(cx.faces):
        if not f:
            rep.add("empty-face", "face has no edges", face=fi)
        for eid, _ in f:
            if eid not in seen:
                rep.add("unknown-edge", f"face references unknown edge id {eid}", face=fi, edge=eid)
    if not rep.valid:
        return rep

    # incidence: each edge once per orientation
    pos = np.zeros(E, dtype=np.int64)
    neg = np.zeros(E, dtype=np.int64)
    for idx, sg in cx.face_edges:
        np.add.at(pos, idx[sg > 0], 1)
        np.add.at(neg, idx[sg < 0], 1)
    for k in np.flatnonzero((pos != 1) | (neg != 1)):
        rep.add(
            "edge-incidence",
            f"edge appears {pos[k]}x as +e and {neg[k]}x as -e (need exactly once each)",
            edge=cx.edge_ids[k],
        )

    for fi, (idx, sg) in enumerate(cx.face_edges):
        start = np.where(sg > 0, cx.tails[idx], cx.heads[idx])
        end = np.where(sg > 0, cx.heads[idx], cx.tails[idx])
        if np.any(end != np.roll(start, -1)):
            rep.add("face-walk", "boundary is not a closed walk", face=fi)
        lsum = (cx.labels[idx] * sg[:, None]).sum(axis=0)
        if np.any(lsum != 0):
            rep.add("face-label-sum", f"face label sum ≠ 0 (got {tuple(int(x) for x in lsum)})", face=fi)

    order, _, _ = cx.spanning_tree
    if len(order) != V:
        missing = sorted(set(range(V)) - set(order.tolist()))
        rep.add("disconnected", f"{len(missing)} vertices unreachable from vertex 0", vertex=missing[0])

    chi = cx.euler_characteristic
    rep.euler_characteristic = chi
    if chi != 0:
        rep.add("euler", f"V - E + F = {chi}, a torus needs 0")

    if rep.valid:
        twice = _face_degree_twice(cx)
        rep.marking_degree = twice // 2 if twice % 2 == 0 else None
        if twice != 2:
            lam = cx.label_defects
            minors = [
                int(lam[i, 0] * lam[j, 1] - lam[i, 1] * lam[j, 0])
                for i in range(E)
                for j in range(i + 1, E)
            ]
            index = 0
            for m in minors:
                index = gcd(index, abs(m))
            if index != 1:
                msg = f"labels generate a sublattice of index {index} instead of Z^2"
            else:
                msg = "face orientation is opposite to the marking (faces must be counterclockwise)"
            rep.add("marking", f"marking degree {twice / 2:g}: {msg}")
    return rep


# ---------------------------------------------------------------------------
# duality
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DualComplex(ToroidalComplex):
    """Dual decomposition: vertices are primal faces, faces are primal vertices.

    Edge ids are shared with the primal; dual edge ``*e`` runs from
    ``right(e)`` to ``left(e)``.
    """

    primal: ToroidalComplex | None = None

    def is_dual(self) -> bool:
        return True


def _corner_offsets(cx: ToroidalComplex) -> list[np.ndarray]:
    """Per face, label offset of the start of every traversal relative to the
    face's first corner (the face's reference lift)."""
    out = []
    for idx, sg in cx.face_edges:
        steps = cx.labels[idx] * sg[:, None]
        out.append(np.vstack([np.zeros((1, 2), dtype=np.int64), np.cumsum(steps, axis=0)[:-1]]))
    return out


def vertex_rotations(cx: ToroidalComplex) -> list[list[tuple[int, int]]]:
    """Counterclockwise cyclic order of outgoing half-edges ``(edge, sign)`` at each vertex.

    ``(e, +1)`` leaves ``tail(e)``; ``(e, -1)`` leaves ``head(e)``.
    """
    nxt: dict[tuple[int, int], tuple[int, int]] = {}
    for idx, sg in cx.face_edges:
        n = len(idx)
        for k in range(n):
            cur = (int(idx[k]), int(sg[k]))
            following = (int(idx[(k + 1) % n]), int(sg[(k + 1) % n]))
            nxt[following] = (cur[0], -cur[1])
    rotations: list[list[tuple[int, int]]] = [[] for _ in range(cx.num_vertices)]
    done = set()
    for e in range(cx.num_edges):
        for s in (1, -1):
            h = (e, s)
            if h in done:
                continue
            v = int(cx.tails[e] if s > 0 else cx.heads[e])
            orbit = []
            while h not in done:
                done.add(h)
                orbit.append(h)
                h = nxt[h]
            if rotations[v]:
                # more than one orbit at a vertex means the surface is not a manifold there
                raise InvalidComplexError(
                    ValidationReport([Issue("vertex-link", "vertex neighbourhood is not a disc", vertex=v)])
                )
            rotations[v] = orbit
    return rotations


def build_dual(cx: ToroidalComplex) -> DualComplex:
    """Construct the dual complex with inherited translation labels."""
    cx.require_valid()
    left, right = cx.left_right
    offsets = _corner_offsets(cx)
    tail_off_left = np.zeros((cx.num_edges, 2), dtype=np.int64)
    tail_off_right = np.zeros((cx.num_edges, 2), dtype=np.int64)
    for (idx, sg), off in zip(cx.face_edges, offsets):
        p = sg > 0
        tail_off_left[idx[p]] = off[p]
        # traversal of -e starts at head(e); tail sits one label further back
        tail_off_right[idx[~p]] = off[~p] - cx.labels[idx[~p]]
    dual_labels = tail_off_right - tail_off_left
    rot = vertex_rotations(cx)
    faces = tuple(tuple((cx.edge_ids[e], s) for e, s in orbit) for orbit in rot)
    dual = DualComplex(
        num_vertices=cx.num_faces,
        edge_ids=cx.edge_ids,
        tails=right,
        heads=left,
        labels=dual_labels,
        faces=faces,
        primal=cx,
    )
    if isinstance(cx, DualComplex) and cx.primal is not None:
        # Double dual: use the original vertex lifts so the result is the
        # primal with reversed edges.  Lift choices only change labels by an
        # integer coboundary.
        target = -cx.primal.labels
        if np.any(dual.tree_defects(dual_labels - target) != 0):
            raise AssertionError("double dual labels are not cohomologous to the primal labels")
        dual = DualComplex(dual.num_vertices, dual.edge_ids, right, left, target, faces, primal=cx)
    return dual


# ---------------------------------------------------------------------------
# standard complexes
# ---------------------------------------------------------------------------


def one_vertex_triangulation() -> ToroidalComplex:
    """Single vertex, three loops labelled (1,0), (1,1), (0,1), two triangles."""
    return ToroidalComplex.from_arrays(
        1,
        [0, 0, 0],
        [0, 0, 0],
        [(1, 0), (1, 1), (0, 1)],
        [[1, 3, -2], [2, -1, -3]],
    )


def square_grid(nx: int, ny: int | None = None) -> ToroidalComplex:
    """``nx`` by ``ny`` quadrilateral grid on the torus.

    Vertex ``(i, j)`` has index ``i + nx*j``.  Edge ``2*v`` is horizontal out
    of ``v`` and edge ``2*v + 1`` is vertical out of ``v``.
    """
    ny = nx if ny is None else ny
    if nx < 1 or ny < 1:
        raise ValueError("grid dimensions must be positive")
    vid = lambda i, j: (i % nx) + nx * (j % ny)  # noqa: E731
    tails, heads, labels, faces = [], [], [], []
    for j in range(ny):
        for i in range(nx):
            v = vid(i, j)
            tails += [v, v]
            heads += [vid(i + 1, j), vid(i, j + 1)]
            labels += [(int(i == nx - 1), 0), (0, int(j == ny - 1))]
    for j in range(ny):
        for i in range(nx):
            h = 2 * vid(i, j)
            v_right = 2 * vid(i + 1, j) + 1
            h_top = 2 * vid(i, j + 1)
            v = 2 * vid(i, j) + 1
            faces.append([h + 1, v_right + 1, -(h_top + 1), -(v + 1)])
    return ToroidalComplex.from_arrays(nx * ny, tails, heads, labels, faces)


def triangulated_grid(nx: int, ny: int | None = None) -> ToroidalComplex:
    """Grid torus with each square split by its lower-left to upper-right diagonal.

    Edges ``3*v``, ``3*v+1``, ``3*v+2`` are the horizontal, vertical and
    diagonal edges leaving vertex ``v``.  ``triangulated_grid(1)`` is the
    one-vertex triangulation up to edge numbering.
    """
    ny = nx if ny is None else ny
    if nx < 1 or ny < 1:
        raise ValueError("grid dimensions must be positive")
    vid = lambda i, j: (i % nx) + nx * (j % ny)  # noqa: E731
    tails, heads, labels, faces = [], [], [], []
    for j in range(ny):
        for i in range(nx):
            v = vid(i, j)
            wx, wy = int(i == nx - 1), int(j == ny - 1)
            tails += [v, v, v]
            heads += [vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1)]
            labels += [(wx, 0), (0, wy), (wx, wy)]
    for j in range(ny):
        for i in range(nx):
            v = vid(i, j)
            h, vert, diag = 3 * v, 3 * v + 1, 3 * v + 2
            v_right = 3 * vid(i + 1, j) + 1
            h_top = 3 * vid(i, j + 1)
            faces.append([h + 1, v_right + 1, -(diag + 1)])
            faces.append([diag + 1, -(h_top + 1), -(vert + 1)])
    return ToroidalComplex.from_arrays(nx * ny, tails, heads, labels, faces)


def flip_edge(cx: ToroidalComplex, k: int) -> ToroidalComplex | None:
    """Flip edge index ``k`` shared by two distinct triangles; ``None`` if not flippable."""
    left, right = cx.left_right
    fl, fr = int(left[k]), int(right[k])
    if fl == fr or len(cx.faces[fl]) != 3 or len(cx.faces[fr]) != 3:
        return None

    def rotated(fi, sign):
        idx, sg = cx.face_edges[fi]
        r = next(n for n in range(3) if idx[n] == k and sg[n] == sign)
        return [(int(idx[(r + m) % 3]), int(sg[(r + m) % 3])) for m in range(3)]

    _, a, b = rotated(fl, 1)  # +e: u->v, a: v->w, b: w->u
    _, c, d = rotated(fr, -1)  # -e: v->u, c: u->z, d: z->v

    def start(t):
        return int(cx.tails[t[0]] if t[1] > 0 else cx.heads[t[0]])

    z, w = start(d), start(b)
    lab = cx.labels[d[0]] * d[1] + cx.labels[a[0]] * a[1]
    tails = cx.tails.copy()
    heads = cx.heads.copy()
    labels = cx.labels.copy()
    tails[k], heads[k], labels[k] = z, w, lab
    faces = list(cx.faces)
    eid = cx.edge_ids
    faces[fl] = ((eid[k], 1), (eid[b[0]], b[1]), (eid[c[0]], c[1]))
    faces[fr] = ((eid[k], -1), (eid[d[0]], d[1]), (eid[a[0]], a[1]))
    return ToroidalComplex(cx.num_vertices, cx.edge_ids, tails, heads, labels, tuple(faces))


def lifted_edge_keys(cx: ToroidalComplex) -> list[tuple]:
    """Orientation-free key of every edge in the universal cover (for multi-edge tests)."""
    keys = []
    for t, h, (dx, dy) in zip(cx.tails.tolist(), cx.heads.tolist(), cx.labels.tolist()):
        a = (t, h, dx, dy)
        b = (h, t, -dx, -dy)
        keys.append(min(a, b))
    return keys


def vertex_degrees(cx: ToroidalComplex) -> np.ndarray:
    deg = np.zeros(cx.num_vertices, dtype=np.int64)
    np.add.at(deg, cx.tails, 1)
    np.add.at(deg, cx.heads, 1)
    return deg


def signed_faces(cx: ToroidalComplex) -> list[list[int]]:
    """Faces in the ``±(id+1)`` encoding."""
    return [[s * (e + 1) for e, s in f] for f in cx.faces]


def relabel(cx: ToroidalComplex, labels: Sequence[Iterable[int]]) -> ToroidalComplex:
    """Copy of ``cx`` with new edge labels (no validation)."""
    return ToroidalComplex(cx.num_vertices, cx.edge_ids, cx.tails, cx.heads, np.array(labels), cx.faces)
