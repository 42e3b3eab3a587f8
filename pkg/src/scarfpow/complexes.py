"""Taylor, Scarf and square-free-shift complexes with lcm labels.

Vertices of the degree-r Taylor complex on q generators are the q-part
compositions of r, listed lexicographically largest first; faces are
canonical tuples of such compositions in that order.  A face is Scarf
when no other face of the full simplex shares its label, which reduces
(via the divisibility test) to: for every nonempty subset of the face,
the generators dividing the subset's label are exactly the subset.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from itertools import combinations
from typing import NamedTuple

import numpy as np

from . import homology
from .compositions import enumerate_compositions, validate_composition
from .errors import BudgetError
from .labels import canonical_face, vertex_label_matrix

__all__ = [
    "DEFAULT_FACE_BUDGET",
    "GeneratorTable",
    "generator_table",
    "LabeledComplex",
    "taylor_vertices",
    "taylor_complex",
    "is_scarf_edge",
    "scarf_edge_matrix",
    "is_scarf_face",
    "scarf_complex",
    "scarf_faces_from_matrix",
    "u_facet_vectors",
    "u_facets",
    "u_complex",
    "u_facet_label",
    "materialize",
    "f_vector",
    "supports_resolution",
    "is_minimal_support",
]

DEFAULT_FACE_BUDGET = 1 << 22


class GeneratorTable(NamedTuple):
    """Generators of one Taylor complex plus their exponent matrix."""

    q: int
    r: int
    gens: tuple[tuple[int, ...], ...]  # descending lex; index 0 is the largest
    index: dict[tuple[int, ...], int]
    matrix: np.ndarray  # (G, 2^q-1) exponent vectors, int16


@lru_cache(maxsize=64)
def generator_table(q: int, r: int) -> GeneratorTable:
    gens = tuple(enumerate_compositions(q, r))
    index = {a: i for i, a in enumerate(gens)}
    matrix = vertex_label_matrix(gens, q, dtype=np.int16)
    return GeneratorTable(q, r, gens, index, matrix)


@dataclass(frozen=True)
class LabeledComplex:
    """A subcomplex of a Taylor complex, given by facets and optional face list.

    ``facets`` is an antichain of canonical faces.  ``faces`` is the full
    face list (closed under nonempty subsets) once materialized, sorted by
    (size, vertex tuple) for reproducibility.
    """

    q: int
    r: int
    facets: tuple[tuple[tuple[int, ...], ...], ...]
    faces: tuple[tuple[tuple[int, ...], ...], ...] | None = None

    @property
    def is_materialized(self) -> bool:
        return self.faces is not None

    def vertices(self) -> tuple[tuple[int, ...], ...]:
        seen: set[tuple[int, ...]] = set()
        for facet in self.facets:
            seen.update(facet)
        return tuple(sorted(seen, reverse=True))


def taylor_vertices(q: int, r: int) -> list[tuple[int, ...]]:
    """Vertices of the Taylor complex: all q-part compositions of r."""
    if q < 1 or r < 1:
        raise ValueError(f"need q, r >= 1, got q={q}, r={r}")
    return enumerate_compositions(q, r)


def taylor_complex(q: int, r: int) -> LabeledComplex:
    """The full simplex on all generators (one facet)."""
    return LabeledComplex(q, r, (canonical_face(taylor_vertices(q, r)),))


def _face_indices(face, table: GeneratorTable) -> tuple[int, ...]:
    idx = []
    for v in face:
        v = validate_composition(v, q=table.q, r=table.r)
        idx.append(table.index[v])
    return tuple(sorted(idx))


def _divisor_indices(idx, table: GeneratorTable) -> np.ndarray:
    """Indices of all generators dividing the label of the face ``idx``."""
    label = table.matrix[list(idx)].max(axis=0)
    return np.flatnonzero((table.matrix <= label).all(axis=1))


def is_scarf_edge(a, b) -> bool:
    """True iff no third generator divides the label of the edge {a, b}."""
    a = validate_composition(a)
    b = validate_composition(b, q=len(a), r=sum(a))
    if a == b:
        raise ValueError("an edge needs two distinct vertices")
    table = generator_table(len(a), sum(a))
    idx = (table.index[a], table.index[b])
    return len(_divisor_indices(idx, table)) == 2


@lru_cache(maxsize=16)
def scarf_edge_matrix(q: int, r: int) -> np.ndarray:
    """Boolean (G, G) matrix of Scarf edges, batched divisor counting."""
    table = generator_table(q, r)
    V = table.matrix
    n = len(table.gens)
    out = np.zeros((n, n), dtype=bool)
    ii, jj = np.triu_indices(n, k=1)
    chunk = max(1, (1 << 23) // max(1, n * V.shape[1]))
    for lo in range(0, len(ii), chunk):
        i = ii[lo : lo + chunk]
        j = jj[lo : lo + chunk]
        lab = np.maximum(V[i], V[j])
        counts = (V[None, :, :] <= lab[:, None, :]).all(axis=2).sum(axis=1)
        ok = counts == 2
        out[i[ok], j[ok]] = True
        out[j[ok], i[ok]] = True
    return out


def is_scarf_face(face) -> bool:
    """Subset-closure Scarf test.

    For every nonempty subset of the face, the set of generators dividing
    that subset's label must be exactly the subset.  The divisor set always
    contains the subset, so a count comparison is an exact test.  Face sizes
    at desk scale are tiny; all 2^k - 1 subsets are checked naively.
    """
    face = canonical_face(face)
    table = generator_table(len(face[0]), sum(face[0]))
    idx = _face_indices(face, table)
    for size in range(1, len(idx) + 1):
        for sub in combinations(idx, size):
            if len(_divisor_indices(sub, table)) != size:
                return False
    return True


def scarf_faces_from_matrix(
    matrix: np.ndarray,
    max_dim: int | None = None,
    face_budget: int = DEFAULT_FACE_BUDGET,
) -> list[tuple[int, ...]]:
    """All Scarf faces (as index tuples) for vertices with the given label rows.

    Level-by-level expansion: a candidate of size k+1 is formed from an
    accepted face of size k by appending a larger index, kept only if all
    its co-dimension-1 subsets were accepted and the vertices dividing its
    label are exactly its own.  Downward closure of Scarf complexes makes
    this exhaustive.
    """
    n = matrix.shape[0]
    accepted: list[tuple[int, ...]] = []
    level: list[tuple[int, ...]] = []
    for i in range(n):
        if len(np.flatnonzero((matrix <= matrix[i]).all(axis=1))) == 1:
            level.append((i,))
    accepted.extend(level)
    size = 1
    while level and (max_dim is None or size <= max_dim):
        level_set = set(level)
        nxt: list[tuple[int, ...]] = []
        for face in level:
            base = matrix[list(face)].max(axis=0)
            for v in range(face[-1] + 1, n):
                if size >= 2 and any(
                    face[:k] + face[k + 1 :] + (v,) not in level_set
                    for k in range(size)
                ):
                    continue
                label = np.maximum(base, matrix[v])
                divisors = np.flatnonzero((matrix <= label).all(axis=1))
                if len(divisors) == size + 1:
                    nxt.append(face + (v,))
        accepted.extend(nxt)
        if len(accepted) > face_budget:
            raise BudgetError(
                f"scarf face count exceeded budget {face_budget}; "
                "pass a larger face_budget to override"
            )
        level = nxt
        size += 1
    return accepted


def scarf_complex(
    q: int,
    r: int,
    max_dim: int | None = None,
    face_budget: int = DEFAULT_FACE_BUDGET,
) -> LabeledComplex:
    """The Scarf complex: all Taylor faces whose label no other face shares."""
    if q < 1 or r < 1:
        raise ValueError(f"need q, r >= 1, got q={q}, r={r}")
    table = generator_table(q, r)
    idx_faces = scarf_faces_from_matrix(table.matrix, max_dim=max_dim, face_budget=face_budget)
    face_set = set(idx_faces)
    n = len(table.gens)

    def is_maximal(f: tuple[int, ...]) -> bool:
        for v in range(n):
            if v in f:
                continue
            ext = tuple(sorted(f + (v,)))
            if ext in face_set:
                return False
        return True

    faces = sorted(
        (tuple(table.gens[i] for i in f) for f in idx_faces),
        key=lambda fc: (len(fc), fc),
    )
    facets = tuple(
        tuple(table.gens[i] for i in f) for f in idx_faces if is_maximal(f)
    )
    return LabeledComplex(q, r, facets, tuple(faces))


def u_facet_vectors(q: int, r: int) -> list[tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]]:
    """Pairs (shift vector a, facet) of the square-free-shift complex.

    For q >= 2 there is one facet per a with r-q < |a| < r, consisting of
    all compositions c with a_i <= c_i <= a_i + 1.  For q = 1 the single
    facet is the lone vertex, shifted by a = (r-1,).
    """
    if q < 1 or r < 1:
        raise ValueError(f"need q, r >= 1, got q={q}, r={r}")
    if q == 1:
        return [((r - 1,), ((r,),))]
    out = []
    for s in range(max(0, r - q + 1), r):
        for a in enumerate_compositions(q, s):
            verts = [
                tuple(ai + (1 if i in picks else 0) for i, ai in enumerate(a))
                for picks in map(set, combinations(range(q), r - s))
            ]
            out.append((a, canonical_face(verts)))
    return out


def u_facets(q: int, r: int) -> list[tuple[tuple[int, ...], ...]]:
    return [face for _, face in u_facet_vectors(q, r)]


def u_complex(q: int, r: int) -> LabeledComplex:
    return LabeledComplex(q, r, tuple(u_facets(q, r)))


def u_facet_label(a, q: int, r: int) -> np.ndarray:
    """Closed-form label of the facet shifted by a.

    The exponent at subset A is sum(a[i] for i in A) + min(|A|, r - |a|);
    must agree with the joined label of the materialized facet.
    """
    a = validate_composition(a, q=q)
    s = sum(a)
    if not (r - q < s < r):
        raise ValueError(f"|a|={s} outside the open range ({r - q}, {r})")
    base = vertex_label_matrix([a], q)[0]
    sizes = np.array([m.bit_count() for m in range(1, 1 << q)], dtype=np.int64)
    return base + np.minimum(sizes, r - s)


def materialize(
    complex_: LabeledComplex,
    max_dim: int | None = None,
    face_budget: int = DEFAULT_FACE_BUDGET,
) -> LabeledComplex:
    """Expand facets to the full face list (deduplicated, sorted)."""
    seen: set[tuple[tuple[int, ...], ...]] = set()
    for facet in complex_.facets:
        k = len(facet)
        top = k if max_dim is None else min(k, max_dim + 1)
        for size in range(1, top + 1):
            for sub in combinations(facet, size):
                seen.add(sub)
            if len(seen) > face_budget:
                raise BudgetError(
                    f"materialized face count exceeded budget {face_budget}; "
                    "pass a larger face_budget to override"
                )
    faces = sorted(seen, key=lambda fc: (len(fc), fc))
    return replace(complex_, faces=tuple(faces))


def f_vector(complex_: LabeledComplex) -> tuple[int, ...]:
    """Face counts by dimension (f_0 = vertices); requires materialization."""
    if complex_.faces is None:
        raise ValueError("complex is not materialized")
    if not complex_.faces:
        return ()
    counts = [0] * max(len(f) for f in complex_.faces)
    for f in complex_.faces:
        counts[len(f) - 1] += 1
    return tuple(counts)


def _face_label_matrix(complex_: LabeledComplex) -> np.ndarray:
    table = generator_table(complex_.q, complex_.r)
    rows = [
        table.matrix[[table.index[v] for v in face]].max(axis=0)
        for face in complex_.faces
    ]
    return np.array(rows, dtype=np.int16)


def supports_resolution(complex_: LabeledComplex, field: str = "gf2") -> bool:
    """Whether the labeled complex supports a free resolution of the full ideal.

    The complex must contain every generator as a vertex, and for every
    monomial m in the lcm lattice the subcomplex of faces whose label
    divides m must be empty or have vanishing reduced homology over the
    field.  Checking lattice values suffices: the divisor subcomplex only
    changes when m crosses a join of vertex labels.
    """
    if complex_.faces is None:
        raise ValueError("complex is not materialized")
    table = generator_table(complex_.q, complex_.r)
    if set(complex_.vertices()) != set(table.gens):
        return False
    lattice = homology.join_closure(table.matrix)
    labels = _face_label_matrix(complex_)
    face_idx = [_face_indices(face, table) for face in complex_.faces]
    for m in lattice:
        keep = np.flatnonzero((labels <= m).all(axis=1))
        sub = [face_idx[i] for i in keep]
        if not homology.is_acyclic_or_empty(sub, field=field):
            return False
    return True


def is_minimal_support(complex_: LabeledComplex) -> bool:
    """True iff no face shares its label with a co-dimension-1 subface."""
    if complex_.faces is None:
        raise ValueError("complex is not materialized")
    labels = _face_label_matrix(complex_)
    key = {face: i for i, face in enumerate(complex_.faces)}
    for face, i in key.items():
        if len(face) < 2:
            continue
        for k in range(len(face)):
            sub = face[:k] + face[k + 1 :]
            j = key.get(sub)
            if j is not None and np.array_equal(labels[i], labels[j]):
                return False
    return True
