"""Exponent arithmetic for generator products and their lcm labels.

The generator indexed by a composition a has, at the variable indexed by
subset mask A, the exponent sum(a[i] for i in A).  The label (lcm) of a
set of generators is the componentwise maximum of their exponent vectors,
and divisibility is the componentwise comparison.  Labels are therefore
dense integer arrays of length 2^q - 1 (one slot per nonempty subset, in
ascending binary order); monomials are never stored symbolically.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .compositions import subset_members, validate_composition

__all__ = [
    "subset_weight_matrix",
    "epsilon_exponent",
    "vertex_label_matrix",
    "face_label",
    "divides_label",
    "e_gcd",
    "scale_face",
    "canonical_face",
    "label_string",
    "subset_join_table",
    "row_ids",
]


@lru_cache(maxsize=None)
def subset_weight_matrix(q: int) -> np.ndarray:
    """(q, 2^q-1) 0/1 matrix whose column m-1 is the indicator of mask m.

    Multiplying a composition (as a row vector) by this matrix yields its
    full exponent vector over the subset-indexed variables.
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    masks = np.arange(1, 1 << q, dtype=np.int64)
    rows = [(masks >> i) & 1 for i in range(q)]
    return np.array(rows, dtype=np.int64)


def epsilon_exponent(a, mask: int) -> int:
    """Exponent of the variable indexed by ``mask`` in the generator of ``a``."""
    a = validate_composition(a)
    members = subset_members(mask)
    if members[-1] > len(a):
        raise ValueError(f"mask {mask} exceeds ambient size q={len(a)}")
    return sum(a[i - 1] for i in members)


def vertex_label_matrix(vertices, q: int, dtype=np.int64) -> np.ndarray:
    """Stack of exponent vectors, one row per composition."""
    arr = np.asarray(list(vertices), dtype=np.int64).reshape(-1, q)
    out = arr @ subset_weight_matrix(q)
    return out.astype(dtype, copy=False)


def face_label(vertices, q: int | None = None) -> np.ndarray:
    """Label of a face: componentwise max of its vertices' exponent vectors."""
    vs = [validate_composition(v) for v in vertices]
    if not vs:
        raise ValueError("face label of an empty vertex set is undefined")
    if q is None:
        q = len(vs[0])
    for v in vs:
        validate_composition(v, q=q, r=sum(vs[0]))
    return vertex_label_matrix(vs, q).max(axis=0)


def divides_label(b, label: np.ndarray, q: int | None = None) -> bool:
    """True iff the generator of ``b`` divides the monomial with this label.

    Componentwise test sum(b[i] for i in A) <= label[A] over every nonempty
    subset A; loops all subsets in the fixed ascending order.
    """
    b = validate_composition(b)
    if q is None:
        q = len(b)
    vec = vertex_label_matrix([b], q)[0]
    return bool(np.all(vec <= np.asarray(label)))


def e_gcd(vertices) -> tuple[int, ...]:
    """Componentwise minimum of the compositions (gcd in the generator alphabet)."""
    vs = [validate_composition(v) for v in vertices]
    if not vs:
        raise ValueError("e_gcd of an empty set is undefined")
    return tuple(min(v[i] for v in vs) for i in range(len(vs[0])))


def canonical_face(vertices) -> tuple[tuple[int, ...], ...]:
    """Duplicate-free face with vertices sorted lexicographically largest first."""
    vs = {validate_composition(v) for v in vertices}
    if not vs:
        raise ValueError("a face must have at least one vertex")
    first = next(iter(vs))
    for v in vs:
        validate_composition(v, q=len(first), r=sum(first))
    return tuple(sorted(vs, reverse=True))


def scale_face(d, vertices) -> tuple[tuple[int, ...], ...]:
    """Translate every vertex by the non-negative vector d."""
    face = canonical_face(vertices)
    d = tuple(d)
    if len(d) != len(face[0]) or any(v < 0 for v in d):
        raise ValueError(f"translation vector must be non-negative of length {len(face[0])}")
    return canonical_face(tuple(x + y for x, y in zip(v, d)) for v in face)


def label_string(label, q: int) -> str:
    """Canonical text form, factors in ascending subset order, e.g. x_1^2*x_12^3.

    Unit exponents are left bare and zero exponents are dropped; the empty
    product renders as "1".  Subset members are concatenated digits, so the
    rendering is unambiguous for q <= 9.
    """
    label = np.asarray(label)
    parts = []
    for pos, e in enumerate(label):
        e = int(e)
        if e == 0:
            continue
        name = "x_" + "".join(str(i) for i in subset_members(pos + 1))
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts) if parts else "1"


def subset_join_table(rows: np.ndarray) -> np.ndarray:
    """Componentwise max of every subset of rows.

    Returns a (2^n, width) array whose entry at index ``mask`` is the join of
    the rows selected by ``mask`` (index 0 is the all-zero join).  Filled by
    dynamic programming on the lowest set bit, so the cost is one vectorized
    pass per row.
    """
    n, width = rows.shape
    if n > 24:
        raise ValueError(f"refusing subset join table for {n} rows (2^{n} entries)")
    table = np.zeros((1 << n, width), dtype=rows.dtype)
    for b in reversed(range(n)):
        idx = ((np.arange(1 << (n - b - 1), dtype=np.int64) << 1) | 1) << b
        table[idx] = np.maximum(table[idx ^ (1 << b)], rows[b])
    return table


def row_ids(mat: np.ndarray) -> tuple[np.ndarray, list[bytes]]:
    """Group equal rows: (id per row, distinct row payloads as bytes)."""
    a = np.ascontiguousarray(mat)
    void = a.view(np.dtype((np.void, a.dtype.itemsize * a.shape[1]))).ravel()
    uniq, inverse = np.unique(void, return_inverse=True)
    return inverse.astype(np.int64).ravel(), [u.tobytes() for u in uniq]
