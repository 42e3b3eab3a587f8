"""Exact simplicial homology and brute-force betti oracles.

Two independent homological routes are provided and cross-checked in the
test suite:

* ``betti_multigraded_oracle`` computes one multigraded betti number as
  the reduced homology (one degree down) of the subcomplex of full-simplex
  faces whose label strictly divides the target monomial.

* ``betti_total_oracle`` computes the whole table at once by grouping the
  faces of the full simplex into label classes and taking homology of the
  label-preserving part of the simplicial boundary (the minimalization of
  the Taylor resolution); the classes are exactly the lcm lattice.

GF(2) elimination uses int bitset rows; rational elimination uses exact
fractions.  Any disagreement between the two fields is a torsion signal
and is surfaced, never silently resolved.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import BudgetError
from .labels import row_ids, subset_join_table

__all__ = [
    "FIELDS",
    "gf2_rank",
    "rational_rank",
    "reduced_homology_ranks",
    "is_acyclic_or_empty",
    "GeneralIdeal",
    "extremal_power_ideal",
    "join_closure",
    "lcm_lattice",
    "BettiTable",
    "betti_multigraded_oracle",
    "betti_total_oracle",
    "DEFAULT_GENERATOR_BUDGET",
]

FIELDS = ("gf2", "rational")
DEFAULT_GENERATOR_BUDGET = 20
DEFAULT_LATTICE_BUDGET = 1 << 20


def _check_field(field: str) -> str:
    if field not in FIELDS:
        raise ValueError(f"field must be one of {FIELDS}, got {field!r}")
    return field


def gf2_rank(rows) -> int:
    """Rank over GF(2); rows are int bitsets."""
    pivots: dict[int, int] = {}
    rank = 0
    for row in rows:
        while row:
            low = row & -row
            p = pivots.get(low)
            if p is None:
                pivots[low] = row
                rank += 1
                break
            row ^= p
    return rank


def rational_rank(rows) -> int:
    """Rank over the rationals; rows are sparse {column: coefficient} dicts."""
    pivots: dict[int, dict[int, Fraction]] = {}
    rank = 0
    for raw in rows:
        row = {c: Fraction(v) for c, v in raw.items() if v}
        while row:
            c = min(row)
            p = pivots.get(c)
            if p is None:
                lead = row[c]
                pivots[c] = {k: v / lead for k, v in row.items()}
                rank += 1
                break
            coef = row[c]
            for k, v in p.items():
                w = row.get(k, Fraction(0)) - coef * v
                if w:
                    row[k] = w
                else:
                    row.pop(k, None)
    return rank


def _boundary_rank(upper, lower_index, field: str) -> int:
    """Rank of the simplicial boundary from the faces in ``upper`` into the
    column space indexed by ``lower_index``; removals absent from the index
    contribute nothing (used for label-class restricted boundaries)."""
    if not upper or not lower_index:
        return 0
    if field == "gf2":
        rows = []
        for face in upper:
            row = 0
            for k in range(len(face)):
                j = lower_index.get(face[:k] + face[k + 1 :])
                if j is not None:
                    row |= 1 << j
            rows.append(row)
        return gf2_rank(rows)
    rows = []
    for face in upper:
        row = {}
        for k in range(len(face)):
            j = lower_index.get(face[:k] + face[k + 1 :])
            if j is not None:
                row[j] = -1 if k % 2 else 1
        rows.append(row)
    return rational_rank(rows)


def reduced_homology_ranks(faces, field: str = "gf2") -> list[int]:
    """Reduced homology ranks by dimension of a face set closed under subsets.

    Faces are tuples of comparable, hashable vertices; the empty complex
    returns [].  The augmentation (empty face) is always included, so a
    single point has all ranks zero and two points have rank 1 in
    dimension 0.
    """
    _check_field(field)
    canon = {tuple(sorted(f)) for f in faces}
    canon.discard(())
    if not canon:
        return []
    by_size: dict[int, list[tuple]] = {}
    for f in canon:
        by_size.setdefault(len(f), []).append(f)
    for s, fs in by_size.items():
        if s > 1:
            for f in fs:
                for k in range(s):
                    if f[:k] + f[k + 1 :] not in canon:
                        raise ValueError(f"face set not closed under subsets at {f}")
    top = max(by_size)
    index = {s: {f: j for j, f in enumerate(sorted(fs))} for s, fs in by_size.items()}
    ranks = {1: 1 if by_size.get(1) else 0}  # augmentation into the empty face
    for s in range(2, top + 1):
        ranks[s] = _boundary_rank(by_size.get(s, ()), index.get(s - 1, {}), field)
    out = []
    for s in range(1, top + 1):
        n = len(by_size.get(s, ()))
        out.append(n - ranks.get(s, 0) - ranks.get(s + 1, 0))
    return out


def is_acyclic_or_empty(faces, field: str = "gf2") -> bool:
    """True iff the face set is empty or all reduced homology ranks vanish."""
    faces = list(faces)
    if not faces:
        return True
    return all(v == 0 for v in reduced_homology_ranks(faces, field=field))


@dataclass(frozen=True)
class GeneralIdeal:
    """A monomial ideal given by exponent vectors over an abstract variable set.

    Generators must be distinct and minimal (none divides another); this is
    validated on construction rather than repaired, since downstream counts
    key off the number of minimal generators.
    """

    generators: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        gens = self.generators
        if not gens:
            raise ValueError("an ideal needs at least one generator")
        width = len(gens[0])
        for g in gens:
            if len(g) != width or any(e < 0 for e in g):
                raise ValueError(f"bad exponent vector {g}")
        if len(set(gens)) != len(gens):
            raise ValueError("generators must be distinct")
        arr = np.array(gens, dtype=np.int64)
        divides = (arr[:, None, :] <= arr[None, :, :]).all(axis=2)
        np.fill_diagonal(divides, False)
        if divides.any():
            i, j = np.argwhere(divides)[0]
            raise ValueError(f"generator {gens[i]} divides generator {gens[j]}")

    @property
    def nvars(self) -> int:
        return len(self.generators[0])

    def matrix(self, dtype=np.int16) -> np.ndarray:
        return np.array(self.generators, dtype=dtype)


def extremal_power_ideal(q: int, r: int) -> GeneralIdeal:
    """The degree-r power of the q-generator extremal ideal, as exponent vectors."""
    from .complexes import generator_table  # local import; complexes depends on us

    table = generator_table(q, r)
    return GeneralIdeal(tuple(tuple(int(e) for e in row) for row in table.matrix))


def join_closure(rows: np.ndarray, budget: int = DEFAULT_LATTICE_BUDGET) -> np.ndarray:
    """Closure of the given exponent rows under componentwise max.

    Joining with single rows suffices since any join folds one row at a
    time.  Returns one matrix row per lattice element, deterministic order.
    """
    V = np.asarray(rows)
    seen: dict[bytes, np.ndarray] = {}
    frontier = []
    for row in V:
        key = row.tobytes()
        if key not in seen:
            seen[key] = row
            frontier.append(row)
    while frontier:
        F = np.array(frontier)
        joins = np.maximum(F[:, None, :], V[None, :, :]).reshape(-1, V.shape[1])
        frontier = []
        for row in joins:
            key = row.tobytes()
            if key not in seen:
                seen[key] = row
                frontier.append(row)
        if len(seen) > budget:
            raise BudgetError(f"lcm lattice exceeded budget {budget}")
    return np.array(sorted(seen.values(), key=lambda r: tuple(r)))


def lcm_lattice(ideal: GeneralIdeal, budget: int = DEFAULT_LATTICE_BUDGET) -> list[tuple[int, ...]]:
    """All lcms of nonempty generator subsets, ordered deterministically."""
    return [tuple(int(v) for v in row) for row in join_closure(ideal.matrix(), budget)]


def betti_multigraded_oracle(
    ideal: GeneralIdeal,
    i: int,
    m,
    field: str = "gf2",
    generator_budget: int = DEFAULT_GENERATOR_BUDGET,
) -> int:
    """One multigraded betti number, via the strictly-dividing subcomplex.

    The value is the rank of reduced homology in degree i-1 of the faces of
    the full simplex on the generators whose label strictly divides m.
    """
    _check_field(field)
    if i < 0:
        raise ValueError("homological degree must be non-negative")
    m = np.asarray(tuple(m), dtype=np.int64)
    V = ideal.matrix(dtype=np.int64)
    W = np.flatnonzero((V <= m).all(axis=1))
    if len(W) == 0 or not np.array_equal(V[W].max(axis=0), m):
        raise ValueError("m is not in the lcm lattice of the ideal")
    if len(W) > generator_budget:
        raise BudgetError(
            f"{len(W)} generators divide m, above budget {generator_budget}"
        )
    sub = V[W]

    def strict_faces(size: int) -> list[tuple[int, ...]]:
        if size < 1 or size > len(W):
            return []
        out = []
        for comb in combinations(range(len(W)), size):
            if not np.array_equal(sub[list(comb)].max(axis=0), m):
                out.append(comb)
        return out

    n_vertices = len(strict_faces(1))
    if i == 0:
        # reduced homology in degree -1: nonzero iff the subcomplex is empty
        return 1 if n_vertices == 0 else 0
    mid = strict_faces(i)
    if not mid:
        return 0
    upper = strict_faces(i + 1)
    if i == 1:
        rank_mid = 1 if mid else 0  # augmentation
    else:
        lower_index = {f: j for j, f in enumerate(strict_faces(i - 1))}
        rank_mid = _boundary_rank(mid, lower_index, field)
    mid_index = {f: j for j, f in enumerate(mid)}
    rank_upper = _boundary_rank(upper, mid_index, field)
    return len(mid) - rank_mid - rank_upper


@dataclass
class BettiTable:
    """Total and multigraded betti numbers keyed by homological degree."""

    total: dict[int, int] = dataclass_field(default_factory=dict)
    multigraded: dict[tuple[int, tuple[int, ...]], int] = dataclass_field(default_factory=dict)

    def totals_list(self) -> tuple[int, ...]:
        if not self.total:
            return ()
        top = max(i for i, v in self.total.items() if v)
        return tuple(self.total.get(i, 0) for i in range(top + 1))

    def degree(self, i: int) -> int:
        return self.total.get(i, 0)


def _class_betti(by_size: dict[int, list[int]], field: str) -> dict[int, int]:
    """Betti contributions of one label class; faces are generator bitmasks.

    The boundary keeps only removals staying inside the class (label
    preserved).  A face of size s sits in homological degree s-1.
    """
    col = {s: {mask: j for j, mask in enumerate(ms)} for s, ms in by_size.items()}
    ranks: dict[int, int] = {}
    for s, ms in sorted(by_size.items()):
        lower = col.get(s - 1)
        if not lower:
            ranks[s] = 0
            continue
        if field == "gf2":
            rows = []
            for mask in ms:
                row = 0
                rest = mask
                while rest:
                    bit = rest & -rest
                    j = lower.get(mask ^ bit)
                    if j is not None:
                        row |= 1 << j
                    rest ^= bit
                rows.append(row)
            ranks[s] = gf2_rank(rows)
        else:
            rows = []
            for mask in ms:
                row = {}
                rest = mask
                pos = 0
                while rest:
                    bit = rest & -rest
                    j = lower.get(mask ^ bit)
                    if j is not None:
                        row[j] = -1 if pos % 2 else 1
                    rest ^= bit
                    pos += 1
                rows.append(row)
            ranks[s] = rational_rank(rows)
    out = {}
    for s, ms in by_size.items():
        b = len(ms) - ranks.get(s, 0) - ranks.get(s + 1, 0)
        if b:
            out[s - 1] = b
    return out


def betti_total_oracle(
    ideal: GeneralIdeal,
    max_i: int | None = None,
    field: str = "gf2",
    generator_budget: int = DEFAULT_GENERATOR_BUDGET,
) -> BettiTable:
    """Betti table of the ideal by label-class homology over the lcm lattice.

    Every face of the full simplex on the generators is assigned to its
    label class (the realized lcm lattice); homology of the label-preserving
    boundary inside each class yields the multigraded numbers, whose sums
    are the totals.  ``max_i`` truncates the table, in which case only faces
    of size up to max_i + 2 are enumerated.
    """
    _check_field(field)
    G = len(ideal.generators)
    if G > generator_budget:
        raise BudgetError(f"{G} generators above budget {generator_budget}")
    V = ideal.matrix(dtype=np.int16)

    if max_i is None:
        joins = subset_join_table(V)
        ids, payloads = row_ids(joins[1:])  # index mask-1
        masks = np.arange(1, 1 << G, dtype=np.int64)
        sizes = np.bitwise_count(masks).astype(np.int64)
    else:
        cap = min(G, max_i + 2)
        mask_list: list[int] = []
        label_rows = []
        for s in range(1, cap + 1):
            for comb in combinations(range(G), s):
                mask_list.append(sum(1 << c for c in comb))
                label_rows.append(V[list(comb)].max(axis=0))
        masks = np.array(mask_list, dtype=np.int64)
        sizes = np.bitwise_count(masks).astype(np.int64)
        ids, payloads = row_ids(np.array(label_rows, dtype=np.int16))

    order = np.argsort(ids, kind="stable")
    sorted_ids = ids[order]
    boundaries = np.flatnonzero(np.diff(sorted_ids)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(sorted_ids)]))

    table = BettiTable()
    for lo, hi in zip(starts, ends):
        rows = order[lo:hi]
        label = tuple(int(v) for v in np.frombuffer(payloads[sorted_ids[lo]], dtype=np.int16))
        if hi - lo == 1:
            s = int(sizes[rows[0]])
            contrib = {s - 1: 1}
        else:
            by_size: dict[int, list[int]] = {}
            for k in rows:
                by_size.setdefault(int(sizes[k]), []).append(int(masks[k]))
            contrib = _class_betti(by_size, field)
        for deg, count in contrib.items():
            if max_i is not None and deg > max_i:
                continue
            table.total[deg] = table.total.get(deg, 0) + count
            table.multigraded[(deg, label)] = count
    return table
