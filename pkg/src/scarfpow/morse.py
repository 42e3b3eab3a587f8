"""Discrete Morse matchings on Taylor faces: three builders and a verifier.

Faces are int bitmasks over the generator list (bit i is the i-th largest
generator), so the whole Taylor complex on G generators is the mask range
1 .. 2^G - 1.  A matching is a set of directed pairs (face, face minus one
vertex); verification checks disjointness, homogeneity (equal labels
within each pair) and acyclicity of the pair-reversed face graph, and
lists the unmatched (critical) cells.

Acyclicity of a homogeneous matching is checked per label class: down
edges only shrink labels and reversed pairs preserve them, so a directed
cycle can never leave its label class.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .complexes import generator_table, scarf_edge_matrix
from .compositions import validate_composition
from .errors import BudgetError
from .labels import canonical_face, row_ids, subset_join_table

__all__ = [
    "DEFAULT_TAYLOR_BUDGET",
    "MorseMatching",
    "MatchingReport",
    "LabeledFaceSet",
    "verify_matching",
    "build_edge_matching",
    "build_small_q_matching",
    "build_facet_matching",
    "find_nu",
    "find_iota",
    "face_to_mask",
    "mask_to_face",
    "face_to_text",
    "parse_face",
    "matching_to_text",
    "matching_from_text",
]

DEFAULT_TAYLOR_BUDGET = 1 << 20
NONHOMOGENEOUS_ACYCLICITY_BUDGET = 1 << 16


def face_to_mask(face, table) -> int:
    mask = 0
    for v in face:
        mask |= 1 << table.index[validate_composition(v, q=table.q, r=table.r)]
    return mask


def mask_to_face(mask: int, gens) -> tuple[tuple[int, ...], ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(gens[i])
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class MorseMatching:
    """Directed pairs (sigma, sigma minus one vertex) over one (q, r)."""

    q: int
    r: int
    uppers: np.ndarray  # int64 face masks
    lowers: np.ndarray
    domain: str  # description of the face set the matching lives on

    @property
    def n_pairs(self) -> int:
        return len(self.uppers)

    def pairs_as_faces(self):
        gens = generator_table(self.q, self.r).gens
        for u, l in zip(self.uppers.tolist(), self.lowers.tolist()):
            yield mask_to_face(u, gens), mask_to_face(l, gens)


class LabeledFaceSet:
    """An explicit face set with label-class ids, the verifier's domain."""

    def __init__(self, q: int, r: int, masks: np.ndarray, ids: np.ndarray, full: bool):
        self.q = q
        self.r = r
        self.masks = masks
        self.ids = ids
        self.full = full
        self.table = generator_table(q, r)
        self.n_gens = len(self.table.gens)

    def __len__(self) -> int:
        return len(self.masks)

    @classmethod
    def full_taylor(cls, q: int, r: int, face_budget: int = DEFAULT_TAYLOR_BUDGET) -> "LabeledFaceSet":
        table = generator_table(q, r)
        G = len(table.gens)
        if (1 << G) > face_budget:
            raise BudgetError(
                f"full Taylor complex has 2^{G} faces, above budget {face_budget}; "
                "pass a larger face_budget to override"
            )
        V = table.matrix
        if r < 128:
            V = V.astype(np.int8)
        joins = subset_join_table(V)
        ids, _ = row_ids(joins[1:])
        masks = np.arange(1, 1 << G, dtype=np.int64)
        return cls(q, r, masks, ids, True)

    @classmethod
    def from_masks(cls, q: int, r: int, masks) -> "LabeledFaceSet":
        table = generator_table(q, r)
        arr = np.unique(np.asarray(list(masks), dtype=np.int64))
        if len(arr) == 0:
            raise ValueError("face set must be nonempty")
        if arr[0] <= 0:
            raise ValueError("face masks must be positive")
        V = table.matrix
        rows = np.empty((len(arr), V.shape[1]), dtype=V.dtype)
        for k, m in enumerate(arr.tolist()):
            idx = []
            i = 0
            while m:
                if m & 1:
                    idx.append(i)
                m >>= 1
                i += 1
            rows[k] = V[idx].max(axis=0)
        ids, _ = row_ids(rows)
        return cls(q, r, arr, ids, False)

    @classmethod
    def dim_capped(cls, q: int, r: int, max_dim: int) -> "LabeledFaceSet":
        """All Taylor faces of dimension <= max_dim."""
        from itertools import combinations

        table = generator_table(q, r)
        G = len(table.gens)
        masks = [
            sum(1 << c for c in comb)
            for size in range(1, max_dim + 2)
            for comb in combinations(range(G), size)
        ]
        return cls.from_masks(q, r, masks)

    def positions(self, queries: np.ndarray) -> np.ndarray:
        """Index of each query mask inside ``masks``; -1 where absent."""
        queries = np.asarray(queries, dtype=np.int64)
        if self.full:
            pos = queries - 1
            bad = (queries < 1) | (queries >= (1 << self.n_gens))
            pos[bad] = -1
            return pos
        pos = np.searchsorted(self.masks, queries)
        pos[pos >= len(self.masks)] = len(self.masks) - 1
        bad = self.masks[pos] != queries
        pos[bad] = -1
        return pos


@dataclass
class MatchingReport:
    """Verification verdicts plus the unmatched (critical) cells."""

    is_matching: bool
    is_homogeneous: bool
    is_acyclic: bool
    n_faces: int
    n_pairs: int
    critical_masks: np.ndarray
    gens: tuple
    notes: tuple[str, ...] = ()

    @property
    def all_ok(self) -> bool:
        return self.is_matching and self.is_homogeneous and self.is_acyclic

    def critical_faces(self) -> list[tuple[tuple[int, ...], ...]]:
        return [mask_to_face(int(m), self.gens) for m in self.critical_masks]

    def critical_f_vector(self) -> tuple[int, ...]:
        if len(self.critical_masks) == 0:
            return ()
        sizes = np.bitwise_count(self.critical_masks.astype(np.uint64)).astype(np.int64)
        counts = np.bincount(sizes)[1:]
        return tuple(int(c) for c in np.trim_zeros(counts, "b"))


def _has_cycle(nodes: set[int], pair_up: dict[int, int], pair_down: dict[int, int]) -> bool:
    """Directed cycle test on the pair-reversed face graph induced on ``nodes``."""

    def neighbors(m: int):
        u = pair_up.get(m)
        if u is not None and u in nodes:
            yield u
        down = pair_down.get(m)
        rest = m
        while rest:
            bit = rest & -rest
            t = m ^ bit
            if t != down and t in nodes:
                yield t
            rest ^= bit

    color: dict[int, int] = {}  # 1 on stack, 2 done
    for start in nodes:
        if color.get(start):
            continue
        color[start] = 1
        stack = [(start, neighbors(start))]
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                c = color.get(nxt, 0)
                if c == 1:
                    return True
                if c == 0:
                    color[nxt] = 1
                    stack.append((nxt, neighbors(nxt)))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return False


def verify_matching(matching: MorseMatching, faces: LabeledFaceSet) -> MatchingReport:
    """Check matching/homogeneity/acyclicity and list critical cells.

    Acyclicity is run independently within each label class when the
    matching is homogeneous, else on the whole face graph (budgeted).
    """
    if (matching.q, matching.r) != (faces.q, faces.r):
        raise ValueError("matching and face set live on different (q, r)")
    gens = faces.table.gens
    uppers = np.asarray(matching.uppers, dtype=np.int64)
    lowers = np.asarray(matching.lowers, dtype=np.int64)
    notes: list[str] = []

    if len(uppers) == 0:
        return MatchingReport(True, True, True, len(faces), 0, faces.masks.copy(), gens)

    pos_up = faces.positions(uppers)
    pos_lo = faces.positions(lowers)
    if (pos_up < 0).any() or (pos_lo < 0).any():
        raise ValueError("matching uses a face outside the given face set")
    diff = uppers ^ lowers
    good_shape = ((uppers & lowers) == lowers) & (np.bitwise_count(diff.astype(np.uint64)) == 1)
    if not good_shape.all():
        raise ValueError("each pair must remove exactly one vertex of its upper face")

    both = np.concatenate([uppers, lowers])
    is_matching = len(np.unique(both)) == 2 * len(uppers)
    if not is_matching:
        notes.append("some face occurs in more than one pair")

    ids_up = faces.ids[pos_up]
    ids_lo = faces.ids[pos_lo]
    is_homogeneous = bool((ids_up == ids_lo).all())

    # critical cells: faces incident to no pair
    if faces.full:
        matched_flag = np.zeros(1 << faces.n_gens, dtype=bool)
        matched_flag[both] = True
        critical = np.flatnonzero(~matched_flag)[1:]  # drop mask 0
    else:
        critical = faces.masks[~np.isin(faces.masks, both)]

    if not is_matching:
        return MatchingReport(False, is_homogeneous, False, len(faces), len(uppers),
                              critical, gens, tuple(notes + ["acyclicity not evaluated"]))

    pair_up = dict(zip(lowers.tolist(), uppers.tolist()))
    pair_down = dict(zip(uppers.tolist(), lowers.tolist()))

    if is_homogeneous:
        is_acyclic = True
        class_of_pairs, pair_counts = np.unique(ids_up, return_counts=True)
        busy = class_of_pairs[pair_counts >= 2]
        if len(busy):
            order = np.argsort(faces.ids, kind="stable")
            sorted_ids = faces.ids[order]
            for cid in busy.tolist():
                lo = np.searchsorted(sorted_ids, cid, side="left")
                hi = np.searchsorted(sorted_ids, cid, side="right")
                nodes = set(faces.masks[order[lo:hi]].tolist())
                if _has_cycle(nodes, pair_up, pair_down):
                    is_acyclic = False
                    break
    else:
        if len(faces) > NONHOMOGENEOUS_ACYCLICITY_BUDGET:
            raise BudgetError(
                "global acyclicity check on a non-homogeneous matching over "
                f"{len(faces)} faces exceeds budget {NONHOMOGENEOUS_ACYCLICITY_BUDGET}"
            )
        nodes = set(faces.masks.tolist())
        is_acyclic = not _has_cycle(nodes, pair_up, pair_down)

    return MatchingReport(is_matching, is_homogeneous, is_acyclic,
                          len(faces), len(uppers), critical, gens, tuple(notes))


def build_edge_matching(q: int, r: int) -> MorseMatching:
    """Pair every non-Scarf edge with a canonical triangle sharing its label.

    For a non-Scarf edge {a, b} some third generator divides the edge label;
    the lexicographically greatest such divisor c gives the pair
    ({a, b, c} -> {a, b}).  Critical edges are then exactly the Scarf edges.
    """
    table = generator_table(q, r)
    V = table.matrix
    G = len(table.gens)
    edges = scarf_edge_matrix(q, r)
    uppers: list[int] = []
    lowers: list[int] = []
    for i in range(G):
        for j in range(i + 1, G):
            if edges[i, j]:
                continue
            label = np.maximum(V[i], V[j])
            div = np.flatnonzero((V <= label).all(axis=1))
            extra = [c for c in div.tolist() if c != i and c != j]
            if not extra:
                raise RuntimeError(
                    f"non-Scarf edge {table.gens[i]},{table.gens[j]} has no third divisor"
                )
            c = extra[0]  # smallest index = lexicographically greatest divisor
            lowers.append((1 << i) | (1 << j))
            uppers.append((1 << i) | (1 << j) | (1 << c))
    return MorseMatching(q, r, np.array(uppers, dtype=np.int64),
                         np.array(lowers, dtype=np.int64), "dim<=2")


def _lsb_index(x: int) -> int:
    return (x & -x).bit_length() - 1


def build_small_q_matching(q: int, r: int, face_budget: int = DEFAULT_TAYLOR_BUDGET) -> MorseMatching:
    """The full matching on the Taylor complex for q <= 4.

    Every non-Scarf face sigma is assigned the distinguished generator of
    its maximal non-Scarf vertex pair (largest pair first by the larger
    vertex, then by the smaller one); sigma is paired with sigma minus that
    generator whenever the generator lies in sigma.  The result matches the
    non-Scarf faces perfectly, leaving exactly the Scarf faces critical.
    """
    if not 1 <= q <= 4:
        raise ValueError(f"construction requires q <= 4, got q={q}")
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    table = generator_table(q, r)
    V = table.matrix
    G = len(table.gens)
    if (1 << G) > face_budget:
        raise BudgetError(
            f"Taylor complex has 2^{G} faces, above budget {face_budget}; "
            "pass a larger face_budget to override"
        )
    edges = scarf_edge_matrix(q, r)

    ns_mask = np.zeros(G, dtype=np.int64)  # partners below in lex order (higher index)
    sc_mask = np.zeros(G, dtype=np.int64)  # Scarf partners, any index
    for i in range(G):
        for j in range(G):
            if i == j:
                continue
            if edges[i, j]:
                sc_mask[i] |= 1 << j
            elif j > i:
                ns_mask[i] |= 1 << j

    # distinguished generator per non-Scarf pair: the lex-greatest c below a
    # forming a Scarf edge with a and dividing the pair label
    iota_idx = np.full((G, G), -1, dtype=np.int64)
    all_bits = (1 << G) - 1
    for i in range(G):
        rest = int(ns_mask[i])
        while rest:
            jbit = rest & -rest
            j = _lsb_index(jbit)
            rest ^= jbit
            label = np.maximum(V[i], V[j])
            div = np.flatnonzero((V <= label).all(axis=1))
            div_mask = 0
            for c in div.tolist():
                div_mask |= 1 << c
            cand = int(sc_mask[i]) & div_mask & (all_bits ^ ((1 << (i + 1)) - 1)) & ~(1 << j)
            if cand == 0:
                raise RuntimeError(
                    "no admissible generator for non-Scarf pair "
                    f"{table.gens[i]},{table.gens[j]}; construction invariant violated"
                )
            iota_idx[i, j] = _lsb_index(cand)

    masks = np.arange(1, 1 << G, dtype=np.int64)
    nu_a = np.full(len(masks), -1, dtype=np.int64)
    hit = np.zeros(len(masks), dtype=np.int64)
    unresolved = np.ones(len(masks), dtype=bool)
    for i in range(G):
        if not unresolved.any():
            break
        cand = masks & int(ns_mask[i])
        new = unresolved & ((masks >> i) & 1).astype(bool) & (cand != 0)
        nu_a[new] = i
        hit[new] = cand[new]
        unresolved &= ~new

    nonscarf = nu_a >= 0
    low = hit & -hit
    nu_b = np.bitwise_count((low - 1).astype(np.uint64)).astype(np.int64)
    iota = np.full(len(masks), -1, dtype=np.int64)
    iota[nonscarf] = iota_idx[nu_a[nonscarf], nu_b[nonscarf]]
    has_iota = nonscarf & (((masks >> np.maximum(iota, 0)) & 1) == 1)
    uppers = masks[has_iota]
    lowers = uppers ^ (np.int64(1) << iota[has_iota])
    return MorseMatching(q, r, uppers, lowers, "taylor")


def _german_shift(a, b, q: int, r: int) -> tuple[int, ...]:
    """The facet vertex absorbed when the outside vertex b joins the facet of a.

    Split off the common part of a and b, order the coordinates with the
    support of the b-part first and the support of the a-part last (each
    group ascending), and raise a by one on the first r - |a| coordinates.
    """
    d = tuple(min(x, y) for x, y in zip(a, b))
    a1 = tuple(x - y for x, y in zip(a, d))
    b1 = tuple(x - y for x, y in zip(b, d))
    r1 = r - sum(a)
    supp_b = [i for i, v in enumerate(b1) if v]
    supp_a = [i for i, v in enumerate(a1) if v]
    middle = [i for i in range(q) if not (b1[i] or a1[i])]
    order = supp_b + middle + supp_a
    bump = set(order[:r1])
    return tuple(x + (1 if i in bump else 0) for i, x in enumerate(a))


def build_facet_matching(a, q: int, r: int, face_budget: int = DEFAULT_TAYLOR_BUDGET) -> MorseMatching:
    """Pair every face strictly containing the shifted square-free facet.

    Each such face loses the facet vertex produced by the shift recipe for
    its lexicographically greatest outside vertex; the pair shares labels,
    which is asserted during construction.
    """
    a = validate_composition(a, q=q)
    s = sum(a)
    if not (r - q < s < r):
        raise ValueError(f"|a|={s} outside the open range ({r - q}, {r})")
    table = generator_table(q, r)
    V = table.matrix
    from .complexes import u_facet_vectors  # deterministic facet vertex order

    facet = next(face for vec, face in u_facet_vectors(q, r) if vec == a)
    fmask = face_to_mask(facet, table)
    others = [i for i in range(len(table.gens)) if not (fmask >> i) & 1]
    if (1 << len(others)) - 1 > face_budget:
        raise BudgetError(
            f"2^{len(others)} faces contain the facet, above budget {face_budget}"
        )

    def label_of(mask: int) -> np.ndarray:
        idx = []
        m = mask
        i = 0
        while m:
            if m & 1:
                idx.append(i)
            m >>= 1
            i += 1
        return V[idx].max(axis=0)

    uppers = []
    lowers = []
    for sub in range(1, 1 << len(others)):
        extras = 0
        for k, g in enumerate(others):
            if (sub >> k) & 1:
                extras |= 1 << g
        sigma = fmask | extras
        b_idx = _lsb_index(extras)  # lex-greatest outside vertex
        c = _german_shift(a, table.gens[b_idx], q, r)
        ci = table.index[c]
        if not (fmask >> ci) & 1:
            raise RuntimeError(f"shift recipe left the facet: {c}")
        lower = sigma ^ (1 << ci)
        if not np.array_equal(label_of(sigma), label_of(lower)):
            raise RuntimeError(
                f"facet pair is not label-preserving at shift {a}, outside vertex "
                f"{table.gens[b_idx]}"
            )
        uppers.append(sigma)
        lowers.append(lower)
    return MorseMatching(q, r, np.array(uppers, dtype=np.int64),
                         np.array(lowers, dtype=np.int64), "contains-facet")


def find_nu(face) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The maximal non-Scarf vertex pair of a face (larger vertex first).

    Pairs are ordered by the larger vertex, then the smaller one, in the
    lex order on compositions.  Raises if every vertex pair is Scarf.
    """
    face = canonical_face(face)
    q, r = len(face[0]), sum(face[0])
    if q > 4:
        raise ValueError("the pair machinery is only valid for q <= 4")
    table = generator_table(q, r)
    edges = scarf_edge_matrix(q, r)
    idx = sorted(table.index[v] for v in face)
    for i in idx:
        for j in idx:
            if j > i and not edges[i, j]:
                return table.gens[i], table.gens[j]
    raise ValueError("every vertex pair of the face is Scarf")


def find_iota(face) -> tuple[int, ...]:
    """The distinguished generator matched across a non-Scarf face.

    The lex-greatest c below the larger vertex a of the face's maximal
    non-Scarf pair such that c avoids the smaller vertex, {a, c} is a Scarf
    edge, and c divides the pair's label.  Existence is an invariant for
    q <= 4; absence aborts loudly.
    """
    from .complexes import is_scarf_face

    face = canonical_face(face)
    if is_scarf_face(face):
        raise ValueError("face is Scarf; no generator to match")
    a, b = find_nu(face)
    q, r = len(a), sum(a)
    table = generator_table(q, r)
    V = table.matrix
    edges = scarf_edge_matrix(q, r)
    i, j = table.index[a], table.index[b]
    label = np.maximum(V[i], V[j])
    div = np.flatnonzero((V <= label).all(axis=1))
    for c in div.tolist():
        if c > i and c != j and edges[i, c]:
            return table.gens[c]
    raise RuntimeError(
        f"no admissible generator for pair {a},{b}; construction invariant violated"
    )


_FACE_RE = re.compile(r"\(([^()]*)\)")


def face_to_text(face) -> str:
    return ",".join("(" + ",".join(str(x) for x in v) + ")" for v in face)


def parse_face(text: str, q: int, r: int) -> tuple[tuple[int, ...], ...]:
    groups = _FACE_RE.findall(text)
    if not groups:
        raise ValueError(f"no composition tuples in {text!r}")
    verts = [tuple(int(x) for x in g.split(",")) for g in groups]
    return canonical_face(validate_composition(v, q=q, r=r) for v in verts)


def matching_to_text(matching: MorseMatching) -> str:
    lines = [
        f"{face_to_text(up)} -> {face_to_text(lo)}"
        for up, lo in matching.pairs_as_faces()
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def matching_from_text(q: int, r: int, text: str, domain: str = "certificate") -> MorseMatching:
    table = generator_table(q, r)
    uppers = []
    lowers = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "->" not in line:
            raise ValueError(f"malformed matching line: {line!r}")
        left, right = line.split("->", 1)
        uppers.append(face_to_mask(parse_face(left, q, r), table))
        lowers.append(face_to_mask(parse_face(right, q, r), table))
    return MorseMatching(q, r, np.array(uppers, dtype=np.int64),
                         np.array(lowers, dtype=np.int64), domain)
