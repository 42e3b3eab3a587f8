"""Transfer from the extremal world to an arbitrary square-free ideal.

Each variable x_k of the target ring determines the set A_k of generators
it divides; the transfer map sends the subset-indexed variable of A to the
product of all x_k with A_k = A (or to 1 when no such k exists).  Under it
the extremal generator of a composition a maps to the a-fold product of
the target generators, lcms map to lcms, and Scarf faces of the power of
the target ideal are Scarf faces of the extremal power.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compositions import enumerate_compositions, subset_members, validate_composition
from .complexes import generator_table, is_scarf_face, scarf_faces_from_matrix
from .errors import UnsupportedIdealError
from .formulas import betti_r2_vector, bounds_small_q
from .homology import (
    DEFAULT_GENERATOR_BUDGET,
    BettiTable,
    GeneralIdeal,
    betti_total_oracle,
    extremal_power_ideal,
)

__all__ = [
    "SquareFreeIdeal",
    "variable_classes",
    "psi_apply",
    "generator_power_vector",
    "power_ideal",
    "ScarfInclusionReport",
    "scarf_inclusion_check",
    "BettiBoundReport",
    "betti_bound_check",
    "parse_ideal",
]


@dataclass(frozen=True)
class SquareFreeIdeal:
    """A square-free monomial ideal: generators as variable sets over [n].

    Generators must be nonempty, distinct and pairwise incomparable under
    inclusion; non-minimal input is rejected rather than repaired, since
    the generator count drives everything downstream.
    """

    n: int
    generators: tuple[int, ...]  # variable bitmasks, bit k-1 is x_k

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one variable, got n={self.n}")
        if not self.generators:
            raise ValueError("an ideal needs at least one generator")
        full = (1 << self.n) - 1
        for g in self.generators:
            if g <= 0 or g & ~full:
                raise ValueError(f"generator mask {g} outside variables 1..{self.n}")
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("generators must be distinct")
        for g in self.generators:
            for h in self.generators:
                if g != h and g & h == g:
                    raise ValueError(
                        f"generator {sorted(subset_members(g))} divides "
                        f"{sorted(subset_members(h))}; input must be minimal"
                    )

    @property
    def q(self) -> int:
        return len(self.generators)


def variable_classes(ideal: SquareFreeIdeal) -> dict[int, int]:
    """For each variable k, the bitmask of generators it divides (may be 0)."""
    out = {}
    for k in range(1, ideal.n + 1):
        mask = 0
        for j, g in enumerate(ideal.generators):
            if (g >> (k - 1)) & 1:
                mask |= 1 << j
        out[k] = mask
    return out


def psi_apply(label, ideal: SquareFreeIdeal) -> tuple[int, ...]:
    """Push a subset-indexed exponent vector through the transfer map.

    The exponent of x_k in the image is the label entry at A_k when A_k is
    nonempty, else zero (variables dividing no generator are ignored).
    """
    label = np.asarray(label)
    if len(label) != (1 << ideal.q) - 1:
        raise ValueError(
            f"label has {len(label)} entries; expected {(1 << ideal.q) - 1} "
            f"for q={ideal.q}"
        )
    classes = variable_classes(ideal)
    return tuple(
        int(label[classes[k] - 1]) if classes[k] else 0 for k in range(1, ideal.n + 1)
    )


def generator_power_vector(a, ideal: SquareFreeIdeal) -> tuple[int, ...]:
    """Exponent vector of the a-fold product of the ideal's generators."""
    a = validate_composition(a, q=ideal.q)
    out = [0] * ideal.n
    for j, g in enumerate(ideal.generators):
        if a[j]:
            for k in subset_members(g):
                out[k - 1] += a[j]
    return tuple(out)


def _power_matrix(ideal: SquareFreeIdeal, r: int) -> tuple[list, np.ndarray]:
    comps = enumerate_compositions(ideal.q, r)
    rows = np.array([generator_power_vector(a, ideal) for a in comps], dtype=np.int16)
    return comps, rows


def power_ideal(ideal: SquareFreeIdeal, r: int) -> GeneralIdeal:
    """The r-th power as a general ideal; requires the r-fold products to be
    distinct and minimal, else the composition indexing breaks down."""
    comps, rows = _power_matrix(ideal, r)
    uniq = {tuple(int(v) for v in row) for row in rows}
    if len(uniq) != len(comps):
        raise UnsupportedIdealError(
            f"the degree-{r} products of the generators collide; "
            "such ideals are not supported"
        )
    try:
        return GeneralIdeal(tuple(tuple(int(v) for v in row) for row in rows))
    except ValueError as exc:
        raise UnsupportedIdealError(
            f"the degree-{r} products do not minimally generate the power: {exc}"
        ) from exc


@dataclass
class ScarfInclusionReport:
    holds: bool
    n_faces: int
    faces: tuple
    missing: tuple

    @property
    def edge_count(self) -> int:
        return sum(1 for f in self.faces if len(f) == 2)


def scarf_inclusion_check(ideal: SquareFreeIdeal, r: int, max_dim: int | None = None) -> ScarfInclusionReport:
    """Scarf faces of the ideal power, each checked against the extremal side.

    The power's Scarf complex is computed brute force over composition-
    labeled vertices; every face must be a Scarf face of the extremal power
    as well, so ``missing`` is expected to stay empty.
    """
    comps, rows = _power_matrix(ideal, r)
    power_ideal(ideal, r)  # validates distinctness and minimality
    idx_faces = scarf_faces_from_matrix(rows, max_dim=max_dim)
    faces = tuple(tuple(comps[i] for i in f) for f in idx_faces)
    missing = tuple(f for f in faces if not is_scarf_face(f))
    return ScarfInclusionReport(not missing, len(faces), faces, missing)


@dataclass
class BettiBoundReport:
    holds: bool
    rows: tuple  # (degree, power betti, extremal betti, ok)
    provenance: str


def betti_bound_check(
    ideal: SquareFreeIdeal,
    r: int,
    max_i: int | None = None,
    field: str = "gf2",
) -> BettiBoundReport:
    """Componentwise comparison of the power's betti numbers against the
    extremal power's, which bound them from above."""
    q = ideal.q
    power = power_ideal(ideal, r)
    mine = betti_total_oracle(power, max_i=max_i, field=field).totals_list()
    if q in (2, 3, 4):
        bound = bounds_small_q(q, r).bounds
        provenance = "formula"
    elif r == 2:
        bound = betti_r2_vector(q)
        provenance = "formula"
    else:
        table = generator_table(q, r)
        if len(table.gens) > DEFAULT_GENERATOR_BUDGET:
            raise UnsupportedIdealError(
                f"no exact extremal betti route for q={q}, r={r} "
                f"({len(table.gens)} generators)"
            )
        bound = betti_total_oracle(extremal_power_ideal(q, r), max_i=max_i, field=field).totals_list()
        provenance = "oracle"
    if max_i is not None:
        mine = mine[: max_i + 1]
        bound = bound[: max_i + 1]
    top = max(len(mine), len(bound))
    rows = []
    holds = True
    for i in range(top):
        bi = mine[i] if i < len(mine) else 0
        be = bound[i] if i < len(bound) else 0
        ok = bi <= be
        holds &= ok
        rows.append((i, bi, be, ok))
    return BettiBoundReport(holds, tuple(rows), provenance)


def parse_ideal(text: str) -> SquareFreeIdeal:
    """Parse one generator per line: either x3*x7*x9 or a 0/1 exponent string.

    Exponents above one (or repeated factors) are rejected: the input must
    be square-free.  Blank lines and #-comments are ignored.
    """
    masks = []
    max_var = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if set(line) <= {"0", "1"}:
            mask = 0
            for pos, ch in enumerate(line):
                if ch == "1":
                    mask |= 1 << pos
            max_var = max(max_var, len(line))
        elif set(line) <= {"0", "1", "2", "3", "4", "5", "6", "7", "8", "9"}:
            raise ValueError(
                f"line {lineno}: exponent string {line!r} is not square-free"
            )
        else:
            mask = 0
            for token in line.split("*"):
                token = token.strip()
                if not token.startswith("x") or not token[1:].isdigit():
                    raise ValueError(f"line {lineno}: bad factor {token!r}")
                k = int(token[1:])
                if k < 1:
                    raise ValueError(f"line {lineno}: variable index must be >= 1")
                bit = 1 << (k - 1)
                if mask & bit:
                    raise ValueError(
                        f"line {lineno}: repeated factor x{k}; input must be square-free"
                    )
                mask |= bit
                max_var = max(max_var, k)
        masks.append(mask)
    if not masks:
        raise ValueError("no generators found")
    return SquareFreeIdeal(max_var, tuple(masks))
