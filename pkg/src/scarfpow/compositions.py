"""Integer compositions and subset bitmasks.

Compositions of r into q parts index the degree-r products of q fixed
generators; nonempty subsets of {1,...,q} index the variables of the
ambient ring.  Everything downstream (labels, complexes, matchings) is
phrased over these two index sets.

Compositions are plain tuples of non-negative ints.  Subsets are int
bitmasks: bit i-1 set means element i is a member, so the masks
1 .. 2^q-1 enumerate the nonempty subsets in ascending binary order.
"""

from __future__ import annotations

from math import comb

__all__ = [
    "composition_count",
    "enumerate_compositions",
    "lex_compare",
    "support",
    "validate_composition",
    "enumerate_subsets",
    "subset_members",
    "subset_from_members",
]


def validate_composition(a, q: int | None = None, r: int | None = None) -> tuple[int, ...]:
    """Check that ``a`` is a composition (optionally of prescribed q, r)."""
    a = tuple(a)
    if not a:
        raise ValueError("composition must have at least one part (q >= 1)")
    if any(not isinstance(v, int) or v < 0 for v in a):
        raise ValueError(f"composition entries must be non-negative integers: {a}")
    if q is not None and len(a) != q:
        raise ValueError(f"expected {q} parts, got {len(a)}: {a}")
    if r is not None and sum(a) != r:
        raise ValueError(f"expected entries summing to {r}, got {sum(a)}: {a}")
    return a


def composition_count(q: int, r: int) -> int:
    """Number of q-part compositions of r: C(r+q-1, q-1)."""
    return comb(r + q - 1, q - 1)


def enumerate_compositions(q: int, r: int) -> list[tuple[int, ...]]:
    """All q-part compositions of r, lexicographically largest first.

    The order is the total order in which a precedes b when the first
    differing entry is larger in a; it coincides with reverse tuple order,
    e.g. (2,0) > (1,1) > (0,2).
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    out: list[tuple[int, ...]] = []
    buf = [0] * q

    def fill(pos: int, remaining: int) -> None:
        if pos == q - 1:
            buf[pos] = remaining
            out.append(tuple(buf))
            return
        for v in range(remaining, -1, -1):
            buf[pos] = v
            fill(pos + 1, remaining - v)

    fill(0, r)
    return out


def lex_compare(a, b) -> int:
    """Three-way comparison: 1 if a > b, -1 if a < b, 0 if equal.

    a > b exactly when the first differing entry is larger in a.  Both
    arguments must share length and sum.
    """
    a = validate_composition(a)
    b = validate_composition(b, q=len(a), r=sum(a))
    if a > b:
        return 1
    if a < b:
        return -1
    return 0


def support(a) -> set[int]:
    """Indices (1-based) of the nonzero entries."""
    a = validate_composition(a)
    return {i + 1 for i, v in enumerate(a) if v}


def enumerate_subsets(q: int) -> list[int]:
    """All 2^q - 1 nonempty subset masks, ascending as binary integers."""
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    return list(range(1, 1 << q))


def subset_members(mask: int) -> tuple[int, ...]:
    """1-based members of a subset mask, ascending."""
    if mask <= 0:
        raise ValueError(f"subset mask must be a positive integer, got {mask}")
    out = []
    i = 1
    m = mask
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return tuple(out)


def subset_from_members(members, q: int) -> int:
    """Bitmask of a nonempty subset of {1,...,q}."""
    mask = 0
    for i in members:
        if not 1 <= i <= q:
            raise ValueError(f"member {i} outside 1..{q}")
        mask |= 1 << (i - 1)
    if mask == 0:
        raise ValueError("subset must be nonempty")
    return mask
