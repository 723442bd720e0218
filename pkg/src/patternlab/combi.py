"""Exact combinatorial primitives.

Multisets, words, permutation patterns, set partitions and arc patterns,
together with their text formats, lexicographic enumerators, Bell numbers,
the Moebius function of the partition lattice and elementary symmetric
functions of multiplicities.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DomainError, ParseError, SizeLimitError

__all__ = [
    "LIMITS",
    "Multiset",
    "PermPattern",
    "SetPartition",
    "ArcPattern",
    "enumerate_multiset_perms",
    "enumerate_set_partitions",
    "bell_number",
    "arcs_of",
    "elementary_symmetric",
    "residual_size",
    "regularity_ratio",
    "mobius_partition_lattice",
    "mobius_by_recursion",
    "multinomial",
]


@dataclass
class Limits:
    """Enumeration caps. Mutable so callers and the CLI can raise them."""

    word_cap: int = 10
    partition_cap: int = 12
    cumulant_order: int = 6


LIMITS = Limits()


def multinomial(total: int, parts: Sequence[int]) -> int:
    """``total! / prod(parts!)``; 0 if any part is negative or they do not sum up."""
    if any(p < 0 for p in parts) or sum(parts) != total:
        return 0
    out = factorial(total)
    for p in parts:
        out //= factorial(p)
    return out


# ---------------------------------------------------------------------------
# Multisets and words


@dataclass(frozen=True)
class Multiset:
    """A finite multiset of positive integers, values relabelled to ``1..k``.

    ``multiplicities[j-1]`` is the multiplicity of the value ``j``.
    """

    multiplicities: tuple[int, ...]

    def __post_init__(self):
        mult = tuple(int(a) for a in self.multiplicities)
        if any(a < 1 for a in mult):
            raise DomainError(f"multiplicities must be >= 1, got {mult}")
        object.__setattr__(self, "multiplicities", mult)

    @classmethod
    def from_mapping(cls, counts: Mapping[int, int]) -> "Multiset":
        for value, count in counts.items():
            if int(value) < 1:
                raise DomainError(f"multiset values must be positive, got {value}")
            if int(count) < 1:
                raise DomainError(f"count of {value} must be >= 1, got {count}")
        return cls(tuple(counts[v] for v in sorted(counts)))

    @classmethod
    def from_word(cls, word: Iterable[int]) -> "Multiset":
        counts: dict[int, int] = {}
        for letter in word:
            counts[letter] = counts.get(letter, 0) + 1
        return cls.from_mapping(counts)

    @classmethod
    def balanced(cls, n: int, k: int) -> "Multiset":
        """``k`` letters with multiplicities as equal as possible, total ``n``."""
        if k < 1 or n < k:
            raise DomainError(f"cannot spread {n} items over {k} letters")
        q, r = divmod(n, k)
        return cls(tuple(q + (1 if j < r else 0) for j in range(k)))

    @classmethod
    def parse(cls, text: str) -> "Multiset":
        counts: dict[int, int] = {}
        for token in text.replace(" ", "").split(","):
            if not token:
                raise ParseError(f"empty item in multiset {text!r}")
            m = re.fullmatch(r"(\d+)(?:\^(\d+))?", token)
            if m is None:
                raise ParseError(f"bad multiset item {token!r}")
            value, count = int(m.group(1)), int(m.group(2) or 1)
            if value < 1 or count < 1:
                raise ParseError(f"bad multiset item {token!r}")
            counts[value] = counts.get(value, 0) + count
        return cls.from_mapping(counts)

    def __str__(self) -> str:
        return ",".join(
            str(j) if a == 1 else f"{j}^{a}" for j, a in enumerate(self.multiplicities, 1)
        )

    @property
    def n(self) -> int:
        return sum(self.multiplicities)

    @property
    def k(self) -> int:
        """Number of distinct values."""
        return len(self.multiplicities)

    def count(self, value: int) -> int:
        if 1 <= value <= self.k:
            return self.multiplicities[value - 1]
        return 0

    @property
    def sorted_multiplicities(self) -> tuple[int, ...]:
        return tuple(sorted(self.multiplicities, reverse=True))

    def sorted_word(self) -> tuple[int, ...]:
        return tuple(j for j, a in enumerate(self.multiplicities, 1) for _ in range(a))

    def num_perms(self) -> int:
        return multinomial(self.n, self.multiplicities)


def elementary_symmetric(M: Multiset, d: int) -> int:
    """e_d of the multiplicities, by the usual one-pass recurrence."""
    if d < 0:
        raise DomainError("d must be >= 0")
    e = [1] + [0] * d
    for a in M.multiplicities:
        for i in range(d, 0, -1):
            e[i] += e[i - 1] * a
    return e[d]


def residual_size(M: Multiset, j: int) -> int:
    """n minus the j largest multiplicities (0 once j exceeds k)."""
    if j < 0:
        raise DomainError("j must be >= 0")
    return M.n - sum(M.sorted_multiplicities[:j])


def regularity_ratio(M: Multiset, ell: int) -> Fraction:
    if ell < 1:
        raise DomainError("ell must be >= 1")
    return Fraction(sum(M.sorted_multiplicities[:ell]), M.n)


def enumerate_multiset_perms(M: Multiset, cap: int | None = None) -> Iterator[tuple[int, ...]]:
    """All words of ``M`` in lexicographic order."""
    cap = LIMITS.word_cap if cap is None else cap
    if M.n > cap:
        raise SizeLimitError(f"|M|={M.n} exceeds word enumeration cap {cap}")
    w = list(M.sorted_word())
    n = len(w)
    while True:
        yield tuple(w)
        i = n - 2
        while i >= 0 and w[i] >= w[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while w[j] <= w[i]:
            j -= 1
        w[i], w[j] = w[j], w[i]
        w[i + 1:] = reversed(w[i + 1:])


# ---------------------------------------------------------------------------
# Patterns


@dataclass(frozen=True)
class PermPattern:
    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if sorted(vals) != list(range(1, len(vals) + 1)):
            raise DomainError(f"{vals} is not a permutation of 1..{len(vals)}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def parse(cls, text: str) -> "PermPattern":
        text = text.strip()
        try:
            if "," in text:
                vals = tuple(int(t) for t in text.split(","))
            else:
                vals = tuple(int(c) for c in text)
            return cls(vals)
        except (ValueError, DomainError) as exc:
            raise ParseError(f"bad permutation pattern {text!r}") from exc

    def __str__(self) -> str:
        if len(self.values) <= 9:
            return "".join(map(str, self.values))
        return ",".join(map(str, self.values))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def inverse(self) -> tuple[int, ...]:
        inv = [0] * len(self.values)
        for pos, v in enumerate(self.values, 1):
            inv[v - 1] = pos
        return tuple(inv)


@dataclass(frozen=True)
class ArcPattern:
    """A set of arcs on ``[length]`` with distinct starts and distinct ends."""

    arcs: tuple[tuple[int, int], ...]
    length: int

    def __post_init__(self):
        arcs = tuple(sorted((int(i), int(j)) for i, j in self.arcs))
        if len(set(arcs)) != len(arcs):
            raise DomainError("repeated arc")
        for i, j in arcs:
            if not 1 <= i < j <= self.length:
                raise DomainError(f"arc ({i},{j}) not inside [1,{self.length}]")
        starts = [i for i, _ in arcs]
        ends = [j for _, j in arcs]
        if len(set(starts)) != len(starts) or len(set(ends)) != len(ends):
            raise DomainError("arcs of a pattern need distinct starts and distinct ends")
        object.__setattr__(self, "arcs", arcs)

    @classmethod
    def of(cls, arcs: Iterable[tuple[int, int]], length: int | None = None) -> "ArcPattern":
        arcs = tuple(arcs)
        if length is None:
            length = max((j for _, j in arcs), default=1)
        return cls(arcs, length)

    @classmethod
    def parse(cls, text: str, length: int | None = None) -> "ArcPattern":
        text = text.strip()
        arcs = []
        if text:
            for token in text.replace(" ", "").split(","):
                m = re.fullmatch(r"(\d+)-(\d+)", token)
                if m is None:
                    raise ParseError(f"bad arc {token!r}")
                arcs.append((int(m.group(1)), int(m.group(2))))
        try:
            return cls.of(arcs, length)
        except DomainError as exc:
            raise ParseError(str(exc)) from exc

    def __str__(self) -> str:
        return ",".join(f"{i}-{j}" for i, j in self.arcs)

    @property
    def arc_count(self) -> int:
        return len(self.arcs)

    def gap_overlaps(self) -> tuple[int, ...]:
        """Number of arcs strictly above each segment ``[i-1, i]``; entry 0 is 0."""
        return tuple(
            sum(1 for s, e in self.arcs if s <= i - 1 and e >= i) if i > 1 else 0
            for i in range(1, self.length + 1)
        )

    def point_overlaps(self) -> tuple[int, ...]:
        """Number of arcs passing strictly over each point of ``[length]``."""
        return tuple(
            sum(1 for s, e in self.arcs if s < g < e) for g in range(1, self.length + 1)
        )

    @property
    def ends(self) -> frozenset[int]:
        return frozenset(j for _, j in self.arcs)


# ---------------------------------------------------------------------------
# Set partitions


@dataclass(frozen=True)
class SetPartition:
    """A set partition of ``[n]``; blocks are stored sorted, by minimum."""

    blocks: tuple[tuple[int, ...], ...]
    n: int = field(default=-1)

    def __post_init__(self):
        blocks = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        if any(len(b) == 0 for b in blocks):
            raise DomainError("empty block")
        elems = [x for b in blocks for x in b]
        n = len(elems) if self.n < 0 else self.n
        if sorted(elems) != list(range(1, n + 1)):
            raise DomainError(f"blocks do not partition [1,{n}]")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "n", n)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "SetPartition":
        """Group positions ``1..n`` by equal labels (urn index, RGS letter, ...)."""
        groups: dict[int, list[int]] = {}
        for pos, lab in enumerate(labels, 1):
            groups.setdefault(lab, []).append(pos)
        return cls(tuple(tuple(g) for g in groups.values()), len(labels))

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> "SetPartition":
        nxt = [0] * (n + 1)
        has_prev = [False] * (n + 1)
        for i, j in arcs:
            if not 1 <= i < j <= n or nxt[i] or has_prev[j]:
                raise DomainError(f"invalid arc set for n={n}")
            nxt[i] = j
            has_prev[j] = True
        blocks = []
        for start in range(1, n + 1):
            if has_prev[start]:
                continue
            block = [start]
            while nxt[block[-1]]:
                block.append(nxt[block[-1]])
            blocks.append(tuple(block))
        return cls(tuple(blocks), n)

    @classmethod
    def parse(cls, text: str) -> "SetPartition":
        text = text.replace(" ", "")
        if not re.fullmatch(r"(\{\d+(,\d+)*\})+", text):
            raise ParseError(f"bad set partition {text!r}")
        blocks = [tuple(int(x) for x in b.split(",")) for b in re.findall(r"\{([^}]*)\}", text)]
        try:
            return cls(tuple(blocks))
        except DomainError as exc:
            raise ParseError(str(exc)) from exc

    def __str__(self) -> str:
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def arcs(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted((b[t], b[t + 1]) for b in self.blocks for t in range(len(b) - 1)))

    def next_array(self) -> list[int]:
        """``nxt[i]`` is the arc end from ``i`` (0 if none); index 0 unused."""
        nxt = [0] * (self.n + 1)
        for b in self.blocks:
            for t in range(len(b) - 1):
                nxt[b[t]] = b[t + 1]
        return nxt

    def rgs(self) -> tuple[int, ...]:
        """Restricted growth string (block index of each element, from 0)."""
        out = [0] * self.n
        for k, b in enumerate(self.blocks):
            for x in b:
                out[x - 1] = k
        return tuple(out)


def arcs_of(pi: SetPartition) -> list[tuple[int, int]]:
    return list(pi.arcs)


def enumerate_set_partitions(n: int, cap: int | None = None) -> Iterator[SetPartition]:
    """All set partitions of ``[n]``, lexicographic in restricted growth strings."""
    cap = LIMITS.partition_cap if cap is None else cap
    if n < 0:
        raise DomainError("n must be >= 0")
    if n > cap:
        raise SizeLimitError(f"n={n} exceeds partition enumeration cap {cap}")
    for rgs in _restricted_growth_strings(n):
        yield SetPartition.from_labels(rgs)


def _restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    a = [0] * n
    b = [1] * n  # b[i] = 1 + max(a[:i])
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0 and a[i] == b[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for t in range(i + 1, n):
            a[t] = 0
            b[t] = max(b[i], a[i] + 1)


_BELL = [1]
_bell_row = [1]  # current row of the Bell triangle; its first entry is _BELL[-1]


def bell_number(n: int) -> int:
    """Exact Bell number from the Bell triangle."""
    global _bell_row
    if n < 0:
        raise DomainError("n must be >= 0")
    while len(_BELL) <= n:
        row = [_bell_row[-1]]
        for x in _bell_row:
            row.append(row[-1] + x)
        _bell_row = row
        _BELL.append(row[0])
    return _BELL[n]


# ---------------------------------------------------------------------------
# Partition lattice


def mobius_partition_lattice(pi: SetPartition) -> int:
    """mu(pi, 1) on the lattice of set partitions of ``[r]``."""
    k = len(pi.blocks)
    if pi.n <= 5:
        _check_mobius_closed_form()
    return (-1) ** (k - 1) * factorial(k - 1)


def mobius_by_recursion(pi: SetPartition) -> int:
    """mu(pi, 1) from mu(1,1) = 1 and the sum over the interval [pi, 1] vanishing."""
    return _mobius_rec(pi.blocks)


@lru_cache(maxsize=None)
def _mobius_rec(blocks: tuple[tuple[int, ...], ...]) -> int:
    if len(blocks) == 1:
        return 1
    total = 0
    for coarser in _strict_coarsenings(blocks):
        total += _mobius_rec(coarser)
    return -total


def _strict_coarsenings(blocks):
    """All partitions strictly coarser than ``blocks`` (merging blocks)."""
    k = len(blocks)
    seen = set()
    for grouping in _restricted_growth_strings(k):
        if max(grouping) + 1 == k:
            continue
        merged: dict[int, list[int]] = {}
        for b, g in zip(blocks, grouping):
            merged.setdefault(g, []).extend(b)
        key = tuple(sorted(tuple(sorted(v)) for v in merged.values()))
        if key not in seen:
            seen.add(key)
            yield key


_MOBIUS_CHECKED = False


def _check_mobius_closed_form() -> None:
    global _MOBIUS_CHECKED
    if _MOBIUS_CHECKED:
        return
    for r in range(1, 6):
        for pi in enumerate_set_partitions(r):
            k = len(pi.blocks)
            if mobius_by_recursion(pi) != (-1) ** (k - 1) * factorial(k - 1):
                raise AssertionError(f"Moebius closed form disagrees with recursion at {pi}")
    _MOBIUS_CHECKED = True


def set_partitions_of(items: Sequence) -> Iterator[list[list]]:
    """Set partitions of an arbitrary finite sequence, as lists of lists."""
    for rgs in _restricted_growth_strings(len(items)):
        groups: dict[int, list] = {}
        for x, g in zip(items, rgs):
            groups.setdefault(g, []).append(x)
        yield list(groups.values())
