"""Quantitative sequence data model, file parsing and definitional utilities.

Utilities are fixed-point integers at ``SCALE`` units per currency unit, so
``94`` dollars is stored as ``940000``.  Everything in this module is the
slow, obviously-correct semantics that the fast paths are checked against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

SCALE = 10_000


class ParseError(ValueError):
    """Raised for malformed profit, database or result files."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# --- fixed-point helpers ----------------------------------------------------


def to_fixed(text: str) -> int:
    """Convert a decimal string to fixed-point, refusing anything inexact."""
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise ValueError(f"not a decimal number: {text!r}") from None
    if not value.is_finite():
        raise ValueError(f"not a finite number: {text!r}")
    scaled = value * SCALE
    if scaled != scaled.to_integral_value():
        raise ValueError(f"{text!r} has more than 4 decimal places")
    return int(scaled)


def format_fixed(value: int) -> str:
    """Render a fixed-point value as a decimal with trailing zeros trimmed."""
    sign = "-" if value < 0 else ""
    whole, frac = divmod(abs(value), SCALE)
    if frac == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:04d}".rstrip("0")


def min_util_from_ratio(ratio: Fraction | Decimal | float | str, total_utility: int) -> int:
    """Smallest fixed-point utility that satisfies ``u >= ratio * total``.

    The product is rounded up, so no pattern below the exact real threshold
    is admitted.
    """
    if isinstance(ratio, float):
        ratio = str(ratio)
    frac = Fraction(ratio)
    if frac <= 0:
        raise ValueError("minimum utility ratio must be positive")
    product = frac * total_utility
    return -((-product.numerator) // product.denominator)


# --- data types -------------------------------------------------------------


@dataclass(frozen=True)
class ProfitTable:
    """Unit profit per item-id, in fixed-point."""

    entries: Mapping[int, int]

    def __post_init__(self):
        for item, profit in self.entries.items():
            if item < 1:
                raise ValueError(f"item-id must be positive, got {item}")
            if profit <= 0:
                raise ValueError(f"profit of item {item} must be positive")

    def __getitem__(self, item: int) -> int:
        return self.entries[item]

    def __contains__(self, item: int) -> bool:
        return item in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def render(self) -> str:
        return "".join(f"{i} {format_fixed(p)}\n" for i, p in sorted(self.entries.items()))


class QItem(NamedTuple):
    item: int
    quantity: int


QItemset = tuple  # tuple[QItem, ...], item-ids strictly increasing


@dataclass(frozen=True)
class QSequence:
    sid: int
    itemsets: tuple[tuple[QItem, ...], ...]
    utilities: tuple[tuple[int, ...], ...]
    total_utility: int
    flat_length: int

    @classmethod
    def build(cls, sid: int, itemsets: Sequence[Sequence[QItem]], profits: ProfitTable) -> "QSequence":
        if not itemsets:
            raise ValueError("a q-sequence needs at least one itemset")
        frozen = []
        utils = []
        for itemset in itemsets:
            if not itemset:
                raise ValueError("empty itemset")
            prev = 0
            row = []
            for item, qty in itemset:
                if item <= prev:
                    raise ValueError(
                        f"itemset items must be strictly increasing, got {item} after {prev}"
                    )
                if qty < 1:
                    raise ValueError(f"quantity of item {item} must be >= 1")
                if item not in profits:
                    raise ValueError(f"unknown item-id {item}")
                row.append(qty * profits[item])
                prev = item
            frozen.append(tuple(QItem(i, q) for i, q in itemset))
            utils.append(tuple(row))
        total = sum(sum(row) for row in utils)
        return cls(sid, tuple(frozen), tuple(utils), total, sum(len(v) for v in frozen))

    def itemset_utility(self, k: int) -> int:
        return sum(self.utilities[k])

    def flat(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(itemset index, item, utility)`` in sequence order."""
        for k, (itemset, utils) in enumerate(zip(self.itemsets, self.utilities)):
            for qi, u in zip(itemset, utils):
                yield k, qi.item, u

    def render(self) -> str:
        parts = []
        for itemset in self.itemsets:
            parts.append(" ".join(f"{i}:{q}" for i, q in itemset))
        return " -1 ".join(parts) + " -2"


@dataclass(frozen=True)
class QSeqDatabase:
    sequences: tuple[QSequence, ...]
    profits: ProfitTable
    total_utility: int = field(init=False)
    item_index: Mapping[int, tuple[int, ...]] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "total_utility", sum(s.total_utility for s in self.sequences))
        index: dict[int, list[int]] = {}
        for s in self.sequences:
            seen = set()
            for itemset in s.itemsets:
                for qi in itemset:
                    if qi.item not in seen:
                        seen.add(qi.item)
                        index.setdefault(qi.item, []).append(s.sid)
        object.__setattr__(
            self, "item_index", {i: tuple(index[i]) for i in sorted(index)}
        )

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self) -> Iterator[QSequence]:
        return iter(self.sequences)

    @property
    def items(self) -> list[int]:
        """Distinct item-ids occurring in the database, ascending."""
        return list(self.item_index)

    def by_sid(self, sid: int) -> QSequence:
        for s in self.sequences:
            if s.sid == sid:
                return s
        raise KeyError(sid)

    def render(self) -> str:
        return "".join(s.render() + "\n" for s in self.sequences)


@dataclass(frozen=True, order=False)
class Pattern:
    """A sequence of itemsets without quantities."""

    itemsets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.itemsets:
            raise ValueError("a pattern needs at least one itemset")
        for w in self.itemsets:
            if not w or any(a >= b for a, b in zip(w, w[1:])):
                raise ValueError(f"pattern itemset {w} must be non-empty and strictly increasing")

    @classmethod
    def of(cls, *itemsets: Iterable[int]) -> "Pattern":
        return cls(tuple(tuple(w) for w in itemsets))

    @classmethod
    def parse(cls, text: str) -> "Pattern":
        """Parse ``"1 3 -1 2 -2"`` style text (the trailing ``-2`` is optional)."""
        itemsets: list[tuple[int, ...]] = []
        current: list[int] = []
        for tok in text.split():
            v = int(tok)
            if v == -2:
                break
            if v == -1:
                if current:
                    itemsets.append(tuple(current))
                current = []
            elif v > 0:
                current.append(v)
            else:
                raise ValueError(f"bad pattern token {tok!r}")
        if current:
            itemsets.append(tuple(current))
        return cls(tuple(itemsets))

    @property
    def length(self) -> int:
        return sum(len(w) for w in self.itemsets)

    @property
    def last_item(self) -> int:
        return self.itemsets[-1][-1]

    def i_extend(self, item: int) -> "Pattern":
        return Pattern(self.itemsets[:-1] + (self.itemsets[-1] + (item,),))

    def s_extend(self, item: int) -> "Pattern":
        return Pattern(self.itemsets + ((item,),))

    def sort_key(self):
        return (len(self.itemsets), self.itemsets)

    def render(self) -> str:
        return " -1 ".join(" ".join(map(str, w)) for w in self.itemsets) + " -2"

    def pretty(self, letters: bool = False) -> str:
        name = _letter if letters else str
        return "<" + ",".join("[" + "".join(name(i) for i in w) + "]" for w in self.itemsets) + ">"

    def __str__(self) -> str:
        return self.pretty()


def _letter(item: int) -> str:
    return chr(ord("a") + item - 1) if 1 <= item <= 26 else f"({item})"


MatchVector = tuple  # tuple[int, ...] of 1-based global positions


@dataclass(frozen=True)
class HUSPResult:
    pattern: Pattern
    utility: int

    def render(self) -> str:
        return f"{self.pattern.render()} #UTIL: {format_fixed(self.utility)}"


# --- parsing ----------------------------------------------------------------


def _lines(text: str | Iterable[str]) -> Iterator[tuple[int, str]]:
    if isinstance(text, str):
        text = text.splitlines()
    for n, line in enumerate(text, 1):
        line = line.strip()
        if line and not line.startswith("#"):
            yield n, line


def parse_profit_table(text: str | Iterable[str]) -> ProfitTable:
    """Parse ``<item-id> <decimal-profit>`` lines."""
    entries: dict[int, int] = {}
    for n, line in _lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected '<item> <profit>', got {line!r}", n)
        try:
            item = int(parts[0])
            profit = to_fixed(parts[1])
        except ValueError as exc:
            raise ParseError(str(exc), n) from None
        if item < 1:
            raise ParseError(f"item-id must be positive, got {item}", n)
        if profit <= 0:
            raise ParseError(f"profit of item {item} must be positive", n)
        if item in entries:
            raise ParseError(f"duplicate item-id {item}", n)
        entries[item] = profit
    return ProfitTable(entries)


def parse_sequence_line(line: str, sid: int, profits: ProfitTable) -> QSequence:
    itemsets: list[list[QItem]] = []
    current: list[QItem] = []
    terminated = False
    for tok in line.split():
        if terminated:
            raise ValueError(f"token {tok!r} after -2")
        if tok == "-1":
            if not current:
                raise ValueError("empty itemset")
            itemsets.append(current)
            current = []
        elif tok == "-2":
            if current:
                itemsets.append(current)
            current = []
            terminated = True
        else:
            item_s, sep, qty_s = tok.partition(":")
            if not sep:
                raise ValueError(f"expected '<item>:<qty>', got {tok!r}")
            try:
                item, qty = int(item_s), int(qty_s)
            except ValueError:
                raise ValueError(f"expected '<item>:<qty>', got {tok!r}") from None
            current.append(QItem(item, qty))
    if not terminated:
        raise ValueError("missing -2 terminator")
    return QSequence.build(sid, itemsets, profits)


def parse_database(text: str | Iterable[str], profits: ProfitTable) -> QSeqDatabase:
    """Parse one q-sequence per line; sids are assigned 1..n in file order."""
    sequences = []
    for n, line in _lines(text):
        try:
            sequences.append(parse_sequence_line(line, len(sequences) + 1, profits))
        except ValueError as exc:
            raise ParseError(str(exc), n) from None
    return QSeqDatabase(tuple(sequences), profits)


def load_database(db_path, profits_path) -> QSeqDatabase:
    with open(profits_path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        profits = parse_profit_table(text)
    except ParseError as exc:
        raise ParseError(f"{profits_path}: {exc}") from None
    with open(db_path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_database(text, profits)
    except ParseError as exc:
        raise ParseError(f"{db_path}: {exc}") from None


def parse_results(text: str | Iterable[str]) -> list[HUSPResult]:
    """Read back a result file written by ``render_results``."""
    out = []
    for n, line in _lines(text):
        pat, sep, util = line.partition("#UTIL:")
        if not sep:
            raise ParseError("missing '#UTIL:'", n)
        try:
            out.append(HUSPResult(Pattern.parse(pat), to_fixed(util.strip())))
        except ValueError as exc:
            raise ParseError(str(exc), n) from None
    return out


def render_results(results: Iterable[HUSPResult]) -> str:
    return "".join(r.render() + "\n" for r in results)


def sort_results(results: Iterable[HUSPResult]) -> list[HUSPResult]:
    return sorted(results, key=lambda r: r.pattern.sort_key())


# --- definitional semantics -------------------------------------------------


def _itemset_offsets(s: QSequence) -> list[int]:
    offsets = []
    pos = 1
    for itemset in s.itemsets:
        offsets.append(pos)
        pos += len(itemset)
    return offsets


def find_matches(t: Pattern, s: QSequence) -> list[MatchVector]:
    """Every way ``t`` embeds into ``s``, as tuples of 1-based positions.

    Exponential in the worst case; meant for checking, not mining.
    """
    offsets = _itemset_offsets(s)
    # per itemset: item -> position
    where = [
        {qi.item: offsets[k] + j for j, qi in enumerate(itemset)}
        for k, itemset in enumerate(s.itemsets)
    ]
    out: list[MatchVector] = []

    def rec(j: int, k0: int, acc: tuple[int, ...]):
        if j == len(t.itemsets):
            out.append(acc)
            return
        w = t.itemsets[j]
        for k in range(k0, len(s.itemsets)):
            positions = where[k]
            if all(i in positions for i in w):
                rec(j + 1, k + 1, acc + tuple(positions[i] for i in w))

    rec(0, 0, ())
    return out


def flat_utilities(s: QSequence) -> list[int]:
    """Utilities in flattened order, index 0 is position 1."""
    return [u for row in s.utilities for u in row]


def match_utility(s: QSequence, match: MatchVector) -> int:
    flat = flat_utilities(s)
    return sum(flat[p - 1] for p in match)


def naive_sequence_utility(t: Pattern, s: QSequence) -> int:
    """Maximum utility over all matches of ``t`` in ``s`` (0 if none)."""
    flat = flat_utilities(s)
    return max((sum(flat[p - 1] for p in m) for m in find_matches(t, s)), default=0)


def naive_pattern_utility(t: Pattern, db: QSeqDatabase | Iterable[QSequence]) -> int:
    return sum(naive_sequence_utility(t, s) for s in db)
