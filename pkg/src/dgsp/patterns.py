"""Positional sequential patterns and ranked pattern lists.

A pattern of length l is a tuple of l + 1 non-empty, sorted tuples of item
ids. A transaction sequence contains a pattern when every positional itemset
is a subset of the transaction at the same position; there are no gaps.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

Itemset = tuple[int, ...]
Pattern = tuple[Itemset, ...]

EXACT_FREQUENCY = "exact-frequency"
ESTIMATED_FREQUENCY = "estimated-frequency"
WEIGHTED_SUPPORT = "weighted-support"
SCORE_KINDS = (EXACT_FREQUENCY, ESTIMATED_FREQUENCY, WEIGHTED_SUPPORT)

_ITEMSET_RE = re.compile(r"\(([^()]*)\)")


def make_pattern(itemsets: Iterable[Iterable[int]]) -> Pattern:
    pattern = tuple(tuple(sorted(set(x))) for x in itemsets)
    if not pattern or any(len(x) == 0 for x in pattern):
        raise ValueError("every positional itemset of a pattern must be non-empty")
    return pattern


def is_subset(small: Sequence[int], big: Sequence[int]) -> bool:
    """Merge-scan subset test for two strictly increasing sequences."""
    if len(small) > len(big):
        return False
    j = 0
    n = len(big)
    for x in small:
        while j < n and big[j] < x:
            j += 1
        if j == n or big[j] != x:
            return False
        j += 1
    return True


def contains(sequence: Sequence[Sequence[int]], pattern: Pattern) -> bool:
    """True iff each itemset of ``pattern`` is a subset of the aligned transaction."""
    if len(sequence) != len(pattern):
        raise ValueError(
            f"length mismatch: sequence has {len(sequence)} positions, pattern has {len(pattern)}"
        )
    return all(is_subset(x, t) for x, t in zip(pattern, sequence))


def canonical_key(pattern: Pattern) -> tuple:
    """Tie-break order: position by position, smaller itemsets first, then by ids."""
    return tuple((len(x), x) for x in pattern)


def format_pattern(pattern: Pattern, item_names: Sequence[str]) -> str:
    return "".join("(" + ",".join(item_names[i] for i in x) + ")" for x in pattern)


def parse_pattern_text(text: str) -> tuple[frozenset[str], ...]:
    """Parse ``(a,b)(c)`` into a tuple of item-name sets.

    Name sets rather than id tuples so that patterns read from two files
    compare equal regardless of the item order either writer used.
    """
    groups = _ITEMSET_RE.findall(text)
    if not groups or "".join(f"({g})" for g in groups) != text.replace(" ", ""):
        raise ValueError(f"malformed pattern text {text!r}")
    out = []
    for g in groups:
        names = [s.strip() for s in g.split(",") if s.strip()]
        if not names:
            raise ValueError(f"empty itemset in pattern {text!r}")
        out.append(frozenset(names))
    return tuple(out)


@dataclass(frozen=True)
class RankedEntry:
    rank: int
    pattern: object
    support: int
    freq: float | Fraction | None


@dataclass
class RankedPatterns:
    """Ranked list of patterns.

    ``support`` is the count of containing records for exact results and the
    summed path weight of containing sample records for sampled results.
    ``freq`` is the exact or estimated frequency.
    """

    entries: list[RankedEntry]
    score_kind: str
    item_names: tuple[str, ...] | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.score_kind not in SCORE_KINDS:
            raise ValueError(f"unknown score kind {self.score_kind!r}")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[RankedEntry]:
        return iter(self.entries)

    @property
    def patterns(self) -> list:
        return [e.pattern for e in self.entries]

    def scores(self) -> list:
        if self.score_kind == WEIGHTED_SUPPORT:
            return [e.support for e in self.entries]
        return [e.freq for e in self.entries]

    def frequencies(self) -> dict:
        return {e.pattern: e.freq for e in self.entries if e.freq is not None}

    def text_patterns(self) -> list[str]:
        return [self._text(e.pattern) for e in self.entries]

    def _text(self, pattern) -> str:
        if isinstance(pattern, str):
            return pattern
        if self.item_names is None:
            raise ValueError("item names are required to render id-based patterns")
        return format_pattern(pattern, self.item_names)

    def to_rows(self) -> list[dict]:
        rows = []
        for e in self.entries:
            rows.append(
                {
                    "rank": e.rank,
                    "pattern": self._text(e.pattern),
                    "support": e.support,
                    "freq": None if e.freq is None else float(e.freq),
                }
            )
        return rows

    def to_json(self) -> str:
        return json.dumps(self.to_rows(), indent=1) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["rank", "pattern", "support", "freq"], lineterminator="\n")
        writer.writeheader()
        for row in self.to_rows():
            if row["freq"] is None:
                row["freq"] = ""
            else:
                row["freq"] = repr(row["freq"])
            writer.writerow(row)
        return buf.getvalue()


def _entry_from_row(row: dict, where: str) -> RankedEntry:
    try:
        rank = int(row["rank"])
        text = str(row["pattern"])
        support = row.get("support")
        support = None if support in (None, "") else int(support)
        freq = row.get("freq")
        freq = None if freq in (None, "") else float(freq)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{where}: bad ranked-pattern row {row!r}: {exc}") from exc
    return RankedEntry(rank=rank, pattern=parse_pattern_text(text), support=support, freq=freq)


def load_ranked(text: str, where: str = "<input>") -> RankedPatterns:
    """Read a ranked-pattern file (JSON array or CSV) into name-set patterns."""
    stripped = text.lstrip()
    if stripped.startswith("["):
        try:
            rows = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{where}: invalid JSON: {exc}") from exc
        if not all(isinstance(r, dict) for r in rows):
            raise ValueError(f"{where}: expected an array of objects")
    else:
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None or not {"rank", "pattern"} <= set(reader.fieldnames):
            raise ValueError(f"{where}: CSV needs at least 'rank' and 'pattern' columns")
        rows = list(reader)
    entries = [_entry_from_row(r, where) for r in rows]
    ranks = [e.rank for e in entries]
    if ranks != list(range(1, len(entries) + 1)):
        raise ValueError(f"{where}: ranks must be consecutive from 1")
    return RankedPatterns(entries=entries, score_kind=ESTIMATED_FREQUENCY)
