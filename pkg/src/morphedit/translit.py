"""Bidirectional Buckwalter / Arabic-script conversion.

The mapping lives in a checked-in two-column table (data/buckwalter.tsv) so
variant schemes can be swapped without code changes. Conversion never fails:
characters outside the table pass through unchanged and are reported as
warnings, since social-media text freely mixes in Latin letters, digits and
emoji. Whitespace passes through silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .errors import SchemaError

_TABLE_PATH = Path(__file__).parent / "data" / "buckwalter.tsv"


@dataclass(frozen=True)
class TranslitTable:
    """Bijective symbol table between Buckwalter ASCII and Arabic codepoints."""

    bw_to_ar: dict[str, str]
    ar_to_bw: dict[str, str]

    @property
    def bw_symbols(self) -> str:
        return "".join(self.bw_to_ar)

    @staticmethod
    def from_pairs(pairs: list[tuple[str, str]]) -> "TranslitTable":
        forward: dict[str, str] = {}
        backward: dict[str, str] = {}
        for bw, ar in pairs:
            if bw in forward:
                raise SchemaError(f"duplicate Buckwalter symbol: {bw!r}")
            if ar in backward:
                raise SchemaError(f"duplicate Arabic codepoint: {ar!r}")
            forward[bw] = ar
            backward[ar] = bw
        return TranslitTable(bw_to_ar=forward, ar_to_bw=backward)


def load_table(path: str | Path = _TABLE_PATH) -> TranslitTable:
    pairs: list[tuple[str, str]] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2 or len(cols[0]) != 1 or len(cols[1]) != 1:
            raise SchemaError(f"bad table row at line {lineno}: {line!r}")
        pairs.append((cols[0], cols[1]))
    return TranslitTable.from_pairs(pairs)


@lru_cache(maxsize=1)
def default_table() -> TranslitTable:
    return load_table()


@dataclass(frozen=True)
class TranslitResult:
    text: str
    warnings: tuple[str, ...] = ()


def _convert(text: str, mapping: dict[str, str]) -> TranslitResult:
    out = []
    unmapped: list[str] = []
    seen: set[str] = set()
    for ch in text:
        mapped = mapping.get(ch)
        if mapped is not None:
            out.append(mapped)
            continue
        out.append(ch)
        if not ch.isspace() and ch not in seen:
            seen.add(ch)
            unmapped.append(ch)
    warnings = tuple(f"unmapped character passed through: {ch!r}" for ch in unmapped)
    return TranslitResult(text="".join(out), warnings=warnings)


def bw_to_ar(text: str, table: TranslitTable | None = None) -> TranslitResult:
    """Buckwalter to Arabic script."""
    return _convert(text, (table or default_table()).bw_to_ar)


def ar_to_bw(text: str, table: TranslitTable | None = None) -> TranslitResult:
    """Arabic script to Buckwalter; inverse of bw_to_ar over the table domain."""
    return _convert(text, (table or default_table()).ar_to_bw)
