"""Tokenization shared by the parser, the embedder and the tagger.

Tokens are lowercased alphanumeric runs; a leading '#' is retained so tooth
notation like "#85" survives as a single token. Sentence boundary characters
('.' and ';') can optionally be emitted as marker tokens so downstream
negation scoping can see them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

_TOKEN_RE = re.compile(r"#?[A-Za-z0-9]+|[.;]")

BOUNDARY_TOKENS = frozenset({".", ";"})


@dataclass(frozen=True)
class Token:
    """A token with its half-open character span in the source text."""

    text: str
    start: int
    end: int


def load_abbreviations(path) -> dict[str, str]:
    """Read a two-column (abbrev TAB expansion) UTF-8 table.

    Keys are normalized to bare lowercase tokens so "periap." and "periap"
    both hit the same entry.
    """
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            abbrev, _, expansion = line.partition("\t")
            key = abbrev.strip().strip(".").lower()
            if key:
                table[key] = expansion.strip().lower()
    return table


def tokenize(
    text: str,
    abbreviations: Mapping[str, str] | None = None,
    keep_boundaries: bool = False,
) -> list[Token]:
    """Tokenize ``text``; spans always index the original string.

    Abbreviation expansion happens after tokenization, at token level; a
    multi-word expansion yields several tokens sharing the source span.
    """
    out: list[Token] = []
    for m in _TOKEN_RE.finditer(text):
        tok = m.group(0).lower()
        if tok in BOUNDARY_TOKENS:
            if keep_boundaries:
                out.append(Token(tok, m.start(), m.end()))
            continue
        if abbreviations and tok in abbreviations:
            for part in abbreviations[tok].split():
                out.append(Token(part, m.start(), m.end()))
        else:
            out.append(Token(tok, m.start(), m.end()))
    return out


def token_texts(tokens: list[Token]) -> list[str]:
    return [t.text for t in tokens]
