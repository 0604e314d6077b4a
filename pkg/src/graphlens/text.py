"""Keyword normalization shared by the index, query parsing and entity keys."""

from __future__ import annotations

import re
import unicodedata

# A token is a maximal run of letters or digits. Underscores and any other
# punctuation separate tokens.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Split text into normalized tokens.

    The pipeline is fixed: Unicode NFC, case fold, then split on every run
    of non-alphanumeric characters. Tokens keep their original order and
    duplicates are preserved.
    """
    folded = unicodedata.normalize("NFC", text).casefold()
    return _TOKEN_RE.findall(folded)


def normalize_keyword(word: str) -> str:
    """Normalize a single query keyword.

    Raises ValueError when the input normalizes to zero tokens or to more
    than one token; multi-word phrases are not supported as keywords.
    """
    tokens = tokenize(word)
    if len(tokens) != 1:
        raise ValueError(
            f"keyword must normalize to exactly one token, got {tokens!r} from {word!r}"
        )
    return tokens[0]


def normalize_key(text: str) -> str:
    """Collapse text to a canonical key: its tokens joined by single spaces."""
    return " ".join(tokenize(text))
