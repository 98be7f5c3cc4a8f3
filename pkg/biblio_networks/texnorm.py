"""Normalisation of TeX-encoded characters in record text.

ZB records spell the same accented letter in several ways (``\\u{a}``,
``\\u a``, ``{\\u a}``).  :class:`TexNormTable` compiles the editable rule file
``data/tex_rules.json`` into an ordered list of regular-expression rules that
map every spelling to one Unicode character.
"""

from __future__ import annotations

import json
import logging
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .constants import TEX_RULES_FILE

logger = logging.getLogger(__name__)

LETTER = r"[^\W\d_]"
_BRACED_LETTER = re.compile(r"\{(" + LETTER + r")\}")
_LEFTOVER_MACRO = re.compile(r"\\([A-Za-z]+|[^A-Za-z\s])")


@dataclass(frozen=True)
class TexRule:
    pattern: re.Pattern
    replacement: str


@dataclass(frozen=True)
class TexNormTable:
    rules: Tuple[TexRule, ...]

    def __len__(self) -> int:
        return len(self.rules)


def _letter_rules(letters: Dict[str, str]) -> List[TexRule]:
    rules = []
    # longer macro names first so ``\oe`` is never read as ``\o`` + ``e``
    for name in sorted(letters, key=lambda n: (-len(n), n)):
        pattern = re.compile(
            r"\\" + re.escape(name) + r"(?![A-Za-z])(?:\{\}|[ \t]+)?"
        )
        rules.append(TexRule(pattern, letters[name].replace("\\", r"\\")))
    return rules


def _accent_rules(accents: Dict[str, str]) -> List[TexRule]:
    rules = []
    for name, mark in accents.items():
        macro = r"\\" + re.escape(name)
        braced = re.compile(macro + r"\s*\{\s*(" + LETTER + r")\s*\}")
        if name.isalpha():
            # ``\u a``: a letter macro needs whitespace before its argument
            unbraced = re.compile(macro + r"\s+(" + LETTER + r")")
        else:
            unbraced = re.compile(macro + r"\s*(" + LETTER + r")")
        rules.append(TexRule(braced, r"\g<1>" + mark))
        rules.append(TexRule(unbraced, r"\g<1>" + mark))
    return rules


def build_table(accents: Dict[str, str], letters: Dict[str, str]) -> TexNormTable:
    """Compile accent and letter macros into an ordered rule table.

    Letter macros come first so an accent over ``\\i`` sees a plain ``i``.
    The last rule strips braces left around a single letter.
    """
    rules = _letter_rules(letters) + _accent_rules(accents)
    rules.append(TexRule(_BRACED_LETTER, r"\g<1>"))
    return TexNormTable(tuple(rules))


def load_table(path: Path | str | None = None) -> TexNormTable:
    """Load the rule file, defaulting to the packaged ``tex_rules.json``."""
    path = Path(path) if path is not None else TEX_RULES_FILE
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    table = build_table(data.get("accents", {}), data.get("letters", {}))
    logger.debug("Loaded %d TeX rules from %s", len(table), path)
    return table


_DEFAULT_TABLE: Optional[TexNormTable] = None


def default_table() -> TexNormTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = load_table()
    return _DEFAULT_TABLE


def normalize_tex(s: str, norm: TexNormTable | None = None,
                  tally: Optional[Counter] = None) -> str:
    """Replace every TeX accent spelling in ``s`` by its Unicode character.

    Rules are applied until nothing changes; every rule shortens the string,
    so the loop ends and the result is a fixed point of the table.  Unknown
    macros are left verbatim and counted in ``tally`` when one is given.
    """
    if "\\" not in s and "{" not in s:
        return unicodedata.normalize("NFC", s)
    norm = norm or default_table()
    current = s
    while True:
        previous = current
        for rule in norm.rules:
            current = rule.pattern.sub(rule.replacement, current)
        # composing inside the loop lets ``{\'a}`` lose its braces too
        current = unicodedata.normalize("NFC", current)
        if current == previous:
            break
    if tally is not None:
        for match in _LEFTOVER_MACRO.finditer(current):
            tally["\\" + match.group(1)] += 1
    return current
