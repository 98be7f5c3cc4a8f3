"""Parse ZB field-tagged bibliographic records.

A record starts at a line beginning with ``an`` and lists fields as
``<tag>  <value>`` lines; lines starting with whitespace continue the previous
field.  Parsing never raises: problems become :class:`ParseWarning` values.
"""

from __future__ import annotations

import io
import logging
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .constants import FIELD_ORDER, MISSING_TOKEN, YEAR_MAX, YEAR_MIN
from .texnorm import TexNormTable, default_table, normalize_tex

logger = logging.getLogger(__name__)

KNOWN_TAGS = frozenset(FIELD_ORDER)

_FIELD_LINE = re.compile(r"^([a-z]{2})(?:[ \t]+(.*))?$")
_MSC_CODE = re.compile(r"^\d{2}[-A-Za-z](?:\d{2}|xx|XX)$")
_ISSN = re.compile(r"\b\d{4}-\d{3}[\dXx]\b")
_SE_SEPARATOR = re.compile(r"\t+| {2,}")
_CC_SEPARATOR = re.compile(r"[;\s]+")

Source = Union[bytes, str, IO[bytes], IO[str]]


@dataclass(frozen=True)
class RawField:
    tag: str
    value: str


@dataclass(frozen=True)
class MscCode:
    code: str
    primary: bool = False


@dataclass(frozen=True)
class JournalDescriptor:
    zb_id: str
    full_title: str = ""
    short_title: str = ""
    issns: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Record:
    """One work.  ``None`` in the author lists is the MISSING marker."""

    id: str
    authors_unified: Tuple[Optional[str], ...] = ()
    authors_full: Tuple[Optional[str], ...] = ()
    year: Optional[int] = None
    msc_codes: Tuple[MscCode, ...] = ()
    title: Optional[str] = None
    keywords_raw: Tuple[str, ...] = ()
    issns: Tuple[str, ...] = ()
    source: Optional[str] = None
    journal: Optional[JournalDescriptor] = None
    extra: Tuple[RawField, ...] = ()


@dataclass(frozen=True)
class ParseWarning:
    category: str
    line: int
    work_id: Optional[str]
    message: str


@dataclass
class _Block:
    line: int
    fields: List[Tuple[str, str, int]] = field(default_factory=list)


def _read_text(source: Source, encoding: str) -> str:
    if isinstance(source, bytes):
        return source.decode(encoding, errors="replace")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode(encoding, errors="replace")
    return data


def _split_blocks(text: str, warnings: List[ParseWarning]) -> Iterator[_Block]:
    block: Optional[_Block] = None
    orphan_reported = False
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if line[0] in " \t":
            if block is not None and block.fields:
                tag, value, start = block.fields[-1]
                joined = f"{value} {line.strip()}" if value else line.strip()
                block.fields[-1] = (tag, joined, start)
            continue
        match = _FIELD_LINE.match(line)
        if match is None:
            warnings.append(ParseWarning(
                "malformed_line", lineno, None, f"not a field line: {line[:40]!r}"
            ))
            continue
        tag, value = match.group(1), (match.group(2) or "").strip()
        if tag == "an":
            if block is not None:
                yield block
            block = _Block(lineno)
            orphan_reported = False
        elif block is None:
            if not orphan_reported:
                warnings.append(ParseWarning(
                    "malformed_record", lineno, None,
                    f"field '{tag}' before any 'an' line; skipped to next record",
                ))
                orphan_reported = True
            continue
        block.fields.append((tag, value, lineno))
    if block is not None:
        yield block


def _split_list(value: str) -> List[str]:
    return [part.strip() for part in value.split(";") if part.strip()]


def _author_slot(token: str) -> Optional[str]:
    return None if token == MISSING_TOKEN else token


def _parse_msc(value: str, work_id: str, line: int,
               warnings: List[ParseWarning]) -> List[MscCode]:
    codes = []
    for token in _CC_SEPARATOR.split(value):
        if not token:
            continue
        primary = token[0] in "*⋆"
        code = token.lstrip("*⋆")
        if not _MSC_CODE.match(code):
            warnings.append(ParseWarning(
                "invalid_msc", line, work_id, f"not an MSC code: {token!r}"
            ))
            continue
        tail = code[3:]
        code = code[:2] + code[2].upper() + (tail.lower() if tail.lower() == "xx" else tail)
        codes.append(MscCode(code, primary))
    return codes


def _parse_year(value: str, work_id: str, line: int,
                warnings: List[ParseWarning]) -> Optional[int]:
    try:
        year = int(value.strip())
    except ValueError:
        warnings.append(ParseWarning("invalid_year", line, work_id, f"not a year: {value!r}"))
        return None
    if not YEAR_MIN <= year <= YEAR_MAX:
        warnings.append(ParseWarning(
            "invalid_year", line, work_id, f"year {year} outside [{YEAR_MIN}, {YEAR_MAX}]"
        ))
        return None
    return year


def parse_journal(value: str) -> Optional[JournalDescriptor]:
    """Split an ``se`` value into zb-id, full title, short title and ISSNs."""
    parts = [p.strip() for p in _SE_SEPARATOR.split(value.strip()) if p.strip()]
    if not parts:
        return None
    if len(parts) == 1:
        head, _, rest = parts[0].partition(" ")
        issns = tuple(_ISSN.findall(rest))
        title = " ".join(_ISSN.sub(" ", rest).split())
        words = title.split()
        half = len(words) // 2
        if words and len(words) % 2 == 0 and words[:half] == words[half:]:
            title = " ".join(words[:half])
        return JournalDescriptor(head, title, title, issns)
    zb_id, rest = parts[0], parts[1:]
    issns: List[str] = []
    titles: List[str] = []
    for part in rest:
        found = _ISSN.findall(part)
        if found and _ISSN.sub("", part).strip() == "":
            issns.extend(found)
        else:
            titles.append(part)
    full = titles[0] if titles else ""
    short = titles[1] if len(titles) > 1 else full
    return JournalDescriptor(zb_id, full, short, tuple(issns))


def _build_record(block: _Block, norm: TexNormTable, tally: Counter,
                  warnings: List[ParseWarning]) -> Optional[Record]:
    values: Dict[str, Tuple[str, int]] = {}
    extra: List[RawField] = []
    for tag, value, line in block.fields:
        if tag not in {"an", "py", "cc"}:
            value = normalize_tex(value, norm, tally)
        if tag not in KNOWN_TAGS:
            warnings.append(ParseWarning(
                "unknown_tag", line, None, f"unknown tag '{tag}' kept as pass-through"
            ))
            extra.append(RawField(tag, value))
            continue
        if tag in values and tag != "an":
            # a repeated tag continues the list it started
            prev, start = values[tag]
            sep = "; " if tag in {"ai", "au", "ut", "cc"} else " "
            values[tag] = (f"{prev}{sep}{value}", start)
        else:
            values[tag] = (value, line)

    work_id = values["an"][0].strip()
    if not work_id:
        warnings.append(ParseWarning("malformed_record", block.line, None, "empty 'an' field"))
        return None

    unified = [_author_slot(t) for t in _split_list(values["ai"][0])] if "ai" in values else []
    full = [_author_slot(t) for t in _split_list(values["au"][0])] if "au" in values else []
    if "ai" in values and "au" in values and len(unified) != len(full):
        warnings.append(ParseWarning(
            "author_count_mismatch", values["ai"][1], work_id,
            f"ai lists {len(unified)} authors, au lists {len(full)}; padded with MISSING",
        ))
    width = max(len(unified), len(full))
    unified += [None] * (width - len(unified))
    full += [None] * (width - len(full))

    year = None
    if "py" in values:
        year = _parse_year(values["py"][0], work_id, values["py"][1], warnings)
    msc = _parse_msc(values["cc"][0], work_id, values["cc"][1], warnings) if "cc" in values else []
    issns = tuple(_ISSN.findall(values["is"][0])) if "is" in values else ()
    journal = parse_journal(values["se"][0]) if "se" in values else None

    return Record(
        id=work_id,
        authors_unified=tuple(unified),
        authors_full=tuple(full),
        year=year,
        msc_codes=tuple(msc),
        title=values["ti"][0] if "ti" in values else None,
        keywords_raw=tuple(_split_list(values["ut"][0])) if "ut" in values else (),
        issns=issns,
        source=values["so"][0] if "so" in values else None,
        journal=journal,
        extra=tuple(extra),
    )


def parse_records(source: Source, norm: TexNormTable | None = None,
                  encoding: str = "utf-8") -> Tuple[List[Record], List[ParseWarning]]:
    """Parse a record stream into records and warnings.

    Parameters
    ----------
    source:
        Bytes, text, or an open binary/text stream.
    norm:
        TeX normalisation table; the packaged default when omitted.
    encoding:
        Used when ``source`` yields bytes (``utf-8`` or ``latin-1``).
    """
    norm = norm or default_table()
    warnings: List[ParseWarning] = []
    tally: Counter = Counter()
    by_id: Dict[str, Record] = {}
    for block in _split_blocks(_read_text(source, encoding), warnings):
        record = _build_record(block, norm, tally, warnings)
        if record is None:
            continue
        if record.id in by_id:
            warnings.append(ParseWarning(
                "duplicate_work_id", block.line, record.id,
                f"work {record.id} seen before; later record wins",
            ))
        by_id[record.id] = record
    for macro, count in sorted(tally.items()):
        warnings.append(ParseWarning(
            "unknown_tex_macro", 0, None, f"{macro} left verbatim {count} time(s)"
        ))
    logger.info("Parsed %d records with %d warnings", len(by_id), len(warnings))
    return list(by_id.values()), warnings


def parse_files(paths: Sequence[Path | str], norm: TexNormTable | None = None,
                encoding: str = "utf-8", threads: int = 1
                ) -> Tuple[List[Record], List[ParseWarning]]:
    """Parse several files, in parallel when ``threads > 1``.

    Results are merged in argument order, so a later file overrides an earlier
    one on duplicate work ids exactly as a later record would.
    """
    norm = norm or default_table()

    def _one(path: Path | str):
        with open(path, "rb") as fh:
            return parse_records(fh, norm, encoding)

    if threads > 1 and len(paths) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_one, paths))
    else:
        results = [_one(p) for p in paths]

    by_id: Dict[str, Record] = {}
    warnings: List[ParseWarning] = []
    for path, (records, warns) in zip(paths, results):
        warnings.extend(warns)
        for record in records:
            if record.id in by_id:
                warnings.append(ParseWarning(
                    "duplicate_work_id", 0, record.id,
                    f"work {record.id} in {path} overrides an earlier file",
                ))
            by_id[record.id] = record
    return list(by_id.values()), warnings


def _journal_value(journal: JournalDescriptor) -> str:
    parts = [journal.zb_id]
    if journal.full_title:
        parts.append(journal.full_title)
        if journal.short_title and journal.short_title != journal.full_title:
            parts.append(journal.short_title)
    parts.extend(journal.issns)
    return "\t".join(parts)


def _slots(values: Iterable[Optional[str]]) -> str:
    return "; ".join(MISSING_TOKEN if v is None else v for v in values)


def serialize_record(record: Record) -> str:
    lines = [f"an  {record.id}"]
    if record.authors_unified:
        lines.append(f"ai  {_slots(record.authors_unified)}")
    if record.authors_full:
        lines.append(f"au  {_slots(record.authors_full)}")
    if record.year is not None:
        lines.append(f"py  {record.year}")
    if record.msc_codes:
        codes = " ".join(("*" if m.primary else "") + m.code for m in record.msc_codes)
        lines.append(f"cc  {codes}")
    if record.title is not None:
        lines.append(f"ti  {record.title}")
    if record.keywords_raw:
        lines.append(f"ut  {'; '.join(record.keywords_raw)}")
    if record.issns:
        lines.append(f"is  ISSN {' '.join(record.issns)}")
    if record.source is not None:
        lines.append(f"so  {record.source}")
    if record.journal is not None:
        lines.append(f"se  {_journal_value(record.journal)}")
    for raw in record.extra:
        lines.append(f"{raw.tag}  {raw.value}")
    return "\n".join(lines) + "\n"


def serialize_records(records: Iterable[Record]) -> str:
    """Canonical tagged text: fields in ``FIELD_ORDER``, one blank line between records."""
    return "\n".join(serialize_record(r) for r in records)
