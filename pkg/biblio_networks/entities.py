"""Node dictionaries: author keys, synonym partition, keywords and journals."""

from __future__ import annotations

import csv
import logging
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import (AbstractSet, Callable, Dict, Iterable, List, Mapping, Optional,
                    Sequence, Tuple)

from scipy.cluster.hierarchy import DisjointSet
from unidecode import unidecode

try:
    from nltk.stem import PorterStemmer  # type: ignore
except Exception:  # pragma: no cover - optional dependency
    PorterStemmer = None  # type: ignore

from .constants import (AUTHORS_FILE, ET_AL_KEY, JOURNALS_FILE, KEYWORDS_FILE,
                        STOPWORDS_FILE)
from .records import JournalDescriptor, ParseWarning, Record
from .reports import read_csv, write_csv

logger = logging.getLogger(__name__)

_ET_AL = re.compile(r"^et\.?\s*al\.?$", re.IGNORECASE)
_WORD = re.compile(r"[^\W_]+")
_MATH = re.compile(r"\$[^$]*\$")


class EmptyName(ValueError):
    pass


class ConflictingRules(ValueError):
    """Merge rules that give one key two canonicals or form a cycle."""

    def __init__(self, message: str, keys: Sequence[str] = ()):
        super().__init__(message)
        self.keys = list(keys)


# ---------------------------------------------------------------------------
# author keys


def _fold(text: str) -> str:
    return unidecode(text).lower().replace('"', "")


def is_et_al(name: str) -> bool:
    return bool(_ET_AL.match(name.strip()))


def make_author_key(full_name: str,
                    warnings: Optional[List[ParseWarning]] = None) -> str:
    """Turn ``"Surname, Given Names"`` into a ``surname.initials`` key.

    Diacritics are folded for the key only.  A name without a comma becomes a
    surname with an empty given part and a ``name_without_comma`` warning.
    """
    name = full_name.strip()
    if not name:
        raise EmptyName("author name is empty")
    if is_et_al(name):
        return ET_AL_KEY
    surname, comma, given = name.partition(",")
    if not comma:
        logger.warning("Author name without comma: %r", name)
        if warnings is not None:
            warnings.append(ParseWarning(
                "name_without_comma", 0, None, f"{name!r} treated as a surname"
            ))
    surname = _fold(surname).replace(".", "")
    surname = "-".join(surname.split())
    if not surname:
        raise EmptyName(f"author name {full_name!r} has no surname")
    initials = [word[0] for word in _WORD.findall(_fold(given))]
    return f"{surname}.{'-'.join(initials)}"


def normalize_unified_key(value: str) -> str:
    """Fold a ZB unified name (``ai`` entry) into key form."""
    if is_et_al(value):
        return ET_AL_KEY
    surname, _, given = _fold(value.strip()).partition(".")
    surname = "-".join(surname.split())
    given = "-".join(given.replace(".", " ").split())
    return f"{surname}.{given}"


def _slot_pairs(record: Record, warnings: Optional[List[ParseWarning]] = None
                ) -> List[Tuple[str, Optional[str]]]:
    pairs = []
    for unified, display in zip(record.authors_unified, record.authors_full):
        if unified is not None:
            pairs.append((normalize_unified_key(unified), display))
        elif display is not None:
            try:
                pairs.append((make_author_key(display, warnings), display))
            except EmptyName:
                continue
    return pairs


def author_slot_keys(record: Record,
                     warnings: Optional[List[ParseWarning]] = None) -> List[str]:
    """Raw author keys of a record, one per non-empty slot.

    The unified ``ai`` entry wins; a MISSING slot falls back to a key
    synthesised from the ``au`` display name.
    """
    return [key for key, _ in _slot_pairs(record, warnings)]


def split_key(key: str) -> Tuple[str, str]:
    surname, _, given = key.partition(".")
    return surname, given


def _is_initialism_of(short: str, long: str) -> bool:
    """True when every hyphen part of ``short`` prefixes the matching part of ``long``."""
    a, b = short.split("-"), long.split("-")
    if not short or len(a) > len(b):
        return False
    return all(x and y.startswith(x) for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# synonym partition


@dataclass(frozen=True)
class SynonymPartition:
    canonical: Dict[str, str] = field(default_factory=dict)

    def __getitem__(self, key: str) -> str:
        return self.canonical.get(key, key)

    def __len__(self) -> int:
        return len(self.canonical)

    def __contains__(self, key: object) -> bool:
        return key in self.canonical

    def groups(self) -> Dict[str, List[str]]:
        out: Dict[str, List[str]] = {}
        for key, canon in self.canonical.items():
            out.setdefault(canon, []).append(key)
        return {canon: sorted(members) for canon, members in sorted(out.items())}


@dataclass(frozen=True)
class MergeRules:
    pairs: Tuple[Tuple[str, str], ...] = ()
    fold: Optional[str] = None


def load_merge_rules(path: Path | str) -> MergeRules:
    """Read ``alias TAB canonical`` lines; ``!fold<TAB>chars`` sets fold characters."""
    pairs = []
    fold = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = [p.strip() for p in line.split("\t")]
            if parts[0] == "!fold":
                fold = parts[1] if len(parts) > 1 else ""
                continue
            if len(parts) != 2 or not all(parts):
                raise ValueError(f"{path}:{lineno}: expected 'alias<TAB>canonical'")
            pairs.append((parts[0], parts[1]))
    return MergeRules(tuple(pairs), fold)


def load_external_ids(path: Path | str) -> Dict[str, str]:
    """Read a ``key,external_id`` CSV; a key listed with two ids is a conflict."""
    ids: Dict[str, str] = {}
    with open(path, "r", newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if len(row) < 2 or not row[0].strip() or row[0].strip() == "key":
                continue
            key, ext = row[0].strip(), row[1].strip()
            if ids.get(key, ext) != ext:
                raise ConflictingRules(
                    f"author {key} has external ids {ids[key]} and {ext}", [key]
                )
            ids[key] = ext
    return ids


def _check_rules(pairs: Iterable[Tuple[str, str]]) -> Dict[str, str]:
    target: Dict[str, str] = {}
    for alias, canon in pairs:
        if alias == canon:
            continue
        if target.get(alias, canon) != canon:
            raise ConflictingRules(
                f"{alias} is assigned two canonicals: {target[alias]} and {canon}",
                [alias, target[alias], canon],
            )
        target[alias] = canon
    for start in target:
        path = [start]
        node = target[start]
        while node in target:
            if node in path:
                cycle = path[path.index(node):] + [node]
                raise ConflictingRules(
                    "merge rules form a cycle: " + " -> ".join(cycle), cycle
                )
            path.append(node)
            node = target[node]
    return target


def build_synonym_partition(keys: Iterable[str],
                            merge_rules: Iterable[Tuple[str, str]] = (),
                            external_ids: Optional[Mapping[str, str]] = None,
                            key_works: Optional[Mapping[str, AbstractSet[str]]] = None,
                            fold_chars: str = "") -> SynonymPartition:
    """Group author keys that denote the same person.

    Parameters
    ----------
    keys:
        The author keys of the corpus.
    merge_rules:
        ``(alias, canonical)`` pairs from the rules file.
    external_ids:
        ``key -> identity`` table; keys sharing an identity are merged.
    key_works:
        Works per key.  Two forms seen on the same work are never merged by
        the initialism rule.
    fold_chars:
        Characters removed from surnames before comparing them, e.g. ``"'"``.

    The canonical key of a group is its longest member, ties broken by the
    lexicographically smallest.
    """
    keys = sorted(set(keys))
    targets = _check_rules(merge_rules)
    ds = DisjointSet(keys)

    table = str.maketrans("", "", fold_chars)
    by_surname: Dict[str, List[Tuple[str, str]]] = {}
    for key in keys:
        if key == ET_AL_KEY:
            continue
        surname, given = split_key(key)
        by_surname.setdefault(surname.translate(table), []).append((key, given))

    def _cooccur(a: str, b: str) -> bool:
        if key_works is None:
            return False
        return bool(key_works.get(a, frozenset()) & key_works.get(b, frozenset()))

    for group in by_surname.values():
        if len(group) < 2:
            continue
        for key, given in group:
            longer = [(k, g) for k, g in group
                      if k != key and _is_initialism_of(given, g)]
            if not longer:
                continue
            maximal = {g for _, g in longer
                       if not any(g2 != g and _is_initialism_of(g, g2) for _, g2 in longer)}
            if len(maximal) > 1:
                logger.debug("Ambiguous initialism %s: %s", key, sorted(maximal))
                continue
            for other, _ in longer:
                if not _cooccur(key, other):
                    ds.merge(key, other)

    for alias, canon in targets.items():
        for node in (alias, canon):
            if node not in ds:
                ds.add(node)
        ds.merge(alias, canon)

    if external_ids:
        by_id: Dict[str, str] = {}
        for key, ext in sorted(external_ids.items()):
            if key not in ds:
                ds.add(key)
            if ext in by_id:
                ds.merge(by_id[ext], key)
            else:
                by_id[ext] = key

    present = set(keys)
    mapping: Dict[str, str] = {}
    for subset in ds.subsets():
        members = sorted(k for k in subset if k in present)
        if not members:
            continue
        canon = min(members, key=lambda k: (-len(k), k))
        for key in members:
            mapping[key] = canon
    merged = sum(1 for k, c in mapping.items() if k != c)
    logger.info("Synonym partition: %d keys, %d merged into %d groups",
                len(mapping), merged, len(set(mapping.values())))
    return SynonymPartition(mapping)


def homonym_risk(work_counts: Mapping[str, int], max_given: int = 2) -> List[Tuple[str, int]]:
    """Keys whose given part is short enough to hide several people."""
    rows = [(key, n) for key, n in work_counts.items()
            if key != ET_AL_KEY and len(split_key(key)[1]) <= max_given]
    return sorted(rows, key=lambda r: (-r[1], r[0]))


# ---------------------------------------------------------------------------
# keywords

Stemmer = Callable[[str], str]

_PLURAL_EXCEPTIONS = frozenset({"series", "species", "analysis", "basis", "class"})


def identity_stem(word: str) -> str:
    return word


def plural_stem(word: str) -> str:
    """Strip English plural suffixes (``algebras`` -> ``algebra``)."""
    if word in _PLURAL_EXCEPTIONS or len(word) <= 3:
        return word
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith(("xes", "zes", "ches", "shes")):
        return word[:-2]
    if word.endswith("s") and not word.endswith(("ss", "us", "is")):
        return word[:-1]
    return word


def get_stemmer(name: str) -> Stemmer:
    if name == "identity":
        return identity_stem
    if name == "plural":
        return plural_stem
    if name == "porter":
        if PorterStemmer is None:
            raise RuntimeError("nltk is required for the porter stemmer")
        return PorterStemmer().stem
    raise ValueError(f"unknown stemmer {name!r}")


def load_word_list(path: Path | str | None = None) -> frozenset:
    """One word per line; blank lines and ``#`` comments are skipped."""
    path = Path(path) if path is not None else STOPWORDS_FILE
    with open(path, "r", encoding="utf-8") as fh:
        words = {line.strip().lower() for line in fh}
    return frozenset(w for w in words if w and not w.startswith("#"))


def tokenize_keywords(phrases: Sequence[str], title: Optional[str] = None,
                      stopwords: AbstractSet[str] = frozenset(),
                      stemmer: Stemmer = plural_stem,
                      multiplicity: bool = False) -> Counter:
    """Split keyword phrases (and the title) into stemmed word tokens.

    Each token counts once per work unless ``multiplicity`` is set.
    """
    texts = list(phrases)
    if title:
        texts.append(title)
    tokens: Counter = Counter()
    for text in texts:
        text = _fold(_MATH.sub(" ", text))
        for word in _WORD.findall(text):
            if len(word) < 2 or word.isdigit() or word in stopwords:
                continue
            word = stemmer(word)
            if not word or word in stopwords:
                continue
            tokens[word] += 1
    if not multiplicity:
        tokens = Counter(dict.fromkeys(tokens, 1))
    return tokens


# ---------------------------------------------------------------------------
# journals


@dataclass(frozen=True)
class JournalEntry:
    zb_ids: frozenset
    canonical_title: str = ""
    issns: frozenset = frozenset()

    @property
    def node_id(self) -> str:
        return min(self.zb_ids)


def merge_journals(entries: Iterable[JournalDescriptor],
                   merge_rules: Iterable[Tuple[str, str]] = ()) -> List[JournalEntry]:
    """Coalesce descriptors sharing an ISSN or paired by a rule.

    The result is sorted by smallest zb-id, so it does not depend on input order.
    """
    entries = list(entries)
    ds = DisjointSet()
    titles: Dict[str, List[str]] = {}
    issns: Dict[str, set] = {}
    issn_owner: Dict[str, str] = {}
    for desc in entries:
        if desc.zb_id not in ds:
            ds.add(desc.zb_id)
        titles.setdefault(desc.zb_id, []).append(desc.full_title)
        issns.setdefault(desc.zb_id, set()).update(desc.issns)
    for zb_id in sorted(issns):
        for issn in sorted(issns[zb_id]):
            if issn in issn_owner:
                ds.merge(issn_owner[issn], zb_id)
            else:
                issn_owner[issn] = zb_id
    for a, b in merge_rules:
        for zb_id in (a, b):
            if zb_id not in ds:
                ds.add(zb_id)
        ds.merge(a, b)

    merged = []
    for subset in ds.subsets():
        group = sorted(subset)
        candidates = [t for z in group for t in titles.get(z, []) if t]
        title = min(candidates, key=lambda t: (-len(t), t)) if candidates else ""
        group_issns = frozenset().union(*(issns.get(z, set()) for z in group))
        merged.append(JournalEntry(frozenset(group), title, group_issns))
    merged.sort(key=lambda e: e.node_id)
    return merged


# ---------------------------------------------------------------------------
# entity maps


@dataclass
class EntityMaps:
    """Everything needed to turn records into network arcs."""

    partition: SynonymPartition
    work_authors: Dict[str, Tuple[str, ...]]
    display_names: Dict[str, str]
    journals: List[JournalEntry]
    work_journal: Dict[str, str]
    work_keywords: Dict[str, Counter]
    warnings: List[ParseWarning] = field(default_factory=list)

    def journal_titles(self) -> Dict[str, str]:
        return {j.node_id: j.canonical_title for j in self.journals}

    def author_work_counts(self) -> Counter:
        counts: Counter = Counter()
        for authors in self.work_authors.values():
            counts.update(authors)
        return counts


def _resolve_authors(records: Sequence[Record], partition: SynonymPartition,
                     raw: Mapping[str, List[str]]) -> Dict[str, Tuple[str, ...]]:
    work_authors = {}
    for record in records:
        seen: Dict[str, None] = {}
        for key in raw[record.id]:
            seen.setdefault(partition[key])
        work_authors[record.id] = tuple(seen)
    return work_authors


def _journal_lookup(journals: Sequence[JournalEntry]) -> Dict[str, str]:
    return {zb_id: j.node_id for j in journals for zb_id in j.zb_ids}


def _descriptors(records: Sequence[Record]) -> List[JournalDescriptor]:
    out = []
    for record in records:
        if record.journal is None:
            continue
        desc = record.journal
        if record.issns:
            issns = tuple(sorted(set(desc.issns) | set(record.issns)))
            desc = JournalDescriptor(desc.zb_id, desc.full_title, desc.short_title, issns)
        out.append(desc)
    return out


def build_entity_maps(records: Sequence[Record],
                      stopwords: AbstractSet[str] = frozenset(),
                      stemmer: Stemmer = plural_stem,
                      author_rules: Optional[MergeRules] = None,
                      external_ids: Optional[Mapping[str, str]] = None,
                      journal_rules: Iterable[Tuple[str, str]] = (),
                      fold_chars: str = "'",
                      use_title: bool = True,
                      multiplicity: bool = False,
                      threads: int = 1) -> EntityMaps:
    """Resolve authors, journals and keywords of a parsed corpus."""
    warnings: List[ParseWarning] = []
    raw: Dict[str, List[str]] = {}
    display: Dict[str, str] = {}
    key_works: Dict[str, set] = {}
    for record in records:
        pairs = _slot_pairs(record, warnings)
        raw[record.id] = [key for key, _ in pairs]
        for key, name in pairs:
            if name is not None:
                display.setdefault(key, name)
            key_works.setdefault(key, set()).add(record.id)

    rules = author_rules or MergeRules()
    if rules.fold is not None:
        fold_chars = rules.fold
    partition = build_synonym_partition(
        key_works, rules.pairs, external_ids, key_works, fold_chars
    )
    work_authors = _resolve_authors(records, partition, raw)
    display_names: Dict[str, str] = {}
    for key in sorted(display, key=lambda k: (-len(k), k)):
        display_names.setdefault(partition[key], display[key])

    journals = merge_journals(_descriptors(records), journal_rules)
    lookup = _journal_lookup(journals)
    work_journal = {r.id: lookup[r.journal.zb_id] for r in records if r.journal is not None}

    def _tokens(record: Record) -> Counter:
        title = record.title if use_title else None
        return tokenize_keywords(record.keywords_raw, title, stopwords, stemmer, multiplicity)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            token_lists = list(pool.map(_tokens, records))
    else:
        token_lists = [_tokens(r) for r in records]
    work_keywords = {r.id: tokens for r, tokens in zip(records, token_lists)}

    logger.info("Resolved %d authors, %d journals, %d keyword tokens",
                len(set(partition.canonical.values())), len(journals),
                len({t for c in token_lists for t in c}))
    return EntityMaps(partition, work_authors, display_names, journals,
                      work_journal, work_keywords, warnings)


def save_entity_maps(maps: EntityMaps, store: Path | str) -> None:
    """Write the dictionaries as CSV files next to the record store."""
    store = Path(store)
    write_csv(store / AUTHORS_FILE, ["key", "canonical", "display"],
              [(k, c, maps.display_names.get(c, "")) for k, c in sorted(maps.partition.canonical.items())])
    write_csv(store / JOURNALS_FILE, ["node", "zb_ids", "title", "issns"],
              [(j.node_id, ";".join(sorted(j.zb_ids)), j.canonical_title,
                ";".join(sorted(j.issns))) for j in maps.journals])
    write_csv(store / KEYWORDS_FILE, ["work", "keyword", "count"],
              [(work, token, n) for work, tokens in maps.work_keywords.items()
               for token, n in sorted(tokens.items())])


def load_entity_maps(records: Sequence[Record], store: Path | str) -> EntityMaps:
    """Rebuild :class:`EntityMaps` from the store written by :func:`save_entity_maps`."""
    store = Path(store)
    canonical: Dict[str, str] = {}
    display_names: Dict[str, str] = {}
    for row in read_csv(store / AUTHORS_FILE):
        canonical[row["key"]] = row["canonical"]
        if row["display"]:
            display_names[row["canonical"]] = row["display"]
    partition = SynonymPartition(canonical)

    journals = [
        JournalEntry(frozenset(row["zb_ids"].split(";")), row["title"],
                     frozenset(i for i in row["issns"].split(";") if i))
        for row in read_csv(store / JOURNALS_FILE)
    ]
    lookup = _journal_lookup(journals)

    work_keywords: Dict[str, Counter] = {r.id: Counter() for r in records}
    for row in read_csv(store / KEYWORDS_FILE):
        work_keywords.setdefault(row["work"], Counter())[row["keyword"]] = int(row["count"])

    raw = {r.id: author_slot_keys(r) for r in records}
    return EntityMaps(
        partition,
        _resolve_authors(records, partition, raw),
        display_names,
        journals,
        {r.id: lookup[r.journal.zb_id] for r in records
         if r.journal is not None and r.journal.zb_id in lookup},
        work_keywords,
    )
