import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).resolve().parent.parent))
from biblio_networks.constants import ET_AL_KEY  # noqa: E402
from biblio_networks.entities import (ConflictingRules, EmptyName, MergeRules,  # noqa: E402
                                      build_entity_maps, build_synonym_partition,
                                      get_stemmer, homonym_risk, load_entity_maps,
                                      load_external_ids, load_merge_rules,
                                      load_word_list, make_author_key, merge_journals,
                                      normalize_unified_key, plural_stem, save_entity_maps, tokenize_keywords)
from biblio_networks.records import JournalDescriptor, parse_records  # noqa: E402

FIXTURE = Path(__file__).resolve().parent / "fixtures" / "corpus.txt"


def _fixture_records():
    with open(FIXTURE, "rb") as fh:
        records, _ = parse_records(fh)
    return records


@pytest.mark.parametrize("name, key", [
    ("Smith, John", "smith.j"),
    ("Sastre-Vazquez, P.", "sastre-vazquez.p"),
    ("Us" + chr(0xF3) + "-Dom" + chr(0xE8) + "nech, J.L.", "uso-domenech.j-l"),
    ("van der Berg, Anna Maria", "van-der-berg.a-m"),
    ("et al.", ET_AL_KEY),
])
def test_make_author_key(name, key):
    assert make_author_key(name) == key


def test_author_keys_drop_double_quotes():
    assert make_author_key('O"Brien, Anne') == "obrien.a"
    assert normalize_unified_key('o"brien.a') == "obrien.a"
    records, _ = parse_records("an  1\nai  o\"brien.a; smith.j\nau  O\"Brien, A.; Smith, J.\n")
    maps = build_entity_maps(records)
    assert maps.work_authors["1"] == ("obrien.a", "smith.j")


def test_name_without_comma_warns():
    warnings = []
    assert make_author_key("Plato", warnings) == "plato."
    assert [w.category for w in warnings] == ["name_without_comma"]


def test_empty_name_raises():
    with pytest.raises(EmptyName):
        make_author_key("   ")


def test_initial_forms_merge_into_longest_key():
    part = build_synonym_partition(["mustata.c", "mustata.costica", "lee.k"])
    assert part["mustata.c"] == "mustata.costica"
    assert part["mustata.costica"] == "mustata.costica"
    assert part["lee.k"] == "lee.k"


def test_ambiguous_initial_is_left_alone():
    part = build_synonym_partition(["wang.l", "wang.li", "wang.lei"])
    assert part["wang.l"] == "wang.l"
    assert part["wang.li"] == "wang.li"
    assert part["wang.lei"] == "wang.lei"


def test_forms_on_the_same_work_are_not_merged():
    part = build_synonym_partition(
        ["kim.j", "kim.jae"],
        key_works={"kim.j": {"w1"}, "kim.jae": {"w1", "w2"}},
    )
    assert part["kim.j"] == "kim.j"


def test_surname_fold_characters():
    part = build_synonym_partition(["o'brien.pat", "obrien.pat"], fold_chars="'")
    assert part["obrien.pat"] == part["o'brien.pat"] == "o'brien.pat"


def test_merge_rules_and_external_ids():
    part = build_synonym_partition(
        ["a.x", "b.y", "c.z", "d.w"],
        merge_rules=[("a.x", "b.y")],
        external_ids={"c.z": "orcid-1", "d.w": "orcid-1"},
    )
    assert part["a.x"] == part["b.y"] == "a.x"
    assert part["c.z"] == part["d.w"] == "c.z"
    assert part.groups() == {"a.x": ["a.x", "b.y"], "c.z": ["c.z", "d.w"]}


def test_conflicting_rules_raise():
    with pytest.raises(ConflictingRules) as info:
        build_synonym_partition(["a.x"], merge_rules=[("a.x", "b.y"), ("a.x", "c.z")])
    assert "a.x" in info.value.keys
    with pytest.raises(ConflictingRules, match="cycle"):
        build_synonym_partition(["a.x"], merge_rules=[("a.x", "b.y"), ("b.y", "a.x")])


def test_canonical_does_not_depend_on_input_order():
    keys = ["mustata.c", "mustata.costica", "smith.j", "smith.john"]
    first = build_synonym_partition(keys)
    second = build_synonym_partition(list(reversed(keys)))
    assert first == second


def test_rule_files(tmp_path):
    rules = tmp_path / "authors.tsv"
    rules.write_text("# comment\n!fold\t'-\nfoo.a\tfoo.anna\n", encoding="utf-8")
    loaded = load_merge_rules(rules)
    assert loaded == MergeRules((("foo.a", "foo.anna"),), "'-")

    ids = tmp_path / "ids.csv"
    ids.write_text("key,external_id\nfoo.a,1\nbar.b,1\n", encoding="utf-8")
    assert load_external_ids(ids) == {"foo.a": "1", "bar.b": "1"}
    ids.write_text("foo.a,1\nfoo.a,2\n", encoding="utf-8")
    with pytest.raises(ConflictingRules):
        load_external_ids(ids)

    bad = tmp_path / "bad.tsv"
    bad.write_text("only-one-column\n", encoding="utf-8")
    with pytest.raises(ValueError, match="alias"):
        load_merge_rules(bad)


def test_homonym_risk_lists_short_given_parts():
    rows = homonym_risk({"lee.k": 4, "mustata.c": 2, "smith.john": 9, ET_AL_KEY: 3})
    assert rows == [("lee.k", 4), ("mustata.c", 2)]


@pytest.mark.parametrize("word, stem", [
    ("algebras", "algebra"), ("graphs", "graph"), ("theories", "theory"),
    ("classes", "class"), ("series", "series"), ("analysis", "analysis"),
    ("boxes", "box"), ("gas", "gas"),
])
def test_plural_stem(word, stem):
    assert plural_stem(word) == stem


def test_unknown_stemmer():
    with pytest.raises(ValueError):
        get_stemmer("snowball")
    assert get_stemmer("identity")("graphs") == "graphs"


def test_tokenize_keywords():
    stop = frozenset({"of", "the", "on"})
    tokens = tokenize_keywords(["planar graphs", "chromatic number"],
                               "Coloring of the planar graph $G_2$ 2001", stop)
    assert tokens == {"planar": 1, "graph": 1, "chromatic": 1, "number": 1, "coloring": 1}
    counted = tokenize_keywords(["graphs", "graph"], None, stop, multiplicity=True)
    assert counted == {"graph": 2}


def test_packaged_stopwords():
    words = load_word_list()
    assert "the" in words
    assert "graph" not in words


def test_merge_journals_by_issn_and_rule():
    entries = [
        JournalDescriptor("300", "Journal C", "J. C", ("2222-2222",)),
        JournalDescriptor("100", "Journal A", "J. A", ("1111-1111",)),
        JournalDescriptor("200", "Journal A (new series)", "J. A", ("1111-1111",)),
        JournalDescriptor("400", "Journal D", "J. D", ()),
    ]
    merged = merge_journals(entries, [("400", "300")])
    assert [(j.node_id, sorted(j.zb_ids)) for j in merged] == [
        ("100", ["100", "200"]), ("300", ["300", "400"]),
    ]
    assert merged[0].canonical_title == "Journal A (new series)"
    assert merge_journals(list(reversed(entries)), [("400", "300")]) == merged


def test_build_entity_maps_on_fixture():
    records = _fixture_records()
    maps = build_entity_maps(records, load_word_list())
    mustata = "Must" + chr(0x103) + chr(0x163) + "a, Costic" + chr(0x103)
    assert maps.work_authors["0000009"] == ("mustata.c", "dumitrescu.i")
    assert maps.work_authors["0000010"] == ("mustata.c", "chen.wei")
    assert maps.display_names["mustata.c"] == mustata
    assert maps.work_authors["0000011"] == ("park.jin", "lee.kim")
    assert "0000010" not in maps.work_journal
    assert maps.work_journal["0000004"] == "00000303"
    assert len(maps.journals) == 6
    assert maps.author_work_counts()["lee.kim"] == 4
    assert maps.work_keywords["0000004"]["prime"] == 1


def test_entity_maps_round_trip_through_store(tmp_path):
    records = _fixture_records()
    maps = build_entity_maps(records, load_word_list())
    save_entity_maps(maps, tmp_path)
    loaded = load_entity_maps(records, tmp_path)
    assert loaded.work_authors == maps.work_authors
    assert loaded.work_journal == maps.work_journal
    assert loaded.journal_titles() == maps.journal_titles()
    assert {k: dict(v) for k, v in loaded.work_keywords.items()} == \
        {k: dict(v) for k, v in maps.work_keywords.items()}
