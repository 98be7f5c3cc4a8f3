import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).resolve().parent.parent))
from biblio_networks.entities import build_entity_maps, load_word_list  # noqa: E402
from biblio_networks.netcore import build_networks  # noqa: E402
from biblio_networks.records import parse_records  # noqa: E402

FIXTURE = Path(__file__).resolve().parent / "fixtures" / "corpus.txt"


@pytest.fixture(scope="session")
def corpus():
    with open(FIXTURE, "rb") as fh:
        records, _ = parse_records(fh)
    return records


@pytest.fixture(scope="session")
def fixture_nets(corpus):
    return build_networks(corpus, build_entity_maps(corpus, load_word_list()))
