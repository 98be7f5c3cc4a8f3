from pathlib import Path

BASE = Path(__file__).resolve().parent
DATA_DIR = BASE / "data"
TEMPLATE_DIR = BASE / "templates"

TEX_RULES_FILE = DATA_DIR / "tex_rules.json"
STOPWORDS_FILE = DATA_DIR / "stopwords.txt"

# canonical field order of the tagged record format
FIELD_ORDER = ["an", "ai", "au", "py", "cc", "ti", "ut", "is", "so", "se"]

MISSING_TOKEN = "-"
ET_AL_KEY = "et.al"

YEAR_MIN = 1000
YEAR_MAX = 2100

# output layout below the configured out_dir
STORE_DIR = "store"
NETWORK_DIR = "networks"
DERIVE_DIR = "derive"
DIST_DIR = "dist"

RECORDS_FILE = "records.txt"
AUTHORS_FILE = "authors.csv"
JOURNALS_FILE = "journals.csv"
KEYWORDS_FILE = "work_keywords.csv"
WARNINGS_FILE = "warnings.csv"
HOMONYMS_FILE = "homonyms.csv"
INGEST_SUMMARY_FILE = "ingest.json"

NETWORK_FILES = {
    "WA": "wa.net",
    "WJ": "wj.net",
    "WK": "wk.net",
    "WM": "wm.net",
    "WMp": "wm_primary.net",
}
YEAR_FILE = "year.clu"
SIZES_FILE = "sizes.json"

REPORT_SCHEMA_VERSION = 1

AUTHOR_INDEX_COLS = ["author", "cn_ii", "total", "K"]
COAUTHOR_COLS = ["author", "coauthors", "works", "pseudo_author"]
LINK_COLS = ["first", "second", "value"]
BIAS_COLS = ["journal", "title", "works", "subject_works", "bias"]
SHARE_COLS = ["journal", "title", "works", "share_pure", "share_with_applications"]
COCLASS_COLS = ["msc", "works"]
TFIDF_COLS = ["msc", "keyword", "appearances", "all_appearances", "tfidf"]
DIST_COLS = ["value", "f", "g"]
BRADFORD_COLS = ["rank", "journal", "works", "cumulative"]
YEAR_COLS = ["year", "works"]
MSC_TOP_COLS = ["msc", "works"]
WARNING_COLS = ["category", "count"]
