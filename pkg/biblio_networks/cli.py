"""Command-line pipeline: ingest -> build -> derive / subject / dist."""

from __future__ import annotations

import argparse
import logging
from collections import Counter
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .analytics import (PowerLawFitError, author_indices, bradford_curve, coauthor_counts,
                        collaboration_networks, core_network, distribution, journal_networks,
                        link_islands, msc_usage, powerlaw_alpha, ps_core,
                        subfield_pipeline, synthetic_powerlaw_sample, top_links,
                        year_histogram)
from .config import ConfigError, PipelineConfig, load_config, validate_config
from .constants import (AUTHOR_INDEX_COLS, BIAS_COLS, BRADFORD_COLS, COAUTHOR_COLS,
                        COCLASS_COLS, DERIVE_DIR, DIST_COLS, DIST_DIR, HOMONYMS_FILE,
                        INGEST_SUMMARY_FILE, LINK_COLS, MSC_TOP_COLS, NETWORK_DIR,
                        NETWORK_FILES, RECORDS_FILE, REPORT_SCHEMA_VERSION, SHARE_COLS,
                        SIZES_FILE, STORE_DIR, TFIDF_COLS, WARNING_COLS, WARNINGS_FILE,
                        YEAR_COLS, YEAR_FILE)
from .entities import (MergeRules, build_entity_maps, get_stemmer, homonym_risk,
                       load_entity_maps, load_external_ids, load_merge_rules,
                       load_word_list, save_entity_maps)
from .netcore import Networks, binarize, build_networks, degrees
from .pajek import format_weight, read_network, read_partition, write_network, write_partition
from .records import parse_files, parse_records, serialize_records
from .reports import atomic_write_text, render_report, write_csv, write_json, write_workbook

logger = logging.getLogger(__name__)


class StoreMissing(RuntimeError):
    pass


def _store(config: PipelineConfig) -> Path:
    return config.out_dir / STORE_DIR


def _load_store(config: PipelineConfig):
    store = _store(config)
    if not (store / RECORDS_FILE).exists():
        raise StoreMissing(f"no record store in {store}; run ingest first")
    with open(store / RECORDS_FILE, "rb") as fh:
        records, _ = parse_records(fh)
    return records, load_entity_maps(records, store)


def _load_networks(config: PipelineConfig) -> Networks:
    net_dir = config.out_dir / NETWORK_DIR
    if not all((net_dir / name).exists() for name in NETWORK_FILES.values()):
        raise StoreMissing(f"no networks in {net_dir}; run build first")
    nets = {key: read_network(net_dir / name) for key, name in NETWORK_FILES.items()}
    year = read_partition(net_dir / YEAR_FILE, nets["WA"].rows)
    return Networks(nets["WA"], nets["WJ"], nets["WK"], nets["WM"], nets["WMp"], year)


def cmd_ingest(config: PipelineConfig) -> Dict[str, Any]:
    """Parse the inputs, resolve entities and write the record store."""
    validate_config(config, need_inputs=True)
    records, warnings = parse_files(config.inputs, encoding=config.encoding,
                                    threads=config.threads)
    stopwords = load_word_list(config.stopwords)
    rules = load_merge_rules(config.author_rules) if config.author_rules else MergeRules()
    journal_rules = load_merge_rules(config.journal_rules).pairs if config.journal_rules else ()
    external = load_external_ids(config.external_ids) if config.external_ids else None
    maps = build_entity_maps(
        records,
        stopwords=stopwords,
        stemmer=get_stemmer(config.stemmer),
        author_rules=rules,
        external_ids=external,
        journal_rules=journal_rules,
        fold_chars=config.surname_fold,
        use_title=config.use_title,
        multiplicity=config.wk_multiplicity,
        threads=config.threads,
    )
    warnings = warnings + maps.warnings

    store = _store(config)
    atomic_write_text(store / RECORDS_FILE, serialize_records(records))
    save_entity_maps(maps, store)
    by_category = Counter(w.category for w in warnings)
    write_csv(store / WARNINGS_FILE, WARNING_COLS, sorted(by_category.items()))
    write_csv(store / HOMONYMS_FILE, ["author", "works"],
              homonym_risk(maps.author_work_counts()))
    summary = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "records": len(records),
        "warnings": len(warnings),
        "warnings_by_category": dict(by_category),
        "authors": len(set(maps.partition.canonical.values())),
        "journals": len(maps.journals),
    }
    write_json(store / INGEST_SUMMARY_FILE, summary)
    for w in warnings:
        logger.debug("%s (line %d, work %s): %s", w.category, w.line, w.work_id, w.message)
    return summary


def cmd_build(config: PipelineConfig) -> Dict[str, Any]:
    """Write the two-mode networks, the year partition and ``sizes.json``."""
    validate_config(config)
    records, maps = _load_store(config)
    nets = build_networks(records, maps)
    net_dir = config.out_dir / NETWORK_DIR
    for key, name in NETWORK_FILES.items():
        write_network(net_dir / name, getattr(nets, key))
    write_partition(net_dir / YEAR_FILE, nets.year)
    sizes = nets.sizes()
    write_json(net_dir / SIZES_FILE, sizes)
    return sizes


def _index_rows(rows):
    return [(r.author, r.cn_ii, r.total, r.K) for r in rows]


def _island_json(islands) -> List[Dict[str, Any]]:
    return [{"nodes": list(isl.nodes), "height": isl.height, "size": len(isl),
             "links": [[u, v, w] for u, v, w in isl.links]} for isl in islands]


def cmd_derive(config: PipelineConfig) -> Dict[str, Any]:
    """Collaboration networks, author indices, the pS-core and link islands."""
    validate_config(config)
    nets = _load_networks(config)
    out = config.out_dir / DERIVE_DIR
    collab = collaboration_networks(nets.WA, config.exclude_et_al, config.threads)
    write_network(out / "co.net", collab.Co)
    write_network(out / "ct_prime.net", collab.CtPrime)
    write_network(out / "cn.net", collab.Cn)
    write_csv(out / "author_indices.csv", AUTHOR_INDEX_COLS, _index_rows(author_indices(collab)))
    write_csv(out / "coauthors.csv", COAUTHOR_COLS, coauthor_counts(collab))

    core = ps_core(collab.CtPrime, config.core_level)
    core_net = core_network(collab.CtPrime, core)
    write_network(out / f"core_{format_weight(config.core_level)}.net", core_net)
    write_csv(out / "core_links.csv", LINK_COLS, top_links(core_net, config.top_k))

    islands = link_islands(collab.CtPrime, config.island_min, config.island_max)
    write_json(out / "islands.json", {
        "schema_version": REPORT_SCHEMA_VERSION,
        "size_min": config.island_min,
        "size_max": config.island_max,
        "islands": _island_json(islands),
    })

    jnets = journal_networks(nets.WA, nets.WJ, config.threads)
    write_network(out / "aj.net", jnets.AJ)
    write_network(out / "jj.net", jnets.JJ)
    write_network(out / "jj_authors.net", jnets.JJ_authors)
    return {"authors": len(collab.authors), "core": len(core), "islands": len(islands)}


def cmd_subject(config: PipelineConfig, prefix: Optional[str] = None) -> Dict[str, Any]:
    """Journal bias, subject shares, co-classification and TF-IDF of one MSC prefix."""
    validate_config(config)
    prefix = config.subject_prefix if prefix is None else prefix
    nets = _load_networks(config)
    _, maps = _load_store(config)
    titles = maps.journal_titles()
    bundle = subfield_pipeline(
        nets, prefix,
        extra=config.subject_extra,
        core_level=config.core_level,
        island_bounds=(config.island_min, config.island_max),
        min_works=config.min_works,
        tfidf_level=config.tfidf_level,
        idf_base=config.idf_base,
        exclude_et_al=config.exclude_et_al,
        threads=config.threads,
    )
    k = config.top_k
    out = config.out_dir / f"subject_{prefix or 'all'}"

    def bias_rows(rows):
        return [(r.journal, titles.get(r.journal, ""), r.works, r.subject_works, r.bias)
                for r in rows]

    tables: Dict[str, Any] = {}
    if bundle.bias is not None:
        tables["bias_positive"] = (BIAS_COLS, bias_rows(bundle.bias.positive(k)))
        tables["bias_negative"] = (BIAS_COLS, bias_rows(bundle.bias.negative(k)))
        tables["bias_without_subject"] = (BIAS_COLS, bias_rows(bundle.bias.without_subject))
    tables["shares"] = (SHARE_COLS, [(j, titles.get(j, ""), n, pure, applied)
                                     for j, n, pure, applied in bundle.shares[:k]])
    tables["coclassification"] = (COCLASS_COLS, bundle.coclassification[:k])
    tables["tfidf"] = (TFIDF_COLS, [(r.msc, r.keyword, r.appearances, r.all_appearances, r.tfidf)
                                    for r in bundle.tfidf[:k]])
    tables["author_indices"] = (AUTHOR_INDEX_COLS, _index_rows(bundle.indices[:k]))
    for name, table in bundle.distributions.items():
        tables[f"dist_{name}"] = (DIST_COLS, table.rows())
    tables["bradford"] = (BRADFORD_COLS, [(r, j, n, c) for r, j, n, c in bundle.bradford])

    for name, (columns, rows) in tables.items():
        write_csv(out / f"{name}.csv", columns, rows)
    write_json(out / "islands.json", {
        "schema_version": REPORT_SCHEMA_VERSION,
        "islands": _island_json(bundle.islands),
    })
    summary = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "prefix": prefix or "all",
        "works": bundle.n_works,
        "all_works": len(bundle.tau.over),
        "core_members": len(bundle.core) if bundle.core is not None else 0,
        "islands": len(bundle.islands),
        "overall_fraction": bundle.bias.overall_fraction if bundle.bias is not None else None,
    }
    write_json(out / "summary.json", summary)
    render_report(out / "index.html", f"Subject {prefix or 'all'}", tables, summary)
    if config.export_xlsx:
        write_workbook(out / "report.xlsx", tables)
    return summary


def _alpha_entry(samples, x_min: int) -> Dict[str, Any]:
    try:
        return {"alpha": powerlaw_alpha(samples, x_min),
                "alpha_approx": powerlaw_alpha(samples, x_min, method="approx"),
                "x_min": x_min}
    except PowerLawFitError as exc:
        return {"alpha": None, "x_min": x_min, "error": str(exc)}


def cmd_dist(config: PipelineConfig, synthetic_alpha: Optional[float] = None,
             synthetic_n: int = 100_000, seed: int = 0) -> Dict[str, Any]:
    """Year histogram, degree distributions, the Bradford curve and power-law fits."""
    validate_config(config)
    nets = _load_networks(config)
    out = config.out_dir / DIST_DIR

    years, missing = year_histogram(nets.year)
    write_csv(out / "year.csv", YEAR_COLS, years + [(0, missing)] if missing else years)

    vectors = {
        "authors_per_work": degrees(nets.WA, "rows"),
        "works_per_author": degrees(nets.WA, "cols"),
        "keywords_per_work": degrees(nets.WK, "rows"),
        "works_per_keyword": degrees(nets.WK, "cols"),
        "mscs_per_work": degrees(binarize(nets.WM), "rows"),
        "works_per_msc": degrees(binarize(nets.WM), "cols"),
        "works_per_journal": degrees(nets.WJ, "cols"),
    }
    alphas: Dict[str, Any] = {"schema_version": REPORT_SCHEMA_VERSION}
    for name, vec in vectors.items():
        table = distribution(vec)
        write_csv(out / f"{name}.csv", DIST_COLS, table.rows())
        alphas[name] = _alpha_entry(vec.values[vec.values > 0], config.x_min)
    write_csv(out / "bradford.csv", BRADFORD_COLS, bradford_curve(nets.WJ))
    write_csv(out / "msc_top.csv", MSC_TOP_COLS, msc_usage(nets.WM, config.top_k))
    write_csv(out / "msc_primary_top.csv", MSC_TOP_COLS, msc_usage(nets.WMp, config.top_k))

    if synthetic_alpha is not None:
        sample = synthetic_powerlaw_sample(synthetic_alpha, synthetic_n, seed)
        alphas["synthetic"] = {"alpha_true": synthetic_alpha, "n": synthetic_n, "seed": seed,
                               **_alpha_entry(sample, config.x_min)}
    write_json(out / "alpha.json", alphas)
    return alphas


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biblio_networks",
        description="Build and analyse bibliographic networks from tagged records.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON pipeline configuration")
    parser.add_argument("--out", dest="out_dir", help="output directory")
    parser.add_argument("--threads", type=int, help="worker threads")
    level = parser.add_mutually_exclusive_group()
    level.add_argument("--verbose", action="store_true", help="debug logging")
    level.add_argument("--quiet", action="store_true", help="warnings only")
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="parse records and resolve entities")
    ingest.add_argument("inputs", nargs="*", help="record files (override the config)")
    ingest.add_argument("--encoding", choices=["utf-8", "latin-1"])

    sub.add_parser("build", help="write the two-mode networks")

    derive = sub.add_parser("derive", help="collaboration networks, cores and islands")
    derive.add_argument("--core-level", dest="core_level", type=float)
    derive.add_argument("--top-k", dest="top_k", type=int)

    subject = sub.add_parser("subject", help="reports for one MSC prefix")
    subject.add_argument("--prefix", dest="subject_prefix")
    subject.add_argument("--top-k", dest="top_k", type=int)
    subject.add_argument("--min-works", dest="min_works", type=int)
    subject.add_argument("--idf-base", dest="idf_base", choices=["e", "2", "10"])
    subject.add_argument("--core-level", dest="core_level", type=float)

    dist = sub.add_parser("dist", help="distributions and power-law fits")
    dist.add_argument("--x-min", dest="x_min", type=int)
    dist.add_argument("--top-k", dest="top_k", type=int)
    dist.add_argument("--synthetic-alpha", type=float,
                      help="also fit a seeded synthetic sample drawn with this exponent")
    dist.add_argument("--seed", type=int, default=0)
    return parser


_OVERRIDES = ("out_dir", "threads", "encoding", "core_level", "top_k", "subject_prefix",
              "min_works", "idf_base", "x_min")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        log_level = logging.DEBUG
    elif args.quiet:
        log_level = logging.WARNING
    else:
        log_level = logging.INFO
    logging.basicConfig(level=log_level, format="%(levelname)s %(name)s: %(message)s")

    overrides = {key: getattr(args, key, None) for key in _OVERRIDES}
    if getattr(args, "inputs", None):
        overrides["inputs"] = args.inputs
    try:
        config = load_config(args.config, overrides)
        if args.command == "ingest":
            summary = cmd_ingest(config)
            print(f"Ingested {summary['records']} records with {summary['warnings']} warnings "
                  f"into {_store(config)}")
        elif args.command == "build":
            sizes = cmd_build(config)
            print(f"Networks written to {config.out_dir / NETWORK_DIR}: {sizes['arcs']}")
        elif args.command == "derive":
            summary = cmd_derive(config)
            print(f"Derived networks written to {config.out_dir / DERIVE_DIR}: {summary}")
        elif args.command == "subject":
            summary = cmd_subject(config)
            print(f"Subject report for {summary['prefix']} covers {summary['works']} works")
        elif args.command == "dist":
            cmd_dist(config, args.synthetic_alpha, seed=args.seed)
            print(f"Distributions written to {config.out_dir / DIST_DIR}")
    except (ConfigError, StoreMissing) as exc:
        logger.error("%s", exc)
        return 2
    except (ValueError, OSError) as exc:
        logger.error("%s", exc)
        return 1
    return 0
