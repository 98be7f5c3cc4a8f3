from .collaboration import (AuthorIndexRow, CollabBundle, author_indices, coauthor_counts,
                            collaboration_networks, drop_pseudo_authors, top_links)
from .cores import CoreResult, core_network, ps_core
from .distributions import (DegenerateSample, DistributionTable, NoSamplesAboveXmin,
                            PowerLawFitError, distribution, msc_usage, powerlaw_alpha,
                            synthetic_powerlaw_sample, year_histogram)
from .islands import Island, boundary_weight, link_islands
from .journals import (BiasRow, BiasTable, EmptySubject, JournalNetworks, bradford_curve,
                       journal_bias, journal_networks, journal_subject_profile,
                       subject_shares, subject_works)
from .keywords import TfidfRow, keyword_msc_network, tfidf, top_tfidf
from .subfield import SubfieldBundle, coclassification, subfield_pipeline

__all__ = [
    "AuthorIndexRow",
    "CollabBundle",
    "author_indices",
    "coauthor_counts",
    "collaboration_networks",
    "drop_pseudo_authors",
    "top_links",
    "CoreResult",
    "core_network",
    "ps_core",
    "DegenerateSample",
    "DistributionTable",
    "NoSamplesAboveXmin",
    "PowerLawFitError",
    "distribution",
    "msc_usage",
    "powerlaw_alpha",
    "synthetic_powerlaw_sample",
    "year_histogram",
    "Island",
    "boundary_weight",
    "link_islands",
    "BiasRow",
    "BiasTable",
    "EmptySubject",
    "JournalNetworks",
    "bradford_curve",
    "journal_bias",
    "journal_networks",
    "journal_subject_profile",
    "subject_shares",
    "subject_works",
    "TfidfRow",
    "keyword_msc_network",
    "tfidf",
    "top_tfidf",
    "SubfieldBundle",
    "coclassification",
    "subfield_pipeline",
]
