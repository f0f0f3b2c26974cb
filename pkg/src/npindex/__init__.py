"""npindex: noun-phrase analysis and phrase-based retrieval.

The library turns tagged text into simplex and complex noun phrases,
parses each NP bottom-up from corpus co-occurrence statistics, extracts
four kinds of small compounds (lexical atoms, head-modifier pairs,
subcompounds, cross-preposition pairs), and indexes documents with them
in a cosine vector-space model.

Typical use::

    from npindex import PipelineConfig, chunk_corpus, parse_corpus
    from npindex.ingest import Document, load_lexicon

    config = PipelineConfig()
    chunked = chunk_corpus(docs, lexicon)
    parsed = parse_corpus(chunked.all_simplexes(), config)
"""

from .config import ConfigError, PipelineConfig, load_config
from .ingest import (
    ComplexNP,
    Document,
    SimplexNP,
    TaggedToken,
    chunk_complex,
    chunk_simplex,
    load_lexicon,
    read_documents,
    tag_tokens,
)
from .stats import StatTable
from .atoms import LexAtom, detect_atoms
from .parser import (
    AssocScore,
    ParseAbort,
    ParseNode,
    ParseResult,
    local_dominance,
    parse_corpus,
    parse_single_np,
    phase_group,
    preference_scores,
    score_pair,
)
from .compounds import (
    Compound,
    attest,
    build_np_inventory,
    gen_cross_preposition,
    gen_head_modifier,
    gen_subcompounds,
    index_terms,
)
from .retrieval import (
    EvalReport,
    InvertedIndex,
    PostingList,
    RankedList,
    evaluate,
    query_vector,
    search,
)
from .pipeline import (
    ChunkedCorpus,
    PipelineArtifacts,
    chunk_corpus,
    process_query,
    run_all,
)

__version__ = "0.1.0"

__all__ = [
    "AssocScore", "ChunkedCorpus", "ComplexNP", "Compound", "ConfigError",
    "Document", "EvalReport", "InvertedIndex", "LexAtom", "ParseAbort",
    "ParseNode", "ParseResult", "PipelineArtifacts", "PipelineConfig",
    "PostingList", "RankedList", "SimplexNP", "StatTable", "TaggedToken",
    "attest", "build_np_inventory", "chunk_complex", "chunk_corpus",
    "chunk_simplex", "detect_atoms", "evaluate", "gen_cross_preposition",
    "gen_head_modifier", "gen_subcompounds", "index_terms", "load_config",
    "load_lexicon", "local_dominance", "parse_corpus", "parse_single_np",
    "phase_group", "preference_scores", "process_query", "query_vector",
    "read_documents", "run_all", "score_pair", "search", "tag_tokens",
]
