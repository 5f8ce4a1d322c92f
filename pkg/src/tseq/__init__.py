"""Transitive temporal sequence mining for clinical event tables.

Mines every ordered pair of events per patient together with the days
between them, packs pairs into integer sequence ids, screens out sparse
sequences, and answers duration-aware queries, including a post-covid
symptom workflow. See the README for the pipeline walkthrough.
"""

from .chunking import (
    DEFAULT_CHUNK_LIMIT,
    ChunkPlan,
    estimate_sequence_count,
    iter_chunks,
    plan_chunks,
    plan_for_dbmart,
)
from .encoding import (
    DEFAULT_BUCKET_BITS,
    PATIENT_SENTINEL,
    PHENX_LIMIT,
    SEQUENCE_LIMIT,
    DurationUnit,
    decode_sequence,
    encode_sequence,
    pack_duration,
    unpack_duration,
)
from .errors import (
    ArithmeticOverflow,
    CapacityExceeded,
    DecodingOutOfRange,
    DegenerateCohort,
    EncodingOverflow,
    IoFailure,
    MalformedDate,
    MissingColumn,
    PackOverflow,
    PatientExceedsLimit,
    PhenxOverflow,
    TseqError,
    UnknownId,
)
from .estimators import SparsityScreener, TransitiveSequenceMiner, sequence_frame
from .ingestion import (
    LookupTables,
    first_occurrence_filter,
    parse_dbmart,
    parse_dbmart_text,
    read_dbmart,
    translate_sequences,
    write_dbmart_csv,
)
from .mining import (
    MinerConfig,
    mine_all,
    mine_sequences_for_patient,
    mine_to_files,
    read_mined_dir,
    read_tseq_file,
    sort_dbmart,
    write_tseq_file,
)
from .model import DbMartEntry, Dbmart, SequenceArray, TemporalSequence
from .postcovid import (
    CandidateSymptom,
    PostCovidConfig,
    PostCovidReport,
    correlation_exclusion,
    extract_candidates,
    run_postcovid,
)
from .query import (
    filter_by_end,
    filter_by_min_duration,
    filter_by_start,
    transitive_end_sequences,
)
from .screening import SparsityConfig, duration_sparsity_screen, sparsity_screen
from .synth import SynthConfig, generate

__version__ = "0.1.0"

__all__ = [
    "ArithmeticOverflow",
    "CandidateSymptom",
    "CapacityExceeded",
    "ChunkPlan",
    "Dbmart",
    "DbMartEntry",
    "DecodingOutOfRange",
    "DEFAULT_BUCKET_BITS",
    "DEFAULT_CHUNK_LIMIT",
    "DegenerateCohort",
    "DurationUnit",
    "EncodingOverflow",
    "IoFailure",
    "LookupTables",
    "MalformedDate",
    "MinerConfig",
    "MissingColumn",
    "PackOverflow",
    "PatientExceedsLimit",
    "PATIENT_SENTINEL",
    "PhenxOverflow",
    "PHENX_LIMIT",
    "PostCovidConfig",
    "PostCovidReport",
    "SEQUENCE_LIMIT",
    "SequenceArray",
    "SparsityConfig",
    "SparsityScreener",
    "SynthConfig",
    "TemporalSequence",
    "TransitiveSequenceMiner",
    "TseqError",
    "UnknownId",
    "correlation_exclusion",
    "decode_sequence",
    "duration_sparsity_screen",
    "encode_sequence",
    "estimate_sequence_count",
    "extract_candidates",
    "filter_by_end",
    "filter_by_min_duration",
    "filter_by_start",
    "first_occurrence_filter",
    "generate",
    "iter_chunks",
    "mine_all",
    "mine_sequences_for_patient",
    "mine_to_files",
    "pack_duration",
    "parse_dbmart",
    "parse_dbmart_text",
    "plan_chunks",
    "plan_for_dbmart",
    "read_dbmart",
    "read_mined_dir",
    "read_tseq_file",
    "run_postcovid",
    "sequence_frame",
    "sort_dbmart",
    "sparsity_screen",
    "translate_sequences",
    "transitive_end_sequences",
    "unpack_duration",
    "write_dbmart_csv",
    "write_tseq_file",
]
