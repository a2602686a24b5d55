"""Midstate-sharing restructuring of Bitcoin's double-SHA-256 mining loop.

The library decomposes SHA-256 into separately schedulable stages, models
the 80-byte block header as the two chunks the first hash actually sees,
builds sets of header candidates that share their second chunk's Message
bytes, and runs the classic and the swapped (shared-expansion) mining
loops over them with exact operation counters.  A gain model ties the
counters back to the closed-form saving x(n-1)/n.
"""

from .backend import available_backends, default_backend_name, get_backend
from .gain import (
    BenchSetup,
    GainParams,
    GainReport,
    InsufficientSamples,
    MismatchedWorkload,
    WallclockResult,
    bench_wallclock,
    counter_gain,
    measure_gain,
    predicted_gain,
    synthetic_set,
)
from .header import (
    BadHex,
    BadLength,
    BlockHeader,
    Target,
    UnsupportedEncoding,
    decode_compact,
    display_hex,
    double_sha,
    encode_compact,
    meets_target,
    parse_header_hex,
    second_sha_chunk,
    split_chunks,
)
from .loops import (
    IndivisibleGrouping,
    MessageMismatch,
    NonceRange,
    OpCounters,
    Solution,
    SolutionMismatch,
    asicboost_scan,
    classic_scan,
    lowtoggle_schedule,
    multicore_schedule,
    reconstruct_header,
)
from .sha_stages import (
    Chunk,
    HashState,
    INITIAL_STATE,
    ScheduleWords,
    compress,
    digest_one_chunk,
    expand,
    feed_forward,
    pad_message,
)
from .workbuilder import (
    BudgetExhausted,
    CollidingSet,
    CollisionConfig,
    EmptyLeafSet,
    FixedHeaderFields,
    MerkleLeafSet,
    TemplateBitsNotZero,
    WorkItem,
    candidate_root_stream,
    find_colliding_set,
    free_bits_set,
    load_work_set,
    make_work_item,
    merkle_root,
    regenerate_root,
    save_work_set,
    work_set_from_dict,
    work_set_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "available_backends",
    "default_backend_name",
    "get_backend",
    "BenchSetup",
    "GainParams",
    "GainReport",
    "InsufficientSamples",
    "MismatchedWorkload",
    "WallclockResult",
    "bench_wallclock",
    "counter_gain",
    "measure_gain",
    "predicted_gain",
    "synthetic_set",
    "BadHex",
    "BadLength",
    "BlockHeader",
    "Target",
    "UnsupportedEncoding",
    "decode_compact",
    "display_hex",
    "double_sha",
    "encode_compact",
    "meets_target",
    "parse_header_hex",
    "second_sha_chunk",
    "split_chunks",
    "IndivisibleGrouping",
    "MessageMismatch",
    "NonceRange",
    "OpCounters",
    "Solution",
    "SolutionMismatch",
    "asicboost_scan",
    "classic_scan",
    "lowtoggle_schedule",
    "multicore_schedule",
    "reconstruct_header",
    "Chunk",
    "HashState",
    "INITIAL_STATE",
    "ScheduleWords",
    "compress",
    "digest_one_chunk",
    "expand",
    "feed_forward",
    "pad_message",
    "BudgetExhausted",
    "CollidingSet",
    "CollisionConfig",
    "EmptyLeafSet",
    "FixedHeaderFields",
    "MerkleLeafSet",
    "TemplateBitsNotZero",
    "WorkItem",
    "candidate_root_stream",
    "find_colliding_set",
    "free_bits_set",
    "load_work_set",
    "make_work_item",
    "merkle_root",
    "regenerate_root",
    "save_work_set",
    "work_set_from_dict",
    "work_set_to_dict",
    "__version__",
]
