"""Error-bounded lossy compression for 1D/2D/3D scientific floating-point grids.

The pipeline integerizes samples against twice the error bound, predicts each
element from its already-known grid neighbors, and entropy-codes the resulting
delta codes with either a canonical Huffman code or run-length encoding,
picking the path from the stream's measured statistics. Decompression is
exact over the integer stages, so every decoded sample lands within the
recorded error bound of the original.
"""

from .codebook import (
    Codebook,
    EntropyReport,
    entropy_bits,
    entropy_report,
    histogram,
)
from .errors import CompressionError, CorruptArchiveError, DataError, QuantOverflowError
from .grid import ChunkSpec, Dims, Field, ingest
from .huffman import BitStream, decode, encode
from .pipeline import (
    ArchiveHeader,
    QualityStats,
    compress,
    decompress,
    parse_header,
    stats,
)
from .quantize import OutlierList, PrequantGrid, QuantConfig, QuantGrid
from .reconstruct import dequantize, reconstruct_grid
from .rle import run_length_decode, run_length_encode
from .smoothness import (
    AnalysisRecord,
    MadogramReport,
    Workflow,
    WorkflowDecision,
    analyze,
    sample_madogram,
    select_workflow,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisRecord",
    "ArchiveHeader",
    "BitStream",
    "ChunkSpec",
    "Codebook",
    "CompressionError",
    "CorruptArchiveError",
    "DataError",
    "Dims",
    "EntropyReport",
    "Field",
    "MadogramReport",
    "OutlierList",
    "PrequantGrid",
    "QualityStats",
    "QuantConfig",
    "QuantGrid",
    "QuantOverflowError",
    "Workflow",
    "WorkflowDecision",
    "analyze",
    "compress",
    "decode",
    "decompress",
    "dequantize",
    "encode",
    "entropy_bits",
    "entropy_report",
    "histogram",
    "ingest",
    "parse_header",
    "reconstruct_grid",
    "run_length_decode",
    "run_length_encode",
    "sample_madogram",
    "select_workflow",
    "stats",
    "__version__",
]
