"""Sampled-madogram smoothness analysis and codec workflow selection.

A madogram profiles how much sampled value pairs differ as a function of
their flat-index separation. The binary variant scores pairs 0/1 (equal or
not); its complement is a smoothness score in [0, 1]. Workflow selection
compares the expected Huffman bits per symbol against a fixed threshold:
streams that would code below it are run-length friendly, so the run-length
path with variable-length coded values wins there.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from io import StringIO

import numpy as np

from .codebook import Codebook, EntropyReport, entropy_report, histogram
from .errors import DataError
from .grid import ChunkSpec, Field
from .quantize import QuantConfig, construct_grid, prequantize

#: Streams expected to Huffman-code at or below this many bits per symbol
#: are dominated by repeats, where run-length coding compresses further.
RLE_THRESHOLD_BITS = 1.09

#: Largest pair separation sampled by default.
DEFAULT_DMAX = 200


class Workflow(IntEnum):
    """Symbol-stream codec choice recorded in archives."""

    HUFFMAN = 0
    RLE = 1
    RLE_VLE = 2


@dataclass(frozen=True)
class MadogramReport:
    """Per-distance mean variance of sampled pairs plus its scalar collapse."""

    kind: str  # "binary" | "absolute"
    distances: np.ndarray  # int64, measured separations, ascending
    variance: np.ndarray  # float64, mean v(d) per measured distance
    sample_count: int
    seed: int
    roughness: float  # unweighted mean of v(d)
    smoothness: float | None  # 1 - roughness, binary kind only


@dataclass(frozen=True)
class WorkflowDecision:
    """Chosen codec path and the bit estimate that drove it."""

    chosen: Workflow
    b_estimate: float
    basis: str  # "exact" | "bounds"
    threshold: float = RLE_THRESHOLD_BITS


def default_sample_count(count: int, dmax: int = DEFAULT_DMAX) -> int:
    """Sampling budget: at least 10 per distance, capped by data size."""
    return max(10 * dmax, min(count // 10, 100 * dmax))


def sample_madogram(
    values: np.ndarray,
    kind: str = "binary",
    n: int | None = None,
    dmax: int = DEFAULT_DMAX,
    seed: int = 0,
) -> MadogramReport:
    """Estimate v(d) for d in [1, dmax] from n random pairs (a, a+d).

    Pairs whose second point falls outside the sequence are discarded and
    redrawn, so every sample contributes. Deterministic for a given seed.
    """
    if kind not in ("binary", "absolute"):
        raise DataError(f"unknown madogram kind {kind!r}")
    flat = np.asarray(values).reshape(-1)
    count = len(flat)
    if count < 2:
        raise DataError("madogram needs at least 2 elements")
    if n is None:
        n = default_sample_count(count, dmax)
    if n < 1:
        raise DataError("sample count must be >= 1")
    z = flat.astype(np.float64)
    rng = np.random.default_rng(seed)
    sums = np.zeros(dmax + 1)
    hits = np.zeros(dmax + 1, np.int64)
    remaining = n
    while remaining:
        a = rng.integers(0, count, size=remaining)
        d = rng.integers(1, dmax + 1, size=remaining)
        ok = a + d < count
        a, d = a[ok], d[ok]
        diff = z[a + d] != z[a] if kind == "binary" else np.abs(z[a + d] - z[a])
        np.add.at(sums, d, diff)
        np.add.at(hits, d, 1)
        remaining -= int(ok.sum())
    measured = np.flatnonzero(hits)
    v = sums[measured] / hits[measured]
    roughness = float(v.mean())
    smooth = 1.0 - roughness if kind == "binary" else None
    return MadogramReport(kind, measured.astype(np.int64), v, n, seed, roughness, smooth)


def select_workflow(
    counts: np.ndarray,
    mode: str = "exact",
    threshold: float = RLE_THRESHOLD_BITS,
    override: Workflow | None = None,
) -> WorkflowDecision:
    """Pick the symbol-stream codec from histogram statistics.

    exact mode builds the codebook and uses the true average code length;
    estimate mode takes the midpoint of the entropy-plus-redundancy bracket.
    An explicit override wins but the estimate is still reported.
    """
    if mode == "exact":
        book = Codebook.from_counts(counts)
        b = book.average_bits(counts)
        basis = "exact"
    elif mode == "estimate":
        rep = entropy_report(counts)
        b = (rep.b_lo + rep.b_hi) / 2.0
        basis = "bounds"
    else:
        raise DataError(f"unknown selection mode {mode!r}")
    if override is not None:
        return WorkflowDecision(override, b, basis, threshold)
    chosen = Workflow.RLE_VLE if b <= threshold else Workflow.HUFFMAN
    return WorkflowDecision(chosen, b, basis, threshold)


@dataclass(frozen=True)
class AnalysisRecord:
    """Madogram profiles of both stages plus histogram stats and decision."""

    reports: tuple[tuple[str, MadogramReport], ...]  # (stage, report)
    entropy: EntropyReport
    decision: WorkflowDecision
    smoothness: float  # binary smoothness of the quantized data

    def to_csv(self) -> str:
        out = StringIO()
        out.write("stage,kind,distance,variance\n")
        for stage, rep in self.reports:
            for d, v in zip(rep.distances, rep.variance):
                out.write(f"{stage},{rep.kind},{d},{v:.9g}\n")
        e, dec = self.entropy, self.decision
        out.write(f"# H={e.entropy:.9g}\n")
        out.write(f"# p1={e.p1:.9g}\n")
        out.write(f"# b_lo={e.b_lo:.9g}\n")
        out.write(f"# b_hi={e.b_hi:.9g}\n")
        b_exact = float("nan") if e.b_exact is None else e.b_exact
        out.write(f"# b_exact={b_exact:.9g}\n")
        out.write(f"# smoothness={self.smoothness:.9g}\n")
        out.write(f"# decision={dec.chosen.name}\n")
        return out.getvalue()


def analyze(
    field: Field,
    cfg: QuantConfig,
    chunk: ChunkSpec | None = None,
    dmax: int = DEFAULT_DMAX,
    seed: int = 0,
    mode: str = "exact",
) -> AnalysisRecord:
    """Profile a field's compressibility before and after quantization."""
    chunk = chunk or ChunkSpec.default_for(field.dims.ndim)
    prequant = prequantize(field, cfg)
    quant, _ = construct_grid(prequant, cfg, chunk)
    reports = []
    for stage, data in (("prequant", prequant.codes), ("quant-code", quant.codes)):
        for kind in ("binary", "absolute"):
            reports.append((stage, sample_madogram(data, kind, dmax=dmax, seed=seed)))
    counts = histogram(quant.codes, cfg.cap)
    book = Codebook.from_counts(counts)
    rep = entropy_report(counts, book)
    decision = select_workflow(counts, mode=mode)
    field_binary = reports[0][1]
    assert field_binary.kind == "binary"
    return AnalysisRecord(tuple(reports), rep, decision, float(field_binary.smoothness or 0.0))
