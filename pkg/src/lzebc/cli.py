"""Command-line front end over raw binary field files.

Raw files are headerless little-endian scalar streams, so the grid geometry
and scalar type must be given explicitly. All results go to stdout as a
single key=value line (or CSV for analyze); diagnostics go to stderr.

Exit codes: 0 success, 1 usage error, 2 data error, 3 corrupt archive.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import NoReturn, Sequence

import numpy as np

from .errors import CorruptArchiveError, DataError
from .grid import SCALAR_DTYPES, ChunkSpec, Dims, Field, ingest
from .pipeline import compress, decompress, parse_header, stats
from .quantize import QuantConfig
from .smoothness import analyze


class UsageError(Exception):
    """Bad invocation detected after argument parsing (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags by default; this tool reserves 2
    # for data errors.
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_dims(text: str) -> Dims:
    try:
        parts = [int(p) for p in text.split(",")]
        return Dims.of(*parts)
    except (ValueError, DataError) as exc:
        raise UsageError(f"bad dims {text!r}: {exc}") from exc


def _parse_eb(text: str) -> tuple[str, float]:
    mode, sep, value = text.partition(":")
    if not sep or mode not in ("rel", "abs"):
        raise UsageError(f"bad error bound {text!r}; expected rel:<v> or abs:<v>")
    try:
        return mode, float(value)
    except ValueError as exc:
        raise UsageError(f"bad error bound value {value!r}") from exc


def _parse_chunk(text: str | None, ndim: int) -> ChunkSpec | None:
    if text is None:
        return None
    try:
        edges = [int(p) for p in text.split(",")]
        return ChunkSpec(*edges)
    except (TypeError, ValueError, DataError) as exc:
        raise UsageError(f"bad chunk spec {text!r}: {exc}") from exc


def _read_field(path: str, dims: Dims, dtype: str) -> Field:
    itemsize = SCALAR_DTYPES[dtype].itemsize
    raw = _read_bytes(path)
    expected = dims.count * itemsize
    if len(raw) != expected:
        raise UsageError(
            f"{path}: file is {len(raw)} bytes but dims "
            f"{dims.nx},{dims.ny},{dims.nz} with {dtype} need {expected}"
        )
    return ingest(raw, dims, dtype)


def _read_bytes(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _write_bytes(path: str, blob: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(blob)


def _note(args, message: str) -> None:
    if args.verbose:
        print(message, file=sys.stderr)


def _cmd_compress(args) -> int:
    dims = _parse_dims(args.dims)
    mode, value = _parse_eb(args.eb)
    field = _read_field(args.input, dims, args.dtype)
    blob = compress(
        field, value, eb_mode=mode, cap=args.cap,
        workflow=None if args.workflow == "auto" else args.workflow,
        chunk=_parse_chunk(args.chunk, dims.ndim),
        select_mode=args.select_mode, threads=args.threads,
    )
    _write_bytes(args.output, blob)
    hdr = parse_header(blob)
    _note(args, f"eb_abs={hdr.eb_abs:.6g} archive={len(blob)} bytes")
    quality = stats(field, decompress(blob, threads=args.threads), len(blob))
    print(f"workflow={hdr.workflow.name} {quality.as_line()}")
    return 0


def _cmd_decompress(args) -> int:
    field = decompress(_read_bytes(args.input), threads=args.threads)
    hdr_dtype = SCALAR_DTYPES["f32" if field.values.dtype == np.float32 else "f64"]
    _write_bytes(args.output, field.values.astype(hdr_dtype).tobytes())
    _note(args, f"wrote {field.dims.count} samples")
    return 0


def _cmd_analyze(args) -> int:
    dims = _parse_dims(args.dims)
    mode, value = _parse_eb(args.eb)
    field = _read_field(args.input, dims, args.dtype)
    if mode == "rel":
        if field.value_range <= 0:
            raise DataError("constant field: use an absolute error bound")
        eb_abs = value * field.value_range
    else:
        eb_abs = value
    record = analyze(
        field, QuantConfig(eb_abs, args.cap),
        chunk=_parse_chunk(args.chunk, dims.ndim),
        dmax=args.dmax, seed=args.seed, mode=args.select_mode,
    )
    csv = record.to_csv()
    if args.output:
        _write_bytes(args.output, csv.encode())
    else:
        sys.stdout.write(csv)
    return 0


def _cmd_stats(args) -> int:
    dims = _parse_dims(args.dims)
    original = _read_field(args.original, dims, args.dtype)
    reconstructed = _read_field(args.reconstructed, dims, args.dtype)
    size = os.path.getsize(args.archive)
    print(stats(original, reconstructed, size).as_line())
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lzebc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, geometry=True, bound=True):
        if geometry:
            p.add_argument("-d", "--dims", required=True,
                           help="grid extents X[,Y[,Z]], x fastest")
            p.add_argument("-t", "--dtype", required=True, choices=("f32", "f64"))
        if bound:
            p.add_argument("-e", "--eb", default="rel:1e-4",
                           help="error bound, rel:<v> or abs:<v> (default rel:1e-4)")
            p.add_argument("--cap", type=int, default=1024,
                           help="quant-code dictionary size (power of two)")
            p.add_argument("--chunk", help="chunk edges CX[,CY[,CZ]]")
            p.add_argument("--select-mode", choices=("exact", "estimate"),
                           default="exact", help="workflow selection basis")
        p.add_argument("-T", "--threads", type=int, default=os.cpu_count() or 1)
        p.add_argument("-v", "--verbose", action="count", default=0)

    p = sub.add_parser("compress", help="compress a raw field file")
    common(p)
    p.add_argument("-w", "--workflow", choices=("auto", "huff", "rle", "rlevle"),
                   default="auto")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_compress)

    p = sub.add_parser("decompress", help="decode an archive to a raw field file")
    common(p, geometry=False, bound=False)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_decompress)

    p = sub.add_parser("analyze", help="profile compressibility, emit CSV")
    common(p)
    p.add_argument("--dmax", type=int, default=200, help="max pair separation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("input")
    p.add_argument("output", nargs="?", help="CSV path (stdout if omitted)")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("stats", help="compare two raw fields against an archive")
    common(p, bound=False)
    p.add_argument("original")
    p.add_argument("reconstructed")
    p.add_argument("archive")
    p.set_defaults(func=_cmd_stats)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Entry point returning the exit code instead of raising SystemExit."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lzebc: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"lzebc: error: {exc}", file=sys.stderr)
        return 1
    except CorruptArchiveError as exc:
        print(f"lzebc: corrupt archive: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"lzebc: data error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
