"""Chunked, resumable sweep of r_Q(24n + 35) over 0 <= n <= n_max.

Kernel: with Q = 3x^2 + 32 L(y, z) and L the Loeschian form,

    r_Q(N) = sum over x with 3x^2 <= N, 32 | N - 3x^2 of table[(N - 3x^2) / 32].

For N = 24n + 35 the divisibility condition depends only on n mod 4 and
x mod 16, and stepping n by 4 moves the table index by exactly 3. So for each
x a whole chunk is served by one strided slice of the table.
"""

from __future__ import annotations

import json
import logging
import os
import struct
import time
import zlib
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .arith import is_squarefree, isqrt
from .binaryqf import loeschian_table
from .modforms import Report
from .qseries import sc6_series
from .ternary import rq_fast

log = logging.getLogger(__name__)

__all__ = [
    "SweepConfig",
    "SweepReport",
    "ChunkResult",
    "CheckpointError",
    "sweep_positivity",
    "chunk_counts",
    "chunk_digest",
    "table_bound_for",
    "verify_alpoge",
    "verify_squarefree_theorem",
    "write_checkpoint",
    "read_checkpoint",
    "EXCEPTIONAL_N",
    "SWEEP_N_MAX",
]

SWEEP_N_MAX = 916348
DEFAULT_CHUNK = 65536
SCHEMA_VERSION = 1
CKPT_MAGIC = b"SC6CKPT1"
EXCEPTIONAL_N = (83, 323, 347, 1787)  # 24n + 35 for n = 2, 12, 13, 73

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


class CheckpointError(RuntimeError):
    def __init__(self, message: str, last_durable_n: int = -1):
        super().__init__(message)
        self.last_durable_n = last_durable_n


@dataclass
class SweepConfig:
    n_max: int = SWEEP_N_MAX
    chunk_size: int = DEFAULT_CHUNK
    worker_count: int = 1
    checkpoint_path: str | os.PathLike | None = None
    report_path: str | os.PathLike | None = None
    kernel: str = "fast"

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError("n_max must be nonnegative")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")
        if self.worker_count < 1:
            raise ValueError("worker_count must be positive")
        if self.kernel not in ("fast", "counting"):
            raise ValueError(f"unknown kernel {self.kernel!r}")

    def chunks(self) -> list[tuple[int, int]]:
        return [
            (s, min(s + self.chunk_size - 1, self.n_max))
            for s in range(0, self.n_max + 1, self.chunk_size)
        ]


@dataclass(frozen=True)
class ChunkResult:
    start: int
    end: int
    exceptions: tuple[int, ...]
    digest: int


@dataclass
class SweepReport:
    n_max: int
    exceptions: list[int]
    chunk_digests: list[tuple[int, int, int]]
    elapsed: float
    table_bound: int
    kernel: str = "fast"

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "n_max": self.n_max,
            "table_bound": self.table_bound,
            "kernel": self.kernel,
            "exceptions": self.exceptions,
            "chunk_digests": [
                {"start": s, "end": e, "digest_hex": f"{d:016x}"} for s, e, d in self.chunk_digests
            ],
            "elapsed_ms": int(round(self.elapsed * 1000)),
        }

    def write(self, path) -> None:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n")
        os.replace(tmp, path)


def table_bound_for(n_max: int) -> int:
    return -(-(24 * n_max + 35) // 32)


# --- kernels --------------------------------------------------------------


def chunk_counts(start: int, end: int, table: np.ndarray) -> np.ndarray:
    """r_Q(24n + 35) for start <= n <= end, as an int64 array."""
    N_top = 24 * end + 35
    if len(table) <= N_top // 32:
        raise ValueError("Loeschian table too small for this chunk")
    length = end - start + 1
    counts = np.zeros(length, dtype=np.int64)
    for x in range(isqrt(N_top // 3) + 1):
        weight = 1 if x == 0 else 2
        t = 3 * x * x
        for r in range(4):
            if (24 * r + 35 - t) % 32:
                continue
            # first n >= max(start, n with 24n + 35 >= t) and n = r (mod 4)
            n_lo = max(start, -(-(t - 35) // 24))
            n0 = n_lo + (r - n_lo) % 4
            if n0 > end:
                continue
            cnt = (end - n0) // 4 + 1
            i0 = (24 * n0 + 35 - t) // 32
            counts[n0 - start :: 4][:cnt] += weight * table[i0 : i0 + 3 * cnt : 3].astype(np.int64)
    return counts


def _counting_kernel(start: int, end: int, table: np.ndarray) -> np.ndarray:
    return np.array([rq_fast(24 * n + 35, table) for n in range(start, end + 1)], dtype=np.int64)


def chunk_digest(start: int, counts) -> int:
    """64-bit FNV-1a style fold over (n, r_Q(n)) as little-endian u64 words."""
    h = FNV_OFFSET
    for i, r in enumerate(np.asarray(counts).tolist()):
        h = ((h ^ (start + i)) * FNV_PRIME) & _MASK64
        h = ((h ^ r) * FNV_PRIME) & _MASK64
    return h


_TABLE: np.ndarray | None = None


def _init_worker(table: np.ndarray) -> None:
    global _TABLE
    _TABLE = table


def _run_chunk(start: int, end: int, kernel: str, table: np.ndarray | None = None) -> ChunkResult:
    table = _TABLE if table is None else table
    counts = chunk_counts(start, end, table) if kernel == "fast" else _counting_kernel(start, end, table)
    exc = tuple(int(start + i) for i in np.flatnonzero(counts == 0))
    return ChunkResult(start, end, exc, chunk_digest(start, counts))


# --- checkpoints ------------------------------------------------------------


def write_checkpoint(path, n_max: int, table_bound: int, results: list[ChunkResult]) -> None:
    """Atomically persist completed chunks.

    Layout (little-endian): magic, n_max u64, table_bound u64, range count
    u32, (start u64, end u64) per range, exception count u32, exceptions u64,
    digest count u32, one u64 digest per range, CRC32 u32 of all prior bytes.
    """
    results = sorted(results, key=lambda r: r.start)
    exceptions = sorted({n for r in results for n in r.exceptions})
    body = bytearray(CKPT_MAGIC)
    body += struct.pack("<QQI", n_max, table_bound, len(results))
    for r in results:
        body += struct.pack("<QQ", r.start, r.end)
    body += struct.pack("<I", len(exceptions))
    body += struct.pack(f"<{len(exceptions)}Q", *exceptions)
    body += struct.pack("<I", len(results))
    body += struct.pack(f"<{len(results)}Q", *(r.digest for r in results))
    body += struct.pack("<I", zlib.crc32(body))
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        with open(tmp, "wb") as fh:
            fh.write(body)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except OSError as exc:
        raise CheckpointError(f"cannot write checkpoint {path}: {exc}", _durable_prefix(results)) from exc


def _durable_prefix(results: list[ChunkResult]) -> int:
    last = -1
    for r in sorted(results, key=lambda r: r.start):
        if r.start != last + 1:
            break
        last = r.end
    return last


def read_checkpoint(path) -> tuple[int, int, list[ChunkResult]]:
    """Return (n_max, table_bound, completed chunks); refuses corrupt files."""
    data = Path(path).read_bytes()
    fresh = "delete the checkpoint and start a fresh run"
    if len(data) < len(CKPT_MAGIC) + 24 or data[: len(CKPT_MAGIC)] != CKPT_MAGIC:
        raise CheckpointError(f"{path}: not a SC6CKPT1 checkpoint; {fresh}")
    (crc,) = struct.unpack_from("<I", data, len(data) - 4)
    if zlib.crc32(data[:-4]) != crc:
        raise CheckpointError(f"{path}: CRC mismatch; {fresh}")
    try:
        off = len(CKPT_MAGIC)
        n_max, table_bound, n_ranges = struct.unpack_from("<QQI", data, off)
        off += 20
        ranges = [struct.unpack_from("<QQ", data, off + 16 * i) for i in range(n_ranges)]
        off += 16 * n_ranges
        (n_exc,) = struct.unpack_from("<I", data, off)
        off += 4
        exceptions = struct.unpack_from(f"<{n_exc}Q", data, off)
        off += 8 * n_exc
        (n_dig,) = struct.unpack_from("<I", data, off)
        off += 4
        digests = struct.unpack_from(f"<{n_dig}Q", data, off)
        off += 8 * n_dig
    except struct.error as exc:
        raise CheckpointError(f"{path}: truncated checkpoint; {fresh}") from exc
    if off != len(data) - 4 or n_dig != n_ranges:
        raise CheckpointError(f"{path}: malformed checkpoint; {fresh}")
    results = [
        ChunkResult(s, e, tuple(n for n in exceptions if s <= n <= e), d)
        for (s, e), d in zip(ranges, digests)
    ]
    if sum(len(r.exceptions) for r in results) != len(exceptions):
        raise CheckpointError(f"{path}: exceptions outside completed ranges; {fresh}")
    return n_max, table_bound, results


# --- the sweep --------------------------------------------------------------


def sweep_positivity(
    cfg: SweepConfig,
    on_chunk: Callable[[ChunkResult], None] | None = None,
) -> SweepReport:
    """Find every n <= cfg.n_max with r_Q(24n + 35) = 0.

    ``on_chunk`` runs in the parent after each chunk is recorded (and
    checkpointed); an exception raised there aborts the sweep, which is how
    the tests simulate an interruption.
    """
    t0 = time.perf_counter()
    bound = table_bound_for(cfg.n_max)
    grid = cfg.chunks()
    done: dict[int, ChunkResult] = {}

    ckpt = Path(cfg.checkpoint_path) if cfg.checkpoint_path else None
    if ckpt is not None and ckpt.exists():
        n_max, tb, prior = read_checkpoint(ckpt)
        if n_max != cfg.n_max or tb != bound:
            raise CheckpointError(
                f"checkpoint is for n_max={n_max}, table_bound={tb}; "
                f"requested n_max={cfg.n_max}. Delete it to start fresh.",
                _durable_prefix(prior),
            )
        valid = set(grid)
        for r in prior:
            if (r.start, r.end) not in valid:
                raise CheckpointError(
                    f"checkpoint range {r.start}..{r.end} does not match chunk size {cfg.chunk_size}",
                    _durable_prefix(prior),
                )
            done[r.start] = r
        log.info("resuming: %d of %d chunks already done", len(done), len(grid))

    table = loeschian_table(bound)
    todo = [c for c in grid if c[0] not in done]

    def record(res: ChunkResult):
        done[res.start] = res
        if ckpt is not None:
            write_checkpoint(ckpt, cfg.n_max, bound, list(done.values()))
        if on_chunk is not None:
            on_chunk(res)

    if cfg.worker_count == 1 or len(todo) <= 1:
        for s, e in todo:
            record(_run_chunk(s, e, cfg.kernel, table))
    else:
        with ProcessPoolExecutor(cfg.worker_count, initializer=_init_worker, initargs=(table,)) as pool:
            futures = [pool.submit(_run_chunk, s, e, cfg.kernel) for s, e in todo]
            try:
                for fut in as_completed(futures):
                    record(fut.result())
            except BaseException:
                for fut in futures:
                    fut.cancel()
                raise

    ordered = [done[s] for s, _ in grid]
    report = SweepReport(
        n_max=cfg.n_max,
        exceptions=sorted(n for r in ordered for n in r.exceptions),
        chunk_digests=[(r.start, r.end, r.digest) for r in ordered],
        elapsed=time.perf_counter() - t0,
        table_bound=bound,
        kernel=cfg.kernel,
    )
    if cfg.report_path:
        report.write(cfg.report_path)
    return report


# --- companion verifications ----------------------------------------------


def verify_alpoge(n_max: int, series=None) -> Report:
    """12 sc6(n) = r_Q(24n + 35) for all n <= n_max.

    The left side comes from eta-product arithmetic, the right side from
    counting lattice points through the Loeschian table.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    sc6 = series if series is not None else sc6_series(n_max + 1)
    table = loeschian_table(table_bound_for(n_max))
    counts = chunk_counts(0, n_max, table)
    failures = []
    for n in range(n_max + 1):
        if 12 * sc6[n] != counts[n]:
            failures.append((n, int(sc6[n]), int(counts[n])))
            if len(failures) >= 10:
                break
    return Report("12 sc6(n) = r_Q(24n+35)", not failures, n_max + 1, failures)


def verify_squarefree_theorem(p_list=(5, 7, 11, 13), scan_limit: int = 10**5) -> Report:
    """Non-squarefree N = 24n + 35 are represented by Q.

    Checks r_Q(N p^2) > 0 for the four unrepresented squarefree N and each
    prime p in p_list not dividing N, then scans every non-squarefree
    N <= scan_limit directly.
    """
    primes = list(p_list)
    if any(p < 5 for p in primes):
        raise ValueError("primes must be at least 5")
    failures = []
    for N in EXCEPTIONAL_N:
        if not is_squarefree(N):
            failures.append(("exceptional N not squarefree", N))
    pairs = [(N, p) for N in EXCEPTIONAL_N for p in primes if N % p]
    top = max([N * p * p for N, p in pairs] + [scan_limit])
    table = loeschian_table(top // 32 + 1)
    lifted = {}
    for N, p in pairs:
        r = rq_fast(N * p * p, table)
        lifted[(N, p)] = r
        if r <= 0:
            failures.append(("r_Q(N p^2) = 0", N, p))
    n_top = (scan_limit - 35) // 24
    scanned = 0
    if n_top >= 0:
        counts = chunk_counts(0, n_top, table)
        for n in range(n_top + 1):
            N = 24 * n + 35
            if not is_squarefree(N):
                scanned += 1
                if counts[n] <= 0:
                    failures.append(("non-squarefree N unrepresented", N))
    return Report(
        "non-squarefree N are represented",
        not failures,
        len(pairs) + scanned,
        failures,
        {"lifted": lifted, "non_squarefree_scanned": scanned},
    )
