import json
import random

import numpy as np
import pytest

from sc6verify.binaryqf import loeschian_table
from sc6verify.sweep import (
    CheckpointError,
    ChunkResult,
    SweepConfig,
    chunk_counts,
    chunk_digest,
    read_checkpoint,
    sweep_positivity,
    table_bound_for,
    verify_alpoge,
    verify_squarefree_theorem,
    write_checkpoint,
)
from sc6verify.sweep import _counting_kernel
from sc6verify.ternary import Q_MAIN, rep_count


def comparable(report):
    d = report.to_json()
    d.pop("elapsed_ms")
    return d


class Interrupt(Exception):
    pass


def test_small_sweeps():
    assert sweep_positivity(SweepConfig(n_max=0)).exceptions == []
    assert sweep_positivity(SweepConfig(n_max=12, chunk_size=5)).exceptions == [2, 12]
    # 73 <= 100, so it belongs in the answer
    assert sweep_positivity(SweepConfig(n_max=100, chunk_size=16)).exceptions == [2, 12, 13, 73]


def test_config_validation():
    for kwargs in ({"n_max": -1}, {"chunk_size": 0}, {"worker_count": 0}, {"kernel": "slow"}):
        with pytest.raises(ValueError):
            SweepConfig(**kwargs)
    assert SweepConfig(n_max=10, chunk_size=4).chunks() == [(0, 3), (4, 7), (8, 10)]


def test_kernel_soundness(table_1e6):
    n_max = (10**6 - 35) // 24
    counts = chunk_counts(0, n_max, table_1e6)
    rng = random.Random(17)
    for n in rng.sample(range(n_max + 1), 500):
        assert counts[n] == rep_count(Q_MAIN, 24 * n + 35), n


def test_chunk_boundaries_do_not_matter():
    table = loeschian_table(table_bound_for(3000))
    whole = chunk_counts(0, 3000, table)
    pieces = np.concatenate([chunk_counts(s, min(s + 136, 3000), table) for s in range(0, 3001, 137)])
    assert (whole == pieces).all()
    assert (chunk_counts(1000, 1500, table) == _counting_kernel(1000, 1500, table)).all()


def test_kernel_rejects_small_table():
    with pytest.raises(ValueError):
        chunk_counts(0, 1000, loeschian_table(10))


def test_counting_kernel_gives_same_report():
    fast = sweep_positivity(SweepConfig(n_max=3000, chunk_size=500))
    slow = sweep_positivity(SweepConfig(n_max=3000, chunk_size=500, kernel="counting"))
    assert fast.exceptions == slow.exceptions and fast.chunk_digests == slow.chunk_digests


def test_monotone_coverage():
    small = sweep_positivity(SweepConfig(n_max=10**3)).exceptions
    large = sweep_positivity(SweepConfig(n_max=10**4)).exceptions
    assert small == [n for n in large if n <= 10**3]


def test_digest_is_fnv1a_fold():
    h = 0xCBF29CE484222325
    for word in (5, 12, 6, 0):
        h = ((h ^ word) * 0x100000001B3) % 2**64
    assert chunk_digest(5, [12, 0]) == h


def test_determinism_across_workers():
    reports = [
        comparable(sweep_positivity(SweepConfig(n_max=10**4, chunk_size=1000, worker_count=w)))
        for w in (1, 4, 8)
    ]
    assert reports[0] == reports[1] == reports[2]


def test_interrupt_and_resume(tmp_path):
    ckpt = tmp_path / "run.ckpt"
    reference = sweep_positivity(SweepConfig(n_max=10**4, chunk_size=1000, report_path=tmp_path / "a.json"))
    seen = []

    def stop_after_five(res):
        seen.append(res)
        if len(seen) == 5:
            raise Interrupt

    with pytest.raises(Interrupt):
        sweep_positivity(SweepConfig(n_max=10**4, chunk_size=1000, checkpoint_path=ckpt), stop_after_five)
    n_max, bound, done = read_checkpoint(ckpt)
    assert n_max == 10**4 and bound == table_bound_for(10**4) and len(done) == 5
    resumed = sweep_positivity(
        SweepConfig(n_max=10**4, chunk_size=1000, checkpoint_path=ckpt, report_path=tmp_path / "b.json")
    )
    assert comparable(resumed) == comparable(reference)
    a = json.loads((tmp_path / "a.json").read_text())
    b = json.loads((tmp_path / "b.json").read_text())
    a.pop("elapsed_ms"), b.pop("elapsed_ms")
    assert a == b


def test_fresh_run_without_checkpoint(tmp_path):
    ckpt = tmp_path / "new.ckpt"
    report = sweep_positivity(SweepConfig(n_max=200, chunk_size=50, checkpoint_path=ckpt))
    assert report.exceptions == [2, 12, 13, 73]
    assert len(read_checkpoint(ckpt)[2]) == 5


def test_checkpoint_mismatches(tmp_path):
    ckpt = tmp_path / "c.ckpt"
    sweep_positivity(SweepConfig(n_max=2000, chunk_size=500, checkpoint_path=ckpt))
    with pytest.raises(CheckpointError):
        sweep_positivity(SweepConfig(n_max=3000, chunk_size=500, checkpoint_path=ckpt))
    with pytest.raises(CheckpointError):
        sweep_positivity(SweepConfig(n_max=2000, chunk_size=400, checkpoint_path=ckpt))


def test_checkpoint_corruption(tmp_path):
    ckpt = tmp_path / "d.ckpt"
    results = [ChunkResult(0, 99, (2, 12, 13, 73), 123), ChunkResult(100, 199, (), 456)]
    write_checkpoint(ckpt, 199, table_bound_for(199), results)
    assert read_checkpoint(ckpt) == (199, table_bound_for(199), results)

    data = bytearray(ckpt.read_bytes())
    data[20] ^= 1
    ckpt.write_bytes(bytes(data))
    with pytest.raises(CheckpointError, match="CRC"):
        read_checkpoint(ckpt)

    ckpt.write_bytes(b"NOTACKPT" + bytes(40))
    with pytest.raises(CheckpointError):
        read_checkpoint(ckpt)


def test_checkpoint_write_failure_reports_durable_prefix(tmp_path):
    results = [ChunkResult(0, 9, (2,), 1), ChunkResult(10, 19, (12, 13), 2), ChunkResult(30, 39, (), 3)]
    with pytest.raises(CheckpointError) as info:
        write_checkpoint(tmp_path / "missing" / "x.ckpt", 39, 31, results)
    assert info.value.last_durable_n == 19


def test_report_schema(tmp_path):
    report = sweep_positivity(SweepConfig(n_max=300, chunk_size=100, report_path=tmp_path / "r.json"))
    data = json.loads((tmp_path / "r.json").read_text())
    assert set(data) == {"schema_version", "n_max", "table_bound", "kernel", "exceptions", "chunk_digests", "elapsed_ms"}
    assert data["exceptions"] == [2, 12, 13, 73] and data["kernel"] == "fast"
    assert [(d["start"], d["end"]) for d in data["chunk_digests"]] == [(0, 99), (100, 199), (200, 299), (300, 300)]
    assert all(len(d["digest_hex"]) == 16 for d in data["chunk_digests"])
    assert data == report.to_json() | {"elapsed_ms": data["elapsed_ms"]}


def test_verify_alpoge_small():
    rep = verify_alpoge(2000)
    assert rep.passed and rep.checked == 2001


def test_verify_alpoge_detects_mismatch():
    class Broken:
        def __getitem__(self, n):
            return 1

    assert not verify_alpoge(20, series=Broken()).passed


def test_verify_squarefree_theorem():
    rep = verify_squarefree_theorem(scan_limit=2 * 10**4)
    assert rep.passed
    with pytest.raises(ValueError):
        verify_squarefree_theorem(p_list=(3,))
