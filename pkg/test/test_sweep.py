import asyncio
import json
from unittest.mock import patch

import pytest

from word_map_lab.catalog import CLASS2_SAMPLES
from word_map_lab.errors import CatalogError, WordError
from word_map_lab.sweep import (
    SweepJob,
    build_jobs,
    parse_word_spec,
    read_words_file,
    run_count_sweep,
    run_job,
    run_sweep,
)
from word_map_lab.verification import Verdict
from word_map_lab.words import build_named_word, parse_word, render_word
from conftest import WORD_CORPUS

# --- Inputs ---

def test_parse_word_spec():
    assert parse_word_spec("wk:2") == build_named_word("wk", 2)
    assert parse_word_spec("[x1,x2]") == parse_word("[x1,x2]")

def test_read_words_file(tmp_path):
    path = tmp_path / "words.txt"
    path.write_text("# corpus\n[x1,x2]\n\nx1^2  # squares\nwk:1\n", encoding="utf-8")
    assert read_words_file(str(path)) == ["[x1,x2]", "x1^2", "wk:1"]
    with pytest.raises(WordError):
        read_words_file(str(tmp_path / "missing.txt"))

def test_build_jobs_order():
    jobs = build_jobs(["thmA", "rational"], ["q8", "d4"], ["x1", "x1^2"])
    assert len(jobs) == 8
    assert jobs[0] == SweepJob("thmA", "q8", "x1")
    assert jobs[1] == SweepJob("thmA", "q8", "x1^2")
    assert jobs[2] == SweepJob("thmA", "d4", "x1")
    assert jobs[-1] == SweepJob("rational", "d4", "x1^2")

def test_run_job_with_named_claim():
    report = run_job(SweepJob("thmC", "catalog:heisenberg(3)", k=1))
    assert report.verdict is Verdict.HOLDS

# --- Async sweeps ---

@pytest.mark.asyncio
async def test_sweep_preserves_input_order():
    jobs = build_jobs(["thmA", "chiral"], ["catalog:q8", "catalog:heisenberg(3)", "catalog:symmetric(3)"],
                      ["[x1,x2]", "x1^2 x2^3"])
    reports = await run_sweep(jobs, workers=2)
    assert [r.claim for r in reports] == ["thmA"] * 6 + ["achiral"] * 6
    assert [r.group for r in reports[:6]] == ["q8", "q8", "heisenberg(3)", "heisenberg(3)", "symmetric(3)", "symmetric(3)"]
    assert [r.word for r in reports[:2]] == [render_word(parse_word("[x1,x2]")), "x1^2 x2^3"]
    assert reports[4].verdict is Verdict.NOT_APPLICABLE


@pytest.mark.asyncio
async def test_sweep_raises_first_failure_in_input_order():
    jobs = [SweepJob("thmA", "q8", "x1"), SweepJob("thmA", "nosuchgroup", "x1"), SweepJob("thmA", "q8", "x1 x2 (")]
    with pytest.raises(CatalogError):
        await run_sweep(jobs)

@pytest.mark.asyncio
async def test_sweep_runs_jobs_on_threads():
    with patch.object(asyncio, "to_thread", wraps=asyncio.to_thread) as to_thread:
        await run_sweep([SweepJob("rational", "q8", "x1^2")])
    assert to_thread.call_count == 1

@pytest.mark.asyncio
async def test_count_sweep_is_deterministic():
    groups = ["catalog:q8", "catalog:d4"]
    words = ["[x1,x2]", "x1^2 x2^2", "wk:2"]
    first = await run_count_sweep(groups, words, workers=1)
    second = await run_count_sweep(groups, words, workers=4)
    assert first == second
    assert [d["group"] for d in first] == ["q8"] * 3 + ["d4"] * 3
    assert first[0]["counts"] == {"1": "40", "c": "24"}

@pytest.mark.asyncio
async def test_brute_force_exports_do_not_depend_on_workers():
    groups = [f"catalog:{name}" for name in CLASS2_SAMPLES]
    with patch("word_map_lab.fibers.WORDLAB_CHUNK", 4096):
        single = await run_count_sweep(groups, WORD_CORPUS, method="brute", workers=1)
        parallel = await run_count_sweep(groups, WORD_CORPUS, method="brute", workers=8)
    assert len(single) == len(CLASS2_SAMPLES) * len(WORD_CORPUS)
    assert json.dumps(single, separators=(",", ":")) == json.dumps(parallel, separators=(",", ":"))
