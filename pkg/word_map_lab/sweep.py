import asyncio
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

from .catalog import resolve_group
from .errors import WordError
from .fibers import count_fibers
from .verification import VerificationReport, verify_claim
from .words import Word, parse_named_word, parse_word

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepJob:
    claim: str
    group: str
    word: Optional[str] = None
    k: Optional[int] = None
    other: Optional[str] = None


def parse_word_spec(text: str) -> Word:
    """Word text, or a named word such as "wk:2"."""
    if ":" in text:
        return parse_named_word(text)
    return parse_word(text)


def read_words_file(path: str) -> List[str]:
    """One word per line; blank lines and '#' comments are skipped."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise WordError(f"cannot read words file {path}: {e}")
    words = []
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if line:
            words.append(line)
    return words


def build_jobs(claims: Sequence[str], groups: Sequence[str], words: Sequence[str]) -> List[SweepJob]:
    """Cartesian product in (claim, group, word) order."""
    return [SweepJob(claim, group, word) for claim in claims for group in groups for word in words]


def run_job(job: SweepJob, *, budget: Optional[int] = None, workers: Optional[int] = None) -> VerificationReport:
    G = resolve_group(job.group)
    w = parse_word_spec(job.word) if job.word else None
    other = resolve_group(job.other) if job.other else None
    return verify_claim(job.claim, G, w, k=job.k, other=other, budget=budget, workers=workers)


async def run_sweep(jobs: Iterable[SweepJob], *, budget: Optional[int] = None,
                    workers: Optional[int] = None) -> List[VerificationReport]:
    """
    Runs every job on a worker thread and returns the reports in input order. The first failing
    job (in input order, not completion order) re-raises its exception.
    """
    jobs = list(jobs)
    logger.info(f"Sweep of {len(jobs)} jobs")
    tasks = [asyncio.to_thread(run_job, job, budget=budget, workers=workers) for job in jobs]
    results = await asyncio.gather(*tasks, return_exceptions=True)
    for job, result in zip(jobs, results):
        if isinstance(result, BaseException):
            logger.error(f"Sweep job {job} failed: {result}")
            raise result
    return list(results)


def _count_document(group: str, word: str, method: str, budget: Optional[int], workers: Optional[int]) -> dict:
    G = resolve_group(group)
    return count_fibers(G, parse_word_spec(word), method, budget=budget, workers=workers).to_document()


async def run_count_sweep(groups: Sequence[str], words: Sequence[str], *, method: str = "auto",
                          budget: Optional[int] = None, workers: Optional[int] = None) -> List[dict]:
    """Fiber-distribution exports for every (group, word), group-major."""
    pairs = [(group, word) for group in groups for word in words]
    tasks = [asyncio.to_thread(_count_document, group, word, method, budget, workers) for group, word in pairs]
    return list(await asyncio.gather(*tasks))
