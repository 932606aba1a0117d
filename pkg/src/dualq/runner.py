"""Run orchestration: output layout, batches, manifests, corpus loading.

A corpus directory holds one subdirectory per run plus a manifest
listing the sha256 of every emitted file. Batches are transactional:
if any run fails, the whole output directory is removed so a partial
corpus can never masquerade as a complete one.
"""

from __future__ import annotations

import os
import shutil
from concurrent.futures import ProcessPoolExecutor

from .config import ScenarioConfig
from .core import Rng
from .engine import run_scenario
from .metrics import (
    RunRecord,
    canonical_json,
    load_run_dir,
    sha256_file,
    summarize,
    write_run_dir,
)

MANIFEST_NAME = "manifest.json"


class RunnerError(Exception):
    """Filesystem or orchestration failure (exit code 2 at the CLI)."""


def output_root() -> str:
    """Base directory for relative output paths (DUALQ_OUTPUT_ROOT)."""
    return os.environ.get("DUALQ_OUTPUT_ROOT") or os.getcwd()


def resolve_out(path: str) -> str:
    if os.path.isabs(path):
        return path
    return os.path.join(output_root(), path)


def prepare_out_dir(path: str, force: bool) -> str:
    """Create an output directory, refusing to clobber prior results."""
    path = resolve_out(path)
    if os.path.exists(path):
        if not force and os.listdir(path):
            raise RunnerError(
                f"output directory {path} is not empty; pass --force to replace it"
            )
        if force:
            shutil.rmtree(path)
    os.makedirs(path, exist_ok=True)
    return path


def run_one(cfg: ScenarioConfig, seed: int, run_id: str) -> RunRecord:
    """Execute one run and summarize it in memory."""
    output = run_scenario(cfg, seed)
    return summarize(
        run_id=run_id,
        seed=seed,
        rng_algorithm=Rng.algorithm,
        fingerprint=cfg.fingerprint(),
        config=cfg.to_dict(),
        output=output,
    )


def _run_and_write(cfg: ScenarioConfig, seed: int, run_id: str,
                   corpus_dir: str) -> dict[str, str]:
    """Worker: one run written to corpus_dir/run_id; returns file hashes."""
    record = run_one(cfg, seed, run_id)
    run_dir = os.path.join(corpus_dir, run_id)
    names = write_run_dir(record, run_dir)
    return {
        f"{run_id}/{name}": sha256_file(os.path.join(run_dir, name))
        for name in names
    }


def run_batch(
    cfg: ScenarioConfig,
    runs: int,
    seed_base: int,
    out_dir: str,
    parallel: int = 1,
    force: bool = False,
) -> str:
    """Run a corpus of seeded runs; returns the corpus directory.

    Seeds are seed_base, seed_base+1, ...; run ids are zero-padded
    indexes, so corpus content is a pure function of (config, runs,
    seed_base) regardless of parallelism or completion order.
    """
    if runs < 1:
        raise RunnerError(f"runs must be >= 1, got {runs}")
    if parallel < 1:
        raise RunnerError(f"parallel must be >= 1, got {parallel}")
    corpus_dir = prepare_out_dir(out_dir, force)
    jobs = [(cfg, seed_base + i, f"run-{i:05d}", corpus_dir) for i in range(runs)]
    files: dict[str, str] = {}
    try:
        if parallel == 1:
            for job in jobs:
                files.update(_run_and_write(*job))
        else:
            with ProcessPoolExecutor(max_workers=parallel) as pool:
                for result in pool.map(_batch_entry, jobs):
                    files.update(result)
    except Exception:
        shutil.rmtree(corpus_dir, ignore_errors=True)
        raise
    manifest = {
        "kind": "corpus",
        "fingerprint": cfg.fingerprint(),
        "runs": runs,
        "seed_base": seed_base,
        "seeds": list(range(seed_base, seed_base + runs)),
        "rng": {"algorithm": Rng.algorithm},
        "files": dict(sorted(files.items())),
    }
    with open(os.path.join(corpus_dir, MANIFEST_NAME), "w", encoding="ascii") as fh:
        fh.write(canonical_json(manifest))
    return corpus_dir


def _batch_entry(job):
    return _run_and_write(*job)


def verify_corpus(corpus_dir: str) -> dict:
    """Check every manifest hash; raises RunnerError on any mismatch."""
    manifest_path = os.path.join(corpus_dir, MANIFEST_NAME)
    try:
        import json

        with open(manifest_path, "r", encoding="ascii") as fh:
            manifest = json.load(fh)
    except OSError as exc:
        raise RunnerError(f"cannot read manifest {manifest_path}: {exc}") from exc
    bad = []
    for rel, digest in manifest.get("files", {}).items():
        path = os.path.join(corpus_dir, rel)
        if not os.path.exists(path):
            bad.append(f"missing file {rel}")
            continue
        actual = sha256_file(path)
        if actual != digest:
            bad.append(f"hash mismatch for {rel}")
    if bad:
        raise RunnerError(
            f"corpus {corpus_dir} failed verification: " + "; ".join(bad)
        )
    return manifest


def load_corpus(corpus_dir: str, verify: bool = True) -> list[RunRecord]:
    """Load all runs of a corpus in run-id order."""
    corpus_dir = resolve_out(corpus_dir)
    if verify:
        verify_corpus(corpus_dir)
    records = []
    for name in sorted(os.listdir(corpus_dir)):
        path = os.path.join(corpus_dir, name)
        if os.path.isdir(path):
            records.append(load_run_dir(path))
    if not records:
        raise RunnerError(f"corpus {corpus_dir} contains no runs")
    return records
