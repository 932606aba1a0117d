"""Measurement sampling, run summaries, and on-disk run format.

A run directory contains exactly three files:

* ``meta.json``: config echo, seed, RNG algorithm, config fingerprint,
  and the scalar summary (throughput, counters).
* ``series.csv``: one row per controller interval with the queue
  occupancy at the sample instant and the mark/drop deltas since the
  previous sample.
* ``flows.csv``: per-flow delivered bytes and average throughput.

Serialization is canonical (sorted keys, repr floats, newline-free
row format), so identical runs produce byte-identical directories.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TraceSample:
    """Queue state at one controller tick plus deltas since the last."""

    t_ns: int
    qocc_pkts: int
    qocc_bytes: int
    ecn_marks: int
    drops: int


class SampleCollector:
    """Samples AQM counters at every controller update.

    Marks and drops are stored as interval deltas; their sums equal
    the AQM's cumulative counters at the final sample by construction,
    which the conservation checks exploit.
    """

    __slots__ = ("samples", "_marks_prev", "_drops_prev")

    def __init__(self):
        self.samples: list[TraceSample] = []
        self._marks_prev = 0
        self._drops_prev = 0

    def take(self, t_ns: int, aqm) -> TraceSample:
        marks = aqm.ecn_marks_l + aqm.ecn_marks_c
        drops = aqm.drops_total
        sample = TraceSample(
            t_ns=t_ns,
            qocc_pkts=aqm.backlog_pkts,
            qocc_bytes=aqm.backlog_bytes,
            ecn_marks=marks - self._marks_prev,
            drops=drops - self._drops_prev,
        )
        self._marks_prev = marks
        self._drops_prev = drops
        self.samples.append(sample)
        return sample


@dataclass
class FlowSummary:
    flow: str
    kind: str
    bytes: int
    mbps: float


@dataclass
class RunRecord:
    """One run's results in memory; mirrors the on-disk format."""

    run_id: str
    seed: int
    rng_algorithm: str
    fingerprint: str
    duration_ns: int
    config: dict
    flows: list[FlowSummary]
    counters: dict
    samples: list[TraceSample] = field(default_factory=list)

    @property
    def avg_throughput_mbps(self) -> float:
        total = sum(f.bytes for f in self.flows)
        return total * 8.0 / (self.duration_ns * 1e-9) / 1e6

    def series(self, column: str) -> np.ndarray:
        """One sample column as a float array, in time order."""
        return np.asarray(
            [getattr(s, column) for s in self.samples], dtype=np.float64
        )


def summarize(run_id: str, seed: int, rng_algorithm: str, fingerprint: str,
              config: dict, output) -> RunRecord:
    """Condense a RunOutput into a RunRecord."""
    dur_s = output.duration_ns * 1e-9
    flows = []
    for sender in output.senders:
        st = output.receiver.flows.get(sender.flow)
        delivered = st.bytes if st is not None else 0
        flows.append(
            FlowSummary(
                flow=sender.flow,
                kind=sender.kind,
                bytes=delivered,
                mbps=delivered * 8.0 / dur_s / 1e6,
            )
        )
    return RunRecord(
        run_id=run_id,
        seed=seed,
        rng_algorithm=rng_algorithm,
        fingerprint=fingerprint,
        duration_ns=output.duration_ns,
        config=config,
        flows=flows,
        counters=output.aqm.counters(),
        samples=output.samples,
    )


# ----------------------------------------------------------------------
# on-disk format

META_NAME = "meta.json"
SERIES_NAME = "series.csv"
FLOWS_NAME = "flows.csv"

_SERIES_HEADER = "t_ns,qocc_pkts,qocc_bytes,ecn_marks,drops"
_FLOWS_HEADER = "flow_id,kind,bytes,mbps"


def canonical_json(obj) -> str:
    """Stable, diff-friendly JSON: sorted keys, no float formatting tricks."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def write_run_dir(record: RunRecord, path: str) -> list[str]:
    """Write one run directory; returns the file names written."""
    os.makedirs(path, exist_ok=True)
    meta = {
        "run_id": record.run_id,
        "seed": record.seed,
        "rng": {"algorithm": record.rng_algorithm, "seed": record.seed},
        "fingerprint": record.fingerprint,
        "duration_ns": record.duration_ns,
        "config": record.config,
        "summary": {
            "avg_throughput_mbps": record.avg_throughput_mbps,
            "counters": record.counters,
            "samples": len(record.samples),
        },
    }
    with open(os.path.join(path, META_NAME), "w", encoding="ascii") as fh:
        fh.write(canonical_json(meta))
    rows = [_SERIES_HEADER]
    rows.extend(
        f"{s.t_ns},{s.qocc_pkts},{s.qocc_bytes},{s.ecn_marks},{s.drops}"
        for s in record.samples
    )
    with open(os.path.join(path, SERIES_NAME), "w", encoding="ascii") as fh:
        fh.write("\n".join(rows) + "\n")
    rows = [_FLOWS_HEADER]
    rows.extend(f"{f.flow},{f.kind},{f.bytes},{f.mbps!r}" for f in record.flows)
    with open(os.path.join(path, FLOWS_NAME), "w", encoding="ascii") as fh:
        fh.write("\n".join(rows) + "\n")
    return [META_NAME, SERIES_NAME, FLOWS_NAME]


def load_run_dir(path: str) -> RunRecord:
    with open(os.path.join(path, META_NAME), "r", encoding="ascii") as fh:
        meta = json.load(fh)
    samples = []
    with open(os.path.join(path, SERIES_NAME), "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != _SERIES_HEADER:
            raise ValueError(f"{path}: unexpected series header {header!r}")
        for line in fh:
            t, qp, qb, marks, drops = line.strip().split(",")
            samples.append(
                TraceSample(int(t), int(qp), int(qb), int(marks), int(drops))
            )
    flows = []
    with open(os.path.join(path, FLOWS_NAME), "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != _FLOWS_HEADER:
            raise ValueError(f"{path}: unexpected flows header {header!r}")
        for line in fh:
            flow, kind, nbytes, mbps = line.strip().split(",")
            flows.append(FlowSummary(flow, kind, int(nbytes), float(mbps)))
    return RunRecord(
        run_id=meta["run_id"],
        seed=meta["seed"],
        rng_algorithm=meta["rng"]["algorithm"],
        fingerprint=meta["fingerprint"],
        duration_ns=meta["duration_ns"],
        config=meta["config"],
        flows=flows,
        counters=meta["summary"]["counters"],
        samples=samples,
    )


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
