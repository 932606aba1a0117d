"""Coupled dual-queue AQM.

Two FIFO queues share one buffer in front of the link:

* the L queue holds scalable (ECT(1)/CE) traffic and signals congestion
  early with a shallow sojourn-time step plus a coupled probability;
* the C queue holds classic (Not-ECT/ECT(0)) traffic governed by a
  proportional-integral controller whose output p' is squared before
  being applied, because classic senders halve their window per signal.

The coupling k * p' lets classic load inflate the L marking rate so the
two congestion-control families converge to comparable per-flow rates.
A weighted round-robin credit scheduler gives L priority while
guaranteeing the C queue a configurable minimum share of link bytes.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

from .core import NS_PER_MS, Ecn, Packet, Rng


class Verdict(enum.Enum):
    """Outcome of offering one packet to the AQM."""

    ENQUEUED_C = "enqueued_c"
    ENQUEUED_L = "enqueued_l"
    DROPPED_OVERFLOW = "dropped_overflow"


@dataclass(frozen=True)
class AqmConfig:
    """Controller and scheduler parameters.

    Durations are integer nanoseconds; alpha and beta are the PI gains
    in 1/s acting on delays expressed in seconds.
    """

    target_ns: int = 15 * NS_PER_MS
    tupdate_ns: int = 16 * NS_PER_MS
    alpha: float = 0.16
    beta: float = 3.2
    step_thresh_ns: int = 1 * NS_PER_MS
    coupling_k: float = 2.0
    limit_bytes: int = 375_000
    classic_protection: float = 0.10
    ecn_classic_enabled: bool = True

    def validate(self) -> None:
        if self.target_ns <= 0:
            raise ValueError(f"target_ns must be positive, got {self.target_ns}")
        if self.tupdate_ns <= 0:
            raise ValueError(f"tupdate_ns must be positive, got {self.tupdate_ns}")
        if self.step_thresh_ns <= 0:
            raise ValueError(
                f"step_thresh_ns must be positive, got {self.step_thresh_ns}"
            )
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError(
                f"alpha and beta must be positive, got {self.alpha}, {self.beta}"
            )
        if self.coupling_k < 1.0:
            raise ValueError(f"coupling_k must be >= 1, got {self.coupling_k}")
        if self.limit_bytes <= 0:
            raise ValueError(f"limit_bytes must be positive, got {self.limit_bytes}")
        if not 0.0 <= self.classic_protection < 1.0:
            raise ValueError(
                "classic_protection must be in [0, 1), "
                f"got {self.classic_protection}"
            )


def classify(ecn: int) -> bool:
    """True if the packet belongs in the L queue.

    ECT(1) (0b01) and CE (0b11) identify scalable traffic; the low bit
    is the discriminator, so the test is a single mask.
    """
    return bool(ecn & 1)


class DualPi2:
    """The coupled dual-queue AQM instance for one link.

    All mutation happens through enqueue / dequeue / pi2_update; the
    counters are monotone and never reset so interval deltas can be
    derived by sampling them.
    """

    __slots__ = (
        "cfg",
        "rng",
        "p_prime",
        "prev_qdelay_ns",
        "next_update_ns",
        "credit",
        "_c",
        "_l",
        "c_bytes",
        "l_bytes",
        "enq_total",
        "deq_total",
        "drops_total",
        "drops_overflow",
        "drops_aqm",
        "ecn_marks_l",
        "ecn_marks_c",
    )

    def __init__(self, cfg: AqmConfig, rng: Rng):
        cfg.validate()
        self.cfg = cfg
        self.rng = rng
        self.p_prime = 0.0
        self.prev_qdelay_ns = 0
        self.next_update_ns = cfg.tupdate_ns
        # bytes the C queue is owed; positive means C is behind its share
        self.credit = 0.0
        self._c: deque[Packet] = deque()
        self._l: deque[Packet] = deque()
        self.c_bytes = 0
        self.l_bytes = 0
        self.enq_total = 0
        self.deq_total = 0
        self.drops_total = 0
        self.drops_overflow = 0
        self.drops_aqm = 0
        self.ecn_marks_l = 0
        self.ecn_marks_c = 0

    # ------------------------------------------------------------------
    # state inspection

    @property
    def backlog_pkts(self) -> int:
        return len(self._c) + len(self._l)

    @property
    def backlog_bytes(self) -> int:
        return self.c_bytes + self.l_bytes

    def qdelay_ns(self, now: int) -> int:
        """Sojourn time of the C-queue head, 0 when the queue is empty."""
        if self._c:
            return now - self._c[0].enqueued_at
        return 0

    def counters(self) -> dict[str, int]:
        return {
            "enqueued": self.enq_total,
            "dequeued": self.deq_total,
            "drops": self.drops_total,
            "drops_overflow": self.drops_overflow,
            "drops_aqm": self.drops_aqm,
            "ecn_marks_l": self.ecn_marks_l,
            "ecn_marks_c": self.ecn_marks_c,
        }

    # ------------------------------------------------------------------
    # ingress

    def enqueue(self, pkt: Packet, now: int) -> Verdict:
        """Classify and queue one packet, or drop it on buffer overflow.

        The byte limit is shared by both queues; a packet that would
        push the combined backlog past it is dropped at the tail no
        matter which queue it was headed for.
        """
        self.enq_total += 1
        if self.c_bytes + self.l_bytes + pkt.size > self.cfg.limit_bytes:
            self.drops_total += 1
            self.drops_overflow += 1
            return Verdict.DROPPED_OVERFLOW
        pkt.enqueued_at = now
        if pkt.ecn & 1:
            self._l.append(pkt)
            self.l_bytes += pkt.size
            return Verdict.ENQUEUED_L
        self._c.append(pkt)
        self.c_bytes += pkt.size
        return Verdict.ENQUEUED_C

    # ------------------------------------------------------------------
    # controller

    def pi2_update(self, now: int) -> float:
        """Advance the PI controller one step and return the new p'.

        p' <- clamp(p' + alpha * tupdate * (qdelay - target)
                       + beta  * (qdelay - prev_qdelay), 0, 1)

        with delays in seconds. When qdelay equals the target and has
        not moved, both correction terms are exactly 0.0, so p' is a
        true fixed point (bit-for-bit, not merely approximately).
        """
        if now < self.next_update_ns:
            raise ValueError(
                f"pi2_update at {now} ns before schedule {self.next_update_ns} ns"
            )
        qdelay_ns = (now - self._c[0].enqueued_at) if self._c else 0
        qdelay = qdelay_ns * 1e-9
        cfg = self.cfg
        p = (
            self.p_prime
            + cfg.alpha * (cfg.tupdate_ns * 1e-9) * (qdelay - cfg.target_ns * 1e-9)
            + cfg.beta * (qdelay - self.prev_qdelay_ns * 1e-9)
        )
        if p < 0.0:
            p = 0.0
        elif p > 1.0:
            p = 1.0
        self.p_prime = p
        self.prev_qdelay_ns = qdelay_ns
        self.next_update_ns += cfg.tupdate_ns
        return p

    # ------------------------------------------------------------------
    # egress

    def dequeue(self, now: int) -> Packet | None:
        """Pick the next packet for the link, applying AQM actions.

        Scheduling: when both queues are backlogged the C queue is
        served only while it holds positive credit, which accrues at
        classic_protection of every byte served; with a single backlog
        the credit resets so a returning competitor starts from parity.
        Classic drops re-run the scheduler because they can empty the
        C queue entirely.
        """
        while True:
            if not self._c:
                if not self._l:
                    return None
                self.credit = 0.0
                return self._take_l(now)
            if not self._l:
                self.credit = 0.0
                pkt = self._take_c(now)
                if pkt is None:
                    continue
                return pkt
            if self.credit > 0.0:
                pkt = self._take_c(now)
                if pkt is None:
                    continue
                self.credit -= pkt.size * (1.0 - self.cfg.classic_protection)
                return pkt
            pkt = self._take_l(now)
            self.credit += pkt.size * self.cfg.classic_protection
            return pkt

    def _take_c(self, now: int) -> Packet | None:
        """Serve the C queue under the squared drop/mark law.

        Each head candidate faces an independent trial at p_c = p'^2;
        a losing ECT(0) packet is CE-marked and forwarded, any other
        loser is dropped and the next head tried. Returns None only
        when drops exhaust the queue.
        """
        p_c = self.p_prime * self.p_prime
        bern = self.rng.bernoulli
        while self._c:
            pkt = self._c.popleft()
            self.c_bytes -= pkt.size
            if bern(p_c):
                if self.cfg.ecn_classic_enabled and pkt.ecn == Ecn.ECT0:
                    pkt.ecn = Ecn.CE
                    self.ecn_marks_c += 1
                else:
                    self.drops_total += 1
                    self.drops_aqm += 1
                    continue
            self.deq_total += 1
            return pkt
        return None

    def _take_l(self, now: int) -> Packet:
        """Serve the L queue: step marking first, then the coupled rate.

        The step test uses a strict comparison (sojourn > threshold);
        only when it declines does the packet face one coupled trial at
        clamp(k * p', 0, 1). Marking never drops: L overload shows up
        as CE on every packet, not as loss.
        """
        pkt = self._l.popleft()
        self.l_bytes -= pkt.size
        if now - pkt.enqueued_at > self.cfg.step_thresh_ns:
            mark = True
        else:
            p_cl = self.cfg.coupling_k * self.p_prime
            if p_cl > 1.0:
                p_cl = 1.0
            mark = self.rng.bernoulli(p_cl)
        if mark and pkt.ecn != Ecn.CE:
            pkt.ecn = Ecn.CE
            self.ecn_marks_l += 1
        self.deq_total += 1
        return pkt
