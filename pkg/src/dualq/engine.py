"""Deterministic event engine wiring senders, AQM, link, and receiver.

Topology (one direction of interest):

    sender --fwd delay--> AQM/queue --link service--> receiver
       ^                                                 |
       +------------------rev delay----------(ack)-------+

Events live in a binary heap keyed by (time_ns, priority, seq). The
priority resolves simultaneous events in a fixed order:

    0 link delivery < 1 controller update < 2 packet arrival < 3 ack
    < 4 flow wake-up

so a delivery opportunity at time t serves the queue as it stood
before any packet arriving at t, the controller samples the queue
before the same-instant arrivals, and acks are handled last. The seq
counter makes every key unique, so heap order never falls back to
comparing payloads.

The run stops after the last event with key <= (duration, update
priority): the controller update and measurement sample scheduled
exactly at the horizon are processed, later same-instant arrivals and
acks are not, so the final sample is the frozen end state of the run.
"""

from __future__ import annotations

from dataclasses import dataclass
from heapq import heappop, heappush

from .aqm import DualPi2
from .core import NS_PER_MS, Rng
from .link import LinkMode, SmoothPacer
from .metrics import SampleCollector
from .traffic import FLOW_ID_SHIFT, Receiver, make_sender

PRIO_LINK = 0
PRIO_UPDATE = 1
PRIO_ARRIVAL = 2
PRIO_ACK = 3
PRIO_WAKE = 4


@dataclass
class RunOutput:
    """Everything observable from one emulation run."""

    duration_ns: int
    samples: list
    aqm: DualPi2
    receiver: Receiver
    senders: list
    deliveries: list | None = None


def run_scenario(cfg, seed: int, *, record_deliveries: bool = False) -> RunOutput:
    """Execute one seeded run of a scenario and return its artifacts.

    ``cfg`` is a ScenarioConfig (see config module). The same (cfg,
    seed) pair always produces identical outputs: the only randomness
    is the AQM's seeded stream, and the event order is total.
    """
    rng = Rng(seed)
    aqm = DualPi2(cfg.aqm, rng)
    receiver = Receiver()
    senders = [make_sender(fc, i, cfg.link.mtu) for i, fc in enumerate(cfg.flows)]
    collector = SampleCollector()
    trace = cfg.link.make_trace()
    smooth = cfg.link.mode is LinkMode.SMOOTH
    pacer = SmoothPacer(cfg.link.rate_bps, cfg.link.mtu) if smooth else None

    duration = cfg.duration_ns
    fwd = cfg.delay.fwd_ns
    rev = cfg.delay.rev_ns
    tupdate = cfg.aqm.tupdate_ns
    opportunities = trace.opportunities
    on_deliver = receiver.on_deliver
    enqueue = aqm.enqueue
    dequeue = aqm.dequeue
    deliveries: list | None = [] if record_deliveries else None

    heap: list = []
    push = heappush
    pop = heappop
    evseq = 0

    # the link self-arms only while the queue is backlogged
    link_armed = False
    # SMOOTH: earliest instant the link may serve the next packet
    next_free_ns = 0

    for sender in senders:
        push(heap, (sender.start_ns, PRIO_WAKE, evseq, sender))
        evseq += 1
    if tupdate <= duration:
        push(heap, (tupdate, PRIO_UPDATE, evseq, None))
        evseq += 1

    def emit(sender, now: int) -> None:
        nonlocal evseq
        for pkt in sender.pump(now):
            push(heap, (now + fwd, PRIO_ARRIVAL, evseq, pkt))
            evseq += 1

    while heap:
        t, prio, _, payload = pop(heap)
        if t > duration or (t == duration and prio > PRIO_UPDATE):
            break

        if prio == PRIO_ARRIVAL:
            enqueue(payload, t)
            if not link_armed and aqm.backlog_pkts:
                link_armed = True
                if smooth:
                    at = next_free_ns if next_free_ns > t else t
                else:
                    at = (t // NS_PER_MS + 1) * NS_PER_MS
                push(heap, (at, PRIO_LINK, evseq, None))
                evseq += 1

        elif prio == PRIO_ACK:
            sender_idx, seq, ce, lost = payload
            sender = senders[sender_idx]
            for missing in lost:
                sender.on_loss(missing, t)
            sender.on_ack(seq, ce, t)
            emit(sender, t)

        elif prio == PRIO_LINK:
            if smooth:
                pkt = dequeue(t)
                if pkt is None:
                    link_armed = False
                else:
                    ce, lost = on_deliver(pkt)
                    if deliveries is not None:
                        deliveries.append((t, pkt.flow, pkt.seq, pkt.ecn))
                    push(
                        heap,
                        (
                            t + rev,
                            PRIO_ACK,
                            evseq,
                            (pkt.id >> FLOW_ID_SHIFT, pkt.seq, ce, lost),
                        ),
                    )
                    evseq += 1
                    next_free_ns = t + pacer.next_interval_ns()
                    if aqm.backlog_pkts:
                        push(heap, (next_free_ns, PRIO_LINK, evseq, None))
                        evseq += 1
                    else:
                        link_armed = False
            else:
                budget = opportunities(t // NS_PER_MS)
                while budget > 0:
                    pkt = dequeue(t)
                    if pkt is None:
                        break
                    budget -= 1
                    ce, lost = on_deliver(pkt)
                    if deliveries is not None:
                        deliveries.append((t, pkt.flow, pkt.seq, pkt.ecn))
                    push(
                        heap,
                        (
                            t + rev,
                            PRIO_ACK,
                            evseq,
                            (pkt.id >> FLOW_ID_SHIFT, pkt.seq, ce, lost),
                        ),
                    )
                    evseq += 1
                if aqm.backlog_pkts:
                    push(heap, (t + NS_PER_MS, PRIO_LINK, evseq, None))
                    evseq += 1
                else:
                    link_armed = False

        elif prio == PRIO_UPDATE:
            aqm.pi2_update(t)
            collector.take(t, aqm)
            nxt = t + tupdate
            if nxt <= duration:
                push(heap, (nxt, PRIO_UPDATE, evseq, None))
                evseq += 1

        else:  # PRIO_WAKE
            emit(payload, t)

    return RunOutput(
        duration_ns=duration,
        samples=collector.samples,
        aqm=aqm,
        receiver=receiver,
        senders=senders,
        deliveries=deliveries,
    )
