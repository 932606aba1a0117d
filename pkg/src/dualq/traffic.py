"""Traffic sources and sink.

Three window-based senders cover the two congestion-control families
the AQM distinguishes:

* ScalableSender: per-packet CE feedback folded into a low-pass mark
  fraction, window scaled by half the smoothed fraction once per RTT
  (the DCTCP law). Sends ECT(1), so the AQM steers it into the L queue.
* ClassicSender "reno": AIMD with +1 per RTT and a 0.5 multiplicative
  decrease. Sends ECT(0).
* ClassicSender "cubic": window follows W(t) = C*(t-K)^3 + W_max after
  each decrease to beta*W, with K = cbrt(W_max*(1-beta)/C). Also ECT(0).

The receiver acknowledges every delivery immediately and echoes CE.
Loss detection is idealized: a sequence gap is declared lost after
three later packets of the same flow arrive. There are no
retransmissions and no timers; a congestion signal feeds the window
and the byte simply does not count toward goodput.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .core import Ecn, Packet

SCALABLE_EWMA_GAIN = 1.0 / 16.0
CUBIC_C = 0.4
CUBIC_BETA = 0.7
INIT_CWND = 10.0
# flow-local sequence numbers are folded into globally unique packet ids:
# id = (flow index << FLOW_ID_SHIFT) | seq
FLOW_ID_SHIFT = 40
_FLOW_ID_STRIDE = 1 << FLOW_ID_SHIFT

SENDER_KINDS = ("scalable", "reno", "cubic")


@dataclass(frozen=True)
class FlowConfig:
    name: str
    kind: str
    start_ns: int = 0
    stop_ns: int | None = None

    def validate(self) -> None:
        if self.kind not in SENDER_KINDS:
            raise ValueError(
                f"unknown sender kind {self.kind!r}, expected one of {SENDER_KINDS}"
            )
        if self.start_ns < 0:
            raise ValueError(f"start_ns cannot be negative, got {self.start_ns}")
        if self.stop_ns is not None and self.stop_ns <= self.start_ns:
            raise ValueError(
                f"stop_ns {self.stop_ns} must be after start_ns {self.start_ns}"
            )
        if not self.name or any(c in self.name for c in ",/\\\n\t "):
            raise ValueError(f"flow name {self.name!r} must be a simple token")


class _SenderBase:
    """Window bookkeeping shared by both families."""

    __slots__ = (
        "flow",
        "index",
        "mtu",
        "start_ns",
        "stop_ns",
        "cwnd",
        "next_seq",
        "outstanding",
        "slow_start",
        "srtt_ns",
        "sent_total",
        "acked_total",
        "signals_total",
    )

    def __init__(self, cfg: FlowConfig, index: int, mtu: int):
        self.flow = cfg.name
        self.index = index
        self.mtu = mtu
        self.start_ns = cfg.start_ns
        self.stop_ns = cfg.stop_ns
        self.cwnd = INIT_CWND
        self.next_seq = 0
        # seq -> send time; membership defines the in-flight set
        self.outstanding: dict[int, int] = {}
        self.slow_start = True
        self.srtt_ns = 0
        self.sent_total = 0
        self.acked_total = 0
        self.signals_total = 0

    def active(self, now: int) -> bool:
        return now >= self.start_ns and (self.stop_ns is None or now < self.stop_ns)

    def pump(self, now: int) -> list[Packet]:
        """Emit packets until the window is full."""
        out: list[Packet] = []
        if not self.active(now):
            return out
        base = self.index * _FLOW_ID_STRIDE
        limit = self.cwnd
        while len(self.outstanding) < limit:
            seq = self.next_seq
            self.next_seq = seq + 1
            self.outstanding[seq] = now
            self.sent_total += 1
            out.append(Packet(base + seq, self.flow, self.mtu, self.ecn, now, seq))
        return out

    def _take_rtt_sample(self, sent_at: int, now: int) -> None:
        sample = now - sent_at
        if self.srtt_ns == 0:
            self.srtt_ns = sample
        else:
            self.srtt_ns += (sample - self.srtt_ns) >> 3


class ScalableSender(_SenderBase):
    """Shallow-threshold scalable window (the DCTCP response).

    Every ACK reports whether the packet carried CE. Per round (one
    window, delimited by the ack of the newest packet sent when the
    previous round closed), the CE fraction updates an EWMA with gain
    1/16; a round containing any signal scales cwnd by (1 - ewma/2),
    otherwise cwnd grows by one packet. Slow start doubles per RTT
    (one packet per ACK) until the first signal. Idealized losses
    count as signals.
    """

    __slots__ = ("mark_ewma", "round_last_seq", "round_acked", "round_marked")

    kind = "scalable"
    ecn = Ecn.ECT1

    def __init__(self, cfg: FlowConfig, index: int, mtu: int):
        super().__init__(cfg, index, mtu)
        self.mark_ewma = 0.0
        self.round_last_seq = -1
        self.round_acked = 0
        self.round_marked = 0

    def pump(self, now: int) -> list[Packet]:
        out = super().pump(now)
        if self.round_last_seq < 0 and self.next_seq > 0:
            # the opening round spans the whole initial window
            self.round_last_seq = self.next_seq - 1
        return out

    def on_ack(self, seq: int, ce: bool, now: int) -> None:
        sent_at = self.outstanding.pop(seq, None)
        if sent_at is None:
            return
        self.acked_total += 1
        self._take_rtt_sample(sent_at, now)
        self._account(ce)
        if self.slow_start:
            self.cwnd += 1.0
            if ce:
                self.slow_start = False
        if seq >= self.round_last_seq:
            self._close_round()

    def on_loss(self, seq: int, now: int) -> None:
        if self.outstanding.pop(seq, None) is None:
            return
        self._account(True)
        self.slow_start = False

    def _account(self, ce: bool) -> None:
        self.round_acked += 1
        if ce:
            self.round_marked += 1
            self.signals_total += 1

    def _close_round(self) -> None:
        if self.round_acked:
            frac = self.round_marked / self.round_acked
            self.mark_ewma += SCALABLE_EWMA_GAIN * (frac - self.mark_ewma)
            if not self.slow_start:
                if self.round_marked:
                    self.cwnd = max(1.0, self.cwnd * (1.0 - self.mark_ewma / 2.0))
                else:
                    self.cwnd += 1.0
        self.round_last_seq = self.next_seq - 1
        self.round_acked = 0
        self.round_marked = 0


class ClassicSender(_SenderBase):
    """Classic window: Reno AIMD or the cubic growth curve.

    Both react at most once per RTT to a congestion signal (CE echo or
    idealized loss): acks for packets sent before the last decrease
    cannot trigger another one.
    """

    __slots__ = ("variant", "ssthresh", "w_max", "epoch_start_ns", "k_s", "recover_seq")

    ecn = Ecn.ECT0

    def __init__(self, cfg: FlowConfig, index: int, mtu: int):
        super().__init__(cfg, index, mtu)
        if cfg.kind not in ("reno", "cubic"):
            raise ValueError(f"not a classic sender kind: {cfg.kind!r}")
        self.variant = cfg.kind
        self.ssthresh = float("inf")
        self.w_max = 0.0
        self.epoch_start_ns: int | None = None
        self.k_s = 0.0
        self.recover_seq = -1

    @property
    def kind(self) -> str:
        return self.variant

    def on_ack(self, seq: int, ce: bool, now: int) -> None:
        sent_at = self.outstanding.pop(seq, None)
        if sent_at is None:
            return
        self.acked_total += 1
        self._take_rtt_sample(sent_at, now)
        if ce:
            if seq > self.recover_seq:
                self._decrease(now)
            # inside recovery a further CE neither shrinks nor grows
            return
        if self.slow_start:
            self.cwnd += 1.0
            if self.cwnd >= self.ssthresh:
                self.slow_start = False
            return
        if self.variant == "reno":
            self.cwnd += 1.0 / self.cwnd
        else:
            self._cubic_growth(now)

    def on_loss(self, seq: int, now: int) -> None:
        if self.outstanding.pop(seq, None) is None:
            return
        if seq > self.recover_seq:
            self._decrease(now)

    def _decrease(self, now: int) -> None:
        self.signals_total += 1
        self.slow_start = False
        w = self.cwnd
        if self.variant == "cubic":
            self.w_max = w
            self.cwnd = max(1.0, w * CUBIC_BETA)
            self.epoch_start_ns = now
            self.k_s = (self.w_max * (1.0 - CUBIC_BETA) / CUBIC_C) ** (1.0 / 3.0)
        else:
            self.cwnd = max(1.0, w * 0.5)
            self.ssthresh = self.cwnd
        # acks up to the current send frontier belong to this decrease
        self.recover_seq = self.next_seq - 1

    def _cubic_growth(self, now: int) -> None:
        if self.epoch_start_ns is None:
            self.cwnd += 1.0 / self.cwnd
            return
        t = (now - self.epoch_start_ns) * 1e-9
        dt = t - self.k_s
        w = CUBIC_C * dt * dt * dt + self.w_max
        if w > self.cwnd:
            self.cwnd = w


def make_sender(cfg: FlowConfig, index: int, mtu: int) -> _SenderBase:
    cfg.validate()
    if cfg.kind == "scalable":
        return ScalableSender(cfg, index, mtu)
    return ClassicSender(cfg, index, mtu)


@dataclass
class FlowStats:
    """Per-flow delivery accounting at the receiver."""

    packets: int = 0
    bytes: int = 0
    ce_packets: int = 0
    highest_seq: int = -1
    arrivals: int = 0
    # (missing seq, arrival count at which it is declared lost)
    gaps: deque = field(default_factory=deque)


class Receiver:
    """Counts deliveries, echoes CE, reports idealized losses.

    A missing sequence number is declared lost once three packets with
    higher sequence numbers of the same flow have arrived (the third
    duplicate-ack rule without modeling acks for the gap itself).
    """

    __slots__ = ("flows",)

    def __init__(self):
        self.flows: dict[str, FlowStats] = {}

    def stats(self, flow: str) -> FlowStats:
        st = self.flows.get(flow)
        if st is None:
            st = self.flows[flow] = FlowStats()
        return st

    def on_deliver(self, pkt: Packet) -> tuple[bool, tuple[int, ...]]:
        """Account one delivery; return (ce_echo, sequences now lost)."""
        st = self.flows.get(pkt.flow)
        if st is None:
            st = self.flows[pkt.flow] = FlowStats()
        st.packets += 1
        st.bytes += pkt.size
        st.arrivals += 1
        ce = pkt.ecn == Ecn.CE
        if ce:
            st.ce_packets += 1
        if pkt.seq > st.highest_seq:
            if pkt.seq > st.highest_seq + 1:
                deadline = st.arrivals + 2
                for missing in range(st.highest_seq + 1, pkt.seq):
                    st.gaps.append((missing, deadline))
            st.highest_seq = pkt.seq
        lost: tuple[int, ...] = ()
        if st.gaps and st.gaps[0][1] <= st.arrivals:
            found: list[int] = []
            while st.gaps and st.gaps[0][1] <= st.arrivals:
                found.append(st.gaps.popleft()[0])
            lost = tuple(found)
        return ce, lost
