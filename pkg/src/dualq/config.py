"""Scenario assembly: presets, INI files, and override handling.

A scenario is everything that defines a run except the seed. The
fingerprint hashes the canonical scenario dictionary, so two runs are
comparable exactly when their fingerprints match, and seeds remain
free to vary within a corpus.

Config files are INI with the sections::

    [run]    duration_s
    [link]   rate_mbps | rate_bps, mode, mtu, trace_file
    [delay]  rtt_ms | fwd_ms + rev_ms
    [aqm]    target_ms, tupdate_ms, alpha, beta, step_thresh_ms,
             coupling_k, limit_bytes, classic_protection, ecn_classic
    [flow.<name>]  kind, start_s, stop_s

Any value can be overridden on the command line with
``--set section.key=value``; overrides are applied textually before
validation so they behave exactly like edits to the file.
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import dataclass

from .aqm import AqmConfig
from .core import NS_PER_SEC, ms_to_ns, s_to_ns
from .link import DelayConfig, LinkConfig, LinkMode
from .traffic import SENDER_KINDS, FlowConfig

BUFFER_MS = 250


class ConfigError(Exception):
    """Invalid or contradictory scenario input."""


@dataclass(frozen=True)
class Preset:
    """A bandwidth-delay operating point."""

    name: str
    rate_bps: int
    rtt_ms: float


PRESETS = {
    "low": Preset("low", 12_000_000, 20.0),
    "medium": Preset("medium", 50_000_000, 40.0),
    "high": Preset("high", 200_000_000, 100.0),
}

# step threshold / target pairs: "default" is the shallow shipping
# configuration, "refined" widens both with the operating point
PARAM_SETS = ("default", "refined")
_REFINED = {
    "low": (5.0, 30.0),
    "medium": (5.0, 30.0),
    "high": (10.0, 45.0),
}


def default_limit_bytes(rate_bps: int) -> int:
    """Shared buffer sized to BUFFER_MS of line rate."""
    return rate_bps * BUFFER_MS // 8000


@dataclass(frozen=True)
class ScenarioConfig:
    link: LinkConfig
    delay: DelayConfig
    aqm: AqmConfig
    flows: tuple[FlowConfig, ...]
    duration_ns: int = 30 * NS_PER_SEC

    def validate(self) -> None:
        self.link.validate()
        self.delay.validate()
        self.aqm.validate()
        if self.duration_ns <= 0:
            raise ConfigError(f"duration must be positive, got {self.duration_ns} ns")
        if not self.flows:
            raise ConfigError("at least one flow is required")
        names = [f.name for f in self.flows]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate flow names: {names}")
        for f in self.flows:
            f.validate()

    def to_dict(self) -> dict:
        return {
            "duration_ns": self.duration_ns,
            "link": {
                "rate_bps": self.link.rate_bps,
                "mode": self.link.mode.value,
                "mtu": self.link.mtu,
                "trace_file": self.link.trace_file,
            },
            "delay": {"fwd_ns": self.delay.fwd_ns, "rev_ns": self.delay.rev_ns},
            "aqm": {
                "target_ns": self.aqm.target_ns,
                "tupdate_ns": self.aqm.tupdate_ns,
                "alpha": self.aqm.alpha,
                "beta": self.aqm.beta,
                "step_thresh_ns": self.aqm.step_thresh_ns,
                "coupling_k": self.aqm.coupling_k,
                "limit_bytes": self.aqm.limit_bytes,
                "classic_protection": self.aqm.classic_protection,
                "ecn_classic_enabled": self.aqm.ecn_classic_enabled,
            },
            "flows": [
                {
                    "name": f.name,
                    "kind": f.kind,
                    "start_ns": f.start_ns,
                    "stop_ns": f.stop_ns,
                }
                for f in self.flows
            ],
        }

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode("ascii")
        return hashlib.sha256(blob).hexdigest()


# ----------------------------------------------------------------------
# section dictionaries: the common currency of presets, files, --set

Sections = dict[str, dict[str, str]]


def preset_sections(
    preset: str,
    params: str = "default",
    flows: tuple[str, ...] = ("scalable",),
    mode: str = "bursty",
    duration_s: float = 30.0,
) -> Sections:
    """Expand a preset into override-ready section dictionaries."""
    try:
        p = PRESETS[preset]
    except KeyError:
        raise ConfigError(
            f"unknown preset {preset!r}, expected one of {sorted(PRESETS)}"
        ) from None
    if params not in PARAM_SETS:
        raise ConfigError(
            f"unknown parameter set {params!r}, expected one of {PARAM_SETS}"
        )
    if params == "refined":
        step_ms, target_ms = _REFINED[p.name]
    else:
        step_ms, target_ms = 1.0, 15.0
    sections: Sections = {
        "run": {"duration_s": repr(duration_s)},
        "link": {"rate_bps": str(p.rate_bps), "mode": mode, "mtu": "1500"},
        "delay": {"rtt_ms": repr(p.rtt_ms)},
        "aqm": {
            "target_ms": repr(target_ms),
            "tupdate_ms": "16",
            "alpha": "0.16",
            "beta": "3.2",
            "step_thresh_ms": repr(step_ms),
            "coupling_k": "2",
            "limit_bytes": str(default_limit_bytes(p.rate_bps)),
            "classic_protection": "0.1",
            "ecn_classic": "true",
        },
    }
    for i, kind in enumerate(flows):
        sections[f"flow.{kind}{i}"] = {"kind": kind, "start_s": "0"}
    return sections


def sections_from_ini(path: str) -> Sections:
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return {name: dict(parser[name]) for name in parser.sections()}


def apply_overrides(sections: Sections, assignments: list[str]) -> None:
    """Apply ``section.key=value`` strings in place.

    The key is everything after the last dot, so dotted section names
    like ``flow.a`` address their keys as ``flow.a.start_s``.
    """
    for item in assignments:
        head, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        section, dot, key = head.rpartition(".")
        if not dot or not section or not key:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        sections.setdefault(section.strip(), {})[key.strip()] = value.strip()


def _get(section: dict[str, str], key: str, parse, default):
    raw = section.get(key)
    if raw is None:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return parse(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from exc


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def build_scenario(sections: Sections) -> ScenarioConfig:
    """Turn section dictionaries into a validated ScenarioConfig."""
    known = {"run", "link", "delay", "aqm"}
    for name in sections:
        if name not in known and not name.startswith("flow."):
            raise ConfigError(f"unknown config section [{name}]")

    run = sections.get("run", {})
    duration_ns = s_to_ns(_get(run, "duration_s", float, 30.0))

    link_sec = sections.get("link", {})
    if "rate_bps" in link_sec and "rate_mbps" in link_sec:
        raise ConfigError("give either link.rate_bps or link.rate_mbps, not both")
    if "rate_mbps" in link_sec:
        rate_bps = round(_get(link_sec, "rate_mbps", float, None) * 1e6)
    else:
        rate_bps = _get(link_sec, "rate_bps", int, 12_000_000)
    mode_raw = link_sec.get("mode", "bursty").strip().lower()
    try:
        mode = LinkMode(mode_raw)
    except ValueError:
        raise ConfigError(
            f"unknown link mode {mode_raw!r}, expected bursty or smooth"
        ) from None
    link = LinkConfig(
        rate_bps=rate_bps,
        mode=mode,
        mtu=_get(link_sec, "mtu", int, 1500),
        trace_file=link_sec.get("trace_file"),
    )

    delay_sec = sections.get("delay", {})
    if "rtt_ms" in delay_sec:
        if "fwd_ms" in delay_sec or "rev_ms" in delay_sec:
            raise ConfigError("give either delay.rtt_ms or fwd_ms/rev_ms, not both")
        rtt_ns = ms_to_ns(_get(delay_sec, "rtt_ms", float, None))
        fwd_ns = rtt_ns // 2
        rev_ns = rtt_ns - fwd_ns
    else:
        fwd_ns = ms_to_ns(_get(delay_sec, "fwd_ms", float, 10.0))
        rev_ns = ms_to_ns(_get(delay_sec, "rev_ms", float, 10.0))
    delay = DelayConfig(fwd_ns=fwd_ns, rev_ns=rev_ns)

    aqm_sec = sections.get("aqm", {})
    limit_raw = aqm_sec.get("limit_bytes", "auto").strip().lower()
    if limit_raw == "auto":
        limit_bytes = default_limit_bytes(rate_bps)
    else:
        limit_bytes = _get(aqm_sec, "limit_bytes", int, None)
    aqm = AqmConfig(
        target_ns=ms_to_ns(_get(aqm_sec, "target_ms", float, 15.0)),
        tupdate_ns=ms_to_ns(_get(aqm_sec, "tupdate_ms", float, 16.0)),
        alpha=_get(aqm_sec, "alpha", float, 0.16),
        beta=_get(aqm_sec, "beta", float, 3.2),
        step_thresh_ns=ms_to_ns(_get(aqm_sec, "step_thresh_ms", float, 1.0)),
        coupling_k=_get(aqm_sec, "coupling_k", float, 2.0),
        limit_bytes=limit_bytes,
        classic_protection=_get(aqm_sec, "classic_protection", float, 0.1),
        ecn_classic_enabled=_get(aqm_sec, "ecn_classic", _parse_bool, True),
    )

    flows = []
    for name in sections:
        if not name.startswith("flow."):
            continue
        fname = name[len("flow."):]
        fsec = sections[name]
        kind = fsec.get("kind")
        if kind not in SENDER_KINDS:
            raise ConfigError(
                f"flow {fname!r}: kind must be one of {SENDER_KINDS}, got {kind!r}"
            )
        stop_raw = fsec.get("stop_s")
        flows.append(
            FlowConfig(
                name=fname,
                kind=kind,
                start_ns=s_to_ns(_get(fsec, "start_s", float, 0.0)),
                stop_ns=s_to_ns(float(stop_raw)) if stop_raw is not None else None,
            )
        )
    flows.sort(key=lambda f: (f.start_ns, f.name))

    cfg = ScenarioConfig(
        link=link,
        delay=delay,
        aqm=aqm,
        flows=tuple(flows),
        duration_ns=duration_ns,
    )
    try:
        cfg.validate()
    except (ValueError, ConfigError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def parse_flow_shorthand(spec: str) -> tuple[str, ...]:
    """Parse 'scalable+cubic' style flow lists."""
    kinds = tuple(k.strip() for k in spec.split("+") if k.strip())
    if not kinds:
        raise ConfigError(f"empty flow list: {spec!r}")
    for kind in kinds:
        if kind not in SENDER_KINDS:
            raise ConfigError(
                f"unknown flow kind {kind!r}, expected one of {SENDER_KINDS}"
            )
    return kinds
