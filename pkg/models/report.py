"""
Run report: everything a simulation emits, as plain serializable data
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List

REPORT_TABLES = ("auth_events", "frames", "injections", "timeline")


@dataclass
class Report:
    scenario: Dict[str, Any]
    summary: Dict[str, Any] = field(default_factory=dict)
    nodes: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    attackers: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    gateway: Dict[str, Any] = field(default_factory=dict)
    auth_events: List[Dict[str, Any]] = field(default_factory=list)
    frames: List[Dict[str, Any]] = field(default_factory=list)
    injections: List[Dict[str, Any]] = field(default_factory=list)
    timeline: List[Dict[str, Any]] = field(default_factory=list)
    events_processed: Dict[str, int] = field(default_factory=dict)
    synthetic_defaults: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario,
            "summary": self.summary,
            "nodes": self.nodes,
            "attackers": self.attackers,
            "gateway": self.gateway,
            "auth_events": self.auth_events,
            "frames": self.frames,
            "injections": self.injections,
            "timeline": self.timeline,
            "events_processed": self.events_processed,
            "synthetic_defaults": self.synthetic_defaults,
        }

    def table(self, name: str) -> List[Dict[str, Any]]:
        if name not in REPORT_TABLES:
            raise KeyError(f"unknown report table {name!r}")
        return getattr(self, name)

    def verdict_count(self, verdict: str) -> int:
        """Gateway verdicts over every received frame"""
        return sum(1 for f in self.frames if f["verdict"] == verdict)

    def adversarial_accepted(self) -> int:
        return sum(1 for f in self.frames
                   if f["provenance"] != "node" and f["verdict"] in ("Accepted", "AcceptedDuplicate"))

    def legitimate_frames(self) -> List[Dict[str, Any]]:
        return [f for f in self.frames if f["provenance"] == "node"]
