import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List

from .analytics import TriageClass, classify
from .recovery import recover
from .utils import format_ratio
from .versions import DEFAULT_MAX_CANDIDATES, detect_version

logger = logging.getLogger(__name__)


@dataclass
class InstanceReport:
    instance: object
    verdict: object
    classifications: List[tuple] = field(default_factory=list)

    def to_dict(self, release_rank):
        inst, ind = self.instance, self.instance.indicators

        def ordered(versions):
            return sorted(versions, key=lambda v: (release_rank.get(v, len(release_rank)), v))

        entry = {
            "library": inst.library,
            "classes": len(inst.classes),
            "v_p": ordered(inst.v_p),
            "versions": ordered(self.verdict.candidates_out),
            "phase": self.verdict.phase.value,
            "score": format_ratio(inst.score),
            "scoring_version": inst.scoring_version,
            "indicators": {
                "matched": ind.matched,
                "sim_s": format_ratio(ind.sim_s),
                "sim_a": format_ratio(ind.sim_a),
                "prop": format_ratio(ind.prop),
                "comp": format_ratio(ind.comp),
            },
        }
        if self.verdict.similarity:
            entry["code_similarity"] = {v: format_ratio(s) for v, s in
                                        sorted(self.verdict.similarity.items())}
        if self.classifications:
            entry["advisories"] = [{"reference": advisory.reference, "triage": verdict.value}
                                   for advisory, verdict in self.classifications]
        return entry


@dataclass
class ScanReport:
    app_id: str
    instances: List[InstanceReport]
    residual: List[object]
    unmatched: int
    manifest_digest: str
    timings: Dict[str, float] = field(default_factory=dict)

    def libraries(self):
        return [r.instance.library for r in self.instances]

    def to_dict(self, database, include_timings=False):
        report = {
            "app": self.app_id,
            "database": self.manifest_digest,
            "instances": [r.to_dict(database.release_rank(r.instance.library))
                          for r in self.instances],
            "residual": [str(name) for name in self.residual],
            "unmatched": self.unmatched,
        }
        if include_timings:
            report["timings"] = {phase: round(t, 6) for phase, t in self.timings.items()}
        return report

    def to_text(self, database):
        lines = [f"App {self.app_id}: {len(self.instances)} libraries, "
                 f"{self.unmatched} unmatched classes, {len(self.residual)} residual classes"]
        for r in self.instances:
            entry = r.to_dict(database.release_rank(r.instance.library))
            lines.append(f"  {entry['library']:<24} {entry['classes']:>5} classes  "
                         f"score {entry['score']}  versions {', '.join(entry['versions'])}"
                         f" ({entry['phase']})")
            for item in entry.get("advisories", []):
                lines.append(f"    {item['reference']}: {item['triage']}")
        return "\n".join(lines) + "\n"


class LibraryDetector:
    """Recover the libraries of an app and pinpoint their versions."""

    def __init__(self, database, index, code_level=False, max_candidates=DEFAULT_MAX_CANDIDATES,
                 advisories=()):
        """
        Initialize the detector.

        Parameters:
        -----------
        database : LibraryDatabase
            Collected library releases
        index : ClassIndex
            Class index built from `database`
        code_level : bool, optional
            Refine wide class-level version sets with code features
        max_candidates : int, optional
            Refinement runs only when more releases than this remain
        advisories : sequence of Advisory, optional
            Advisories every detected instance is triaged against
        """
        self.database = database
        self.index = index
        self.code_level = code_level
        self.max_candidates = max_candidates
        self.advisories = list(advisories)

    def scan(self, app_id, app):
        """Run recovery, version detection and triage on one app profile."""
        timings = {}
        started = time.perf_counter()
        result = recover(app, self.index)
        timings["recovery"] = time.perf_counter() - started

        started = time.perf_counter()
        reports = []
        for instance in result.instances:
            verdict = detect_version(instance, app, self.database, self.code_level,
                                     self.max_candidates)
            reports.append(InstanceReport(instance, verdict))
        timings["versions"] = time.perf_counter() - started

        started = time.perf_counter()
        for report in reports:
            for advisory in self.advisories:
                triage = classify(report.verdict, advisory)
                if triage is not TriageClass.NOT_APPLICABLE:
                    report.classifications.append((advisory, triage))
        timings["triage"] = time.perf_counter() - started

        logger.info(f"{app_id}: {len(reports)} libraries recovered, {len(result.residual)} residual "
                    f"and {len(result.unmatched)} unmatched classes")
        return ScanReport(app_id, reports, result.residual, len(result.unmatched),
                          self.database.manifest_digest().hex(), timings)
