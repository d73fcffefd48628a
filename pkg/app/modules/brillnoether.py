"""
🔭 Brill-Noether Module
rho, W^r_d loci, gonality and the scan harnesses for existence, chains of loops and cubic graphs
"""

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from tqdm import tqdm

from app.modules.corpus import CorpusEntry, family_entries
from app.modules.divisor import BASE_VERTEX, format_divisor
from app.modules.jacobian import jacobian, picard_representatives
from app.modules.multigraph import (
    CapExceededError,
    Multigraph,
    ValidationError,
    automorphism_count,
    edge_connectivity,
    genus,
)
from app.modules.rank import loop_refinement, rank, rank_at_least
from app.modules.reports import CellRecord, ScanReport

logger = logging.getLogger(__name__)

DEFAULT_WITNESS_CAP = 10
SCAN_MODES = ("existence", "cdpr", "cubic", "max-aut")


def get_witness_cap() -> int:
    return int(os.getenv("BNGRAPH_WITNESS_CAP", DEFAULT_WITNESS_CAP))


def get_default_jobs() -> int:
    return int(os.getenv("BNGRAPH_JOBS", os.cpu_count() or 1))


def rho(g: int, r: int, d: int) -> int:
    """Brill-Noether number g - (r+1)(g-d+r)"""
    return g - (r + 1) * (g - d + r)


@dataclass(frozen=True)
class BNQuery:
    d: int
    r: int
    use_sharp: bool = True

    def __post_init__(self):
        if self.r < 0:
            raise ValidationError("rank bound r must be >= 0")


@dataclass(frozen=True)
class WrdResult:
    """Reduced representatives of the classes in W^r_d, tested against all of Pic^d"""

    query: BNQuery
    witnesses: tuple
    classes_tested: int
    jacobian_order: int

    @property
    def exhausted(self) -> bool:
        return self.classes_tested == self.jacobian_order

    @property
    def empty(self) -> bool:
        return not self.witnesses

    def __len__(self):
        return len(self.witnesses)

    def to_dict(self) -> dict:
        return {
            "d": self.query.d,
            "r": self.query.r,
            "use_sharp": self.query.use_sharp,
            "count": len(self.witnesses),
            "classes_tested": self.classes_tested,
            "jacobian_order": self.jacobian_order,
            "exhausted": self.exhausted,
            "witnesses": [format_divisor(D) for D in self.witnesses],
        }


def class_ranks(G: Multigraph, d: int, use_sharp: bool = True, q: int = BASE_VERTEX) -> list:
    """(representative, rank) for every class of Pic^d(G); r# when use_sharp"""
    if use_sharp and G.has_loops:
        target, refinement = loop_refinement(G)
    else:
        target, refinement = G, None
    memo = {}
    ranked = []
    for D in picard_representatives(G, d, q):
        lifted = refinement.transport(D) if refinement else D
        ranked.append((D, rank(target, lifted, q, memo=memo).rank))
    return ranked


def wrd(G: Multigraph, query: BNQuery, q: int = BASE_VERTEX) -> WrdResult:
    """W^r_d(G) as reduced representatives; every class of Pic^d is tested"""
    if query.use_sharp and G.has_loops:
        target, refinement = loop_refinement(G)
    else:
        target, refinement = G, None
    memo = {}
    witnesses = []
    tested = 0
    for D in picard_representatives(G, query.d, q):
        tested += 1
        lifted = refinement.transport(D) if refinement else D
        if rank_at_least(target, lifted, query.r, q, memo=memo):
            witnesses.append(D)
    return WrdResult(query, tuple(witnesses), tested, jacobian(G).order)


def gonality(G: Multigraph, use_sharp: bool = True) -> int:
    """Least d >= 1 carrying a class of rank >= 1 (always <= g + 1)"""
    if genus(G) < 2:
        raise ValidationError("gonality is computed for genus >= 2")
    d = 1
    while wrd(G, BNQuery(d, 1, use_sharp)).empty:
        d += 1
    return d


def is_hyperelliptic(G: Multigraph, use_sharp: bool = True) -> bool:
    return gonality(G, use_sharp) <= 2


def degree_window(g: int, dmax: int = None) -> range:
    top = 2 * g - 2 if dmax is None else min(2 * g - 2, dmax)
    return range(0, top + 1)


def brill_noether_cells(g: int, d: int, negative: bool) -> list:
    """Ranks 0 <= r <= d whose rho is negative (or non-negative); r > d is empty by degree"""
    return [r for r in range(d + 1) if (rho(g, r, d) < 0) == negative]


def is_brill_noether_general(G: Multigraph, use_sharp: bool = True) -> bool:
    g = genus(G)
    for d in degree_window(g):
        cells = brill_noether_cells(g, d, negative=True)
        if not cells:
            continue
        ranks = [value for _, value in class_ranks(G, d, use_sharp)]
        if any(value >= min(cells) for value in ranks):
            return False
    return True


# ============ Scan harness ============

def _profile_task(task: tuple) -> tuple:
    """Worker: (W^r_d cell records of one graph for every 0 <= r <= d, seconds spent)"""
    started = time.perf_counter()
    name, G, d, use_sharp, witness_cap = task
    g = genus(G)
    ranked = class_ranks(G, d, use_sharp)
    order = jacobian(G).order
    records = []
    for r in range(d + 1):
        members = [D for D, value in ranked if value >= r]
        records.append(CellRecord(
            graph=name,
            genus=g,
            d=d,
            r=r,
            rho=rho(g, r, d),
            use_sharp=use_sharp,
            count=len(members),
            classes_tested=len(ranked),
            jacobian_order=order,
            witnesses=[format_divisor(D) for D in members[:witness_cap]],
        ))
    return records, time.perf_counter() - started


def _run_tasks(tasks: list, jobs: int, progress: bool) -> tuple:
    """(records, per-task timings), in task order whatever the worker count"""
    bar = dict(total=len(tasks), desc="scan", disable=not progress, leave=False)
    if jobs <= 1 or len(tasks) <= 1:
        results = [_profile_task(task) for task in tqdm(tasks, **bar)]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            results = list(tqdm(executor.map(_profile_task, tasks), **bar))
    records = [record for batch, _ in results for record in batch]
    timings = [
        {"graph": task[0], "d": task[2], "use_sharp": task[3], "seconds": round(seconds, 3)}
        for task, (_, seconds) in zip(tasks, results)
    ]
    return records, timings


def graph_summary(entry: CorpusEntry) -> dict:
    G = entry.graph
    return {
        "name": entry.name,
        "provenance": entry.provenance,
        "genus": genus(G),
        "vertices": G.vertex_count,
        "edges": [list(e) for e in G.edges],
        "loops": G.loop_count,
        "jacobian": jacobian(G).to_dict(),
        "automorphisms": automorphism_count(G),
        "edge_connectivity": edge_connectivity(G),
    }


def _scan_cells(entries: list, dmax, flags_for, jobs: int, witness_cap: int, progress: bool) -> tuple:
    tasks = []
    for entry in entries:
        for use_sharp in flags_for(entry.graph):
            for d in degree_window(genus(entry.graph), dmax):
                tasks.append((entry.name, entry.graph, d, use_sharp, witness_cap))
    logger.info(f"🔭 {len(tasks)} scan tasks over {len(entries)} graphs")
    return _run_tasks(tasks, jobs, progress)


def existence_scan(entries: list, use_sharp: bool = True, dmax: int = None, jobs: int = 1,
                   witness_cap: int = None, progress: bool = False) -> ScanReport:
    """Every cell with rho >= 0 in the degree window must be non-empty"""
    started = time.perf_counter()
    witness_cap = get_witness_cap() if witness_cap is None else witness_cap
    report = ScanReport("existence", {"use_sharp": use_sharp, "dmax": dmax, "witness_cap": witness_cap})
    kept = []
    for entry in entries:
        if genus(entry.graph) < 1:
            report.skipped.append({"graph": entry.name, "reason": "genus 0 has an empty degree window"})
        else:
            kept.append(entry)
    report.graphs = [graph_summary(entry) for entry in kept]
    records, timings = _scan_cells(kept, dmax, lambda G: [use_sharp], jobs, witness_cap, progress)
    report.records = [r for r in records if r.rho >= 0]
    report.violations = [
        {"graph": r.graph, "d": r.d, "r": r.r, "rho": r.rho, "reason": "W^r_d empty although rho >= 0"}
        for r in report.records if r.empty
    ]
    report.stamp(time.perf_counter() - started, jobs, timings)
    return report


def existence_check(G: Multigraph, name: str = "graph", use_sharp: bool = True, jobs: int = 1) -> ScanReport:
    if genus(G) < 2:
        raise ValidationError("existence check needs genus >= 2")
    return existence_scan([CorpusEntry(name, G, {"source": "argument"})], use_sharp=use_sharp, jobs=jobs)


def cdpr_scan(g_range, use_sharp: bool = True, dmax: int = None, jobs: int = 1,
              witness_cap: int = None, progress: bool = False) -> ScanReport:
    """Chains of loops: every rho < 0 cell must be empty"""
    started = time.perf_counter()
    witness_cap = get_witness_cap() if witness_cap is None else witness_cap
    g_values = list(g_range)
    if not g_values:
        raise ValidationError("empty genus range")
    report = ScanReport("cdpr", {
        "genera": g_values, "use_sharp": use_sharp, "dmax": dmax, "witness_cap": witness_cap,
    })
    entries = [entry for g in g_values for entry in family_entries("chain", g)]
    report.graphs = [graph_summary(entry) for entry in entries]
    records, timings = _scan_cells(entries, dmax, lambda G: [use_sharp], jobs, witness_cap, progress)
    report.records = [r for r in records if r.rho < 0]
    report.violations = [
        {"graph": r.graph, "d": r.d, "r": r.r, "rho": r.rho, "reason": "W^r_d non-empty although rho < 0"}
        for r in report.records if not r.empty
    ]
    report.stamp(time.perf_counter() - started, jobs, timings)
    return report


def _family_for(g: int, graph_class: str, report: ScanReport, cap) -> list:
    try:
        return family_entries(graph_class, g, cap=cap)
    except CapExceededError as e:
        logger.warning(f"⚠️ {e}")
        report.skipped.append({"g": g, "class": graph_class, "reason": str(e)})
        return []


def _empty_names(records: list, d: int, r: int, use_sharp: bool, names: list) -> list:
    return [
        rec.graph for rec in records
        if rec.d == d and rec.r == r and rec.use_sharp == use_sharp and rec.empty and rec.graph in names
    ]


def conjecture_scan(g_range, mode: str, dmax: int = None, jobs: int = 1, witness_cap: int = None,
                    cap: int = None, progress: bool = False) -> ScanReport:
    """Explore the cubic-existence and maximal-automorphism conjectures; both ranks are reported"""
    if mode not in ("cubic", "max-aut"):
        raise ValidationError(f"unknown conjecture mode {mode!r}")
    started = time.perf_counter()
    witness_cap = get_witness_cap() if witness_cap is None else witness_cap
    g_values = list(g_range)
    if not g_values:
        raise ValidationError("empty genus range")
    report = ScanReport(mode, {"genera": g_values, "dmax": dmax, "witness_cap": witness_cap})
    classes = ["cubic"] if mode == "cubic" else ["cubic", "stable"]

    scanned = []
    seen = set()
    plans = []
    for g in g_values:
        for graph_class in classes:
            family = _family_for(g, graph_class, report, cap)
            if not family:
                continue
            if mode == "max-aut":
                counts = {entry.name: automorphism_count(entry.graph) for entry in family}
                best = max(counts.values())
                chosen = [entry for entry in family if counts[entry.name] == best]
            else:
                best = None
                chosen = family
            plans.append((g, graph_class, best, [entry.name for entry in chosen]))
            for entry in chosen:
                if entry.name not in seen:
                    seen.add(entry.name)
                    scanned.append(entry)
    if not scanned and not report.skipped:
        raise ValidationError("empty graph family")

    report.graphs = [graph_summary(entry) for entry in scanned]
    records, timings = _scan_cells(scanned, dmax, lambda G: [True, False], jobs, witness_cap, progress)
    report.records = [r for r in records if r.rho < 0]

    for g, graph_class, best, names in plans:
        cells = []
        for d in degree_window(g, dmax):
            for r in brill_noether_cells(g, d, negative=True):
                for use_sharp in (True, False):
                    empty_in = _empty_names(report.records, d, r, use_sharp, names)
                    cells.append({
                        "d": d, "r": r, "rho": rho(g, r, d), "use_sharp": use_sharp,
                        "empty_in": empty_in, "holds": bool(empty_in) if mode == "cubic" else len(empty_in) == len(names),
                    })
        finding = {"g": g, "class": graph_class, "graphs": names, "cells": cells}
        if mode == "max-aut":
            finding["max_automorphisms"] = best
        report.findings.append(finding)
    report.stamp(time.perf_counter() - started, jobs, timings)
    return report
