"""
📚 Corpus Module
Named graph files, generated families and the bundled YAML manifest
"""

import logging
import os
from dataclasses import dataclass, field

import yaml

from app.modules.multigraph import (
    Multigraph,
    ParseError,
    ValidationError,
    chain_of_loops,
    complete_graph,
    cycle_graph,
    dumbbell_graph,
    enumerate_cubic,
    enumerate_stable,
    format_graph,
    load_graph,
    loop_example_graph,
    theta_graph,
)

logger = logging.getLogger(__name__)

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")
BUNDLED_MANIFEST = os.path.join(DATA_DIR, "corpus.yaml")

FAMILIES = ("cubic", "stable", "chain", "cycle", "complete", "theta", "dumbbell", "loop-example")
SIZED_FAMILIES = ("cubic", "stable", "chain", "cycle", "complete")


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    graph: Multigraph
    provenance: dict = field(default_factory=dict, compare=False)


@dataclass
class Corpus:
    entries: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def names(self) -> list:
        return [entry.name for entry in self.entries]

    def get(self, name: str) -> CorpusEntry:
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise KeyError(name)

    def loopless(self) -> "Corpus":
        return Corpus([entry for entry in self.entries if not entry.graph.has_loops])

    def loopy(self) -> "Corpus":
        return Corpus([entry for entry in self.entries if entry.graph.has_loops])


def family_entries(family: str, size: int = None, cap: int = None) -> list:
    """Generated graphs of a family; `size` is the genus (cubic, stable, chain) or vertex count"""
    if family in SIZED_FAMILIES and size is None:
        raise ValidationError(f"family {family!r} needs a size (genus or vertex count)")
    if family == "cubic":
        graphs = enumerate_cubic(size, cap=cap)
        return [
            CorpusEntry(f"cubic-g{size}-{i}", G, {"family": "cubic", "genus": size, "index": i})
            for i, G in enumerate(graphs)
        ]
    if family == "stable":
        graphs = enumerate_stable(size, cap=cap)
        return [
            CorpusEntry(f"stable-g{size}-{i}", G, {"family": "stable", "genus": size, "index": i})
            for i, G in enumerate(graphs)
        ]
    if family == "chain":
        return [CorpusEntry(f"chain-g{size}", chain_of_loops(size), {"family": "chain", "genus": size})]
    if family == "cycle":
        return [CorpusEntry(f"c{size}", cycle_graph(size), {"family": "cycle", "vertices": size})]
    if family == "complete":
        return [CorpusEntry(f"k{size}", complete_graph(size), {"family": "complete", "vertices": size})]
    named = {"theta": theta_graph, "dumbbell": dumbbell_graph, "loop-example": loop_example_graph}
    if family in named:
        return [CorpusEntry(family, named[family](), {"family": family})]
    raise ValidationError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def _sizes(value) -> list:
    if isinstance(value, list):
        return value
    if isinstance(value, dict):
        return list(range(value["from"], value["to"] + 1))
    return [value]


def load_manifest(path, cap: int = None) -> Corpus:
    """Corpus from a YAML manifest with `graphs` (files) and `families` (generated) sections"""
    with open(path, encoding="utf-8") as handle:
        try:
            manifest = yaml.safe_load(handle) or {}
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line, column = (mark.line + 1, mark.column + 1) if mark else (1, 1)
            raise ParseError(f"manifest {path}: {getattr(e, 'problem', e)}", line, column) from None
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    for item in manifest.get("graphs", []):
        graph_path = os.path.join(base, item["file"])
        name = item.get("name", os.path.splitext(os.path.basename(graph_path))[0])
        provenance = {"file": item["file"]}
        if item.get("note"):
            provenance["note"] = item["note"]
        entries.append(CorpusEntry(name, load_graph(graph_path), provenance))
    for item in manifest.get("families", []):
        for size in _sizes(item.get("size", item.get("genus"))):
            entries.extend(family_entries(item["family"], size, cap=cap))
    logger.info(f"✅ Loaded corpus {path}: {len(entries)} graphs")
    return Corpus(entries)


def bundled_corpus(cap: int = None) -> Corpus:
    return load_manifest(BUNDLED_MANIFEST, cap=cap)


def load_corpus(source: str, cap: int = None) -> Corpus:
    """`bundled`, a YAML manifest, a single .graph file or a directory of .graph files"""
    if source == "bundled":
        return bundled_corpus(cap)
    if os.path.isdir(source):
        files = sorted(f for f in os.listdir(source) if f.endswith(".graph"))
        return Corpus([
            CorpusEntry(os.path.splitext(f)[0], load_graph(os.path.join(source, f)), {"file": f}) for f in files
        ])
    if source.endswith((".yaml", ".yml")):
        return load_manifest(source, cap=cap)
    name = os.path.splitext(os.path.basename(source))[0]
    return Corpus([CorpusEntry(name, load_graph(source), {"file": os.path.basename(source)})])


def write_entries(entries: list, out_dir: str) -> list:
    """Write each entry as <name>.graph with its provenance as a comment header"""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for entry in entries:
        path = os.path.join(out_dir, f"{entry.name}.graph")
        comment = ", ".join(f"{k}={v}" for k, v in entry.provenance.items())
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(format_graph(entry.graph, comment=f"{entry.name} ({comment})"))
        paths.append(path)
    return paths
