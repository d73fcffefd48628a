import pytest

from app.modules import brillnoether, multigraph, rank
from app.modules.brillnoether import BNQuery
from app.modules.corpus import CorpusEntry, family_entries
from app.modules.divisor import parse_divisor


def _without_run(report) -> dict:
    payload = report.to_dict()
    payload.pop("run")
    return payload


@pytest.mark.parametrize("g, r, d, expected", [(3, 1, 2, -1), (2, 1, 2, 0), (4, 1, 3, 0), (5, 2, 4, -4), (3, 0, 0, 0)])
def test_rho(g, r, d, expected):
    assert brillnoether.rho(g, r, d) == expected


def test_query_rejects_negative_rank():
    with pytest.raises(multigraph.ValidationError):
        BNQuery(2, -1)


def test_k4_is_not_hyperelliptic(k4):
    result = brillnoether.wrd(k4, BNQuery(2, 1))
    assert result.empty
    assert result.exhausted
    assert result.classes_tested == 16
    assert brillnoether.gonality(k4) == 3
    assert not brillnoether.is_hyperelliptic(k4)


@pytest.mark.parametrize(
    "factory",
    [multigraph.theta_graph, multigraph.dumbbell_graph, multigraph.loop_example_graph, lambda: multigraph.chain_of_loops(2)],
)
def test_genus_two_graphs_are_hyperelliptic(factory):
    assert brillnoether.gonality(factory(), use_sharp=True) == 2


def test_plain_gonality_sees_only_the_loopless_part(dumbbell, loop_graph):
    # without loops the dumbbell is a tree
    assert brillnoether.gonality(dumbbell, use_sharp=False) == 1
    assert brillnoether.gonality(loop_graph, use_sharp=False) == 2


def test_gonality_needs_genus_two():
    with pytest.raises(multigraph.ValidationError):
        brillnoether.gonality(multigraph.cycle_graph(4))


def test_wrd_payload(theta):
    result = brillnoether.wrd(theta, BNQuery(2, 1))
    payload = result.to_dict()
    assert payload["count"] == len(result) == 1
    assert payload["jacobian_order"] == 3
    assert payload["exhausted"]
    # the single degree-2 class of rank 1 is the canonical class
    assert payload["witnesses"] == ["0:1,1:1"]


def test_wrd_witnesses_reverify(loop_graph):
    result = brillnoether.wrd(loop_graph, BNQuery(2, 1, use_sharp=True))
    assert not result.empty
    for D in result.witnesses:
        assert rank.rank_sharp(loop_graph, D).rank >= 1


def test_class_ranks_cover_picard(k4):
    ranked = brillnoether.class_ranks(k4, 4)
    assert len(ranked) == 16
    # degree 2g-2: only K has rank g-1
    assert sorted(value for _, value in ranked) == [1] * 15 + [2]


def test_degree_window_and_cells():
    assert list(brillnoether.degree_window(3)) == [0, 1, 2, 3, 4]
    assert list(brillnoether.degree_window(3, dmax=2)) == [0, 1, 2]
    assert brillnoether.brill_noether_cells(3, 2, negative=True) == [1, 2]
    assert brillnoether.brill_noether_cells(3, 2, negative=False) == [0]


def test_brill_noether_generality(k4):
    assert brillnoether.is_brill_noether_general(k4)
    assert brillnoether.is_brill_noether_general(multigraph.chain_of_loops(3))
    banana = multigraph.Multigraph(2, ((0, 1),) * 4)
    assert not brillnoether.is_brill_noether_general(banana)


def test_existence_scan_over_bundled_corpus(corpus):
    report = brillnoether.existence_scan(list(corpus))
    assert report.violations == []
    assert report.complete
    assert report.records
    assert all(record.rho >= 0 and not record.empty for record in report.records)
    assert all(record.exhausted for record in report.records)


def test_existence_scan_skips_trees():
    path = CorpusEntry("path", multigraph.Multigraph(2, ((0, 1),)))
    report = brillnoether.existence_scan([path, CorpusEntry("c4", multigraph.cycle_graph(4))])
    assert [item["graph"] for item in report.skipped] == ["path"]
    assert [summary["name"] for summary in report.graphs] == ["c4"]
    assert report.violations == []


def test_existence_witnesses_reverify(corpus):
    loop_entry = corpus.get("loop1")
    report = brillnoether.existence_scan([loop_entry])
    G = loop_entry.graph
    for record in report.records:
        for text in record.witnesses:
            assert rank.rank_sharp(G, parse_divisor(G, text)).rank >= record.r


def test_existence_check_requires_genus_two():
    with pytest.raises(multigraph.ValidationError):
        brillnoether.existence_check(multigraph.cycle_graph(3))
    report = brillnoether.existence_check(multigraph.theta_graph(), name="theta")
    assert report.violations == []


def test_chains_of_loops_are_brill_noether_general():
    report = brillnoether.cdpr_scan(range(2, 4))
    assert report.violations == []
    assert report.records
    assert all(record.rho < 0 and record.empty and record.exhausted for record in report.records)
    orders = {summary["name"]: summary["jacobian"]["order"] for summary in report.graphs}
    assert orders == {"chain-g2": "9", "chain-g3": "125"}


def test_cubic_scan_lists_k4_without_hyperelliptic_class(k4):
    report = brillnoether.conjecture_scan(range(3, 4), "cubic")
    k4_name = next(entry.name for entry in family_entries("cubic", 3) if multigraph.is_isomorphic(entry.graph, k4))
    [finding] = report.findings
    assert finding["graphs"] == [f"cubic-g3-{i}" for i in range(5)]
    for cell in finding["cells"]:
        if (cell["d"], cell["r"]) == (2, 1):
            assert k4_name in cell["empty_in"]
            assert cell["holds"]


def test_max_automorphism_scan_genus_three(k4):
    report = brillnoether.conjecture_scan(range(3, 4), "max-aut")
    assert [finding["class"] for finding in report.findings] == ["cubic", "stable"]
    for finding in report.findings:
        assert finding["max_automorphisms"] == 24
        assert len(finding["graphs"]) == 1
        assert all(cell["holds"] for cell in finding["cells"])


def test_conjecture_scan_records_skipped_genera():
    report = brillnoether.conjecture_scan(range(2, 4), "cubic", cap=2)
    assert not report.complete
    assert [item["g"] for item in report.skipped] == [3]
    assert [finding["g"] for finding in report.findings] == [2]


def test_conjecture_scan_rejects_bad_requests():
    with pytest.raises(multigraph.ValidationError):
        brillnoether.conjecture_scan(range(3, 4), "everything")
    with pytest.raises(multigraph.ValidationError):
        brillnoether.conjecture_scan(range(3, 3), "cubic")


def test_scan_is_deterministic_across_worker_counts(corpus):
    entries = [corpus.get(name) for name in ("theta", "loop1", "k4", "c5")]
    serial = brillnoether.existence_scan(entries, jobs=1)
    parallel = brillnoether.existence_scan(entries, jobs=3)
    assert _without_run(serial) == _without_run(parallel)
    serial.run = parallel.run = {}
    assert serial.to_json() == parallel.to_json()


def test_task_timings_are_kept_in_run(corpus):
    entries = [corpus.get(name) for name in ("theta", "k4")]
    serial = brillnoether.existence_scan(entries, jobs=1)
    parallel = brillnoether.existence_scan(entries, jobs=2)
    keys = [(t["graph"], t["d"], t["use_sharp"]) for t in serial.run["task_seconds"]]
    assert keys == [(t["graph"], t["d"], t["use_sharp"]) for t in parallel.run["task_seconds"]]
    # theta covers d = 0..2, k4 covers d = 0..4
    assert keys == [("theta", d, True) for d in range(3)] + [("k4", d, True) for d in range(5)]
    assert all(t["seconds"] >= 0 for t in serial.run["task_seconds"])
    assert "seconds" not in serial.records[0].to_dict()


def test_witness_cap_limits_stored_witnesses(monkeypatch, k4):
    monkeypatch.setenv("BNGRAPH_WITNESS_CAP", "2")
    report = brillnoether.existence_scan([CorpusEntry("k4", k4)], dmax=3)
    assert report.parameters["witness_cap"] == 2
    assert all(len(record.witnesses) <= 2 for record in report.records)
    assert any(record.count > 2 for record in report.records)


def test_chain_of_loops_has_no_degree_one_pencil():
    result = brillnoether.wrd(multigraph.chain_of_loops(2), BNQuery(1, 1))
    assert result.empty
    assert result.classes_tested == 9


def test_loci_are_nested_and_fill_picard_above_genus(k4):
    for d in range(0, 5):
        counts = [len(brillnoether.wrd(k4, BNQuery(d, r))) for r in range(0, 3)]
        assert counts == sorted(counts, reverse=True)
        if d >= 3:
            assert counts[0] == 16
