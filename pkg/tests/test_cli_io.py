import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tromino_cube import gadgets
from tromino_cube.cli import EXIT_DEFECT, EXIT_INVALID, EXIT_OK, EXIT_USAGE, main, sweep_instances
from tromino_cube.documents import (
    DEFICIENCY_MARK,
    DocumentError,
    InstanceDocument,
    TilingDocument,
    loads,
    render_layers,
    render_obj,
)
from tromino_cube.gadgets import MISSING, GadgetProblem, WitnessCache, canonical_form, solve_gadget
from tromino_cube.geometry import BoxRegion, Instance, InstanceError
from tromino_cube.solver import clear_caches, solve
from tromino_cube.storage import CACHE_ENV, DiskWitnessStore


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- documents ---------------------------------------------------------------


@settings(max_examples=30)
@given(st.data())
def test_documents_round_trip(data):
    n = data.draw(st.integers(1, 8))
    k = (n ** 3) % 3
    cell = st.tuples(*[st.integers(0, n - 1)] * 3)
    inst = Instance(n, frozenset(data.draw(st.lists(cell, min_size=k, max_size=k, unique=True))))
    idoc = InstanceDocument.of(inst)
    assert InstanceDocument.from_json(json.loads(json.dumps(idoc.to_json()))) == idoc
    tdoc = TilingDocument.of(solve(inst))
    again = TilingDocument.from_json(json.loads(json.dumps(tdoc.to_json())))
    assert again == tdoc
    assert [p["id"] for p in tdoc.to_json()["pieces"]] == list(range(1, len(tdoc.pieces) + 1))


def test_parse_errors_name_the_field():
    doc = TilingDocument.of(solve(Instance(4, frozenset({(0, 0, 0)})))).to_json()
    doc["pieces"][3]["cells"][1] = [1, -2, 0]
    with pytest.raises(DocumentError, match=r"pieces\[3\]\.cells\[1\]"):
        TilingDocument.from_json(doc)
    doc = TilingDocument.of(solve(Instance(4, frozenset({(0, 0, 0)})))).to_json()
    doc["pieces"][0]["id"] = 7
    with pytest.raises(DocumentError, match=r"pieces\[0\]\.id"):
        TilingDocument.from_json(doc)
    with pytest.raises(DocumentError, match="instance.n"):
        TilingDocument.from_json({"instance": {"deficiencies": []}, "pieces": []})
    with pytest.raises(DocumentError, match="line 2"):
        loads('{\n  "n": }')


def test_instance_document_checks_invariants():
    with pytest.raises(InstanceError):
        InstanceDocument.from_json({"n": 4, "deficiencies": []})
    with pytest.raises(InstanceError):
        InstanceDocument.from_json({"n": 5, "deficiencies": [[0, 0, 0], [0, 0, 0]]})


@pytest.mark.parametrize("n,defs", [(4, [(1, 2, 3)]), (5, [(0, 0, 0), (4, 4, 4)]), (3, [])])
def test_layers_show_every_cell_once(n, defs):
    t = solve(Instance(n, frozenset(defs)))
    text = render_layers(n, t.instance.deficiencies, [p.cells for p in t.placements])
    blocks = text.strip().split("\n\n")
    assert [b.splitlines()[0] for b in blocks] == [f"z={z}" for z in range(n)]
    tokens = [tok for b in blocks for row in b.splitlines()[1:] for tok in row.split()]
    assert len(tokens) == n ** 3
    assert tokens.count(DEFICIENCY_MARK) == len(defs)
    ids = [int(tok) for tok in tokens if tok != DEFICIENCY_MARK]
    assert all(ids.count(i) == 3 for i in range(1, len(t.placements) + 1))


def test_layers_row_order():
    # A hand-made partial tiling: only the z=0 grid matters here.
    text = render_layers(2, {(0, 1, 0)}, [[(0, 0, 0), (1, 0, 0), (1, 1, 0)]])
    lines = text.splitlines()
    assert lines[1].split() == [DEFICIENCY_MARK, "1"]  # y = 1 first
    assert lines[2].split() == ["1", "1"]


def test_obj_export():
    text = render_obj([[(0, 0, 0), (1, 0, 0), (0, 1, 0)], [(5, 5, 5), (5, 6, 5), (5, 5, 6)]])
    assert text.count("\nv ") == 48 and text.count("\nf ") == 36
    assert "usemtl color_1" in text and "usemtl color_2" in text and "g piece_2" in text


# -- commands ----------------------------------------------------------------


@pytest.mark.parametrize("argv,count", [
    (["--n", "3"], 9),
    (["--n", "4", "--deficiency", "0,0,0"], 21),
    (["--n", "5", "--deficiency", "0,0,0", "--deficiency", "4,4,4"], 41),
])
def test_solve_piece_counts(capsys, argv, count):
    code, out, _ = run(capsys, "solve", *argv)
    assert code == EXIT_OK and len(json.loads(out)["pieces"]) == count


def test_solve_then_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "solve", "--n", "7", "--deficiency", "3,3,3")
    path = tmp_path / "t.json"
    path.write_text(out)
    code, out, _ = run(capsys, "verify", str(path))
    assert code == EXIT_OK and json.loads(out)["valid"]

    doc = json.loads(path.read_text())
    doc["pieces"][0]["cells"][0] = doc["pieces"][1]["cells"][0]
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify", str(path))
    kinds = {v["kind"] for v in json.loads(out)["violations"]}
    assert code == EXIT_DEFECT and kinds & {"overlap", "gap"}

    doc = json.loads(run(capsys, "solve", "--n", "4", "--deficiency", "0,0,0")[1])
    doc["instance"]["deficiencies"] = [doc["pieces"][0]["cells"][0]]
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify", str(path))
    assert code == EXIT_DEFECT
    assert "deficiency-covered" in {v["kind"] for v in json.loads(out)["violations"]}


def test_solve_from_document_and_formats(capsys, tmp_path):
    src = tmp_path / "inst.json"
    src.write_text(json.dumps({"n": 4, "deficiencies": [[1, 1, 1]]}))
    code, out, _ = run(capsys, "solve", str(src), "--format", "layers")
    assert code == EXIT_OK and out.startswith("z=0")
    obj = tmp_path / "mesh" / "out.obj"
    obj.parent.mkdir()
    code, _, _ = run(capsys, "solve", str(src), "--format", "voxel", "-o", str(obj))
    assert code == EXIT_OK and obj.read_text().count("\nv ") == 63 * 8
    assert (obj.parent / "tromino_palette.mtl").exists()


@pytest.mark.parametrize("argv,code", [
    (["solve", "--n", "4"], EXIT_INVALID),
    (["solve", "--n", "4", "--deficiency", "4,0,0"], EXIT_INVALID),
    (["solve", "--n", "5", "--deficiency", "1,1,1", "--deficiency", "1,1,1"], EXIT_INVALID),
    (["solve", "--n", "4", "--deficiency", "0,0"], EXIT_USAGE),
    (["solve"], EXIT_USAGE),
    (["frobnicate"], EXIT_USAGE),
    (["verify", "/nonexistent/file.json"], EXIT_USAGE),
    (["classify2d", "--m", "8"], EXIT_USAGE),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_malformed_document_is_usage_error(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"instance": {"n": 4, "deficiencies": [[0, 0, 0]]}, "pieces": [{"id": 1}]}')
    code, _, err = run(capsys, "verify", str(path))
    assert code == EXIT_USAGE and "pieces[0].cells" in err


def test_sweeps(capsys):
    code, out, _ = run(capsys, "sweep", "--n", "4", "--all")
    report = json.loads(out)
    assert code == EXIT_OK and report["attempted"] == report["solved"] == 64
    code, out, _ = run(capsys, "sweep", "--n", "8", "--random", "100", "--seed", "1")
    report = json.loads(out)
    assert code == EXIT_OK and report["attempted"] == report["solved"] == 100
    code, out, _ = run(capsys, "sweep", "--n", "4", "--classes")
    assert json.loads(out)["solved"] == 4


def test_seeded_sample_is_reproducible():
    a = list(sweep_instances(8, "random", 5, seed=3))
    assert a == list(sweep_instances(8, "random", 5, seed=3))
    assert a != list(sweep_instances(8, "random", 5, seed=4))


@pytest.mark.parametrize("m,labels", [(5, [1, 3, 5, 11, 13, 15, 21, 23, 25]), (2, [1, 2, 3, 4]), (3, [])])
def test_classify2d(capsys, m, labels):
    code, out, _ = run(capsys, "classify2d", "--m", str(m))
    assert code == EXIT_OK and json.loads(out)["labels"] == labels


# -- disk cache ---------------------------------------------------------------


def _column_problem():
    column = frozenset(BoxRegion((0, 0, 1), (2, 2, 3)).cells()) - {(1, 0, 2)}
    return GadgetProblem(column, protrusion_sites=frozenset(BoxRegion((0, 0, 0), (2, 2, 1)).cells()),
                         protrusion_budget=1)


def test_disk_store_round_trip(tmp_path):
    store = DiskWitnessStore(tmp_path)
    prob = _column_problem()
    sol = solve_gadget(prob, WitnessCache(store))
    key, _ = canonical_form(prob)
    assert store.path_for(key).exists()
    fresh = WitnessCache(DiskWitnessStore(tmp_path))
    assert solve_gadget(prob, fresh) == sol and fresh.misses == 0


def test_disk_store_stores_absence(tmp_path):
    store = DiskWitnessStore(tmp_path)
    prob = GadgetProblem(frozenset({(0, 0, 0), (1, 0, 0), (2, 0, 0)}))
    assert solve_gadget(prob, WitnessCache(store)) is None
    assert store.get(canonical_form(prob)[0]) is None


def test_corrupt_files_are_ignored(tmp_path):
    store = DiskWitnessStore(tmp_path)
    prob = _column_problem()
    solve_gadget(prob, WitnessCache(store))
    key, _ = canonical_form(prob)
    path = store.path_for(key)
    good = path.read_text()

    path.write_text(good[: len(good) // 2])
    assert store.get(key) is MISSING

    doc = json.loads(good)
    doc["solution"]["used"] = [[9, 9, 9]]
    path.write_text(json.dumps(doc))
    assert store.get(key) is MISSING

    # A forged checksum does not help a witness that does not tile.
    from tromino_cube.storage import _digest
    doc = json.loads(good)
    doc["solution"]["placements"][0] = doc["solution"]["placements"][1]
    doc["checksum"] = _digest({"key": doc["key"], "solution": doc["solution"]})
    path.write_text(json.dumps(doc))
    assert store.get(key) is MISSING
    assert store.rejected == 3

    # The cache falls back to searching and repairs the file.
    assert solve_gadget(prob, WitnessCache(store)) is not None


def test_cli_uses_cache_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    clear_caches()
    assert run(capsys, "solve", "--n", "4", "--deficiency", "2,1,0")[0] == EXIT_OK
    assert list(tmp_path.glob("*.json"))
    assert gadgets.DEFAULT_CACHE.store is None  # detached after the command

    other = tmp_path / "off"
    monkeypatch.setenv(CACHE_ENV, str(other))
    clear_caches()
    assert run(capsys, "--no-cache", "solve", "--n", "4", "--deficiency", "2,1,0")[0] == EXIT_OK
    assert not other.exists()
