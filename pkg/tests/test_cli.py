"""Command line: exit codes, reports and tables."""
import json

import pytest

from submeasure_lab import const
from submeasure_lab.__main__ import main
from submeasure_lab.cli.models import ReportEnvelope


def _write(path, payload) -> str:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def _report(directory, name):
    data = json.loads((directory / f"{name}.json").read_text(encoding="utf-8"))
    assert ReportEnvelope.model_validate(data).model_dump(mode="json") == data
    return data


@pytest.fixture
def pairs_family(tmp_path):
    return _write(tmp_path / "pairs.json", {"n_atoms": 3, "family": [[0, 1], [1, 2], [0, 2]]})


@pytest.fixture
def half_measure(tmp_path):
    return _write(
        tmp_path / "half.json",
        {"submeasure": {"kind": "measure", "atoms": ["1/2"] * 6}, "xi_grid": ["3/2", "3/4"]},
    )


@pytest.fixture
def small_cube(tmp_path):
    return _write(
        tmp_path / "cube.json", {"alphabet_sizes": [2, 2, 2, 2], "trials": 1000, "r_grid": [0.1, 0.2]}
    )


def test_covnum_report(tmp_path, pairs_family):
    out = tmp_path / "out"
    assert main(["covnum", "--input", pairs_family, "--out", str(out)]) == const.EXIT_OK
    data = _report(out, "covnum_pairs")
    envelope = ReportEnvelope.model_validate(data)
    assert envelope.command == "covnum"
    assert envelope.version == const.VERSION
    assert envelope.generator == const.RNG_NAME
    assert envelope.result["value"] == "2/3"
    assert envelope.result["verified"]


def test_hphi_table(tmp_path, half_measure):
    out = tmp_path / "out"
    args = ["hphi", "--input", half_measure, "--out", str(out), "--format", "csv"]
    assert main(args) == const.EXIT_OK
    lines = (out / "hphi_half.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "xi,h,xi_h,family_size,lower_bound"
    assert len(lines) == 3
    rows = _report(out, "hphi_half")["result"]["rows"]
    assert [row["h"] for row in rows] == ["1/3", "2/9"]


def test_xi_grid_flag_overrides_document(tmp_path, half_measure):
    out = tmp_path / "out"
    args = ["hphi", "--input", half_measure, "--out", str(out), "--xi-grid", "3/8", "--name", "tiny"]
    assert main(args) == const.EXIT_OK
    rows = _report(out, "hphi_tiny")["result"]["rows"]
    assert [row["h"] for row in rows] == ["0/1"]


def test_concentrate_is_reproducible(tmp_path, small_cube):
    tables = []
    for run in ("first", "second"):
        out = tmp_path / run
        args = ["concentrate", "--input", small_cube, "--out", str(out), "--format", "csv", "--seed", "11"]
        assert main(args) == const.EXIT_OK
        tables.append((out / "concentrate_cube.csv").read_text(encoding="utf-8"))
    assert tables[0] == tables[1]
    assert tables[0].startswith("r,empirical,ci_lo,ci_hi,bound\n")
    assert _report(tmp_path / "first", "concentrate_cube")["seed"] == 11


def test_concentrate_with_epsilons(tmp_path, small_cube):
    out = tmp_path / "out"
    assert main(["concentrate", "--input", small_cube, "--out", str(out), "--epsilon", "1/2"]) == 0
    result = _report(out, "concentrate_cube")["result"]
    assert result["alpha"][0]["alpha"] == "1/8"
    assert all(row["holds"] for row in result["concentration_check"])


def test_example_commands(tmp_path):
    out = tmp_path / "out"
    assert main(["example-easy", "--out", str(out)]) == const.EXIT_OK
    easy = _report(out, "example_easy_default")["result"]
    assert easy["n_atoms"] == 4
    assert easy["domination"]["mode"] == "exhaustive"
    assert easy["domination"]["violation_count"] == 0
    assert main(["example-pathological", "--out", str(out)]) == const.EXIT_OK
    trees = _report(out, "example_pathological_default")["result"]["trees"]
    assert all(tree["passed"] for tree in trees)


def test_malformed_json(tmp_path, caplog):
    broken = tmp_path / "broken.json"
    broken.write_text('{"n_atoms": 3, "family": [[0, 1]', encoding="utf-8")
    assert main(["covnum", "--input", str(broken), "--out", str(tmp_path)]) == const.EXIT_VALIDATION
    assert "Malformed JSON" in caplog.text
    assert "line 1 column 33" in caplog.text
    assert not (tmp_path / "covnum_broken.json").exists()


def test_undecodable_input(tmp_path, caplog):
    latin = tmp_path / "latin.json"
    latin.write_bytes(b'{"x": "caf\xe9"}')
    assert main(["covnum", "--input", str(latin), "--out", str(tmp_path)]) == const.EXIT_VALIDATION
    assert "not valid UTF-8" in caplog.text


def test_validation_errors(tmp_path):
    out = str(tmp_path / "out")
    assert main(["covnum", "--out", out]) == const.EXIT_VALIDATION
    assert main(["covnum", "--input", str(tmp_path / "missing.json"), "--out", out]) == 2
    bad = _write(tmp_path / "bad.json", {"n_atoms": 0, "family": [[0]]})
    assert main(["covnum", "--input", bad, "--out", out]) == const.EXIT_VALIDATION
    assert main(["example-easy", "--seed", "-1", "--out", out]) == const.EXIT_VALIDATION
    assert main(["no-such-command"]) == const.EXIT_VALIDATION


def test_limit_exceeded(tmp_path, pairs_family):
    out = str(tmp_path / "out")
    args = ["covnum", "--input", pairs_family, "--out", out, "--max-atoms", "2"]
    assert main(args) == const.EXIT_LIMIT
    big = _write(tmp_path / "big.json", {"alphabet_sizes": [2, 2], "trials": 2_000_000})
    assert main(["concentrate", "--input", big, "--out", out]) == const.EXIT_LIMIT


def test_output_directory_from_environment(tmp_path, monkeypatch, pairs_family):
    target = tmp_path / "from_env"
    monkeypatch.setenv(const.OUTPUT_ENV_VAR, str(target))
    assert main(["covnum", "--input", pairs_family]) == const.EXIT_OK
    assert (target / "covnum_pairs.json").is_file()


def test_dist_with_cover_and_blocks(tmp_path):
    out = tmp_path / "out"
    cover_doc = _write(
        tmp_path / "cover.json",
        {
            "pairs": [[[0, 0, 0], [1, 0, 1]]],
            "n_coords": 3,
            "cover": [[0, 1], [1, 2], [0], [2]],
            "weights": [1, 1, "1/4", "1/4"],
        },
    )
    assert main(["dist", "--input", cover_doc, "--out", str(out)]) == const.EXIT_OK
    (pair,) = _report(out, "dist_cover")["result"]["pairs"]
    assert (pair["distance"], pair["hamming"]) == ("1/2", "2/3")
    blocks_doc = _write(
        tmp_path / "blocks.json",
        {
            "pairs": [[[0, 0], [0, 1]]],
            "submeasure": {"kind": "measure", "atoms": ["1/4"] * 4},
            "partition": [[0], [1, 2, 3]],
        },
    )
    assert main(["dist", "--input", blocks_doc, "--out", str(out)]) == const.EXIT_OK
    result = _report(out, "dist_blocks")["result"]
    assert result["metric"] == "blocks"
    assert result["pairs"][0]["distance"] == "3/4"
    lonely = _write(tmp_path / "lonely.json", {"pairs": [[[0], [1]]]})
    assert main(["dist", "--input", lonely, "--out", str(out)]) == const.EXIT_VALIDATION


def test_classify_and_pathology(tmp_path):
    out = tmp_path / "out"
    measure = _write(
        tmp_path / "eighths.json", {"submeasure": {"kind": "measure", "atoms": ["1/8"] * 8}}
    )
    assert main(["classify", "--input", measure, "--out", str(out)]) == const.EXIT_OK
    report = _report(out, "classify_eighths")
    assert report["result"]["verdict"] == "parabolic-consistent"
    assert main(["pathology", "--input", measure, "--out", str(out)]) == const.EXIT_OK
    result = _report(out, "pathology_eighths")["result"]
    assert result["pathology_index"]["mass"] == "1/1"
    assert result["audit"]["passed"]


def test_entropy_check(tmp_path):
    out = tmp_path / "out"
    doc = _write(
        tmp_path / "small.json",
        {
            "n_coords": 2,
            "instances": 5,
            "points": 4,
            "ledoux_instances": 50,
            "herbst": [
                {
                    "values": [0, 1],
                    "probabilities": [0.5, 0.5],
                    "variance_bound": 0.25,
                    "lambda_grid": [1.0],
                    "r_grid": [0.25],
                }
            ],
        },
    )
    assert main(["entropy-check", "--input", doc, "--out", str(out), "--seed", "3"]) == 0
    report = _report(out, "entropy_check_small")
    assert report["warnings"] == []
    assert report["result"]["shearer"]["violations"] == 0
    assert report["result"]["herbst"][0]["failures"] == 0


def test_probe(tmp_path):
    out = tmp_path / "out"
    doc = _write(
        tmp_path / "chain.json",
        {
            "submeasure": {"kind": "measure", "atoms": ["1/4"] * 4},
            "chain": [[[0, 1], [2, 3]], [[0], [1], [2], [3]]],
            "epsilons": ["1/2"],
        },
    )
    assert main(["probe", "--input", doc, "--out", str(out)]) == const.EXIT_OK
    report = _report(out, "probe_chain")
    assert [row["alpha"] for row in report["result"]["rows"]] == [0.5, 0.125]
    assert report["result"]["note"] in report["warnings"]
    broken = _write(
        tmp_path / "coarsening.json",
        {
            "submeasure": {"kind": "measure", "atoms": ["1/4"] * 4},
            "chain": [[[0], [1], [2], [3]], [[0, 1], [2, 3]]],
            "epsilons": ["1/2"],
        },
    )
    assert main(["probe", "--input", broken, "--out", str(out)]) == const.EXIT_VALIDATION


def test_pathology_records_seed(tmp_path):
    out = tmp_path / "out"
    measure = _write(tmp_path / "thirds.json", {"submeasure": {"kind": "measure", "atoms": ["1/3"] * 3}})
    assert main(["pathology", "--input", measure, "--out", str(out), "--seed", "42"]) == 0
    assert _report(out, "pathology_thirds")["seed"] == 42


def test_limit_flags(tmp_path, small_cube):
    out = str(tmp_path / "out")
    measure = _write(tmp_path / "eighths.json", {"submeasure": {"kind": "measure", "atoms": ["1/8"] * 8}})
    assert main(["pathology", "--input", measure, "--out", out, "--sweep-limit", "4"]) == const.EXIT_LIMIT
    assert main(["concentrate", "--input", small_cube, "--out", out, "--trial-cap", "500"]) == const.EXIT_LIMIT
    assert main(["concentrate", "--input", small_cube, "--out", out, "--trial-cap", "50"]) == 2
    assert main(["pathology", "--input", measure, "--out", out, "--sweep-limit", "17"]) == 2
