import json

import pytest

from nrec.cli import main


def run(argv):
    return main(argv)


@pytest.fixture()
def eq3_file(tmp_path):
    path = tmp_path / "eq3.json"
    assert run(["build", "--m", "3", "--theta", "6", "--out", str(path)]) == 0
    return str(path)


def test_build_coef1_file_contents(tmp_path):
    path = tmp_path / "eq5.json"
    assert run(["build", "--m", "5", "--theta", "12", "--out", str(path)]) == 0
    doc = json.loads(open(path).read())
    assert doc["memory_k"] == 30
    assert doc["coeffs2"][10] == 4  # doubled from the half-scale value 2
    assert doc["provenance"]["command"] == "build"
    assert "digest" in doc


def test_build_no_primes_exit_code():
    assert run(["build", "--m", "1"]) == 2


def test_build_z_all_inhibitory(tmp_path):
    path = tmp_path / "z2.json"
    assert run(["build", "--m", "8", "--theta", "16", "--family", "Z",
                "--d", "2", "--out", str(path)]) == 0
    doc = json.loads(open(path).read())
    assert doc["memory_k"] == 144
    assert all(c <= 0 for c in doc["coeffs2"])


def test_simulate_canonical(tmp_path):
    eq = tmp_path / "eq5.json"
    out = tmp_path / "sim.json"
    run(["build", "--m", "5", "--theta", "12", "--out", str(eq)])
    assert run(["simulate", str(eq), "--init", "canonical:0", "--m", "5",
                "--theta", "12", "--out", str(out)]) == 0
    doc = json.loads(open(out).read())
    assert doc["period"] == 11 and doc["transient"] == 0


def test_simulate_zero_and_bad_window(eq3_file, tmp_path):
    out = tmp_path / "z.json"
    assert run(["simulate", eq3_file, "--init", "zero", "--out", str(out)]) == 0
    assert json.loads(open(out).read())["period"] == 1
    # wrong-length hex init
    assert run(["simulate", eq3_file, "--init", "hex:fffffffffffffff"]) == 2
    # step budget too small
    assert run(["simulate", eq3_file, "--init", "canonical:0", "--m", "3",
                "--theta", "6", "--max-steps", "3"]) == 3


def test_census_exact_files(eq3_file, tmp_path):
    out = tmp_path / "census"
    assert run(["census", eq3_file, "--mode", "exact", "--out", str(out)]) == 0
    doc = json.loads(open(str(out) + ".json").read())
    assert sum(int(c) for c in doc["chi"].values()) == 1 << 18
    assert set(doc["chi"]) == {"1", "7"}
    rows = open(str(out) + ".csv").read().strip().splitlines()
    assert rows[0] == "period,count"
    assert [r.split(",")[0] for r in rows[1:]] == ["1", "7"]


def test_census_sampled_deterministic(eq3_file, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run(["census", eq3_file, "--mode", "sampled", "--samples", "50",
                    "--seed", "9", "--out", str(out)]) == 0
    assert (a.with_suffix(".json").read_bytes()
            == b.with_suffix(".json").read_bytes())
    assert (a.with_suffix(".csv").read_bytes()
            == b.with_suffix(".csv").read_bytes())


def test_census_worker_count_invariance(eq3_file, tmp_path):
    outs = []
    for w in ("1", "4"):
        out = tmp_path / ("w%s" % w)
        assert run(["census", eq3_file, "--workers", w, "--out", str(out)]) == 0
        outs.append(out.with_suffix(".json").read_bytes())
    assert outs[0] == outs[1]


def test_census_memory_guard(tmp_path):
    eq = tmp_path / "big.json"
    run(["build", "--m", "6", "--theta", "12", "--out", str(eq)])  # k = 36
    assert run(["census", str(eq)]) == 3


def test_census_checkpoint_resume(eq3_file, tmp_path):
    ck = tmp_path / "c.ckpt"
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert run(["census", eq3_file, "--checkpoint", str(ck), "--out", str(out1)]) == 0
    # resume from the finished checkpoint: identical output
    assert run(["census", eq3_file, "--checkpoint", str(ck), "--out", str(out2)]) == 0
    assert out1.with_suffix(".json").read_bytes() == out2.with_suffix(".json").read_bytes()


def test_verify_support(tmp_path):
    out = tmp_path / "v.json"
    assert run(["verify", "--suite", "support", "--m", "3", "--theta", "6",
                "--out", str(out)]) == 0
    assert json.loads(open(out).read())["verdict"] == "PASS"


def test_verify_spike():
    assert run(["verify", "--suite", "spike", "--trials", "200"]) == 0


def test_verify_composition():
    assert run(["verify", "--suite", "composition", "--m", "5", "--theta", "12",
                "--cases", "10"]) == 0


def test_verify_classic():
    assert run(["verify", "--suite", "classic", "--kind", "palindromic",
                "--k", "8", "--trials", "50"]) == 0
    assert run(["verify", "--suite", "classic", "--kind", "geometric_pos",
                "--k", "8", "--trials", "20", "--b", "1/2"]) == 0
    # invalid shape parameter is a usage error
    assert run(["verify", "--suite", "classic", "--kind", "geometric_pos",
                "--k", "8", "--trials", "20", "--b", "2/3"]) == 2


def test_verify_containment_small():
    assert run(["verify", "--suite", "containment", "--m", "3", "--theta", "6",
                "--samples", "30", "--seed", "5"]) == 0


def test_sweep_guard_and_reruns(tmp_path):
    assert run(["sweep", "--m", "5", "--samples", "5"]) == 2
    a, b = tmp_path / "s1", tmp_path / "s2"
    for out in (a, b):
        assert run(["sweep", "--m", "8", "--theta", "16", "--samples", "10",
                    "--seed", "2", "--out", str(out)]) == 0
    assert a.with_suffix(".json").read_bytes() == b.with_suffix(".json").read_bytes()
    assert a.with_suffix(".csv").read_bytes() == b.with_suffix(".csv").read_bytes()
    rows = a.with_suffix(".csv").read_text().strip().splitlines()
    assert rows[0].startswith("d,")
    assert len(rows) == 4  # header + one row per d
