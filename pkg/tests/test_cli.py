import csv
import json
import subprocess
import sys

import pytest

from qsentiment import kernels
from qsentiment.cli import main


@pytest.fixture(autouse=True)
def restore_backend():
    previous = kernels.BACKEND
    yield
    kernels.use_backend(previous)


def write_config(tmp_path, body=""):
    path = tmp_path / "cfg.toml"
    path.write_text(body, encoding="utf-8")
    return str(path)


def test_preprocess_writes_vectors_and_vocabulary(tmp_path, capsys):
    out = tmp_path / "vec.csv"
    assert main(["preprocess", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open(encoding="utf-8")))
    vocab = list(csv.reader((tmp_path / "vec.vocab.csv").open(encoding="utf-8")))
    assert rows[0][:2] == ["split", "label"]
    assert rows[0][2:] == [t for t, _ in vocab[1:]]
    assert len(rows) == 65
    assert {r[0] for r in rows[1:]} == {"train", "test"}


def test_train_then_evaluate(tmp_path):
    model = tmp_path / "model.json"
    metrics = tmp_path / "m.json"
    assert main(["train", "-o", str(model), "--metrics", str(metrics)]) == 0
    assert json.loads(model.read_text())["format"] == "qsentiment-model/1"
    trained = json.loads(metrics.read_text())[0]
    scored = tmp_path / "eval.json"
    assert main(["evaluate", "--model", str(model), "-o", str(scored)]) == 0
    evaluated = json.loads(scored.read_text())[0]
    assert evaluated["test"] == trained["test"]


def test_sweep_and_report(tmp_path):
    cfg = write_config(tmp_path, '[sweep]\nmethods = ["classical_svm", "qkernel_svm"]\nhaar_levels = [0, 1]\n')
    table = tmp_path / "sweep.csv"
    full = tmp_path / "sweep.json"
    assert main(["--backend", "numpy", "sweep", "-c", cfg, "-o", str(table), "--json", str(full)]) == 0
    assert len(table.read_text().splitlines()) == 5
    merged = tmp_path / "merged.csv"
    assert main(["report", str(full), str(full), "-o", str(merged)]) == 0
    assert len(merged.read_text().splitlines()) == 9


def test_seed_override_changes_split(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["preprocess", "-o", str(a), "--seed", "1"])
    main(["preprocess", "-o", str(b), "--seed", "2"])
    assert a.read_text() != b.read_text()


def test_usage_error_exits_one(capsys):
    with pytest.raises(SystemExit) as info:
        main(["train", "--bogus"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 1


def test_config_error_exits_one(tmp_path, capsys):
    assert main(["train", "-c", write_config(tmp_path, "[classifier]\nmethod = 'knn'\n")]) == 1
    assert "classifier.method" in capsys.readouterr().err
    assert main(["train", "-c", str(tmp_path / "missing.toml")]) == 1


def test_data_error_exits_two(tmp_path, capsys):
    bad = tmp_path / "d.csv"
    bad.write_text("body,class\nx,y\n", encoding="utf-8")
    cfg = write_config(tmp_path, f'[dataset]\npath = "{bad.name}"\n')
    assert main(["train", "-c", cfg, "-o", str(tmp_path / "m.json")]) == 2
    err = capsys.readouterr().err
    assert "stage 'load'" in err and "line 1" in err
    assert main(["report", str(tmp_path / "nope.json"), "-o", str(tmp_path / "r.csv")]) == 2


def test_non_convergence_exits_three(tmp_path, capsys):
    cfg = write_config(tmp_path, "[svm]\nC = 1000.0\ntol = 1e-12\nmax_passes = 1\n[reduction]\npca_k = 6\n")
    model = tmp_path / "m.json"
    assert main(["train", "-c", cfg, "-o", str(model)]) == 3
    assert model.exists()
    assert "did not converge" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "qsentiment", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "sweep" in out.stdout
