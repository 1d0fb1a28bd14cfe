import json

import pytest

from cli import main
from config import EXIT_DATA, EXIT_FAILURE, EXIT_OK, EXIT_USAGE
from data import build_catalog, export_image_folder, load_image_folder, read_catalog, write_catalog
from trainer import read_result

TINY_MODEL = [
    "--patch-size", "4",
    "--embed-dim", "8",
    "--depth", "2",
    "--heads", "2",
    "--mlp-ratio", "2",
    "--batch-size", "8",
    "--max-steps", "2",
    "--seeds", "0",
]


@pytest.fixture
def synth_dir(tmp_path, output_root):
    out = tmp_path / "synth"
    code = main([
        "synth", "--classes", "3", "--domains", "2", "--per-domain", "10",
        "--image-size", "8", "--seed", "1", "--out", str(out),
    ])
    assert code == EXIT_OK
    return out


def test_synth_writes_images_and_catalog(synth_dir):
    catalog = read_catalog(synth_dir)
    assert catalog.counts == {"domain_0": 10, "domain_1": 10}
    assert catalog.generator.seed == 1
    assert len(list(synth_dir.rglob("*.png"))) == 20


def test_synth_rerun_reproduces_every_file(synth_dir, tmp_path):
    again = tmp_path / "again"
    main([
        "synth", "--classes", "3", "--domains", "2", "--per-domain", "10",
        "--image-size", "8", "--seed", "1", "--out", str(again),
    ])
    first, second = read_catalog(synth_dir), read_catalog(again)
    assert first.files == second.files
    assert len(first.files) == 20


def test_synth_rejects_a_single_domain(tmp_path):
    assert main(["synth", "--domains", "1", "--out", str(tmp_path / "x")]) == EXIT_USAGE


def test_corrupt_appends_noisy_domains(synth_dir, tmp_path):
    out = tmp_path / "noisy"
    assert main(["corrupt", "--source", str(synth_dir), "--out", str(out), "--kinds", "gaussian,shot"]) == EXIT_OK
    catalog = read_catalog(out)
    assert catalog.domains == ["domain_0", "domain_1", "domain_0_noisy", "domain_1_noisy"]
    assert [s.kind for s in catalog.noise_specs] == ["gaussian", "shot"]
    assert catalog.source == str(synth_dir)


def test_corrupt_pairs_a_single_clean_domain(wafer_dataset, tmp_path, output_root):
    source = tmp_path / "wafer"
    write_catalog(build_catalog(wafer_dataset, source, export_image_folder(wafer_dataset, source)), source)
    out = tmp_path / "wafer_pair"
    assert main(["corrupt", "--source", str(source), "--out", str(out)]) == EXIT_OK

    catalog = read_catalog(out)
    assert catalog.domains == ["wafer", "wafer_noisy"]
    assert catalog.counts == {"wafer": 200, "wafer_noisy": 200}
    pair = load_image_folder(out, image_size=8, in_channels=3)
    labels = [s.label for s in pair.domain_samples("wafer")]
    assert [s.label for s in pair.domain_samples("wafer_noisy")] == labels
    assert sorted(labels) == sorted(s.label for s in wafer_dataset.samples)


def test_corrupt_missing_source(tmp_path):
    assert main(["corrupt", "--source", str(tmp_path / "absent"), "--out", str(tmp_path / "o")]) == EXIT_DATA


def test_corrupt_unknown_kind(synth_dir, tmp_path):
    assert main(["corrupt", "--source", str(synth_dir), "--out", str(tmp_path / "o"), "--kinds", "blur"]) == EXIT_USAGE


def test_unknown_variant(synth_dir, tmp_path):
    code = main(["train", "--data", str(synth_dir), "--variant", "BOGUS", "--out", str(tmp_path / "r")])
    assert code == EXIT_USAGE
    assert not (tmp_path / "r").exists()


def test_train_requires_data():
    assert main(["train"]) == EXIT_USAGE


def test_unknown_command():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == EXIT_USAGE


def test_train_report_and_rerun(synth_dir, tmp_path, output_root, capsys):
    run = tmp_path / "run"
    assert main(["train", "--data", str(synth_dir), "--variant", "rrld", "--out", str(run), *TINY_MODEL]) == EXIT_OK
    for name in ("manifest.json", "result.json", "train.log"):
        assert (run / name).is_file()
    result = read_result(run)
    assert result.domains == ["domain_0", "domain_1"]
    assert result.variant.value == "RRLD"

    capsys.readouterr()
    assert main(["report", str(run)]) == EXIT_OK
    assert "RRLD" in capsys.readouterr().out
    report = json.loads((output_root / "report.json").read_text(encoding="utf-8"))
    assert report["columns"] == ["domain_0", "domain_1", "Average"]

    assert main(["report", "--registry", "--json", str(tmp_path / "r.json")]) == EXIT_OK
    assert json.loads((tmp_path / "r.json").read_text(encoding="utf-8"))["rows"][0]["variant"] == "RRLD"

    rerun = tmp_path / "rerun"
    assert main(["train", "--manifest", str(run / "manifest.json"), "--out", str(rerun), "--no-registry"]) == EXIT_OK
    for metrics in sorted((run / "metrics").glob("*.jsonl")):
        assert (rerun / "metrics" / metrics.name).read_bytes() == metrics.read_bytes()
    assert read_result(rerun).average == result.average


def test_eval_checkpoint(synth_dir, tmp_path):
    run = tmp_path / "run"
    args = ["train", "--data", str(synth_dir), "--variant", "ERM", "--out", str(run), "--no-registry", "--targets", "domain_1"]
    assert main(args + TINY_MODEL) == EXIT_OK
    checkpoint = read_result(run).targets[0].seeds[0].best_checkpoint
    out = tmp_path / "eval.json"
    assert main(["eval", "--checkpoint", checkpoint, "--data", str(synth_dir), "--json", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert set(payload["accuracy"]) == {"domain_0", "domain_1"}
    assert all(0.0 <= v <= 1.0 for v in payload["accuracy"].values())


def test_report_without_runs():
    assert main(["report"]) == EXIT_USAGE


@pytest.mark.slow
def test_selftest_passes_and_catches_a_broken_stopgrad(output_root):
    assert main(["selftest"]) == EXIT_OK
    assert main(["selftest", "--break", "stopgrad"]) == EXIT_FAILURE
