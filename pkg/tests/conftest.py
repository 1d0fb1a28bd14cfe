import json
import os
from dataclasses import replace
from pathlib import Path

import pytest

import db
from data import MultiDomainDataset, SyntheticConfig, generate_synthetic
from models import BackboneConfig, TrainConfig, Variant


def pytest_collection_modifyitems(config, items):
    if os.getenv("RRLD_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="desk-scale run; set RRLD_RUN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def tiny_backbone():
    return BackboneConfig(
        image_size=8,
        in_channels=3,
        patch_size=4,
        embed_dim=8,
        depth=3,
        heads=2,
        mlp_ratio=2.0,
        num_classes=3,
        seed=0,
    )


@pytest.fixture
def tiny_dataset():
    return generate_synthetic(
        SyntheticConfig(num_classes=3, num_domains=3, per_domain=20, image_size=8, seed=0)
    )



@pytest.fixture
def wafer_dataset():
    """One clean domain of 200 images, the starting point of a clean-to-noisy pair."""
    source = generate_synthetic(
        SyntheticConfig(num_classes=2, num_domains=2, per_domain=200, image_size=8, seed=3)
    )
    samples = tuple(replace(s, domain="wafer") for s in source.domain_samples("domain_0"))
    return MultiDomainDataset(
        classes=source.classes,
        domains=("wafer",),
        samples=samples,
        image_size=source.image_size,
        in_channels=source.in_channels,
    )

@pytest.fixture
def tiny_train_config():
    return TrainConfig(
        variant=Variant.RRLD,
        batch_size=8,
        max_steps=4,
        eval_every=2,
        seeds=[0],
        learning_rate=1e-3,
    )


@pytest.fixture
def output_root(tmp_path, monkeypatch):
    """Isolated output root and SQLite registry."""
    root = tmp_path / "runs"
    monkeypatch.setenv("RRLD_OUTPUT_ROOT", str(root))
    monkeypatch.setenv("RRLD_DATABASE_URL", f"sqlite:///{tmp_path / 'registry.db'}")
    db.reset_engine()
    yield root
    db.reset_engine()


BASELINES = Path(__file__).with_name("baselines.json")
REGRESSION_BAND = 0.02


@pytest.fixture(scope="session")
def regression_band():
    """
    Check a measured accuracy against tests/baselines.json within two points.

    A key missing from the file is recorded from this run instead of checked;
    commit the updated file to pin it.
    """
    pinned = json.loads(BASELINES.read_text(encoding="utf-8")) if BASELINES.exists() else {}
    recorded = {}

    def check(key: str, value: float) -> None:
        if key in pinned:
            assert value == pytest.approx(pinned[key], abs=REGRESSION_BAND), key
        else:
            recorded[key] = round(value, 4)

    yield check
    if recorded:
        BASELINES.write_text(json.dumps({**pinned, **recorded}, indent=2, sort_keys=True) + "\n", encoding="utf-8")
