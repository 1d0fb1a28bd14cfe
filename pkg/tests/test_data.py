import pytest
import torch

from data import (
    GLYPHS,
    MultiDomainDataset,
    SyntheticConfig,
    TrackedSamples,
    batches,
    build_catalog,
    build_protocol,
    corrupt,
    corrupt_images,
    export_image_folder,
    generate_synthetic,
    load_image_folder,
    read_catalog,
    sequential_batches,
    train_count,
    write_catalog,
)
from data.synthetic import glyph_mask
from models import BackboneConfig, ConfigurationError, DatasetError, NoiseSpec, TrainConfig, Variant
from trainer import fit
from utils import make_generator


class TestSynthetic:
    def test_counts_and_balance(self, tiny_dataset):
        assert tiny_dataset.domains == ("domain_0", "domain_1", "domain_2")
        assert tiny_dataset.classes == GLYPHS[:3]
        assert len(tiny_dataset) == 60
        for domain in tiny_dataset.domains:
            histogram = tiny_dataset.label_histogram(domain)
            assert sum(histogram.values()) == 20
            assert max(histogram.values()) - min(histogram.values()) <= 1

    def test_same_seed_same_pixels(self):
        config = SyntheticConfig(num_classes=2, num_domains=2, per_domain=10, image_size=8, seed=4)
        a, b = generate_synthetic(config), generate_synthetic(config)
        assert [s.sample_id for s in a.samples] == [s.sample_id for s in b.samples]
        assert all(torch.equal(x.image, y.image) for x, y in zip(a.samples, b.samples))

    def test_different_seed_different_pixels(self):
        a = generate_synthetic(SyntheticConfig(num_classes=2, num_domains=2, per_domain=10, image_size=8, seed=0))
        b = generate_synthetic(SyntheticConfig(num_classes=2, num_domains=2, per_domain=10, image_size=8, seed=1))
        assert not torch.equal(a.samples[0].image, b.samples[0].image)

    def test_values_in_unit_range(self, tiny_dataset):
        images = torch.stack([s.image for s in tiny_dataset.samples])
        assert images.min() >= 0.0 and images.max() <= 1.0

    def test_grayscale(self):
        dataset = generate_synthetic(SyntheticConfig(num_classes=2, num_domains=2, per_domain=10, image_size=8, in_channels=1))
        assert dataset.samples[0].image.shape == (1, 8, 8)

    def test_more_classes_than_base_glyphs(self):
        dataset = generate_synthetic(SyntheticConfig(num_classes=12, num_domains=2, per_domain=24, image_size=16))
        assert len(set(dataset.classes)) == 12
        assert dataset.classes[8:] == ("ring_nw", "square_nw", "triangle_nw", "cross_nw")
        assert all(dataset.label_histogram(d) == {c: 2 for c in range(12)} for d in dataset.domains)

    def test_corner_dot_sets_the_class_apart(self):
        coords = torch.arange(32, dtype=torch.float32) + 0.5 - 16
        dy, dx = torch.meshgrid(coords, coords, indexing="ij")
        plain = glyph_mask("ring", dy, dx, 10.0, 1.5, False)
        marked = glyph_mask("ring_se", dy, dx, 10.0, 1.5, False)
        assert torch.equal(marked & plain, plain)
        extra = marked & ~plain
        assert extra.any()
        rows, cols = extra.nonzero(as_tuple=True)
        assert (rows >= 16).all() and (cols >= 16).all()

    def test_unknown_corner(self):
        coords = torch.zeros(4, 4)
        with pytest.raises(ConfigurationError):
            glyph_mask("ring_up", coords, coords, 2.0, 1.0, False)

    @pytest.mark.slow
    def test_domains_carry_a_real_shift(self, regression_band):
        full = generate_synthetic(SyntheticConfig(num_classes=4, num_domains=3, per_domain=300, image_size=32, seed=0))
        kept = ("domain_0", "domain_2")
        pair = MultiDomainDataset(
            classes=full.classes,
            domains=kept,
            samples=tuple(s for s in full.samples if s.domain in kept),
            image_size=full.image_size,
            in_channels=full.in_channels,
        )
        # trains on 80% of domain_0; the other 20% is the validation set
        split = build_protocol(pair, "domain_2", split_seed=0)
        backbone = BackboneConfig(image_size=32, num_classes=4)
        result = fit(split, backbone, TrainConfig(variant=Variant.ERM, save_checkpoints=False), 0)
        assert result.best_val_acc > 0.9
        assert result.test_acc < result.best_val_acc - 0.05
        regression_band("shift_c4_m300/in_domain", result.best_val_acc)
        regression_band("shift_c4_m300/shifted", result.test_acc)

    @pytest.mark.parametrize(
        "changes",
        [{"num_domains": 1}, {"num_classes": 1}, {"num_classes": 41}, {"per_domain": 5}, {"in_channels": 2}],
    )
    def test_invalid_config(self, changes):
        with pytest.raises(ConfigurationError):
            SyntheticConfig(**changes).validate()


class TestImageFolder:
    def test_export_then_load(self, tiny_dataset, tmp_path):
        written = export_image_folder(tiny_dataset, tmp_path)
        assert len(written) == 60
        loaded = load_image_folder(tmp_path, 8, 3)
        assert loaded.domains == tiny_dataset.domains
        assert loaded.classes == tuple(sorted(tiny_dataset.classes))
        assert len(loaded) == len(tiny_dataset)
        by_id = {s.sample_id: s for s in tiny_dataset.samples}
        for sample in loaded.samples:
            original = by_id[sample.sample_id]
            assert loaded.classes[sample.label] == tiny_dataset.classes[original.label]
            assert (sample.image - original.image).abs().max() <= 0.5 / 255 + 1e-6

    def test_missing_directory(self, tmp_path):
        with pytest.raises(DatasetError):
            load_image_folder(tmp_path / "absent", 8)

    def test_single_domain_rejected(self, tiny_dataset, tmp_path):
        export_image_folder(tiny_dataset, tmp_path)
        with pytest.raises(DatasetError):
            load_image_folder(tmp_path / "domain_0", 8)

    def test_class_vocabulary_mismatch(self, tiny_dataset, tmp_path):
        export_image_folder(tiny_dataset, tmp_path)
        for path in (tmp_path / "domain_1" / "ring").iterdir():
            path.unlink()
        (tmp_path / "domain_1" / "ring").rmdir()
        with pytest.raises(DatasetError, match="domain_1 lacks ring"):
            load_image_folder(tmp_path, 8)

    def test_unreadable_image(self, tiny_dataset, tmp_path):
        export_image_folder(tiny_dataset, tmp_path)
        bad = tmp_path / "domain_0" / "ring" / "zz_bad.png"
        bad.write_bytes(b"not an image")
        with pytest.raises(DatasetError) as info:
            load_image_folder(tmp_path, 8)
        assert info.value.path == str(bad)


class TestCatalog:
    def test_write_then_read(self, tiny_dataset, tmp_path):
        config = SyntheticConfig(num_classes=3, num_domains=3, per_domain=20, image_size=8)
        written = export_image_folder(tiny_dataset, tmp_path)
        write_catalog(build_catalog(tiny_dataset, tmp_path, written, generator=config), tmp_path)
        catalog = read_catalog(tmp_path)
        assert catalog.counts == {"domain_0": 20, "domain_1": 20, "domain_2": 20}
        assert catalog.generator == config
        assert len(catalog.files) == 60
        assert len(catalog.fingerprint) == 64

    def test_absent_catalog(self, tmp_path):
        assert read_catalog(tmp_path) is None

    def test_fingerprint_tracks_content(self, tiny_dataset, tmp_path):
        written = export_image_folder(tiny_dataset, tmp_path)
        before = build_catalog(tiny_dataset, tmp_path, written).fingerprint
        written[0].write_bytes(written[1].read_bytes())
        assert build_catalog(tiny_dataset, tmp_path, written).fingerprint != before


class TestProtocol:
    @pytest.mark.parametrize("n,expected", [(5, 4), (10, 8), (13, 10), (20, 16), (99, 79)])
    def test_train_count_is_floor(self, n, expected):
        assert train_count(n) == expected

    def test_partition(self, tiny_dataset):
        split = build_protocol(tiny_dataset, "domain_1", split_seed=0)
        assert split.source_domains == ("domain_0", "domain_2")
        assert len(split.train) == 32 and len(split.unified_val) == 8 and len(split.test) == 20
        train_ids = {s.sample_id for s in split.train}
        val_ids = {s.sample_id for s in split.unified_val}
        assert not train_ids & val_ids
        assert all(s.domain != "domain_1" for s in split.train + split.unified_val)
        assert all(s.domain == "domain_1" for s in split.test._samples)

    def test_split_seed_is_deterministic(self, tiny_dataset):
        a = build_protocol(tiny_dataset, "domain_0", split_seed=3)
        b = build_protocol(tiny_dataset, "domain_0", split_seed=3)
        c = build_protocol(tiny_dataset, "domain_0", split_seed=4)
        assert [s.sample_id for s in a.train] == [s.sample_id for s in b.train]
        assert [s.sample_id for s in a.train] != [s.sample_id for s in c.train]

    def test_unknown_target(self, tiny_dataset):
        with pytest.raises(DatasetError):
            build_protocol(tiny_dataset, "domain_9", split_seed=0)

    def test_test_reads_are_tracked(self, tiny_dataset):
        split = build_protocol(tiny_dataset, "domain_2", split_seed=0)
        assert split.test.reads == []
        with split.test.reading("final"):
            list(split.test)
        _ = split.test[0]
        assert split.test.reads == ["final", "sealed"]
        assert split.test.reads_outside("final") == ["sealed"]

    def test_tracked_samples_behave_like_a_sequence(self, tiny_dataset):
        tracked = TrackedSamples(tiny_dataset.samples[:3])
        assert len(tracked) == 3
        assert tracked[1] is tiny_dataset.samples[1]


class TestBatching:
    def test_last_partial_batch_is_kept(self):
        dataset = generate_synthetic(SyntheticConfig(num_classes=2, num_domains=2, per_domain=50, image_size=8))
        sizes = [len(b) for b in batches(dataset.samples, 32, epoch_seed=0, num_classes=2)]
        assert sizes == [32, 32, 32, 4]

    def test_epoch_covers_every_sample_once(self, tiny_dataset):
        ids = [i for b in batches(tiny_dataset.samples, 7, epoch_seed=1, num_classes=3) for i in b.sample_ids]
        assert sorted(ids) == sorted(s.sample_id for s in tiny_dataset.samples)

    def test_order_depends_on_epoch_seed(self, tiny_dataset):
        first = next(batches(tiny_dataset.samples, 8, epoch_seed=0, num_classes=3)).sample_ids
        again = next(batches(tiny_dataset.samples, 8, epoch_seed=0, num_classes=3)).sample_ids
        other = next(batches(tiny_dataset.samples, 8, epoch_seed=1, num_classes=3)).sample_ids
        assert first == again
        assert first != other

    def test_onehot(self, tiny_dataset):
        batch = next(sequential_batches(tiny_dataset.samples, 5, 3))
        assert batch.onehot.shape == (5, 3)
        assert torch.equal(batch.onehot.argmax(-1), batch.labels)

    def test_bad_batch_size(self, tiny_dataset):
        with pytest.raises(ConfigurationError):
            next(batches(tiny_dataset.samples, 0, epoch_seed=0, num_classes=3))

    def test_empty_samples(self):
        with pytest.raises(DatasetError):
            next(batches([], 4, epoch_seed=0, num_classes=3))


class TestCorruption:
    def test_doubles_the_dataset_and_keeps_labels(self):
        dataset = generate_synthetic(SyntheticConfig(num_classes=2, num_domains=2, per_domain=100, image_size=8))
        noisy = corrupt(dataset, NoiseSpec("gaussian", 0.1))
        assert len(noisy) == 2 * len(dataset)
        assert noisy.domains == ("domain_0", "domain_1", "domain_0_gaussian", "domain_1_gaussian")
        for domain in dataset.domains:
            assert noisy.label_histogram(f"{domain}_gaussian") == dataset.label_histogram(domain)
            clean = dataset.domain_samples(domain)
            dirty = noisy.domain_samples(f"{domain}_gaussian")
            assert [s.label for s in clean] == [s.label for s in dirty]
        assert noisy.samples[: len(dataset)] == dataset.samples

    def test_single_clean_domain_becomes_a_pair(self, wafer_dataset):
        kinds = [NoiseSpec(kind) for kind in ("gaussian", "impulse", "speckle", "shot")]
        noisy = corrupt(wafer_dataset, kinds)
        assert noisy.domains == ("wafer", "wafer_noisy")
        assert len(noisy) == 400
        clean = noisy.domain_samples("wafer")
        dirty = noisy.domain_samples("wafer_noisy")
        assert len(clean) == len(dirty) == 200
        assert [s.label for s in clean] == [s.label for s in dirty]

    def test_zero_sigma_is_identity(self, tiny_dataset):
        noisy = corrupt(tiny_dataset, NoiseSpec("gaussian", 0.0))
        for clean, dirty in zip(tiny_dataset.domain_samples("domain_0"), noisy.domain_samples("domain_0_gaussian")):
            assert torch.equal(clean.image, dirty.image)

    @pytest.mark.parametrize("kind", ["gaussian", "impulse", "speckle", "shot"])
    def test_every_kind_stays_in_range(self, kind):
        images = torch.rand(4, 3, 8, 8, generator=torch.Generator().manual_seed(0))
        out = corrupt_images(images, NoiseSpec(kind), make_generator(1))
        assert out.shape == images.shape
        assert out.min() >= 0.0 and out.max() <= 1.0
        assert not torch.equal(out, images)

    def test_impulse_only_writes_extremes(self):
        images = torch.full((1, 32, 32), 0.5)
        out = corrupt_images(images, NoiseSpec("impulse", 0.5), make_generator(0))
        assert set(out.unique().tolist()) <= {0.0, 0.5, 1.0}

    def test_input_is_not_modified(self):
        images = torch.rand(2, 3, 8, 8)
        before = images.clone()
        corrupt_images(images, NoiseSpec("speckle", 0.5), make_generator(0))
        assert torch.equal(images, before)

    def test_mixed_kinds_use_noisy_suffix(self, tiny_dataset):
        noisy = corrupt(tiny_dataset, [NoiseSpec(k) for k in ("gaussian", "impulse", "speckle", "shot")], assign_seed=2)
        assert noisy.domains[3:] == ("domain_0_noisy", "domain_1_noisy", "domain_2_noisy")

    def test_corruption_is_deterministic(self, tiny_dataset):
        specs = [NoiseSpec("gaussian"), NoiseSpec("shot")]
        a = corrupt(tiny_dataset, specs, assign_seed=5)
        b = corrupt(tiny_dataset, specs, assign_seed=5)
        assert all(torch.equal(x.image, y.image) for x, y in zip(a.samples, b.samples))

    def test_name_clash(self, tiny_dataset):
        once = corrupt(tiny_dataset, NoiseSpec("gaussian"), domain_suffix="x")
        with pytest.raises(DatasetError):
            corrupt(once, NoiseSpec("gaussian"), domain_suffix="x")

    def test_no_specs(self, tiny_dataset):
        with pytest.raises(ConfigurationError):
            corrupt(tiny_dataset, [])

    @pytest.mark.parametrize("spec", [NoiseSpec("blur"), NoiseSpec("shot", 0.0), NoiseSpec("impulse", 1.5), NoiseSpec("gaussian", -1.0)])
    def test_invalid_specs(self, spec):
        with pytest.raises(ConfigurationError):
            spec.validate()
