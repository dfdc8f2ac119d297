import numpy as np
import pytest

from src import config
from src.core.errors import EventFileError, ShapeMismatchError, SynthSpecError
from src.core.types import SpikeDataset, SpikeTrain
from src.data import (
    SynthSpec,
    bin_events,
    event_file_size,
    generate,
    prototypes,
    read_events,
    write_events,
    write_spike_trains,
)
from src.data.events import EVENT_BITS, EVENT_DTYPE, HEADER, SAMPLE_HEADER

SPEC = SynthSpec(train_samples=160, test_samples=200)


def header(version=None, channels=3, steps=4, samples=1, classes=2):
    return HEADER.pack(config.EVENT_FILE_VERSION if version is None else version, channels, steps, samples, classes)


def events(*pairs):
    out = np.array(list(pairs), dtype=EVENT_DTYPE)
    return out.tobytes()


def template_accuracy(spec):
    """Nearest-prototype accuracy on noise-free test samples, aligned by the median offset."""
    channels, lags = prototypes(spec)
    dataset = generate(spec, "test")
    times = dataset.inputs[:, :, channels].argmax(axis=1)
    offsets = times[:, None, :] - lags[None]
    distance = np.abs(offsets - np.median(offsets, axis=-1, keepdims=True)).sum(-1)
    return float(np.mean(distance.argmin(axis=1) == dataset.labels))


class TestSynthetic:
    def test_generation_is_deterministic(self):
        a, b = generate(SPEC, "train"), generate(SPEC, "train")
        np.testing.assert_array_equal(a.inputs, b.inputs)
        np.testing.assert_array_equal(a.labels, b.labels)

    def test_splits_differ(self):
        train, test = generate(SPEC, "train"), generate(SPEC, "test")
        assert len(train) == 160 and len(test) == 200
        assert not np.array_equal(train.inputs[:10], test.inputs[:10])

    def test_classes_are_balanced(self):
        counts = np.bincount(generate(SPEC, "test").labels, minlength=SPEC.classes)
        assert counts.min() == counts.max() == 25

    def test_prototypes_are_distinct(self):
        channels, lags = prototypes(SPEC)
        assert channels.shape == (SPEC.spikes_per_pattern,)
        assert len({tuple(row) for row in lags}) == SPEC.classes
        assert lags.min() == 0 and lags.max() <= SPEC.max_lag

    def test_clean_samples_match_their_template(self):
        spec = SynthSpec(jitter=0, noise_rate=0.0, test_samples=80)
        channels, lags = prototypes(spec)
        dataset = generate(spec, "test")
        for train, label in (dataset[i] for i in range(len(dataset))):
            times = train.data[:, channels].argmax(axis=0)
            matches = [np.array_equal(times - times.min(), row) for row in lags]
            assert matches.index(True) == label

    def test_spike_counts_carry_no_label(self):
        spec = SynthSpec(train_samples=400, test_samples=1000)
        train, test = generate(spec, "train"), generate(spec, "test")
        counts = train.inputs.sum(axis=1).astype(np.float64)
        centroids = np.stack([counts[train.labels == c].mean(axis=0) for c in range(spec.classes)])
        test_counts = test.inputs.sum(axis=1).astype(np.float64)
        predicted = ((test_counts[:, None, :] - centroids[None]) ** 2).sum(-1).argmin(axis=1)
        assert abs(np.mean(predicted == test.labels) - 1.0 / spec.classes) <= 0.05

    def test_jitter_degrades_template_matching(self):
        accuracies = [
            np.mean([template_accuracy(SynthSpec(jitter=jitter, noise_rate=0.0, seed=seed)) for seed in range(5)])
            for jitter in (0, 2, 4, 8)
        ]
        assert accuracies[0] == 1.0
        assert all(a >= b for a, b in zip(accuracies, accuracies[1:]))
        assert accuracies[-1] < accuracies[0]

    @pytest.mark.parametrize("changes", [
        {"max_lag": 60},
        {"spikes_per_pattern": 25},
        {"noise_rate": 1.5},
        {"classes": 0},
    ])
    def test_invalid_spec(self, changes):
        with pytest.raises(SynthSpecError):
            prototypes(SynthSpec(**changes))

    def test_too_many_classes_for_lag_range(self):
        with pytest.raises(SynthSpecError, match="distinct"):
            prototypes(SynthSpec(classes=5, spikes_per_pattern=2, max_lag=1))

    def test_unknown_split(self):
        with pytest.raises(SynthSpecError):
            generate(SPEC, "validation")


class TestEventFiles:
    def test_round_trip_with_empty_sample(self, tmp_path):
        inputs = np.zeros((3, 7, 4), dtype=np.uint8)
        inputs[0, 2, 1] = inputs[0, 6, 3] = inputs[2, 0, 0] = 1
        dataset = SpikeDataset(inputs, [1, 0, 2], 3)
        path = str(tmp_path / "data.evt")
        size = write_events(path, dataset)
        assert size == event_file_size(dataset) == HEADER.size + 3 * SAMPLE_HEADER.size + 3 * EVENT_DTYPE.itemsize
        loaded = read_events(path)
        np.testing.assert_array_equal(loaded.inputs, inputs)
        np.testing.assert_array_equal(loaded.labels, [1, 0, 2])
        assert loaded.num_classes == 3

    @pytest.mark.parametrize("steps,smaller", [(4801, True), (4800, False), (4799, False)])
    def test_sparse_file_beats_bitmap_below_one_event_per_event_width(self, steps, smaller):
        channels, count = 100, 10**4
        inputs = np.zeros((1, steps, channels), dtype=np.uint8)
        inputs.reshape(-1)[:count] = 1
        dataset = SpikeDataset(inputs, [0], 1)
        event_bits = (event_file_size(dataset) - HEADER.size - SAMPLE_HEADER.size) * 8
        assert event_bits == count * EVENT_BITS == count * 48
        assert (event_bits < steps * channels) is smaller
        assert (count / (steps * channels) < 1 / EVENT_BITS) is smaller

    def test_generated_round_trip(self, tmp_path):
        dataset = generate(SynthSpec(train_samples=20))
        path = str(tmp_path / "train.evt")
        write_events(path, dataset)
        np.testing.assert_array_equal(read_events(path).inputs, dataset.inputs)

    def test_spike_trains(self, tmp_path, random_train):
        path = str(tmp_path / "spikes.evt")
        trains = [random_train(5, 3, seed=s) for s in range(4)]
        write_spike_trains(path, trains, labels=[0, 1, 1, 0], num_classes=2)
        loaded = read_events(path)
        assert loaded[2][0] == trains[2]
        assert loaded[2][1] == 1

    @pytest.mark.parametrize("payload,offset", [
        (b"\x01\x00", 2),
        (header(version=9) + SAMPLE_HEADER.pack(0, 0), 0),
        (header(channels=0) + SAMPLE_HEADER.pack(0, 0), 1),
        (header(), 7),
        (header(channels=0xFFFF, steps=0xFFFFFFFF, samples=0xFFFFFFFF), 7),
        (header(channels=0xFFFF, steps=0xFFFFFFFF) + SAMPLE_HEADER.pack(0, 0), 1),
        (header() + SAMPLE_HEADER.pack(5, 0), 13),
        (header() + SAMPLE_HEADER.pack(0, 2) + events((0, 1)), 19),
        (header() + SAMPLE_HEADER.pack(0, 1) + events((4, 0)), 19),
        (header() + SAMPLE_HEADER.pack(0, 1) + events((0, 3)), 19),
        (header() + SAMPLE_HEADER.pack(0, 2) + events((1, 0), (0, 2)), 25),
        (header() + SAMPLE_HEADER.pack(0, 2) + events((1, 0), (1, 0)), 25),
        (header() + SAMPLE_HEADER.pack(0, 0) + b"\x00", 19),
    ])
    def test_malformed_files_report_offset(self, tmp_path, payload, offset):
        path = tmp_path / "bad.evt"
        path.write_bytes(payload)
        with pytest.raises(EventFileError) as info:
            read_events(str(path))
        assert info.value.offset == offset
        assert f"byte offset {offset}" in str(info.value)


class TestBinning:
    def test_identity_at_unit_width(self, random_train):
        train = random_train(30, 5, seed=9)
        steps, channels = train.to_events()
        assert bin_events(steps, channels, 1, 1, 5, num_steps=30) == train

    def test_or_merge(self):
        train = bin_events([0, 1, 3, 9], [0, 1, 2, 3], 2, 2, 4)
        expected = np.zeros((5, 2), dtype=np.uint8)
        expected[0, 0] = 1  # two events merged
        expected[1, 1] = 1
        expected[4, 1] = 1
        assert train == SpikeTrain(expected)

    def test_channel_reduction(self):
        rng = np.random.default_rng(0)
        channels = rng.integers(0, 700, size=5000)
        times = rng.integers(0, 1000, size=5000)
        train = bin_events(times, channels, 10, 5, 700, num_steps=100)
        assert (train.steps, train.channels) == (100, 140)
        assert train.data[times // 10, channels // 5].all()

    def test_events_past_horizon_are_dropped(self):
        train = bin_events([0, 50], [0, 0], 10, 1, 1, num_steps=3)
        assert train.num_spikes == 1

    def test_indivisible_grouping(self):
        with pytest.raises(ShapeMismatchError):
            bin_events([0], [0], 1, 3, 700)

    def test_bad_width(self):
        with pytest.raises(ValueError):
            bin_events([0], [0], 0, 1, 1)
