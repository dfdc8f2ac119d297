import numpy as np
import pytest

from src.core.errors import ConfigError, DelaySNNError, NonBinarySpikeError, ShapeMismatchError
from src.core.rng import seeded_rng
from src.core.schema import (
    RunConfig,
    align_to_dataset,
    load_config,
    parse_config,
    serialize_config,
    validate_config,
    validate_run_config,
)
from src.core.types import ModelConfig, RegConfig, SpikeDataset, SpikeTrain, TrainConfig


class TestSpikeTrain:
    def test_rejects_non_binary_entries(self):
        with pytest.raises(NonBinarySpikeError) as info:
            SpikeTrain(np.array([[0, 2], [1, 0]]))
        assert info.value.values == [2]
        assert isinstance(info.value, DelaySNNError)

    def test_rejects_wrong_rank(self):
        with pytest.raises(ShapeMismatchError):
            SpikeTrain(np.zeros(5))

    def test_events_are_sorted_and_reconstruct_the_train(self, random_train):
        train = random_train(20, 7, seed=4)
        steps, channels = train.to_events()
        keys = steps.astype(np.int64) * 7 + channels
        assert np.all(np.diff(keys) > 0)
        assert SpikeTrain.from_events(steps, channels, 20, 7) == train
        assert train.num_spikes == steps.size

    def test_dataset_indexing(self):
        inputs = np.zeros((3, 4, 2), dtype=np.uint8)
        inputs[1, 2, 1] = 1
        dataset = SpikeDataset(inputs, [0, 1, 0], 2)
        train, label = dataset[1]
        assert label == 1
        assert train.num_spikes == 1
        assert len(dataset.subset([1, 2])) == 2


class TestSeededRNG:
    def test_same_seed_same_stream(self):
        a = seeded_rng(42).uniform(size=100)
        b = seeded_rng(42).uniform(size=100)
        np.testing.assert_array_equal(a, b)

    def test_different_seeds_differ(self):
        assert not np.array_equal(seeded_rng(1).uniform(size=100), seeded_rng(2).uniform(size=100))

    def test_seed_is_64_bit(self):
        np.testing.assert_array_equal(seeded_rng(2**64 + 5).normal(size=10), seeded_rng(5).normal(size=10))

    def test_substreams_are_reproducible_and_unbiased(self):
        first = [s.uniform(size=10_000) for s in seeded_rng(7).spawn(3)]
        second = [s.uniform(size=10_000) for s in seeded_rng(7).spawn(3)]
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a, b)
            # mean of U(0,1) within 3 standard errors
            assert abs(a.mean() - 0.5) < 3 * np.sqrt(1 / 12 / a.size)
        assert not np.array_equal(first[0], first[1])

    def test_torch_generator_is_deterministic(self):
        import torch

        x = torch.rand(5, generator=seeded_rng(3).torch_generator())
        y = torch.rand(5, generator=seeded_rng(3).torch_generator())
        assert torch.equal(x, y)


class TestValidateConfig:
    def test_defaults_are_valid(self):
        assert validate_config(ModelConfig(), TrainConfig()) == []

    def test_beta_boundary(self):
        assert validate_config(ModelConfig(beta=1.0), TrainConfig()) == ["beta must lie in (0,1)"]

    def test_d_max_boundary(self):
        assert validate_config(ModelConfig(d_max=0), TrainConfig()) == ["d_max must be ≥ 1"]

    def test_collects_every_violation(self):
        problems = validate_config(
            ModelConfig(weight_sparsity=1.5, delay_mechanism="radial"),
            TrainConfig(lr_weights=0.0, reg=RegConfig(alpha_min=0.5, alpha_max=0.1)),
        )
        assert len(problems) == 4

    def test_unknown_replace_key(self):
        with pytest.raises(ConfigError):
            ModelConfig().replace(hiden=4)


class TestConfigDocument:
    def test_round_trip_is_byte_identical(self):
        text = serialize_config(RunConfig(model=ModelConfig(hidden=32, sigma_init=3.0),
                                          train=TrainConfig(reg=RegConfig(alpha_max=2.0))))
        assert serialize_config(parse_config(text)) == text
        assert text.endswith("\n")

    def test_partial_document_uses_defaults(self):
        run_cfg = parse_config('{"model": {"hidden": 16}}')
        assert run_cfg.model.hidden == 16
        assert run_cfg.train == TrainConfig()

    @pytest.mark.parametrize("text", [
        '{"model": {"hiden": 16}}',
        '{"optimizer": {}}',
        '{"train": {"reg": {"alpha": 1}}}',
        "[1, 2]",
        "{not json",
    ])
    def test_rejects_malformed_documents(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(str(tmp_path / "missing.json"))

    def test_none_path_gives_defaults(self):
        assert load_config(None) == RunConfig()

    def test_align_to_dataset(self):
        dataset = SpikeDataset(np.zeros((2, 9, 4), dtype=np.uint8), [0, 2], 3)
        run_cfg = align_to_dataset(RunConfig(), dataset)
        assert (run_cfg.model.input_channels, run_cfg.model.classes) == (4, 3)
        assert (run_cfg.data.channels, run_cfg.data.classes, run_cfg.data.steps) == (4, 3, 9)
        assert not any("must equal" in p for p in validate_run_config(run_cfg))
