"""
Tests for run configuration and config-file layering
"""

import pytest

from pipeline_config import (
    DEFAULT_BANDWIDTH_GRID,
    ConfigError,
    PipelineConfig,
    config_hash,
    load_config,
    read_config_file,
)


def test_defaults():
    config = PipelineConfig()
    assert (config.window_size, config.k, config.min_cascade) == (80, 5, 300)
    assert config.alpha == 0.01
    assert config.restarts == 1
    assert config.bandwidth is None
    assert config.bandwidth_grid == DEFAULT_BANDWIDTH_GRID
    assert not config.overrides_phases
    assert config.absent_as_zero and not config.strict_pseudocode


@pytest.mark.parametrize("changes, field", [
    ({"k": 2}, "k"),
    ({"k": 9}, "k"),
    ({"window_size": 4}, "window_size"),
    ({"min_cascade": 50}, "min_cascade"),
    ({"alpha": 1.0}, "alpha"),
    ({"restarts": 0}, "restarts"),
    ({"quiescence": 0.0}, "quiescence"),
    ({"smooth_width": 4}, "smooth_width"),
    ({"grid_resolution": 8}, "grid_resolution"),
    ({"bandwidth": -1.0}, "bandwidth"),
    ({"bandwidth_grid": ()}, "bandwidth_grid"),
    ({"workers": 0}, "workers"),
    ({"depth_probabilities": (1.0, 1.0)}, "depth_probabilities"),
    ({"depth_probabilities": (1.0, 1.0, 0.0, 1.0, 1.0)}, "depth_probabilities"),
    ({"steep_window": 1}, "steep_window"),
    ({"steep_window": 3, "inhib_window": 1}, "steep_window"),
    ({"steep_window": -1, "inhib_window": 2}, "steep_window"),
])
def test_invalid_values(changes, field):
    with pytest.raises(ConfigError, match=f"^{field}:"):
        PipelineConfig(**changes)


def test_to_dict_is_json_friendly():
    data = PipelineConfig(depth_probabilities=(1.0, 1.0, 0.5, 0.5, 0.5)).to_dict()
    assert data["bandwidth_grid"] == list(DEFAULT_BANDWIDTH_GRID)
    assert data["depth_probabilities"] == [1.0, 1.0, 0.5, 0.5, 0.5]


def test_none_overrides_are_ignored():
    config = load_config(k=4, alpha=None)
    assert config.k == 4
    assert config.alpha == 0.01


def test_config_file_accepts_both_key_spellings(tmp_path):
    path = tmp_path / "run.env"
    path.write_text(
        "window-size=40\n"
        "min_cascade=120\n"
        "bandwidth-grid=1, 10, 100\n"
        "strict-pseudocode=yes\n"
        "bandwidth=\n"
    )
    settings = read_config_file(path)
    assert settings == {
        "window_size": 40,
        "min_cascade": 120,
        "bandwidth_grid": (1.0, 10.0, 100.0),
        "strict_pseudocode": True
    }


def test_flags_override_file(tmp_path):
    path = tmp_path / "run.env"
    path.write_text("k=4\nalpha=0.05\n")
    config = load_config(path, alpha=0.02, seed=None)
    assert config.k == 4
    assert config.alpha == 0.02
    assert config.seed == 0


@pytest.mark.parametrize("text", ["colour=red\n", "k=five\n", "all_windows=maybe\n"])
def test_bad_config_files(tmp_path, text):
    path = tmp_path / "run.env"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.env")


def test_unknown_override_is_config_error():
    with pytest.raises(ConfigError):
        load_config(colour="red")


def test_config_hash_is_stable_and_sensitive():
    assert config_hash(PipelineConfig()) == config_hash(PipelineConfig())
    assert len(config_hash(PipelineConfig())) == 64
    assert config_hash(PipelineConfig(seed=1)) != config_hash(PipelineConfig())
