"""
Тесты загрузки конфигурации эксперимента.
"""

from pathlib import Path

import pytest

from app.core.exceptions import ConfigurationException, ValidationException
from app.schemas import AoaModelKind, GainMode, SnrReference, SweepAxis
from app.services.config_service import (
    load_experiment_config,
    nest_dotted,
    parse_experiment_config,
)

EXAMPLE = """
# Развертка по дальности
name = range_sweep
scenario.frequency_hz = 12000
scenario.max_bounce_order = 6
channel.beta_rad = 0.03
capacity.trials = 2000
capacity.seed = 7
sweep.axis = range_m
sweep.values = 1000, 5000, 9000
"""


def test_parse_dotted_keys():
    config = parse_experiment_config(EXAMPLE)
    assert config.name == "range_sweep"
    assert config.scenario.frequency_hz == 12000.0
    assert config.scenario.max_bounce_order == 6
    assert config.scenario.range_m == 1000.0
    assert config.channel.beta_rad == 0.03
    assert config.capacity.trials == 2000
    assert config.sweep.axis == SweepAxis.RANGE_M
    assert config.sweep.values == [1000.0, 5000.0, 9000.0]


def test_defaults_without_file():
    config = load_experiment_config(None)
    assert config.scenario.range_m == 1000.0
    assert config.channel.beta_rad == 0.02
    assert config.gain.mode == GainMode.FIT
    assert config.capacity.snr_reference == SnrReference.TRANSMIT
    assert config.sweep is None


def test_json_list_values():
    config = parse_experiment_config("sweep.axis = n_rays\nsweep.values = [1, 2, 3, 18]\n")
    assert config.sweep.values == [1.0, 2.0, 3.0, 18.0]


def test_invalid_value_names_key():
    with pytest.raises(ConfigurationException) as excinfo:
        parse_experiment_config("scenario.range_m = 0\n")
    assert "scenario.range_m" in excinfo.value.message


def test_unknown_key_rejected():
    with pytest.raises(ConfigurationException) as excinfo:
        parse_experiment_config("capacity.bogus = 1\n")
    assert "capacity.bogus" in excinfo.value.message


def test_all_errors_reported():
    with pytest.raises(ConfigurationException) as excinfo:
        parse_experiment_config("scenario.range_m = -5\ncapacity.trials = 0\n")
    assert "scenario.range_m" in excinfo.value.message
    assert "capacity.trials" in excinfo.value.message


@pytest.mark.parametrize(
    "values",
    ["1000, 1000, 2000", "5000, 1000", "[]"],
)
def test_sweep_values_must_increase(values):
    with pytest.raises(ConfigurationException):
        parse_experiment_config(f"sweep.axis = range_m\nsweep.values = {values}\n")


def test_n_rays_values_must_be_integers():
    with pytest.raises(ConfigurationException):
        parse_experiment_config("sweep.axis = n_rays\nsweep.values = 1, 2.5\n")


def test_explicit_gain_requires_parameters():
    with pytest.raises(ConfigurationException) as excinfo:
        parse_experiment_config("gain.mode = explicit\ngain.xi_rad = 0\ngain.varsigma_rad = 0.3\n")
    assert "lambda" in excinfo.value.message

    config = parse_experiment_config(
        "gain.mode = explicit\ngain.lambda = 1e-6\ngain.xi_rad = 0.01\ngain.varsigma_rad = 0.3\n"
    )
    model = config.gain.explicit_model()
    assert (model.lambda_, model.xi, model.varsigma) == (1e-6, 0.01, 0.3)


def test_path_reference_requires_snr():
    with pytest.raises(ConfigurationException):
        parse_experiment_config("capacity.snr_reference = path\n")
    config = parse_experiment_config("capacity.snr_reference = path\ncapacity.snr_db = 20\n")
    assert config.capacity.snr_db == 20.0
    swept = parse_experiment_config("capacity.snr_reference = path\nsweep.axis = snr_db\nsweep.values = 0, 10\n")
    assert swept.sweep.axis == SweepAxis.SNR_DB


def test_overrides_replace_file_values(write_config):
    path = write_config(EXAMPLE)
    config = load_experiment_config(path, {"capacity.seed": 11, "capacity.trials": None, "gain.n_bins": 9})
    assert config.capacity.seed == 11
    assert config.capacity.trials == 2000
    assert config.gain.n_bins == 9


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationException):
        load_experiment_config(tmp_path / "absent.conf")


def test_beta_per_path():
    config = parse_experiment_config("channel.beta_per_path_rad = 0.01, 0.02, 0.03\n")
    assert config.channel.beta_for(2) == [0.01, 0.02]
    with pytest.raises(ValidationException):
        config.channel.beta_for(4)


class TestNestDotted:
    def test_nesting(self):
        assert nest_dotted({"a.b.c": "1", "a.d": "2", "e": "3"}) == {"a": {"b": {"c": "1"}, "d": "2"}, "e": "3"}

    @pytest.mark.parametrize(
        "flat",
        [
            {"scenario": "1", "scenario.range_m": "2"},
            {"scenario.range_m": "2", "scenario": "1"},
            {"scenario..range_m": "1"},
            {"scenario.range_m": None},
        ],
    )
    def test_conflicts(self, flat):
        with pytest.raises(ConfigurationException):
            nest_dotted(flat)


def test_aoa_model_option():
    assert parse_experiment_config("").channel.aoa_model == AoaModelKind.TRIANGULAR
    config = parse_experiment_config("channel.aoa_model = laplacian\n")
    assert config.channel.aoa_model == AoaModelKind.LAPLACIAN
    with pytest.raises(ConfigurationException):
        parse_experiment_config("channel.aoa_model = von_mises\n")


def test_snr_grid_not_allowed_with_snr_axis():
    with pytest.raises(ConfigurationException):
        parse_experiment_config("capacity.snr_db_values = 0, 10\nsweep.axis = snr_db\nsweep.values = 0, 10\n")
    config = parse_experiment_config("capacity.snr_db_values = 70, 80\nsweep.axis = range_m\nsweep.values = 1000, 5000\n")
    assert config.capacity.snr_db_values == [70.0, 80.0]


class TestRecipes:
    RECIPES_DIR = Path(__file__).parent.parent / "docs" / "recipes"

    def test_all_recipes_load(self):
        recipes = sorted(self.RECIPES_DIR.glob("*.conf"))
        assert recipes
        for recipe in recipes:
            assert load_experiment_config(recipe).name == recipe.stem

    @pytest.mark.parametrize(
        "name",
        ["range_sweep_5khz", "range_sweep_12khz", "frequency_sweep_1km", "frequency_sweep_5km", "frequency_sweep_9km"],
    )
    def test_range_and_frequency_recipes_use_fifteen_rays(self, name):
        assert load_experiment_config(self.RECIPES_DIR / f"{name}.conf").channel.n_rays == 15

    def test_vector_vs_siso_recipe(self):
        config = load_experiment_config(self.RECIPES_DIR / "vector_vs_siso.conf")
        assert (config.scenario.range_m, config.channel.n_rays) == (5000.0, 18)

    def test_range_recipe_over_snr_grid(self):
        config = load_experiment_config(self.RECIPES_DIR / "range_sweep_multi_snr_5khz.conf")
        assert config.sweep.axis == SweepAxis.RANGE_M
        assert len(config.capacity.snr_db_values) > 1
