"""Tests for configuration loading."""

from __future__ import annotations

from unittest.mock import patch

import pytest
from pydantic import ValidationError

from snrbound.cli.figures import FigurePreset, load_presets
from snrbound.config import (
    FIGURES_DIR,
    Settings,
    _resolve_env_file,
    load_all_figure_configs,
    load_figure_config,
)
from snrbound.errors import ConfigurationError
from snrbound.models import DEFAULT_REPLICATES, DEFAULT_SEED


def test_settings_defaults():
    s = Settings(_env_file=None)
    assert s.default_seed == DEFAULT_SEED
    assert s.replicates == DEFAULT_REPLICATES
    assert s.se_multiplier == 4.0
    assert s.quadrature_nodes == 128
    assert s.log_level == "INFO"


def test_settings_from_env(monkeypatch):
    monkeypatch.setenv("SNRBOUND_MAX_WORKERS", "8")
    monkeypatch.setenv("SNRBOUND_SE_MULTIPLIER", "3.5")
    s = Settings(_env_file=None)
    assert s.max_workers == 8
    assert s.se_multiplier == 3.5


def test_settings_reject_zero_replicates(monkeypatch):
    monkeypatch.setenv("SNRBOUND_REPLICATES", "0")
    with pytest.raises(ValidationError):
        Settings(_env_file=None)


# --- Figure presets ---


def test_figures_dir_exists():
    assert FIGURES_DIR.exists(), f"Figures directory not found at {FIGURES_DIR}"


def test_load_envelope_preset():
    config = load_figure_config("envelope_k20")
    assert config["slug"] == "envelope_k20"
    assert config["problem"] == {"p": 5, "k": 20, "m": 2.0}
    assert {"kind": "mle"} in config["specs"]


def test_load_all_presets():
    configs = load_all_figure_configs()
    assert set(configs) >= {"envelope_k20", "envelope_k10", "crossing_p5", "radius_p3"}
    assert list(configs) == sorted(configs)


def test_load_missing_preset():
    with pytest.raises(FileNotFoundError):
        load_figure_config("nonexistent_figure_xyz")


def test_presets_validate():
    presets = load_presets()
    assert len(presets) >= 4
    radius = next(p for p in presets if p.slug == "radius_p3")
    assert radius.problem.p == 3
    assert radius.gains[0].improved == "bu_l0_r2.5"


def test_preset_gain_labels_must_name_specs():
    with pytest.raises(ValidationError, match="gain label"):
        FigurePreset.model_validate(
            {
                "slug": "x",
                "title": "x",
                "problem": {"p": 5, "k": 20, "m": 2.0},
                "specs": [{"kind": "unbiased"}],
                "gains": [{"base": "ub", "improved": "mle"}],
            }
        )


def test_no_presets_found(tmp_path):
    with patch("snrbound.config.FIGURES_DIR", tmp_path), pytest.raises(ConfigurationError):
        load_presets()


# --- _resolve_env_file ---


class TestResolveEnvFile:
    def test_no_env_file(self, tmp_path):
        with patch("snrbound.config.PROJECT_ROOT", tmp_path):
            result = _resolve_env_file()
        assert result is None

    def test_plain_env_file(self, tmp_path):
        env_path = tmp_path / ".env"
        env_path.write_text("SNRBOUND_REPLICATES=1000\n")
        with patch("snrbound.config.PROJECT_ROOT", tmp_path):
            result = _resolve_env_file()
        assert result == str(env_path)

    def test_git_crypt_encrypted_env(self, tmp_path):
        env_path = tmp_path / ".env"
        env_path.write_bytes(b"\x00GITCRYPT\x00" + b"\xff" * 100)
        with patch("snrbound.config.PROJECT_ROOT", tmp_path):
            result = _resolve_env_file()
        assert result is None

    def test_unreadable_env_file(self, tmp_path):
        env_path = tmp_path / ".env"
        env_path.write_text("x")
        with (
            patch("snrbound.config.PROJECT_ROOT", tmp_path),
            patch("builtins.open", side_effect=OSError("permission denied")),
        ):
            result = _resolve_env_file()
        assert result is None
