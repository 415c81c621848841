import json
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import Field, ValidationError
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)

from shared.errors import ConfigError


class Settings(BaseSettings):
    """Numerical settings shared by every module.

    Values come from keyword arguments or the ``"settings"`` block of a JSON
    config file. Environment variables are not a source.
    """

    model_config = SettingsConfigDict(extra="forbid", frozen=True)

    # Density evolution
    grid_points: int = Field(default=1024, ge=16)
    threshold_tol: float = Field(default=1e-12, gt=0)
    critical_merge_radius: float = Field(default=1e-4, gt=0)
    critical_value_tol: float = Field(default=1e-9, gt=0)
    fixed_point_tol: float = Field(default=1e-14, gt=0)
    fixed_point_max_iter: int = Field(default=200_000, ge=1)

    # Scaling
    omega: float = Field(default=1.0, gt=0)

    # Stopping sets
    s_max: int = Field(default=20, ge=1)
    spectrum_dps: int = Field(default=80, ge=20)
    gamma_split: float = Field(default=0.5, gt=0, lt=1)

    # Variance
    variance_max_ell: int = Field(default=100, ge=0)
    variance_float_digits: float = Field(default=3.0, ge=0)

    # Logging
    log_level: str = Field(default="INFO")
    log_dir: str = Field(default="logs")

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (init_settings,)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Get the default settings."""
    return Settings()


def settings_from_mapping(data: Optional[Dict[str, Any]]) -> Settings:
    """Build Settings from a plain mapping, reporting the offending key on error."""
    if not data:
        return get_settings()
    try:
        return Settings(**data)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(first["msg"], ("settings",) + tuple(first["loc"])) from e


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a JSON config file into a dict."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"malformed JSON in {path}: {e.msg} at line {e.lineno} column {e.colno}"
        ) from e
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a JSON object")
    return data


def load_settings(path: Union[str, Path]) -> Settings:
    """Load Settings from the ``"settings"`` block of a JSON config file."""
    return settings_from_mapping(load_config_file(path).get("settings"))
