"""Run configuration: defaults, then environment/.env, then a JSON file, then CLI flags."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from convexprice.errors import InputFormatError
from convexprice.market_model import NormalizationConfig


class RunConfig(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="CONVEXPRICE_",
        env_file=".env",
        env_nested_delimiter="__",
        extra="ignore",
    )

    normalization: NormalizationConfig = NormalizationConfig()
    cdf_source: Literal["uniform", "file", "history"] = "uniform"
    cdf_path: Optional[Path] = None
    history_path: Optional[Path] = None
    ceiling: float = Field(default=1.0, gt=0.0)
    p_min_admissible: float = Field(default=1e-6, gt=0.0, lt=1.0)
    curve_points: int = Field(default=1001, ge=2)
    grid_points: int = Field(default=10001, ge=2)
    price_grid_points: int = Field(default=100001, ge=2)
    log_level: str = "WARNING"
    log_json: bool = False
    out: Optional[Path] = None
    curve_path: Optional[Path] = None
    svg_path: Optional[Path] = None

    @model_validator(mode="after")
    def _source_has_path(self) -> "RunConfig":
        if self.cdf_source == "file" and self.cdf_path is None:
            raise ValueError("cdf_source 'file' needs cdf_path")
        if self.cdf_source == "history" and self.history_path is None:
            raise ValueError("cdf_source 'history' needs history_path")
        return self


def load_run_config(path: Optional[Union[str, Path]] = None, **overrides: Any) -> RunConfig:
    """Build the effective configuration.

    ``overrides`` whose value is ``None`` are treated as not given.

    Raises:
        InputFormatError: unreadable or invalid config file, or invalid values.
    """
    values: dict[str, Any] = {}
    if path is not None:
        try:
            values = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise InputFormatError(f"{path}: cannot read config ({exc.strerror})") from exc
        except UnicodeDecodeError as exc:
            raise InputFormatError(f"{path}: not valid UTF-8") from exc
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"{path}: invalid JSON ({exc.msg})") from exc
        if not isinstance(values, dict):
            raise InputFormatError(f"{path}: config must be a JSON object")
    values.update({key: value for key, value in overrides.items() if value is not None})
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        raise InputFormatError(f"invalid configuration: {exc}") from exc
