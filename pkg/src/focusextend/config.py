"""Pipeline configuration: defaults, validation, and key=value config files."""

from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ConfigError

__all__ = ["Config", "load_config_file"]


@dataclass
class Config:
    """Tunable constants shared by the pipelines.

    lambda_k=None selects the data-relative ridge default (1e-3 * max|I|^2)
    at estimation time; any float is used as the absolute ridge weight.
    """

    patch_size: int = 64
    stride: int = 32
    lambda_w: float = 0.1
    lambda_k: float | None = None
    sigma_scale: float = 50.0
    kernel_size: int = 15
    lut_bins: int = 100
    max_blur: float = 1.0
    seed: int = 0
    threads: int = 1

    def validate(self) -> "Config":
        if self.patch_size < 3:
            raise ConfigError(f"patch_size must be >= 3, got {self.patch_size}")
        if not 1 <= self.stride <= self.patch_size:
            raise ConfigError(
                f"stride must be in [1, patch_size], got {self.stride}"
            )
        if self.lambda_w < 0:
            raise ConfigError(f"lambda_w must be >= 0, got {self.lambda_w}")
        if self.lambda_k is not None and self.lambda_k <= 0:
            raise ConfigError(f"lambda_k must be > 0, got {self.lambda_k}")
        if self.sigma_scale < 0:
            raise ConfigError(f"sigma_scale must be >= 0, got {self.sigma_scale}")
        if self.kernel_size % 2 == 0 or not 1 <= self.kernel_size <= 127:
            raise ConfigError(
                f"kernel_size must be odd and in [1, 127], got {self.kernel_size}"
            )
        if self.kernel_size > self.patch_size:
            raise ConfigError("kernel_size must not exceed patch_size")
        if self.lut_bins < 1:
            raise ConfigError(f"lut_bins must be >= 1, got {self.lut_bins}")
        if not 0.0 <= self.max_blur <= 1.0:
            raise ConfigError(f"max_blur must be in [0, 1], got {self.max_blur}")
        if self.threads < 0:
            raise ConfigError(f"threads must be >= 0, got {self.threads}")
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(Config)}


def _coerce(name: str, text: str):
    if name in ("patch_size", "stride", "kernel_size", "lut_bins", "seed",
                "threads"):
        return int(text)
    if name == "lambda_k" and text.lower() in ("none", ""):
        return None
    return float(text)


def load_config_file(path: str) -> dict:
    """Parse a key=value config file into a field dict.

    Blank lines and #-comments are ignored; unknown keys are an error so a
    typo never silently falls back to a default.
    """
    values: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, text = (part.strip() for part in line.split("=", 1))
            if key not in _FIELD_TYPES:
                raise ConfigError(f"{path}:{lineno}: unknown setting {key!r}")
            try:
                values[key] = _coerce(key, text)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}")
    return values
