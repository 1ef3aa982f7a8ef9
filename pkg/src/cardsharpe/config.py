"""Run configuration: key=value config files, CLI overrides, JSON meta echo.

A config file is plain text, one ``key=value`` per line, ``#`` comments and
blank lines ignored.  Command-line flags override file values.  The resolved
configuration is echoed to ``run_meta.json`` with everything needed to re-run
the study bit-identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError
from .market_data import GbmSpec

STUDIES = ("annual", "rolling")
LAYOUTS = ("wide", "long")
ALIGN_MODES = ("strict", "intersect")
POLICIES = ("per-window", "fixed-across-windows")

_GBM_KEYS = {
    "n_assets": int,
    "n_days": int,
    "drift_lo": float,
    "drift_hi": float,
    "vol_lo": float,
    "vol_hi": float,
    "corr": float,
    "initial_price": float,
}


@dataclass(frozen=True)
class StudyConfig:
    """Fully resolved inputs for one study run."""

    study: str
    input_csv: str | None
    gbm: GbmSpec | None
    layout: str
    align: str
    period: int
    k_min: int
    k_max: int
    n_samples: int
    seed: int
    stride: int
    quantiles: tuple[float, ...]
    alpha: float
    m_override: int | None
    resample_policy: str
    output_dir: str
    workers: int

    def __post_init__(self):
        if self.study not in STUDIES:
            raise ValidationError(f"study must be one of {STUDIES}, got {self.study!r}")
        if (self.input_csv is None) == (self.gbm is None):
            raise ValidationError("exactly one of a CSV input or a GBM spec is required")
        if self.layout not in LAYOUTS:
            raise ValidationError(f"layout must be one of {LAYOUTS}")
        if self.align not in ALIGN_MODES:
            raise ValidationError(f"align must be one of {ALIGN_MODES}")
        if self.resample_policy not in POLICIES:
            raise ValidationError(f"resample policy must be one of {POLICIES}")
        if self.period < 2:
            raise ValidationError("period must be >= 2")
        if self.stride < 1:
            raise ValidationError("stride must be >= 1")
        if not self.quantiles or any(not 0.0 < q < 1.0 for q in self.quantiles):
            raise ValidationError("quantiles must lie in (0, 1)")
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError("alpha must lie in (0, 1)")
        if self.m_override is not None and self.m_override < 1:
            raise ValidationError("m must be >= 1")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")

    def to_meta(self) -> dict:
        gbm = None
        if self.gbm is not None:
            gbm = {
                "n_assets": self.gbm.n_assets,
                "n_days": self.gbm.n_days,
                "drift_lo": self.gbm.drift_range[0],
                "drift_hi": self.gbm.drift_range[1],
                "vol_lo": self.gbm.vol_range[0],
                "vol_hi": self.gbm.vol_range[1],
                "corr": self.gbm.pairwise_correlation,
                "initial_price": self.gbm.initial_price,
            }
        return {
            "study": self.study,
            "input_csv": self.input_csv,
            "gbm": gbm,
            "layout": self.layout,
            "align": self.align,
            "period": self.period,
            "k_min": self.k_min,
            "k_max": self.k_max,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "stride": self.stride,
            "quantiles": list(self.quantiles),
            "alpha": self.alpha,
            "m": self.m_override,
            "resample_policy": self.resample_policy,
            "output_dir": self.output_dir,
            "workers": self.workers,
        }

    @classmethod
    def from_meta(cls, meta: dict) -> "StudyConfig":
        gbm = None
        if meta.get("gbm") is not None:
            gbm = _gbm_from_mapping(meta["gbm"])
        return cls(
            study=meta["study"],
            input_csv=meta.get("input_csv"),
            gbm=gbm,
            layout=meta.get("layout", "wide"),
            align=meta.get("align", "strict"),
            period=int(meta["period"]),
            k_min=int(meta["k_min"]),
            k_max=int(meta["k_max"]),
            n_samples=int(meta["n_samples"]),
            seed=int(meta["seed"]),
            stride=int(meta.get("stride", 1)),
            quantiles=tuple(float(q) for q in meta["quantiles"]),
            alpha=float(meta["alpha"]),
            m_override=meta.get("m"),
            resample_policy=meta["resample_policy"],
            output_dir=meta["output_dir"],
            workers=int(meta.get("workers", 1)),
        )


def parse_config_file(path) -> dict[str, str]:
    """Read ``key=value`` lines; later occurrences of a key win."""
    values: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def parse_gbm_spec(text: str) -> GbmSpec:
    """Parse an inline GBM spec like ``n_assets=50,n_days=600,corr=0.3``."""
    fields: dict[str, float] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, _, value = part.partition("=")
        key = key.strip()
        if key not in _GBM_KEYS:
            raise ValidationError(f"unknown GBM field {key!r}")
        try:
            fields[key] = _GBM_KEYS[key](value.strip())
        except ValueError as exc:
            raise ValidationError(f"bad GBM value for {key!r}: {value!r}") from exc
    if "n_assets" not in fields or "n_days" not in fields:
        raise ValidationError("GBM spec needs at least n_assets and n_days")
    return _gbm_from_mapping(fields)


def _gbm_from_mapping(fields: dict) -> GbmSpec:
    defaults = GbmSpec(n_assets=2, n_days=3)
    return GbmSpec(
        n_assets=int(fields["n_assets"]),
        n_days=int(fields["n_days"]),
        drift_range=(
            float(fields.get("drift_lo", defaults.drift_range[0])),
            float(fields.get("drift_hi", defaults.drift_range[1])),
        ),
        vol_range=(
            float(fields.get("vol_lo", defaults.vol_range[0])),
            float(fields.get("vol_hi", defaults.vol_range[1])),
        ),
        pairwise_correlation=float(fields.get("corr", defaults.pairwise_correlation)),
        initial_price=float(fields.get("initial_price", defaults.initial_price)),
    )


def _parse_quantiles(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ValidationError(f"bad quantile list {text!r}") from exc


def resolve_config(file_values: dict[str, str], overrides: dict) -> StudyConfig:
    """Merge config-file values with CLI overrides (overrides win)."""
    merged: dict[str, object] = dict(file_values)
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value

    def take(key, cast, default):
        if key not in merged or merged[key] is None:
            return default
        value = merged[key]
        if isinstance(value, str):
            try:
                return cast(value)
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"bad value for {key!r}: {value!r}") from exc
        return value

    study = take("study", str, "annual")
    gbm_raw = merged.get("gbm")
    gbm = None
    if gbm_raw is not None:
        gbm = gbm_raw if isinstance(gbm_raw, GbmSpec) else parse_gbm_spec(str(gbm_raw))
    default_period = 252 if study == "annual" else 90
    default_policy = "per-window" if study == "annual" else "fixed-across-windows"
    quantiles = merged.get("quantiles", (0.1, 0.5, 0.9))
    if isinstance(quantiles, str):
        quantiles = _parse_quantiles(quantiles)
    return StudyConfig(
        study=study,
        input_csv=take("input", str, None),
        gbm=gbm,
        layout=take("layout", str, "wide"),
        align=take("align", str, "strict"),
        period=take("period", int, default_period),
        k_min=take("kmin", int, 10),
        k_max=take("kmax", int, 100),
        n_samples=take("samples", int, 1000),
        seed=take("seed", int, 0),
        stride=take("stride", int, 1),
        quantiles=tuple(float(q) for q in quantiles),
        alpha=take("alpha", float, 0.05),
        m_override=take("m", int, None),
        resample_policy=take("resample", str, default_policy),
        output_dir=take("out", str, "."),
        workers=take("workers", int, 1),
    )
