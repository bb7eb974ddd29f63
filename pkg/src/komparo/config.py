"""Run configurations and the canned presets.

A configuration is a JSON object whose keys mirror the ``RunConfig`` fields.
Unknown keys are rejected so that typos surface as configuration errors
instead of silently falling back to defaults.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .certify import CHECK_IDS, DEFAULT_CHECKS, TAU_ZERO, ConfigError

PROBE_KEYS = ("s_probe", "probe_points", "probe_radii", "table_probe_s",
              "table_probe_radii", "radius_ladder", "level_targets", "divergence_targets")
TOLERANCE_KEYS = ("tau_zero", "tau_grid", "tau_table", "tau_probe")


@dataclass
class RunConfig:
    f_spec: str
    g_spec: str
    dimension: int
    bounds: list
    resolution: list
    symmetric: bool = False
    s_grid: dict = field(default_factory=lambda: {"auto": 11})
    breakpoints: list = field(default_factory=list)
    checks: list = field(default_factory=lambda: list(DEFAULT_CHECKS))
    tolerances: dict = field(default_factory=lambda: {"tau_zero": TAU_ZERO})
    probes: dict = field(default_factory=dict)
    output_dir: str = "."

    @property
    def hahn(self) -> bool:
        return self.g_spec.strip() == "norm"

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys {unknown}")
        missing = [k for k in ("f_spec", "g_spec", "dimension", "bounds", "resolution")
                   if k not in data]
        if missing:
            raise ConfigError(f"missing configuration keys {missing}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        """Read a JSON file. OSError propagates; malformed JSON is a ConfigError."""
        text = Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from e
        return cls.from_dict(data)

    def validate(self) -> None:
        if not isinstance(self.f_spec, str) or not isinstance(self.g_spec, str):
            raise ConfigError("f_spec and g_spec must be strings")
        d = self.dimension
        if not isinstance(d, int) or isinstance(d, bool) or d < 1:
            raise ConfigError(f"dimension must be a positive integer, got {d!r}")
        if not isinstance(self.bounds, list) or len(self.bounds) != d:
            raise ConfigError(f"bounds needs one [lo, hi] pair per axis ({d})")
        for pair in self.bounds:
            if not (isinstance(pair, list) and len(pair) == 2 and all(_is_num(v) for v in pair)):
                raise ConfigError(f"bad bounds entry {pair!r}")
        if not isinstance(self.resolution, list) or len(self.resolution) != d \
                or not all(isinstance(n, int) and not isinstance(n, bool) for n in self.resolution):
            raise ConfigError(f"resolution needs one integer per axis ({d})")
        if not isinstance(self.symmetric, bool):
            raise ConfigError("symmetric must be true or false")
        self._validate_s_grid()
        if not isinstance(self.checks, list) or not self.checks:
            raise ConfigError("checks must be a nonempty list")
        bad = [c for c in self.checks if c not in CHECK_IDS]
        if bad:
            raise ConfigError(f"unknown check ids {bad}; known: {list(CHECK_IDS)}")
        _validate_section(self.tolerances, TOLERANCE_KEYS, "tolerances")
        for k, v in self.tolerances.items():
            if not _is_num(v) or v < 0:
                raise ConfigError(f"tolerance {k} must be a nonnegative number")
        _validate_section(self.probes, PROBE_KEYS, "probes")
        for k, v in self.probes.items():
            if not isinstance(v, list):
                raise ConfigError(f"probes.{k} must be a list")
        if not isinstance(self.output_dir, str):
            raise ConfigError("output_dir must be a string")

    def _validate_s_grid(self) -> None:
        sg = self.s_grid
        if not isinstance(sg, dict) or len(sg) != 1 or next(iter(sg)) not in ("auto", "explicit"):
            raise ConfigError('s_grid must be {"auto": count} or {"explicit": [...]}')
        if "auto" in sg:
            n = sg["auto"]
            if not isinstance(n, int) or isinstance(n, bool) or n < 2:
                raise ConfigError("s_grid.auto must be an integer >= 2")
        else:
            vals = sg["explicit"]
            if not isinstance(vals, list) or not vals or not all(_is_num(v) for v in vals):
                raise ConfigError("s_grid.explicit must be a nonempty list of numbers")
        if not isinstance(self.breakpoints, list) or not all(_is_num(v) for v in self.breakpoints):
            raise ConfigError("breakpoints must be a list of numbers")


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and not math.isnan(v)


def _validate_section(section, allowed, name):
    if not isinstance(section, dict):
        raise ConfigError(f"{name} must be an object")
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown {name} keys {unknown}")


# --------------------------------------------------------------------------
# presets

EXMUPPER_F = "piecewise { x1 <= 0 : 1 ; else : x1^2 }"


class UnknownPresetError(KeyError):
    pass


def _exmupper() -> RunConfig:
    h = 0.01
    return RunConfig(
        f_spec=EXMUPPER_F, g_spec="x1", dimension=1,
        bounds=[[-5.0, 5.0]], resolution=[1001], symmetric=True,
        s_grid={"auto": 1001}, breakpoints=[-3.0, -1.0, 0.0, 0.5, 1.0, 2.0, 3.0],
        checks=list(DEFAULT_CHECKS),
        # inf over [0 <= x] is approached at the first positive lattice point
        tolerances={"tau_zero": TAU_ZERO, "tau_grid": h * h + TAU_ZERO},
        probes={"s_probe": [0.5, 1.0, 2.0], "probe_points": [[0.0]],
                "table_probe_s": [0.0]},
        output_dir="exmupper_out",
    )


def _hahn_doublewell() -> RunConfig:
    from .funcspec import builtin
    from .grid import make_grid
    from .oracle import lattice_lipschitz

    grid = make_grid([-5.0, 5.0], 1001, symmetric=True)
    lip = lattice_lipschitz(builtin("double_well"), grid)
    ds = 0.01
    return RunConfig(
        f_spec="double_well", g_spec="norm", dimension=1,
        bounds=[[-5.0, 5.0]], resolution=[1001], symmetric=True,
        s_grid={"auto": 501}, breakpoints=[],
        checks=["monotone", "sandwich", "semicontinuity_f", "semicontinuity_sup_table",
                "semicontinuity_inf_table", "level_bounded_f", "divergence_sup"],
        # shell extrapolation is exact only up to quadratic terms in the radius,
        # so f probes are judged at lattice resolution h^2
        tolerances={"tau_zero": TAU_ZERO, "tau_table": float(f"{lip * ds:.12g}"),
                    "tau_probe": ds * ds},
        probes={"probe_points": [[0.0], [1.0]],
                "table_probe_s": [0.5, 1.0, 2.0, 3.0, 4.0],
                "table_probe_radii": [ds],
                "divergence_targets": [1.0, 10.0, 100.0]},
        output_dir="hahn_doublewell_out",
    )


def _open_problem() -> RunConfig:
    # f usc, g continuous and level-bounded on the window; only probes are reported
    return RunConfig(
        f_spec=EXMUPPER_F, g_spec="x1", dimension=1,
        bounds=[[-5.0, 5.0]], resolution=[1001], symmetric=True,
        s_grid={"auto": 1001}, breakpoints=[-1.0, -0.5, 0.0, 0.5, 1.0, 2.0],
        checks=["monotone", "experiment_inf_continuity"],
        tolerances={"tau_zero": TAU_ZERO, "tau_grid": 0.01 ** 2 + TAU_ZERO},
        probes={"table_probe_s": [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0]},
        output_dir="open_problem_out",
    )


PRESETS = {
    "exmupper": _exmupper,
    "hahn-doublewell": _hahn_doublewell,
    "open-problem-experiment": _open_problem,
}


def preset(name: str) -> RunConfig:
    try:
        build = PRESETS[name]
    except KeyError:
        raise UnknownPresetError(
            f"unknown preset {name!r}; available: {sorted(PRESETS)}") from None
    return build()
