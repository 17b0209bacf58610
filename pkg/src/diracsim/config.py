"""Experiment configuration: a small key = value format, validated fail-fast.

Validation reports every problem at once (unknown keys, missing fields,
type and domain errors) so a config file can be fixed in one pass; no
computation starts on an invalid config.
"""

from dataclasses import dataclass

from .errors import ConfigError

__all__ = ["ExperimentConfig", "parse_config", "parse_value", "KINDS"]


def _pow2(v):
    return v >= 8 and (v & (v - 1)) == 0


@dataclass(frozen=True)
class _Field:
    typ: type
    required: bool = False
    default: object = None
    check: object = None
    check_msg: str = ""


def _num(required=False, default=None, check=None, msg=""):
    return _Field(float, required, default, check, msg)


_GRID_FIELDS = {
    "n_points": _Field(int, True, None, _pow2, "must be a power of two >= 8"),
    "x_min": _num(required=True),
    "x_max": _num(required=True),
}

_COMMON = {"seed": _Field(int, False, 0)}

SCHEMAS = {
    "zitterbewegung": {
        **_COMMON,
        **_GRID_FIELDS,
        "m": _num(required=True, check=lambda v: v >= 0, msg="must be >= 0"),
        "c": _num(required=True, check=lambda v: v > 0, msg="must be > 0"),
        "p0": _num(default=0.0),
        "sigma_x": _num(default=10.0, check=lambda v: v > 0, msg="must be > 0"),
        "x0": _num(default=0.0),
        "t_final": _num(required=True, check=lambda v: v > 0, msg="must be > 0"),
        "n_samples": _Field(int, False, 512, lambda v: v >= 64, "must be >= 64"),
    },
    "klein1d": {
        **_COMMON,
        **_GRID_FIELDS,
        "m": _num(required=True, check=lambda v: v >= 0, msg="must be >= 0"),
        "c": _num(required=True, check=lambda v: v > 0, msg="must be > 0"),
        "alpha": _num(required=True, check=lambda v: v > 0, msg="must be > 0"),
        "p0": _num(default=2.0),
        "sigma_x": _num(default=5.0, check=lambda v: v > 0, msg="must be > 0"),
        "x0": _num(default=-40.0),
        "t_final": _num(required=True, check=lambda v: v > 0, msg="must be > 0"),
        "dt": _num(required=True, check=lambda v: v > 0, msg="must be > 0"),
        "snapshots": _Field(list, False, None),
    },
    "klein2d": {
        **_COMMON,
        **_GRID_FIELDS,
        "m": _num(required=True, check=lambda v: v >= 0, msg="must be >= 0"),
        "c": _num(required=True, check=lambda v: v > 0, msg="must be > 0"),
        "alpha": _num(required=True, check=lambda v: v > 0, msg="must be > 0"),
        "p0": _num(default=2.0),
        "sigma_x": _num(default=5.0, check=lambda v: v > 0, msg="must be > 0"),
        "x0": _num(default=-40.0),
        "dt": _num(required=True, check=lambda v: v > 0, msg="must be > 0"),
        "t_snapshots": _Field(list, True),
        "n_slices": _Field(int, False, 64, lambda v: v >= 1, "must be >= 1"),
        "py_min": _num(default=-2.0),
        "py_max": _num(default=2.0),
        "sigma_py": _num(default=0.5, check=lambda v: v > 0, msg="must be > 0"),
        "emit_xy": _Field(bool, False, False),
        "slice_normalization": _Field(
            str,
            False,
            "per_slice",
            lambda v: v in ("per_slice", "global"),
            "must be per_slice or global",
        ),
    },
    "landau": {
        **_COMMON,
        "m": _num(required=True, check=lambda v: v >= 0, msg="must be >= 0"),
        "c": _num(required=True, check=lambda v: v > 0, msg="must be > 0"),
        "n_max": _Field(int, False, 64, lambda v: v >= 4, "must be >= 4"),
        "levels": _Field(list, False, [1, 2, 3]),
        "sign": _Field(int, False, 1, lambda v: v in (-1, 1), "must be +-1"),
        "n_phase": _Field(int, False, 128, lambda v: v >= 16, "must be >= 16"),
        # 0 = scan the quantized windows automatically per level
        "half_width": _num(default=0.0, check=lambda v: v >= 0, msg="must be >= 0"),
        "gamma_t": _Field(list, False, []),
        "p_damp": _num(default=None, check=lambda v: 0 <= v <= 1, msg="must be in [0, 1]"),
    },
    "bag": {
        **_COMMON,
        **_GRID_FIELDS,
        "m": _num(required=True, check=lambda v: v >= 0, msg="must be >= 0"),
        "c": _num(required=True, check=lambda v: v > 0, msg="must be > 0"),
        "V0": _num(required=True, check=lambda v: v >= 0, msg="must be >= 0"),
        "P_cm": _num(required=True),
        "sigma": _num(default=3.0, check=lambda v: v > 0, msg="must be > 0"),
        "x0": _num(default=0.0),
        "case_p_r0": _Field(list, True),
        "case_pi": _Field(list, True),
        "t_final": _num(required=True, check=lambda v: v > 0, msg="must be > 0"),
        "dt": _num(required=True, check=lambda v: v > 0, msg="must be > 0"),
        "snapshot_dt": _num(default=2.5, check=lambda v: v > 0, msg="must be > 0"),
        "flat_radius": _num(default=None, check=lambda v: v > 0, msg="must be > 0"),
    },
    "ion-map": {
        **_COMMON,
        "direction": _Field(
            str,
            False,
            "to_sim",
            lambda v: v in ("to_sim", "from_sim"),
            "must be to_sim or from_sim",
        ),
        "eta": _num(required=True, check=lambda v: v > 0, msg="must be > 0"),
        "Delta": _num(required=True, check=lambda v: v > 0, msg="must be > 0"),
        "Omega_tilde": _num(default=None, check=lambda v: v >= 0, msg="must be >= 0"),
        "Omega": _num(default=0.0, check=lambda v: v >= 0, msg="must be >= 0"),
        "Omega_0": _num(default=None),
        "Omega_3": _num(default=None),
        "Delta_3": _num(default=None),
        "hbar": _num(default=1.0, check=lambda v: v > 0, msg="must be > 0"),
        "n_max_phonons": _Field(int, False, 100, lambda v: v >= 1, "must be >= 1"),
        "target_c": _num(default=None),
        "target_mc2": _num(default=None),
        "target_alpha": _num(default=None),
        "target_V0": _num(default=None),
        "omega_tilde_max": _num(default=None),
    },
}

KINDS = tuple(SCHEMAS)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    params: dict

    def __getitem__(self, key):
        return self.params[key]

    def get(self, key, default=None):
        return self.params.get(key, default)


def parse_value(text):
    """int | float | bool | [numbers] | bare string."""
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        inner = text[1:-1].strip()
        if not inner:
            return []
        return [parse_value(part) for part in inner.split(",")]
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def _parse_lines(text):
    raw, errors = {}, []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            errors.append(f"line {lineno}: expected key = value, got {stripped!r}")
            continue
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key in raw:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        raw[key] = parse_value(value)
    return raw, errors


def _coerce(name, value, spec, errors):
    if spec.typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            errors.append(f"{name}: expected a number, got {value!r}")
            return None
        value = float(value)
    elif spec.typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            errors.append(f"{name}: expected an integer, got {value!r}")
            return None
    elif spec.typ is bool:
        if not isinstance(value, bool):
            errors.append(f"{name}: expected true/false, got {value!r}")
            return None
    elif spec.typ is list:
        if not isinstance(value, list):
            errors.append(f"{name}: expected a [list], got {value!r}")
            return None
    elif spec.typ is str:
        if not isinstance(value, str):
            errors.append(f"{name}: expected a string, got {value!r}")
            return None
    if spec.check is not None and value is not None:
        try:
            ok = spec.check(value)
        except TypeError:
            ok = False
        if not ok:
            errors.append(f"{name}: {spec.check_msg or 'invalid value'} (got {value!r})")
            return None
    return value


def parse_config(text, overrides=()):
    """Parse and validate a config document; raises ConfigError with the
    complete list of problems on any failure."""
    raw, errors = _parse_lines(text)
    for item in overrides:
        if "=" not in item:
            errors.append(f"override {item!r}: expected key=value")
            continue
        key, _, value = item.partition("=")
        raw[key.strip()] = parse_value(value)
    kind = raw.pop("experiment", None)
    if kind is None:
        errors.append("experiment: required field missing")
    elif kind not in SCHEMAS:
        errors.append(f"experiment: unknown kind {kind!r} (known: {', '.join(KINDS)})")
        kind = None
    if kind is None:
        raise ConfigError(errors)

    schema = SCHEMAS[kind]
    params = {}
    for name, value in raw.items():
        if name not in schema:
            errors.append(f"{name}: unknown key for experiment {kind!r}")
    for name, spec in schema.items():
        if name in raw:
            value = _coerce(name, raw[name], spec, errors)
            if value is not None:
                params[name] = value
        elif spec.required:
            errors.append(f"{name}: required field missing")
        else:
            params[name] = spec.default

    # cross-field checks
    if "x_min" in params and "x_max" in params:
        if (
            params.get("x_min") is not None
            and params.get("x_max") is not None
            and not params["x_max"] > params["x_min"]
        ):
            errors.append("x_max: must be greater than x_min")
    if kind == "bag" and not errors:
        a, b = params["case_p_r0"], params["case_pi"]
        if len(a) != len(b):
            errors.append("case_pi: must have the same length as case_p_r0")
        elif any(v not in (-1, 1) for v in b):
            errors.append("case_pi: entries must be +-1")
    if kind == "ion-map" and not errors:
        if params["direction"] == "to_sim" and params.get("Omega_tilde") is None:
            errors.append("Omega_tilde: required for direction = to_sim")
        if params["direction"] == "from_sim":
            for need in ("target_c", "target_mc2"):
                if params.get(need) is None:
                    errors.append(f"{need}: required for direction = from_sim")
            if params.get("target_V0") is not None and params.get("Delta_3") is None:
                errors.append("Delta_3: required when inverting target_V0")

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(kind, params)
