"""Run configuration: TOML document, defaults, validation."""
import copy
import math
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError

DEFAULTS = {
    "seed": 0,
    "problem": {"kind": "cylinder", "c": 0.5},
    "nonlinearity": {"kind": "cubic", "a": 0.5},
    "wave": {"L": 4.5 * math.pi, "tol": 1e-12},
    "grid": {"n_x": 63, "n_z": 401, "Z": 20.0, "h": 0.05, "bc_x": "dirichlet", "bc_z": "dirichlet"},
    "potential": {"source": "synthetic", "alpha": 1.0, "path": "",
                  "bump_height": 2.0, "bump_width": 2.0},
    "solver": {"k": 10, "shift": None, "tol": 1e-12},
    "essential": {"s_max": None, "n_samples": 201},
    "dispersion": {"n_z": 256, "P": 40.0, "c": 2.0, "k": 12},
    "hypotheses": {"tol_sup": 1e-6, "window": 0.1},
    "output": {"dir": "out", "formats": ["csv", "json", "svg"], "matrix_market": False},
}

FORMATS = ("csv", "json", "svg")


@dataclass(frozen=True)
class RunConfig:
    data: dict

    def __getitem__(self, key):
        return self.data[key]

    @property
    def kind(self):
        return self.data["problem"]["kind"]

    @property
    def seed(self):
        return self.data["seed"]

    def formats(self):
        return tuple(self.data["output"]["formats"])


def _merge(base, update, path=""):
    for key, val in update.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown configuration key '{where}'")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"'{where}' must be a table")
            _merge(base[key], val, where + ".")
        else:
            base[key] = val


def _number(d, key, section, positive=False, integer=False, allow_none=False):
    val = d[key]
    name = f"{section}.{key}"
    if val is None and allow_none:
        return
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"'{name}' must be a number")
    if integer and not isinstance(val, int):
        raise ConfigError(f"'{name}' must be an integer")
    if not math.isfinite(val):
        raise ConfigError(f"'{name}' must be finite")
    if positive and val <= 0:
        raise ConfigError(f"'{name}' must be positive")


def _choice(d, key, section, options):
    if d[key] not in options:
        raise ConfigError(f"'{section}.{key}' must be one of {', '.join(options)}")


def validate(data):
    seed = data["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ConfigError("'seed' must be an unsigned 64-bit integer")
    pr = data["problem"]
    _choice(pr, "kind", "problem", ("cylinder", "allen-cahn"))
    _number(pr, "c", "problem", allow_none=True)
    nl = data["nonlinearity"]
    _choice(nl, "kind", "nonlinearity", ("cubic",))
    _number(nl, "a", "nonlinearity")
    if pr["kind"] == "allen-cahn":
        if not 0 < nl["a"] <= 0.5:
            raise ConfigError("'nonlinearity.a' must lie in (0, 0.5] for a front")
        speed = math.sqrt(2.0) * (0.5 - nl["a"])
        if pr["c"] is not None and abs(pr["c"] - speed) > 1e-12:
            raise ConfigError(f"'problem.c' must equal the front speed {speed!r} (or be omitted)")
    elif not 0 < nl["a"] < 1:
        raise ConfigError("'nonlinearity.a' must lie in (0, 1)")
    if pr["kind"] == "cylinder" and pr["c"] is None:
        raise ConfigError("'problem.c' is required for cylinder runs")
    _number(data["wave"], "L", "wave", positive=True)
    _number(data["wave"], "tol", "wave", positive=True)
    g = data["grid"]
    for key in ("n_x", "n_z"):
        _number(g, key, "grid", positive=True, integer=True)
        if g[key] < 3:
            raise ConfigError(f"'grid.{key}' must be at least 3")
    _number(g, "Z", "grid", positive=True)
    _number(g, "h", "grid", positive=True)
    _choice(g, "bc_x", "grid", ("dirichlet", "periodic"))
    _choice(g, "bc_z", "grid", ("dirichlet",))
    p = data["potential"]
    _choice(p, "source", "potential", ("synthetic", "file"))
    _number(p, "alpha", "potential", positive=True)
    _number(p, "bump_height", "potential")
    _number(p, "bump_width", "potential", positive=True)
    if p["source"] == "file" and not p["path"]:
        raise ConfigError("'potential.path' is required when source = \"file\"")
    s = data["solver"]
    _number(s, "k", "solver", positive=True, integer=True)
    _number(s, "tol", "solver", positive=True)
    sh = s["shift"]
    if sh is not None and not (isinstance(sh, (int, float)) and not isinstance(sh, bool)):
        if not (isinstance(sh, list) and len(sh) == 2 and all(isinstance(v, (int, float)) for v in sh)):
            raise ConfigError("'solver.shift' must be a number or [re, im]")
    e = data["essential"]
    _number(e, "s_max", "essential", positive=True, allow_none=True)
    _number(e, "n_samples", "essential", positive=True, integer=True)
    if e["n_samples"] < 2:
        raise ConfigError("'essential.n_samples' must be at least 2")
    dsp = data["dispersion"]
    _number(dsp, "n_z", "dispersion", positive=True, integer=True)
    _number(dsp, "P", "dispersion", positive=True)
    _number(dsp, "c", "dispersion")
    _number(dsp, "k", "dispersion", positive=True, integer=True)
    hy = data["hypotheses"]
    _number(hy, "tol_sup", "hypotheses", positive=True)
    _number(hy, "window", "hypotheses", positive=True)
    if not hy["window"] < 0.5:
        raise ConfigError("'hypotheses.window' must be below 0.5")
    out = data["output"]
    fm = out["formats"]
    if not isinstance(fm, list) or not fm or any(f not in FORMATS for f in fm):
        raise ConfigError(f"'output.formats' must be a nonempty list drawn from {FORMATS}")
    if not isinstance(out["dir"], str):
        raise ConfigError("'output.dir' must be a string")
    if not isinstance(out["matrix_market"], bool):
        raise ConfigError("'output.matrix_market' must be a boolean")


def from_dict(doc):
    data = copy.deepcopy(DEFAULTS)
    _merge(data, doc)
    if data["problem"]["kind"] == "allen-cahn" and "c" not in doc.get("problem", {}):
        data["problem"]["c"] = None  # taken from the exact front
    validate(data)
    return RunConfig(data)


def load_config(path=None, overrides=None):
    """Read a TOML file (or only defaults when ``path`` is None) and validate it."""
    doc = {}
    if path is not None:
        try:
            doc = tomllib.loads(Path(path).read_text())
        except OSError as err:
            raise ConfigError(f"cannot read config {path}: {err}") from err
        except tomllib.TOMLDecodeError as err:
            raise ConfigError(f"malformed TOML in {path}: {err}") from err
    if overrides:
        doc = copy.deepcopy(doc)
        for dotted, val in overrides.items():
            node = doc
            *head, last = dotted.split(".")
            for key in head:
                node = node.setdefault(key, {})
            node[last] = val
    return from_dict(doc)
