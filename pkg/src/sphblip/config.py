"""Line-oriented run configuration.

A config is a list of ``key = value`` lines; ``#`` starts a comment.  Method
parameters sit in the same flat namespace as the run keys and are checked
against the chosen method.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

from .fv import LIMITERS, Reconstruction
from .gsph import GsphConfig
from .problems import CATALOGUE, DEFAULT_RESOLUTION, get_problem
from .sph import DissipationParams

METHODS = ("mpm", "gsph", "gsph-hybrid", "fv-remap", "fv-euler")


class ConfigError(ValueError):
    pass


class ParseError(ConfigError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class UnknownKey(ConfigError):
    pass


class InvalidValue(ConfigError):
    pass


@dataclass(frozen=True)
class RunConfig:
    problem: str
    method: str
    params: object = None
    resolution: int | None = None
    t_end: float | None = None
    out: str = "out"
    workers: int = 1
    cadence: tuple = ()   # extra snapshot times; the end time is always written
    dim: int = 1

    def __post_init__(self):
        if self.problem not in CATALOGUE:
            raise InvalidValue(f"unknown problem {self.problem!r}; known: {sorted(CATALOGUE)}")
        if self.method not in METHODS:
            raise InvalidValue(f"unknown method {self.method!r}; known: {METHODS}")
        if self.resolution is not None and self.resolution <= 0:
            raise InvalidValue("resolution must be positive")
        if self.t_end is not None and not self.t_end > 0.0:
            raise InvalidValue("t_end must be positive")
        if self.workers < 1:
            raise InvalidValue("workers must be at least 1")
        if self.method.startswith("fv") and self.problem == "blastwave-2d":
            raise InvalidValue("finite-volume runs are 1D only")

    @property
    def end_time(self) -> float:
        return get_problem(self.problem).t_end if self.t_end is None else self.t_end

    @property
    def cells(self) -> int:
        if self.resolution is not None:
            return self.resolution
        return DEFAULT_RESOLUTION[self.problem]

    def with_(self, **kw) -> "RunConfig":
        return replace(self, **kw)


_RUN_KEYS = {"problem", "method", "resolution", "t_end", "out", "workers", "cadence"}
_MPM_KEYS = {f.name for f in fields(DissipationParams)}
_GSPH_KEYS = {f.name for f in fields(GsphConfig)} - {"t_final"}
_FV_KEYS = {"reconstruction", "limiter"}
_METHOD_KEYS = {"mpm": _MPM_KEYS, "gsph": _GSPH_KEYS, "gsph-hybrid": _GSPH_KEYS,
                "fv-remap": _FV_KEYS, "fv-euler": _FV_KEYS}
ALL_KEYS = _RUN_KEYS | _MPM_KEYS | _GSPH_KEYS | _FV_KEYS


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(no, f"expected 'key = value', got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if not key or not val:
            raise ParseError(no, "empty key or value")
        yield no, key, val


def _num(key, val, kind=float):
    try:
        return kind(val)
    except ValueError:
        raise InvalidValue(f"{key}: expected {kind.__name__}, got {val!r}") from None


def parse_config(text: str) -> RunConfig:
    """Parse and validate config text, filling defaults."""
    raw = {}
    for no, key, val in _lines(text):
        if key not in ALL_KEYS:
            raise UnknownKey(f"line {no}: unknown key {key!r}")
        if key in raw:
            raise ParseError(no, f"duplicate key {key!r}")
        raw[key] = val
    for req in ("problem", "method"):
        if req not in raw:
            raise InvalidValue(f"missing required key {req!r}")
    method = raw.pop("method")
    if method not in METHODS:
        raise InvalidValue(f"unknown method {method!r}; known: {METHODS}")
    problem = raw.pop("problem")
    if problem not in CATALOGUE:
        raise InvalidValue(f"unknown problem {problem!r}; known: {sorted(CATALOGUE)}")

    run = {}
    if "resolution" in raw:
        run["resolution"] = _num("resolution", raw.pop("resolution"), int)
    if "t_end" in raw:
        run["t_end"] = _num("t_end", raw.pop("t_end"))
    if "out" in raw:
        run["out"] = raw.pop("out")
    if "workers" in raw:
        run["workers"] = _num("workers", raw.pop("workers"), int)
    if "cadence" in raw:
        times = tuple(_num("cadence", s.strip()) for s in raw.pop("cadence").split(","))
        if any(b <= a for a, b in zip(times, times[1:])) or min(times) <= 0.0:
            raise InvalidValue("cadence times must be positive and increasing")
        run["cadence"] = times

    stray = set(raw) - _METHOD_KEYS[method]
    if stray:
        raise InvalidValue(f"keys {sorted(stray)} do not apply to method {method!r}")
    t_end = run.setdefault("t_end", get_problem(problem).t_end)
    params = build_params(method, raw, t_end)
    try:
        return RunConfig(problem, method, params, dim=2 if problem.endswith("2d") else 1, **run)
    except ValueError as err:
        raise InvalidValue(str(err)) from None


def build_params(method: str, raw: dict, t_end: float):
    """Method parameter object from string values."""
    try:
        if method == "mpm":
            return DissipationParams(**{k: _num(k, v) for k, v in raw.items()})
        if method in ("fv-remap", "fv-euler"):
            kind = raw.get("reconstruction", "constant")
            lim = raw.get("limiter", "minmod")
            if lim not in LIMITERS:
                raise InvalidValue(f"limiter must be one of {LIMITERS}")
            return Reconstruction(kind, lim)
        kw = dict(raw)
        for k in ("alpha", "cfl"):
            if k in kw:
                kw[k] = _num(k, kw[k])
        if method == "gsph":
            if kw.get("blend", "none") != "none":
                raise InvalidValue("method gsph takes no blend; use gsph-hybrid")
        else:
            if kw.get("blend", "none") == "none":
                raise InvalidValue("gsph-hybrid needs blend = linear or exponential")
            if kw["blend"] == "exponential" and "alpha" not in kw:
                raise InvalidValue("the exponential blend needs alpha")
        return GsphConfig(t_final=t_end, **kw)
    except InvalidValue:
        raise
    except ValueError as err:
        raise InvalidValue(str(err)) from None


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_text(cfg: RunConfig) -> str:
    """Inverse of :func:`parse_config` for the keys that differ from defaults."""
    lines = [f"problem = {cfg.problem}", f"method = {cfg.method}"]
    if cfg.resolution is not None:
        lines.append(f"resolution = {cfg.resolution}")
    if cfg.t_end is not None:
        lines.append(f"t_end = {cfg.t_end!r}")
    if cfg.cadence:
        lines.append("cadence = " + ", ".join(repr(t) for t in cfg.cadence))
    p = cfg.params
    if isinstance(p, Reconstruction):
        lines += [f"reconstruction = {p.kind}", f"limiter = {p.limiter}"]
    elif p is not None:
        for f in fields(p):
            if f.name != "t_final":
                lines.append(f"{f.name} = {getattr(p, f.name)}")
    return "\n".join(lines) + "\n"


def default_params(method: str, t_end: float, **kw):
    """Parameter object for ``method`` with keyword overrides."""
    raw = {k: str(v) for k, v in kw.items()}
    return build_params(method, raw, t_end)
