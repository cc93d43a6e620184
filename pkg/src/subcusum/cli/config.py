from __future__ import annotations
import configparser
import math
import re
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from subcusum.detectors.detector import DetectorKind
from subcusum.eigen.top_eigen import DEFAULT_MAX_ITER, DEFAULT_TOL
from subcusum.model.scenario import Flavor, Scenario
from subcusum.montecarlo.spec import CalibrationSpec, DetectorConfig
from subcusum.utils.helpers import basis_vector, random_unit_vector, replication_rng
from subcusum.utils.types import ConfigError, SubspaceCusumError

# replication indices never reach these, so random directions get streams of their own
DIRECTION_STREAMS = {"u": 2**40, "u1": 2**40 + 1, "u2": 2**40 + 2}
NO_DETECTOR = "none"
AUTO = "auto"
CALIBRATE = "calibrate"


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _format_bool(value: bool) -> str:
    return "true" if value else "false"


def _parse_floats(text: str) -> Tuple[float, ...]:
    values = tuple(float(item) for item in text.split(",") if item.strip())
    if not values:
        raise ValueError("expected a comma separated list of numbers")
    return values


def _parse_ints(text: str) -> Tuple[int, ...]:
    """Comma separated integers, where an item "a-b" stands for a, a+1, ..., b."""
    values: List[int] = []
    for item in text.split(","):
        item = item.strip()
        if not item or item.lower() == NO_DETECTOR:
            continue
        match = re.fullmatch(r"(\d+)\s*-\s*(\d+)", item)
        if match:
            lo, hi = int(match.group(1)), int(match.group(2))
            if lo > hi:
                raise ValueError(f"empty range {item!r}")
            values.extend(range(lo, hi + 1))
        else:
            values.append(int(item))
    return tuple(values)


def _format_list(values: Iterable) -> str:
    return ",".join(repr(value) for value in values)


def _parse_optional(keyword: str, parse: Callable[[str], object]) -> Callable[[str], object]:
    def parser(text: str):
        if text.strip().lower() == keyword:
            return None
        return parse(text)

    return parser


def _format_optional(keyword: str) -> Callable[[object], str]:
    def formatter(value) -> str:
        return keyword if value is None else repr(value)

    return formatter


def _parse_kind(text: str) -> str:
    lowered = text.strip().lower()
    if lowered == NO_DETECTOR:
        return lowered
    return DetectorKind(lowered).value


def _parse_direction_text(text: str) -> str:
    lowered = text.strip().lower()
    if lowered == "random" or re.fullmatch(r"e\d+", lowered):
        return lowered
    return ",".join(repr(float(item)) for item in lowered.split(","))


def _option(default, parse, fmt=repr, **kwargs):
    return field(default=default, metadata={"parse": parse, "format": fmt}, **kwargs)


def _tuple_option(default, parse):
    return field(
        default_factory=lambda: tuple(default),
        metadata={"parse": parse, "format": _format_list},
    )


def parse_direction(text: str, k: int, seed: int, name: str = "u") -> np.ndarray:
    """Resolves a direction setting to a unit vector of R^k.

    Accepted forms are "random" (drawn from the experiment seed), "e<j>" for the j-th
    standard basis vector (1-based) and a comma separated list of k numbers, which is
    normalized.
    """
    text = text.strip().lower()
    if text == "random":
        return random_unit_vector(k, replication_rng(seed, DIRECTION_STREAMS.get(name, 2**40)))
    match = re.fullmatch(r"e(\d+)", text)
    if match:
        j = int(match.group(1))
        if not 1 <= j <= k:
            raise ValueError(f"basis vector {text} does not exist in dimension {k}")
        return basis_vector(k, j - 1)
    vec = np.array([float(item) for item in text.split(",")])
    if len(vec) != k:
        raise ValueError(f"expected {k} coordinates, got {len(vec)}")
    norm = np.linalg.norm(vec)
    if not norm > 0:
        raise ValueError("a direction cannot be the zero vector")
    return vec / norm


@dataclass(frozen=True)
class ScenarioSection:
    flavor: str = _option("emerging", lambda s: Flavor(s.strip().lower()).value, str)
    k: int = _option(5, int)
    sigma2: float = _option(1.0, float)
    theta: float = _option(1.0, float)
    u: str = _option("random", _parse_direction_text, str)
    u1: str = _option("e1", _parse_direction_text, str)
    u2: str = _option("random", _parse_direction_text, str)
    tau: int = _option(0, int)
    reduce: bool = _option(False, _parse_bool, _format_bool)


@dataclass(frozen=True)
class DetectorSection:
    kind: str = _option(
        DetectorKind.SUBSPACE_CUSUM.value,
        _parse_kind,
        str,
    )
    w: int = _option(20, int)
    d: Optional[float] = _option(None, _parse_optional(AUTO, float), _format_optional(AUTO))
    b: Optional[float] = _option(None, _parse_optional(CALIBRATE, float), _format_optional(CALIBRATE))
    eigen_method: str = _option("eigh", lambda s: s.strip().lower(), str)
    tol: float = _option(DEFAULT_TOL, float)
    max_iter: int = _option(DEFAULT_MAX_ITER, int)


@dataclass(frozen=True)
class MonteCarloSection:
    gammas: Tuple[float, ...] = _tuple_option((100.0, 1000.0), _parse_floats)
    reps: int = _option(2000, int)
    rel_tol: float = _option(0.05, float)
    horizon_cap: Optional[int] = _option(None, _parse_optional(AUTO, int), _format_optional(AUTO))
    seed: int = _option(0, int)
    workers: int = _option(1, int)
    windows: Tuple[int, ...] = _tuple_option((20,), _parse_ints)
    w_scan: Tuple[int, ...] = _tuple_option((), _parse_ints)
    largest_eig: bool = _option(True, _parse_bool, _format_bool)


@dataclass(frozen=True)
class OutputSection:
    dir: str = _option("results", str.strip, str)
    horizon: int = _option(1000, int)
    trace: bool = _option(True, _parse_bool, _format_bool)


SECTION_TYPES = {
    "scenario": ScenarioSection,
    "detector": DetectorSection,
    "montecarlo": MonteCarloSection,
    "output": OutputSection,
}


@dataclass(frozen=True)
class ExperimentConfig:
    r"""An experiment as read from a config file.

    The file holds flat `key = value` settings under the sections [scenario], [detector],
    [montecarlo] and [output]; every key is optional. `to_text` writes a file that parses
    back to an equal configuration.

    Parameters:
        scenario: Data model settings. `u` is the emerging direction, `u1`/`u2` the
            switching directions. `reduce` makes `simulate` emit projected samples.
        detector: The monitored procedure, or kind = none. `d = auto` selects the
            optimal drift and `b = calibrate` a Monte Carlo calibrated threshold.
        montecarlo: Target ARL grid, replication count, seed and windows.
        output: Output directory and the stream length of `simulate`.
    """

    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    detector: DetectorSection = field(default_factory=DetectorSection)
    montecarlo: MonteCarloSection = field(default_factory=MonteCarloSection)
    output: OutputSection = field(default_factory=OutputSection)
    lines: Dict[Tuple[str, str], int] = field(
        default_factory=dict, compare=False, repr=False
    )

    @classmethod
    def from_text(
        cls, text: str, overrides: Iterable[str] = ()
    ) -> ExperimentConfig:
        """Parses config text, then applies `section.key=value` overrides."""
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(exc.message.strip(), line=getattr(exc, "lineno", None))
        lines = _line_numbers(text)

        for override in overrides:
            section, key, value = _split_override(override)
            if not parser.has_section(section):
                parser.add_section(section)
            parser.set(section, key, value)
            lines.pop((section, key), None)

        sections = {}
        for section in parser.sections():
            if section not in SECTION_TYPES:
                raise ConfigError(
                    f"unknown section, expected one of {', '.join(SECTION_TYPES)}",
                    section=section,
                    line=lines.get((section, "")),
                )
        for name, section_type in SECTION_TYPES.items():
            values = {}
            known = {f.name: f for f in fields(section_type)}
            if parser.has_section(name):
                for key, raw in parser.items(name):
                    if key not in known:
                        raise ConfigError(
                            "unknown key", section=name, key=key, line=lines.get((name, key))
                        )
                    try:
                        values[key] = known[key].metadata["parse"](raw)
                    except ValueError as exc:
                        raise ConfigError(
                            f"invalid value {raw!r}: {exc}",
                            section=name,
                            key=key,
                            line=lines.get((name, key)),
                        )
            sections[name] = section_type(**values)
        config = cls(lines=lines, **sections)
        config.validate()
        return config

    @classmethod
    def from_file(cls, path, overrides: Iterable[str] = ()) -> ExperimentConfig:
        with open(path) as f:
            return cls.from_text(f.read(), overrides)

    def to_text(self) -> str:
        chunks = []
        for name in SECTION_TYPES:
            section = getattr(self, name)
            chunks.append(f"[{name}]")
            for f in fields(section):
                chunks.append(f"{f.name} = {f.metadata['format'](getattr(section, f.name))}")
            chunks.append("")
        return "\n".join(chunks)

    def with_overrides(
        self,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
        out_dir: Optional[str] = None,
        trace: Optional[bool] = None,
    ) -> ExperimentConfig:
        """Applies the command-line flags, which win over the file."""
        montecarlo = self.montecarlo
        if seed is not None:
            montecarlo = replace(montecarlo, seed=seed)
        if workers is not None:
            montecarlo = replace(montecarlo, workers=workers)
        output = self.output if out_dir is None else replace(self.output, dir=out_dir)
        if trace is not None:
            output = replace(output, trace=trace)
        config = replace(self, montecarlo=montecarlo, output=output)
        config.validate()
        return config

    def _error(self, message: str, section: str, key: Optional[str] = None) -> ConfigError:
        line = self.lines.get((section, key)) if key else self.lines.get((section, ""))
        return ConfigError(message, section=section, key=key, line=line)

    def validate(self) -> None:
        """Builds the scenario and Monte Carlo settings, reporting failures as ConfigError.

        The [detector] section is only checked by `detector_config`, since `tune` and
        `compare` never read it.
        """
        mc = self.montecarlo
        if mc.workers < 1:
            raise self._error("workers must be at least 1", "montecarlo", "workers")
        if any(w < 1 for w in mc.windows + mc.w_scan):
            raise self._error("windows must be positive", "montecarlo", "windows")
        if self.output.horizon < 1:
            raise self._error("horizon must be at least 1", "output", "horizon")
        self.build_scenario()
        for gamma in mc.gammas:
            self.calibration_spec(gamma)

    @property
    def has_detector(self) -> bool:
        return self.detector.kind != NO_DETECTOR

    def direction(self, name: str) -> np.ndarray:
        k = self.scenario.k
        try:
            return parse_direction(getattr(self.scenario, name), k, self.montecarlo.seed, name)
        except ValueError as exc:
            raise self._error(str(exc), "scenario", name)

    def build_scenario(self) -> Scenario:
        sc = self.scenario
        if sc.k < 2:
            raise self._error(f"k must be at least 2, got {sc.k}", "scenario", "k")
        try:
            if sc.flavor == Flavor.SWITCHING.value:
                return Scenario.switching(
                    sc.k, sc.sigma2, sc.theta, self.direction("u1"), self.direction("u2"), sc.tau
                )
            return Scenario.emerging(sc.k, sc.sigma2, sc.theta, self.direction("u"), sc.tau)
        except SubspaceCusumError as exc:
            raise self._error(str(exc), "scenario")

    def detector_config(self, scenario: Optional[Scenario] = None) -> DetectorConfig:
        if not self.has_detector:
            raise self._error("no detector is configured", "detector", "kind")
        det = self.detector
        scenario = scenario or self.build_scenario()
        kind = DetectorKind(det.kind)
        try:
            config = DetectorConfig(
                kind,
                scenario,
                w=None if kind is DetectorKind.EXACT_CUSUM else det.w,
                d=det.d,
                eigen_method=det.eigen_method,
                tol=det.tol,
                max_iter=det.max_iter,
            )
            if kind is DetectorKind.SUBSPACE_CUSUM:
                config.drift()
        except SubspaceCusumError as exc:
            raise self._error(str(exc), "detector")
        return config

    def calibration_spec(self, gamma: Optional[float] = None) -> CalibrationSpec:
        mc = self.montecarlo
        if gamma is None:
            gamma = mc.gammas[0]
        try:
            return CalibrationSpec(
                target_gamma=gamma,
                rel_tol=mc.rel_tol,
                reps=mc.reps,
                horizon_cap=mc.horizon_cap,
                master_seed=mc.seed,
            )
        except SubspaceCusumError as exc:
            raise self._error(str(exc), "montecarlo")


def _line_numbers(text: str) -> Dict[Tuple[str, str], int]:
    """Maps (section, key) to the 1-based line defining it; (section, "") is the header."""
    lines: Dict[Tuple[str, str], int] = {}
    section = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped[0] in "#;":
            continue
        header = re.fullmatch(r"\[([^\]]+)\]", stripped)
        if header:
            section = header.group(1).strip()
            lines[(section, "")] = number
        elif section is not None and not line[0].isspace():
            key = re.split(r"[=:]", stripped, maxsplit=1)[0].strip().lower()
            lines[(section, key)] = number
    return lines


def _split_override(override: str) -> Tuple[str, str, str]:
    match = re.fullmatch(r"\s*([A-Za-z_]+)\.([A-Za-z_0-9]+)\s*=(.*)", override)
    if not match:
        raise ConfigError(f"override {override!r} is not of the form section.key=value")
    return match.group(1).lower(), match.group(2).lower(), match.group(3).strip()


def fmt_gamma(gamma: float) -> str:
    """File name fragment for a target ARL, e.g. 1000 -> "1000", 1e8 -> "1e+08"."""
    return f"{gamma:g}" if math.isfinite(gamma) else str(gamma)
