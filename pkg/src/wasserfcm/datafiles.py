"""CSV dataset files and INI-style run configuration.

A dataset file stores one fuzzy vector per row with three columns per
feature, ``<name>_c``, ``<name>_l`` and ``<name>_r``, plus an optional
trailing integer ``label`` column.  Transformed (crisp) files use the
suffixes ``_t1``/``_t2``/``_t3`` instead.  Values are written with 17
significant digits so a write/read round trip reproduces doubles exactly.

Configuration lives in a flat INI file: a ``[run]`` section for
clustering commands and any number of ``[scenario:<name>]`` sections for
the simulation command.  Unknown keys are rejected; missing keys fall
back to defaults with a logged notice.
"""

from __future__ import annotations

import configparser
import csv
import logging
from dataclasses import dataclass

import numpy as np

from .clustering import ENGINES, RunConfig
from .fuzzy import FuzzyVector, TriangularFuzzyNumber
from .simulate import CASES, ScenarioSpec

__all__ = [
    "read_dataset",
    "write_dataset",
    "read_transformed",
    "write_transformed",
    "read_run_config",
    "read_scenarios",
    "ScenarioRun",
    "default_feature_names",
]

logger = logging.getLogger(__name__)

DATASET_SUFFIXES = ("_c", "_l", "_r")
TRANSFORMED_SUFFIXES = ("_t1", "_t2", "_t3")
LABEL_COLUMN = "label"

_FLOAT_FORMAT = "{:.17g}"  # shortest form guaranteeing exact float64 round trip

RUN_SECTION = "run"
SCENARIO_PREFIX = "scenario:"

_RUN_DEFAULTS = {
    "engine": "approach1",
    "clusters": "2",
    "m": "2.0",
    "q": "1.0",
    "omega": "200.0",
    "epsilon": "1e-6",
    "max_iter": "300",
    "seed": "0",
}

_SCENARIO_DEFAULTS = {
    "case": "alpha",
    "outliers": "false",
    "n": "50",
    "p": "2",
    "theta": "1.5",
    "h": "1.0",
    "m": "2.0",
    "omega": "200.0",
    "replications": "1",
    "seed": "0",
    "n_includes_outliers": "false",
    "engine": "approach1",
    "clusters": "2",
    "epsilon": "1e-6",
    "max_iter": "300",
}
# q defaults to 1 for clean scenarios and 2 for contaminated ones.
_SCENARIO_KEYS = set(_SCENARIO_DEFAULTS) | {"q"}


def default_feature_names(p: int) -> list[str]:
    return [f"x{j + 1}" for j in range(p)]


def _parse_triplet_header(fields: list[str], suffixes: tuple[str, str, str],
                          path) -> tuple[list[str], bool]:
    """Feature names from a header of per-feature column triplets."""
    fields = [f.strip() for f in fields]
    has_label = bool(fields) and fields[-1] == LABEL_COLUMN
    if has_label:
        fields = fields[:-1]
    if not fields or len(fields) % 3 != 0:
        raise ValueError(
            f"{path}: header must hold three columns per feature, "
            f"got {len(fields)}")
    names = []
    for j in range(len(fields) // 3):
        triple = fields[3 * j:3 * j + 3]
        base = triple[0]
        if not base.endswith(suffixes[0]):
            raise ValueError(
                f"{path}: column {triple[0]!r} should end with "
                f"{suffixes[0]!r}")
        base = base[:-len(suffixes[0])]
        expected = [base + s for s in suffixes]
        if triple != expected:
            raise ValueError(
                f"{path}: columns {triple} should read {expected}")
        names.append(base)
    return names, has_label


def _parse_float(cell: str, path, row: int, column: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise ValueError(
            f"{path}: row {row}, column {column}: {cell!r} is not a number"
        ) from None


def read_dataset(path) -> tuple[list[FuzzyVector], list[int] | None, list[str]]:
    """Load fuzzy vectors (and optional labels) from a dataset file.

    Returns the vectors, the labels or ``None``, and the feature names
    from the header.  Malformed rows and negative spreads fail with the
    offending row (and column) named.
    """
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        names, has_label = _parse_triplet_header(header, DATASET_SUFFIXES, path)
        width = 3 * len(names) + (1 if has_label else 0)
        vectors: list[FuzzyVector] = []
        labels: list[int] | None = [] if has_label else None
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise ValueError(
                    f"{path}: row {row_no}: expected {width} fields, "
                    f"got {len(row)}")
            triples = []
            for j, name in enumerate(names):
                c = _parse_float(row[3 * j], path, row_no, name + "_c")
                l = _parse_float(row[3 * j + 1], path, row_no, name + "_l")
                r = _parse_float(row[3 * j + 2], path, row_no, name + "_r")
                if l < 0.0:
                    raise ValueError(
                        f"{path}: row {row_no}, column {name}_l: "
                        f"negative spread {l}")
                if r < 0.0:
                    raise ValueError(
                        f"{path}: row {row_no}, column {name}_r: "
                        f"negative spread {r}")
                triples.append(TriangularFuzzyNumber(c, l, r))
            vectors.append(FuzzyVector(tuple(triples)))
            if has_label:
                try:
                    labels.append(int(row[-1]))
                except ValueError:
                    raise ValueError(
                        f"{path}: row {row_no}: label {row[-1]!r} is not an "
                        f"integer") from None
    if not vectors:
        raise ValueError(f"{path}: no data rows")
    return vectors, labels, names


def write_dataset(path, vectors, labels=None, feature_names=None) -> None:
    """Write fuzzy vectors (and optional integer labels) to a dataset file."""
    vectors = list(vectors)
    if not vectors:
        raise ValueError("nothing to write")
    p = len(vectors[0])
    if any(len(v) != p for v in vectors):
        raise ValueError("vectors mix dimensions")
    names = list(feature_names) if feature_names else default_feature_names(p)
    if len(names) != p:
        raise ValueError(f"expected {p} feature names, got {len(names)}")
    if labels is not None and len(labels) != len(vectors):
        raise ValueError("labels do not match the number of vectors")
    header = [name + s for name in names for s in DATASET_SUFFIXES]
    if labels is not None:
        header.append(LABEL_COLUMN)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for i, vector in enumerate(vectors):
            row = [_FLOAT_FORMAT.format(v) for v in vector.to_array()]
            if labels is not None:
                row.append(str(int(labels[i])))
            writer.writerow(row)


def read_transformed(path) -> tuple[np.ndarray, list[str]]:
    """Load a crisp (n, 3p) matrix written by :func:`write_transformed`."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        names, has_label = _parse_triplet_header(header, TRANSFORMED_SUFFIXES,
                                                 path)
        if has_label:
            raise ValueError(f"{path}: transformed files carry no labels")
        width = 3 * len(names)
        rows = []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise ValueError(
                    f"{path}: row {row_no}: expected {width} fields, "
                    f"got {len(row)}")
            rows.append([_parse_float(cell, path, row_no, header[j])
                         for j, cell in enumerate(row)])
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.array(rows), names


def write_transformed(path, matrix, feature_names=None) -> None:
    """Write a crisp (n, 3p) matrix with per-feature column triplets."""
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.size == 0 or arr.shape[1] % 3 != 0:
        raise ValueError("expected a non-empty (n, 3p) matrix")
    p = arr.shape[1] // 3
    names = list(feature_names) if feature_names else default_feature_names(p)
    if len(names) != p:
        raise ValueError(f"expected {p} feature names, got {len(names)}")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([name + s for name in names
                         for s in TRANSFORMED_SUFFIXES])
        for row in arr:
            writer.writerow([_FLOAT_FORMAT.format(v) for v in row])


def _read_ini(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    with open(path) as handle:
        parser.read_file(handle)
    return parser


def _section_values(section, allowed: set[str], defaults: dict[str, str],
                    where: str) -> dict[str, str]:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ValueError(f"{where}: unknown keys {unknown}")
    values = {}
    for key in sorted(allowed):
        if key in section:
            values[key] = section[key]
        elif key in defaults:
            values[key] = defaults[key]
            logger.info("%s: %s defaulted to %s", where, key, defaults[key])
    return values


def read_run_config(path) -> RunConfig:
    """Clustering hyperparameters from the ``[run]`` section."""
    parser = _read_ini(path)
    if not parser.has_section(RUN_SECTION):
        raise ValueError(f"{path}: missing [{RUN_SECTION}] section")
    values = _section_values(parser[RUN_SECTION], set(_RUN_DEFAULTS),
                             _RUN_DEFAULTS, f"{path} [{RUN_SECTION}]")
    if values["engine"] not in ENGINES:
        raise ValueError(
            f"{path}: engine must be one of {ENGINES}, got {values['engine']!r}")
    return RunConfig(
        clusters=int(values["clusters"]),
        fuzzifier=float(values["m"]),
        weight_exponent=float(values["q"]),
        weight_budget=float(values["omega"]),
        tolerance=float(values["epsilon"]),
        max_iter=int(values["max_iter"]),
        seed=int(values["seed"]),
        engine=values["engine"],
    )


@dataclass(frozen=True)
class ScenarioRun:
    """A named scenario cell plus the engine settings used to run it."""

    name: str
    spec: ScenarioSpec
    engine: str
    clusters: int
    tolerance: float
    max_iter: int


def read_scenarios(path) -> list[ScenarioRun]:
    """All ``[scenario:<name>]`` sections of a config file, in file order."""
    parser = _read_ini(path)
    runs = []
    for section_name in parser.sections():
        if not section_name.startswith(SCENARIO_PREFIX):
            if section_name == RUN_SECTION:
                continue
            raise ValueError(
                f"{path}: unexpected section [{section_name}]; scenario "
                f"sections start with {SCENARIO_PREFIX!r}")
        name = section_name[len(SCENARIO_PREFIX):].strip()
        if not name:
            raise ValueError(f"{path}: scenario section needs a name")
        where = f"{path} [{section_name}]"
        section = parser[section_name]
        values = _section_values(section, _SCENARIO_KEYS, _SCENARIO_DEFAULTS,
                                 where)
        if values["case"] not in CASES:
            raise ValueError(
                f"{where}: case must be one of {CASES}, got {values['case']!r}")
        if values["engine"] not in ENGINES:
            raise ValueError(
                f"{where}: engine must be one of {ENGINES}, "
                f"got {values['engine']!r}")
        outliers = _parse_bool(values["outliers"], where, "outliers")
        if "q" in values:
            q = float(values["q"])
        else:
            q = 2.0 if outliers else 1.0
            logger.info("%s: q defaulted to %s", where, q)
        spec = ScenarioSpec(
            case=values["case"],
            outliers=outliers,
            n=int(values["n"]),
            p=int(values["p"]),
            theta=float(values["theta"]),
            h=float(values["h"]),
            fuzzifier=float(values["m"]),
            weight_exponent=q,
            weight_budget=float(values["omega"]),
            replications=int(values["replications"]),
            seed=int(values["seed"]),
            n_includes_outliers=_parse_bool(values["n_includes_outliers"],
                                            where, "n_includes_outliers"),
        )
        runs.append(ScenarioRun(
            name=name,
            spec=spec,
            engine=values["engine"],
            clusters=int(values["clusters"]),
            tolerance=float(values["epsilon"]),
            max_iter=int(values["max_iter"]),
        ))
    if not runs:
        raise ValueError(f"{path}: no [scenario:<name>] sections found")
    return runs


def _parse_bool(raw: str, where: str, key: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{where}: {key} must be a boolean, got {raw!r}")
