"""Constrained diversity search over Gray-Scott and Lenia parameter spaces."""

import csv
import io
import json

from . import _core
from ._core import (
    InsufficientHistory,
    UnknownFeature,
    ValidationError,
    acceptance_rate,
    behavior,
    bins_per_dim,
    constraint_features,
    diversity,
    encode_png,
    haralick,
    hu_moments,
    is_homogeneous,
    mean_pixel,
    parameter_space,
    volume,
)

__all__ = [
    "InsufficientHistory",
    "UnknownFeature",
    "ValidationError",
    "acceptance_rate",
    "behavior",
    "bins_per_dim",
    "constraint_features",
    "diversity",
    "encode_png",
    "explore",
    "haralick",
    "hu_moments",
    "is_homogeneous",
    "mean_pixel",
    "parameter_space",
    "rollout",
    "run_plan",
    "summarize",
    "volume",
]


def _system_json(system, settings):
    spec = {"system": system}
    if settings:
        spec[system] = settings
    return json.dumps(spec)


def rollout(system, params, seed=0, **settings):
    """Final observation of one rollout as a 2-D float array, plus the invalid flag."""
    return _core.rollout(_system_json(system, settings), list(params), seed)


def explore(system="gray_scott", config=None, roi=None, **settings):
    """Run one exploration; returns the history as a list of dicts."""
    text = _core.explore(_system_json(system, settings), json.dumps(config or {}),
                         json.dumps(roi) if roi is not None else "")
    return [json.loads(line) for line in text.splitlines() if line]


def _rows(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    for row in rows:
        for key, value in row.items():
            if key != "label":
                row[key] = float(value)
    return rows


def run_plan(plan, output_dir="", sweep=False):
    """Run an experiment plan (dict, as in a plan file); returns the summary rows."""
    return _rows(_core.run_plan(json.dumps(plan), str(output_dir), sweep))


def summarize(directory):
    return _rows(_core.summarize(str(directory)))
