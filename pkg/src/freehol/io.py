"""JSON files for series and operator tuples.

Series::

    {"n": 2, "q": 1, "max_degree": 3,
     "coeffs": [{"word": [1, 2], "re": [[1.0]], "im": [[0.0]]}, ...],
     "tail": null | {"c": 1.0, "t": 0.5}}

Tuples::

    {"n": 2, "d": 3, "mats": [{"re": [[...]], "im": [[...]]}, ...]}

Only nonzero coefficients are written, in degree-then-lexicographic order, so
equal series serialize to identical bytes.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .series import FreeSeries, Tail


def _split(a: np.ndarray) -> dict:
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def _join(d: dict) -> np.ndarray:
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
    return re + 1j * im


def series_to_dict(F: FreeSeries) -> dict:
    return {
        "n": F.n,
        "q": F.q,
        "max_degree": F.degree,
        "coeffs": [{"word": list(w), **_split(a)} for w, a in F.items()],
        "tail": None if F.tail is None else {"c": F.tail.c, "t": F.tail.t},
    }


def series_from_dict(d: dict) -> FreeSeries:
    n, q, D = int(d["n"]), int(d.get("q", 1)), int(d["max_degree"])
    coeffs = {}
    for entry in d["coeffs"]:
        a = _join(entry)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        coeffs[tuple(entry["word"])] = a
    tail = d.get("tail")
    tail = None if tail is None else Tail(float(tail["c"]), float(tail["t"]))
    return FreeSeries.from_dict(coeffs, n, q, D, tail)


def dumps_series(F: FreeSeries) -> str:
    return json.dumps(series_to_dict(F), sort_keys=True)


def write_series(F: FreeSeries, path) -> None:
    Path(path).write_text(dumps_series(F) + "\n", encoding="utf-8")


def read_series(path) -> FreeSeries:
    return series_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def tuple_to_dict(mats: np.ndarray) -> dict:
    mats = np.asarray(mats, dtype=complex)
    return {"n": mats.shape[0], "d": mats.shape[1], "mats": [_split(m) for m in mats]}


def tuple_from_dict(d: dict) -> np.ndarray:
    mats = np.array([_join(m) for m in d["mats"]], dtype=complex)
    n, dim = int(d["n"]), int(d["d"])
    if mats.shape != (n, dim, dim):
        raise ValueError(f"tuple file declares n={n}, d={dim} but holds {mats.shape}")
    return mats


def write_tuple(mats, path) -> None:
    Path(path).write_text(json.dumps(tuple_to_dict(mats), sort_keys=True) + "\n", encoding="utf-8")


def read_tuple(path) -> np.ndarray:
    return tuple_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
