"""JSON model files for the command line.

A model file looks like::

    {"n": 3,
     "a": {"mode": "uniform", "lambda": 1.0},
     "b": {"preset": "case-ii", "b12": 1.0, "b13": 2.0}}

``a`` is either ``{"mode": "uniform", "lambda": x}`` (every a_ab equal to
x/n, so x is the nonzero eigenvalue) or ``{"mode": "matrix", "re": ..., "im": ...}``.
``b`` is an explicit ``{"re": ..., "im": ...}`` matrix or one of the presets
``uniform``, ``case-ii``, ``four-sym`` and ``random``. Presets accept an
optional ``diag`` self-coupling shared by all qubits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import CouplingModel, random_coupling
from .encodings import case_ii_couplings, four_symmetric_couplings


class ModelSpecError(ValueError):
    pass


def matrix_from_json(obj, n: int | None = None) -> np.ndarray:
    if isinstance(obj, dict) and "re" in obj:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise ModelSpecError("re and im parts differ in shape")
        m = re + 1j * im
    elif isinstance(obj, list):
        m = np.asarray(obj, dtype=complex)
    else:
        raise ModelSpecError(f"cannot read a matrix from {obj!r}")
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ModelSpecError(f"matrix must be square, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise ModelSpecError(f"matrix is {m.shape[0]}x{m.shape[0]}, model has n={n}")
    if np.max(np.abs(m - m.conj().T)) > 1e-12:
        raise ModelSpecError("matrix is not Hermitian")
    return m


def expand_b(spec, n: int) -> np.ndarray:
    if not isinstance(spec, dict) or "preset" not in spec:
        return matrix_from_json(spec, n)
    preset = spec["preset"]
    diag = float(spec.get("diag", 0.0))
    try:
        if preset == "uniform":
            value = float(spec.get("value", 1.0))
            b = np.full((n, n), value)
            np.fill_diagonal(b, spec.get("diag", value))
            return b
        if preset == "case-ii":
            if n != 3:
                raise ModelSpecError("case-ii preset needs n=3")
            return case_ii_couplings(float(spec["b12"]), float(spec["b13"]), diag)
        if preset == "four-sym":
            if n != 4:
                raise ModelSpecError("four-sym preset needs n=4")
            return four_symmetric_couplings(float(spec["b12"]), float(spec["b34"]),
                                            float(spec["b23"]), float(spec["b24"]), diag)
        if preset == "random":
            rng = np.random.default_rng(int(spec["seed"]))
            return random_coupling(n, rng) * float(spec.get("scale", 1.0))
    except KeyError as exc:
        raise ModelSpecError(f"preset {preset!r} is missing field {exc}") from None
    raise ModelSpecError(f"unknown b preset {preset!r}")


@dataclass(frozen=True)
class ModelSpec:
    n: int
    a: np.ndarray
    b: np.ndarray

    @property
    def model(self) -> CouplingModel:
        return CouplingModel(self.a, self.b)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelSpec":
        if not isinstance(data, dict) or "n" not in data:
            raise ModelSpecError("model spec needs an integer field 'n'")
        n = data["n"]
        if not isinstance(n, int) or n < 1:
            raise ModelSpecError(f"n must be a positive integer, got {n!r}")
        a_spec = data.get("a", {"mode": "uniform", "lambda": 1.0})
        mode = a_spec.get("mode", "uniform") if isinstance(a_spec, dict) else "matrix"
        if mode == "uniform":
            lam = float(a_spec.get("lambda", 1.0))
            if lam < 0:
                raise ModelSpecError("lambda must be nonnegative")
            a = np.full((n, n), lam / n, dtype=complex)
        elif mode == "matrix":
            a = matrix_from_json(a_spec, n)
        else:
            raise ModelSpecError(f"unknown a mode {mode!r}")
        b = expand_b(data.get("b", {"preset": "uniform", "value": 0.0}), n)
        return cls(n, a, np.asarray(b, dtype=complex))


def load_json_arg(text: str):
    """Parse inline JSON (starting with '{' or '[') or read it from a file path."""
    stripped = text.lstrip()
    try:
        if stripped.startswith(("{", "[")):
            return json.loads(stripped)
        return json.loads(Path(text).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelSpecError(f"cannot read JSON from {text!r}: {exc}") from None


def load_model(text: str) -> ModelSpec:
    return ModelSpec.from_dict(load_json_arg(text))
