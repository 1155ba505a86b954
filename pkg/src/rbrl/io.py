"""Model files.

Binary layout (all little-endian, version 1)::

    offset  type        field
    0       4 bytes     magic  b"RBRL"
    4       uint16      format version
    6       uint8       model kind      0 = linear, 1 = kernel
    7       uint8       kernel kind     0 = none, 1 = linear, 2 = rbf
    8       float64     rbf gamma (0 when unused)
    16      uint32      parameter rows  (m + 1 for linear, n for kernel)
    20      uint32      parameter cols  (l)
    24      uint32      retained training rows     (0 for linear)
    28      uint32      retained training columns  (0 for linear)
    32      float64[]   parameter matrix, row-major
    ...     float64[]   retained training features, row-major

The textual alternative is JSON with the same fields; files whose name ends in
``.json`` use it. Floats in JSON are written with round-trip precision.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .core import KernelModel, LinearModel
from .errors import ParseError, VersionMismatch
from .kernel import KernelSpec

MAGIC = b"RBRL"
FORMAT_VERSION = 1
_HEAD = struct.Struct("<4sHBBdIIII")
_KERNEL_CODES = {None: 0, "linear": 1, "rbf": 2}
_KERNEL_NAMES = {v: k for k, v in _KERNEL_CODES.items()}


def _fields(model):
    if isinstance(model, LinearModel):
        return 0, None, model.weights, np.zeros((0, 0))
    if isinstance(model, KernelModel):
        return 1, model.kernel, model.coefficients, model.train_features
    raise TypeError(f"not a model: {type(model).__name__}")


def model_to_bytes(model) -> bytes:
    kind, spec, P, T = _fields(model)
    kcode = _KERNEL_CODES[spec.kind if spec else None]
    gamma = float(spec.gamma) if spec is not None and spec.gamma is not None else 0.0
    head = _HEAD.pack(MAGIC, FORMAT_VERSION, kind, kcode, gamma, *P.shape, *T.shape)
    return head + P.astype("<f8").tobytes(order="C") + T.astype("<f8").tobytes(order="C")


def model_from_bytes(buf: bytes):
    if len(buf) < _HEAD.size:
        raise ParseError("model file is truncated")
    magic, version, kind, kcode, gamma, r, c, tr, tc = _HEAD.unpack_from(buf)
    if magic != MAGIC:
        raise ParseError("not a model file (bad magic)")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"model format version {version}, this build reads {FORMAT_VERSION}")
    expected = _HEAD.size + 8 * (r * c + tr * tc)
    if len(buf) != expected:
        raise ParseError(f"model file has {len(buf)} bytes, expected {expected}")
    P = np.frombuffer(buf, "<f8", r * c, _HEAD.size).reshape(r, c)
    T = np.frombuffer(buf, "<f8", tr * tc, _HEAD.size + 8 * r * c).reshape(tr, tc)
    return _build(kind, kcode, gamma, P, T)


def _build(kind, kcode, gamma, P, T):
    if kind == 0:
        return LinearModel(P)
    if kind != 1 or kcode not in (1, 2):
        raise ParseError(f"unknown model kind {kind} / kernel code {kcode}")
    name = _KERNEL_NAMES[kcode]
    spec = KernelSpec(name, gamma if name == "rbf" else None)
    return KernelModel(P, spec, T)


def model_to_json(model) -> str:
    kind, spec, P, T = _fields(model)
    doc = {"format": "rbrl-model", "version": FORMAT_VERSION,
           "kind": "linear" if kind == 0 else "kernel",
           "kernel": None if spec is None else {"kind": spec.kind, "gamma": spec.gamma},
           "parameters": P.tolist()}
    if kind == 1:
        doc["train_features"] = T.tolist()
    return json.dumps(doc)


def model_from_json(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc), exc.lineno, exc.colno) from exc
    if doc.get("format") != "rbrl-model":
        raise ParseError("not a model file (missing format tag)")
    if doc.get("version") != FORMAT_VERSION:
        raise VersionMismatch(
            f"model format version {doc.get('version')}, this build reads {FORMAT_VERSION}")
    P = np.array(doc["parameters"], dtype=float)
    if doc["kind"] == "linear":
        return LinearModel(P)
    k = doc["kernel"]
    return KernelModel(P, KernelSpec(k["kind"], k["gamma"]), np.array(doc["train_features"], dtype=float))


def save_model(model, path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(model_to_json(model), encoding="utf-8")
    else:
        path.write_bytes(model_to_bytes(model))


def load_model(path):
    path = Path(path)
    try:
        if path.suffix == ".json":
            return model_from_json(path.read_text(encoding="utf-8"))
        return model_from_bytes(path.read_bytes())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
