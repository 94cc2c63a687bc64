"""Model files: a structured-text (JSON) serialisation of compiled models.

Every number is stored as a ``num`` or ``num/den`` decimal string; no binary
floats at rest.  ``load`` of a ``save`` is the identity on canonical form.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .arithmetic import format_rational, parse_rational
from .errors import InputFormatError
from .fnn import Fnn, FnnLayer, FnnNode, IDENTITY, RELU
from .ssm import (
    AffineMap,
    DiagonalAffineGate,
    SsmLayer,
    SsmModel,
    TimeInvariantGate,
)

FORMAT_TAG = "ssmverify-model-v1"


def _vec_json(vec) -> list[str]:
    return [format_rational(v) for v in vec]


def _mat_json(mat) -> list[list[str]]:
    return [_vec_json(row) for row in mat]


def _vec_load(data) -> tuple[Fraction, ...]:
    return tuple(parse_rational(v) for v in data)


def _mat_load(data) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(_vec_load(row) for row in data)


def _fnn_json(net: Fnn) -> dict:
    return {
        "layers": [
            [
                {
                    "weights": _vec_json(node.weights),
                    "bias": format_rational(node.bias),
                    "activation": node.activation,
                }
                for node in layer.nodes
            ]
            for layer in net.layers
        ]
    }


def _fnn_load(data) -> Fnn:
    layers = []
    for layer in data["layers"]:
        nodes = []
        for node in layer:
            act = node.get("activation", RELU)
            if act not in (RELU, IDENTITY):
                raise InputFormatError(f"unknown activation {act!r}")
            nodes.append(FnnNode(_vec_load(node["weights"]), parse_rational(node["bias"]), act))
        layers.append(FnnLayer(tuple(nodes)))
    return Fnn(tuple(layers))


def model_to_json(model: SsmModel) -> dict:
    layers = []
    for layer in model.layers:
        if isinstance(layer.gate, TimeInvariantGate):
            gate = {"kind": "time_invariant", "matrix": _mat_json(layer.gate.matrix)}
        else:
            gate = {
                "kind": "diagonal_affine",
                "matrix": _mat_json(layer.gate.matrix),
                "offset": _vec_json(layer.gate.offset),
            }
        layers.append(
            {
                "h0": _vec_json(layer.h0),
                "gate": gate,
                "inc": {
                    "matrix": _mat_json(layer.inc.matrix),
                    "offset": _vec_json(layer.inc.offset),
                },
                "phi": _fnn_json(layer.phi),
            }
        )
    return {
        "format": FORMAT_TAG,
        "alphabet": list(model.alphabet),
        "dimension": model.dim,
        "embedding": [_vec_json(v) for v in model.emb],
        "layers": layers,
        "output": _fnn_json(model.out),
        "metadata": dict(sorted(model.metadata)),
    }


def model_from_json(data: dict) -> SsmModel:
    if data.get("format") != FORMAT_TAG:
        raise InputFormatError(f"not a model file (format tag {data.get('format')!r})")
    layers = []
    for entry in data["layers"]:
        gate_data = entry["gate"]
        if gate_data["kind"] == "time_invariant":
            gate = TimeInvariantGate(_mat_load(gate_data["matrix"]))
        elif gate_data["kind"] == "diagonal_affine":
            gate = DiagonalAffineGate(
                _mat_load(gate_data["matrix"]), _vec_load(gate_data["offset"])
            )
        else:
            raise InputFormatError(f"unknown gate kind {gate_data['kind']!r}")
        layers.append(
            SsmLayer(
                h0=_vec_load(entry["h0"]),
                gate=gate,
                inc=AffineMap(
                    _mat_load(entry["inc"]["matrix"]), _vec_load(entry["inc"]["offset"])
                ),
                phi=_fnn_load(entry["phi"]),
            )
        )
    model = SsmModel(
        alphabet=tuple(data["alphabet"]),
        emb=tuple(_vec_load(v) for v in data["embedding"]),
        layers=tuple(layers),
        out=_fnn_load(data["output"]),
        metadata=tuple(sorted(data.get("metadata", {}).items())),
    )
    if model.dim != data.get("dimension"):
        raise InputFormatError("declared dimension disagrees with the embedding table")
    return model


def save_model(model: SsmModel, path: str):
    with open(path, "w") as fh:
        json.dump(model_to_json(model), fh, indent=1)
        fh.write("\n")


def load_model(path: str) -> SsmModel:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}: not valid JSON: {exc}") from None
    return model_from_json(data)
