"""Checkpoint files: a JSON manifest plus one raw parameter blob per network.

A checkpoint is a single zip archive holding ``manifest.json`` and a
little-endian float64 blob per network. The manifest records the format
version, each network's layer sizes and output activation, and a free-form
``extras`` dict for run scalars (multipliers, schedule state, step counters).
"""

from __future__ import annotations

import json
import zipfile

import numpy as np

from .nn import Mlp

FORMAT_VERSION = 1

__all__ = ["save_checkpoint", "load_checkpoint", "FORMAT_VERSION"]


def _flatten(net: Mlp) -> np.ndarray:
    parts = []
    for w, b in zip(net.weights, net.biases):
        parts.append(w.reshape(-1))
        parts.append(b)
    return np.concatenate(parts).astype("<f8")


def _unflatten(layer_sizes, blob: np.ndarray, output_activation: str) -> Mlp:
    weights, biases = [], []
    pos = 0
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        weights.append(blob[pos : pos + fan_in * fan_out].reshape(fan_in, fan_out).copy())
        pos += fan_in * fan_out
        biases.append(blob[pos : pos + fan_out].copy())
        pos += fan_out
    if pos != blob.size:
        raise ValueError(f"blob size {blob.size} does not match layer sizes {layer_sizes}")
    return Mlp(layer_sizes, weights, biases, output_activation)


def save_checkpoint(path, nets: dict[str, Mlp], extras: dict | None = None) -> None:
    manifest = {"format_version": FORMAT_VERSION, "networks": {}, "extras": extras or {}}
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        for name, net in nets.items():
            manifest["networks"][name] = {
                "layer_sizes": net.layer_sizes,
                "output_activation": net.output_activation,
                "blob": f"{name}.bin",
            }
            zf.writestr(f"{name}.bin", _flatten(net).tobytes())
        zf.writestr("manifest.json", json.dumps(manifest, indent=2, sort_keys=True))


def load_checkpoint(path):
    """Returns (nets, extras); parameters round-trip bit-exactly."""
    with zipfile.ZipFile(path, "r") as zf:
        manifest = json.loads(zf.read("manifest.json"))
        if manifest.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint format {manifest.get('format_version')!r}")
        nets = {}
        for name, meta in manifest["networks"].items():
            blob = np.frombuffer(zf.read(meta["blob"]), dtype="<f8")
            nets[name] = _unflatten(meta["layer_sizes"], blob, meta["output_activation"])
    return nets, manifest.get("extras", {})
