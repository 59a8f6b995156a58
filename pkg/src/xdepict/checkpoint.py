"""Bit-exact checkpoint persistence.

Container layout: magic ``XDPT1\\n``, an 8-byte little-endian header
length, a UTF-8 JSON header (arch config, head kind, training meta, tensor
manifest), then raw little-endian float32 payloads concatenated in manifest
order. Saving the same model twice produces byte-identical files.
"""

import hashlib
import json
import struct
from dataclasses import dataclass

import numpy as np

from .resnet import ArchConfig, Model

MAGIC = b"XDPT1\n"


class CheckpointError(ValueError):
    """Raised for malformed, truncated, or mismatched checkpoint files."""


@dataclass
class Checkpoint:
    arch: ArchConfig
    head_kind: str
    named_params: dict  # name -> np.ndarray float32
    training_meta: dict
    bn_batches_seen: dict  # bn layer name -> int


def checkpoint_from_model(model: Model) -> Checkpoint:
    named = {}
    for name in model.param_order:
        named[name] = model.params[name].data.astype(np.float32, copy=True)
    for bn_name, state in sorted(model.bn_states.items()):
        named[f"{bn_name}.running_mean"] = state.running_mean.astype(np.float32, copy=True)
        named[f"{bn_name}.running_var"] = state.running_var.astype(np.float32, copy=True)
    return Checkpoint(
        arch=model.arch,
        head_kind=model.head_kind,
        named_params=named,
        training_meta=dict(model.training_meta),
        bn_batches_seen={n: s.batches_seen for n, s in sorted(model.bn_states.items())},
    )


def model_from_checkpoint(ckpt: Checkpoint) -> Model:
    """Rebuild a model whose parameters are exact copies of the checkpoint."""
    model = Model(ckpt.arch, ckpt.head_kind, seed=ckpt.training_meta.get("seed", 0))
    expected = set(model.param_order)
    for bn_name in model.bn_states:
        expected.add(f"{bn_name}.running_mean")
        expected.add(f"{bn_name}.running_var")
    stored = set(ckpt.named_params)
    if stored != expected:
        missing = sorted(expected - stored)[:3]
        extra = sorted(stored - expected)[:3]
        raise CheckpointError(
            f"checkpoint does not match architecture (missing={missing}, unexpected={extra})"
        )
    for name in model.param_order:
        value = ckpt.named_params[name]
        if value.shape != model.params[name].data.shape:
            raise CheckpointError(
                f"tensor {name!r} has shape {value.shape}, "
                f"architecture implies {model.params[name].data.shape}"
            )
        model.params[name].data = value.copy()
    for bn_name, state in model.bn_states.items():
        state.running_mean = ckpt.named_params[f"{bn_name}.running_mean"].copy()
        state.running_var = ckpt.named_params[f"{bn_name}.running_var"].copy()
        state.batches_seen = int(ckpt.bn_batches_seen.get(bn_name, 0))
    model.training_meta = dict(ckpt.training_meta)
    return model


def _encode(ckpt: Checkpoint) -> bytes:
    manifest = []
    payload = bytearray()
    for name in sorted(ckpt.named_params):
        arr = np.ascontiguousarray(ckpt.named_params[name], dtype="<f4")
        buf = arr.tobytes()
        manifest.append(
            {
                "name": name,
                "shape": list(arr.shape),
                "dtype": "f32",
                "offset": len(payload),
                "nbytes": len(buf),
            }
        )
        payload.extend(buf)
    header = {
        "arch": ckpt.arch.to_dict(),
        "head_kind": ckpt.head_kind,
        "training_meta": ckpt.training_meta,
        "bn_batches_seen": ckpt.bn_batches_seen,
        "tensors": manifest,
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return MAGIC + struct.pack("<Q", len(header_bytes)) + header_bytes + bytes(payload)


def save_checkpoint(model_or_ckpt, path) -> None:
    ckpt = (
        model_or_ckpt
        if isinstance(model_or_ckpt, Checkpoint)
        else checkpoint_from_model(model_or_ckpt)
    )
    with open(path, "wb") as fh:
        fh.write(_encode(ckpt))


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as fh:
        blob = fh.read()
    if not blob.startswith(MAGIC):
        raise CheckpointError(f"{path}: bad magic, not a checkpoint file")
    off = len(MAGIC)
    if len(blob) < off + 8:
        raise CheckpointError(f"{path}: truncated header length")
    (header_len,) = struct.unpack("<Q", blob[off : off + 8])
    off += 8
    if len(blob) < off + header_len:
        raise CheckpointError(f"{path}: truncated header")
    try:
        header = json.loads(blob[off : off + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: unparseable header: {exc}") from exc
    payload = blob[off + header_len :]
    named = {}
    for entry in header["tensors"]:
        if entry["dtype"] != "f32":
            raise CheckpointError(f"tensor {entry['name']!r}: unsupported dtype {entry['dtype']}")
        start, nbytes = entry["offset"], entry["nbytes"]
        expected = int(np.prod(entry["shape"], dtype=np.int64)) * 4 if entry["shape"] else 4
        if nbytes != expected:
            raise CheckpointError(
                f"tensor {entry['name']!r}: manifest nbytes {nbytes} != shape implies {expected}"
            )
        if start + nbytes > len(payload):
            raise CheckpointError(f"tensor {entry['name']!r}: payload truncated")
        arr = np.frombuffer(payload[start : start + nbytes], dtype="<f4").reshape(entry["shape"])
        named[entry["name"]] = arr.astype(np.float32)
    return Checkpoint(
        arch=ArchConfig.from_dict(header["arch"]),
        head_kind=header["head_kind"],
        named_params=named,
        training_meta=header["training_meta"],
        bn_batches_seen={k: int(v) for k, v in header["bn_batches_seen"].items()},
    )


def file_digest(path) -> str:
    """Short content hash used as a checkpoint identifier."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:16]
