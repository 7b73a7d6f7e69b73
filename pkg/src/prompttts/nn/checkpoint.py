"""Checkpoint format: text header of names/shapes, then little-endian float32 data."""
from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

MAGIC = "PTTS-CKPT v1"


def save_checkpoint(path, tensors: dict[str, torch.Tensor]) -> str:
    """Write a flat map of named tensors."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(tensors)
    header = [MAGIC, f"tensors {len(names)}"]
    payload = []
    for name in names:
        t = tensors[name].detach().cpu().to(torch.float32)
        shape = "x".join(str(d) for d in t.shape) or "scalar"
        header.append(f"{name} {shape}")
        payload.append(t.numpy().astype("<f4").tobytes())
    with open(path, "wb") as f:
        f.write(("\n".join(header) + "\n\n").encode("utf-8"))
        for chunk in payload:
            f.write(chunk)
    return str(path)


def load_checkpoint(path) -> dict[str, torch.Tensor]:
    raw = Path(path).read_bytes()
    head_end = raw.index(b"\n\n")
    lines = raw[:head_end].decode("utf-8").splitlines()
    if not lines or lines[0] != MAGIC:
        raise ValueError(f"{path}: not a checkpoint file")
    count = int(lines[1].split()[1])
    entries = []
    for line in lines[2:2 + count]:
        name, shape_s = line.rsplit(" ", 1)
        shape = () if shape_s == "scalar" else tuple(int(d) for d in shape_s.split("x"))
        entries.append((name, shape))
    out = {}
    offset = head_end + 2
    for name, shape in entries:
        n = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(raw, dtype="<f4", count=n, offset=offset)
        offset += 4 * n
        out[name] = torch.from_numpy(arr.copy()).reshape(shape)
    if offset != len(raw):
        raise ValueError(f"{path}: {len(raw) - offset} trailing bytes after tensor data")
    return out
