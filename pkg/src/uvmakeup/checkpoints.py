"""Versioned checkpoint container shared by both trainable branches.

A checkpoint is a torch-serialized dict with a self-describing header:
format name, format version, model kind ("color" / "pattern"), iteration
counter, parameter and optimizer state, and a free-form meta block holding
whatever the model needs to rebuild itself (widths, masks, loss weights).
"""

from pathlib import Path

import torch

from .errors import CheckpointError

FORMAT_NAME = "uvmakeup-checkpoint"
FORMAT_VERSION = 1


def save_checkpoint(path, kind, model_state, optimizer_state=None, iteration=0, meta=None):
    payload = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": kind,
        "iteration": int(iteration),
        "model_state": model_state,
        "optimizer_state": optimizer_state,
        "meta": meta or {},
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(payload, path)
    return path


def load_checkpoint(path, expected_kind=None):
    try:
        payload = torch.load(path, map_location="cpu", weights_only=False)
    except Exception as exc:
        raise CheckpointError("unreadable checkpoint %s: %s" % (path, exc)) from exc
    if not isinstance(payload, dict) or payload.get("format") != FORMAT_NAME:
        raise CheckpointError("%s is not a %s file" % (path, FORMAT_NAME))
    if payload.get("version") != FORMAT_VERSION:
        raise CheckpointError(
            "checkpoint version %r unsupported (want %d)"
            % (payload.get("version"), FORMAT_VERSION)
        )
    if expected_kind is not None and payload.get("kind") != expected_kind:
        raise CheckpointError(
            "checkpoint kind %r, expected %r" % (payload.get("kind"), expected_kind)
        )
    return payload
