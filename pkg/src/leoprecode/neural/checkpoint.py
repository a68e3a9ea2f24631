"""Byte-reproducible checkpoint container.

Layout (format version 1): an uncompressed ZIP archive whose members are

* ``meta.json`` -- UTF-8 JSON, keys sorted, holding ``format_version`` and
  any non-array metadata (architectures, configs, counters);
* ``<name>.npy`` -- one NPY (v1.0) file per array, little-endian float64 or
  int64, written in sorted name order.

Every member carries the fixed timestamp 1980-01-01 00:00:00 so identical
content always yields identical bytes. Arrays round-trip bit-exactly.
"""

from __future__ import annotations

import io
import json
import zipfile
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1
_EPOCH = (1980, 1, 1, 0, 0, 0)


def _member(name: str) -> zipfile.ZipInfo:
    info = zipfile.ZipInfo(name, date_time=_EPOCH)
    info.compress_type = zipfile.ZIP_STORED
    info.external_attr = 0o644 << 16
    return info


def save_container(path: str | Path, arrays: dict[str, np.ndarray], meta: dict) -> None:
    meta = {**meta, "format_version": FORMAT_VERSION}
    with zipfile.ZipFile(path, "w", zipfile.ZIP_STORED) as zf:
        zf.writestr(_member("meta.json"), json.dumps(meta, sort_keys=True, indent=1))
        for name in sorted(arrays):
            arr = np.asarray(arrays[name])
            if arr.dtype.kind == "f":
                arr = arr.astype("<f8")
            elif arr.dtype.kind in "iub":
                arr = arr.astype("<i8")
            buf = io.BytesIO()
            np.lib.format.write_array(buf, np.ascontiguousarray(arr), version=(1, 0),
                                      allow_pickle=False)
            zf.writestr(_member(f"{name}.npy"), buf.getvalue())


def load_container(path: str | Path) -> tuple[dict[str, np.ndarray], dict]:
    arrays = {}
    with zipfile.ZipFile(path) as zf:
        meta = json.loads(zf.read("meta.json"))
        for name in zf.namelist():
            if name.endswith(".npy"):
                arrays[name[:-4]] = np.lib.format.read_array(io.BytesIO(zf.read(name)),
                                                             allow_pickle=False)
    if meta.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint format {meta.get('format_version')!r}")
    return arrays, meta
