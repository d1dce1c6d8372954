"""Content-addressed cache for orbit degree sequences.

Orbit degrees are expensive (mod-p iterates reach degree 10**7) but
deterministic given the family, section, direction, depth and orbit
configuration, so they are cached under a hash of exactly those
inputs.  The directory comes from the HEIGHTLAB_CACHE environment
variable; without it only the in-process memo is used.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Optional

_MEMO: dict[str, list] = {}


def cache_dir() -> Optional[Path]:
    root = os.environ.get("HEIGHTLAB_CACHE")
    if not root:
        return None
    path = Path(root)
    path.mkdir(parents=True, exist_ok=True)
    return path


def orbit_key(family_hash: str, section_repr: str, direction: int, n_max: int,
              knobs: dict) -> str:
    blob = json.dumps(
        {
            "family": family_hash,
            "section": section_repr,
            "direction": direction,
            "n_max": n_max,
            "knobs": knobs,
        },
        sort_keys=True,
    ).encode()
    return hashlib.sha256(blob).hexdigest()


def load_orbit(key: str) -> Optional[list]:
    if key in _MEMO:
        return _MEMO[key]
    root = cache_dir()
    if root is None:
        return None
    path = root / f"orbit-{key}.json"
    if not path.exists():
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None
    records = [(int(n), tuple(d), str(e)) for n, d, e in data["records"]]
    _MEMO[key] = records
    return records


def store_orbit(key: str, records: list):
    _MEMO[key] = records
    root = cache_dir()
    if root is None:
        return
    path = root / f"orbit-{key}.json"
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump({"records": [[n, list(d), e] for n, d, e in records]}, fh)
    os.replace(tmp, path)


def clear_memo():
    _MEMO.clear()
