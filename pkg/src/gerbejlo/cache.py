"""On-disk memoization keyed by (scenario digest, object id).

Values are JSON documents stored one per file under
``<root>/<scenario digest>/<object id>.json``; writes go through a temporary
file and an atomic rename, so concurrent readers never see partial files.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from .exact import field
from .forms import Form

__all__ = ["DiskCache", "default_cache_dir", "form_from_json", "form_to_json"]

_SAFE = re.compile(r"[^A-Za-z0-9._-]+")


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "gerbejlo"


class DiskCache:
    def __init__(self, root: Path | str | None, enabled: bool = True) -> None:
        self.root = Path(root) if root is not None else default_cache_dir()
        self.enabled = enabled
        self.hits = 0
        self.misses = 0

    def _path(self, digest: str, object_id: str) -> Path:
        return self.root / digest / (_SAFE.sub("_", object_id) + ".json")

    def get(self, digest: str, object_id: str) -> Any | None:
        if not self.enabled:
            return None
        path = self._path(digest, object_id)
        try:
            with path.open(encoding="utf-8") as fh:
                value = json.load(fh)
        except (OSError, ValueError):
            return None
        self.hits += 1
        return value

    def put(self, digest: str, object_id: str, value: Any) -> None:
        if not self.enabled:
            return
        path = self._path(digest, object_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(value, fh, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def memo(self, digest: str, object_id: str, compute: Callable[[], Any]) -> Any:
        cached = self.get(digest, object_id)
        if cached is not None:
            return cached
        self.misses += 1
        value = compute()
        self.put(digest, object_id, value)
        return value


def form_to_json(f: Form) -> dict:
    return {
        "m": f.m,
        "k": f.k,
        "order": f.order,
        "terms": sorted(
            [key[0], list(key[1]), list(key[2]), key[3], [str(x) for x in v.coordinates]]
            for key, v in f.terms.items()
        ),
    }


def form_from_json(data: dict) -> Form:
    fld = field(data["order"])
    terms = {}
    for u, four, texp, mask, coords in data["terms"]:
        terms[(u, tuple(four), tuple(texp), mask)] = fld.from_coordinates(Fraction(c) for c in coords)
    return Form(data["m"], data["k"], data["order"], terms)
