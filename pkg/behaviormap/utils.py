# src/behaviormap/utils.py

import datetime
import os
import re
from pathlib import Path
from typing import Optional, TextIO

from .defaults import MAX_WORKERS


def sanitize_token(s: str) -> str:
    if not s:
        return "map"
    s = s.replace(" ", "_")
    s = re.sub(r"[:\\/]+", "_", s)
    s = re.sub(r"[^A-Za-z0-9_\-\.]", "", s)
    s = re.sub(r"_+", "_", s).strip("_")
    return s or "map"


def timestamp() -> str:
    return datetime.datetime.now().strftime("%Y-%m-%d_%H%M%S")


def ensure_dir(p: Path) -> None:
    p.mkdir(parents=True, exist_ok=True)


def ensure_parent(path: Path) -> Path:
    path = Path(path)
    if path.parent != Path(""):
        ensure_dir(path.parent)
    return path


def make_unique_path(base_path: Path) -> Path:
    if not base_path.exists():
        return base_path
    i = 1
    while True:
        p = base_path.with_name(f"{base_path.stem}-{i}{base_path.suffix}")
        if not p.exists():
            return p
        i += 1


def default_workers() -> int:
    """Worker count: ``ATLAS_THREADS`` if set to a positive int, else min(8, cpus)."""
    cpus = os.cpu_count() or 1
    raw = os.getenv("ATLAS_THREADS")
    if raw is not None:
        try:
            n = int(raw)
            if n >= 1:
                return n
        except ValueError:
            pass
    return max(1, min(MAX_WORKERS, cpus))


def open_run_log(path: Optional[Path]) -> Optional[TextIO]:
    """Open the per-run log for append; None when unset or unwritable."""
    if path is None:
        return None
    try:
        return ensure_parent(Path(path)).open("a", encoding="utf-8")
    except OSError:
        return None


def log_line(log_fp: Optional[TextIO], message: str) -> None:
    if log_fp is None:
        return
    try:
        log_fp.write(f"[{datetime.datetime.now().isoformat()}] {message}\n")
        log_fp.flush()
    except Exception:
        pass
