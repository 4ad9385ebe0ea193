"""Bundled synthetic instances."""

from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent


def bundled_path(name: str) -> Path | None:
    if not name.endswith(".json"):
        name += ".json"
    p = DATA_DIR / name
    return p if p.exists() else None


def bundled_names() -> list[str]:
    return sorted(p.name for p in DATA_DIR.glob("*.json"))
