"""Frozen oracle values: JSON fixture store with git-style content hashes.

Every derived reference number (high-budget Monte Carlo oracles, assembled
constants) lives here with its seed and sample count, so comparisons in the
test suite are reproducible and refreshing the store is a single command.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path

DEFAULT_DIR = Path(__file__).parent / "fixtures"
ENV_VAR = "LAB_FIXTURES"
ORACLE_COMMAND = "lab run configs/oracle_refresh.json --force"


class MissingFixtureError(FileNotFoundError):
    def __init__(self, name: str):
        super().__init__(
            f"fixture {name!r} not found; regenerate the store with: {ORACLE_COMMAND}")
        self.name = name


class FixtureHashError(ValueError):
    pass


def fixture_dir() -> Path:
    return Path(os.environ.get(ENV_VAR, DEFAULT_DIR))


def _canonical(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def content_hash(payload: dict) -> str:
    """Git blob-style sha1 of the canonical JSON payload (hash field excluded)."""
    body = _canonical({k: v for k, v in payload.items() if k != "hash"})
    return hashlib.sha1(b"blob %d\0" % len(body) + body).hexdigest()


@dataclass(frozen=True)
class Fixture:
    name: str
    value: float
    stderr: float
    seed: int
    samples: int
    params: dict

    def payload(self) -> dict:
        d = asdict(self)
        d["hash"] = content_hash(d)
        return d


def save_fixture(fx: Fixture, directory: Path | None = None) -> Path:
    directory = directory or fixture_dir()
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{fx.name}.json"
    path.write_text(json.dumps(fx.payload(), sort_keys=True, indent=2) + "\n")
    return path


def load_fixture(name: str, directory: Path | None = None) -> dict:
    directory = directory or fixture_dir()
    path = directory / f"{name}.json"
    if not path.exists():
        raise MissingFixtureError(name)
    data = json.loads(path.read_text())
    if data.get("hash") != content_hash(data):
        raise FixtureHashError(f"fixture {name!r} content does not match its hash")
    return data


def list_fixtures(directory: Path | None = None) -> list[str]:
    directory = directory or fixture_dir()
    if not directory.exists():
        return []
    return sorted(p.stem for p in directory.glob("*.json"))
