"""Key=value configuration files whose keys mirror the command-line flags.

::

    # comments and blank lines are ignored
    code = markov-index
    grid = arcsine
    precision-bits = 64
    backend.gz = zlib
    backend.xz = cmd:xz -9 -c

``backend.<name>`` lines register compressor backends; every other key is
a long flag name without the leading dashes. Flags given on the command
line override the file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .codes import ConfigurationError

KNOWN_KEYS = frozenset(
    {
        "code",
        "tests",
        "grid",
        "precision-bits",
        "json",
        "seed",
        "count-q",
        "anchor",
        "fine-step",
        "threshold",
        "format",
        "window",
        "p-grid",
        "providers",
    }
)


@dataclass
class FileConfig:
    values: dict[str, str] = field(default_factory=dict)
    backends: dict[str, str] = field(default_factory=dict)


def parse_config(text: str, source: str = "<config>") -> FileConfig:
    out = FileConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigurationError(f"{source}:{lineno}: expected key = value")
        if key.startswith("backend."):
            name = key[len("backend.") :]
            if not name:
                raise ConfigurationError(f"{source}:{lineno}: backend needs a name")
            out.backends[name] = value
        elif key in KNOWN_KEYS:
            out.values[key] = value
        else:
            raise ConfigurationError(f"{source}:{lineno}: unknown key {key!r}")
    return out


def load_config(path: str | Path) -> FileConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"cannot read config {p}: {e.strerror}") from None
    return parse_config(text, str(p))


def parse_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {value!r}")
