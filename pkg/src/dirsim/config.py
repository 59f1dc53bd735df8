"""Key/value config files with unit suffixes.

Grammar: one ``key = value`` per line, ``#`` starts a comment, keys are
dotted paths, a leading ``**.`` wildcard is accepted and stripped (one
profile per file, so patterns collapse). Numeric values may carry a
unit suffix and are normalized to canonical units: powers to mW,
levels to dB, angles to degrees, frequencies to Hz, lengths to m,
times to s. Bare numbers are only legal for dimensionless keys;
strings are double-quoted. Known parameter names are checked against
the expected dimension, so a power key given a dB level (or a unit on
a dimensionless key) is rejected with its line number. Duplicate keys
are rejected too.

``serialize`` writes a document back in canonical units; parsing that
text reproduces the document exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

Value = float | int | str | bool

_UNITS: dict[str, tuple[str, float]] = {
    # suffix -> (dimension, multiplier to canonical); dBm is special-cased
    "mW": ("power", 1.0),
    "dBm": ("power", 0.0),
    "dB": ("level", 1.0),
    "dBi": ("level", 1.0),
    "deg": ("angle", 1.0),
    "Hz": ("frequency", 1.0),
    "kHz": ("frequency", 1e3),
    "MHz": ("frequency", 1e6),
    "GHz": ("frequency", 1e9),
    "m": ("length", 1.0),
    "s": ("time", 1.0),
    "ms": ("time", 1e-3),
}

_CANONICAL_SUFFIX = {
    "power": "mW",
    "level": "dB",
    "angle": "deg",
    "frequency": "Hz",
    "length": "m",
    "time": "s",
}

# Expected dimension by longest dotted suffix of the key path.
_KEY_DIMENSIONS: dict[str, str] = {
    "transmitterPower": "power",
    "sensitivity": "power",
    "detectionThreshold": "power",
    "mainLobeGain": "level",
    "sideLobeGain": "level",
    "dBThreshold": "level",
    "snirThreshold": "level",
    "beamWidth": "angle",
    "mainLobeOrientation": "angle",
    "carrierFrequency": "frequency",
    "antennaHeightTx": "length",
    "antennaHeightRx": "length",
    "spacing": "length",
    "playgroundWidth": "length",
    "playgroundHeight": "length",
    "orbitBaseRadius": "length",
    "duration": "time",
    "beaconInterval": "time",
    "packetInterval": "time",
    "probeInterval": "time",
    "mobilityTick": "time",
    "slotTime": "time",
    "sifs": "time",
    "difs": "time",
    "pauseTime": "time",
    "pathLossAlpha": "none",
    "FoliumPattern.a": "none",
    "FoliumPattern.b": "none",
    "RosePattern.k": "none",
    "CircularPattern.r": "none",
    "hosts": "none",
    "relays": "none",
    "orbits": "none",
    "seed": "none",
    "repeats": "none",
    "packetBits": "none",
    "beaconBits": "none",
    "probeBits": "none",
    "ackBits": "none",
    "bitrate": "none",
    "cwMin": "none",
    "cwMax": "none",
    "maxRetries": "none",
    "speedMin": "none",
    "speedMax": "none",
    "antennaType": "string",
    "patternType": "string",
    "pathLossModel": "string",
}

_NUMBER_RE = re.compile(
    r"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]*)"
)
_KEY_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")


class ConfigError(ValueError):
    def __init__(self, line: int | None, message: str) -> None:
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


def expected_dimension(key: str) -> str | None:
    parts = key.split(".")
    for start in range(len(parts)):
        suffix = ".".join(parts[start:])
        if suffix in _KEY_DIMENSIONS:
            return _KEY_DIMENSIONS[suffix]
    return None


@dataclass(frozen=True)
class ConfigEntry:
    value: Value
    dimension: str  # power|level|angle|frequency|length|time|none|string|bool


class ConfigDocument:
    """Ordered key to typed-entry map with dimension bookkeeping."""

    def __init__(self) -> None:
        self._entries: dict[str, ConfigEntry] = {}

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def __getitem__(self, key: str) -> Value:
        return self._entries[key].value

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConfigDocument):
            return NotImplemented
        return self._entries == other._entries

    def copy(self) -> "ConfigDocument":
        out = ConfigDocument()
        out._entries = dict(self._entries)
        return out

    def keys(self) -> Iterator[str]:
        return iter(self._entries)

    def items(self) -> Iterator[tuple[str, ConfigEntry]]:
        return iter(self._entries.items())

    def entry(self, key: str) -> ConfigEntry:
        return self._entries[key]

    def get(self, key: str, default: Value | None = None) -> Value | None:
        entry = self._entries.get(key)
        return default if entry is None else entry.value

    def set(self, key: str, value: Value, dimension: str | None = None) -> None:
        if dimension is None:
            dimension = expected_dimension(key)
        if dimension is None:
            if isinstance(value, bool):
                dimension = "bool"
            elif isinstance(value, str):
                dimension = "string"
            else:
                dimension = "none"
        self._entries[key] = ConfigEntry(value, dimension)

    def setdefault(self, key: str, value: Value, dimension: str | None = None) -> None:
        if key not in self._entries:
            self.set(key, value, dimension)

    def require(self, key: str) -> Value:
        if key not in self._entries:
            raise ConfigError(None, f"missing required key {key!r}")
        return self._entries[key].value

    def number(self, key: str, default: float | None = None) -> float:
        value = self.require(key) if default is None else self.get(key, default)
        if isinstance(value, bool) or isinstance(value, str):
            raise ConfigError(None, f"{key} must be numeric")
        return float(value)

    def integer(self, key: str, default: int | None = None) -> int:
        value = self.number(key, None if default is None else float(default))
        if value != int(value):
            raise ConfigError(None, f"{key} must be an integer")
        return int(value)

    def text(self, key: str, default: str | None = None) -> str:
        value = self.require(key) if default is None else self.get(key, default)
        if not isinstance(value, str):
            raise ConfigError(None, f"{key} must be a string")
        return value


def _strip_comment(line: str) -> str:
    out = []
    in_quote = False
    for ch in line:
        if ch == '"':
            in_quote = not in_quote
        if ch == "#" and not in_quote:
            break
        out.append(ch)
    return "".join(out)


def _parse_value(raw: str, key: str, lineno: int) -> ConfigEntry:
    expected = expected_dimension(key)
    if raw.startswith('"'):
        if len(raw) < 2 or not raw.endswith('"') or '"' in raw[1:-1]:
            raise ConfigError(lineno, f"unterminated string for {key}")
        if expected not in (None, "string"):
            raise ConfigError(lineno, f"{key} expects a {expected} value, got a string")
        return ConfigEntry(raw[1:-1], "string")
    if raw in ("true", "false"):
        if expected not in (None, "bool"):
            raise ConfigError(lineno, f"{key} expects a {expected} value, got a bool")
        return ConfigEntry(raw == "true", "bool")
    match = _NUMBER_RE.fullmatch(raw)
    if match is None:
        raise ConfigError(lineno, f"malformed value {raw!r} for {key}")
    number_text, suffix = match.groups()
    if suffix == "":
        if expected not in (None, "none"):
            raise ConfigError(
                lineno, f"{key} expects a {expected} unit, got a bare number"
            )
        is_integral = re.fullmatch(r"[-+]?\d+", number_text) is not None
        value: Value = int(number_text) if is_integral else float(number_text)
        return ConfigEntry(value, "none")
    if suffix not in _UNITS:
        raise ConfigError(lineno, f"unknown unit {suffix!r} for {key}")
    dimension, factor = _UNITS[suffix]
    if expected is not None and expected != dimension:
        if expected == "none":
            raise ConfigError(
                lineno, f"{key} is dimensionless, got {dimension} unit {suffix!r}"
            )
        raise ConfigError(
            lineno,
            f"{key} expects a {expected} value, got {dimension} unit {suffix!r}",
        )
    number = float(number_text)
    if suffix == "dBm":
        canonical = 10.0 ** (number / 10.0)  # to mW
    else:
        canonical = number * factor
    return ConfigEntry(canonical, dimension)


def parse_config(text: str) -> ConfigDocument:
    doc = ConfigDocument()
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw_line).strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(lineno, f"expected 'key = value', got {line!r}")
        key_part, _, value_part = line.partition("=")
        key = key_part.strip()
        value_raw = value_part.strip()
        while key.startswith("**."):
            key = key[3:]
        if not key or _KEY_RE.fullmatch(key) is None:
            raise ConfigError(lineno, f"malformed key {key_part.strip()!r}")
        if not value_raw:
            raise ConfigError(lineno, f"missing value for {key}")
        if key in doc:
            raise ConfigError(lineno, f"duplicate key {key}")
        doc._entries[key] = _parse_value(value_raw, key, lineno)
    return doc


def parse_config_file(path: str) -> ConfigDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _format_value(entry: ConfigEntry) -> str:
    if entry.dimension == "string":
        return f'"{entry.value}"'
    if entry.dimension == "bool":
        return "true" if entry.value else "false"
    suffix = _CANONICAL_SUFFIX.get(entry.dimension, "")
    return f"{entry.value!r}{suffix}"


def serialize_config(doc: ConfigDocument) -> str:
    return "".join(f"{key} = {_format_value(entry)}\n" for key, entry in doc.items())
