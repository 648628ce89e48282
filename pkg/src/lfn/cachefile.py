"""Text cache format for coefficient streams.

Layout: `#`-prefixed header lines of the form `# key=value`, followed by
whitespace-separated `n re im` rows.  Floats are written with repr-level
precision so a round trip is bit-exact.  The checksum folds each row as
n XOR scaled_int(re) XOR scaled_int(im) into a 64-bit accumulator, where
scaled_int maps a float to round(x * 2^40) reduced mod 2^64.
"""

from __future__ import annotations

from dataclasses import dataclass, field

_MASK = (1 << 64) - 1
_SCALE = 1 << 40

REQUIRED_KEYS = ("form", "kind", "level", "weight_or_eigenvalue",
                 "normalization", "count")


def _scaled_int(x: float) -> int:
    return int(round(x * _SCALE)) & _MASK


def row_checksum(rows) -> int:
    acc = 0
    for n, re, im in rows:
        acc = (acc + ((n & _MASK) ^ _scaled_int(re) ^ _scaled_int(im))) & _MASK
    return acc


@dataclass
class CoefficientCacheFile:
    header: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)  # (n, re, im)

    def validate(self):
        for key in REQUIRED_KEYS:
            if key not in self.header:
                raise ValueError(f"cache header missing key {key!r}")
        count = int(self.header["count"])
        if count != len(self.rows):
            raise ValueError(
                f"cache count={count} does not match {len(self.rows)} rows")
        if "checksum" in self.header:
            want = int(self.header["checksum"])
            got = row_checksum(self.rows)
            if want != got:
                raise ValueError(
                    f"cache checksum mismatch: header {want}, rows {got}")


def write_cache_file(path, header: dict, rows) -> None:
    rows = list(rows)
    with open(path, "w") as fh:
        for key, value in header.items():
            fh.write(f"# {key}={value}\n")
        fh.write(f"# count={len(rows)}\n")
        fh.write(f"# checksum={row_checksum(rows)}\n")
        for n, re, im in rows:
            fh.write(f"{n} {re!r} {im!r}\n")


def read_cache_file(path) -> CoefficientCacheFile:
    header: dict = {}
    rows: list = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" not in body:
                    raise ValueError(f"line {lineno}: malformed header {line!r}")
                key, _, value = body.partition("=")
                header[key.strip()] = value.strip()
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 'n re im', got {line!r}")
            try:
                rows.append((int(parts[0]), float(parts[1]), float(parts[2])))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
    cache = CoefficientCacheFile(header, rows)
    cache.validate()
    return cache
