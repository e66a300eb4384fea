"""Binary group-testing matrices and their Boolean superposition algebra.

A readout design is a binary t x n incidence matrix: row i is a TDC
(a pooled test), column j is a pixel, and an entry of one wires pixel j
to TDC i.  Columns are stored sparsely as sorted row-index tuples;
packed bit views are derived on demand for the heavy scans.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BinaryCode",
    "CodeMeta",
    "TestVector",
    "GtmxError",
    "superimpose",
    "covers",
    "max_overlap",
    "reference_design",
    "save",
    "load",
]


class GtmxError(ValueError):
    """Malformed GTMX stream or inconsistent column data."""


@dataclass(frozen=True)
class CodeMeta:
    """Construction metadata attached to a code.

    certified_d beyond the floor((w-1)/mu) overlap certificate must carry
    the "exact-verified" flag.
    """

    certified_d: int | None = None
    weight: int | None = None
    max_overlap: int | None = None
    descriptor: str = ""
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.certified_d is not None and self.certified_d < 0:
            raise ValueError("certified_d must be nonnegative")
        if (
            self.weight is not None
            and self.max_overlap is not None
            and self.max_overlap >= 1
            and self.certified_d is not None
        ):
            implied = (self.weight - 1) // self.max_overlap
            if self.certified_d > implied and "exact-verified" not in self.flags:
                raise ValueError(
                    f"certified_d={self.certified_d} exceeds overlap certificate "
                    f"{implied} without exact-verification provenance"
                )


@dataclass(frozen=True)
class BinaryCode:
    """Immutable t x n binary code with per-column row-index sets."""

    t: int
    n: int
    columns: tuple[tuple[int, ...], ...]
    meta: CodeMeta = field(default_factory=CodeMeta)

    def __post_init__(self) -> None:
        if self.t < 1 or self.n < 1:
            raise ValueError("need t >= 1 and n >= 1")
        if len(self.columns) != self.n:
            raise ValueError("column count does not match n")
        for j, col in enumerate(self.columns):
            if any(col[i] >= col[i + 1] for i in range(len(col) - 1)):
                raise ValueError(f"column {j} is not strictly ascending")
            if col and (col[0] < 0 or col[-1] >= self.t):
                raise ValueError(f"column {j} has a row index outside [0, {self.t})")
        if self.meta.weight is not None:
            for j, col in enumerate(self.columns):
                if len(col) != self.meta.weight:
                    raise ValueError(
                        f"column {j} has weight {len(col)}, declared {self.meta.weight}"
                    )

    @cached_property
    def packed(self) -> np.ndarray:
        """(n, ceil(t/64)) uint64 array; bit r of word w is row 64*w + r."""
        return pack_columns(self.columns, self.t)

    @cached_property
    def column_masks(self) -> tuple[int, ...]:
        """Each column as a Python int bitmask over rows."""
        return tuple(sum(1 << r for r in col) for col in self.columns)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([len(c) for c in self.columns], dtype=np.int64)

    def column_set(self, j: int) -> frozenset[int]:
        return frozenset(self.columns[j])

    def with_meta(self, **changes) -> "BinaryCode":
        return replace(self, meta=replace(self.meta, **changes))

    def truncate(self, n: int) -> "BinaryCode":
        """Keep the first n columns."""
        if not 1 <= n <= self.n:
            raise ValueError(f"cannot truncate to {n} columns (have {self.n})")
        return replace(self, n=n, columns=self.columns[:n])


@dataclass(frozen=True)
class TestVector:
    """Set of activated TDCs within one sampling window."""

    t: int
    bits: frozenset[int]

    def __post_init__(self) -> None:
        if any(b < 0 or b >= self.t for b in self.bits):
            raise ValueError("test-vector entry outside [0, t)")

    @property
    def mask(self) -> int:
        return sum(1 << b for b in self.bits)


def pack_columns(columns: Sequence[Sequence[int]], t: int) -> np.ndarray:
    words = (t + 63) // 64
    out = np.zeros((len(columns), words), dtype=np.uint64)
    for j, col in enumerate(columns):
        for r in col:
            out[j, r >> 6] |= np.uint64(1 << (r & 63))
    return out


def pack_rows(rows: Iterable[int], t: int) -> np.ndarray:
    words = (t + 63) // 64
    out = np.zeros(words, dtype=np.uint64)
    for r in rows:
        out[r >> 6] |= np.uint64(1 << (r & 63))
    return out


def superimpose(code: BinaryCode, support: Iterable[int]) -> TestVector:
    """Boolean OR of the selected columns: y = Ax over (AND, OR)."""
    bits: set[int] = set()
    for j in support:
        if not 0 <= j < code.n:
            raise IndexError(f"column index {j} outside [0, {code.n})")
        bits.update(code.columns[j])
    return TestVector(code.t, frozenset(bits))


def covers(u: TestVector, v: TestVector) -> bool:
    """u covers v iff u | v == u, i.e. v is a subset of u."""
    if u.t != v.t:
        raise ValueError("test vectors defined over different lengths")
    return v.bits <= u.bits


def max_overlap(code: BinaryCode) -> tuple[int, tuple[int, int]]:
    """Exact max pairwise column intersection size and an argmax pair."""
    if code.n < 2:
        raise ValueError("max_overlap needs at least two columns")
    packed = code.packed
    best = -1
    pair = (0, 1)
    # row-block sweep keeps the intermediate AND matrix small
    for i in range(code.n - 1):
        ov = np.bitwise_count(packed[i + 1 :] & packed[i]).sum(axis=1)
        k = int(ov.argmax())
        if int(ov[k]) > best:
            best = int(ov[k])
            pair = (i, i + 1 + k)
    return best, pair


def reference_design(kind: str, m: int) -> BinaryCode:
    """The three classical wirings: one TDC per pixel, cross-strip,
    or one TDC per bit of the pixel number."""
    if m < 1:
        raise ValueError("grid side must be >= 1")
    n = m * m
    if kind == "per_pixel":
        cols = tuple((j,) for j in range(n))
        meta = CodeMeta(certified_d=n - 1 if n > 1 else 0, weight=1, max_overlap=0,
                        descriptor=f"per-pixel I_{n}")
        return BinaryCode(n, n, cols, meta)
    if kind == "cross_strip":
        cols = tuple((r, m + c) for r in range(m) for c in range(m))
        mu = 1 if m > 1 else 0
        meta = CodeMeta(certified_d=1, weight=2, max_overlap=mu,
                        descriptor=f"cross-strip {m}x{m}")
        return BinaryCode(2 * m, n, cols, meta)
    if kind == "binary_counting":
        # pixels numbered 1..m^2 so no column is empty
        bits = n.bit_length()
        cols = tuple(
            tuple(b for b in range(bits) if (j >> b) & 1) for j in range(1, n + 1)
        )
        meta = CodeMeta(certified_d=0, descriptor=f"binary-counting {m}x{m}",
                        flags=("1-separable",))
        return BinaryCode(bits, n, cols, meta)
    raise ValueError(f"unknown reference design {kind!r}")


_META_RE = re.compile(
    r'^meta d=(?P<d>\d+|\?) w=(?P<w>\d+|var) mu=(?P<mu>\d+|\?) desc="(?P<desc>[^"]*)"'
    r'(?: flags="(?P<flags>[^"]*)")?$'
)


def save(code: BinaryCode, destination) -> None:
    """Write the GTMX v1 text format."""
    own = isinstance(destination, (str, bytes))
    f = open(destination, "w", encoding="utf-8") if own else destination
    try:
        m = code.meta
        d = "?" if m.certified_d is None else str(m.certified_d)
        w = "var" if m.weight is None else str(m.weight)
        mu = "?" if m.max_overlap is None else str(m.max_overlap)
        f.write("GTMX 1\n")
        f.write(f"t {code.t}\n")
        f.write(f"n {code.n}\n")
        line = f'meta d={d} w={w} mu={mu} desc="{m.descriptor}"'
        if m.flags:
            line += f' flags="{",".join(m.flags)}"'
        f.write(line + "\n")
        for j, col in enumerate(code.columns):
            f.write("c " + " ".join(str(x) for x in (j, *col)) + "\n")
        f.write("end\n")
    finally:
        if own:
            f.close()


def loads(text: str) -> BinaryCode:
    return load(io.StringIO(text))


def load(source) -> BinaryCode:
    """Parse a GTMX v1 stream, validating as we go."""
    own = isinstance(source, (str, bytes))
    f = open(source, "r", encoding="utf-8") if own else source
    try:
        lines = f.read().splitlines()
    finally:
        if own:
            f.close()

    def fail(lineno: int, msg: str):
        raise GtmxError(f"line {lineno + 1}: {msg}")

    if not lines or lines[0].strip() != "GTMX 1":
        fail(0, "missing 'GTMX 1' header")
    t = n = None
    meta = CodeMeta()
    cols: dict[int, tuple[int, ...]] = {}
    ended = False
    for i, line in enumerate(lines[1:], start=1):
        line = line.strip()
        if not line:
            continue
        if ended:
            fail(i, "content after 'end'")
        if line.startswith("t "):
            t = int(line[2:])
        elif line.startswith("n "):
            n = int(line[2:])
        elif line.startswith("meta "):
            m = _META_RE.match(line)
            if not m:
                fail(i, "malformed meta line")
            meta = CodeMeta(
                certified_d=None if m["d"] == "?" else int(m["d"]),
                weight=None if m["w"] == "var" else int(m["w"]),
                max_overlap=None if m["mu"] == "?" else int(m["mu"]),
                descriptor=m["desc"],
                flags=tuple(m["flags"].split(",")) if m["flags"] else (),
            )
        elif line.startswith("c "):
            if t is None or n is None:
                fail(i, "column line before t/n")
            parts = line.split()
            j = int(parts[1])
            entries = tuple(int(x) for x in parts[2:])
            if not 0 <= j < n:
                fail(i, f"column index {j} outside [0, {n})")
            if j in cols:
                fail(i, f"duplicate column {j}")
            if any(entries[k] >= entries[k + 1] for k in range(len(entries) - 1)):
                fail(i, f"column {j} entries not strictly ascending")
            if entries and (entries[0] < 0 or entries[-1] >= t):
                fail(i, f"column {j} has row index outside [0, {t})")
            cols[j] = entries
        elif line == "end":
            ended = True
        else:
            fail(i, f"unrecognized line {line!r}")
    if not ended:
        fail(len(lines) - 1, "missing 'end'")
    if t is None or n is None:
        fail(0, "missing t or n")
    if len(cols) != n:
        raise GtmxError(f"expected {n} columns, found {len(cols)}")
    columns = tuple(cols[j] for j in range(n))
    try:
        return BinaryCode(t, n, columns, meta)
    except ValueError as e:
        raise GtmxError(str(e)) from e
