"""Cover decoding of superimposed test vectors and TDC event streams.

The cover decoder returns the set of columns contained in the observed
test vector.  For a d-disjunct code and at most d active pixels this set
equals the true support; the decoder additionally reports whether the
answer is information-theoretically forced (every candidate owns a
private activated row) or merely consistent.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .binmat import BinaryCode, TestVector, pack_rows

__all__ = [
    "DecodeKind",
    "DecodeOutcome",
    "TdcStream",
    "cover_decode",
    "window_decode",
    "burst_decode",
    "lookup_decode_1",
    "read_tdc_csv",
    "write_tdc_csv",
]


class DecodeKind(Enum):
    SUCCESS = "Success"
    AMBIGUOUS = "Ambiguous"
    INCONSISTENT = "Inconsistent"


@dataclass(frozen=True)
class DecodeOutcome:
    kind: DecodeKind
    support: frozenset[int] = frozenset()
    residual: frozenset[int] = frozenset()
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.kind is DecodeKind.SUCCESS


def _candidates(code: BinaryCode, y: TestVector) -> np.ndarray:
    """Columns entirely contained in y (vectorized subset test)."""
    ymask = pack_rows(y.bits, code.t)
    outside = code.packed & ~ymask
    return np.nonzero(~outside.any(axis=1))[0]


def cover_decode(code: BinaryCode, y: TestVector) -> DecodeOutcome:
    """Candidate set S = {j : column_j subseteq y}.

    Inconsistent if S does not reproduce y; Success if additionally every
    candidate has a private activated row (so S is the unique minimal
    explanation); Ambiguous otherwise.
    """
    if y.t != code.t:
        raise ValueError(f"test vector length {y.t} != code length {code.t}")
    if not y.bits:
        return DecodeOutcome(DecodeKind.SUCCESS, frozenset())
    cand = _candidates(code, y)
    counts = np.zeros(code.t, dtype=np.int64)
    for j in cand:
        col = code.columns[j]
        counts[list(col)] += 1
    covered = {r for r in y.bits if counts[r] > 0}
    residual = y.bits - covered
    support = frozenset(int(j) for j in cand)
    if residual:
        return DecodeOutcome(DecodeKind.INCONSISTENT, support, frozenset(residual))
    for j in cand:
        if not any(counts[r] == 1 for r in code.columns[j]):
            return DecodeOutcome(
                DecodeKind.AMBIGUOUS, support,
                note="some candidate lacks a private activated row",
            )
    return DecodeOutcome(DecodeKind.SUCCESS, support)


def lookup_decode_1(code: BinaryCode, y: TestVector) -> DecodeOutcome:
    """Exact-match table decoder for the single-active case.  Cannot see
    beyond one active column: any multi-column pattern that happens to
    equal a single column decodes to that column."""
    if y.t != code.t:
        raise ValueError(f"test vector length {y.t} != code length {code.t}")
    if not y.bits:
        return DecodeOutcome(DecodeKind.SUCCESS, frozenset())
    table = _lookup_table(code)
    j = table.get(frozenset(y.bits))
    if j is not None:
        return DecodeOutcome(DecodeKind.SUCCESS, frozenset({j}),
                             note="exact match; multiplicity above one is invisible")
    return DecodeOutcome(DecodeKind.INCONSISTENT, frozenset(), frozenset(y.bits),
                         note="no column matches the pattern exactly")


_LOOKUP_CACHE: dict[int, dict[frozenset[int], int]] = {}


def _lookup_table(code: BinaryCode) -> dict[frozenset[int], int]:
    key = id(code)
    tbl = _LOOKUP_CACHE.get(key)
    if tbl is None:
        tbl = {}
        for j, col in enumerate(code.columns):
            tbl.setdefault(frozenset(col), j)
        _LOOKUP_CACHE[key] = tbl
    return tbl


# ---------------------------------------------------------------------------
# TDC streams


@dataclass(frozen=True)
class TdcStream:
    """Timestamped hits per TDC, plus the sampling interval in picoseconds."""

    t: int
    interval_ps: int
    hits: tuple[tuple[int, ...], ...]  # hits[i] = sorted times of TDC i

    def __post_init__(self) -> None:
        if self.interval_ps < 1:
            raise ValueError("interval must be >= 1 ps")
        if len(self.hits) != self.t:
            raise ValueError("hit list length does not match t")
        for i, times in enumerate(self.hits):
            if any(times[k] > times[k + 1] for k in range(len(times) - 1)):
                raise ValueError(f"TDC {i} timestamps not sorted")
            if times and times[0] < 0:
                raise ValueError(f"TDC {i} has a negative timestamp")

    def windows(self) -> dict[int, frozenset[int]]:
        """Map window index (time // interval) to the set of TDCs that
        fired inside it."""
        out: dict[int, set[int]] = {}
        for i, times in enumerate(self.hits):
            for ts in times:
                out.setdefault(ts // self.interval_ps, set()).add(i)
        return {k: frozenset(v) for k, v in sorted(out.items())}


def window_decode(code: BinaryCode, stream: TdcStream) -> list[tuple[int, DecodeOutcome]]:
    """Decode each nonempty sampling window independently."""
    if stream.t != code.t:
        raise ValueError(f"stream has {stream.t} TDCs, code has {code.t}")
    return [
        (k, cover_decode(code, TestVector(code.t, bits)))
        for k, bits in stream.windows().items()
    ]


def burst_decode(
    code: BinaryCode, stream: TdcStream, max_gap: int = 0
) -> list[tuple[int, int, DecodeOutcome]]:
    """Union-merge runs of nonempty windows separated by at most max_gap
    empty windows, then decode each burst; trades time resolution for
    robustness against hits straddling a window edge."""
    if max_gap < 0:
        raise ValueError("max_gap must be >= 0")
    grouped = stream.windows()
    bursts: list[tuple[int, int, DecodeOutcome]] = []
    current: set[int] = set()
    start = prev = None
    for k, bits in grouped.items():
        if start is None:
            start, prev, current = k, k, set(bits)
            continue
        if k - prev <= max_gap + 1:
            current |= bits
            prev = k
        else:
            bursts.append((start, prev - start + 1,
                           cover_decode(code, TestVector(code.t, frozenset(current)))))
            start, prev, current = k, k, set(bits)
    if start is not None:
        bursts.append((start, prev - start + 1,
                       cover_decode(code, TestVector(code.t, frozenset(current)))))
    return bursts


def read_tdc_csv(path) -> tuple[list[tuple[int, int]], int]:
    """Read `tdc_id,time_ps` rows; returns (hits, max_tdc_id)."""
    own = isinstance(path, (str, bytes))
    f = open(path, newline="", encoding="utf-8") if own else path
    try:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["tdc_id", "time_ps"]:
            raise ValueError("expected header 'tdc_id,time_ps'")
        rows = []
        maxid = -1
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            try:
                tdc, ts = int(row[0]), int(row[1])
            except (ValueError, IndexError):
                raise ValueError(f"line {lineno}: malformed row {row!r}") from None
            if tdc < 0 or ts < 0:
                raise ValueError(f"line {lineno}: negative value")
            rows.append((tdc, ts))
            maxid = max(maxid, tdc)
        return rows, maxid
    finally:
        if own:
            f.close()


def stream_from_rows(rows, t: int, interval_ps: int) -> TdcStream:
    per: list[list[int]] = [[] for _ in range(t)]
    for tdc, ts in rows:
        if tdc >= t:
            raise ValueError(f"TDC id {tdc} outside [0, {t})")
        per[tdc].append(ts)
    return TdcStream(t, interval_ps, tuple(tuple(sorted(p)) for p in per))


def write_tdc_csv(path, rows) -> None:
    own = isinstance(path, (str, bytes))
    f = open(path, "w", newline="", encoding="utf-8") if own else path
    try:
        w = csv.writer(f)
        w.writerow(["tdc_id", "time_ps"])
        w.writerows(rows)
    finally:
        if own:
            f.close()
