"""Constructions of d-disjunct matrices: greedy random search, the Chinese
remainder sieve, Reed-Solomon concatenation (identity or general inner code),
the two shortening transforms, greedy extension, and a recipe catalog.

Certification conventions:
  * constant-weight codes with pairwise overlap <= mu are floor((w-1)/mu)
    disjunct;
  * the remainder sieve over prime powers p^e certifies the largest d with
    prod p^e >= n^d;
  * concatenation of an (n,k,d)_q outer code certifies
    floor((n_q-1)/(n_q-d_q)), capped by the inner code's certificate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .binmat import BinaryCode, CodeMeta, load, max_overlap, pack_columns
from .gf import QaryCode, enumerate_codewords, field_make, rs_code

__all__ = [
    "PrimePowerSet",
    "Recipe",
    "greedy_construct",
    "crt_sieve",
    "concat_identity",
    "concat_inner",
    "inner_affine_lines",
    "shorten_weight",
    "shorten_zero",
    "extend_greedy",
    "build_recipe",
    "import_code",
    "parse_recipe",
    "TABLE1",
    "TABLE2_PRIME_POWERS",
    "catalog_descriptor",
]


# ---------------------------------------------------------------------------
# Chinese remainder sieve


@dataclass(frozen=True)
class PrimePowerSet:
    """Powers of distinct primes used by the remainder sieve."""

    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        bases = []
        for e in self.entries:
            if e < 2:
                raise ValueError("entries must be >= 2")
            b = _prime_base(e)
            if b is None:
                raise ValueError(f"{e} is not a prime power")
            bases.append(b)
        if len(set(bases)) != len(bases):
            raise ValueError("prime bases must be pairwise distinct")

    @property
    def product(self) -> int:
        out = 1
        for e in self.entries:
            out *= e
        return out

    @property
    def sum(self) -> int:
        return sum(self.entries)


def _prime_base(e: int) -> int | None:
    for p in range(2, e + 1):
        if e % p == 0:
            k = e
            while k % p == 0:
                k //= p
            return p if k == 1 else None
    return None


# prime-power sets printed in the paper's sieve parameter table; inputs only,
# the resulting (t, n) are recomputed (the printed t values do not match the sums)
TABLE2_PRIME_POWERS: dict[int, tuple[int, ...]] = {
    2: (8, 9, 5, 7, 11, 13, 17, 23),
    3: (4, 3, 5, 7, 11, 13, 17, 19, 23, 29, 37),
    4: (8, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 43),
    5: (8, 9, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 53),
    6: (8, 9, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 53, 61),
}


def crt_sieve(pps: PrimePowerSet, n: int) -> BinaryCode:
    """Vertical concatenation of residue-indicator blocks:
    block l has a one at (i, j) iff j = i mod p_l^e_l."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cols = []
    offsets = np.cumsum([0, *pps.entries[:-1]])
    for j in range(n):
        cols.append(tuple(int(off + j % m) for off, m in zip(offsets, pps.entries)))
    d = 0
    while pps.product >= n ** (d + 1):
        d += 1
    k = len(pps.entries)
    mu = k - 1 if n > 1 else 0  # columns share at most one row per block
    # the sieve certificate can exceed the overlap certificate, so mark the
    # provenance when it does
    meta = CodeMeta(
        certified_d=d,
        weight=k,
        max_overlap=mu,
        descriptor=f"crt{{{','.join(map(str, pps.entries))}}}",
        flags=("exact-verified",) if mu >= 1 and d > (k - 1) // mu else (),
    )
    return BinaryCode(pps.sum, n, tuple(cols), meta)


# ---------------------------------------------------------------------------
# greedy random search


def _pack_batch(cands: np.ndarray, words: int) -> np.ndarray:
    out = np.zeros((cands.shape[0], words), dtype=np.uint64)
    rows = np.repeat(np.arange(cands.shape[0]), cands.shape[1])
    np.bitwise_or.at(
        out,
        (rows, (cands >> 6).ravel()),
        np.uint64(1) << (cands.ravel() & 63).astype(np.uint64),
    )
    return out


def _greedy_fill(
    t: int,
    w: int,
    mu_max: int,
    target_n: int,
    seed: int,
    budget: int,
    start: list[tuple[int, ...]] | None = None,
) -> tuple[list[tuple[int, ...]], str, int]:
    """Accept random weight-w columns while every pairwise overlap stays
    <= mu_max.  Returns (columns, stop reason, draws used)."""
    rng = np.random.default_rng(seed)
    words = (t + 63) // 64
    cols: list[tuple[int, ...]] = list(start or [])
    cap = max(target_n, 1024)
    acc = np.zeros((cap, words), dtype=np.uint64)
    if cols:
        acc[: len(cols)] = pack_columns(cols, t)
    count = len(cols)
    draws = 0
    batch = 4096
    while count < target_n and draws < budget:
        b = min(batch, budget - draws)
        cands = np.argpartition(rng.random((b, t)), w - 1, axis=1)[:, :w]
        draws += b
        packs = _pack_batch(cands, words)
        for c in range(b):
            if count >= target_n:
                break
            cand = packs[c]
            if count:
                ov = np.bitwise_count(acc[:count] & cand).sum(axis=1)
                if int(ov.max()) > mu_max:
                    continue
            if count == cap:
                cap *= 2
                grown = np.zeros((cap, words), dtype=np.uint64)
                grown[:count] = acc[:count]
                acc = grown
            acc[count] = cand
            cols.append(tuple(sorted(int(x) for x in cands[c])))
            count += 1
    reason = "target" if count >= target_n else "budget"
    return cols, reason, draws


def greedy_construct(
    t: int, w: int, d: int, target_n: int, seed: int = 0, budget: int = 10**6
) -> BinaryCode:
    """Random constant-weight columns accepted when every pairwise overlap is
    at most floor((w-1)/d), which certifies d-disjunctness."""
    if not 1 <= w <= t:
        raise ValueError("need 1 <= w <= t")
    if d < 1:
        raise ValueError("d must be >= 1")
    mu_max = (w - 1) // d
    if mu_max == 0:
        # columns must be pairwise disjoint
        mu_max = 0
    cols, reason, draws = _greedy_fill(t, w, mu_max, target_n, seed, budget)
    if not cols:
        # w = t saturates after a single column; seed one deterministically
        cols = [tuple(range(w))] if w == t else cols
    if not cols:
        raise RuntimeError("greedy search produced no columns")
    meta = CodeMeta(
        certified_d=(w - 1) // mu_max if mu_max >= 1 else len(cols) - 1,
        weight=w,
        max_overlap=mu_max,
        descriptor=f"greedy(t={t},w={w},d={d},seed={seed})",
        flags=(f"stopped:{reason}",),
    )
    return BinaryCode(t, len(cols), tuple(cols), meta)


def extend_greedy(
    code: BinaryCode, target_n: int, seed: int = 0, budget: int = 10**6
) -> BinaryCode:
    """Append random weight-w columns keeping all overlaps within the code's
    recorded bound."""
    if code.meta.weight is None or code.meta.max_overlap is None:
        raise ValueError("extension needs a uniform weight and an overlap bound")
    if target_n <= code.n:
        return code
    cols, reason, _ = _greedy_fill(
        code.t,
        code.meta.weight,
        code.meta.max_overlap,
        target_n,
        seed,
        budget,
        start=list(code.columns),
    )
    meta = CodeMeta(
        certified_d=code.meta.certified_d,
        weight=code.meta.weight,
        max_overlap=code.meta.max_overlap,
        descriptor=code.meta.descriptor + f",x({target_n})",
        flags=(f"stopped:{reason}",),
    )
    return BinaryCode(code.t, len(cols), tuple(cols), meta)


# ---------------------------------------------------------------------------
# concatenation


def _concat_cert(n_q: int, d_q: int, inner_cert: int | None = None) -> int:
    if n_q == d_q:
        # zero symbol agreement: columns are disjoint at the symbol level
        return 10**9 if inner_cert is None else inner_cert
    c = (n_q - 1) // (n_q - d_q)
    return c if inner_cert is None else min(inner_cert, c)


def concat_identity(qcode: QaryCode, n: int | None = None) -> BinaryCode:
    """Map each q-ary symbol v to the (v+1)-st column of I_q, stacking the
    n_q blocks vertically."""
    size = qcode.size
    n = size if n is None else n
    if n > size:
        raise ValueError(f"target size {n} exceeds code size {size}")
    q = qcode.field.q
    words = enumerate_codewords(qcode)[:n]
    cols = tuple(
        tuple(int(b * q + v) for b, v in enumerate(word)) for word in words
    )
    mu = qcode.n_q - qcode.d_q
    meta = CodeMeta(
        certified_d=_concat_cert(qcode.n_q, qcode.d_q),
        weight=qcode.n_q,
        max_overlap=mu,
        descriptor=f"({qcode.n_q},{qcode.k_dim},{qcode.d_q})_{q}^Iq",
    )
    return BinaryCode(qcode.n_q * q, n, cols, meta)


def concat_inner(qcode: QaryCode, inner: BinaryCode, n: int | None = None) -> BinaryCode:
    """Replace each q-ary symbol v by column v of an arbitrary certified
    inner code (the identity case generalized)."""
    q = qcode.field.q
    if inner.n < q:
        raise ValueError(f"inner code has {inner.n} columns, need >= q = {q}")
    if not inner.meta.certified_d or inner.meta.certified_d < 1:
        raise ValueError("inner code carries no disjunctness certificate")
    size = qcode.size
    n = size if n is None else n
    if n > size:
        raise ValueError(f"target size {n} exceeds code size {size}")
    ti = inner.t
    words = enumerate_codewords(qcode)[:n]
    cols = tuple(
        tuple(int(b * ti + r) for b, v in enumerate(word) for r in inner.columns[v])
        for word in words
    )
    wi = inner.meta.weight
    meta = CodeMeta(
        certified_d=_concat_cert(qcode.n_q, qcode.d_q, inner.meta.certified_d),
        weight=qcode.n_q * wi if wi is not None else None,
        descriptor=(
            f"({qcode.n_q},{qcode.k_dim},{qcode.d_q})_{q}^[{inner.meta.descriptor}]"
        ),
    )
    return BinaryCode(qcode.n_q * ti, n, cols, meta)


def inner_affine_lines(p: int) -> BinaryCode:
    """Lines of the affine plane AG(2, p): p^2 points, p^2 + p lines of p
    points each, any two lines meeting in at most one point."""
    if _prime_base(p) != p or p < 2:
        raise ValueError("p must be prime")
    cols = []
    # y = a x + b, point (x, y) has index x*p + y
    for a in range(p):
        for b in range(p):
            cols.append(tuple(x * p + (a * x + b) % p for x in range(p)))
    for c in range(p):  # vertical lines x = c
        cols.append(tuple(c * p + y for y in range(p)))
    cols = tuple(tuple(sorted(col)) for col in cols)
    meta = CodeMeta(
        certified_d=p - 1,
        weight=p,
        max_overlap=1,
        descriptor=f"A({p * p},4,{p})",
    )
    return BinaryCode(p * p, p * p + p, cols, meta)


# ---------------------------------------------------------------------------
# shortening


def _row_counts(code: BinaryCode) -> np.ndarray:
    flat = np.fromiter(
        (r for col in code.columns for r in col),
        dtype=np.int64,
        count=sum(len(c) for c in code.columns),
    )
    return np.bincount(flat, minlength=code.t)


def shorten_weight(code: BinaryCode) -> BinaryCode:
    """Pick the row with the most ones, keep the columns incident to it, and
    delete the row; reduces both length and (uniform) weight by one."""
    if code.t < 2:
        raise ValueError("cannot shorten below one row")
    counts = _row_counts(code)
    if counts.max() == 0:
        raise ValueError("all-zero matrix cannot be weight-shortened")
    r = int(counts.argmax())
    cols = []
    degenerate = False
    for col in code.columns:
        if r in col:
            newcol = tuple(x if x < r else x - 1 for x in col if x != r)
            cols.append(newcol)
            if not newcol:
                degenerate = True
    w = code.meta.weight - 1 if code.meta.weight is not None else None
    mu = code.meta.max_overlap
    cert = None
    if w is not None and mu is not None:
        cert = (w - 1) // mu if mu >= 1 else max(len(cols) - 1, 0)
    meta = CodeMeta(
        certified_d=cert,
        weight=w,
        max_overlap=mu,
        descriptor=code.meta.descriptor + ",sw",
        flags=("degenerate",) if degenerate else (),
    )
    return BinaryCode(code.t - 1, len(cols), tuple(cols), meta)


def shorten_zero(code: BinaryCode, steps: int) -> BinaryCode:
    """Per step: pick the row with the most zeros (fewest ones, ties to the
    lowest index), keep only the columns with a zero there, delete the row.
    Weight is preserved."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if steps == 0:
        return code
    cur = code
    survivors = []
    for step in range(steps):
        counts = _row_counts(cur)
        r = int(counts.argmin())
        cols = tuple(
            tuple(x if x < r else x - 1 for x in col)
            for col in cur.columns
            if r not in col
        )
        if not cols:
            raise ValueError(f"shortening step {step + 1} leaves zero columns")
        survivors.append(len(cols))
        cur = BinaryCode(cur.t - 1, len(cols), cols, cur.meta)
    meta = CodeMeta(
        certified_d=code.meta.certified_d,
        weight=code.meta.weight,
        max_overlap=code.meta.max_overlap,
        descriptor=code.meta.descriptor + f",s({steps})",
        flags=code.meta.flags,
    )
    return BinaryCode(cur.t, cur.n, cur.columns, meta)


def max_zero_shortening_steps(code: BinaryCode) -> int:
    """Floor bound on removable rows: the minimum number of ones in a row of
    a constant-weight code is at most floor(w*n/t)."""
    cur = code
    steps = 0
    while True:
        counts = _row_counts(cur)
        r = int(counts.argmin())
        kept = cur.n - int(counts[r])
        if kept < 1 or cur.t <= 1:
            return steps
        cols = tuple(
            tuple(x if x < r else x - 1 for x in col)
            for col in cur.columns
            if r not in col
        )
        cur = BinaryCode(cur.t - 1, len(cols), cols, cur.meta)
        steps += 1


# ---------------------------------------------------------------------------
# recipes


_BASE_RE = re.compile(r"^\((\d+),(\d+),(\d+)\)_(\d+)$")
_INNER_RE = re.compile(r"^A\((\d+),(\d+),(\d+)\)$")

_FIELD_BY_Q = {9: (3, 2), 16: (2, 4), 25: (5, 2)}


@dataclass(frozen=True)
class Recipe:
    """Parsed construction pipeline: an (n,k,d)_q base plus ordered
    transforms (concatenation, shortenings, extension)."""

    descriptor: str
    n_q: int
    k_dim: int
    d_q: int
    q: int
    inner: str  # "Iq" or "A(t,d,w)"
    shorten_steps: int
    extend_to: int | None  # None = no extension; 0 = extend to build target

    def canonical(self) -> str:
        parts = [f"({self.n_q},{self.k_dim},{self.d_q})_{self.q}^{self.inner}"]
        if self.shorten_steps:
            parts.append(f"s({self.shorten_steps})")
        if self.extend_to is not None:
            parts.append("x" if self.extend_to == 0 else f"x({self.extend_to})")
        return ",".join(parts)


def parse_recipe(descriptor: str) -> Recipe:
    head, _, tail = descriptor.partition("^")
    m = _BASE_RE.match(head.strip())
    if not m:
        raise ValueError(f"cannot parse base code in {descriptor!r}")
    n_q, k_dim, d_q, q = map(int, m.groups())
    if d_q != n_q - k_dim + 1:
        raise ValueError(f"{head}: distance must be n-k+1 for an MDS base")
    inner = "Iq"
    steps = 0
    extend: int | None = None
    if tail:
        tokens = re.findall(r"A\(\d+,\d+,\d+\)|s\(\d+\)|x\(\d+\)|Iq|x", tail)
        joined = ",".join(tokens)
        if joined.replace(",", "") != tail.replace(",", "").replace(" ", ""):
            raise ValueError(f"unrecognized transform list in {descriptor!r}")
        first = True
        for tok in tokens:
            if tok == "Iq" or tok.startswith("A("):
                if not first:
                    raise ValueError("concatenation must come first")
                inner = tok
            elif tok.startswith("s("):
                steps += int(tok[2:-1])
            elif tok == "x":
                extend = 0
            elif tok.startswith("x("):
                extend = int(tok[2:-1])
            first = False
    return Recipe(descriptor, n_q, k_dim, d_q, q, inner, steps, extend)


def _make_field(q: int):
    if q in _FIELD_BY_Q:
        p, k = _FIELD_BY_Q[q]
        return field_make(p, k)
    for p in range(2, q + 1):
        if q % p == 0:
            k = 0
            m = q
            while m % p == 0:
                m //= p
                k += 1
            if m != 1:
                raise ValueError(f"{q} is not a prime power")
            return field_make(p, k)
    raise ValueError(f"{q} is not a prime power")


def build_recipe(
    descriptor: str,
    n: int | None = None,
    seed: int = 0,
    budget: int = 10**6,
) -> BinaryCode:
    """Build, transform, and truncate the code described by the recipe
    mini-grammar, e.g. "(13,4,10)_13^Iq,s(8)"."""
    rec = parse_recipe(descriptor)
    field = _make_field(rec.q)
    qc = rs_code(field, rec.n_q, rec.k_dim)
    if rec.inner == "Iq":
        code = concat_identity(qc)
    else:
        m = _INNER_RE.match(rec.inner)
        ti, dist, wi = map(int, m.groups())
        if wi * wi != ti:
            raise ValueError(f"affine inner code needs t = w^2, got {rec.inner}")
        inner = inner_affine_lines(wi)
        if dist != 2 * (wi - 1):
            raise ValueError(f"affine inner code A({ti},?,{wi}) has distance {2 * (wi - 1)}")
        code = concat_inner(qc, inner)
    if rec.shorten_steps:
        code = shorten_zero(code, rec.shorten_steps)
    if rec.extend_to is not None:
        target = rec.extend_to or n
        if target is None:
            raise ValueError("extension transform needs a target size")
        if code.meta.max_overlap is None:
            code = code.with_meta(max_overlap=max_overlap(code)[0])
        code = extend_greedy(code, target, seed=seed, budget=budget)
        if code.n < target:
            raise ValueError(f"greedy extension stalled at {code.n} < {target} columns")
    if n is not None:
        if code.n < n:
            raise ValueError(
                f"recipe {descriptor!r} yields {code.n} columns, fewer than {n}"
            )
        code = code.truncate(n)
    return code.with_meta(descriptor=descriptor)


# best-known designs per (n, d): published length and, where the ingredients
# are internal (RS + identity/affine inner + transforms), a buildable recipe
TABLE1: dict[tuple[int, int], tuple[int, str | None]] = {
    (100, 2): (21, None),
    (100, 3): (36, None),
    (100, 4): (48, None),
    (100, 5): (60, None),
    (100, 6): (75, "(7,2,6)_11^Iq,s(2)"),
    (400, 2): (31, None),
    (400, 3): (51, None),
    (400, 4): (64, None),
    (400, 5): (107, "(11,3,9)_11^Iq,s(14)"),
    (400, 6): (144, "(13,3,11)_13^Iq,s(25)"),
    (900, 2): (38, None),
    (900, 3): (73, "(7,3,5)_11^Iq,s(4)"),
    (900, 4): (95, "(9,3,7)_11^Iq,s(4)"),
    (900, 5): (117, "(11,3,9)_11^Iq,s(4)"),
    (900, 6): (156, "(13,3,11)_13^Iq,s(13)"),
    (1600, 2): (44, None),
    (1600, 3): (78, None),
    (1600, 4): (113, "(9,3,7)_13^Iq,s(4),x"),
    (1600, 5): (140, "(11,3,9)_13^Iq,s(3)"),
    (1600, 6): (166, "(13,3,11)_13^Iq,s(3)"),
    (3600, 2): (51, None),
    (3600, 3): (85, None),
    (3600, 4): (142, "(9,3,7)_16^Iq,s(2)"),
    (3600, 5): (174, "(11,3,9)_16^Iq,s(2)"),
    (3600, 6): (206, "(13,3,11)_16^Iq,s(2)"),
    (14400, 2): (63, "(7,4,4)_11^A(9,4,3)"),
    (14400, 3): (110, "(10,4,7)_11^Iq"),
    (14400, 4): (161, "(13,4,10)_13^Iq,s(8)"),
    (14400, 5): (233, "(16,4,13)_16^Iq,s(23)"),
    (14400, 6): (323, "(13,3,11)_25^Iq,s(2)"),
}


def catalog_descriptor(n: int, d: int) -> str:
    entry = TABLE1.get((n, d))
    if entry is None:
        raise KeyError(f"no catalog entry for n={n}, d={d}")
    t, desc = entry
    if desc is None:
        raise KeyError(
            f"catalog entry n={n}, d={d} (t={t}) needs an external code; "
            "supply it via import_code"
        )
    return desc


# ---------------------------------------------------------------------------
# imports


def import_code(
    path,
    length: int | None = None,
    weight: int | None = None,
    distance: int | None = None,
    overlap: int | None = None,
) -> BinaryCode:
    """Load an externally constructed code (GTMX or plain column lists),
    validate declared parameters, and certify via the overlap bound."""
    code = _read_any(path, length)
    if weight is not None:
        for j, col in enumerate(code.columns):
            if len(col) != weight:
                raise ValueError(
                    f"declared weight {weight} but column {j} has weight {len(col)}"
                )
    ws = {len(c) for c in code.columns}
    uniform_w = ws.pop() if len(ws) == 1 else None
    mu, pair = max_overlap(code) if code.n >= 2 else (0, (0, 0))
    if overlap is not None and mu > overlap:
        raise ValueError(
            f"declared overlap {overlap} but columns {pair} intersect in {mu} rows"
        )
    if distance is not None and uniform_w is not None:
        # constant-weight code of Hamming distance d_H has mu <= w - d_H/2
        bound = uniform_w - distance // 2
        if mu > bound:
            raise ValueError(
                f"declared distance {distance} implies overlap <= {bound}, "
                f"but columns {pair} intersect in {mu} rows"
            )
    if uniform_w is not None and mu >= 1:
        cert = (uniform_w - 1) // mu
    elif uniform_w is not None and code.n >= 2:
        cert = code.n - 1  # disjoint columns
    else:
        cert = 0
    meta = CodeMeta(
        certified_d=cert,
        weight=uniform_w,
        max_overlap=mu if code.n >= 2 else 0,
        descriptor=code.meta.descriptor or f"import({getattr(path, 'name', path)})",
    )
    return BinaryCode(code.t, code.n, code.columns, meta)


def _read_any(path, length: int | None) -> BinaryCode:
    own = isinstance(path, (str, bytes))
    f = open(path, "r", encoding="utf-8") if own else path
    try:
        text = f.read()
    finally:
        if own:
            f.close()
    if text.lstrip().startswith("GTMX"):
        from io import StringIO

        return load(StringIO(text))
    cols = []
    maxrow = -1
    for i, line in enumerate(text.splitlines()):
        line = line.split("#")[0].strip()
        if not line:
            continue
        try:
            entries = tuple(sorted(int(x) for x in line.split()))
        except ValueError:
            raise ValueError(f"line {i + 1}: not a list of row indices") from None
        if len(set(entries)) != len(entries):
            raise ValueError(f"line {i + 1}: duplicate row index")
        cols.append(entries)
        if entries:
            maxrow = max(maxrow, entries[-1])
    t = length if length is not None else maxrow + 1
    return BinaryCode(t, len(cols), tuple(cols), CodeMeta())
