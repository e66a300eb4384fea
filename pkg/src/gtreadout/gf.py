"""Finite fields GF(p^k) and Reed-Solomon (MDS) q-ary codes.

Fields in scope are tiny (q <= 67), so arithmetic is table-driven and
all structural checks (irreducibility, MDS distance) are exhaustive.
Elements are canonically encoded as integers 0..q-1 by base-p packing
of polynomial coefficients: e = sum_i c_i * p^i.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = ["FieldSpec", "QaryCode", "field_make", "rs_code",
           "enumerate_codewords", "verify_mds", "DEFAULT_MODULI"]

# fixed irreducible moduli (coefficient lists, ascending degree) so that
# outputs are bit-reproducible; any irreducible choice gives the same (n,k,d)
DEFAULT_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (3, 2): (1, 0, 1),        # x^2 + 1 over GF(3)
    (2, 4): (1, 1, 0, 0, 1),  # x^4 + x + 1 over GF(2)
    (5, 2): (2, 0, 1),        # x^2 + 2 over GF(5)
}

ENUMERATION_LIMIT = 10**6


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def _poly_mulmod(a: tuple[int, ...], b: tuple[int, ...], mod: tuple[int, ...], p: int):
    """Multiply coefficient tuples and reduce by the monic modulus."""
    res = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    k = len(mod) - 1
    for deg in range(len(res) - 1, k - 1, -1):
        c = res[deg]
        if c:
            res[deg] = 0
            for i in range(k):
                res[deg - k + i] = (res[deg - k + i] - c * mod[i]) % p
    out = res[:k] + [0] * max(0, k - len(res))
    return tuple(out[:k])


def _irreducible(mod: tuple[int, ...], p: int) -> bool:
    """Exhaustive trial division by all monic polynomials of degree <= k/2."""
    k = len(mod) - 1
    if mod[-1] != 1:
        return False
    for deg in range(1, k // 2 + 1):
        for idx in range(p**deg):
            div = [idx // p**i % p for i in range(deg)] + [1]
            if _poly_divides(tuple(div), mod, p):
                return False
    return True


def _poly_divides(div: tuple[int, ...], poly: tuple[int, ...], p: int) -> bool:
    """Long division over GF(p); div must be monic. True iff remainder is 0."""
    rem = list(poly)
    dd = len(div) - 1
    for deg in range(len(rem) - 1, dd - 1, -1):
        lead = rem[deg]
        if lead:
            for i, c in enumerate(div):
                rem[deg - dd + i] = (rem[deg - dd + i] - lead * c) % p
    return all(c == 0 for c in rem[:dd])


@dataclass(frozen=True)
class FieldSpec:
    """GF(p^k) with a fixed monic irreducible modulus (unused for k=1)."""

    p: int
    k: int
    modulus: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.k < 1:
            raise ValueError("extension degree must be >= 1")
        if self.k > 1:
            mod = self.modulus
            if len(mod) != self.k + 1 or mod[-1] != 1:
                raise ValueError("modulus must be monic of degree k")
            if not _irreducible(mod, self.p):
                raise ValueError("modulus is reducible over GF(p)")

    @property
    def q(self) -> int:
        return self.p**self.k

    def _digits(self, e: int) -> tuple[int, ...]:
        return tuple(e // self.p**i % self.p for i in range(self.k))

    def _pack(self, digits) -> int:
        return sum(int(c) * self.p**i for i, c in enumerate(digits))

    @cached_property
    def add_table(self) -> np.ndarray:
        q, p, k = self.q, self.p, self.k
        a = np.arange(q)
        digs = np.stack([(a // p**i) % p for i in range(k)], axis=1)
        s = (digs[:, None, :] + digs[None, :, :]) % p
        powers = p ** np.arange(k)
        return (s * powers).sum(axis=2).astype(np.int64)

    @cached_property
    def mul_table(self) -> np.ndarray:
        q = self.q
        out = np.zeros((q, q), dtype=np.int64)
        if self.k == 1:
            a = np.arange(q)
            return (a[:, None] * a[None, :]) % self.p
        for a in range(q):
            da = self._digits(a)
            for b in range(a, q):
                v = self._pack(_poly_mulmod(da, self._digits(b), self.modulus, self.p))
                out[a, b] = out[b, a] = v
        return out

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def neg(self, a: int) -> int:
        return int(np.where(self.add_table[a] == 0)[0][0])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(np.where(self.mul_table[a] == 1)[0][0])

    def pow(self, a: int, e: int) -> int:
        r = 1
        for _ in range(e):
            r = self.mul(r, a)
        return r


@dataclass(frozen=True)
class QaryCode:
    """Linear (n, k, d)_q evaluation code; codewords are evaluations of
    all degree < k polynomials at the fixed points."""

    field: FieldSpec
    n_q: int
    k_dim: int
    evaluation_points: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.k_dim <= self.n_q:
            raise ValueError("need 1 <= k <= n")
        if len(set(self.evaluation_points)) != self.n_q:
            raise ValueError("evaluation points must be distinct")

    @property
    def d_q(self) -> int:
        return self.n_q - self.k_dim + 1

    @property
    def size(self) -> int:
        return self.field.q**self.k_dim

    @cached_property
    def point_powers(self) -> np.ndarray:
        """(k_dim, n_q) matrix of x_j^i used by the vectorized encoder."""
        F = self.field
        out = np.zeros((self.k_dim, self.n_q), dtype=np.int64)
        for j, x in enumerate(self.evaluation_points):
            acc = 1
            for i in range(self.k_dim):
                out[i, j] = acc
                acc = F.mul(acc, x)
        return out

    def encode(self, messages: np.ndarray) -> np.ndarray:
        """Encode an (N, k_dim) message block to (N, n_q) codewords."""
        F = self.field
        msgs = np.asarray(messages, dtype=np.int64)
        if msgs.ndim == 1:
            msgs = msgs[None, :]
        acc = np.zeros((msgs.shape[0], self.n_q), dtype=np.int64)
        for i in range(self.k_dim):
            term = F.mul_table[msgs[:, i][:, None], self.point_powers[i][None, :]]
            acc = F.add_table[acc, term]
        return acc


def _find_modulus(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible of degree k over GF(p)."""
    for idx in range(p**k):
        cand = tuple(idx // p**i % p for i in range(k)) + (1,)
        if _irreducible(cand, p):
            return cand
    raise AssertionError("irreducible polynomials exist for every (p, k)")


def field_make(p: int, k: int = 1, modulus: tuple[int, ...] | None = None) -> FieldSpec:
    if k > 1 and modulus is None:
        modulus = DEFAULT_MODULI.get((p, k)) or _find_modulus(p, k)
    return FieldSpec(p, k, modulus or ())


def rs_code(field: FieldSpec, n_q: int, k_dim: int) -> QaryCode:
    """Reed-Solomon code over the first n_q canonical field elements."""
    if n_q > field.q:
        raise ValueError(
            f"length {n_q} exceeds field size {field.q}; extended n=q+1 codes are not supported"
        )
    return QaryCode(field, n_q, k_dim, tuple(range(n_q)))


def message_block(code: QaryCode, start: int, stop: int) -> np.ndarray:
    """Messages start..stop-1 as big-endian base-q digit rows."""
    q, k = code.field.q, code.k_dim
    idx = np.arange(start, stop, dtype=np.int64)
    return np.stack([(idx // q ** (k - 1 - i)) % q for i in range(k)], axis=1)


def enumerate_codewords(code: QaryCode, limit: int = ENUMERATION_LIMIT) -> np.ndarray:
    """All codewords, message vectors in lexicographic (integer) order."""
    if code.size > limit:
        raise ValueError(f"code size {code.size} exceeds enumeration limit {limit}")
    return code.encode(message_block(code, 0, code.size))


def verify_mds(code: QaryCode, limit: int = ENUMERATION_LIMIT) -> bool:
    """True iff min nonzero codeword weight equals n - k + 1 (exhaustive)."""
    words = enumerate_codewords(code, limit)
    weights = (words != 0).sum(axis=1)
    nz = weights[1:]  # message 0 is the zero codeword
    return int(nz.min()) == code.d_q
