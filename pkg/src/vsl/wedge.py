"""Exterior algebra over the space of degree-d forms: sparse wedge vectors,
colex ranking of basis elements, contraction by functionals, and the s-fold
contraction whose coefficients are s x s minors of functional values.

A wedge basis element is a strictly increasing tuple of indices into the
fixed monomial basis.  All coefficients live in GF(prime).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .polyspace import monomial_basis

# Values of a linear functional on the degree-d monomial basis, reduced mod p.
Functional = tuple[int, ...]


def wedge_rank(indices: tuple[int, ...]) -> int:
    """Colexicographic rank of a strictly increasing index tuple.

    rank(c_0 < c_1 < ... < c_{p-1}) = sum_j C(c_j, j+1).
    """
    rank = 0
    prev = -1
    for j, c in enumerate(indices):
        if c <= prev:
            raise ValueError(f"wedge_rank: indices not strictly increasing: {indices}")
        rank += math.comb(c, j + 1)
        prev = c
    return rank


def wedge_unrank(p: int, rank: int, size: int) -> tuple[int, ...]:
    """Inverse of wedge_rank among p-subsets of {0, ..., size-1}."""
    if p < 0 or rank < 0 or rank >= math.comb(size, p):
        raise ValueError(f"wedge_unrank: rank {rank} out of range for C({size},{p})")
    out = []
    r = rank
    c = size - 1
    for j in range(p, 0, -1):
        while math.comb(c, j) > r:
            c -= 1
        out.append(c)
        r -= math.comb(c, j)
        c -= 1
    out.reverse()
    return tuple(out)


def deletion_sign(e: tuple[int, ...], j: int) -> int:
    """Sign (-1)^j picked up by removing the factor at position j (0-based)."""
    if not 0 <= j < len(e):
        raise ValueError(f"deletion_sign: position {j} out of range for {e}")
    return -1 if j % 2 else 1


@dataclass
class WedgeVector:
    """Sparse element of the p-th wedge power of the degree-d forms on P^n.

    coeffs maps strictly increasing index tuples to nonzero values mod prime.
    """

    n: int
    d: int
    p: int
    prime: int
    coeffs: dict[tuple[int, ...], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        size = len(monomial_basis(self.n, self.d))
        cleaned = {}
        for key, val in self.coeffs.items():
            if len(key) != self.p:
                raise ValueError(f"key {key} has length != p={self.p}")
            if any(key[i] >= key[i + 1] for i in range(len(key) - 1)):
                raise ValueError(f"key {key} is not strictly increasing")
            if key and key[-1] >= size:
                raise ValueError(f"key {key} exceeds basis size {size}")
            v = val % self.prime
            if v:
                cleaned[key] = v
        self.coeffs = cleaned

    def is_zero(self) -> bool:
        return not self.coeffs

    def scaled(self, c: int) -> "WedgeVector":
        return WedgeVector(
            self.n, self.d, self.p, self.prime,
            {k: v * c % self.prime for k, v in self.coeffs.items()},
        )

    def plus(self, other: "WedgeVector") -> "WedgeVector":
        if (self.n, self.d, self.p, self.prime) != (other.n, other.d, other.p, other.prime):
            raise ValueError("adding wedge vectors from different spaces")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = (out.get(k, 0) + v) % self.prime
        return WedgeVector(self.n, self.d, self.p, self.prime, out)


def contract_terms(
    key: tuple[int, ...], phi: Functional, prime: int
) -> list[tuple[tuple[int, ...], int]]:
    """Terms of the contraction of a single basis wedge by one functional.

    Deleting position j contributes (-1)^j * phi(v_j) on the remaining tuple.
    """
    out = []
    for j, idx in enumerate(key):
        c = phi[idx] % prime
        if c:
            if j % 2:
                c = prime - c
            out.append((key[:j] + key[j + 1:], c))
    return out


def contract(phi: Functional, v: WedgeVector) -> WedgeVector:
    """Interior product: contraction of a wedge vector by one functional."""
    if v.p < 1:
        raise ValueError("contract: need p >= 1")
    out: dict[tuple[int, ...], int] = {}
    for key, coeff in v.coeffs.items():
        for rest, c in contract_terms(key, phi, v.prime):
            out[rest] = (out.get(rest, 0) + coeff * c) % v.prime
    return WedgeVector(v.n, v.d, v.p - 1, v.prime, out)


def det_mod(rows: list[list[int]], prime: int) -> int:
    """Determinant of a small square matrix over GF(prime)."""
    m = [row[:] for row in rows]
    size = len(m)
    det = 1
    for col in range(size):
        piv = next((r for r in range(col, size) if m[r][col] % prime), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det = det * m[col][col] % prime
        inv = pow(m[col][col], -1, prime)
        for r in range(col + 1, size):
            f = m[r][col] * inv % prime
            if f:
                m[r] = [(a - f * b) % prime for a, b in zip(m[r], m[col])]
    return det % prime


def gamma_value(
    functionals: list[Functional],
    indices: tuple[int, ...],
    prime: int,
    cache: dict | None = None,
) -> int:
    """Determinant det[ functionals[a](v_{indices[b]}) ] over GF(prime).

    This is the coefficient with which an s-tuple of deleted wedge factors
    enters the s-fold contraction.  Antisymmetric in both the functionals
    and the indices.
    """
    if cache is not None and indices in cache:
        return cache[indices]
    rows = [[phi[i] % prime for i in indices] for phi in functionals]
    val = det_mod(rows, prime)
    if cache is not None:
        cache[indices] = val
    return val


def alpha_terms(
    key: tuple[int, ...],
    functionals: list[Functional],
    prime: int,
    gamma_cache: dict | None = None,
) -> list[tuple[tuple[int, ...], int]]:
    """Terms of the s-fold contraction of one basis wedge.

    Sums over s-element position subsets J = {j_1 < ... < j_s}: each
    contributes (-1)^(j_1+...+j_s) times the minor of functional values at
    the deleted factors, on the wedge of the remaining p-s factors.
    """
    import itertools

    s = len(functionals)
    p = len(key)
    out = []
    for positions in itertools.combinations(range(p), s):
        deleted = tuple(key[j] for j in positions)
        g = gamma_value(functionals, deleted, prime, gamma_cache)
        if not g:
            continue
        if sum(positions) % 2:
            g = prime - g
        pos_set = set(positions)
        rest = tuple(idx for j, idx in enumerate(key) if j not in pos_set)
        out.append((rest, g))
    return out


def alpha_s(functionals: list[Functional], v: WedgeVector) -> WedgeVector:
    """s-fold contraction by a list of functionals, p >= s required.

    Agrees with composing the single contractions in sequence up to one
    overall sign depending only on s.
    """
    s = len(functionals)
    if v.p < s:
        raise ValueError(f"alpha_s: need p >= s, got p={v.p}, s={s}")
    cache: dict = {}
    out: dict[tuple[int, ...], int] = {}
    for key, coeff in v.coeffs.items():
        for rest, c in alpha_terms(key, functionals, v.prime, cache):
            out[rest] = (out.get(rest, 0) + coeff * c) % v.prime
    return WedgeVector(v.n, v.d, v.p - s, v.prime, out)
