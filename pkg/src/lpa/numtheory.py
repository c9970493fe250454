"""Residue sequences Σ^{d,r} and the partitions S1 ⊔ S2 of {1, ..., d}.

For gcd(d, r-1) = 1 put s = d - (r-1) and list 1, 1+s, 1+2s, ... mod d,
writing residues as 1..d (so 0 is written d).  The index i_r is where the
sequence hits r-1; the first i_r terms form S1 and the rest S2.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd


class PartitionError(ValueError):
    pass


def _res(x: int, d: int) -> int:
    """Representative of x mod d in 1..d."""
    return (x - 1) % d + 1


@dataclass(frozen=True)
class PartitionData:
    d: int
    r: int
    s: int
    i_r: int
    sigma: tuple[int, ...]

    @property
    def sigma1(self) -> tuple[int, ...]:
        return self.sigma[: self.i_r]

    @property
    def sigma2(self) -> tuple[int, ...]:
        return self.sigma[self.i_r:]

    @property
    def S1(self) -> frozenset[int]:
        return frozenset(self.sigma1)

    @property
    def S2(self) -> frozenset[int]:
        return frozenset(self.sigma2)

    def blocks(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return tuple(sorted(self.S1)), tuple(sorted(self.S2))

    def to_json(self) -> dict:
        s1, s2 = self.blocks()
        return {
            "d": self.d, "r": self.r, "s": self.s, "i_r": self.i_r,
            "sigma": list(self.sigma), "sigma1": list(self.sigma1),
            "sigma2": list(self.sigma2), "S1": list(s1), "S2": list(s2),
        }


def partition(d: int, r: int) -> PartitionData:
    if d < 1 or not 1 <= r <= d:
        raise PartitionError(f"need 1 <= r <= d, got d={d}, r={r}")
    if gcd(d, r - 1) != 1:
        raise PartitionError(f"gcd(d, r-1) = gcd({d}, {r - 1}) != 1")
    s = d - (r - 1)
    sigma = tuple(_res(1 + k * s, d) for k in range(d))
    target = _res(r - 1, d)
    # the term 1 + (i_r - 1)s is congruent to r - 1
    i_r = sigma.index(target) + 1
    return PartitionData(d, r, s, i_r, sigma)


def i_r_inverse_check(d: int, r: int) -> bool:
    p = partition(d, r)
    return (p.i_r * (r - 1)) % d == 1 % d


def extend_partition(d: int, n: int, r: int | None = None) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Extend S1 ⊔ S2 mod d to {1, ..., n}, where n ≡ r (mod d), 1 <= r <= d."""
    if n < 1:
        raise PartitionError("n must be positive")
    r_n = _res(n, d)
    if r is None:
        r = r_n
    elif r != r_n:
        raise PartitionError(f"n = {n} is not of the form qd + r with r = {r}")
    p = partition(d, r)
    s1 = tuple(k for k in range(1, n + 1) if _res(k, d) in p.S1)
    s2 = tuple(k for k in range(1, n + 1) if _res(k, d) in p.S2)
    return s1, s2


def achievable_partitions(d: int) -> dict[int, tuple[tuple[int, ...], tuple[int, ...]]]:
    """r -> (S1, S2) for every admissible r in 2..d+1, taken mod d into 1..d."""
    if d < 2:
        raise PartitionError("d must be at least 2")
    out = {}
    for r in range(2, d + 2):
        rr = _res(r, d)
        if gcd(d, rr - 1) == 1:
            out[rr] = partition(d, rr).blocks()
    return out


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def count_achievable_partitions(d: int) -> int:
    parts = set(achievable_partitions(d).values())
    universal = {
        ((1,), tuple(range(2, d + 1))),
        (tuple(range(1, d)), (d,)),
    }
    if not universal <= parts:
        raise AssertionError(f"universal partitions missing for d={d}")
    return len(parts)
