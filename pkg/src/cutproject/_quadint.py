"""Integer-pair arithmetic for values (a + b*sqrt(d))/L.

Hot loops (orbit traces, lattice enumeration) run on these pairs instead of
Fraction-backed ExactNumbers; the results are exact, only faster.  d = 0
covers purely rational contexts (b is then always zero).
"""

from __future__ import annotations

from math import isqrt


def qsign(a: int, b: int, d: int) -> int:
    """Sign of a + b*sqrt(d)."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return 1 if b > 0 else -1
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    lhs, rhs = a * a, b * b * d
    if a > 0:
        return 1 if lhs > rhs else -1
    return 1 if rhs > lhs else -1


def qfloor(na: int, nb: int, den: int, d: int) -> int:
    """floor((na + nb*sqrt(d)) / den) for den > 0."""
    if nb == 0:
        return na // den
    r = isqrt(nb * nb * d)
    if nb >= 0:
        t = r  # floor(nb*sqrt(d))
    else:
        t = -r - (0 if r * r == nb * nb * d else 1)
    k = (na + t) // den
    # certify: k <= x < k+1 (bracket is one unit wide, at most one step off)
    while qsign(na - (k + 1) * den, nb, d) >= 0:
        k += 1
    while qsign(na - k * den, nb, d) < 0:
        k -= 1
    return k


def qdiv_floor(ra: int, rb: int, ca: int, cb: int, d: int) -> int:
    """floor((ra + rb*sqrt(d)) / (ca + cb*sqrt(d))), denominator nonzero."""
    na = ra * ca - rb * cb * d
    nb = rb * ca - ra * cb
    den = ca * ca - cb * cb * d
    if den < 0:
        na, nb, den = -na, -nb, -den
    return qfloor(na, nb, den, d)


def qdiv_ceil(ra: int, rb: int, ca: int, cb: int, d: int) -> int:
    return -qdiv_floor(-ra, -rb, ca, cb, d)
