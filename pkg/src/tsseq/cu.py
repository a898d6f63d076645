"""Mod-2 binomials, completely unadmissible sequences, ordinal indices.

A *CU sequence* is a tuple of integers ``(j_1, ..., j_k)`` with
``j_s >= 2*j_{s+1} + 1`` for every adjacent pair.  CU sequences of all
lengths are totally ordered: longer sequences come first, sequences of
equal length are compared right-lexicographically (last entries first).

Filtration indices live in the Grothendieck group of ordinals below
``omega^(omega+2)``: finite integer combinations of ``omega^i`` for
finite ``i``, of ``omega^omega`` and of ``omega^(omega+1)``, compared
right-lexicographically on exponents.
"""

from __future__ import annotations

from functools import total_ordering
from typing import Iterable, Tuple

CUSeq = Tuple[int, ...]


class ConcatenationNotCU(ValueError):
    """Joining two CU sequences violated the junction inequality."""


def binom_mod2(a: int, b: int) -> int:
    """Coefficient of t^b in (1+t)^a over F_2, for arbitrary integers.

    For a < 0 the series expansion is used in the closed form
    binom(-n, b) = binom(n+b-1, b) mod 2.
    """
    if b < 0:
        return 0
    if a < 0:
        a = -a + b - 1
    # Lucas: nonzero iff the bits of b are a subset of the bits of a.
    return 1 if (a & b) == b else 0


@total_ordering
class _InfiniteExcess:
    """Excess of the empty sequence; larger than every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("_InfiniteExcess")

    def __repr__(self):
        return "INFINITE_EXCESS"


INFINITE_EXCESS = _InfiniteExcess()


def cu_is_valid(seq: Iterable[int]) -> bool:
    """True iff every adjacent pair satisfies j_s >= 2*j_{s+1} + 1."""
    entries = tuple(seq)
    return all(entries[s] >= 2 * entries[s + 1] + 1 for s in range(len(entries) - 1))


def cu_length(seq: CUSeq) -> int:
    return len(seq)


def cu_degree(seq: CUSeq) -> int:
    return sum(seq)


def cu_excess(seq: CUSeq):
    """Last entry; the empty sequence has infinite excess."""
    return seq[-1] if seq else INFINITE_EXCESS


def excess_at_least(seq: CUSeq, n: int) -> bool:
    return not seq or seq[-1] >= n


def cu_compare(a: CUSeq, b: CUSeq) -> int:
    """Total order on CU sequences of all lengths; -1, 0 or 1.

    Longer sequences are smaller.  Equal lengths compare right
    lexicographically, last entries first.
    """
    if len(a) != len(b):
        return -1 if len(a) > len(b) else 1
    for x, y in zip(reversed(a), reversed(b)):
        if x != y:
            return -1 if x < y else 1
    return 0


def cu_concat(a: CUSeq, b: CUSeq) -> CUSeq:
    """The joined sequence [a, b]; raises ConcatenationNotCU on bad junction."""
    a, b = tuple(a), tuple(b)
    if a and b and a[-1] < 2 * b[0] + 1:
        raise ConcatenationNotCU(f"cannot join {a} and {b}: {a[-1]} < {2 * b[0] + 1}")
    out = a + b
    if not cu_is_valid(out):
        raise ConcatenationNotCU(f"{out} is not CU")
    return out


# Exponent keys for OrdinalIndex terms: finite i -> (0, i); omega -> (1, 0);
# omega + 1 -> (1, 1).  Tuple comparison of keys is the exponent order.
_OMEGA = (1, 0)
_OMEGA_PLUS_ONE = (1, 1)


def _finite(i: int):
    return (0, i)


@total_ordering
class OrdinalIndex:
    """Element of the Grothendieck group of ordinals below omega^(omega+2).

    Stored as a sparse map from exponent keys to nonzero integer
    coefficients.  Addition is componentwise; comparison is right
    lexicographic (largest differing exponent decides).
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for key, coeff in dict(terms).items():
                if coeff:
                    clean[key] = coeff
        self._terms = clean

    @classmethod
    def zero(cls) -> "OrdinalIndex":
        return cls()

    @classmethod
    def finite(cls, coeff: int, power: int = 0) -> "OrdinalIndex":
        """coeff * omega^power for finite power."""
        return cls({_finite(power): coeff})

    @classmethod
    def omega_omega(cls, coeff: int) -> "OrdinalIndex":
        return cls({_OMEGA: coeff})

    @classmethod
    def omega_omega_plus_one(cls, coeff: int) -> "OrdinalIndex":
        return cls({_OMEGA_PLUS_ONE: coeff})

    def __add__(self, other: "OrdinalIndex") -> "OrdinalIndex":
        terms = dict(self._terms)
        for key, coeff in other._terms.items():
            terms[key] = terms.get(key, 0) + coeff
        return OrdinalIndex(terms)

    def __neg__(self) -> "OrdinalIndex":
        return OrdinalIndex({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "OrdinalIndex") -> "OrdinalIndex":
        return self + (-other)

    def is_zero(self) -> bool:
        return not self._terms

    def leading_exponent(self):
        """Largest exponent key carrying a nonzero coefficient, or None."""
        return max(self._terms) if self._terms else None

    def __eq__(self, other):
        return isinstance(other, OrdinalIndex) and self._terms == other._terms

    def __lt__(self, other: "OrdinalIndex") -> bool:
        keys = set(self._terms) | set(other._terms)
        for key in sorted(keys, reverse=True):
            a = self._terms.get(key, 0)
            b = other._terms.get(key, 0)
            if a != b:
                return a < b
        return False

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "0"
        bits = []
        for key in sorted(self._terms):
            coeff = self._terms[key]
            if key == _OMEGA:
                sym = "w^w"
            elif key == _OMEGA_PLUS_ONE:
                sym = "w^(w+1)"
            elif key == _finite(0):
                sym = ""
            elif key == _finite(1):
                sym = "w"
            else:
                sym = f"w^{key[1]}"
            if sym:
                bits.append(f"{coeff}{sym}" if coeff != 1 else sym)
            else:
                bits.append(str(coeff))
        return "+".join(bits).replace("+-", "-")


def mu_tahss(seq: CUSeq) -> OrdinalIndex:
    """sum_s j_s * omega^(s-1); indexes cells of a fixed-length tower."""
    terms = {_finite(s): j for s, j in enumerate(seq)}
    return OrdinalIndex(terms)


def mu_tgss(seq: CUSeq) -> OrdinalIndex:
    """mu(J) - |J| * omega^omega; longer cells sit lower."""
    return mu_tahss(seq) + OrdinalIndex.omega_omega(-len(seq))


def mu_tehpss(seq: CUSeq, m: int) -> OrdinalIndex:
    """mu[J] + m * omega^(omega+1); requires excess(J) >= 2m+1."""
    if m < 0:
        raise ValueError("sphere coordinate must be >= 0")
    if not excess_at_least(seq, 2 * m + 1):
        raise ValueError(f"cell ({seq}, {m}) needs excess >= {2 * m + 1}")
    return mu_tgss(seq) + OrdinalIndex.omega_omega_plus_one(m)
