"""Rewriting systems for the lower-indexed Dyer-Lashof style algebras.

Two algebras appear, both with F_2 coefficients and monomials stored as
tuples of operation indices:

* the classical algebra on generators ``Q^j`` whose normal form is the
  admissible basis (``j_s <= 2 j_{s+1}``), rewritten by the Adem
  relations, and
* the bar-operation algebra on generators ``Qb^j`` (internal degree
  ``j - 1``) whose normal form is the completely unadmissible basis,
  rewritten by

    (1)  a word dies whenever a contiguous factor has leading entry
         smaller than (sum of the rest of the factor) + weight, and
    (2)  for s < r <= 2s:
         Qb^r Qb^s = sum_l binom(2s-r+1+2l, l) Qb^(2s+1+l) Qb^(r-s-1-l).

F_2 sums of monomials are sets of tuples combined by symmetric
difference.  The dual Steenrod action is computed by the Nishida rule
``Sq^r_* Q^s = sum_t binom(s-r, r-2t) Q^(s-r+t) Sq^t_*`` followed by
rewriting to normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterable, Tuple

from tsseq.cu import binom_mod2, cu_is_valid, excess_at_least

Word = Tuple[int, ...]
WordSet = FrozenSet[Word]


class NotInAdemRange(ValueError):
    """transfer_length2 requires an admissible pair s < r <= 2s."""


def _xor(total: set, words: Iterable[Word]) -> None:
    for w in words:
        if w in total:
            total.discard(w)
        else:
            total.add(w)


def word_degree(word: Word, weight: int) -> int:
    """Internal degree of Qb^word applied to the weight-n bottom class."""
    return weight + sum(j - 1 for j in word)


# ---------------------------------------------------------------------------
# admissible-basis rewriting (Q-algebra)
# ---------------------------------------------------------------------------

def is_admissible(word: Word) -> bool:
    return all(word[i] <= 2 * word[i + 1] for i in range(len(word) - 1))


def _adem_pair(r: int, s: int) -> WordSet:
    """Expansion of the inadmissible pair Q^r Q^s, r > 2s."""
    out: set = set()
    for t in range((r + 1) // 2, r + s + 1):
        if binom_mod2(t + s - r, 2 * t - r):
            _xor(out, [(r + s - t, t)])
    return frozenset(out)


def adem_rewrite(element: Iterable[Word], weight: int = 0) -> WordSet:
    """Normal form in the weight-n Q-algebra: admissible words of excess >= n.

    Words whose leading entry violates j_1 >= j_2 + ... + j_k + weight are
    dropped.  Length and total degree of surviving words are preserved.
    """
    result: set = set()
    stack = [tuple(w) for w in element]
    while stack:
        word = stack.pop()
        if any(j < 0 for j in word):
            continue
        if word and word[0] < sum(word[1:]) + weight:
            continue
        bad = None
        for i in range(len(word) - 1):
            if word[i] > 2 * word[i + 1]:
                bad = i
                break
        if bad is None:
            _xor(result, [word])
            continue
        for r2, s2 in _adem_pair(word[bad], word[bad + 1]):
            stack.append(word[:bad] + (r2, s2) + word[bad + 2 :])
    return frozenset(result)


# ---------------------------------------------------------------------------
# CU-basis rewriting (bar operations)
# ---------------------------------------------------------------------------

def _bar_pair(r: int, s: int) -> WordSet:
    """Expansion of Qb^r Qb^s for s < r <= 2s."""
    out: set = set()
    for ell in range(r - s):
        if binom_mod2(2 * s - r + 1 + 2 * ell, ell):
            _xor(out, [(2 * s + 1 + ell, r - s - 1 - ell)])
    return frozenset(out)


def _factor_annihilates(word: Word, weight: int) -> bool:
    """Relation (1) applied to every contiguous factor of the word."""
    k = len(word)
    for a in range(k):
        tail = 0
        if word[a] < weight:
            return True
        for b in range(a + 1, k):
            tail += word[b]
            if word[a] < tail + weight:
                return True
    return False


@lru_cache(maxsize=None)
def _bar_normalize_word(word: Word, weight: int, strategy: str) -> WordSet:
    if _factor_annihilates(word, weight):
        return frozenset()
    indices = range(len(word) - 1)
    if strategy == "rightmost":
        indices = reversed(indices)
    elif strategy != "leftmost":
        raise ValueError(f"unknown strategy {strategy!r}")
    for i in indices:
        r, s = word[i], word[i + 1]
        if r >= 2 * s + 1:
            continue
        # relation (1) already disposed of r <= s, so s < r <= 2s here
        out: set = set()
        for pair in _bar_pair(r, s):
            _xor(out, _bar_normalize_word(word[:i] + pair + word[i + 2 :], weight, strategy))
        return frozenset(out)
    return frozenset([word])


def bar_rewrite(element: Iterable[Word], weight: int, strategy: str = "rightmost") -> WordSet:
    """Normal form in the weight-n bar algebra: CU words of excess >= n."""
    if weight < 1:
        raise ValueError("bar operations are defined for weight >= 1")
    result: set = set()
    for word in element:
        _xor(result, _bar_normalize_word(tuple(word), weight, strategy))
    return frozenset(result)


# ---------------------------------------------------------------------------
# dual Steenrod action
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _nishida_word(r: int, word: Word) -> WordSet:
    """Sq^r_* on a raw bar word, before rewriting; recursion over the word."""
    if not word:
        return frozenset([()]) if r == 0 else frozenset()
    s, rest = word[0], word[1:]
    out: set = set()
    for t in range(r // 2 + 1):
        if not binom_mod2(s - r, r - 2 * t):
            continue
        lead = s - r + t
        if lead < 0:
            continue
        _xor(out, [(lead,) + w for w in _nishida_word(t, rest)])
    return frozenset(out)


def nishida_action(r: int, element: Iterable[Word], weight: int, strategy: str = "rightmost") -> WordSet:
    """Dual Steenrod operation of degree r on a bar element; drops degree by r."""
    if r < 0:
        raise ValueError("Steenrod degree must be >= 0")
    raw: set = set()
    for word in element:
        _xor(raw, _nishida_word(r, tuple(word)))
    return bar_rewrite(raw, weight, strategy)


# ---------------------------------------------------------------------------
# length-2 transfer and suspension
# ---------------------------------------------------------------------------

def transfer_length2(r: int, s: int) -> WordSet:
    """Transfer of Q^r Q^s to the wreath summand, for s < r <= 2s.

    Returns the wreath words Q^a wr Q^b as pairs; every correction term
    beyond the leading (r, s) satisfies a >= 2b + 1.
    """
    if not s < r <= 2 * s:
        raise NotInAdemRange(f"need s < r <= 2s, got r={r}, s={s}")
    out: set = {(r, s)}
    for a, b in _bar_pair(r, s):
        assert a >= 2 * b + 1
        _xor(out, [(a, b)])
    return frozenset(out)


def wreath_is_allowable(word: Word, weight: int) -> bool:
    """Iterated-extended-power excess condition at every position."""
    return all(word[i] >= sum(word[i + 1 :]) + weight for i in range(len(word)))


def suspension_truncate(t: int, j: int, y_degree: int) -> int:
    """1 iff Q^j survives t-fold desuspension against a class of that degree."""
    if t < 0:
        raise ValueError("suspension count must be >= 0")
    return 1 if j >= y_degree else 0


# ---------------------------------------------------------------------------
# element wrapper
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BarElement:
    """F_2 sum of bar monomials over a fixed bottom weight."""

    weight: int
    support: WordSet

    @classmethod
    def from_words(cls, weight: int, words: Iterable[Word]) -> "BarElement":
        return cls(weight, frozenset(tuple(w) for w in words))

    def normalize(self, strategy: str = "rightmost") -> "BarElement":
        return BarElement(self.weight, bar_rewrite(self.support, self.weight, strategy))

    def is_normal(self) -> bool:
        return all(
            cu_is_valid(w) and excess_at_least(w, self.weight) for w in self.support
        )

    def degree(self):
        degs = {word_degree(w, self.weight) for w in self.support}
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous element: degrees {sorted(degs)}")
        return degs.pop() if degs else None

    def steenrod(self, r: int, strategy: str = "rightmost") -> "BarElement":
        return BarElement(self.weight, nishida_action(r, self.support, self.weight, strategy))

    def __bool__(self):
        return bool(self.support)
