"""Memoised normal-ordering engine for quadratic rewriting systems.

Words are tuples of integer letter codes.  A rule maps an adjacent pair
``(a, b)`` to a linear combination of replacement words, or to ``None``
when the pair is already in normal order.  Canonical words are exactly
those with no reducible adjacent pair; the engine reaches them by
inserting letters one at a time at the right end, so every reduction
happens at the junction with an already canonical prefix.

Termination is the caller's responsibility (degree-then-lex orderings
whose replacements are strictly smaller).
"""

from __future__ import annotations

from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .scalarq import QScalar

Word = Tuple[int, ...]
Combo = Dict[Word, QScalar]
Rule = Callable[[int, int], Optional[List[Tuple[QScalar, Word]]]]


def add_into(acc: Combo, word: Word, coeff: QScalar) -> None:
    c = acc.get(word)
    c = coeff if c is None else c + coeff
    if c.is_zero():
        acc.pop(word, None)
    else:
        acc[word] = c


class RewriteSystem:
    """Normal forms for words under a fixed quadratic rule."""

    def __init__(self, rule: Rule):
        self.rule = rule
        self._letter_cache: Dict[Tuple[Word, int], Combo] = {}

    def append_letter(self, word: Word, letter: int) -> Combo:
        """Normal form of ``word + (letter,)`` for a canonical ``word``."""
        key = (word, letter)
        hit = self._letter_cache.get(key)
        if hit is not None:
            return hit
        if not word:
            out = {(letter,): QScalar.const(1)}
        else:
            repl = self.rule(word[-1], letter)
            if repl is None:
                out = {word + (letter,): QScalar.const(1)}
            else:
                prefix = word[:-1]
                out = {}
                for coeff, w in repl:
                    for cw, c in self.append_word(prefix, w).items():
                        add_into(out, cw, coeff * c)
        self._letter_cache[key] = out
        return out

    def append_word(self, word: Word, tail: Sequence[int]) -> Combo:
        """Normal form of ``word + tail`` for a canonical ``word``."""
        current: Combo = {word: QScalar.const(1)}
        for letter in tail:
            nxt: Combo = {}
            for w, c in current.items():
                for w2, c2 in self.append_letter(w, letter).items():
                    add_into(nxt, w2, c * c2)
            current = nxt
        return current

    def normal_form(self, word: Sequence[int]) -> Combo:
        return self.append_word((), tuple(word))

    def multiply(self, a: Combo, b: Combo) -> Combo:
        out: Combo = {}
        for wa, ca in a.items():
            for wb, cb in b.items():
                for w, c in self.append_word(wa, wb).items():
                    add_into(out, w, ca * cb * c)
        return out

    def is_canonical(self, word: Sequence[int]) -> bool:
        return all(self.rule(a, b) is None for a, b in zip(word, word[1:]))


def leftmost_normal_form(rule: Rule, word: Sequence[int], _memo=None) -> Combo:
    """Reference reduction: always rewrite the leftmost reducible pair.

    Independent of `RewriteSystem` (different strategy, no prefix
    invariant); tests compare the two to probe confluence.
    """
    memo = {} if _memo is None else _memo
    word = tuple(word)
    if word in memo:
        return memo[word]
    for p in range(len(word) - 1):
        repl = rule(word[p], word[p + 1])
        if repl is not None:
            out: Combo = {}
            for coeff, w in repl:
                sub = leftmost_normal_form(rule, word[:p] + w + word[p + 2:], memo)
                for cw, c in sub.items():
                    add_into(out, cw, coeff * c)
            break
    else:
        out = {word: QScalar.const(1)}
    memo[word] = out
    return out
