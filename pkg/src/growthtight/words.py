"""Freely reduced words over a symmetric alphabet.

Letters are small ints: generator i is 2*i and its inverse is 2*i + 1, so
flipping the low bit inverts a letter and the int order doubles as the
shortlex base order (a < a- < b < b- < ...).
"""
from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import AlphabetMismatchError, InvalidInputError, ResourceLimitError

DEFAULT_ENUMERATION_CUTOFF = 14


@dataclass(frozen=True)
class Alphabet:
    """Symmetric alphabet of a free group of the given rank."""

    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise InvalidInputError(f"rank must be >= 1, got {self.rank}")
        if self.rank > len(string.ascii_lowercase):
            raise InvalidInputError(f"rank must be <= 26, got {self.rank}")

    @property
    def letters(self) -> range:
        return range(2 * self.rank)

    @staticmethod
    def inverse(letter: int) -> int:
        return letter ^ 1

    def letter_name(self, letter: int) -> str:
        name = string.ascii_lowercase[letter // 2]
        return name + "-" if letter & 1 else name

    def parse_letter(self, token: str, position: int = 0) -> int:
        base = token[0] if token else ""
        index = string.ascii_lowercase.find(base)
        suffix = token[1:]
        if index < 0 or index >= self.rank or suffix not in ("", "-", "'"):
            raise InvalidInputError(
                f"unknown letter {token!r} at token {position} (rank {self.rank})"
            )
        return 2 * index + (1 if suffix else 0)

    @property
    def identity(self) -> "ReducedWord":
        return ReducedWord(self, ())

    def word(self, text: str) -> "ReducedWord":
        return parse_word(self, text)


class ReducedWord:
    """Immutable freely reduced word; supports *, ~ (inverse), ** and shortlex <."""

    __slots__ = ("alphabet", "letters")

    def __init__(self, alphabet: Alphabet, letters: tuple[int, ...]):
        self.alphabet = alphabet
        self.letters = letters

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ReducedWord)
            and self.alphabet == other.alphabet
            and self.letters == other.letters
        )

    def __hash__(self) -> int:
        return hash((self.alphabet.rank, self.letters))

    def __lt__(self, other: "ReducedWord") -> bool:
        _check_same_alphabet(self, other)
        return (len(self.letters), self.letters) < (len(other.letters), other.letters)

    def __le__(self, other: "ReducedWord") -> bool:
        return self == other or self < other

    def __mul__(self, other: "ReducedWord") -> "ReducedWord":
        _check_same_alphabet(self, other)
        return ReducedWord(self.alphabet, _reduce_concat(self.letters, other.letters))

    def __invert__(self) -> "ReducedWord":
        return ReducedWord(
            self.alphabet, tuple(x ^ 1 for x in reversed(self.letters))
        )

    def __pow__(self, n: int) -> "ReducedWord":
        if n < 0:
            return (~self) ** (-n)
        result = self.alphabet.identity
        for _ in range(n):
            result = result * self
        return result

    def __repr__(self) -> str:
        return f"<word {format_word(self)!r}>"

    def conjugated_by(self, w: "ReducedWord") -> "ReducedWord":
        return w * self * ~w

    def exponent_sums(self) -> tuple[int, ...]:
        sums = [0] * self.alphabet.rank
        for x in self.letters:
            sums[x // 2] += -1 if x & 1 else 1
        return tuple(sums)

    def to_text(self) -> str:
        return format_word(self)


def _check_same_alphabet(u: ReducedWord, v: ReducedWord) -> None:
    if u.alphabet != v.alphabet:
        raise AlphabetMismatchError(
            f"alphabet ranks differ: {u.alphabet.rank} vs {v.alphabet.rank}"
        )


def _reduce_concat(left: tuple[int, ...], right: Sequence[int]) -> tuple[int, ...]:
    stack = list(left)
    for x in right:
        if stack and stack[-1] == x ^ 1:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def free_reduce(alphabet: Alphabet, raw: Iterable[int | str]) -> ReducedWord:
    """Freely reduce a raw letter sequence (ints or letter names)."""
    letters = []
    for pos, item in enumerate(raw):
        if isinstance(item, str):
            x = alphabet.parse_letter(item, pos)
        else:
            x = item
            if x not in alphabet.letters:
                raise InvalidInputError(f"letter code {x} out of range at token {pos}")
        if letters and letters[-1] == x ^ 1:
            letters.pop()
        else:
            letters.append(x)
    return ReducedWord(alphabet, tuple(letters))


def multiply(u: ReducedWord, v: ReducedWord) -> ReducedWord:
    return u * v


def cyclic_reduce(w: ReducedWord) -> tuple[ReducedWord, ReducedWord]:
    """Split w = conjugator * core * conjugator^-1 with core cyclically reduced."""
    letters = w.letters
    prefix = []
    while len(letters) >= 2 and letters[0] == letters[-1] ^ 1:
        prefix.append(letters[0])
        letters = letters[1:-1]
    return ReducedWord(w.alphabet, letters), ReducedWord(w.alphabet, tuple(prefix))


def primitive_root(w: ReducedWord) -> tuple[ReducedWord, int]:
    """Return (r, e) with w = r**e, e >= 1 maximal; w must be non-trivial."""
    if not w:
        raise InvalidInputError("identity has no primitive root")
    core, conj = cyclic_reduce(w)
    n = len(core)
    for d in range(1, n + 1):
        if n % d:
            continue
        if core.letters == core.letters[:d] * (n // d):
            root = ReducedWord(w.alphabet, core.letters[:d])
            return root.conjugated_by(conj), n // d
    raise AssertionError("unreachable: every word is a power of itself")


def parse_word(alphabet: Alphabet, text: str) -> ReducedWord:
    """Parse the whitespace-separated letter grammar; "" and "1" denote identity."""
    stripped = text.strip()
    if stripped in ("", "1"):
        return alphabet.identity
    return free_reduce(alphabet, stripped.split())


def format_word(w: ReducedWord) -> str:
    if not w.letters:
        return "1"
    return " ".join(w.alphabet.letter_name(x) for x in w.letters)


def iter_sphere_letters(alphabet: Alphabet, r: int) -> Iterator[tuple[int, ...]]:
    """Yield the letter tuples of all reduced words of length r, in shortlex order."""
    if r < 0:
        raise InvalidInputError(f"radius must be >= 0, got {r}")
    if r == 0:
        yield ()
        return
    letters = list(alphabet.letters)
    stack = [(x,) for x in reversed(letters)]
    while stack:
        word = stack.pop()
        if len(word) == r:
            yield word
            continue
        forbidden = word[-1] ^ 1
        for x in reversed(letters):
            if x != forbidden:
                stack.append(word + (x,))


def enumerate_sphere(
    alphabet: Alphabet, r: int, *, cutoff: int = DEFAULT_ENUMERATION_CUTOFF
) -> list[ReducedWord]:
    """All reduced words of length exactly r, shortlex sorted; guarded by cutoff."""
    if r > cutoff:
        raise ResourceLimitError(
            f"sphere radius {r} exceeds enumeration cutoff {cutoff}"
        )
    return [ReducedWord(alphabet, w) for w in iter_sphere_letters(alphabet, r)]


def enumerate_ball(
    alphabet: Alphabet, r: int, *, cutoff: int = DEFAULT_ENUMERATION_CUTOFF
) -> list[ReducedWord]:
    """All reduced words of length <= r, shortlex sorted."""
    out: list[ReducedWord] = []
    for i in range(r + 1):
        out.extend(enumerate_sphere(alphabet, i, cutoff=cutoff))
    return out


def sphere_size(alphabet: Alphabet, r: int) -> int:
    """Closed-form sphere count 2k(2k-1)^(r-1); cross-checked against enumeration."""
    k = alphabet.rank
    if r == 0:
        return 1
    return 2 * k * (2 * k - 1) ** (r - 1)
