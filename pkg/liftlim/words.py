"""Alphabets, freely reduced words, the word grammar and homomorphisms.

Words are stored in syllable form: a tuple of ``(generator, exponent)`` pairs
with nonzero exponents and no two adjacent syllables on the same generator.
That is the freely reduced form, and it keeps powers such as ``a^(2^40)``
cheap to hold.
"""

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

from .errors import AlphabetMismatch, ParseError

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

Syllable = Tuple[int, int]


@dataclass(frozen=True)
class Alphabet:
    """Ordered generator names of a group presentation."""

    names: Tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        for name in names:
            if not IDENTIFIER.fullmatch(name):
                raise ValueError(f"Invalid generator name: '{name}'")
        if len(set(names)) != len(names):
            raise ValueError(f"Duplicate generator names in {', '.join(names)}")

    @classmethod
    def of(cls, *names: str) -> "Alphabet":
        return cls(tuple(names))

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name) from None

    def __str__(self) -> str:
        return "{" + ", ".join(self.names) + "}"


def _reduce(syllables: Iterable[Syllable]) -> Tuple[Syllable, ...]:
    stack: List[Syllable] = []
    for gen, exp in syllables:
        if exp == 0:
            continue
        if stack and stack[-1][0] == gen:
            merged = stack[-1][1] + exp
            stack.pop()
            if merged:
                stack.append((gen, merged))
        else:
            stack.append((gen, exp))
    return tuple(stack)


@dataclass(frozen=True)
class Word:
    """A freely reduced word over an alphabet."""

    alphabet: Alphabet
    syllables: Tuple[Syllable, ...] = field(default=())

    def __post_init__(self):
        size = len(self.alphabet)
        for gen, _ in self.syllables:
            if not 0 <= gen < size:
                raise ValueError(f"Generator index {gen} outside alphabet {self.alphabet}")
        object.__setattr__(self, "syllables", _reduce(self.syllables))

    # Constructors

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "Word":
        return cls(alphabet, ())

    @classmethod
    def generator(cls, alphabet: Alphabet, index: int, exponent: int = 1) -> "Word":
        return cls(alphabet, ((index, exponent),))

    @classmethod
    def from_letters(cls, alphabet: Alphabet, letters: Iterable[Tuple[int, int]]) -> "Word":
        return cls(alphabet, tuple((gen, sign) for gen, sign in letters))

    @classmethod
    def from_vector(cls, alphabet: Alphabet, vector: Sequence[int]) -> "Word":
        """Word a1^v1 * a2^v2 * ... for an exponent vector."""
        if len(vector) != len(alphabet):
            raise AlphabetMismatch(f"vector of length {len(vector)} over alphabet {alphabet}")
        return cls(alphabet, tuple((i, v) for i, v in enumerate(vector) if v))

    # Queries

    def letters(self) -> Iterator[Tuple[int, int]]:
        """Iterate the word letter by letter as ``(generator, sign)``."""
        for gen, exp in self.syllables:
            sign = 1 if exp > 0 else -1
            for _ in range(abs(exp)):
                yield gen, sign

    def __len__(self) -> int:
        return sum(abs(exp) for _, exp in self.syllables)

    def is_identity(self) -> bool:
        return not self.syllables

    def __bool__(self) -> bool:
        return bool(self.syllables)

    # Group operations

    def _check(self, other: "Word") -> None:
        if self.alphabet != other.alphabet:
            raise AlphabetMismatch(f"words over {self.alphabet} and {other.alphabet}")

    def __mul__(self, other: "Word") -> "Word":
        self._check(other)
        return Word(self.alphabet, self.syllables + other.syllables)

    def __invert__(self) -> "Word":
        return Word(self.alphabet, tuple((gen, -exp) for gen, exp in reversed(self.syllables)))

    def inverse(self) -> "Word":
        return ~self

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return (~self) ** (-n)
        if len(self.syllables) == 1:
            gen, exp = self.syllables[0]
            return Word(self.alphabet, ((gen, exp * n),))
        result = Word.identity(self.alphabet)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self, by: "Word") -> "Word":
        """by * self * by^-1"""
        return by * self * ~by

    def commutator(self, other: "Word") -> "Word":
        return self * other * ~self * ~other

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"


def multiply(u: Word, v: Word) -> Word:
    return u * v


def invert(w: Word) -> Word:
    return ~w


def abelianize(w: Word) -> Tuple[int, ...]:
    """Exponent sum per generator, in alphabet order."""
    vector = [0] * len(w.alphabet)
    for gen, exp in w.syllables:
        vector[gen] += exp
    return tuple(vector)


def format_word(w: Word) -> str:
    """Print a word in the grammar accepted by :func:`parse_word`."""
    if not w.syllables:
        return "1"
    parts = []
    for gen, exp in w.syllables:
        name = w.alphabet.names[gen]
        parts.append(name if exp == 1 else f"{name}^{exp}")
    return "*".join(parts)


# ============================================================================
# Homomorphisms
# ============================================================================

@dataclass(frozen=True)
class GroupHom:
    """Homomorphism given by one image word per source generator."""

    source: Alphabet
    target: Alphabet
    images: Tuple[Word, ...]

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if len(images) != len(self.source):
            raise ValueError(
                f"Homomorphism needs {len(self.source)} images, got {len(images)}"
            )
        for image in images:
            if image.alphabet != self.target:
                raise AlphabetMismatch(f"image {image} is not over target alphabet {self.target}")

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "GroupHom":
        return cls(alphabet, alphabet, tuple(Word.generator(alphabet, i) for i in range(len(alphabet))))

    @classmethod
    def from_mapping(cls, source: Alphabet, target: Alphabet, mapping: Dict[str, Word]) -> "GroupHom":
        """Build from ``{name: image}``; generators left out map to the identity."""
        unknown = set(mapping) - set(source.names)
        if unknown:
            raise AlphabetMismatch(f"generators {sorted(unknown)} not in {source}")
        images = tuple(mapping.get(name, Word.identity(target)) for name in source.names)
        return cls(source, target, images)

    @classmethod
    def from_matrix(cls, source: Alphabet, target: Alphabet, rows: Sequence[Sequence[int]]) -> "GroupHom":
        """Hom whose abelianization is the given target-by-source matrix."""
        images = tuple(
            Word.from_vector(target, [rows[r][c] for r in range(len(target))])
            for c in range(len(source))
        )
        return cls(source, target, images)

    def __call__(self, w: Word) -> Word:
        return apply_hom(self, w)

    def then(self, other: "GroupHom") -> "GroupHom":
        """``other ∘ self``: apply self first."""
        if self.target != other.source:
            raise AlphabetMismatch(f"cannot compose {self.target} with {other.source}")
        return GroupHom(self.source, other.target, tuple(other(image) for image in self.images))

    def power(self, n: int) -> "GroupHom":
        """n-fold composite of an endomorphism (n >= 0)."""
        if self.source != self.target:
            raise AlphabetMismatch("only endomorphisms have powers")
        result = GroupHom.identity(self.source)
        for _ in range(n):
            result = result.then(self)
        return result

    def matrix(self) -> Tuple[Tuple[int, ...], ...]:
        """Abelianized matrix, target rows by source columns."""
        columns = [abelianize(image) for image in self.images]
        return tuple(
            tuple(columns[c][r] for c in range(len(self.source)))
            for r in range(len(self.target))
        )

    def is_identity(self) -> bool:
        return self.source == self.target and self == GroupHom.identity(self.source)

    def __str__(self) -> str:
        pairs = ", ".join(f"{name} -> {image}" for name, image in zip(self.source.names, self.images))
        return "{" + pairs + "}"


def apply_hom(h: GroupHom, w: Word) -> Word:
    """Substitute generator images into ``w`` and freely reduce."""
    if w.alphabet != h.source:
        raise AlphabetMismatch(f"word over {w.alphabet} given to hom from {h.source}")
    syllables: List[Syllable] = []
    for gen, exp in w.syllables:
        image = h.images[gen]
        if len(image.syllables) == 1:
            g, e = image.syllables[0]
            syllables.append((g, e * exp))
        else:
            syllables.extend((image ** exp).syllables)
    return Word(h.target, tuple(syllables))


# ============================================================================
# Parser
# ============================================================================

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>-?\d+)|(?P<op>[*^()]))")


class _WordParser:
    """Recursive descent over ``expr := term ('*' term)*``,
    ``term := atom ('^' int)*``, ``atom := ident | '1' | '(' expr ')'``."""

    def __init__(self, text: str, alphabet: Alphabet, line: int = None, offset: int = 0):
        self.text = text
        self.alphabet = alphabet
        self.line = line
        self.offset = offset
        self.tokens = self._tokenize()
        self.pos = 0

    def _error(self, message: str, index: int) -> ParseError:
        return ParseError(message, self.line, self.offset + index + 1)

    def _tokenize(self):
        tokens = []
        i = 0
        while i < len(self.text):
            if self.text[i].isspace():
                i += 1
                continue
            match = _TOKEN.match(self.text, i)
            if not match:
                raise self._error(f"unexpected character '{self.text[i]}'", i)
            kind = match.lastgroup
            tokens.append((kind, match.group(kind), match.start(kind)))
            i = match.end()
        tokens.append(("end", "", len(self.text)))
        return tokens

    def _peek(self):
        return self.tokens[self.pos]

    def _next(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def parse(self) -> Word:
        word = self._expr()
        kind, value, where = self._peek()
        if kind != "end":
            raise self._error(f"unexpected '{value}'", where)
        return word

    def _expr(self) -> Word:
        word = self._term()
        while self._peek()[1] == "*" and self._peek()[0] == "op":
            self._next()
            word = word * self._term()
        return word

    def _term(self) -> Word:
        word = self._atom()
        while self._peek()[0] == "op" and self._peek()[1] == "^":
            self._next()
            kind, value, where = self._next()
            if kind != "int":
                raise self._error("expected an integer exponent", where)
            word = word ** int(value)
        return word

    def _atom(self) -> Word:
        kind, value, where = self._next()
        if kind == "ident":
            try:
                return Word.generator(self.alphabet, self.alphabet.index(value))
            except KeyError:
                raise self._error(f"unknown generator '{value}'", where) from None
        if kind == "int":
            if value == "1":
                return Word.identity(self.alphabet)
            raise self._error(f"unexpected integer '{value}'", where)
        if kind == "op" and value == "(":
            word = self._expr()
            kind, value, where = self._next()
            if value != ")" or kind != "op":
                raise self._error("expected ')'", where)
            return word
        if kind == "end":
            raise self._error("unexpected end of expression", where)
        raise self._error(f"unexpected '{value}'", where)


def parse_word(text: str, alphabet: Alphabet, line: int = None, offset: int = 0) -> Word:
    """Parse a word expression.

    Args:
        text: Expression such as ``"a*b^-2"`` or ``"(a*b)^2"``
        alphabet: Generators the expression may use
        line: Line number reported in errors (spec files)
        offset: Column offset of ``text`` within that line

    Returns:
        The freely reduced word

    Raises:
        ParseError: On malformed text or an unknown generator; the column is
            1-based and points at the offending character
    """
    return _WordParser(text, alphabet, line, offset).parse()


def parse_words(text: str, alphabet: Alphabet, line: int = None, offset: int = 0) -> List[Word]:
    """Parse a comma separated list of words; an empty string gives ``[]``."""
    words = []
    start = 0
    depth = 0
    pieces = []
    for i, char in enumerate(text + ","):
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        elif char == "," and depth == 0:
            pieces.append((text[start:i], start))
            start = i + 1
    if len(pieces) == 1 and not pieces[0][0].strip():
        return []
    for piece, where in pieces:
        if not piece.strip():
            raise ParseError("empty word in list", line, offset + where + 1)
        words.append(parse_word(piece, alphabet, line, offset + where))
    return words
