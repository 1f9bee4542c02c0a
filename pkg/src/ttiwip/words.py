"""Freely reduced words in a free group and automorphisms given by generator images.

A letter is a nonzero int: ``+k`` is the k-th generator (1-based), ``-k`` its
inverse.  Generator k is printed ``a``..``z`` for k <= 26 and ``x1``, ``x2``,
... beyond that; inverses carry a ``^-1`` suffix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .folding import fold_labeled_graph

_ALPHA = "abcdefghijklmnopqrstuvwxyz"


def generator_name(index: int) -> str:
    """Printable name of the 0-based generator ``index``."""
    if index < 0:
        raise ValueError(f"negative generator index {index}")
    if index < 26:
        return _ALPHA[index]
    return f"x{index - 25}"


def letter_name(letter: int) -> str:
    if letter == 0:
        raise ValueError("0 is not a letter")
    name = generator_name(abs(letter) - 1)
    return name if letter > 0 else name + "^-1"


def parse_letter(token: str) -> int:
    """Inverse of letter_name: ``a`` -> 1, ``a^-1`` -> -1, ``x2`` -> 28."""
    tok = token.strip()
    sign = 1
    if tok.endswith("^-1"):
        sign = -1
        tok = tok[:-3]
    elif tok.endswith("^1"):
        tok = tok[:-2]
    if not tok:
        raise ValueError(f"empty letter token {token!r}")
    if tok in _ALPHA:
        return sign * (_ALPHA.index(tok) + 1)
    if tok[0] == "x" and tok[1:].isdigit() and len(tok) > 1:
        return sign * (int(tok[1:]) + 26)
    raise ValueError(f"unrecognized letter token {token!r}")


def letter_key(letter: int) -> tuple[int, int]:
    """Total order on letters: a < a^-1 < b < b^-1 < ...  (used for canonical forms)."""
    return (abs(letter), 0 if letter > 0 else 1)


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    """Stack-based free reduction of a letter sequence (no rank check)."""
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word in the rank-``rank`` free group."""

    rank: int
    letters: tuple[int, ...]

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")
        for i, x in enumerate(self.letters):
            if x == 0 or abs(x) > self.rank:
                raise ValueError(f"letter {x} out of range for rank {self.rank}")
            if i > 0 and self.letters[i - 1] == -x:
                raise ValueError(f"word {self.letters} is not freely reduced at position {i}")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(letter_name(x) for x in self.letters)

    @property
    def is_trivial(self) -> bool:
        return not self.letters

    def inverse(self) -> "Word":
        return Word(self.rank, tuple(-x for x in reversed(self.letters)))

    def times(self, other: "Word") -> "Word":
        if self.rank != other.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")
        return Word(self.rank, free_reduce(self.letters + other.letters))

    def cyclic_reduce(self) -> tuple["Word", "Word"]:
        """Return (core, u) with self = u * core * u^-1 and core cyclically reduced."""
        letters = list(self.letters)
        prefix: list[int] = []
        while len(letters) >= 2 and letters[0] == -letters[-1]:
            prefix.append(letters[0])
            letters = letters[1:-1]
        return Word(self.rank, tuple(letters)), Word(self.rank, tuple(prefix))

    def is_cyclically_reduced(self) -> bool:
        return len(self.letters) < 2 or self.letters[0] != -self.letters[-1]


def reduce(rank: int, letters: Sequence[int]) -> Word:
    """Freely reduce a raw letter sequence into a Word."""
    for x in letters:
        if x == 0 or abs(x) > rank:
            raise ValueError(f"letter {x} out of range for rank {rank}")
    return Word(rank, free_reduce(letters))


def word_from_str(rank: int, text: str) -> Word:
    """Parse a whitespace-separated word like ``a b^-1 c``; ``1`` is the trivial word."""
    text = text.strip()
    if text in ("", "1"):
        return Word(rank, ())
    letters = [parse_letter(tok) for tok in text.split()]
    return reduce(rank, letters)


def canonical_rotation(w: Word) -> Word:
    """Lexicographically least rotation of the cyclic reduction of w.

    Inversion is not identified: a conjugacy class and its inverse class get
    distinct canonical forms.
    """
    core, _ = w.cyclic_reduce()
    n = len(core.letters)
    if n == 0:
        return core
    best = min(
        (core.letters[r:] + core.letters[:r] for r in range(n)),
        key=lambda t: tuple(letter_key(x) for x in t),
    )
    return Word(w.rank, best)


def conjugate_equal(u: Word, w: Word) -> bool:
    """True iff u and w are conjugate, i.e. cyclic reductions agree up to rotation."""
    if u.rank != w.rank:
        raise ValueError(f"rank mismatch: {u.rank} vs {w.rank}")
    cu, _ = u.cyclic_reduce()
    cw, _ = w.cyclic_reduce()
    if len(cu) != len(cw):  # rotations preserve length; skip the quadratic scan
        return False
    return canonical_rotation(cu).letters == canonical_rotation(cw).letters


def generates_whole_group(words: Sequence[Word], rank: int) -> bool:
    """Decide whether the given words generate all of the rank-``rank`` free group.

    Folds the wedge of word-loops over the rank-rose; the subgroup is the whole
    group iff the folded based graph, after trimming hanging trees away from
    the basepoint, is the rose itself (one vertex, each generator looping once).
    """
    for w in words:
        if w.rank != rank:
            raise ValueError(f"word of rank {w.rank} in rank-{rank} check")
    edges: list[tuple[int, int, int]] = []
    n_vertices = 1
    for w in words:
        prev = 0
        for i, x in enumerate(w.letters):
            nxt = 0 if i == len(w.letters) - 1 else n_vertices
            if nxt != 0:
                n_vertices += 1
            if x > 0:
                edges.append((prev, nxt, x))
            else:
                edges.append((nxt, prev, -x))
            prev = nxt
    vertex_map, folded = fold_labeled_graph(n_vertices, edges)
    base = vertex_map[0]
    # trim degree-1 vertices other than the basepoint
    alive_edges = set(range(len(folded)))
    while True:
        deg: dict[int, int] = {}
        for i in alive_edges:
            u, v, _ = folded[i]
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        removable = {
            i
            for i in alive_edges
            if (folded[i][0] != base and deg.get(folded[i][0], 0) == 1)
            or (folded[i][1] != base and deg.get(folded[i][1], 0) == 1)
        }
        if not removable:
            break
        alive_edges -= removable
    labels = sorted(folded[i][2] for i in alive_edges)
    if labels != list(range(1, rank + 1)):
        return False
    return all(folded[i][0] == base and folded[i][1] == base for i in alive_edges)


@dataclass(frozen=True)
class Automorphism:
    """An automorphism of the rank-N free group, given by generator images.

    Images must be nonempty reduced words that generate the whole group
    (surjective endomorphisms of a free group are automorphisms, free groups
    being Hopfian); this is checked at construction by folding.
    """

    rank: int
    images: tuple[Word, ...]

    def __post_init__(self):
        if self.rank < 2:
            raise ValueError(f"rank must be >= 2, got {self.rank}")
        if len(self.images) != self.rank:
            raise ValueError(f"expected {self.rank} images, got {len(self.images)}")
        for i, w in enumerate(self.images):
            if w.rank != self.rank:
                raise ValueError(f"image of {generator_name(i)} has rank {w.rank}")
            if w.is_trivial:
                raise ValueError(f"image of {generator_name(i)} is trivial")
        if not generates_whole_group(self.images, self.rank):
            raise ValueError("images do not generate the whole free group")

    @classmethod
    def identity(cls, rank: int) -> "Automorphism":
        return cls(rank, tuple(Word(rank, (k,)) for k in range(1, rank + 1)))

    @classmethod
    def from_strings(cls, rank: int, images: Sequence[str]) -> "Automorphism":
        return cls(rank, tuple(word_from_str(rank, s) for s in images))

    def apply(self, w: Word) -> Word:
        if w.rank != self.rank:
            raise ValueError(f"rank mismatch: {w.rank} vs {self.rank}")
        out: list[int] = []
        for x in w.letters:
            img = self.images[abs(x) - 1].letters
            chunk = img if x > 0 else tuple(-y for y in reversed(img))
            for y in chunk:
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        return Word(self.rank, tuple(out))

    def compose(self, other: "Automorphism") -> "Automorphism":
        """Return self o other (apply other first)."""
        if self.rank != other.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")
        return Automorphism(self.rank, tuple(self.apply(w) for w in other.images))

    def power(self, m: int) -> "Automorphism":
        if m < 0:
            raise ValueError("negative powers are not supported (no inversion)")
        result = Automorphism.identity(self.rank)
        for _ in range(m):
            result = self.compose(result)
        return result

    def __str__(self) -> str:
        return "; ".join(
            f"{generator_name(i)} -> {w}" for i, w in enumerate(self.images)
        )


# --- automorphism DSL -------------------------------------------------------
#
# Optional header line `rank N`; one line per generator, `a -> b c^-1 a`;
# `#` starts a comment; letters are whitespace separated.


def parse_automorphism(text: str, auto_reduce: bool = False) -> Automorphism:
    """Parse the automorphism DSL.  Non-reduced images are rejected unless
    auto_reduce is set."""
    rank: Optional[int] = None
    assignments: dict[int, list[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("rank"):
            parts = line.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise ValueError(f"line {lineno}: malformed rank header {line!r}")
            rank = int(parts[1])
            continue
        if "->" not in line:
            raise ValueError(f"line {lineno}: expected `gen -> image`, got {line!r}")
        lhs, rhs = line.split("->", 1)
        gen = parse_letter(lhs.strip())
        if gen <= 0:
            raise ValueError(f"line {lineno}: left side must be a positive generator")
        if gen in assignments:
            raise ValueError(f"line {lineno}: duplicate image for {letter_name(gen)}")
        try:
            assignments[gen] = [parse_letter(tok) for tok in rhs.split()]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    if not assignments:
        raise ValueError("no generator images given")
    if rank is None:
        rank = len(assignments)
    if sorted(assignments) != list(range(1, rank + 1)):
        missing = sorted(set(range(1, rank + 1)) - set(assignments))
        extra = sorted(set(assignments) - set(range(1, rank + 1)))
        raise ValueError(
            f"images must cover generators 1..{rank}; "
            f"missing {[letter_name(g) for g in missing]}, "
            f"unexpected {[letter_name(g) for g in extra]}"
        )
    images = []
    for g in range(1, rank + 1):
        raw_letters = assignments[g]
        reduced = free_reduce(raw_letters)
        if tuple(raw_letters) != reduced and not auto_reduce:
            raise ValueError(
                f"image of {letter_name(g)} is not freely reduced "
                "(pass auto_reduce to accept)"
            )
        images.append(reduce(rank, reduced))
    return Automorphism(rank, tuple(images))


def parse_inline_map(text: str, auto_reduce: bool = False) -> Automorphism:
    """Parse the `a->b; b->c` inline form used on command lines."""
    return parse_automorphism(text.replace(";", "\n"), auto_reduce=auto_reduce)


def print_automorphism(aut: Automorphism) -> str:
    """Canonical DSL form; parse(print(aut)) == aut and print is injective."""
    lines = [f"rank {aut.rank}"]
    for i, w in enumerate(aut.images):
        lines.append(f"{generator_name(i)} -> {w}")
    return "\n".join(lines) + "\n"


def enumerate_conjugacy_classes(rank: int, max_length: int) -> Iterator[Word]:
    """Yield one canonical representative per conjugacy class of nontrivial
    cyclically reduced words of length <= max_length.

    Classes of a word and of its inverse are listed separately.  Order:
    ascending length, then lexicographic in the letter order a < a^-1 < b < ...
    """
    alphabet = sorted(
        itertools.chain(range(1, rank + 1), (-k for k in range(1, rank + 1))),
        key=letter_key,
    )
    for length in range(1, max_length + 1):
        stack: list[tuple[int, ...]] = [()]
        while stack:
            prefix = stack.pop()
            if len(prefix) == length:
                if prefix[0] != -prefix[-1] or length == 1:
                    w = Word(rank, prefix)
                    if canonical_rotation(w).letters == prefix:
                        yield w
                continue
            # depth-first in reverse alphabet order so pops come out sorted
            for x in reversed(alphabet):
                if prefix and prefix[-1] == -x:
                    continue
                stack.append(prefix + (x,))
