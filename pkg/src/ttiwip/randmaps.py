"""Seeded generators of rose maps and positive automorphisms for test corpora.

Positive images can never cancel, under any iteration, so positive rose maps
are train-track maps by construction; that makes them independent fixtures
for the combinatorial train-track verifier.  Positive automorphisms come from
composing elementary positive moves (append or prepend one generator to
another, or swap two), which keeps everything invertible.
"""

from __future__ import annotations

from random import Random

from .graphs import GraphMap, rose
from .words import Automorphism, Word, reduce as word_reduce


def random_positive_automorphism(
    rng: Random, rank: int, max_image_len: int = 6, moves: int = 12
) -> Automorphism:
    """Compose random elementary positive moves, skipping any that would push
    an image past max_image_len."""
    images = [Word(rank, (k,)) for k in range(1, rank + 1)]
    for _ in range(moves):
        kind = rng.randrange(3)
        if kind == 0:
            i, j = rng.randrange(rank), rng.randrange(rank)
            if i != j:
                images[i], images[j] = images[j], images[i]
            continue
        i, j = rng.randrange(rank), rng.randrange(rank)
        if i == j:
            continue
        combined = (
            images[i].letters + images[j].letters
            if kind == 1
            else images[j].letters + images[i].letters
        )
        if len(combined) > max_image_len:
            continue
        images[i] = Word(rank, combined)  # positive, so already reduced
    return Automorphism(rank, tuple(images))


def random_positive_map(rng: Random, rank: int, max_image_len: int = 4) -> GraphMap:
    """Rose map with arbitrary nonempty positive images (not necessarily an
    automorphism); always a train-track map."""
    g = rose(rank)
    images = []
    for _ in range(rank):
        length = rng.randint(1, max_image_len)
        images.append(
            g.path(0, [rng.randint(1, rank) for _ in range(length)])
        )
    return GraphMap(g, (0,), tuple(images))


def random_rose_map(rng: Random, rank: int, max_image_len: int = 3) -> GraphMap:
    """Rose map with arbitrary nonempty reduced images, inverse letters
    allowed; may or may not be a train-track map."""
    g = rose(rank)
    images = []
    for _ in range(rank):
        length = rng.randint(1, max_image_len)
        letters: list[int] = []
        while len(letters) < length:
            x = rng.choice([s * k for k in range(1, rank + 1) for s in (1, -1)])
            if letters and letters[-1] == -x:
                continue
            letters.append(x)
        images.append(g.path(0, letters))
    return GraphMap(g, (0,), tuple(images))


def random_word(rng: Random, rank: int, length: int) -> Word:
    letters: list[int] = []
    while len(letters) < length:
        x = rng.choice([s * k for k in range(1, rank + 1) for s in (1, -1)])
        if letters and letters[-1] == -x:
            continue
        letters.append(x)
    return word_reduce(rank, letters)
