import pytest

from ttiwip.graphs import GraphMap, rose, rose_representative
from ttiwip.words import Automorphism


@pytest.fixture
def sphere5():
    """Pseudo-Anosov of the five-punctured sphere, cyclically permuting the
    punctures; the classic clean-but-not-fully-irreducible example on F4."""
    return Automorphism.from_strings(4, ["b", "c", "d a^-1", "d^-1 c^-1"])


@pytest.fixture
def sphere5_map(sphere5):
    return rose_representative(sphere5).map


@pytest.fixture
def fib():
    """a -> ab, b -> a: golden-ratio growth, clean."""
    return Automorphism.from_strings(2, ["a b", "a"])


@pytest.fixture
def fib_map(fib):
    return rose_representative(fib).map


@pytest.fixture
def f3_cycle():
    """a -> b -> c -> ab: clean on F3."""
    return Automorphism.from_strings(3, ["b", "c", "a b"])


@pytest.fixture
def f3_cycle_map(f3_cycle):
    return rose_representative(f3_cycle).map


@pytest.fixture
def non_tt_map():
    """a -> ab, b -> a^-1: cancellation first shows up in the 4th iterate."""
    g = rose(2)
    return GraphMap(g, (0,), (g.path(0, (1, 2)), g.path(0, (-1,))))


@pytest.fixture
def swap_map():
    """The involution a <-> b: train-track but nothing grows."""
    g = rose(2)
    return GraphMap(g, (0,), (g.path(0, (2,)), g.path(0, (1,))))


@pytest.fixture
def nielsen_map():
    """a -> ab, b -> b: expanding train track with a disconnected Whitehead
    graph (the node a is isolated)."""
    g = rose(2)
    return GraphMap(g, (0,), (g.path(0, (1, 2)), g.path(0, (2,))))
