"""Shared instance builders.

Values are encoded as small integers.  Encodings used by the canonical
fixtures are noted next to each builder so the assertions elsewhere can
be read against them.
"""

import random

import pytest

from cspelim import GeneratorConfig, Instance, build_instance, random_instance


def broken_triangle_instance() -> Instance:
    """Three variables forming a single broken triangle on x2.

    x0 = {a=0}, x1 = {b=0}, x2 = {c=0, d=1}; allowed pairs
    x0-x1 {(a,b)}, x0-x2 {(a,c)}, x1-x2 {(b,d)}.  Not arc consistent:
    propagation wipes x2.
    """
    return build_instance(
        [[0], [0], [0, 1]],
        {(0, 1): [(0, 0)], (0, 2): [(0, 0)], (1, 2): [(0, 1)]})


def broken_tetrahedron_instance() -> Instance:
    """Singleton base variables x0={vi=0}, x1={vj=0}, x2={vk=0} plus
    x3 = {u=0, u'=1, u''=2}; the base is pairwise compatible and each
    apex value conflicts with exactly one base variable."""
    return build_instance(
        [[0], [0], [0], [0, 1, 2]],
        {(0, 1): [(0, 0)], (0, 2): [(0, 0)], (1, 2): [(0, 0)],
         (0, 3): [(0, 0), (0, 1)],
         (1, 3): [(0, 0), (0, 2)],
         (2, 3): [(0, 1), (0, 2)]})


def degree_gap_instance() -> Instance:
    """x0 = {vi=0}, x1 = {vj1=0, vj2=1}, x2 = {vm=0, vm1=1, vm2=2}.
    x2 passes the along-degree test but fails the extension test; vm has
    no support at x0, so the raw instance is not arc consistent."""
    return build_instance(
        [[0], [0, 1], [0, 1, 2]],
        {(0, 1): [(0, 0), (0, 1)],
         (1, 2): [(0, 0), (0, 1), (1, 0), (1, 2)],
         (0, 2): [(0, 1), (0, 2)]})


def star_instance(n: int) -> Instance:
    """Center x0 with n-1 leaves, all domains {0, 1}, every center-leaf
    relation an inequality; leaves mutually unconstrained.  Exactly two
    solutions (the two proper 2-colourings)."""
    neq = [(0, 1), (1, 0)]
    return build_instance([[0, 1]] * n,
                          {(0, k): neq for k in range(1, n)})


def pendant_chain_instance() -> Instance:
    """Chain x0 - x1 - x2 over {0,1,2}: x0-x1 inequality, x1-x2
    equality.  x0 and x2 each have exactly one neighbour."""
    neq = [(a, b) for a in range(3) for b in range(3) if a != b]
    eq = [(a, a) for a in range(3)]
    return build_instance([[0, 1, 2]] * 3, {(0, 1): neq, (1, 2): eq})


def clique_instance(n: int, d: int) -> Instance:
    """Pairwise-inequality clique: unsatisfiable whenever n > d."""
    neq = [(a, b) for a in range(d) for b in range(d) if a != b]
    return build_instance([list(range(d))] * n,
                          {(i, j): neq for i in range(n) for j in range(i + 1, n)})


def clone_pair_instance() -> Instance:
    """x0 and x1 are interchangeable clones (equality between them and
    identical rows elsewhere); each justifies eliminating the other."""
    return build_instance(
        [[0, 1]] * 4,
        {(0, 1): [(0, 0), (1, 1)],
         (0, 2): [(0, 0), (0, 1), (1, 0)],
         (1, 2): [(0, 0), (0, 1), (1, 0)],
         (2, 3): [(0, 1), (1, 0), (1, 1)]})


def random_tree_instance(n: int, d: int, seed: int) -> Instance:
    """Random tree shape with random non-empty relations on the edges."""
    rng = random.Random(seed)
    constraints = {}
    for child in range(1, n):
        parent = rng.randrange(child)
        pairs = [(a, b) for a in range(d) for b in range(d)
                 if rng.random() < 0.6]
        if not pairs:
            pairs = [(rng.randrange(d), rng.randrange(d))]
        constraints[(parent, child)] = pairs
    return build_instance([list(range(d))] * n, constraints)


def small_random(seed: int, n: int = 6, d: int = 3,
                 p1: float = 0.5, p2: float = 0.4) -> Instance:
    return random_instance(GeneratorConfig(n, d, p1, p2, seed=seed))


@pytest.fixture
def bt_inst():
    return broken_triangle_instance()


@pytest.fixture
def tetra_inst():
    return broken_tetrahedron_instance()


@pytest.fixture
def gap_inst():
    return degree_gap_instance()


@pytest.fixture
def star():
    return star_instance


@pytest.fixture
def pendant_inst():
    return pendant_chain_instance()
