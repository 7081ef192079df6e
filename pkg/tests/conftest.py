from __future__ import annotations

import random

import pytest

from parabolic_nf.surface import Surface, generator_of_degree, r_star, random_surface


def corpus(N: int = 10) -> list:
    """0, e5, e6, r*(N, 1/2) and five random admissible surfaces."""
    rng = random.Random(20240611)
    out = [("zero", Surface.zero(N)),
           ("e5", generator_of_degree(5, 1, N)),
           ("e6", generator_of_degree(6, 1, N)),
           ("r_star", r_star(N, "1/2"))]
    for k in range(5):
        out.append((f"random{k}", random_surface(N, rng, height=3, density=0.6)))
    return out


@pytest.fixture(scope="session")
def surfaces10():
    return corpus(10)
