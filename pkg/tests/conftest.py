import os
import random

import pytest

from app.modules import multigraph
from app.modules.corpus import DATA_DIR, bundled_corpus
from app.modules.divisor import Divisor


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR


@pytest.fixture(scope="session")
def graph_path(data_dir):
    def path(name: str) -> str:
        return os.path.join(data_dir, f"{name}.graph")

    return path


@pytest.fixture(scope="session")
def corpus():
    return bundled_corpus()


@pytest.fixture
def theta():
    return multigraph.theta_graph()


@pytest.fixture
def dumbbell():
    return multigraph.dumbbell_graph()


@pytest.fixture
def loop_graph():
    return multigraph.loop_example_graph()


@pytest.fixture
def k4():
    return multigraph.complete_graph(4)


@pytest.fixture
def rng():
    return random.Random(20240613)


@pytest.fixture
def sample_divisor():
    """Random divisor of a given degree: small noise, then single chips until the degree matches"""

    def sample(rng: random.Random, G, degree: int, spread: int = 2) -> Divisor:
        coefficients = [rng.randint(-spread, spread) for _ in range(G.vertex_count)]
        missing = degree - sum(coefficients)
        step = 1 if missing > 0 else -1
        for _ in range(abs(missing)):
            coefficients[rng.randrange(G.vertex_count)] += step
        return Divisor(G, tuple(coefficients))

    return sample
