import os
import random

import mpmath
import pytest
from hypothesis import HealthCheck, settings

from barypade.adversary import AdversaryPlan, GeometricEpsilon, LevelSpec
from barypade.numkernel import Poly, Precision
from barypade.pade import NodeLevel

settings.register_profile(
    "default",
    deadline=None,
    max_examples=int(os.environ.get("BARYPADE_EXAMPLES", 40)),
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIGS = os.path.join(ROOT, "configs")


def roots_of_unity(n, radius=1, rotation=0, ctx=Precision(256)):
    with ctx.scope():
        return tuple(mpmath.mpf(radius) * mpmath.expjpi(2 * (m + mpmath.mpf(rotation)) / (n + 1)) for m in range(n + 1))


def random_level(rng, n, ctx):
    """n+1 nodes on a circle of random radius, randomly rotated and jittered."""
    with ctx.scope():
        radius = mpmath.mpf(rng.uniform(0.6, 1.4))
        rot = rng.random()
        nodes = []
        for m in range(n + 1):
            angle = 2 * (m + rot + rng.uniform(-0.2, 0.2)) / (n + 1)
            nodes.append(radius * mpmath.expjpi(angle))
        return NodeLevel(tuple(nodes))


def random_alpha(rng, ctx):
    with ctx.scope():
        return mpmath.mpf(rng.uniform(1.6, 2.6)) * mpmath.expjpi(mpmath.mpf(rng.uniform(0, 2)))


def random_two_level_plan(seed, precision=256):
    rng = random.Random(seed)
    ctx = Precision(precision)
    n0 = rng.choice([1, 2])
    n1 = 2 * n0 + rng.choice([1, 2, 3])
    with ctx.scope():
        levels = (
            LevelSpec(random_level(rng, n0, ctx), random_alpha(rng, ctx)),
            LevelSpec(random_level(rng, n1, ctx), random_alpha(rng, ctx)),
        )
        P = Poly(tuple(mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(n0)))
        eps = GeometricEpsilon(mpmath.mpf(1), mpmath.mpf(1) / 2)
        return AdversaryPlan(P, levels, eps, precision)


def single_block_plan(precision=1024):
    ctx = Precision(precision)
    with ctx.scope():
        return AdversaryPlan(
            Poly(()),
            (LevelSpec(NodeLevel((1, -1)), 2),),
            GeometricEpsilon(mpmath.mpf(1), mpmath.mpf(1) / 2),
            precision,
        )


@pytest.fixture
def ctx():
    return Precision(256)


@pytest.fixture(scope="session")
def single_block_bundle():
    from barypade.search import search_mu

    return search_mu(single_block_plan())


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
