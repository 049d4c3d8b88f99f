import numpy as np
import pytest

from gstop import LatticeModel, PayoffSpec, VolatilityBand


def random_model(rng, n_steps=None, half_width=None):
    """Stable random lattice: dx chosen with headroom above the bound."""
    if n_steps is None:
        n_steps = int(rng.integers(1, 5))
    if half_width is None:
        half_width = int(rng.integers(1, 5))
    lo = float(rng.uniform(0.2, 1.5))
    hi = lo + float(rng.uniform(0.0, 1.5))
    dt = float(rng.uniform(0.05, 0.4))
    dx = float(np.sqrt(hi * dt) * rng.uniform(1.0, 1.6))
    return LatticeModel(x0=float(rng.uniform(-1.0, 1.0)), dx=dx, dt=dt,
                        n_steps=n_steps, half_width=half_width,
                        band=VolatilityBand(lo, hi))


def random_lipschitz_payoff(rng, n_steps):
    """Per-step rewards of the form a*|x - c| + b*x + d (Lipschitz in x)."""
    fns = []
    for _ in range(n_steps + 1):
        a, b, c, d = rng.uniform(-1.0, 1.0, size=4)
        fns.append(lambda x, a=a, b=b, c=c, d=d: a * np.abs(x - c) + b * x + d)
    return PayoffSpec.from_steps(fns)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
