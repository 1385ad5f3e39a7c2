import random

import pytest

from geogirth.sites import Site, SiteSet


@pytest.fixture
def make_sites():
    """Factory for seeded random site sets at controllable density."""

    def _make(n, seed, rmin=0.02, rmax=0.2, span=1.0):
        rng = random.Random(seed)
        sites = [Site(i, rng.uniform(0, span), rng.uniform(0, span),
                      rng.uniform(rmin, rmax)) for i in range(n)]
        return SiteSet(sites)

    return _make
