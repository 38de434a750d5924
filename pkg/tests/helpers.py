import numpy as np

from vanspec.sampling import SamplingDistribution


def point_distribution(points):
    """Degenerate distribution that always returns the given points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))

    def sampler(seed, m):
        assert m == pts.shape[0]
        return pts.copy()

    return SamplingDistribution(
        d=pts.shape[1],
        density=lambda z: np.ones(np.atleast_2d(z).shape[0]),
        support_measure=1.0,
        sampler=sampler,
        gx=None,
        id="fixed-points",
    )
