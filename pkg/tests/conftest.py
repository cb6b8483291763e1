import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

import qmspace as q

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def random_spaces(draw, min_n=4, max_n=9):
    """Small random quasi-metric spaces: a perturbed cloud, optionally snowflaked."""
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 10_000))
    space = q.perturbed_metric_space(n, seed, spread=draw(st.sampled_from([0.0, 0.3, 1.0])))
    p = draw(st.sampled_from([1.0, 1.5, 2.0]))
    return q.snowflake_transform(space, p) if p != 1.0 else space


def brute_k(rho):
    n = len(rho)
    k = 1.0
    for i in range(n):
        for j in range(n):
            for l in range(n):
                if len({i, j, l}) < 3:
                    continue
                k = max(k, rho[i][l] / max(rho[i][j], rho[j][l]))
    return k


def grid_space(n):
    return q.euclidean_space(np.arange(n, dtype=float))
