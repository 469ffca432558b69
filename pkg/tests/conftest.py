import pytest

from eiszeros.evaluation import params_from_indices


@pytest.fixture(scope="session")
def params_k8():
    """Legendre mod 3 with the chi(2) = i character mod 5, weight 8."""
    return params_from_indices(3, 1, 5, 1, 8)


@pytest.fixture(scope="session")
def params_q7_k400():
    return params_from_indices(3, 1, 7, 1, 400)


@pytest.fixture(scope="session")
def certified_lines_cache():
    """Shared memo for expensive line certifications, keyed by
    (q1, i1, q2, i2, k, a)."""
    cache = {}

    def get(q1, i1, q2, i2, k, a):
        key = (q1, i1, q2, i2, k, a)
        if key not in cache:
            from eiszeros.zerofinder import certify_line_zeros
            p = params_from_indices(q1, i1, q2, i2, k)
            cache[key] = certify_line_zeros(p, a)
        return cache[key]

    return get
