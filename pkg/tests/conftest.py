import pytest

from sc6verify.binaryqf import loeschian_table


@pytest.fixture(scope="session")
def table_1e6():
    # covers r_Q(N) for N <= 10^6 + a margin
    return loeschian_table(10**6 // 32 + 64)
