import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cylspec import kernels

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ACCEPTANCE = []


def record_acceptance(criterion, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
    _ACCEPTANCE.append((criterion, line))
    print(line)


@pytest.fixture
def acceptance():
    return record_acceptance


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE, key=lambda item: (int(str(item[0]).rstrip("abc")), str(item[0]))):
        terminalreporter.write_line(line)


KERNEL_SETS = {
    "numpy": dict(tql=kernels.tql_np, jacobi=kernels.jacobi_np, gbtrf=kernels.gbtrf_np,
                  gbtrs=kernels.gbtrs_np, gbtrs_h=kernels.gbtrs_h_np),
}
if kernels.tql_jit is not None:
    KERNEL_SETS["numba"] = dict(tql=kernels.tql_jit, jacobi=kernels.jacobi_jit,
                                gbtrf=kernels.gbtrf_jit, gbtrs=kernels.gbtrs_jit,
                                gbtrs_h=kernels.gbtrs_h_jit)


@pytest.fixture(params=sorted(KERNEL_SETS))
def kernel_set(request):
    return KERNEL_SETS[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
