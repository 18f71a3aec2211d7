import os
import subprocess
import sys

import numpy as np
import pytest

from cascade_budget import _backend, _fallback

kernels = pytest.importorskip("cascade_budget._kernels")

SERIES_CASES = [
    # u, v, a, r, q
    (0.3, 0.7, 1.2772490, 0, 0),
    (0.8, 0.2, 1.2772490, 0, 0),
    (0.4, 0.6, 1.5, 3, 2),
    (0.3, 0.7, 1.0, 1, 1),
    (1 - 1e-6, 1e-6, 20.5, 0, 0),
]


class TestKernelEquality:
    @pytest.mark.parametrize("case", SERIES_CASES)
    @pytest.mark.parametrize("tol", [1e-6, 1e-12])
    def test_series_sum(self, case, tol):
        assert kernels.series_sum(*case, tol, 10**7) == _fallback.series_sum(*case, tol, 10**7)

    @pytest.mark.parametrize("case", SERIES_CASES)
    def test_finite_sum(self, case):
        assert kernels.finite_sum(*case, 17) == _fallback.finite_sum(*case, 17)

    @pytest.mark.parametrize("p_yes,a,r,q", [
        (0.7, 1.2772490, 0, 0),
        (0.2, 1.2772490, 0, 0),
        (0.6, 1.5, 3, 2),
        (0.7, 1.0, 1, 1),
        (0.8, 1 / 1.2772490, 0, 0),
    ])
    def test_simulate_batch(self, p_yes, a, r, q):
        args = (p_yes, a, r, q, 2**63 + 5, 100, 3100, 10**6)
        for x, y in zip(kernels.simulate_batch(*args), _fallback.simulate_batch(*args)):
            np.testing.assert_array_equal(np.asarray(x), np.asarray(y))

    def test_cap_code(self):
        x = kernels.simulate_batch(0.7, 1.0, 1, 1, 0, 0, 50, 1)[0]
        y = _fallback.simulate_batch(0.7, 1.0, 1, 1, 0, 0, 50, 1)[0]
        np.testing.assert_array_equal(np.asarray(x), np.asarray(y))
        assert _fallback.CAP_EXCEEDED in set(np.asarray(y).tolist())

    def test_unreachable_tolerance(self):
        assert kernels.series_sum(0.3, 0.7, 1.3, 0, 0, 1e-12, 3)[1] == -1
        assert _fallback.series_sum(0.3, 0.7, 1.3, 0, 0, 1e-12, 3)[1] == -1


class TestSelection:
    def test_selection_follows_environment(self):
        forced = os.environ.get("CASCADE_BUDGET_PURE", "") not in ("", "0")
        assert _backend.BACKEND == ("python" if forced else "compiled")

    def test_environment_forces_fallback(self):
        code = "from cascade_budget import BACKEND, pcc, SignalQualities; print(BACKEND, pcc(SignalQualities(0.7, 0.8)).pcc)"
        env = dict(os.environ, CASCADE_BUDGET_PURE="1")
        pure = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        env["CASCADE_BUDGET_PURE"] = "0"
        fast = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        assert pure.stdout.split()[0] == "python"
        assert fast.stdout.split()[0] == "compiled"
        assert pure.stdout.split()[1] == fast.stdout.split()[1]
