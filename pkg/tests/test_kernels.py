import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from phantomrts import _core_py, kernels

try:
    from phantomrts import _core
except ImportError:  # extension not built
    _core = None

needs_compiled = pytest.mark.skipif(_core is None, reason="compiled extension not built")


def c64(a, dtype):
    return np.ascontiguousarray(a, dtype=dtype)


@needs_compiled
class TestEquivalence:
    @settings(max_examples=150, deadline=None)
    @given(st.integers(1, 6), st.integers(1, 12), st.integers(1, 5), st.data())
    def test_linear_errors(self, m, n, f, data):
        cand = data.draw(hnp.arrays(np.int64, (m, n), elements=st.integers(-20, 20)))
        coef = data.draw(hnp.arrays(np.float64, (f, n), elements=st.integers(-5, 5).map(float)))
        rhs = data.draw(hnp.arrays(np.float64, f, elements=st.integers(-30, 30).map(float)))
        kind = data.draw(hnp.arrays(np.int32, f, elements=st.integers(0, 2)))
        args = (c64(cand, np.int64), c64(coef, np.float64), c64(rhs, np.float64), c64(kind, np.int32))
        np.testing.assert_allclose(_core.linear_errors(*args), _core_py.linear_errors(*args), atol=1e-9)

    @settings(max_examples=150, deadline=None)
    @given(st.integers(1, 6), st.integers(1, 12), st.data())
    def test_upp_rdu(self, m, k, data):
        assign = data.draw(hnp.arrays(np.int64, (m, 9), elements=st.integers(0, 20)))
        counters = data.draw(hnp.arrays(np.float64, 9, elements=st.floats(0.2, 5.0)))
        samples = data.draw(hnp.arrays(np.float64, (k, 3), elements=st.integers(0, 30).map(float)))
        w = data.draw(hnp.arrays(np.float64, k, elements=st.floats(0.0, 1.0)))
        args = (c64(assign, np.int64), c64(counters, np.float64), c64(samples, np.float64), c64(w, np.float64))
        np.testing.assert_allclose(_core.upp_rdu(*args), _core_py.upp_rdu(*args), rtol=1e-12, atol=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 12), st.integers(1, 12), st.data())
    def test_distance_field(self, h, w, data):
        grid = data.draw(hnp.arrays(np.uint8, (h, w), elements=st.integers(0, 1)))
        n = data.draw(st.integers(0, 3))
        src = np.array([[data.draw(st.integers(-1, w)), data.draw(st.integers(-1, h))] for _ in range(n)],
                       dtype=np.int64).reshape(-1, 2)
        a = _core.distance_field(c64(grid, np.uint8), c64(src, np.int64))
        b = _core_py.distance_field(c64(grid, np.uint8), c64(src, np.int64))
        np.testing.assert_array_equal(a, b)


class TestKernels:
    def test_distance_field_walls(self):
        grid = np.array([[1, 0, 1], [1, 0, 1], [1, 1, 1]])
        d = kernels.distance_field(grid, [(0, 0)])
        assert d[0, 2] == 6
        assert d[0, 1] == -1
        assert d[0, 0] == 0

    def test_linear_errors_kinds(self):
        coef = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]])
        rhs = np.array([3.0, 3.0, 3.0])
        kind = np.array([kernels.KIND_LE, kernels.KIND_GE, kernels.KIND_EQ])
        got = kernels.linear_errors(np.array([[1, 1], [2, 2]]), coef, rhs, kind)
        assert got.tolist() == [0 + 1 + 1, 1 + 0 + 1]

    def test_upp_rdu_neutral_mean(self):
        assign = np.zeros((1, 9))
        samples = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        got = kernels.upp_rdu(assign, np.ones(9), samples, np.array([0.5, 0.5]))
        # utilities 0 and -2, averaged
        assert got[0] == pytest.approx(-1.0)


class TestBackendSelection:
    def test_backend_name(self):
        assert kernels.BACKEND == ("compiled" if _core is not None else "python")

    def test_pure_env_forces_fallback(self):
        env = dict(os.environ, PHANTOMRTS_PURE="1")
        out = subprocess.run([sys.executable, "-c", "import phantomrts; print(phantomrts.BACKEND)"],
                             env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "python"
