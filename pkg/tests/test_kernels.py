"""Backend parity between the compiled and pure busy-period kernels."""

import math
import os
import random
import subprocess
import sys

import pytest

from impresched import _kernels
from impresched._kernels import pure

try:
    from impresched._kernels import _speedups
except ImportError:
    _speedups = None

needs_compiled = pytest.mark.skipif(
    _speedups is None, reason="compiled extension not built"
)


def test_backend_name_reports_active_impl():
    name = _kernels.backend_name()
    assert name in ("compiled", "pure")
    if _speedups is not None and not os.environ.get("IMPRESCHED_PURE"):
        assert name == "compiled"


def test_env_override_forces_pure_backend():
    env = dict(os.environ, IMPRESCHED_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "import impresched._kernels as k; print(k.backend_name())"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "pure"


def test_pure_kernel_edge_values():
    assert pure.busy_period_response(0.0, 10.0, 0.0, [], [], [], 1e6, 10000) == 0.0
    r = pure.busy_period_response(5.0, 10.0, 0.0, [6.0], [10.0], [0.0], 1e6, 10000)
    assert r == math.inf


@needs_compiled
def test_backends_agree_bit_for_bit():
    rng = random.Random(20240817)
    for _ in range(400):
        n = rng.randint(0, 4)
        hp_c = [rng.uniform(0.1, 4.0) for _ in range(n)]
        hp_p = [rng.uniform(8.0, 60.0) for _ in range(n)]
        hp_j = [rng.uniform(0.0, 20.0) for _ in range(n)]
        c = rng.uniform(0.1, 5.0)
        period = rng.uniform(8.0, 60.0)
        jitter = rng.uniform(0.0, 20.0)
        a = pure.busy_period_response(c, period, jitter, hp_c, hp_p, hp_j, 1e6, 20000)
        b = _speedups.busy_period_response(c, period, jitter, hp_c, hp_p, hp_j, 1e6, 20000)
        if math.isinf(a) or math.isinf(b):
            assert a == b
        else:
            assert a == b  # identical arithmetic, identical doubles


@needs_compiled
def test_backends_agree_on_integer_grids():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(1, 3)
        hp_c = [float(rng.randint(1, 4)) for _ in range(n)]
        hp_p = [float(rng.choice([8, 10, 12, 20])) for _ in range(n)]
        hp_j = [float(rng.randint(0, 6)) for _ in range(n)]
        c = float(rng.randint(1, 5))
        period = float(rng.choice([10, 20, 40]))
        a = pure.busy_period_response(c, period, 0.0, hp_c, hp_p, hp_j, 1e7, 50000)
        b = _speedups.busy_period_response(c, period, 0.0, hp_c, hp_p, hp_j, 1e7, 50000)
        assert a == b
