import os
import subprocess
import sys

import numpy as np
import pytest

from speedpd import _backend, _kernel_py
from speedpd.dp import dp_solve, solve
from speedpd.oracle import random_instance
from speedpd.squeeze import build_y_table

cython = pytest.importorskip("speedpd._kernel")


def test_default_backend_is_compiled():
    assert _backend.NAME == "cython"
    assert _backend.get() is cython
    assert _backend.get("python") is _kernel_py
    with pytest.raises(ValueError):
        _backend.get("fortran")


def test_env_forces_fallback():
    env = dict(os.environ, SPEEDPD_PURE="1")
    res = subprocess.run(
        [sys.executable, "-c", "from speedpd import _backend; print(_backend.NAME)"],
        capture_output=True, text=True, env=env,
    )
    assert res.stdout.strip() == "python"


def test_backends_agree_bitwise(rng):
    for k in range(60):
        inst = random_instance(rng, int(rng.integers(1, 30)), integer=k % 2 == 0)
        sub = inst.as_subinstance()
        a = build_y_table(sub, cython)
        b = build_y_table(sub, _kernel_py)
        assert np.array_equal(a.Y, b.Y)
        assert a.events == b.events and a.counts == b.counts
        oa, ob = dp_solve(sub, a, cython), dp_solve(sub, a, _kernel_py)
        assert np.array_equal(oa.O, ob.O)
        assert np.array_equal(oa.case, ob.case) and np.array_equal(oa.arg, ob.arg)
        assert solve(inst, cython).total == solve(inst, _kernel_py).total


def test_scans_agree(rng):
    for _ in range(30):
        inst = random_instance(rng, int(rng.integers(1, 20)))
        r, d, P = inst.as_subinstance().arrays()
        s = inst.model.critical_speed
        m = inst.n
        for i in range(1, m + 1):
            cs, ct, ok = cython.chain_scan(r, d, P, s, i, m)
            cs2, ct2, ok2 = _kernel_py.chain_scan(r, d, P, s, i, m)
            assert list(cs[i:]) == cs2[i : m + 1] + [0] or list(cs[i : m + 1]) == cs2[i : m + 1]
            assert list(ct[i : m + 1]) == ct2[i : m + 1]
            assert list(ok[i : m + 1]) == ok2[i : m + 1]
        for j in range(1, m + 1):
            assert list(cython.prefix_scan(r, d, P, s, j)[1:]) == _kernel_py.prefix_scan(r, d, P, s, j)[1:]
