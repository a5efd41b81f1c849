import os
import subprocess
import sys

import numpy as np
import pytest

from riesz_sphere import _accel
from riesz_sphere.sphere import build_grid, spherical_distance
from riesz_sphere.summability import default_radii

pytestmark = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not importable")


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.5])
def test_table_and_clenshaw_parity(lam):
    rng = np.random.default_rng(0)
    t = rng.uniform(-1, 1, 300)
    assert np.array_equal(_accel.gegenbauer_table_numba(lam, 40, t), _accel.gegenbauer_table_numpy(lam, 40, t))
    c = rng.standard_normal(41)
    assert np.allclose(_accel.clenshaw_numba(c, lam, t), _accel.clenshaw_numpy(c, lam, t), rtol=0, atol=1e-13)


def test_clenshaw_matches_table():
    rng = np.random.default_rng(1)
    t = rng.uniform(-1, 1, 50)
    c = rng.standard_normal(25)
    direct = c @ _accel.gegenbauer_table_numpy(1.5, 24, t)
    assert np.allclose(_accel.clenshaw(c, 1.5, t), direct, atol=1e-12)


@pytest.mark.parametrize("F", [1, 3, 12])
def test_kernel_project_parity(F):
    g = build_grid(2, 6)
    rng = np.random.default_rng(F)
    cos = np.clip(g.nodes[:10] @ g.nodes.T, -1, 1)
    w = rng.standard_normal((g.size, F))
    a = _accel.kernel_project_numba(cos, w, 0.5, 5)
    b = _accel.kernel_project_numpy(cos, w, 0.5, 5, chunk=4)
    assert a.shape == (6, 10, F)
    assert np.allclose(a, b, atol=1e-12)
    assert np.allclose(_accel.kernel_project(cos, w, 0.5, 5), b, atol=1e-12)


def test_cap_sums_parity():
    g = build_grid(2, 8)
    d = spherical_distance(g.nodes[:20], g.nodes)
    v = np.abs(np.random.default_rng(2).standard_normal(g.size))
    radii = np.append(default_radii(g, 6), np.pi)
    sv_a, sw_a = _accel.cap_sums_numba(d, v, g.weights, radii)
    sv_b, sw_b = _accel.cap_sums_numpy(d, v, g.weights, radii)
    assert np.allclose(sv_a, sv_b, atol=1e-13) and np.allclose(sw_a, sw_b, atol=1e-13)
    assert np.allclose(sw_a[:, -1], g.weights.sum())


def test_thread_cap_parsing(monkeypatch):
    monkeypatch.setenv("RIESZ_SPHERE_THREADS", "3")
    assert _accel.thread_cap() == 3
    monkeypatch.setenv("RIESZ_SPHERE_THREADS", "")
    assert _accel.thread_cap() == 0
    monkeypatch.setenv("RIESZ_SPHERE_THREADS", "-1")
    with pytest.raises(ValueError):
        _accel.thread_cap()
    monkeypatch.setenv("RIESZ_SPHERE_THREADS", "many")
    with pytest.raises(ValueError):
        _accel.thread_cap()


def _backend(env):
    code = "from riesz_sphere import _accel; print(_accel.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env={**os.environ, **env},
                         capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_env_flag_selects_backend():
    assert _backend({"RIESZ_SPHERE_JIT": "0"}) == "numpy"
    assert _backend({"RIESZ_SPHERE_JIT": "1"}) == "numba"


def test_pipeline_agrees_across_backends():
    code = (
        "import numpy as np\n"
        "from riesz_sphere.sphere import grid_for_degree\n"
        "from riesz_sphere.transform import decompose, exp_profile\n"
        "from riesz_sphere.summability import maximal_riesz, hardy_littlewood\n"
        "g = grid_for_degree(2, 8)\n"
        "f = exp_profile(1.3).sample(g)\n"
        "d = decompose(f, 8)\n"
        "v = np.concatenate([maximal_riesz(d, 0.5, 8).values, hardy_littlewood(f).values])\n"
        "print(' '.join(repr(float(x)) for x in v))\n"
    )
    outs = []
    for flag in ("0", "1"):
        res = subprocess.run([sys.executable, "-c", code], env={**os.environ, "RIESZ_SPHERE_JIT": flag},
                             capture_output=True, text=True, check=True)
        outs.append(np.array(res.stdout.split(), dtype=float))
    assert np.allclose(outs[0], outs[1], rtol=1e-12, atol=1e-13)
