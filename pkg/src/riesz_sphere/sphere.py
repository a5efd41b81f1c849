"""Geometry of the unit sphere S^N in R^{N+1}.

Points, spherical distance, caps, surface measure, product quadrature grids
and uniform random sampling. Everything here is immutable once built.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate, special

from .errors import DimensionMismatchError, UnsupportedDimensionError

MIN_DIM = 2
MAX_DIM = 6
NORM_TOL = 1e-12


def check_dim(N):
    if int(N) != N or N < MIN_DIM or N > MAX_DIM:
        raise UnsupportedDimensionError(
            f"sphere dimension must be an integer in [{MIN_DIM}, {MAX_DIM}], got {N}"
        )
    return int(N)


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """A unit vector in R^{N+1}."""

    coords: np.ndarray

    def __post_init__(self):
        c = _frozen(self.coords).ravel()
        c.setflags(write=False)
        if c.size < MIN_DIM + 1:
            raise UnsupportedDimensionError(f"need at least {MIN_DIM + 1} coordinates")
        norm = float(np.linalg.norm(c))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"coordinates are not a unit vector (norm {norm!r})")
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_vector(cls, v):
        """Normalize ``v`` and wrap it."""
        v = np.asarray(v, dtype=np.float64)
        return cls(v / np.linalg.norm(v))

    @classmethod
    def pole(cls, N):
        e = np.zeros(N + 1)
        e[0] = 1.0
        return cls(e)

    @property
    def dim(self):
        return self.coords.size - 1

    def __eq__(self, other):
        return isinstance(other, SpherePoint) and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash(self.coords.tobytes())


@dataclass(frozen=True)
class Cap:
    """Open spherical ball B(center, radius)."""

    center: SpherePoint
    radius: float

    def __post_init__(self):
        if not 0.0 < self.radius <= math.pi:
            raise ValueError(f"cap radius must lie in (0, pi], got {self.radius}")

    def contains(self, points):
        return spherical_distance(self.center, points) < self.radius

    def measure(self):
        return cap_measure(self.center.dim, self.radius)


def as_coords(x):
    """Coordinates of a SpherePoint or an (..., N+1) array, as an array."""
    if isinstance(x, SpherePoint):
        return x.coords
    return np.asarray(x, dtype=np.float64)


def cosines(a, b):
    """Clamped inner products between point sets ``a`` (m, N+1) and ``b`` (M, N+1)."""
    a = np.atleast_2d(as_coords(a))
    b = np.atleast_2d(as_coords(b))
    if a.shape[-1] != b.shape[-1]:
        raise DimensionMismatchError(
            f"points live on different spheres (S^{a.shape[-1] - 1} vs S^{b.shape[-1] - 1})"
        )
    return np.clip(a @ b.T, -1.0, 1.0)


def spherical_distance(x, y):
    """Angle between ``x`` and ``y`` in [0, pi].

    Either argument may be a SpherePoint or an array of points; the result is
    a float for two single points and an array otherwise.
    """
    xa, ya = as_coords(x), as_coords(y)
    if xa.shape[-1] != ya.shape[-1]:
        raise DimensionMismatchError(
            f"points live on different spheres (S^{xa.shape[-1] - 1} vs S^{ya.shape[-1] - 1})"
        )
    if xa.ndim == 1 and ya.ndim == 1:
        ip = float(np.clip(xa @ ya, -1.0, 1.0))
        if ip == -1.0:
            return math.pi
        return math.acos(ip)
    d = np.arccos(cosines(xa, ya))
    if xa.ndim == 1:
        return d[0]
    if ya.ndim == 1:
        return d[:, 0]
    return d


def antipode(x):
    if isinstance(x, SpherePoint):
        return SpherePoint(-x.coords)
    return -np.asarray(x, dtype=np.float64)


def _omega(n):
    # Surface area of S^n for any n >= 0, no range check.
    return 2.0 * math.pi ** ((n + 1) / 2.0) / math.gamma((n + 1) / 2.0)


def surface_area(N):
    """Total surface measure of S^N, 2 pi^{(N+1)/2} / Gamma((N+1)/2)."""
    return _omega(check_dim(N))


def cap_measure(N, r):
    """Surface measure of a cap of angular radius r on S^N."""
    N = check_dim(N)
    if not 0.0 < r <= math.pi:
        raise ValueError(f"cap radius must lie in (0, pi], got {r}")
    val, _ = integrate.quad(lambda th: math.sin(th) ** (N - 1), 0.0, r, epsabs=0.0, epsrel=1e-13)
    return _omega(N - 1) * val


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Tensor-product quadrature on S^N.

    Polar axes j = 1..N-1 carry Gauss-Jacobi rules in t_j = cos(theta_j) for
    the weight (1 - t^2)^{(N - j - 1)/2}; the final angle uses a uniform
    trapezoid rule with 2 * n_polar nodes. The rule integrates every
    polynomial of degree <= 2 * n_polar - 1 exactly.
    """

    dimension: int
    nodes: np.ndarray
    weights: np.ndarray
    resolution: tuple
    n_polar: int = field(default=0)

    def __post_init__(self):
        object.__setattr__(self, "nodes", _frozen(self.nodes))
        object.__setattr__(self, "weights", _frozen(self.weights))
        if self.nodes.shape != (self.weights.size, self.dimension + 1):
            raise ValueError("nodes/weights shape mismatch")
        if np.any(self.weights <= 0):
            raise ValueError("grid weights must be positive")
        if math.prod(self.resolution) != self.weights.size:
            raise ValueError("node count must equal the product of per-axis counts")

    @property
    def size(self):
        return self.weights.size

    @property
    def exactness_degree(self):
        return 2 * self.n_polar - 1

    @property
    def degree_budget(self):
        """Largest degree k whose projection is exact for degree-k inputs."""
        return self.n_polar - 1

    @property
    def spacing(self):
        """Typical polar node spacing in radians."""
        return math.pi / self.n_polar

    def integrate(self, values):
        return np.tensordot(np.asarray(values, dtype=np.float64), self.weights, axes=([-1], [0]))

    def point(self, i):
        return SpherePoint(self.nodes[i])

    def write(self, path):
        write_grid(self, path)


def build_grid(N, n_polar):
    N = check_dim(N)
    if n_polar < 2:
        raise ValueError("n_polar must be >= 2")
    n_phi = 2 * n_polar
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    w_phi = np.full(n_phi, 2.0 * math.pi / n_phi)

    axes_t, axes_w = [], []
    for j in range(1, N):
        a = (N - j - 1) / 2.0
        if a == 0.0:
            t, w = special.roots_legendre(n_polar)
        else:
            t, w = special.roots_jacobi(n_polar, a, a)
        axes_t.append(t)
        axes_w.append(w)

    mesh_t = np.meshgrid(*axes_t, phi, indexing="ij")
    mesh_w = np.meshgrid(*axes_w, w_phi, indexing="ij")
    ts = [m.ravel() for m in mesh_t[:-1]]
    ph = mesh_t[-1].ravel()
    weights = np.prod([m.ravel() for m in mesh_w], axis=0)

    M = ph.size
    coords = np.empty((M, N + 1))
    sin_prod = np.ones(M)
    for j, t in enumerate(ts):
        coords[:, j] = sin_prod * t
        sin_prod = sin_prod * np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    coords[:, N - 1] = sin_prod * np.cos(ph)
    coords[:, N] = sin_prod * np.sin(ph)
    coords /= np.linalg.norm(coords, axis=1, keepdims=True)

    resolution = (n_polar,) * (N - 1) + (n_phi,)
    return SphereGrid(N, coords, weights, resolution, n_polar)


def grid_for_degree(N, K):
    """Smallest grid exact to degree 2K + 1."""
    return build_grid(N, max(K + 1, 2))


def write_grid(grid, path):
    """One node per line: N+1 coordinates then the weight, '%.17g'."""
    lines = [
        "# riesz_sphere grid v1",
        f"# dimension {grid.dimension}",
        f"# n_polar {grid.n_polar}",
        "# resolution " + " ".join(str(r) for r in grid.resolution),
    ]
    for x, w in zip(grid.nodes, grid.weights):
        lines.append(" ".join("%.17g" % v for v in x) + " " + "%.17g" % w)
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_grid(path):
    meta, rows = {}, []
    for line in Path(path).read_text(encoding="ascii").splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) >= 2 and parts[0] in ("dimension", "n_polar", "resolution"):
                meta[parts[0]] = [int(p) for p in parts[1:]]
            continue
        rows.append([float(v) for v in line.split()])
    data = np.array(rows, dtype=np.float64)
    N = meta["dimension"][0]
    if data.shape[1] != N + 2:
        raise ValueError(f"expected {N + 2} columns per node, got {data.shape[1]}")
    return SphereGrid(N, data[:, :-1], data[:, -1], tuple(meta["resolution"]), meta["n_polar"][0])


def uniform_coords(N, count, seed):
    """``count`` i.i.d. uniform points on S^N as an array (count, N+1).

    Normalized standard Gaussian vectors; deterministic for a fixed seed.
    """
    N = check_dim(N)
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, N + 1))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sample_uniform(N, count, seed):
    """Same draw as :func:`uniform_coords`, wrapped as SpherePoint objects."""
    return [SpherePoint(v) for v in uniform_coords(N, count, seed)]
