"""Clutching construction on S^1 and S^2, and the complex topological tables.

A map ``f`` from the equator to ``GL_n(C)`` is turned into a field of
``2n x 2n`` idempotents on a latitude-longitude grid::

    Q = [[b+^2,         b+ b- f~],
         [b+ b- f~^-1,  b-^2    ]]

where ``(b+, b-)`` is a normalized partition of unity in the last
coordinate and ``f~`` is ``f`` composed with meridian projection onto the
equator. On S^2 the image bundle is detected by its Chern number, computed
with five-point central differences and summed with ``math.fsum``.

Grid conventions: ``theta`` is the polar angle from the north pole
(``x3 = cos theta``), sampled at cell midpoints so the poles are never
nodes; ``phi`` runs counterclockwise seen from the north pole and is
periodic. On S^1 the node at angle ``phi`` is ``(cos phi, sin phi)`` and the
"equator" S^0 is the pair ``(+1, 0)``, ``(-1, 0)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .abelian import FGAbelianGroup
from .errors import InputError, ResolutionError, VerificationError

BAND = 0.5
DEFAULT_TOL = 1e-9
CHERN_INTEGRALITY = 0.05
INVERTIBILITY_FLOOR = 1e-9
# measured generator sign: chern_number(clutch of z^k) = SIGN * k
SIGN = -1


# --------------------------------------------------------------------------
# partition of unity


def _alphas(x: np.ndarray, kind: str) -> tuple[np.ndarray, np.ndarray]:
    t = np.clip(x + BAND, 0.0, 1.0)
    if kind == "linear":
        a_plus = t
    elif kind == "cosine":
        a_plus = 0.5 * (1.0 - np.cos(np.pi * t))
    else:
        raise InputError(f"unknown partition of unity {kind!r}; expected 'linear' or 'cosine'")
    return a_plus, 1.0 - a_plus


def _betas(x: np.ndarray, kind: str = "linear") -> tuple[np.ndarray, np.ndarray]:
    a_plus, a_minus = _alphas(np.asarray(x, dtype=float), kind)
    norm = np.sqrt(a_plus**2 + a_minus**2)
    return a_plus / norm, a_minus / norm


def partition_of_unity(x_last: float, kind: str = "linear") -> tuple[float, float]:
    """Normalized pair ``(b+, b-)`` at a point with last coordinate ``x_last``.

    ``a+`` ramps from 0 at ``x_last = -1/2`` to 1 at ``x_last = 1/2`` (linearly
    or along a cosine), ``a- = 1 - a+``, and both are divided by
    ``sqrt(a+^2 + a-^2)`` so that ``b+^2 + b-^2 = 1``.
    """
    if not -1.0 <= x_last <= 1.0:
        raise InputError(f"last coordinate must lie in [-1, 1], got {x_last}")
    bp, bm = _betas(np.array(x_last), kind)
    return float(bp), float(bm)


# --------------------------------------------------------------------------
# grids and clutching data


@dataclass(frozen=True)
class SphereGrid:
    """Latitude-longitude nodes on S^p, p in {1, 2}."""

    p: int
    resolution: int
    theta: np.ndarray = field(repr=False, compare=False)
    phi: np.ndarray = field(repr=False, compare=False)
    nodes: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def build(cls, p: int, resolution: int) -> SphereGrid:
        if p not in (1, 2):
            raise InputError(f"only S^1 and S^2 are supported, got p = {p}")
        if resolution < 8:
            raise InputError("grid resolution must be at least 8")
        phi = 2.0 * np.pi * np.arange(resolution) / resolution
        if p == 1:
            theta = np.zeros(0)
            nodes = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        else:
            theta = np.pi * (np.arange(resolution) + 0.5) / resolution
            st, ct = np.sin(theta)[:, None], np.cos(theta)[:, None]
            nodes = np.stack(
                np.broadcast_arrays(st * np.cos(phi)[None, :], st * np.sin(phi)[None, :], ct), axis=-1
            )
        return cls(p, resolution, theta, phi, nodes)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.nodes.shape[:-1]

    @property
    def x_last(self) -> np.ndarray:
        return self.nodes[..., -1]

    def equator_angle(self) -> np.ndarray:
        """Angle of the meridian projection of every node onto the equator."""
        if self.p == 1:
            return np.where(self.nodes[..., 0] >= 0, 0.0, np.pi)
        return np.broadcast_to(self.phi[None, :], self.shape)


@dataclass(frozen=True)
class ClutchingInput:
    """A sampled map from the equator S^{p-1} to GL_n(C).

    Build one with :meth:`power`, :meth:`diagonal_powers`, :meth:`from_table`
    or :meth:`from_function`. Angles are equator angles: ``z = exp(i phi)``
    on S^1, and ``phi in {0, pi}`` for the two points of S^0.
    """

    n: int
    label: str
    _evaluate: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)

    @classmethod
    def power(cls, k: int) -> ClutchingInput:
        return cls.diagonal_powers([k])

    @classmethod
    def diagonal_powers(cls, ks: Sequence[int]) -> ClutchingInput:
        ks = np.array([int(k) for k in ks])
        if ks.size == 0:
            raise InputError("need at least one exponent")

        def evaluate(phi):
            phases = np.exp(1j * np.multiply.outer(phi, ks))
            out = np.zeros(phases.shape + (ks.size,), dtype=complex)
            idx = np.arange(ks.size)
            out[..., idx, idx] = phases
            return out

        label = "z^%d" % ks[0] if ks.size == 1 else "diag(" + ", ".join(f"z^{k}" for k in ks) + ")"
        return cls(int(ks.size), label, evaluate)

    @classmethod
    def from_function(cls, n: int, func: Callable[[complex], np.ndarray], label: str = "custom") -> ClutchingInput:
        """``func`` takes a unit complex number and returns an ``n x n`` matrix."""

        def evaluate(phi):
            phi = np.asarray(phi, dtype=float)
            flat = [np.asarray(func(complex(np.cos(a), np.sin(a))), dtype=complex) for a in phi.ravel()]
            return np.array(flat, dtype=complex).reshape(phi.shape + (n, n))

        return cls(n, label, evaluate)

    @classmethod
    def from_table(cls, angles: Sequence[float], matrices: Sequence) -> ClutchingInput:
        """Piecewise-linear periodic interpolation of sampled matrices."""
        angles = np.mod(np.asarray(angles, dtype=float), 2 * np.pi)
        mats = np.asarray(matrices, dtype=complex)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2] or mats.shape[0] != angles.size:
            raise InputError("sample table needs one square matrix per angle")
        if angles.size < 2:
            raise InputError("sample table needs at least two rows")
        order = np.argsort(angles, kind="stable")
        angles, mats = angles[order], mats[order]
        if np.any(np.diff(angles) <= 0):
            raise InputError("sample angles must be distinct modulo 2 pi")
        dets = np.abs(np.linalg.det(mats))
        if np.min(dets) <= INVERTIBILITY_FLOOR:
            raise InputError(f"sample at angle {angles[int(np.argmin(dets))]} is not invertible")
        n = mats.shape[1]
        ext_angles = np.concatenate([angles, [angles[0] + 2 * np.pi]])
        ext_mats = np.concatenate([mats, mats[:1]])

        def evaluate(phi):
            phi = np.mod(np.asarray(phi, dtype=float), 2 * np.pi)
            shifted = np.where(phi < ext_angles[0], phi + 2 * np.pi, phi)
            hi = np.clip(np.searchsorted(ext_angles, shifted, side="right"), 1, ext_angles.size - 1)
            lo = hi - 1
            w = ((shifted - ext_angles[lo]) / (ext_angles[hi] - ext_angles[lo]))[..., None, None]
            return (1 - w) * ext_mats[lo] + w * ext_mats[hi]

        return cls(n, "table", evaluate)

    def evaluate(self, phi) -> np.ndarray:
        values = self._evaluate(np.asarray(phi, dtype=float))
        dets = np.abs(np.linalg.det(values)) if values.size else np.zeros(0)
        if dets.size and np.min(dets) <= INVERTIBILITY_FLOOR:
            raise InputError(f"clutching map {self.label} is not invertible at some sample")
        return values


def parse_table_csv(text: str) -> ClutchingInput:
    """Rows ``theta,re00,im00,re01,im01,...`` in row-major entry order."""
    angles, mats = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        try:
            values = [float(c) for c in cells]
        except ValueError:
            if lineno == 1:
                continue  # header
            raise InputError(f"line {lineno}: non-numeric cell")
        entries = values[1:]
        n = math.isqrt(len(entries) // 2)
        if n < 1 or 2 * n * n != len(entries):
            raise InputError(f"line {lineno}: expected 1 + 2n^2 columns, got {len(values)}")
        cplx = np.array(entries[0::2]) + 1j * np.array(entries[1::2])
        angles.append(values[0])
        mats.append(cplx.reshape(n, n))
    if not mats or any(m.shape != mats[0].shape for m in mats):
        raise InputError("sample table is empty or mixes matrix sizes")
    return ClutchingInput.from_table(angles, mats)


def meridian_extend(f: ClutchingInput, node: Sequence[float]) -> np.ndarray:
    """``f~(node) = f(x'/|x'|)`` for a node in the overlap band, x' = node minus its last coordinate."""
    node = np.asarray(node, dtype=float)
    if not -BAND < node[-1] < BAND:
        raise InputError(f"node {node.tolist()} is outside the overlap band |x_last| < 1/2")
    head = node[:-1]
    norm = float(np.linalg.norm(head))
    if norm < 1e-9:
        raise VerificationError("node too close to the polar axis for meridian projection", node.tolist())
    head = head / norm
    angle = math.atan2(head[1], head[0]) if head.size == 2 else (0.0 if head[0] > 0 else math.pi)
    return f.evaluate(np.array([angle]))[0]


# --------------------------------------------------------------------------
# the clutching field


@dataclass(frozen=True)
class ClutchingField:
    grid: SphereGrid
    n: int
    label: str
    partition: str
    Q: np.ndarray = field(repr=False, compare=False)
    idempotency_residual: float
    trace_deviation: float
    worst_node: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "p": self.grid.p,
            "n": self.n,
            "f": self.label,
            "grid": self.grid.resolution,
            "partition": self.partition,
            "residual": self.idempotency_residual,
            "trace_dev": self.trace_deviation,
        }


def _chunks(length: int, workers: int) -> list[slice]:
    workers = max(1, min(workers, length))
    bounds = np.linspace(0, length, workers + 1).astype(int)
    return [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _map_rows(func, length: int, workers: int) -> list:
    parts = _chunks(length, workers)
    if len(parts) == 1:
        return [func(parts[0])]
    with ThreadPoolExecutor(max_workers=len(parts)) as pool:
        return list(pool.map(func, parts))


def _assemble_q(f: ClutchingInput, grid: SphereGrid, kind: str, rows: slice) -> np.ndarray:
    x = grid.x_last[rows]
    bp, bm = _betas(x, kind)
    n = f.n
    eye = np.eye(n)
    q = np.zeros(x.shape + (2 * n, 2 * n), dtype=complex)
    q[..., :n, :n] = (bp**2)[..., None, None] * eye
    q[..., n:, n:] = (bm**2)[..., None, None] * eye
    band = np.abs(x) < BAND
    if np.any(band):
        angles = grid.equator_angle()[rows][band]
        ft = f.evaluate(angles)
        ft_inv = np.linalg.inv(ft)
        c = (bp * bm)[band][:, None, None]
        block = q[band]
        block[:, :n, n:] = c * ft
        block[:, n:, :n] = c * ft_inv
        q[band] = block
    return q


def build_clutching(
    f: ClutchingInput,
    grid: SphereGrid,
    tol: float = DEFAULT_TOL,
    partition: str = "linear",
    workers: int = 1,
) -> ClutchingField:
    """Assemble Q at every node and check ``Q^2 = Q`` and ``tr Q = n`` to ``tol``.

    Rows of the grid may be split across ``workers`` threads; the result is
    the same array whatever the split.
    """
    if not tol > 0:
        raise InputError("tolerance must be positive")
    _alphas(np.zeros(1), partition)
    length = grid.shape[0]
    pieces = _map_rows(lambda rows: _assemble_q(f, grid, partition, rows), length, workers)
    q = np.concatenate(pieces, axis=0)
    defect = np.linalg.norm(q @ q - q, axis=(-2, -1))
    trace_dev = np.abs(np.trace(q, axis1=-2, axis2=-1) - f.n)
    worst = tuple(int(i) for i in np.unravel_index(int(np.argmax(defect)), defect.shape))
    residual = float(defect[worst])
    trace_max = float(np.max(trace_dev))
    if residual >= tol:
        raise VerificationError(
            f"idempotency residual {residual:.3e} >= {tol:.1e}",
            {"worst_node": list(worst), "residual": residual},
        )
    if trace_max >= tol:
        node = tuple(int(i) for i in np.unravel_index(int(np.argmax(trace_dev)), trace_dev.shape))
        raise VerificationError(
            f"trace deviation {trace_max:.3e} >= {tol:.1e}",
            {"worst_node": list(node), "trace_dev": trace_max},
        )
    return ClutchingField(grid, f.n, f.label, partition, q, residual, trace_max, worst)


def clutch(
    f: ClutchingInput,
    p: int = 2,
    resolution: int = 64,
    tol: float = DEFAULT_TOL,
    partition: str = "linear",
    workers: int = 1,
) -> ClutchingField:
    return build_clutching(f, SphereGrid.build(p, resolution), tol, partition, workers)


@dataclass(frozen=True)
class ChernNumber:
    value: float
    rounded: int
    imaginary: float

    @property
    def defect(self) -> float:
        return abs(self.value - self.rounded)


def _central_difference(q: np.ndarray, h: float, axis: int, periodic: bool) -> np.ndarray:
    """Five-point central difference with step ``h``.

    Non-periodic axes leave two rows at each end at zero; on S^2 those rows
    lie in the polar caps where Q is constant.
    """
    if periodic:
        shift = lambda s: np.roll(q, -s, axis=axis)  # noqa: E731
        return (8 * (shift(1) - shift(-1)) - (shift(2) - shift(-2))) / (12 * h)
    out = np.zeros_like(q)
    out[2:-2] = (8 * (q[3:-1] - q[1:-3]) - (q[4:] - q[:-4])) / (12 * h)
    return out


def chern_density(cf: ClutchingField, workers: int = 1) -> np.ndarray:
    """Node values of ``tr(Q [dQ/dtheta, dQ/dphi]) / (2 pi i)``, times the cell area."""
    if cf.grid.p != 2:
        raise InputError("the Chern number is only defined here for S^2 grids")
    q = cf.Q
    n_theta, n_phi = cf.grid.shape
    h_theta = np.pi / n_theta
    h_phi = 2 * np.pi / n_phi
    d_theta = _central_difference(q, h_theta, 0, periodic=False)
    d_phi = _central_difference(q, h_phi, 1, periodic=True)

    def density(rows):
        qq, a, b = q[rows], d_theta[rows], d_phi[rows]
        comm = a @ b - b @ a
        return np.trace(qq @ comm, axis1=-2, axis2=-1)

    values = np.concatenate(_map_rows(density, n_theta, workers), axis=0)
    return values * (h_theta * h_phi) / (2j * np.pi)


def chern_number(cf: ClutchingField, workers: int = 1, check: bool = True) -> ChernNumber:
    """Integrate the curvature of Im(Q) over S^2.

    Fails with :class:`VerificationError` when the raw value is further than
    0.05 from an integer (unless ``check`` is False).
    """
    dens = chern_density(cf, workers).ravel()
    value = math.fsum(dens.real)
    imag = math.fsum(dens.imag)
    rounded = int(round(value))
    result = ChernNumber(value, rounded, imag)
    if check and result.defect >= CHERN_INTEGRALITY:
        raise VerificationError(
            f"Chern integral {value:.6f} is not within {CHERN_INTEGRALITY} of an integer",
            {"chern": value},
        )
    return result


@dataclass(frozen=True)
class GlobalFrame:
    """Constant vectors whose projections by Q span Im(Q) at every node."""

    vectors: np.ndarray
    min_singular_value: float


def global_frame(cf: ClutchingField, attempts: int = 16, floor: float = 1e-3, seed: int = 0) -> GlobalFrame | None:
    """Look for a constant ``2n x n`` matrix W with Q(x) W of full rank everywhere.

    Finding one trivializes the bundle Im(Q); the search is seeded so the
    answer is reproducible. Returns None if every attempt degenerates.
    """
    rng = np.random.default_rng(seed)
    n = cf.n
    q = cf.Q.reshape(-1, 2 * n, 2 * n)
    for _ in range(attempts):
        w = rng.normal(size=(2 * n, n)) + 1j * rng.normal(size=(2 * n, n))
        sv = np.linalg.svd(q @ w, compute_uv=False)[:, -1]
        smallest = float(np.min(sv))
        if smallest > floor:
            return GlobalFrame(w, smallest)
    return None


# --------------------------------------------------------------------------
# loops in C*


def sample_loop(func: Callable[[complex], complex], samples: int = 256) -> np.ndarray:
    angles = 2 * np.pi * np.arange(samples) / samples
    return np.array([func(complex(np.cos(a), np.sin(a))) for a in angles], dtype=complex)


def winding_number(loop: Sequence[complex]) -> int:
    """Degree of a closed sampled loop in C* by summing principal argument steps."""
    z = np.asarray(loop, dtype=complex)
    if z.ndim != 1 or z.size < 2:
        raise InputError("a loop needs at least two samples")
    if np.min(np.abs(z)) == 0:
        raise InputError("loop passes through 0")
    steps = np.angle(np.roll(z, -1) / z)
    jump = float(np.max(np.abs(steps)))
    if jump >= np.pi - 1e-12:
        raise ResolutionError(f"adjacent samples differ in phase by {jump:.3f} >= pi; refine the loop")
    return int(round(math.fsum(steps) / (2 * np.pi)))


# --------------------------------------------------------------------------
# tables


def pi_gl_c(p: int) -> FGAbelianGroup:
    """Stable pi_p(GL(C)): 0 for even p, Z for odd p.

    Anchors: pi_0 = K_1^top(C) = 0, pi_1 = reduced K of C_C(S^2) = Z; the rest
    follow from 2-periodicity.
    """
    if isinstance(p, bool) or not isinstance(p, int) or p < 0:
        raise InputError(f"p must be a non-negative integer, got {p!r}")
    return FGAbelianGroup.free(1) if p % 2 else FGAbelianGroup()


def reduced_k_sphere_complex(p: int) -> FGAbelianGroup:
    """Reduced K of C_C(S^p) through the clutching isomorphism with pi_{p-1}."""
    if isinstance(p, bool) or not isinstance(p, int) or p < 1:
        raise InputError(f"sphere dimension must be a positive integer, got {p!r}")
    return pi_gl_c(p - 1)


def k_top_complex(n: int) -> FGAbelianGroup:
    """K_n^top(C) for n >= 0: Z in even degrees, 0 in odd ones; negative n by periodicity."""
    if isinstance(n, bool) or not isinstance(n, int):
        raise InputError(f"degree must be an integer, got {n!r}")
    return FGAbelianGroup.free(1) if n % 2 == 0 else FGAbelianGroup()


LOOP_CHAIN = (
    "Z×BGL(R)",
    "GL(R)",
    "GL(R)/GL(C)",
    "GL(C)/GL(H)",
    "Z×BGL(H)",
    "GL(H)",
    "GL(H)/GL(C)",
    "GL(C)/GL(R)",
)


def _space_key(name: str) -> str:
    return str(name).replace(" ", "").replace("×", "x").replace("*", "x").upper()


_CHAIN_INDEX = {_space_key(s): i for i, s in enumerate(LOOP_CHAIN)}


def loop_chain_step(space: str) -> str:
    """Homotopy type of the loop space of one of the eight spaces in the real Bott chain."""
    i = _CHAIN_INDEX.get(_space_key(space))
    if i is None:
        raise InputError(f"unknown space {space!r}; expected one of {', '.join(LOOP_CHAIN)}")
    return LOOP_CHAIN[(i + 1) % len(LOOP_CHAIN)]


@dataclass(frozen=True)
class VectorFieldParams:
    t: int
    odd_part: int
    beta: int
    gamma: int
    delta: int


def vector_field_params(t: int) -> VectorFieldParams:
    if isinstance(t, bool) or not isinstance(t, int) or t < 1:
        raise InputError(f"t must be a positive integer, got {t!r}")
    beta = (t & -t).bit_length() - 1
    return VectorFieldParams(t, t >> beta, beta, beta % 4, beta // 4)


def rho(t: int) -> int:
    """Maximal number of independent tangent vector fields on S^{t-1}."""
    v = vector_field_params(t)
    if v.beta == 0:
        return 0
    return 2**v.gamma + 8 * v.delta - 1
