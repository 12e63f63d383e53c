"""Radial wavelet families on a single-scaling dyadic lattice.

A basis element is indexed by an integer resolution ``m`` and an integer
translation vector ``n``; it evaluates as ``2**(d*m/2) * psi(2**m * x - n)``
so that every element has the same L2 norm as the mother function.  Two
mother families are provided, both radial in frequency:

* ``MEXICAN_HAT``: ``(d - |x|**2) * exp(-|x|**2 / 2)``, paired with a
  Gaussian low-pass companion.
* ``SINC``: band-limited to the annulus ``1 < |w| <= 2``; in one dimension
  ``(sin(2x) - sin(x)) / x``, in higher dimensions evaluated from a
  tabulated radial profile.  Its low-pass companion is the tensor product
  of ``sin(x_i)/x_i`` factors.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import jv

from .quadrature import adaptive_integral, panel_rule_1d


class WaveletFamily(enum.Enum):
    MEXICAN_HAT = "mexican_hat"
    SINC = "sinc"


class BasisKind(enum.Enum):
    WAVELET = "wavelet"    # band-pass element of a detail subspace W_m
    SCALING = "scaling"    # low-pass companion spanning V_m


class GridError(ValueError):
    """Raised when a translation-center grid is empty or inconsistent."""


@dataclass(frozen=True)
class BasisIndex:
    """Dyadic index (resolution m, integer translation n, band kind)."""

    m: int
    n: tuple
    kind: BasisKind = BasisKind.WAVELET

    def center(self) -> np.ndarray:
        """Translation center 2**-m * n in input coordinates."""
        return np.asarray(self.n, dtype=float) * 2.0 ** (-self.m)

    def frequency(self) -> float:
        """Center of the frequency band covered by this element."""
        return 2.0 ** self.m

    def sort_key(self):
        return (self.kind.value, self.m, self.n)


def surface_area(dim: int) -> float:
    """Surface area of the unit sphere in ``dim`` dimensions."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


class _SincRadialProfile:
    """Tabulated radial profile of the band-limited mother in d >= 2.

    The profile is recovered from the annular frequency description by a
    radial (Hankel-type) inverse transform evaluated on a uniform grid with
    step 1e-3 of the maximum tabulated radius; beyond that radius the
    profile is treated as zero.
    """

    R_MAX = 48.0
    POINTS = 1001

    def __init__(self, dim: int):
        if dim < 2:
            raise ValueError("profile tabulation is for dim >= 2")
        self.dim = dim
        self.r_max = self.R_MAX
        s = np.linspace(0.0, self.r_max, self.POINTS)
        nu = dim / 2.0 - 1.0
        nodes, weights = panel_rule_1d(1.0, 2.0, panels=16, order=24)
        # psi(s) = sqrt(pi/2) * s**(1-d/2) * int_1^2 J_nu(r s) r**(d/2) dr
        amp = math.sqrt(math.pi / 2.0)
        bess = jv(nu, np.outer(s[1:], nodes))
        integ = bess @ (weights * nodes ** (dim / 2.0))
        vals = np.empty_like(s)
        vals[1:] = amp * s[1:] ** (1.0 - dim / 2.0) * integ
        # analytic limit at the origin
        vals[0] = (amp * (2.0 ** dim - 1.0)
                   / (dim * 2.0 ** (dim / 2.0 - 1.0) * math.gamma(dim / 2.0)))
        self._spline = CubicSpline(s, vals, bc_type=((1, 0.0), "not-a-knot"))

    def __call__(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        out = self._spline(np.minimum(r, self.r_max))
        return np.where(r > self.r_max, 0.0, out)


@dataclass
class MotherWavelet:
    """A mother wavelet family instantiated for a fixed input dimension."""

    family: WaveletFamily
    dim: int
    _norm_sq: float | None = field(default=None, repr=False)
    _profile: _SincRadialProfile | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    @classmethod
    def mexican_hat(cls, dim: int) -> "MotherWavelet":
        return cls(WaveletFamily.MEXICAN_HAT, dim)

    @classmethod
    def sinc(cls, dim: int) -> "MotherWavelet":
        return cls(WaveletFamily.SINC, dim)

    # -- evaluation -----------------------------------------------------

    def _profile_fn(self) -> _SincRadialProfile:
        if self._profile is None:
            self._profile = _SincRadialProfile(self.dim)
        return self._profile

    def _eval_kind(self, kind: BasisKind, pts: np.ndarray) -> np.ndarray:
        """Evaluate the mother (band-pass) or companion (low-pass) shape at
        points of shape (..., dim)."""
        pts = np.asarray(pts, dtype=float)
        if self.family is WaveletFamily.MEXICAN_HAT:
            s2 = np.sum(pts * pts, axis=-1)
            if kind is BasisKind.WAVELET:
                return (self.dim - s2) * np.exp(-0.5 * s2)
            return np.exp(-0.5 * s2)
        if kind is BasisKind.SCALING:
            return np.prod(np.sinc(pts / np.pi), axis=-1)
        if self.dim == 1:
            t = pts[..., 0]
            small = np.abs(t) < 1e-4
            ts = np.where(small, 1.0, t)
            vals = (np.sin(2.0 * ts) - np.sin(ts)) / ts
            return np.where(small, 1.0 - (7.0 / 6.0) * t * t, vals)
        r = np.sqrt(np.sum(pts * pts, axis=-1))
        return self._profile_fn()(r)

    def eval_mother(self, x) -> np.ndarray:
        """Band-pass mother value at ``x`` (shape (..., dim) or (dim,))."""
        return self._eval_kind(BasisKind.WAVELET, np.atleast_1d(np.asarray(x, float)))

    def eval_scaling_mother(self, x) -> np.ndarray:
        """Low-pass companion value at ``x``."""
        return self._eval_kind(BasisKind.SCALING, np.atleast_1d(np.asarray(x, float)))

    @property
    def effective_radius(self) -> float:
        """Radius beyond which the mother is treated as numerically zero."""
        if self.family is WaveletFamily.MEXICAN_HAT:
            return 9.0
        return _SincRadialProfile.R_MAX

    # -- norm -----------------------------------------------------------

    @property
    def norm_sq(self) -> float:
        """Squared L2 norm of the mother, cached after first use.

        The Mexican-hat norm is integrated radially in space.  The
        band-limited family decays too slowly in space for a truncated
        spatial quadrature, so its norm is integrated over the frequency
        annulus instead (the two agree by Plancherel).
        """
        if self._norm_sq is None:
            area = surface_area(self.dim)
            if self.family is WaveletFamily.MEXICAN_HAT:
                d = float(self.dim)

                def shell(r):
                    return area * (d - r * r) ** 2 * np.exp(-r * r) * r ** (self.dim - 1)

                self._norm_sq = adaptive_integral(
                    lambda p: shell(p[:, 0]), [0.0], [9.0],
                    base_panels=8, order=16, rtol=1e-11)
            else:
                def shell(r):
                    return area * (math.pi / 2.0) * r ** (self.dim - 1)

                self._norm_sq = adaptive_integral(
                    lambda p: shell(p[:, 0]), [1.0], [2.0],
                    base_panels=2, order=12, rtol=1e-12)
        return self._norm_sq


def mother_norm_sq(mother: MotherWavelet) -> float:
    return mother.norm_sq


def eval_basis(mother: MotherWavelet, index: BasisIndex, x) -> np.ndarray:
    """Evaluate one dilated/translated element at ``x``.

    ``x`` may be a single point of shape (dim,) or a batch (..., dim);
    the result drops the last axis.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != mother.dim or len(index.n) != mother.dim:
        raise ValueError(f"dimension mismatch: points have {x.shape[-1]} "
                         f"components, index {len(index.n)}, "
                         f"mother expects {mother.dim}")
    scale = 2.0 ** index.m
    amp = 2.0 ** (0.5 * mother.dim * index.m)
    arg = scale * x - np.asarray(index.n, dtype=float)
    return amp * mother._eval_kind(index.kind, arg)


def eval_scaling(mother: MotherWavelet, index: BasisIndex, x) -> np.ndarray:
    """Evaluate the low-pass companion for the (m, n) index of ``index``."""
    low = BasisIndex(index.m, index.n, BasisKind.SCALING)
    return eval_basis(mother, low, x)


# target number of scratch elements per evaluation block (memory control)
_BLOCK_ELEMS = 2 ** 23


def basis_matrix(mother: MotherWavelet, bases, X) -> np.ndarray:
    """Evaluate every basis in ``bases`` at every row of ``X``.

    Returns the (n_samples, n_bases) design matrix.  Bases are grouped by
    (kind, resolution) so each group shares one scaled copy of ``X``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, d = X.shape
    if d != mother.dim:
        raise ValueError(f"X has dim {d}, mother expects {mother.dim}")
    out = np.empty((n, len(bases)))
    groups = {}
    for j, b in enumerate(bases):
        groups.setdefault((b.kind, b.m), []).append(j)
    for (kind, m), cols in groups.items():
        scaled = X * 2.0 ** m
        amp = 2.0 ** (0.5 * d * m)
        centers = np.array([bases[j].n for j in cols], dtype=float)
        block = max(1, _BLOCK_ELEMS // max(1, n * d))
        for start in range(0, len(cols), block):
            sel = cols[start:start + block]
            ctr = centers[start:start + block]
            arg = scaled[:, None, :] - ctr[None, :, :]
            out[:, sel] = amp * mother._eval_kind(kind, arg)
    return out


# -- translation-center grids ------------------------------------------


@dataclass(frozen=True)
class CenterGrid:
    """Dyadic lattice 2**-m * Z^d intersected with a box of bounds."""

    m: int
    low: tuple
    high: tuple
    n_lo: tuple
    n_hi: tuple

    @property
    def dim(self) -> int:
        return len(self.low)

    @property
    def count(self) -> int:
        c = 1
        for lo, hi in zip(self.n_lo, self.n_hi):
            c *= hi - lo + 1
        return c

    def values(self, axis: int) -> np.ndarray:
        """Lattice coordinate values along one axis."""
        step = 2.0 ** (-self.m)
        return np.arange(self.n_lo[axis], self.n_hi[axis] + 1) * step

    def bases(self, kind: BasisKind = BasisKind.WAVELET):
        """All grid elements as a lexicographically ordered index list."""
        ranges = [range(lo, hi + 1) for lo, hi in zip(self.n_lo, self.n_hi)]
        shape = tuple(len(r) for r in ranges)
        out = []
        for idx in np.ndindex(shape):
            n = tuple(ranges[i][k] for i, k in enumerate(idx))
            out.append(BasisIndex(self.m, n, kind))
        return out

    def refine(self) -> "CenterGrid":
        """Grid at the next finer resolution over the same bounds."""
        return _grid_from_bounds(self.m + 1, self.low, self.high)


def _grid_from_bounds(m: int, low, high) -> CenterGrid:
    low = np.atleast_1d(np.asarray(low, dtype=float))
    high = np.atleast_1d(np.asarray(high, dtype=float))
    scale = 2.0 ** m
    n_lo = np.ceil(low * scale - 1e-9).astype(int)
    n_hi = np.floor(high * scale + 1e-9).astype(int)
    if np.any(n_hi < n_lo):
        raise GridError(f"empty lattice at resolution {m} for bounds "
                        f"{low.tolist()} .. {high.tolist()}")
    return CenterGrid(m, tuple(low), tuple(high),
                      tuple(int(v) for v in n_lo), tuple(int(v) for v in n_hi))


def build_center_grid(m: int, domain_low, domain_high, margin: float = 1.0,
                      clamp_low=None, clamp_high=None) -> CenterGrid:
    """Lattice at resolution ``m`` covering the domain plus a margin.

    The margin is expressed in units of the per-dimension domain span.
    Optional clamps bound the extended box (e.g. to keep centers
    non-negative when the mapping is only defined there).
    """
    lo = np.atleast_1d(np.asarray(domain_low, dtype=float))
    hi = np.atleast_1d(np.asarray(domain_high, dtype=float))
    if lo.shape != hi.shape or np.any(hi < lo):
        raise GridError("inconsistent domain bounds")
    span = hi - lo
    ext_lo = lo - margin * span
    ext_hi = hi + margin * span
    if clamp_low is not None:
        ext_lo = np.maximum(ext_lo, np.asarray(clamp_low, dtype=float))
    if clamp_high is not None:
        ext_hi = np.minimum(ext_hi, np.asarray(clamp_high, dtype=float))
    return _grid_from_bounds(m, ext_lo, ext_hi)


def nearest_two(x: float, candidates, rng=None):
    """The two candidate values closest to ``x``.

    Ties are broken toward the smaller value, or uniformly at random when
    ``rng`` (a numpy Generator) is supplied.  Requires at least two
    distinct candidates.
    """
    vals = np.unique(np.asarray(candidates, dtype=float))
    if vals.size < 2:
        raise ValueError("nearest_two needs at least two distinct candidates")
    dist = np.abs(vals - x)
    if rng is None:
        order = np.lexsort((vals, dist))
        return float(vals[order[0]]), float(vals[order[1]])
    picked = []
    alive = np.ones(vals.size, dtype=bool)
    for _ in range(2):
        d = np.where(alive, dist, np.inf)
        ties = np.flatnonzero(d == d.min())
        k = int(ties[rng.integers(ties.size)]) if ties.size > 1 else int(ties[0])
        picked.append(float(vals[k]))
        alive[k] = False
    return picked[0], picked[1]


def children_centers(parent: BasisIndex, fine_grid: CenterGrid, rng=None):
    """Next-resolution elements nearest to a parent's translation center.

    Per dimension the nearest and second-nearest lattice values inside the
    fine grid's bounds are taken; their Cartesian product (up to 2**d
    points, fewer if a dimension offers a single candidate) gives the
    children.  Children are returned in deterministic order.
    """
    if fine_grid.m != parent.m + 1:
        raise GridError(f"fine grid at m={fine_grid.m} is not one level below "
                        f"parent at m={parent.m}")
    center = parent.center()
    per_dim = []
    scale = 2.0 ** fine_grid.m
    for axis in range(fine_grid.dim):
        vals = fine_grid.values(axis)
        if vals.size >= 2:
            pair = nearest_two(center[axis], vals, rng=rng)
        else:
            pair = (float(vals[0]),)
        per_dim.append([int(round(v * scale)) for v in pair])
    children = []
    seen = set()
    shape = tuple(len(p) for p in per_dim)
    for idx in np.ndindex(shape):
        n = tuple(per_dim[i][k] for i, k in enumerate(idx))
        if n not in seen:
            seen.add(n)
            children.append(BasisIndex(fine_grid.m, n, BasisKind.WAVELET))
    return children
