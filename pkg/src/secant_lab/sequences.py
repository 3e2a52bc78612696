"""
Point configurations on the line and in the plane.

A PointSet1D knows its points on a finite representation window
[-window_radius, window_radius]; periodic and lattice-like kinds also carry
their exact densities so finite-window estimates can be audited.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.spatial import cKDTree

from .errors import CoverageError, NotEnumerableError, ParameterError

KINDS_1D = ("explicit", "periodic", "jittered_lattice")
KINDS_2D = ("lattice", "product", "explicit")


@dataclass(frozen=True)
class PointSet1D:
    kind: str
    window_radius: float
    points_explicit: tuple = ()
    period: float = 0.0
    offsets: tuple = ()
    rho: float = 0.0
    jitter: float = 0.0
    seed: int = 0
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS_1D:
            raise ParameterError(f"unknown point set kind {self.kind!r}")
        if not self.window_radius > 0:
            raise ParameterError("window_radius must be positive")
        if self.kind == "periodic":
            if not self.period > 0 or not self.offsets:
                raise ParameterError("periodic point set needs p > 0 and offsets")
            offs = sorted(float(o) for o in self.offsets)
            if offs[0] < 0 or offs[-1] >= self.period:
                raise ParameterError("offsets must lie in [0, p)")
            if np.any(np.diff(offs) <= 0):
                raise ParameterError("offsets must be distinct")
            object.__setattr__(self, "offsets", tuple(offs))
        elif self.kind == "jittered_lattice":
            if not self.rho > 0:
                raise ParameterError("jittered lattice needs rho > 0")
            if not 0 <= self.jitter < self.rho / 2:
                raise ParameterError("jitter must lie in [0, rho/2) to keep separation")
        else:
            pts = np.sort(np.asarray(self.points_explicit, dtype=float))
            if np.any(np.diff(pts) <= 0):
                raise ParameterError("explicit points must be distinct")
            object.__setattr__(self, "points_explicit", tuple(pts.tolist()))

    # constructors -------------------------------------------------------
    @classmethod
    def lattice(cls, step, offset=0.0, window=200.0):
        """step * Z + offset."""
        return cls.periodic(step, [offset % step], window)

    @classmethod
    def periodic(cls, p, offsets, window=200.0):
        return cls("periodic", float(window), period=float(p),
                   offsets=tuple(float(o) % float(p) for o in offsets))

    @classmethod
    def jittered(cls, rho, jitter, seed, window=200.0):
        return cls("jittered_lattice", float(window), rho=float(rho),
                   jitter=float(jitter), seed=int(seed))

    @classmethod
    def explicit(cls, points, window=None):
        pts = np.asarray(points, dtype=float)
        if window is None:
            window = float(np.max(np.abs(pts))) if pts.size else 1.0
        return cls("explicit", float(window), points_explicit=tuple(pts.tolist()))

    # access ---------------------------------------------------------------
    def all_points(self):
        """Every point in the representation window, sorted."""
        if "pts" in self._cache:
            return self._cache["pts"]
        R = self.window_radius
        if self.kind == "periodic":
            kmax = int(math.ceil(R / self.period)) + 1
            ks = np.arange(-kmax, kmax + 1)
            pts = (ks[:, None] * self.period + np.asarray(self.offsets)[None, :]).ravel()
        elif self.kind == "jittered_lattice":
            nmax = int(math.ceil(R / self.rho)) + 1
            ns = np.arange(-nmax, nmax + 1)
            rng = np.random.default_rng(self.seed)
            pts = ns * self.rho + rng.uniform(-self.jitter, self.jitter, size=ns.size)
        else:
            pts = np.asarray(self.points_explicit, dtype=float)
        pts = np.sort(pts[np.abs(pts) <= R])
        self._cache["pts"] = pts
        return pts

    def points(self, lo, hi):
        if lo < -self.window_radius - 1e-12 or hi > self.window_radius + 1e-12:
            raise CoverageError(
                f"[{lo}, {hi}] exceeds representation window +-{self.window_radius}")
        pts = self.all_points()
        return pts[(pts >= lo) & (pts <= hi)]

    @property
    def exact_density(self):
        if self.kind == "periodic":
            return len(self.offsets) / self.period
        if self.kind == "jittered_lattice":
            return 1.0 / self.rho
        return None

    def translated(self, x):
        """Lambda + x with the same representation window."""
        if self.kind == "periodic":
            return PointSet1D.periodic(self.period, [o + x for o in self.offsets],
                                       self.window_radius)
        pts = self.all_points() + x
        return PointSet1D.explicit(pts[np.abs(pts) <= self.window_radius],
                                   window=self.window_radius - abs(x))

    def scaled(self, c):
        """c * Lambda (c > 0); the jitter pattern of a seeded lattice is kept."""
        if not c > 0:
            raise ParameterError("scale factor must be positive")
        if self.kind == "periodic":
            return PointSet1D.periodic(c * self.period, [c * o for o in self.offsets],
                                       c * self.window_radius)
        if self.kind == "jittered_lattice":
            return PointSet1D.jittered(c * self.rho, c * self.jitter, self.seed,
                                       c * self.window_radius)
        return PointSet1D.explicit(c * np.asarray(self.points_explicit),
                                   window=c * self.window_radius)

    def reflected(self):
        """-Lambda."""
        if self.kind == "periodic":
            return PointSet1D.periodic(self.period, [-o for o in self.offsets],
                                       self.window_radius)
        return PointSet1D.explicit(-self.all_points()[::-1], window=self.window_radius)

    def to_json(self):
        if self.kind == "periodic":
            return {"kind": "periodic", "p": self.period, "offsets": list(self.offsets),
                    "window": self.window_radius}
        if self.kind == "jittered_lattice":
            return {"kind": "jittered", "rho": self.rho, "jitter": self.jitter,
                    "seed": self.seed, "window": self.window_radius}
        return {"kind": "explicit", "points": list(self.points_explicit),
                "window": self.window_radius}


def pointset_from_json(spec):
    spec = dict(spec)
    kind = spec.pop("kind", None)
    window = float(spec.get("window", 200.0))
    if kind == "periodic":
        return PointSet1D.periodic(spec["p"], spec["offsets"], window)
    if kind == "lattice":
        return PointSet1D.lattice(spec["step"], spec.get("offset", 0.0), window)
    if kind in ("jittered", "jittered_lattice"):
        return PointSet1D.jittered(spec["rho"], spec["jitter"], spec.get("seed", 0), window)
    if kind == "explicit":
        return PointSet1D.explicit(spec["points"], spec.get("window"))
    raise ParameterError(f"unknown point set kind {kind!r}")


def separation(pointset):
    """Smallest gap between consecutive points (exact for the periodic kind)."""
    if pointset.kind == "periodic":
        offs = np.asarray(pointset.offsets)
        gaps = np.diff(np.append(offs, offs[0] + pointset.period))
        return float(np.min(gaps))
    pts = pointset.all_points()
    if pts.size < 2:
        raise ParameterError("separation needs at least two points")
    return float(np.min(np.diff(pts)))


@dataclass
class DensityEstimate:
    value: float
    r_used: np.ndarray
    estimates: np.ndarray
    exact: float = None

    @property
    def error(self):
        if self.exact is None:
            return None
        return abs(self.value - self.exact)


def _interval_counts(pointset, r_list, lower):
    r_list = np.asarray(r_list, dtype=float)
    if r_list.size == 0 or np.any(np.diff(r_list) <= 0):
        raise ParameterError("r_list must be non-empty and increasing")
    R = pointset.window_radius
    if r_list[-1] > R / 2:
        raise CoverageError(f"max r = {r_list[-1]} exceeds window_radius/2 = {R / 2}")
    pts = pointset.all_points()
    out = []
    for r in r_list:
        # half-open windows [x, x + r); the extremes sit at windows ending
        # (inf) or starting (sup) at a point of the set
        if lower:
            ends = pts[pts - r >= -R]
            counts = np.searchsorted(pts, ends, "left") - np.searchsorted(pts, ends - r, "left")
            out.append(np.min(counts) / r)
        else:
            starts = pts[pts + r <= R]
            counts = np.searchsorted(pts, starts + r, "left") - np.searchsorted(pts, starts, "left")
            out.append(np.max(counts) / r)
    return np.array(out)


def lower_density(pointset, r_list):
    """
    Sliding-window estimate of the lower Beurling density.

    For each r the infimum over x of #(Lambda cap [x, x + r)) / r is taken
    over the representation window; the whole r-profile is returned.
    """
    est = _interval_counts(pointset, r_list, lower=True)
    return DensityEstimate(float(est[-1]), np.asarray(r_list, float), est,
                           pointset.exact_density)


def upper_density(pointset, r_list):
    est = _interval_counts(pointset, r_list, lower=False)
    return DensityEstimate(float(est[-1]), np.asarray(r_list, float), est,
                           pointset.exact_density)


def enumerate_deltas(pointset, shift=0, bound=10.0, return_indices=False):
    """
    delta_n = lambda_{n + shift} - n over the index window.

    lambda_0 is the first point >= 0.  Raises NotEnumerableError when
    |delta_n| exceeds ``bound``, i.e. the set does not stay within bounded
    distance of Z.
    """
    pts = pointset.all_points()
    if pts.size < 2:
        raise ParameterError("need at least two points to enumerate")
    if separation(pointset) <= 0:
        raise ParameterError("points are not separated")
    i0 = int(np.searchsorted(pts, 0.0, "left"))
    idx = np.arange(pts.size) - i0          # index of each stored point
    n = idx - shift
    deltas = pts - n
    if np.max(np.abs(deltas)) > bound:
        raise NotEnumerableError(
            f"|delta_n| reaches {np.max(np.abs(deltas)):.3g} > {bound}")
    if return_indices:
        return n, deltas
    return deltas


# ---------------------------------------------------------------------------
# planar sets


@dataclass(frozen=True)
class PointSet2D:
    """
    Planar configuration: a base set mapped by a 2x2 linear transform.

    kind ``lattice``: generator columns ``generators`` (2x2) plus origin;
    kind ``product``: first x second of two PointSet1D; kind ``explicit``:
    an (n, 2) array.  ``transform`` acts on every base point.
    """

    kind: str
    window_radius: float
    generators: tuple = ((1.0, 0.0), (0.0, 1.0))
    factors: tuple = ()
    points_explicit: tuple = ()
    transform: tuple = ((1.0, 0.0), (0.0, 1.0))

    def __post_init__(self):
        if self.kind not in KINDS_2D:
            raise ParameterError(f"unknown planar kind {self.kind!r}")
        if self.kind == "lattice" and abs(np.linalg.det(np.asarray(self.generators))) == 0:
            raise ParameterError("lattice generators are degenerate")
        if abs(np.linalg.det(np.asarray(self.transform))) == 0:
            raise ParameterError("transform must be invertible")

    @classmethod
    def rect_lattice(cls, alpha, beta, window=80.0):
        return cls("lattice", float(window), generators=((alpha, 0.0), (0.0, beta)))

    @classmethod
    def product(cls, first, second, window=None):
        if window is None:
            window = min(first.window_radius, second.window_radius)
        return cls("product", float(window), factors=(first, second))

    @property
    def matrix(self):
        return np.asarray(self.transform, dtype=float)

    @property
    def exact_density(self):
        det = abs(np.linalg.det(self.matrix))
        if self.kind == "lattice":
            return 1.0 / (abs(np.linalg.det(np.asarray(self.generators))) * det)
        if self.kind == "product":
            d1, d2 = (f.exact_density for f in self.factors)
            if d1 is None or d2 is None:
                return None
            return d1 * d2 / det
        return None

    def _base_points(self, half):
        if self.kind == "lattice":
            gen = np.asarray(self.generators, dtype=float).T   # columns are generators
            inv = np.linalg.inv(gen)
            span = np.abs(inv) @ np.array([half, half])
            i = np.arange(-math.ceil(span[0]) - 1, math.ceil(span[0]) + 2)
            j = np.arange(-math.ceil(span[1]) - 1, math.ceil(span[1]) + 2)
            I, J = np.meshgrid(i, j, indexing="ij")
            pts = np.stack([I.ravel(), J.ravel()], axis=1) @ gen.T
        elif self.kind == "product":
            xs = self.factors[0].points(-half, half)
            ys = self.factors[1].points(-half, half)
            X, Y = np.meshgrid(xs, ys, indexing="ij")
            pts = np.stack([X.ravel(), Y.ravel()], axis=1)
        else:
            pts = np.asarray(self.points_explicit, dtype=float).reshape(-1, 2)
        return pts[np.all(np.abs(pts) <= half, axis=1)]

    def points(self, radius):
        """All points of the set inside the disc of the given radius."""
        if radius > self.window_radius + 1e-12:
            raise CoverageError("requested disc exceeds the representation window")
        M = self.matrix
        half = radius * np.linalg.norm(np.linalg.inv(M), 2) + 1.0
        if self.kind == "product":
            half = min(half, min(f.window_radius for f in self.factors))
        pts = self._base_points(half) @ M.T
        return pts[np.hypot(pts[:, 0], pts[:, 1]) <= radius]


def shear(S, sigma):
    """(x, y) -> (x, y + sigma x / pi), composed onto the existing transform."""
    sh = np.array([[1.0, 0.0], [sigma / np.pi, 1.0]])
    new = sh @ S.matrix
    return PointSet2D(S.kind, S.window_radius, S.generators, S.factors,
                      S.points_explicit, tuple(map(tuple, new)))


def planar_lower_density(S, r_list, center_step=None):
    """
    inf_z #(S cap B_r(z)) / (pi r^2) over a grid of centres.

    Centres fill the disc of radius window_radius - r_max.
    """
    r_list = np.asarray(r_list, dtype=float)
    if r_list.size == 0 or np.any(np.diff(r_list) <= 0):
        raise ParameterError("r_list must be non-empty and increasing")
    R = S.window_radius
    if r_list[-1] > R / 2 + 1e-12:
        raise CoverageError(f"max r = {r_list[-1]} exceeds window_radius/2")
    inner = R - r_list[-1]
    if center_step is None:
        center_step = max(inner / 12, 0.25)
    g = np.arange(-inner, inner + 1e-9, center_step)
    CX, CY = np.meshgrid(g, g, indexing="ij")
    centres = np.stack([CX.ravel(), CY.ravel()], axis=1)
    centres = centres[np.hypot(centres[:, 0], centres[:, 1]) <= inner]
    tree = cKDTree(S.points(R))
    est = []
    for r in r_list:
        counts = tree.query_ball_point(centres, r, return_length=True)
        est.append(np.min(counts) / (np.pi * r * r))
    est = np.array(est)
    return DensityEstimate(float(est[-1]), r_list, est, S.exact_density)
