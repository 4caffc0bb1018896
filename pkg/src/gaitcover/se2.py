"""Planar rigid-motion group SE(2), its algebra se(2), and the weighted loss.

Poses are (x, y, theta) with translation in body lengths and heading in
radians, heading always normalized to (-pi, pi] with the branch point at +pi.
Twists are (vx, vy, omega) algebra elements.

Scalar operations work on the `Pose2`/`Twist2` dataclasses. The `*_many`
functions are the same maps vectorized over trailing-(..., 3) numpy arrays;
the scalar API is exact on identity laws, the array kernels are accurate to
a few ulp. Everything here is a pure function of its inputs and safe to call
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigurationError

TAU = 2.0 * math.pi

# Calibration: a half rotation costs as much as one body length of translation.
DEFAULT_ROT_WEIGHT = 1.0 / math.pi

# Below this |omega| the closed-form exp/log coefficients switch to series.
_SMALL_ANGLE = 1e-4


def normalize_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]; values already in range pass through exactly."""
    if -math.pi < theta <= math.pi:
        return theta
    t = math.remainder(theta, TAU)
    if t <= -math.pi:
        t += TAU
    return t


@dataclass(frozen=True)
class Pose2:
    """An element of SE(2): the net body motion of a maneuver or gait cycle."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta])

    @classmethod
    def from_array(cls, arr) -> "Pose2":
        x, y, theta = arr
        return cls(float(x), float(y), float(theta))

    def matrix(self) -> np.ndarray:
        """3x3 homogeneous-coordinates representation."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([[c, -s, self.x], [s, c, self.y], [0.0, 0.0, 1.0]])

    def as_json(self) -> list[float]:
        """JSON wire format: the triple [x, y, theta]."""
        return [self.x, self.y, self.theta]


@dataclass(frozen=True)
class Twist2:
    """An element of se(2): the logarithm of a pose, or a body velocity."""

    vx: float
    vy: float
    omega: float

    def __post_init__(self):
        object.__setattr__(self, "vx", float(self.vx))
        object.__setattr__(self, "vy", float(self.vy))
        object.__setattr__(self, "omega", float(self.omega))

    def as_array(self) -> np.ndarray:
        return np.array([self.vx, self.vy, self.omega])

    @classmethod
    def from_array(cls, arr) -> "Twist2":
        vx, vy, omega = arr
        return cls(float(vx), float(vy), float(omega))


IDENTITY = Pose2(0.0, 0.0, 0.0)


def compose(a: Pose2, b: Pose2) -> Pose2:
    """Group product a*b: b's translation rotated into a's frame, headings added."""
    c, s = math.cos(a.theta), math.sin(a.theta)
    return Pose2(
        a.x + c * b.x - s * b.y,
        a.y + s * b.x + c * b.y,
        a.theta + b.theta,
    )


def inverse(g: Pose2) -> Pose2:
    """Group inverse: compose(g, inverse(g)) is the identity."""
    c, s = math.cos(g.theta), math.sin(g.theta)
    return Pose2(-(c * g.x + s * g.y), s * g.x - c * g.y, -g.theta)


def exp(xi: Twist2) -> Pose2:
    """Exponential map se(2) -> SE(2); series limit near omega = 0."""
    w = xi.omega
    if abs(w) < _SMALL_ANGLE:
        w2 = w * w
        a = 1.0 - w2 / 6.0 + w2 * w2 / 120.0  # sin(w)/w
        b = w / 2.0 - w2 * w / 24.0  # (1-cos(w))/w
    else:
        a = math.sin(w) / w
        b = (1.0 - math.cos(w)) / w
    return Pose2(a * xi.vx - b * xi.vy, b * xi.vx + a * xi.vy, w)


def log(g: Pose2) -> Twist2:
    """Logarithm map SE(2) -> se(2).

    Continuous on theta in (-pi, pi); at the branch point the +pi side is
    taken, so log of a half rotation has omega = +pi. Inverse of `exp` on
    that range.
    """
    th = g.theta
    if abs(th) < _SMALL_ANGLE:
        t2 = th * th
        k = 1.0 - t2 / 12.0 - t2 * t2 / 720.0  # (th/2) * cot(th/2)
    else:
        half = 0.5 * th
        k = half * math.cos(half) / math.sin(half)
    half = 0.5 * th
    return Twist2(k * g.x + half * g.y, -half * g.x + k * g.y, th)


def eta(xi: Twist2, rot_weight: float = DEFAULT_ROT_WEIGHT) -> float:
    """Rotation-weighted norm on se(2).

    sqrt(vx^2 + vy^2 + (rot_weight*omega)^2). The default weight 1/pi makes a
    half rotation cost exactly one body length.
    """
    if rot_weight <= 0.0:
        raise InvalidConfigurationError(f"rot_weight must be positive, got {rot_weight}")
    return math.hypot(xi.vx, xi.vy, rot_weight * xi.omega)


def relative_loss(m: Pose2, goal: Pose2, rot_weight: float = DEFAULT_ROT_WEIGHT) -> float:
    """Distance eta(log(m * goal^-1)); zero iff m equals the goal.

    Invariant under a common right factor, and under a common left factor
    that is a pure rotation.
    """
    return eta(log(compose(m, inverse(goal))), rot_weight)


# ---------------------------------------------------------------------------
# Array kernels: the same maps over (..., 3) arrays.
# ---------------------------------------------------------------------------


def normalize_angle_many(theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    in_range = (theta > -math.pi) & (theta <= math.pi)
    wrapped = math.pi - np.remainder(math.pi - theta, TAU)
    return np.where(in_range, theta, wrapped)


def compose_many(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c, s = np.cos(a[..., 2]), np.sin(a[..., 2])
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = a[..., 0] + c * b[..., 0] - s * b[..., 1]
    out[..., 1] = a[..., 1] + s * b[..., 0] + c * b[..., 1]
    out[..., 2] = normalize_angle_many(a[..., 2] + b[..., 2])
    return out


def inverse_many(g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    c, s = np.cos(g[..., 2]), np.sin(g[..., 2])
    out = np.empty_like(g)
    out[..., 0] = -(c * g[..., 0] + s * g[..., 1])
    out[..., 1] = s * g[..., 0] - c * g[..., 1]
    out[..., 2] = normalize_angle_many(-g[..., 2])
    return out


def exp_many(xi: np.ndarray) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    w = xi[..., 2]
    small = np.abs(w) < _SMALL_ANGLE
    ws = np.where(small, 1.0, w)
    w2 = w * w
    a = np.where(small, 1.0 - w2 / 6.0 + w2 * w2 / 120.0, np.sin(w) / ws)
    b = np.where(small, w / 2.0 - w2 * w / 24.0, (1.0 - np.cos(w)) / ws)
    out = np.empty_like(xi)
    out[..., 0] = a * xi[..., 0] - b * xi[..., 1]
    out[..., 1] = b * xi[..., 0] + a * xi[..., 1]
    out[..., 2] = normalize_angle_many(w)
    return out


def log_many(g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    th = normalize_angle_many(g[..., 2])
    half = 0.5 * th
    small = np.abs(th) < _SMALL_ANGLE
    hs = np.where(small, 1.0, half)
    t2 = th * th
    k = np.where(
        small,
        1.0 - t2 / 12.0 - t2 * t2 / 720.0,
        hs * np.cos(hs) / np.sin(hs),
    )
    out = np.empty_like(g)
    out[..., 0] = k * g[..., 0] + half * g[..., 1]
    out[..., 1] = -half * g[..., 0] + k * g[..., 1]
    out[..., 2] = th
    return out


def eta_many(xi: np.ndarray, rot_weight: float = DEFAULT_ROT_WEIGHT) -> np.ndarray:
    if rot_weight <= 0.0:
        raise InvalidConfigurationError(f"rot_weight must be positive, got {rot_weight}")
    xi = np.asarray(xi, dtype=float)
    return np.sqrt(
        xi[..., 0] ** 2 + xi[..., 1] ** 2 + (rot_weight * xi[..., 2]) ** 2
    )


def relative_loss_many(
    m: np.ndarray, goal: np.ndarray, rot_weight: float = DEFAULT_ROT_WEIGHT
) -> np.ndarray:
    return eta_many(log_many(compose_many(m, inverse_many(goal))), rot_weight)


# ---------------------------------------------------------------------------
# Algebra utilities used by the group integrator and the coverage gradient.
# ---------------------------------------------------------------------------


def bracket_many(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Lie bracket [a, b] on se(2), vectorized over (..., 3)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = b[..., 2] * a[..., 1] - a[..., 2] * b[..., 1]
    out[..., 1] = a[..., 2] * b[..., 0] - b[..., 2] * a[..., 0]
    out[..., 2] = 0.0
    return out


def _dexpinv_quad_coeff(w: np.ndarray) -> np.ndarray:
    # e(w) = (1 - (w/2) cot(w/2)) / w^2, series 1/12 + w^2/720 + ... near 0
    small = np.abs(w) < _SMALL_ANGLE
    ws = np.where(small, 1.0, w)
    half = 0.5 * ws
    series = 1.0 / 12.0 + w * w / 720.0
    closed = (1.0 - half * np.cos(half) / np.sin(half)) / (ws * ws)
    return np.where(small, series, closed)


def dexpinv_many(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Apply the inverse of the differential of exp at w to v.

    Exact inverse of `dexp_many` at the same w; on se(2) it closes as
    v - [w,v]/2 + e(omega_w) [w,[w,v]].
    """
    wv = bracket_many(w, v)
    wwv = bracket_many(w, wv)
    e = _dexpinv_quad_coeff(np.asarray(w, dtype=float)[..., 2])
    return v - 0.5 * wv + e[..., None] * wwv


def _dexp_coeffs(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    small = np.abs(w) < _SMALL_ANGLE
    ws = np.where(small, 1.0, w)
    w2 = w * w
    c1 = np.where(small, 0.5 - w2 / 24.0, (1.0 - np.cos(w)) / (ws * ws))
    c2 = np.where(small, 1.0 / 6.0 - w2 / 120.0, (ws - np.sin(ws)) / (ws * ws * ws))
    return c1, c2


def dexp_many(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Apply the right-trivialized differential of exp at w to v.

    exp(w + s v) = exp(w) exp(s * dexp_many(-w, v) + O(s^2)); inverse of
    `dexpinv_many` at the same w.
    """
    wv = bracket_many(w, v)
    wwv = bracket_many(w, wv)
    c1, c2 = _dexp_coeffs(np.asarray(w, dtype=float)[..., 2])
    return v + c1[..., None] * wv + c2[..., None] * wwv


def _ad_matrix(w: np.ndarray) -> np.ndarray:
    """Matrix of ad_w acting on twist coordinates (vx, vy, omega)."""
    w = np.asarray(w, dtype=float)
    m = np.zeros(w.shape[:-1] + (3, 3))
    m[..., 0, 1] = -w[..., 2]
    m[..., 0, 2] = w[..., 1]
    m[..., 1, 0] = w[..., 2]
    m[..., 1, 2] = -w[..., 0]
    return m


def dexp_matrix(w: np.ndarray) -> np.ndarray:
    """3x3 matrix form of `dexp_many(w, .)`."""
    k = _ad_matrix(w)
    c1, c2 = _dexp_coeffs(np.asarray(w, dtype=float)[..., 2])
    eye = np.broadcast_to(np.eye(3), k.shape)
    return eye + c1[..., None, None] * k + c2[..., None, None] * (k @ k)


def dexpinv_matrix(w: np.ndarray) -> np.ndarray:
    """3x3 matrix form of `dexpinv_many(w, .)`."""
    k = _ad_matrix(w)
    e = _dexpinv_quad_coeff(np.asarray(w, dtype=float)[..., 2])
    eye = np.broadcast_to(np.eye(3), k.shape)
    return eye - 0.5 * k + e[..., None, None] * (k @ k)


def adjoint_matrix(g: np.ndarray) -> np.ndarray:
    """Adjoint of a pose on twist coordinates: Ad_g (v, w) = (R v - w J t, w)."""
    g = np.asarray(g, dtype=float)
    c, s = np.cos(g[..., 2]), np.sin(g[..., 2])
    m = np.zeros(g.shape[:-1] + (3, 3))
    m[..., 0, 0] = c
    m[..., 0, 1] = -s
    m[..., 0, 2] = g[..., 1]
    m[..., 1, 0] = s
    m[..., 1, 1] = c
    m[..., 1, 2] = -g[..., 0]
    m[..., 2, 2] = 1.0
    return m
