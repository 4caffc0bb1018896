"""Drag-dominated swimmer models and gait-cycle integration on SE(2).

Every model exposes a local connection A(r): an (3 x n) matrix field over
shape space mapping shape velocity to the body twist, xi = A(r) rdot. Because
these systems are Stokesian the twist is a pure function of the shape path,
so per-cycle displacement is independent of pacing and a gait traversed
backward produces the inverse motion.

Shapes are plain float arrays (joint angles in radians for revolute models,
slider extensions in body lengths for the two-slider). All model geometry is
fixed at construction; models are immutable and every operation here is pure,
so cycles may be integrated concurrently.

Cycle integration uses a fixed-step 4th-order Runge-Kutta-Munthe-Kaas scheme:
the step increment is solved in the algebra (twist evaluated at the RK stage
shapes, corrected through the exact inverse differential of exp) and the
group element is accumulated by composing exponentials. Fixed step keeps
results bit-reproducible across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import se2
from .errors import (
    InvalidInputError,
    SingularConfigurationError,
    UnsupportedModelError,
)
from .se2 import Pose2

TAU = 2.0 * math.pi

MIN_STEPS = 64
DEFAULT_STEPS = 512

# Relative determinant threshold standing in for a 1e12 condition-number cap.
_SINGULAR_RTOL = 1e-12

# 3-point Gauss-Legendre nodes/weights on [0, 1]; exact for the cubic
# integrands of straight-segment drag wrenches.
_GL_NODES = np.array([0.5 - math.sqrt(3.0 / 5.0) / 2.0, 0.5, 0.5 + math.sqrt(3.0 / 5.0) / 2.0])
_GL_WEIGHTS = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])


def _rot90(v: np.ndarray) -> np.ndarray:
    """Apply J = [[0,-1],[1,0]] to trailing-2 vectors."""
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


def _cross2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _solve_balance(w_body: np.ndarray, w_shape: np.ndarray, shapes: np.ndarray) -> np.ndarray:
    """Solve the zero-net-wrench balance for the connection.

    w_body (..., 3, 3) and w_shape (..., 3, n) are drag wrenches per unit
    body twist and per unit shape rate; raises when the body-drag block is
    numerically singular.
    """
    det = np.linalg.det(w_body)
    scale = np.sqrt(np.einsum("...ij,...ij->...", w_body, w_body) / 3.0)
    bad = np.abs(det) <= _SINGULAR_RTOL * scale**3
    if np.any(bad):
        idx = int(np.nonzero(bad.ravel())[0][0])
        err = SingularConfigurationError(
            "drag matrix is numerically singular at a degenerate shape",
            shape=np.asarray(shapes).reshape(-1, shapes.shape[-1])[idx].copy(),
        )
        err.index = idx
        raise err
    return -np.linalg.solve(w_body, w_shape)


def _assemble_connection(
    r: np.ndarray,
    seg_start: np.ndarray,
    seg_angle: np.ndarray,
    seg_length: np.ndarray,
    dstart_dr: np.ndarray,
    dangle_dr: np.ndarray,
    c_t: float,
    c_n: float,
) -> np.ndarray:
    """Resistive-force connection from straight drag segments.

    Segment geometry is batched over leading dims: seg_start (..., L, 2),
    seg_angle (..., L), seg_length (L,), dstart_dr (..., L, n, 2),
    dangle_dr (..., L, n). Integrates the drag wrench of unit body motions
    and unit shape rates along each segment and solves the force/torque
    balance for the body twist.
    """
    batch = seg_angle.shape[:-1]
    n_seg = seg_angle.shape[-1]
    n_shape = dangle_dr.shape[-1]
    tang = np.stack([np.cos(seg_angle), np.sin(seg_angle)], axis=-1)
    norm = _rot90(tang)
    # Drag tensor per segment: c_t t t^T + c_n n n^T.
    drag = c_t * tang[..., :, None] * tang[..., None, :] + c_n * norm[
        ..., :, None
    ] * norm[..., None, :]

    total = np.zeros(batch + (3, 3 + n_shape))
    for q, wq in zip(_GL_NODES, _GL_WEIGHTS):
        s = q * seg_length  # (L,)
        x = seg_start + s[:, None] * tang  # (..., L, 2)
        # Velocity of the material point per unit of each generalized rate:
        # columns are [vx, vy, omega, rdot_1 .. rdot_n].
        cols = np.zeros(batch + (n_seg, 2, 3 + n_shape))
        cols[..., 0, 0] = 1.0
        cols[..., 1, 1] = 1.0
        cols[..., :, 2] = _rot90(x)
        dx_dr = dstart_dr + s[:, None, None] * norm[..., :, None, :] * dangle_dr[..., None]
        cols[..., 3:] = np.swapaxes(dx_dr, -1, -2)
        force = np.einsum("...lij,...ljc->...lic", drag, cols)
        torque = x[..., 0:1] * force[..., 1, :] - x[..., 1:2] * force[..., 0, :]
        wrench = np.concatenate([force, torque[..., None, :]], axis=-2)  # (..., L, 3, C)
        total += np.einsum("...lic,l->...ic", wrench, wq * seg_length)
    return _solve_balance(total[..., :3], total[..., 3:], r)


@dataclass(frozen=True)
class PurcellChain:
    """Chain of n_joints+1 equal slender links swimming by resistive drag.

    Links have total length 1 so displacements come out in body lengths.
    The body frame rides the middle link (the one at index (n+1)//2),
    centered at its midpoint. Drag coefficients are per unit length with the
    classic normal/tangential ratio of 2.
    """

    n_joints: int
    c_t: float = 1.0
    c_n: float = 2.0
    joint_limit: float = math.pi / 2

    kind = "purcell_chain"

    def __post_init__(self):
        if self.n_joints < 1:
            raise InvalidInputError("purcell chain needs at least one joint")

    @property
    def shape_dim(self) -> int:
        return self.n_joints

    @property
    def link_length(self) -> float:
        return 1.0 / (self.n_joints + 1)

    @property
    def body_link(self) -> int:
        return (self.n_joints + 1) // 2

    def shape_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lim = np.full(self.n_joints, self.joint_limit)
        return -lim, lim

    def validate_shape(self, r: np.ndarray) -> None:
        r = np.asarray(r)
        if r.shape[-1] != self.n_joints:
            raise InvalidInputError(
                f"shape has {r.shape[-1]} joints, model has {self.n_joints}"
            )

    def connection(self, r) -> np.ndarray:
        """Local connection A(r): body twist per unit joint rate, (..., 3, n)."""
        r = np.asarray(r, dtype=float)
        self.validate_shape(r)
        squeeze = r.ndim == 1
        r2 = np.atleast_2d(r)
        batch = r2.shape[:-1]
        n = self.n_joints
        n_links = n + 1
        ell = self.link_length
        m = self.body_link

        angles = np.zeros(batch + (n_links,))
        if m < n:
            angles[..., m + 1 :] = np.cumsum(r2[..., m:], axis=-1)
        if m > 0:
            angles[..., :m] = -np.flip(
                np.cumsum(np.flip(r2[..., :m], axis=-1), axis=-1), axis=-1
            )
        tang = np.stack([np.cos(angles), np.sin(angles)], axis=-1)

        starts = np.zeros(batch + (n_links, 2))
        joints = np.zeros(batch + (n, 2))
        starts[..., m, 0] = -ell / 2.0
        for i in range(m + 1, n_links):
            starts[..., i, :] = starts[..., i - 1, :] + ell * tang[..., i - 1, :]
            joints[..., i - 1, :] = starts[..., i, :]
        for i in range(m - 1, -1, -1):
            starts[..., i, :] = starts[..., i + 1, :] - ell * tang[..., i, :]
            joints[..., i, :] = starts[..., i + 1, :]

        # alpha[i, j]: +-1 when joint j rotates link i, 0 otherwise.
        link_idx = np.arange(n_links)[:, None]
        joint_idx = np.arange(n)[None, :]
        alpha = np.where(
            (joint_idx >= m) & (link_idx >= joint_idx + 1),
            1.0,
            np.where((joint_idx < m) & (link_idx <= joint_idx), -1.0, 0.0),
        )
        rel = starts[..., :, None, :] - joints[..., None, :, :]
        dstart_dr = alpha[..., :, :, None] * _rot90(rel)
        dangle_dr = np.broadcast_to(alpha, batch + alpha.shape)

        a = _assemble_connection(
            r2,
            starts,
            angles,
            np.full(n_links, ell),
            dstart_dr,
            dangle_dr,
            self.c_t,
            self.c_n,
        )
        return a[0] if squeeze else a.reshape(r.shape[:-1] + (3, n))


@dataclass(frozen=True)
class TwoSlider:
    """Sphere-pair swimmer driven by two orthogonal prismatic joints.

    The drag balance is the closed-form model

        [[3d, 0, 0], [0, 3d, 0], [-d r2, -d r1, d (r1^2+r2^2) + d^3/4]] xi
            = R(-pi/2) [[0, d], [-d, 0], [0, 0]] rdot

    with xi the body twist. Slider extensions are non-negative; d is the
    body-length scale.
    """

    d: float = 1.0
    slider_max: float = 2.0

    kind = "two_slider"

    def __post_init__(self):
        if self.d <= 0:
            raise InvalidInputError("two-slider scale d must be positive")

    @property
    def shape_dim(self) -> int:
        return 2

    def shape_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.zeros(2), np.full(2, self.slider_max)

    def validate_shape(self, r: np.ndarray) -> None:
        r = np.asarray(r)
        if r.shape[-1] != 2:
            raise InvalidInputError("two-slider shape has two sliders")
        if np.any(r < 0):
            raise InvalidInputError("slider extensions must be non-negative")

    def drag_matrix(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        d = self.d
        m = np.zeros(r.shape[:-1] + (3, 3))
        m[..., 0, 0] = 3.0 * d
        m[..., 1, 1] = 3.0 * d
        m[..., 2, 0] = -d * r[..., 1]
        m[..., 2, 1] = -d * r[..., 0]
        m[..., 2, 2] = d * (r[..., 0] ** 2 + r[..., 1] ** 2) + d**3 / 4.0
        return m

    def connection(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        self.validate_shape(r)
        # R(-pi/2) @ [[0, d], [-d, 0], [0, 0]] = [[-d, 0], [0, -d], [0, 0]]
        rhs = np.zeros(r.shape[:-1] + (3, 2))
        rhs[..., 0, 0] = -self.d
        rhs[..., 1, 1] = -self.d
        return np.linalg.solve(self.drag_matrix(r), rhs)


@dataclass(frozen=True)
class ThreeBranch:
    """Trilaterally symmetric swimmer: three paddles hinged at triangle tips.

    An equilateral core of the given circumradius carries one rotating
    slender paddle at each vertex (zero shape angle points radially
    outward). Core drag is modeled by three static links from the centroid
    to the vertices. Paddle drag follows slender-body coefficients with
    normal/tangential ratio 2. Dimensions are in body lengths.
    """

    circumradius: float = 0.2
    paddle_length: float = 0.4
    c_t: float = 1.0
    c_n: float = 2.0
    joint_limit: float = 2.5

    kind = "three_branch"

    @property
    def shape_dim(self) -> int:
        return 3

    def shape_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lim = np.full(3, self.joint_limit)
        return -lim, lim

    def validate_shape(self, r: np.ndarray) -> None:
        if np.asarray(r).shape[-1] != 3:
            raise InvalidInputError("three-branch shape has three paddle angles")

    def connection(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        self.validate_shape(r)
        squeeze = r.ndim == 1
        r2 = np.atleast_2d(r)
        batch = r2.shape[:-1]

        spokes = TAU / 3.0 * np.arange(3)
        verts = self.circumradius * np.stack([np.cos(spokes), np.sin(spokes)], axis=-1)

        # Segments 0-2: paddles; 3-5: static core links (no shape dependence).
        seg_angle = np.concatenate(
            [spokes + r2, np.broadcast_to(spokes, batch + (3,))], axis=-1
        )
        seg_start = np.concatenate(
            [
                np.broadcast_to(verts, batch + (3, 2)),
                np.zeros(batch + (3, 2)),
            ],
            axis=-2,
        )
        seg_length = np.concatenate(
            [np.full(3, self.paddle_length), np.full(3, self.circumradius)]
        )
        dangle_dr = np.zeros(batch + (6, 3))
        for k in range(3):
            dangle_dr[..., k, k] = 1.0
        dstart_dr = np.zeros(batch + (6, 3, 2))

        a = _assemble_connection(
            r2, seg_start, seg_angle, seg_length, dstart_dr, dangle_dr,
            self.c_t, self.c_n,
        )
        return a[0] if squeeze else a.reshape(r.shape[:-1] + (3, 3))


Model = PurcellChain | TwoSlider | ThreeBranch

_MODEL_KINDS = {
    "purcell_chain": PurcellChain,
    "two_slider": TwoSlider,
    "three_branch": ThreeBranch,
}


def make_model(kind: str, **geometry) -> Model:
    try:
        cls = _MODEL_KINDS[kind]
    except KeyError:
        raise UnsupportedModelError(
            f"unknown model kind {kind!r}; expected one of {sorted(_MODEL_KINDS)}"
        ) from None
    return cls(**geometry)


def connection(model: Model, r) -> np.ndarray:
    """Local connection A(r) of the model at shape r."""
    return model.connection(r)


def body_twists(model: Model, r: np.ndarray, dr: np.ndarray) -> np.ndarray:
    """Body twist xi = A(r) rdot, batched over leading dims."""
    a = model.connection(r)
    return np.einsum("...ij,...j->...i", a, dr)


@dataclass(frozen=True)
class TrajectorySample:
    phase: float
    shape: np.ndarray
    pose: Pose2


@dataclass(frozen=True)
class CycleResult:
    """Net motion of one gait cycle plus the pose/shape trace behind it."""

    displacement: Pose2
    trajectory: tuple[TrajectorySample, ...] = field(repr=False, default=())


def _stage_phases(steps: int, cycles: int = 1) -> np.ndarray:
    """Half-step phase grid covering `cycles` periods: 2*steps*cycles + 1 points."""
    return np.arange(2 * steps * cycles + 1) * (TAU / steps / 2.0)


def _step_increments(xi: np.ndarray, steps: int) -> np.ndarray:
    """Per-step algebra increments from twists on the half-step grid.

    xi has shape (..., 2*S+1, 3) sampled at phase i*h/2; returns (..., S, 3).
    RKMK4: classical RK4 on du/dphi = dexpinv(-u, xi(phi)) from u = 0.
    """
    h = TAU / steps
    k1 = xi[..., 0:-1:2, :]
    xi_mid = xi[..., 1::2, :]
    xi_end = xi[..., 2::2, :]
    k2 = se2.dexpinv_many(-(h / 2.0) * k1, xi_mid)
    k3 = se2.dexpinv_many(-(h / 2.0) * k2, xi_mid)
    k4 = se2.dexpinv_many(-h * k3, xi_end)
    return (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _compose_reduce(poses: np.ndarray) -> np.ndarray:
    """Ordered product of poses along axis -2 by pairwise tree reduction."""
    while poses.shape[-2] > 1:
        n = poses.shape[-2]
        if n % 2:
            pad = np.zeros(poses.shape[:-2] + (1, 3))
            poses = np.concatenate([poses, pad], axis=-2)
        poses = se2.compose_many(poses[..., 0::2, :], poses[..., 1::2, :])
    return poses[..., 0, :]


def displacement_from_twists(xi: np.ndarray, steps: int) -> np.ndarray:
    """Net pose of one cycle from twists on the half-step grid, batched."""
    u = _step_increments(xi, steps)
    return _compose_reduce(se2.exp_many(u))


def integrate_cycle(model: Model, gait, steps: int = DEFAULT_STEPS) -> CycleResult:
    """Integrate one gait cycle from the identity pose.

    `gait` maps an array of phases to (r, dr/dphi) arrays. The result is
    independent of traversal speed; only the shape path matters.
    """
    if steps < MIN_STEPS:
        raise InvalidInputError(f"need at least {MIN_STEPS} steps, got {steps}")
    phases = _stage_phases(steps)
    r, dr = gait(phases)
    r = np.asarray(r, dtype=float)
    dr = np.asarray(dr, dtype=float)
    try:
        xi = body_twists(model, r, dr)
    except SingularConfigurationError as err:
        if getattr(err, "index", None) is not None:
            err.phase = float(phases[err.index])
        raise
    u = _step_increments(xi, steps)
    step_poses = se2.exp_many(u)

    samples = [TrajectorySample(0.0, r[0].copy(), se2.IDENTITY)]
    g = np.zeros(3)
    h = TAU / steps
    for i in range(steps):
        g = se2.compose_many(g, step_poses[i])
        samples.append(
            TrajectorySample(float((i + 1) * h), r[2 * (i + 1)].copy(), Pose2.from_array(g))
        )
    return CycleResult(displacement=samples[-1].pose, trajectory=tuple(samples))


def integrate_gait_sequence(model: Model, gaits, steps: int = DEFAULT_STEPS) -> Pose2:
    """One continuous rollout through several gait cycles in order.

    All gaits must share their start/end shape (a common base point) for the
    sequence to be physically contiguous.
    """
    if steps < MIN_STEPS:
        raise InvalidInputError(f"need at least {MIN_STEPS} steps, got {steps}")
    phases = _stage_phases(steps)
    increments = []
    for gait in gaits:
        r, dr = gait(phases)
        xi = body_twists(model, np.asarray(r, dtype=float), np.asarray(dr, dtype=float))
        increments.append(_step_increments(xi, steps))
    u = np.concatenate(increments, axis=0)
    return Pose2.from_array(_compose_reduce(se2.exp_many(u)))


def three_branch_preset_gait(k: int, direction: int = 1):
    """Hand-designed paddle gait k in {1, 2, 3} for the three-branch swimmer.

    Gait k drives joint k-1 with sin(phi) and the next two joints
    (cyclically) with 1-cos(phi) and -1+cos(phi); direction -1 traverses the
    cycle backward, producing the inverse group action.
    """
    if k not in (1, 2, 3):
        raise InvalidInputError(f"preset gait index must be 1, 2 or 3, got {k}")
    if direction not in (1, -1):
        raise InvalidInputError(f"direction must be +1 or -1, got {direction}")
    lead = k - 1

    def fn(phi):
        phi = np.asarray(phi, dtype=float)
        p = direction * phi
        r = np.zeros(phi.shape + (3,))
        dr = np.zeros(phi.shape + (3,))
        r[..., lead] = np.sin(p)
        r[..., (lead + 1) % 3] = 1.0 - np.cos(p)
        r[..., (lead + 2) % 3] = -1.0 + np.cos(p)
        dr[..., lead] = direction * np.cos(p)
        dr[..., (lead + 1) % 3] = direction * np.sin(p)
        dr[..., (lead + 2) % 3] = -direction * np.sin(p)
        return r, dr

    return fn


def two_slider_arc_gait(radius: float, direction: int = 1):
    """Corner-and-arc slider gait: out along one axis, sweep, back home.

    From the origin of shape space, extend slider 1 to `radius`, sweep at
    constant radius to slider 2's axis, then retract. Larger radii turn the
    swimmer more per cycle; direction -1 runs the loop the other way around.
    """
    if radius <= 0:
        raise InvalidInputError(f"arc radius must be positive, got {radius}")
    if direction not in (1, -1):
        raise InvalidInputError(f"direction must be +1 or -1, got {direction}")

    def fn(phi):
        phi = np.asarray(phi, dtype=float)
        t = np.mod(phi, TAU) * (3.0 / TAU)
        if direction < 0:
            t = 3.0 - t
        seg = np.minimum(np.floor(t), 2.0)
        frac = t - seg
        chi = frac * (math.pi / 2.0)
        r = np.zeros(phi.shape + (2,))
        dr_dt = np.zeros(phi.shape + (2,))
        out = seg == 0
        arc = seg == 1
        back = seg == 2
        r[..., 0] = np.where(out, radius * frac, np.where(arc, radius * np.cos(chi), 0.0))
        r[..., 1] = np.where(back, radius * (1.0 - frac), np.where(arc, radius * np.sin(chi), 0.0))
        dr_dt[..., 0] = np.where(
            out, radius, np.where(arc, -radius * np.sin(chi) * (math.pi / 2.0), 0.0)
        )
        dr_dt[..., 1] = np.where(
            back, -radius, np.where(arc, radius * np.cos(chi) * (math.pi / 2.0), 0.0)
        )
        scale = direction * 3.0 / TAU
        return r, dr_dt * scale

    return fn


def sample_connection_field(
    model: Model, r1_vals, r2_vals
) -> tuple[np.ndarray, np.ndarray]:
    """Rows of A(r) over a 2-D shape grid, for field plots and export.

    Returns (points (G, 2), connection (G, 3, 2)) with the grid flattened
    r1-major. Only defined for two-dimensional shape spaces.
    """
    if model.shape_dim != 2:
        raise UnsupportedModelError(
            f"connection field sampling needs a 2-D shape space; "
            f"{model.kind} has {model.shape_dim} shape variables"
        )
    r1 = np.asarray(r1_vals, dtype=float)
    r2 = np.asarray(r2_vals, dtype=float)
    g1, g2 = np.meshgrid(r1, r2, indexing="ij")
    pts = np.stack([g1.ravel(), g2.ravel()], axis=-1)
    return pts, model.connection(pts)
