"""Periodic gait parametrization: ellipse terms plus narrow cosine bumps.

Each joint's trajectory over one cycle (phase phi in [0, 2pi)) is

    r_i(phi) = c_i (1 - cos phi) + b_i cos phi + a_i sin phi
               + sum_k u_ik * bump(phi - k * 2pi/18),   k = 1..16

with bump(x) = 1 + cos(54 x) on |54 x| < pi and 0 outside. The bump comb
uses 18 slots but drops the two whose support touches phase zero, so the
value at phi = 0 is exactly the base point b_i for any parameter values.
All sixteen kept bumps have support strictly inside the cycle, making the
trajectory smooth and exactly periodic.

The cycle rate Omega only sets wall-clock pacing; in the drag-dominated
models displacement per cycle is independent of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInputError

TAU = 2.0 * math.pi

N_SLOTS = 18  # bump comb slots per cycle
BUMP_SHARPNESS = 3  # multiplies slot count in the bump's cosine argument
N_BUMPS = 16  # slots 1..16 kept; the two touching phase zero are dropped
PARAMS_PER_JOINT = 3 + N_BUMPS

_BUMP_CENTERS = TAU / N_SLOTS * np.arange(1, N_BUMPS + 1)
_BUMP_RATE = float(BUMP_SHARPNESS * N_SLOTS)
_BUMP_HALF_WIDTH = math.pi / _BUMP_RATE


@dataclass(frozen=True)
class GaitParams:
    """Per-joint gait coefficients plus the cycle rate.

    Arrays are (n_joints,) for center/base/sine and (n_joints, 16) for the
    bump weights. Immutable; all evaluation is pure.
    """

    center: np.ndarray
    base: np.ndarray
    sine: np.ndarray
    bumps: np.ndarray
    omega: float = 1.0

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        base = np.atleast_1d(np.asarray(self.base, dtype=float))
        sine = np.atleast_1d(np.asarray(self.sine, dtype=float))
        bumps = np.asarray(self.bumps, dtype=float).reshape(len(center), N_BUMPS)
        if not (len(center) == len(base) == len(sine)):
            raise InvalidInputError("per-joint coefficient arrays disagree in length")
        for name, arr in (("center", center), ("base", base), ("sine", sine), ("bumps", bumps)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "omega", float(self.omega))

    @property
    def n_joints(self) -> int:
        return len(self.center)

    def as_json(self) -> dict:
        return {
            "omega": self.omega,
            "n_bumps": N_BUMPS,
            "joints": [
                {
                    "center": float(self.center[i]),
                    "base": float(self.base[i]),
                    "sine": float(self.sine[i]),
                    "bumps": [float(u) for u in self.bumps[i]],
                }
                for i in range(self.n_joints)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "GaitParams":
        joints = data["joints"]
        return cls(
            center=np.array([j["center"] for j in joints]),
            base=np.array([j["base"] for j in joints]),
            sine=np.array([j["sine"] for j in joints]),
            bumps=np.array([j["bumps"] for j in joints]),
            omega=float(data.get("omega", 1.0)),
        )


def zero_gait(n_joints: int, omega: float = 1.0) -> GaitParams:
    return GaitParams(
        center=np.zeros(n_joints),
        base=np.zeros(n_joints),
        sine=np.zeros(n_joints),
        bumps=np.zeros((n_joints, N_BUMPS)),
        omega=omega,
    )


def seed_gait(n_joints: int, joint: int, amplitude: float) -> GaitParams:
    """A pure sine stimulus on one joint; every other coefficient zero."""
    if amplitude <= 0:
        raise InvalidInputError(f"seed amplitude must be positive, got {amplitude}")
    sine = np.zeros(n_joints)
    sine[joint] = amplitude
    return replace(zero_gait(n_joints), sine=sine)


def _bump_terms(phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bump values and derivatives, shape phi.shape + (16,)."""
    x = np.mod(phi, TAU)[..., None] - _BUMP_CENTERS
    inside = np.abs(x) < _BUMP_HALF_WIDTH
    w = np.where(inside, 1.0 + np.cos(_BUMP_RATE * x), 0.0)
    dw = np.where(inside, -_BUMP_RATE * np.sin(_BUMP_RATE * x), 0.0)
    return w, dw


def eval_gait(p: GaitParams, phi) -> tuple[np.ndarray, np.ndarray]:
    """Shape r(phi) and derivative dr/dphi.

    `phi` may be a scalar (returns shape (n,)) or an array of phases
    (returns phi.shape + (n,)).
    """
    phi_arr = np.asarray(phi, dtype=float)
    cos_p = np.cos(phi_arr)[..., None]
    sin_p = np.sin(phi_arr)[..., None]
    w, dw = _bump_terms(phi_arr)
    r = p.center * (1.0 - cos_p) + p.base * cos_p + p.sine * sin_p + w @ p.bumps.T
    dr = (p.center - p.base) * sin_p + p.sine * cos_p + dw @ p.bumps.T
    return r, dr


def eval_flat_batch(
    flat: np.ndarray, n_joints: int, phi: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate a (B, 19n) batch of flattened gaits at phases (S,).

    Returns r and dr/dphi with shape (B, S, n). Fast path for rollouts.
    """
    flat = np.asarray(flat, dtype=float).reshape(-1, n_joints, PARAMS_PER_JOINT)
    c = flat[:, :, 0][:, None, :]
    b = flat[:, :, 1][:, None, :]
    a = flat[:, :, 2][:, None, :]
    u = flat[:, :, 3:]
    phi = np.asarray(phi, dtype=float)
    cos_p = np.cos(phi)[None, :, None]
    sin_p = np.sin(phi)[None, :, None]
    w, dw = _bump_terms(phi)  # (S, 16)
    r = c * (1.0 - cos_p) + b * cos_p + a * sin_p + np.einsum("sk,bnk->bsn", w, u)
    dr = (c - b) * sin_p + a * cos_p + np.einsum("sk,bnk->bsn", dw, u)
    return r, dr


def gait_function(p: GaitParams):
    """Adapter to the dynamics integrator's (phi) -> (r, dr/dphi) protocol."""

    def fn(phi):
        return eval_gait(p, phi)

    return fn


def flatten(p: GaitParams) -> np.ndarray:
    """Canonical parameter vector: (center, base, sine, bumps[16]) per joint."""
    return np.concatenate(
        [p.center[:, None], p.base[:, None], p.sine[:, None], p.bumps], axis=1
    ).ravel()


def unflatten(vec: np.ndarray, omega: float = 1.0) -> GaitParams:
    vec = np.asarray(vec, dtype=float).ravel()
    if vec.size == 0 or vec.size % PARAMS_PER_JOINT:
        raise InvalidInputError(
            f"parameter vector length {vec.size} is not a positive multiple "
            f"of {PARAMS_PER_JOINT}"
        )
    table = vec.reshape(-1, PARAMS_PER_JOINT)
    return GaitParams(
        center=table[:, 0].copy(),
        base=table[:, 1].copy(),
        sine=table[:, 2].copy(),
        bumps=table[:, 3:].copy(),
        omega=omega,
    )


@dataclass(frozen=True)
class LockMask:
    """Per-joint lock state: None means free, a float means locked at that value."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(
            self,
            "values",
            tuple(None if v is None else float(v) for v in self.values),
        )

    @classmethod
    def free(cls, n_joints: int) -> "LockMask":
        return cls(tuple(None for _ in range(n_joints)))

    @classmethod
    def single(cls, n_joints: int, joint: int, value: float) -> "LockMask":
        values = [None] * n_joints
        values[joint] = float(value)
        return cls(tuple(values))

    @property
    def locked_joints(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.values) if v is not None)

    def frozen_coords(self) -> np.ndarray:
        """Boolean mask over the flattened parameter vector."""
        mask = np.zeros((len(self.values), PARAMS_PER_JOINT), dtype=bool)
        for i in self.locked_joints:
            mask[i, :] = True
        return mask.ravel()


def apply_lock(p: GaitParams, mask: LockMask) -> GaitParams:
    """Freeze locked joints: r_i(phi) becomes the locked constant for all phi."""
    if len(mask.values) != p.n_joints:
        raise InvalidInputError(
            f"lock mask has {len(mask.values)} joints, gait has {p.n_joints}"
        )
    if not mask.locked_joints:
        return p
    center = p.center.copy()
    base = p.base.copy()
    sine = p.sine.copy()
    bumps = p.bumps.copy()
    for i in mask.locked_joints:
        v = mask.values[i]
        center[i] = v
        base[i] = v
        sine[i] = 0.0
        bumps[i, :] = 0.0
    return GaitParams(center, base, sine, bumps, p.omega)


def joint_amplitude(p: GaitParams, joint: int, samples: int = 512) -> float:
    """Peak-to-peak range of one joint's trajectory over a cycle."""
    phases = np.linspace(0.0, TAU, samples, endpoint=False)
    r, _ = eval_gait(p, phases)
    return float(r[:, joint].max() - r[:, joint].min())
