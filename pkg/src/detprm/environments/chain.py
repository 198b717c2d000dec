"""Planar kinematic chain with revolute joints and a fixed base."""

from __future__ import annotations

import numpy as np

from detprm.core import DimensionMismatch, wrap_angle
from detprm.environments.geometry import Chain, Environment, segments_collision_free

DEFAULT_EDGE_RESOLUTION = 16


def chain_forward_kinematics(theta, chain: Chain) -> np.ndarray:
    """Joint positions ``(n_links + 1, 2)``, base first, end effector last."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape[-1] != chain.n_links:
        raise DimensionMismatch(f"expected {chain.n_links} joint angles, got {theta.shape[-1]}")
    return _fk_batch(theta.reshape(1, -1), chain)[0]


def _fk_batch(thetas: np.ndarray, chain: Chain) -> np.ndarray:
    phi = np.cumsum(thetas, axis=1)
    steps = chain.link_length * np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    joints = np.concatenate([np.zeros((len(thetas), 1, 2)), np.cumsum(steps, axis=1)], axis=1)
    return joints + chain.base


def chain_configs_free(thetas: np.ndarray, env: Environment) -> np.ndarray:
    """Whether every link of each configuration avoids the workspace obstacles."""
    thetas = np.asarray(thetas, dtype=np.float64).reshape(-1, env.dim)
    joints = _fk_batch(thetas, env.chain)
    a = joints[:, :-1, :].reshape(-1, 2)
    b = joints[:, 1:, :].reshape(-1, 2)
    free = segments_collision_free(a, b, _workspace(env))
    return free.reshape(len(thetas), env.chain.n_links).all(axis=1)


def chain_config_free(theta, env: Environment) -> bool:
    return bool(chain_configs_free(np.asarray(theta)[None, :], env)[0])


def _workspace(env: Environment) -> Environment:
    return Environment(2, env.obstacles)


def interpolate_angles(theta_a, theta_b, resolution: int) -> np.ndarray:
    """``resolution + 1`` evenly spaced states along the shortest wrapped arc."""
    theta_a = np.asarray(theta_a, dtype=np.float64)
    delta = wrap_angle(np.asarray(theta_b, dtype=np.float64) - theta_a)
    s = np.linspace(0.0, 1.0, resolution + 1)[:, None]
    return theta_a[None, :] + s * delta[None, :]


def chain_edge_collision_free(theta_a, theta_b, env: Environment,
                              resolution: int = DEFAULT_EDGE_RESOLUTION) -> bool:
    """Discretized local-path check; both endpoints are always checked.

    ``resolution`` is the number of interpolation steps, so doubling it
    checks a superset of the states.
    """
    if env.chain is None:
        raise ValueError("environment has no chain")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    return bool(chain_configs_free(interpolate_angles(theta_a, theta_b, resolution), env).all())


def chain_edges_collision_free(A: np.ndarray, B: np.ndarray, env: Environment,
                               resolution: int = DEFAULT_EDGE_RESOLUTION, chunk: int = 4096) -> np.ndarray:
    """Vectorized :func:`chain_edge_collision_free` over rows of ``A`` and ``B``."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    out = np.empty(len(A), dtype=bool)
    s = np.linspace(0.0, 1.0, resolution + 1)
    for start in range(0, len(A), chunk):
        a = A[start:start + chunk]
        delta = wrap_angle(B[start:start + chunk] - a)
        states = a[:, None, :] + s[None, :, None] * delta[:, None, :]
        free = chain_configs_free(states.reshape(-1, env.dim), env)
        out[start:start + chunk] = free.reshape(len(a), len(s)).all(axis=1)
    return out
