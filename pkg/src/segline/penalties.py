"""Folded-concave penalty functions and the scalar SCAD thresholding rule."""

from __future__ import annotations

import math

__all__ = [
    "scad_penalty",
    "scad_derivative",
    "mcp_penalty",
    "mcp_derivative",
    "scad_threshold_scalar",
]


def scad_penalty(x: float, lam: float, gamma: float) -> float:
    """Three-branch SCAD penalty value at x >= 0.

    Linear up to lam, quadratic taper to gamma*lam, then constant
    lam^2 (gamma + 1) / 2.
    """
    if x < 0:
        raise ValueError("x must be nonnegative")
    if lam <= 0:
        raise ValueError("lam must be positive")
    if gamma <= 2:
        raise ValueError("SCAD requires gamma > 2")
    if x <= lam:
        return lam * x
    if x <= gamma * lam:
        return (gamma * lam * x - 0.5 * (x * x + lam * lam)) / (gamma - 1.0)
    return lam * lam * (gamma + 1.0) / 2.0


def scad_derivative(x: float, lam: float, gamma: float) -> float:
    """Right derivative of the SCAD penalty at x >= 0."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x <= lam:
        return lam
    if x <= gamma * lam:
        return (gamma * lam - x) / (gamma - 1.0)
    return 0.0


def mcp_penalty(x: float, lam: float, gamma: float) -> float:
    """Two-branch MCP penalty value at x >= 0.

    Quadratic taper up to gamma*lam, then constant gamma*lam^2/2.
    """
    if x < 0:
        raise ValueError("x must be nonnegative")
    if lam <= 0:
        raise ValueError("lam must be positive")
    if gamma <= 1:
        raise ValueError("MCP requires gamma > 1")
    if x <= gamma * lam:
        return lam * x - x * x / (2.0 * gamma)
    return 0.5 * gamma * lam * lam


def mcp_derivative(x: float, lam: float, gamma: float) -> float:
    """Right derivative of the MCP penalty at x >= 0."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x <= gamma * lam:
        return lam - x / gamma
    return 0.0


def scad_threshold_scalar(z: float, lam: float, gamma: float) -> float:
    """Minimizer of 0.5 (z - mu)^2 + SCAD_{lam,gamma}(|mu|) over mu.

    Soft threshold for |z| <= 2 lam, linear shrinkage on the middle branch,
    identity beyond gamma*lam (the unbiased region). Odd in z.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    if gamma <= 2:
        raise ValueError("SCAD requires gamma > 2")
    az = abs(z)
    if az <= 2.0 * lam:
        return math.copysign(max(az - lam, 0.0), z)
    if az <= gamma * lam:
        return ((gamma - 1.0) * z - math.copysign(gamma * lam, z)) / (gamma - 2.0)
    return z
