"""
Normalized angle functions and their differentials.

Angles are measured in turns, so they take values in [0, 1) and the
normalized volume form on the circle is simply d(angle). The plane angle
of an edge (i, j) is Arg(x_j - x_i); the half-plane (hyperbolic) angle is
Arg((x_j - x_i) / (x_j - conj(x_i))).
"""
import numpy as np

from apps.core.exceptions import SingularConfigurationError

TURN = 2 * np.pi
COINCIDENCE = 1e-12


def _check_distinct(*differences):
    for difference in differences:
        if np.any(np.abs(difference) < COINCIDENCE):
            raise SingularConfigurationError("coincident points")


def angle_plane(i, j):
    """Arg(x_j - x_i) in turns."""
    difference = np.asarray(j, dtype=complex) - np.asarray(i, dtype=complex)
    _check_distinct(difference)
    return np.mod(np.angle(difference) / TURN, 1.0)


def angle_halfplane(i, j):
    """Hyperbolic angle from i to j in the upper half-plane, in turns."""
    i = np.asarray(i, dtype=complex)
    j = np.asarray(j, dtype=complex)
    difference, mirrored = j - i, j - np.conj(i)
    _check_distinct(difference, mirrored)
    return np.mod(np.angle(difference / mirrored) / TURN, 1.0)


def d_angle_plane(zs, zt, ts, tt):
    """
    Derivative of the plane angle of (s, t) along tangent vectors.

    ``zs``/``zt`` are positions with shape (N,), ``ts``/``tt`` the complex
    velocities of the two points with shape (N, D).
    """
    return np.imag((tt - ts) / (zt - zs)[:, None]) / TURN


def d_angle_halfplane(zs, zt, ts, tt):
    """Derivative of the hyperbolic angle of (s, t) along tangent vectors."""
    direct = (tt - ts) / (zt - zs)[:, None]
    mirrored = (tt - np.conj(ts)) / (zt - np.conj(zs))[:, None]
    return np.imag(direct - mirrored) / TURN
