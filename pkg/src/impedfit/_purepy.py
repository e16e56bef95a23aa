"""NumPy implementations of the evaluation kernels.

Fallback backend used when the compiled extension is unavailable.  Both
backends evaluate the stance polynomial with Horner's scheme in the same
operation order, so their outputs agree bit for bit.
"""

from __future__ import annotations

import numpy as np


def profile_values(coeffs, swing_value, stance_end, t):
    """Piecewise profile: Horner polynomial for t < stance_end, constant after."""
    out = np.full(t.shape, swing_value, dtype=np.float64)
    stance = t < stance_end
    ts = t[stance]
    acc = np.full(ts.shape, coeffs[-1], dtype=np.float64)
    for c in coeffs[-2::-1]:
        acc = acc * ts + c
    out[stance] = acc
    return out


def section_indices(boundaries, t):
    """Index of the half-open section [b_i, b_{i+1}) containing each t.

    The final section is closed at t = 1.
    """
    idx = np.searchsorted(boundaries, t, side="right") - 1
    return np.clip(idx, 0, len(boundaries) - 2)


def schedule_values(boundaries, angles, t):
    return angles[section_indices(boundaries, t)]


def torque_values(k_coeffs, k_swing, d_coeffs, d_swing, stance_end,
                  boundaries, angles, theta, theta_dot, t):
    """Spring-damper torque K(t)*(theta - theta_eq(t)) + D(t)*theta_dot."""
    stiff = profile_values(k_coeffs, k_swing, stance_end, t)
    damp = profile_values(d_coeffs, d_swing, stance_end, t)
    eq = schedule_values(boundaries, angles, t)
    return stiff * (theta - eq) + damp * theta_dot
