"""Kernel backend selection.

Prefers the compiled extension (impedfit._native) and falls back to the
NumPy implementation.  Set IMPEDFIT_PURE_PYTHON=1 to force the fallback.
The public wrappers normalise inputs to contiguous float64 arrays so both
backends see identical data.
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("IMPEDFIT_PURE_PYTHON") == "1":
    from impedfit import _purepy as _impl

    HAVE_NATIVE = False
else:
    try:
        from impedfit import _native as _impl  # type: ignore[no-redef]

        HAVE_NATIVE = True
    except ImportError:
        from impedfit import _purepy as _impl  # type: ignore[no-redef]

        HAVE_NATIVE = False


def backend_name() -> str:
    return "native" if HAVE_NATIVE else "purepy"


def _f64(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float64)


def profile_values(coeffs, swing_value, stance_end, t) -> np.ndarray:
    return _impl.profile_values(_f64(coeffs), float(swing_value),
                                float(stance_end), _f64(t))


def section_indices(boundaries, t) -> np.ndarray:
    return np.asarray(_impl.section_indices(_f64(boundaries), _f64(t)))


def schedule_values(boundaries, angles, t) -> np.ndarray:
    return _impl.schedule_values(_f64(boundaries), _f64(angles), _f64(t))


def torque_values(k_coeffs, k_swing, d_coeffs, d_swing, stance_end,
                  boundaries, angles, theta, theta_dot, t) -> np.ndarray:
    return _impl.torque_values(_f64(k_coeffs), float(k_swing),
                               _f64(d_coeffs), float(d_swing),
                               float(stance_end), _f64(boundaries),
                               _f64(angles), _f64(theta), _f64(theta_dot),
                               _f64(t))
