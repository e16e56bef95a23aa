#!/usr/bin/env python3
"""Throughput comparison of the compiled and pure-NumPy kernel backends.

Imports both implementations directly (ignoring the runtime selection in
impedfit.kernels), checks they agree bit for bit on the benchmark inputs,
then times each kernel over a range of grid sizes.

Usage:
    python3 benchmarks/bench_backends.py [--sizes 101,1001,10001] [--repeats 200]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from impedfit import _purepy, presets

try:
    from impedfit import _native
except ImportError:
    _native = None


def make_inputs(n: int):
    params = presets.reference_parameters("A")
    rng = np.random.default_rng(42)
    t = np.linspace(0.0, 1.0, n)
    theta = 0.2 * np.sin(2.0 * np.pi * t) + 0.01 * rng.normal(size=n)
    theta_dot = np.gradient(theta, t)
    return {
        "profile_values": (params.stiffness.coeffs,
                           params.stiffness.swing_value, 0.63, t),
        "section_indices": (params.schedule.boundaries, t),
        "schedule_values": (params.schedule.boundaries,
                            params.schedule.angles, t),
        "torque_values": (params.stiffness.coeffs,
                          params.stiffness.swing_value,
                          params.damping.coeffs,
                          params.damping.swing_value, 0.63,
                          params.schedule.boundaries,
                          params.schedule.angles, theta, theta_dot, t),
    }


def bench(impl, kernel: str, args, repeats: int) -> float:
    fn = getattr(impl, kernel)
    fn(*args)  # warm up
    return min(timeit.repeat(lambda: fn(*args), number=repeats, repeat=3))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="101,1001,10001",
                        help="comma-separated grid sizes")
    parser.add_argument("--repeats", type=int, default=200,
                        help="calls per timing sample")
    opts = parser.parse_args(argv)
    sizes = [int(s) for s in opts.sizes.split(",")]

    if _native is None:
        print("compiled backend not available; nothing to compare")
        return 1

    print(f"{'kernel':<16} {'n':>6} {'native [us]':>12} "
          f"{'purepy [us]':>12} {'speedup':>8}")
    for n in sizes:
        inputs = make_inputs(n)
        for kernel, args in inputs.items():
            got = np.asarray(getattr(_native, kernel)(*args))
            want = np.asarray(getattr(_purepy, kernel)(*args))
            if not np.array_equal(got, want):
                raise SystemExit(f"{kernel} (n={n}): backends disagree")
            t_nat = bench(_native, kernel, args, opts.repeats)
            t_pure = bench(_purepy, kernel, args, opts.repeats)
            us = 1e6 / opts.repeats
            print(f"{kernel:<16} {n:>6} {t_nat * us:>12.2f} "
                  f"{t_pure * us:>12.2f} {t_pure / t_nat:>7.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
