"""Compare the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_backends.py [--points N] [--repeat R]

Times the grating transfer-matrix sweep (default Tamm grating) and the
dispersion / Tamm residual scans, and checks that both paths agree.
"""

import argparse
import math
import timeit

import numpy as np

from diracfbg import _accel
from diracfbg.builders import TammGratingSpec, build_tamm_grating


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=4001)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    g = build_tamm_grating(TammGratingSpec())
    kind, kap, slope, length, dphi = g._arrays
    kind8 = np.ascontiguousarray(kind, dtype=np.int8)
    E = np.linspace(-6, 6, args.points)
    E_scan = np.linspace(-6, 6, 200_001)
    E_tamm = np.linspace(1.0 + 1e-9, 1.8 - 1e-9, 100_001)
    m0, V0, a, V1 = 1.0, math.pi / 2, 2.0, 0.8

    cases = [
        (
            f"transfer matrices ({len(kind)} elements x {args.points} energies)",
            lambda: _accel.numba_transfer_matrices(kind8, kap, slope, length, dphi, E),
            lambda: _accel.numpy_transfer_matrices(kind, kap, slope, length, dphi, E),
        ),
        (
            f"dispersion rhs ({len(E_scan)} energies)",
            lambda: _accel.numba_dispersion_rhs_real(E_scan, m0, V0, a),
            lambda: _accel.numpy_dispersion_rhs_real(E_scan, m0, V0, a),
        ),
        (
            f"Tamm residual ({len(E_tamm)} energies)",
            lambda: _accel.numba_tamm_residual_real(E_tamm, m0, V0, a, V1),
            lambda: _accel.numpy_tamm_residual_real(E_tamm, m0, V0, a, V1),
        ),
    ]

    print(f"{'kernel':<52} {'numba [s]':>10} {'numpy [s]':>10} {'speedup':>8} {'max |diff|':>11}")
    for name, nb, npf in cases:
        a_nb, a_np = nb(), npf()  # compile + correctness
        with np.errstate(invalid="ignore"):
            finite = np.isfinite(a_nb) & np.isfinite(a_np)
            scale = np.maximum(1.0, np.abs(a_np[finite]))
            diff = float(np.max(np.abs(a_nb[finite] - a_np[finite]) / scale))
        t_nb, t_np = _best(nb, args.repeat), _best(npf, args.repeat)
        print(f"{name:<52} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>7.1f}x {diff:>11.1e}")


if __name__ == "__main__":
    main()
