"""Hot numeric kernels, JIT-compiled with numba when available.

Setting the environment variable ``NVSPIN_NO_NUMBA=1`` (checked at import
time) selects the pure-numpy fallback path; the same source runs either way.
The undecorated functions stay importable as ``*_py`` so the benchmark in
``benchmarks/benchmark_kernels.py`` can time both paths side by side.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_ENABLED = numba is not None and os.environ.get(
    "NVSPIN_NO_NUMBA", ""
).lower() not in ("1", "true", "yes")


def jit_kernel(fn):
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(fn)
    return fn


def eigh3_jacobi_py(h):
    """Eigensystem of a 3x3 Hermitian matrix by cyclic Jacobi rotations.

    Sweeps the off-diagonal pairs (0,1), (0,2), (1,2) with complex Givens
    rotations until the off-diagonal Frobenius norm drops below
    1e-12 * ||H||_F, then performs one polishing sweep so the spectral
    reconstruction holds to well below 1e-9 in the input's units.

    Returns (energies ascending, eigenvector columns).
    """
    a = h.astype(np.complex128).copy()
    v = np.zeros((3, 3), dtype=np.complex128)
    for i in range(3):
        v[i, i] = 1.0

    norm = 0.0
    for i in range(3):
        for j in range(3):
            norm += abs(a[i, j]) ** 2
    norm = np.sqrt(norm)
    if norm == 0.0:
        return np.zeros(3), v

    tol = 1e-12 * norm
    polish = 1
    for _ in range(100):
        off = np.sqrt(
            2.0 * (abs(a[0, 1]) ** 2 + abs(a[0, 2]) ** 2 + abs(a[1, 2]) ** 2)
        )
        if off < tol:
            if polish == 0:
                break
            polish -= 1
        for p in range(2):
            for q in range(p + 1, 3):
                habs = abs(a[p, q])
                if habs < 1e-300:
                    continue
                phase = a[p, q] / habs
                theta = 0.5 * np.arctan2(
                    2.0 * habs, a[q, q].real - a[p, p].real
                )
                c = np.cos(theta)
                s = np.sin(theta)
                jrot = np.zeros((3, 3), dtype=np.complex128)
                for i in range(3):
                    jrot[i, i] = 1.0
                jrot[p, p] = c
                jrot[q, q] = c
                jrot[p, q] = s * phase
                jrot[q, p] = -s * np.conj(phase)
                a = np.conj(jrot).T @ (a @ jrot)
                v = v @ jrot

    evals = np.empty(3)
    for i in range(3):
        evals[i] = a[i, i].real
    order = np.argsort(evals)
    return evals[order], v[:, order].copy()


# Cash-Karp embedded Runge-Kutta 5(4) tableau.
_CK_A = np.array(
    [
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
        [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0.0, 0.0],
        [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0.0],
        [
            1631.0 / 55296.0,
            175.0 / 512.0,
            575.0 / 13824.0,
            44275.0 / 110592.0,
            253.0 / 4096.0,
        ],
    ]
)
_CK_B5 = np.array([37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0])
_CK_B4 = np.array(
    [
        2825.0 / 27648.0,
        0.0,
        18575.0 / 48384.0,
        13525.0 / 55296.0,
        277.0 / 14336.0,
        1.0 / 4.0,
    ]
)


def rk45_linear_py(gen, p0, duration, abs_tol, max_step):
    """Propagate dp/dt = gen @ p over `duration` with adaptive Cash-Karp RK45.

    Per-component absolute error is controlled to `abs_tol` per step; steps
    never exceed `max_step`. Works for any square generator (the sequence
    engine augments the 7-level generator with a photon-counter row).
    """
    n = p0.shape[0]
    p = p0.astype(np.float64).copy()
    if duration <= 0.0:
        return p

    gmax = 0.0
    for i in range(n):
        for j in range(n):
            gi = abs(gen[i, j])
            if gi > gmax:
                gmax = gi
    h = 0.1 / (gmax + 1e-12)
    if h > max_step:
        h = max_step
    if h > duration:
        h = duration

    t = 0.0
    k = np.zeros((6, n))
    while t < duration:
        if h > duration - t:
            h = duration - t
        if h > max_step:
            h = max_step

        k[0] = gen @ p
        for stage in range(1, 6):
            y = p.copy()
            for prev in range(stage):
                aij = _CK_A[stage, prev]
                if aij != 0.0:
                    y += (h * aij) * k[prev]
            k[stage] = gen @ y

        p5 = p.copy()
        err = 0.0
        for stage in range(6):
            if _CK_B5[stage] != 0.0:
                p5 += (h * _CK_B5[stage]) * k[stage]
        for i in range(n):
            di = 0.0
            for stage in range(6):
                di += (_CK_B5[stage] - _CK_B4[stage]) * k[stage][i]
            di = abs(h * di)
            if di > err:
                err = di

        if err <= abs_tol or h <= 1e-14:
            t += h
            p = p5
            if err == 0.0:
                h *= 5.0
            else:
                fac = 0.9 * (abs_tol / err) ** 0.2
                if fac > 5.0:
                    fac = 5.0
                if fac < 0.2:
                    fac = 0.2
                h *= fac
        else:
            fac = 0.9 * (abs_tol / err) ** 0.25
            if fac < 0.1:
                fac = 0.1
            h *= fac
    return p


eigh3_jacobi = jit_kernel(eigh3_jacobi_py)
rk45_linear = jit_kernel(rk45_linear_py)
