"""Independent numerical oracles used only by the test suite.

These deliberately avoid the library's own code paths: the eigenvalue
oracle is the trigonometric closed form for the roots of the
characteristic cubic of a 3x3 Hermitian matrix, with a hand-coded
determinant.
"""

import numpy as np


def _det3(m):
    return (
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def eigvals3_hermitian_closed_form(h):
    """Ascending eigenvalues of a 3x3 Hermitian matrix via the cubic formula."""
    h = np.asarray(h, dtype=complex)
    q = np.trace(h).real / 3.0
    p1 = abs(h[0, 1]) ** 2 + abs(h[0, 2]) ** 2 + abs(h[1, 2]) ** 2
    p2 = (
        (h[0, 0].real - q) ** 2
        + (h[1, 1].real - q) ** 2
        + (h[2, 2].real - q) ** 2
        + 2.0 * p1
    )
    if p2 <= 0.0:
        return np.array([q, q, q])
    p = np.sqrt(p2 / 6.0)
    b = (h - q * np.eye(3)) / p
    r = _det3(b).real / 2.0
    r = min(1.0, max(-1.0, r))
    phi = np.arccos(r) / 3.0
    e_hi = q + 2.0 * p * np.cos(phi)
    e_lo = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    e_mid = 3.0 * q - e_hi - e_lo
    return np.array(sorted([e_lo, e_mid, e_hi]))


def random_hermitian3(rng, scale=1.0):
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    return scale * (m + m.conj().T) / 2.0
