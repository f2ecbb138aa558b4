"""
Closed-form linear algebra for 2x2 complex matrices.

Every matrix is a plain ``numpy`` array of shape ``(2, 2)`` and dtype
``complex128``. Hermitian and unitary matrices are handled through the
decomposition ``M = c I + h . sigma`` so that exponentials and spectra come
out of a handful of scalar formulas instead of an iterative eigensolver.

Functions
---------
pauli
hermitian_from_coefficients
pauli_coefficients
expm_i_coefficients
expm_i_hermitian
eig_hermitian_2x2
unitary_spectrum
eig_unitary_2x2
"""
from __future__ import annotations

import numpy as np

from .errors import NonHermitianInput, NonUnitaryInput

GAP_TOL = 1e-9
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])

_AXES = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


class DegenerateFlag:
    """Marker returned in place of a Bloch vector at a degenerate point."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DEGENERATE"

    def __bool__(self):
        return False


DEGENERATE = DegenerateFlag()


def pauli(axis: str) -> np.ndarray:
    """Return the Pauli matrix for ``axis`` in ``{'x', 'y', 'z'}``."""
    try:
        return _AXES[axis].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}") from None


def hermitian_from_coefficients(c: float, h) -> np.ndarray:
    """Build ``c I + h . sigma``."""
    hx, hy, hz = h
    return np.array([[c + hz, hx - 1j * hy], [hx + 1j * hy, c - hz]], dtype=complex)


def pauli_coefficients(M: np.ndarray):
    """Return ``(c, h)`` with ``M = c I + h . sigma`` for Hermitian ``M``."""
    M = np.asarray(M, dtype=complex)
    c = 0.5 * (M[0, 0] + M[1, 1]).real
    h = np.array([M[0, 1].real, M[1, 0].imag, 0.5 * (M[0, 0] - M[1, 1]).real])
    return c, h


def is_hermitian(M: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    M = np.asarray(M)
    scale = max(1.0, float(np.max(np.abs(M))))
    return bool(np.max(np.abs(M - M.conj().T)) <= tol * scale)


def is_unitary(U: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    U = np.asarray(U)
    return bool(np.max(np.abs(U.conj().T @ U - IDENTITY)) <= tol)


def _require_hermitian(H):
    H = np.asarray(H, dtype=complex)
    if H.shape != (2, 2) or not is_hermitian(H):
        raise NonHermitianInput("matrix is not a Hermitian 2x2 matrix")
    return H


def expm_i_coefficients(c, h, s) -> np.ndarray:
    """``exp(-i s (c I + h.sigma))`` for stacks of coefficients.

    ``c`` has shape ``(...)`` and ``h`` shape ``(..., 3)``; the result has
    shape ``(..., 2, 2)``.
    """
    c = np.asarray(c, dtype=float)
    h = np.asarray(h, dtype=float)
    norm = np.sqrt(np.einsum("...k,...k->...", h, h))
    # sin(s|h|)/|h| as a sinc, so h = 0 needs no special case
    sin_over = s * np.sinc(s * norm / np.pi)
    phase = np.exp(-1j * s * c)
    return phase[..., None, None] * (
        np.cos(s * norm)[..., None, None] * IDENTITY
        - 1j * np.einsum("...k,kij->...ij", sin_over[..., None] * h, SIGMA)
    )


def expm_i_hermitian(H: np.ndarray, s: float) -> np.ndarray:
    """Return ``exp(-i s H)`` for Hermitian ``H``.

    Closed form ``exp(-isc)(cos(s|h|) I - i sin(s|h|) h^.sigma)`` with
    ``H = c I + h.sigma``.
    """
    H = _require_hermitian(H)
    c, h = pauli_coefficients(H)
    return expm_i_coefficients(c, h, s)


def eig_hermitian_2x2(H: np.ndarray, gap_tol: float = GAP_TOL):
    """Spectral decomposition ``H = E1 P1(a) + E2 P2(a)`` of a Hermitian matrix.

    Returns
    -------
    E1, E2 : float
        Eigenvalues with ``E1 >= E2``.
    a : ndarray or DEGENERATE
        Bloch vector of the ``E1`` eigenprojector, or ``DEGENERATE`` when
        ``E1 - E2 < gap_tol``.
    """
    H = _require_hermitian(H)
    c, h = pauli_coefficients(H)
    norm = float(np.sqrt(h @ h))
    E1, E2 = c + norm, c - norm
    if 2.0 * norm < gap_tol:
        return E1, E2, DEGENERATE
    return E1, E2, h / norm


def wrap_phase(x):
    """Map angles onto ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)


def unitary_spectrum(U: np.ndarray, gap_tol: float = GAP_TOL):
    """Vectorised core of :func:`eig_unitary_2x2` for a stack ``(..., 2, 2)``.

    Returns ``(th1, th2, a, degenerate)`` where ``a`` has shape ``(..., 3)``
    and is meaningless wherever ``degenerate`` is true.
    """
    U = np.asarray(U, dtype=complex)
    phi = 0.5 * np.angle(np.linalg.det(U))
    V = np.exp(-1j * phi)[..., None, None] * U
    # V = q0 I - i q.sigma with (q0, q) a real unit 4-vector
    q0 = 0.5 * np.trace(V, axis1=-2, axis2=-1).real
    q = (0.5j * np.einsum("...ij,kji->...k", V, SIGMA)).real
    qn = np.sqrt(np.einsum("...k,...k->...", q, q))
    beta = np.arctan2(qn, q0)
    th_plus = wrap_phase(phi - beta)
    th_minus = wrap_phase(phi + beta)
    degenerate = 2.0 * qn < gap_tol
    n = q / np.where(degenerate, 1.0, qn)[..., None]
    keep = th_plus <= th_minus
    th1 = np.where(keep, th_plus, th_minus)
    th2 = np.where(keep, th_minus, th_plus)
    a = np.where(keep[..., None], n, -n)
    return th1, th2, a, degenerate


def eig_unitary_2x2(U: np.ndarray, gap_tol: float = GAP_TOL):
    """Spectral decomposition ``U = e^{i th1} P1(a) + e^{i th2} P2(a)``.

    Phases lie in ``(-pi, pi]`` with ``th1 <= th2``, i.e. the first label has
    the larger quasi-energy ``-th`` so that ``U = exp(-iH)`` inherits the
    labelling of ``H``. ``a`` is ``DEGENERATE`` when the chordal distance
    between the two eigenvalues on the unit circle is below ``gap_tol``.
    """
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2) or not is_unitary(U):
        raise NonUnitaryInput("matrix is not a unitary 2x2 matrix")
    th1, th2, a, degenerate = unitary_spectrum(U, gap_tol)
    if degenerate:
        return float(th1), float(th2), DEGENERATE
    return float(th1), float(th2), a
