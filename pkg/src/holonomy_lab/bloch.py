"""
Bloch vectors, directors and the double cover between them.

A two-level eigenprojector pair is fixed by a unit vector ``a`` on the
sphere via ``P1 = (1 + a.sigma)/2`` and ``P2 = (1 - a.sigma)/2``. Forgetting
the order of the pair identifies ``a`` with ``-a``; the resulting headless
vector is a :class:`Director`, a point of the real projective plane.
:func:`covering_projection` is the two-to-one map between the two spaces.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .algebra import IDENTITY, SIGMA, hermitian_from_coefficients
from .errors import NotAProjector, ZeroVector

CLOSURE_TOL = 1e-6
ZERO_COMPONENT_TOL = 1e-12
PROJECTOR_TOL = 1e-9


def normalize(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    norm = float(np.linalg.norm(a))
    if norm < 1e-6:
        raise ZeroVector(f"vector {a!r} has (near) zero length")
    return a / norm


def canonical_sign(vectors: np.ndarray) -> np.ndarray:
    """Sign that makes the first non-negligible component positive.

    Works row-wise on an ``(N, 3)`` array; rows that are entirely below the
    zero threshold get ``+1``.
    """
    v = np.atleast_2d(vectors)
    significant = np.abs(v) >= ZERO_COMPONENT_TOL
    first = np.argmax(significant, axis=1)
    lead = v[np.arange(len(v)), first]
    return np.where(lead < 0, -1.0, 1.0)


def canonicalize(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        return a * canonical_sign(a)[0]
    return a * canonical_sign(a)[:, None]


@dataclass(frozen=True)
class Director:
    """Headless unit vector, stored through its canonical representative."""

    vector: tuple

    @classmethod
    def from_vector(cls, a) -> "Director":
        rep = canonicalize(normalize(a))
        return cls(tuple(float(x) for x in rep))

    @property
    def rep(self) -> np.ndarray:
        return np.array(self.vector)

    def distance(self, other: "Director") -> float:
        """``min(|n - n'|, |n + n'|)``, a metric on the projective plane."""
        n, m = self.rep, other.rep
        return float(min(np.linalg.norm(n - m), np.linalg.norm(n + m)))

    def isclose(self, other: "Director", tol: float = CLOSURE_TOL) -> bool:
        return self.distance(other) <= tol

    def lifts(self):
        """The two-point fiber ``(n, -n)`` above this director."""
        return self.rep, -self.rep


class OrderedProjectorPair(NamedTuple):
    P1: np.ndarray
    P2: np.ndarray


def projector(a) -> np.ndarray:
    """``(1 + a.sigma)/2`` without normalisation or checks."""
    return 0.5 * (IDENTITY + np.tensordot(np.asarray(a, dtype=float), SIGMA, axes=1))


def projectors_from_bloch(a) -> OrderedProjectorPair:
    """Return ``((1 + a.sigma)/2, (1 - a.sigma)/2)`` for a unit vector ``a``."""
    a = normalize(a)
    P1 = projector(a)
    return OrderedProjectorPair(P1, IDENTITY - P1)


def bloch_from_projector(P) -> np.ndarray:
    """Invert :func:`projectors_from_bloch`: ``a_k = Tr(P sigma_k)``."""
    P = np.asarray(P, dtype=complex)
    if P.shape != (2, 2):
        raise NotAProjector("expected a 2x2 matrix")
    if (
        np.max(np.abs(P @ P - P)) > PROJECTOR_TOL
        or abs(np.trace(P) - 1) > PROJECTOR_TOL
        or np.max(np.abs(P - P.conj().T)) > PROJECTOR_TOL
    ):
        raise NotAProjector("matrix is not a rank-1 orthogonal projector")
    return np.einsum("ij,kji->k", P, SIGMA).real


def covering_projection(a) -> Director:
    """Project a Bloch vector to its director; ``a`` and ``-a`` collide."""
    return Director.from_vector(a)


def hamiltonian_from_spectrum(E1: float, E2: float, a) -> np.ndarray:
    """``E1 P1(a) + E2 P2(a)`` as a Hermitian matrix."""
    a = normalize(a)
    return hermitian_from_coefficients(0.5 * (E1 + E2), 0.5 * (E1 - E2) * a)


def bloch_of_state(psi) -> np.ndarray:
    """Bloch vector ``<psi|sigma|psi>`` of a normalised state (or batch)."""
    psi = np.asarray(psi, dtype=complex)
    return np.einsum("...i,kij,...j->...k", psi.conj(), SIGMA, psi).real


def eigvec_from_bloch(a) -> np.ndarray:
    """A unit state vector whose projector is ``(1 + a.sigma)/2``."""
    a = normalize(a)
    ax, ay, az = a
    if az > -0.5:
        psi = np.array([1 + az, ax + 1j * ay])
    else:
        psi = np.array([ax - 1j * ay, 1 - az])
    return psi / np.linalg.norm(psi)

