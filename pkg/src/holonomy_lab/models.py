"""
The three parametric two-level systems.

``floquet_map``
    Kicked map ``U(lam) = exp(-i H0) exp(-i lam |v><v|)`` with default
    ``H0 = (pi/2) sigma_y`` and ``|v><v| = (1 + sigma_x)/2``.
``crossing``
    ``H(lam) = [(1 + cos lam) sigma_y + sin(lam) sigma_z] / 4``, an exact
    level crossing at ``lam = pi``.
``perturbed``
    ``H(lam) + (eps/2) sigma_x``, which turns the crossing into an avoided
    crossing of minimum gap ``eps``.

All three are ``2 pi`` periodic in ``lam``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import algebra
from .algebra import DEGENERATE, GAP_TOL, IDENTITY, SIGMA
from .bloch import Director, covering_projection
from .errors import DegeneracyOnPath
from .lift import DirectorPath

KINDS = ("floquet_map", "crossing", "perturbed")
HAMILTONIAN_KINDS = ("crossing", "perturbed")
PERIOD = 2 * np.pi

DEFAULT_EPSILON = 0.1
DEFAULT_H0 = (0.0, 0.0, np.pi / 2, 0.0)
DEFAULT_KICK_BLOCH = (1.0, 0.0, 0.0)
DEFAULT_SAMPLES = 401


@dataclass(frozen=True)
class ParametricModel:
    """One of the bundled systems together with its constants.

    ``h0`` holds the Pauli coefficients ``(c, hx, hy, hz)`` of the kicked
    map's free Hamiltonian and ``kick_bloch`` the Bloch vector of the kick
    projector ``|v><v|``; both are ignored by the Hamiltonian models.
    """

    kind: str = "crossing"
    epsilon: float = DEFAULT_EPSILON
    h0: tuple = DEFAULT_H0
    kick_bloch: tuple = DEFAULT_KICK_BLOCH
    period: float = field(default=PERIOD, init=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "perturbed" and not self.epsilon > 0:
            raise ValueError("perturbed model needs epsilon > 0")
        if len(self.h0) != 4 or len(self.kick_bloch) != 3:
            raise ValueError("h0 needs 4 coefficients and kick_bloch 3 components")
        if abs(np.linalg.norm(self.kick_bloch) - 1) > 1e-9:
            raise ValueError("kick_bloch must be a unit vector (rank-1 kick projector)")

    @property
    def is_hamiltonian(self) -> bool:
        return self.kind in HAMILTONIAN_KINDS

    @classmethod
    def floquet_map(cls, h0=DEFAULT_H0, kick_bloch=DEFAULT_KICK_BLOCH):
        return cls("floquet_map", h0=tuple(h0), kick_bloch=tuple(kick_bloch))

    @classmethod
    def crossing(cls):
        return cls("crossing")

    @classmethod
    def perturbed(cls, epsilon=DEFAULT_EPSILON):
        return cls("perturbed", epsilon=float(epsilon))


class SpectrumSample(NamedTuple):
    lam: float
    levels: tuple
    director: object


def hamiltonian_coefficients(model: ParametricModel, lam):
    """Pauli coefficients ``(c, h)`` of a Hamiltonian model, vectorised over ``lam``."""
    if not model.is_hamiltonian:
        raise ValueError(f"{model.kind} is not a Hamiltonian model")
    lam = np.asarray(lam, dtype=float)
    zero = np.zeros_like(lam)
    hx = zero + (0.5 * model.epsilon if model.kind == "perturbed" else 0.0)
    h = np.stack([hx, 0.25 * (1 + np.cos(lam)), 0.25 * np.sin(lam)], axis=-1)
    return zero, h


def kick_unitaries(model: ParametricModel, lam) -> np.ndarray:
    """``exp(-i H0) exp(-i lam |v><v|)``, vectorised over ``lam``."""
    lam = np.asarray(lam, dtype=float)
    c0, *h0 = model.h0
    free = algebra.expm_i_coefficients(c0, np.array(h0), 1.0)
    P = 0.5 * (IDENTITY + np.tensordot(np.array(model.kick_bloch), SIGMA, axes=1))
    kick = (IDENTITY - P) + np.exp(-1j * lam)[..., None, None] * P
    return free @ kick


def operator_at(model: ParametricModel, lam: float) -> np.ndarray:
    """The Floquet operator or Hamiltonian at parameter ``lam``."""
    if model.kind == "floquet_map":
        return kick_unitaries(model, float(lam))
    c, h = hamiltonian_coefficients(model, float(lam))
    return algebra.hermitian_from_coefficients(float(c), h)


def analytic_bloch_crossing(lam):
    """``cos(lam/2) e_y + sin(lam/2) e_z``; smooth through the crossing."""
    lam = np.asarray(lam, dtype=float)
    return np.stack([np.zeros_like(lam), np.cos(lam / 2), np.sin(lam / 2)], axis=-1)


def energies_crossing(lam):
    """Continued levels ``(cos(lam/2)/2, -cos(lam/2)/2)`` of the crossing model."""
    e = 0.5 * np.cos(np.asarray(lam, dtype=float) / 2)
    return e, -e


def analytic_bloch_floquet(lam):
    """``cos(lam/2) e_y - sin(lam/2) e_z`` for the default kicked map."""
    lam = np.asarray(lam, dtype=float)
    return np.stack([np.zeros_like(lam), np.cos(lam / 2), -np.sin(lam / 2)], axis=-1)


def _spectral_data(model: ParametricModel, lam: np.ndarray):
    """Levels, Bloch vector of level 1 and degeneracy mask on a grid."""
    if model.kind == "floquet_map":
        th1, th2, a, degenerate = algebra.unitary_spectrum(kick_unitaries(model, lam))
        return th1, th2, a, degenerate
    c, h = hamiltonian_coefficients(model, lam)
    norm = np.linalg.norm(h, axis=-1)
    degenerate = 2 * norm < GAP_TOL
    a = h / np.where(degenerate, 1.0, norm)[..., None]
    return c + norm, c - norm, a, degenerate


def _bloch_on_grid(model: ParametricModel, lam: np.ndarray) -> np.ndarray:
    """Eigen-director representatives along ``lam``, degeneracies resolved or reported."""
    _, _, a, degenerate = _spectral_data(model, lam)
    if np.any(degenerate):
        if model.kind == "crossing":
            # the crossing is resolved by the smooth analytic eigenvector
            a = np.where(degenerate[:, None], analytic_bloch_crossing(lam), a)
        else:
            bad = float(lam[np.flatnonzero(degenerate)[0]])
            raise DegeneracyOnPath(f"{model.kind}: eigenvalues collide at lambda={bad:.12g}", lam=bad)
    return a


def spectrum(model: ParametricModel, lam) -> list[SpectrumSample]:
    """Levels and eigen-directors sampled at each ``lam``.

    The crossing model reports the continued branches from
    :func:`energies_crossing`; the other models report sorted eigenvalues
    (energies, or eigenphases in ``(-pi, pi]`` for the kicked map).
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    v1, v2, a, degenerate = _spectral_data(model, lam)
    if model.kind == "crossing":
        v1, v2 = energies_crossing(lam)
    out = []
    for k in range(len(lam)):
        d = DEGENERATE if degenerate[k] else covering_projection(a[k])
        out.append(SpectrumSample(float(lam[k]), (float(v1[k]), float(v2[k])), d))
    return out


def is_closed_range(model: ParametricModel, lam_start: float, lam_end: float) -> bool:
    cycles = (lam_end - lam_start) / model.period
    return bool(cycles > 0 and abs(cycles - round(cycles)) < 1e-9)


def director_path_at(model: ParametricModel, lam, closed=None) -> DirectorPath:
    lam = np.asarray(lam, dtype=float)
    if closed is None:
        closed = is_closed_range(model, lam[0], lam[-1])
    return DirectorPath.from_vectors(_bloch_on_grid(model, lam), lam, closed=closed)


def director_path(model: ParametricModel, lam_start: float, lam_end: float,
                  n_samples: int = DEFAULT_SAMPLES) -> DirectorPath:
    """Uniformly sampled eigen-director path over ``[lam_start, lam_end]``."""
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    return director_path_at(model, np.linspace(lam_start, lam_end, n_samples))


def branch_bloch(model: ParametricModel, lam: float, branch: str = "upper") -> np.ndarray:
    """Bloch vector of the ``upper`` (level 1) or ``lower`` eigenprojector at ``lam``.

    Level 1 is the larger energy, or the larger quasi-energy for the kicked
    map. At the exact crossing the analytic eigenvector stands in for level 1.
    """
    if branch not in ("upper", "lower"):
        raise ValueError("branch must be 'upper' or 'lower'")
    a = _bloch_on_grid(model, np.array([float(lam)]))[0]
    return a if branch == "upper" else -a


def director(model: ParametricModel, lam: float) -> Director:
    return covering_projection(branch_bloch(model, lam))
