"""
Path lifting through the double cover of the projective plane by the sphere.

A closed path of directors either lifts to a closed path of Bloch vectors
(contractible loop, eigenprojectors return to themselves) or to an open one
ending at the antipode (non-contractible loop, the two eigenprojectors are
exchanged). :func:`holonomy` decides which.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.spatial.transform import Rotation

from .bloch import CLOSURE_TOL, Director, canonicalize, covering_projection
from .errors import (
    EndpointMismatch,
    EndpointUnresolved,
    LiftAmbiguous,
    NotClosed,
    StartMismatch,
    StepTooLarge,
    ZeroVector,
)

STEP_CAP = 0.1


class Permutation(str, Enum):
    IDENTITY = "identity"
    SWAP = "swap"

    def __mul__(self, other: "Permutation") -> "Permutation":
        return Permutation.IDENTITY if self is other else Permutation.SWAP


class HomotopyClass(str, Enum):
    E = "e_class"
    GAMMA = "gamma_class"


def _directors_close(n, m, tol=CLOSURE_TOL) -> bool:
    return min(np.linalg.norm(n - m), np.linalg.norm(n + m)) <= tol


@dataclass(frozen=True)
class DirectorPath:
    """Sampled path in director space.

    ``vectors`` holds the canonical representative of each sample as an
    ``(N, 3)`` array, ``params`` the matching cycle parameter values.
    """

    vectors: np.ndarray
    params: np.ndarray
    closed: bool

    @classmethod
    def from_vectors(cls, vectors, params=None, closed=None) -> "DirectorPath":
        v = np.asarray(vectors, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3 or len(v) < 1:
            raise ValueError("expected an (N, 3) array of vectors")
        norms = np.linalg.norm(v, axis=1)
        if np.any(norms < 1e-6):
            raise ZeroVector("path contains an undefined director")
        v = canonicalize(v / norms[:, None])
        p = np.arange(len(v), dtype=float) if params is None else np.asarray(params, dtype=float)
        if p.shape != (len(v),):
            raise ValueError("params must match the number of samples")
        ends_meet = _directors_close(v[0], v[-1])
        if closed is None:
            closed = ends_meet
        elif closed and not ends_meet:
            raise NotClosed("first and last directors differ by more than closure_tol")
        return cls(v, p, bool(closed))

    @property
    def samples(self) -> list[Director]:
        return [Director(tuple(row)) for row in self.vectors]

    def __len__(self):
        return len(self.vectors)


@dataclass(frozen=True)
class BlochPath:
    samples: np.ndarray
    params: np.ndarray

    def __len__(self):
        return len(self.samples)

    def __neg__(self) -> "BlochPath":
        return BlochPath(-self.samples, self.params)


@dataclass(frozen=True)
class HolonomyResult:
    permutation: Permutation
    homotopy_class: HomotopyClass
    endpoint_defect: float
    closure_residual: float
    min_overlap: float
    n_samples: int
    lifted: BlochPath = field(repr=False, compare=False)

    def summary(self) -> str:
        return f"{self.permutation.value} / {self.homotopy_class.value}"


def lift_path(path: DirectorPath, a0) -> BlochPath:
    """Continue the Bloch vector ``a0`` along ``path``.

    At every step the sheet whose representative has positive overlap with
    the previous Bloch vector is chosen. Equivalently, the sign of each
    sample is the running product of the signs of adjacent overlaps of the
    canonical representatives.

    Raises
    ------
    StartMismatch
        If ``a0`` does not project onto the first director.
    StepTooLarge
        If some adjacent pair has ``|overlap| < STEP_CAP``; refine sampling.
    """
    a0 = np.asarray(a0, dtype=float)
    n = path.vectors
    if not covering_projection(a0).isclose(Director(tuple(n[0]))):
        raise StartMismatch("initial Bloch vector does not lie above the first director")
    overlaps = np.einsum("ij,ij->i", n[:-1], n[1:])
    bad = np.flatnonzero(np.abs(overlaps) < STEP_CAP)
    if bad.size:
        k = int(bad[0])
        raise StepTooLarge(
            f"step {k} -> {k + 1} (lambda={path.params[k + 1]:.6g}) has overlap "
            f"{overlaps[k]:.3g}; refine the sampling"
        )
    s0 = 1.0 if a0 @ n[0] >= 0 else -1.0
    signs = s0 * np.concatenate([[1.0], np.cumprod(np.sign(overlaps))])
    samples = signs[:, None] * n
    samples[0] = a0 / np.linalg.norm(a0)
    return BlochPath(samples, path.params.copy())


def holonomy(path: DirectorPath, a0) -> HolonomyResult:
    """Classify a closed director path by the endpoint of its lift."""
    if not path.closed:
        raise NotClosed("holonomy needs a closed path")
    try:
        lifted = lift_path(path, a0)
    except StepTooLarge as exc:
        raise LiftAmbiguous(str(exc)) from exc
    start, end = lifted.samples[0], lifted.samples[-1]
    same = float(np.linalg.norm(end - start))
    flipped = float(np.linalg.norm(end + start))
    s = lifted.samples
    min_overlap = float(np.min(np.einsum("ij,ij->i", s[:-1], s[1:]))) if len(s) > 1 else 1.0
    if same <= CLOSURE_TOL:
        perm, cls = Permutation.IDENTITY, HomotopyClass.E
    elif flipped <= CLOSURE_TOL:
        perm, cls = Permutation.SWAP, HomotopyClass.GAMMA
    else:
        raise EndpointUnresolved(
            f"lift endpoint is near neither +a0 nor -a0 (defect {same:.3g})", defect=same
        )
    return HolonomyResult(
        permutation=perm,
        homotopy_class=cls,
        endpoint_defect=same,
        closure_residual=min(same, flipped),
        min_overlap=min_overlap,
        n_samples=len(path),
        lifted=lifted,
    )


def concatenate(p1: DirectorPath, p2: DirectorPath) -> DirectorPath:
    """Traverse ``p1`` then ``p2``; the shared junction sample appears once."""
    if not _directors_close(p1.vectors[-1], p2.vectors[0]):
        raise EndpointMismatch("end of the first path does not meet the start of the second")
    vectors = np.vstack([p1.vectors, p2.vectors[1:]])
    params = np.concatenate([p1.params, p2.params[1:] - p2.params[0] + p1.params[-1]])
    return DirectorPath.from_vectors(vectors, params)


def circle_path(center, radius: float, n_samples: int = 401, start_angle: float = 0.0) -> DirectorPath:
    """Closed loop of directors at angular distance ``radius`` from ``center``."""
    c = np.asarray(center, dtype=float)
    c = c / np.linalg.norm(c)
    helper = np.array([1.0, 0.0, 0.0]) if abs(c[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(c, helper)
    u /= np.linalg.norm(u)
    w = np.cross(c, u)
    t = start_angle + np.linspace(0.0, 2 * np.pi, n_samples)
    v = (
        np.cos(radius) * c[None, :]
        + np.sin(radius) * (np.cos(t)[:, None] * u[None, :] + np.sin(t)[:, None] * w[None, :])
    )
    return DirectorPath.from_vectors(v, t - start_angle, closed=True)


def perturb_path(path: DirectorPath, rng: np.random.Generator, amplitude: float = 0.05,
                 n_modes: int = 3) -> DirectorPath:
    """Smooth random deformation of a path, rotating each sample by at most ``amplitude``.

    The rotation vector is a random trigonometric polynomial that is periodic
    over the path, so a closed path stays closed and its basepoint moves
    together with its endpoint.
    """
    p = path.params
    span = p[-1] - p[0]
    s = (p - p[0]) / span if span > 0 else np.zeros_like(p)
    k = np.arange(1, n_modes + 1)
    phase = 2 * np.pi * np.outer(s, k)
    coef_s = rng.normal(size=(n_modes, 3)) / k[:, None]
    coef_c = rng.normal(size=(n_modes, 3)) / k[:, None]
    rotvec = np.sin(phase) @ coef_s + np.cos(phase) @ coef_c
    peak = np.max(np.linalg.norm(rotvec, axis=1))
    if peak > 0:
        rotvec *= amplitude * rng.uniform(0.5, 1.0) / peak
    moved = Rotation.from_rotvec(rotvec).apply(path.vectors)
    return DirectorPath.from_vectors(moved, p, closed=path.closed)
