"""
Time evolution along parameter cycles.

Continuous sweeps integrate ``i dpsi/dt = H(lam(t)) psi`` (hbar = 1) with the
midpoint-exponential scheme ``psi_{k+1} = exp(-i dt H(lam(t_k + dt/2))) psi_k``.
Each step is an exact 2x2 unitary, so the norm is conserved up to rounding.
Kicked evolution applies ``psi_{n+1} = U(lam_n) psi_n``.

Projector fidelities ``<psi|P(a_ref)|psi>`` against a continued reference
Bloch path are what the holonomy verdicts are built from; dynamical phases
are never used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import algebra, models
from .bloch import bloch_of_state, eigvec_from_bloch
from .errors import GridMismatch, NonPositiveInput, StepTooCoarse
from .lift import BlochPath, DirectorPath, Permutation, lift_path
from .models import ParametricModel

MAX_PHASE_PER_STEP = 0.1
ADIABATIC_THRESHOLD = 0.99
DIABATIC_THRESHOLD = 0.9
DEFAULT_KICKS = 10_000

# |d(E1 - E2)/d lam| of the unperturbed levels cos(lam/2) at lam = pi
CROSSING_SPLITTING_SLOPE = 0.5


@dataclass(frozen=True)
class SweepSchedule:
    """Piecewise-linear ``lam(t)`` from ``lam_start`` to ``lam_end`` over ``total_time``.

    A ``diabatic_window`` schedule runs ``rate_multiplier`` times faster
    inside ``|lam - center| < half_width`` than outside; the outer rate is
    fixed by requiring the sweep to last exactly ``total_time``.
    """

    total_time: float
    kind: str = "uniform"
    half_width: float = 0.0
    rate_multiplier: float = 1.0
    center: float = math.pi
    lam_start: float = 0.0
    lam_end: float = 2 * math.pi

    def __post_init__(self):
        if self.kind not in ("uniform", "diabatic_window"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if not self.total_time > 0:
            raise ValueError("total_time must be positive")
        if self.lam_end <= self.lam_start:
            raise ValueError("lam_end must exceed lam_start")
        if self.kind == "diabatic_window":
            if not (self.half_width > 0 and self.rate_multiplier > 0):
                raise ValueError("diabatic window needs half_width > 0 and rate_multiplier > 0")
            lo, hi = self.center - self.half_width, self.center + self.half_width
            if lo < self.lam_start or hi > self.lam_end:
                raise ValueError("diabatic window must lie inside the sweep range")

    @classmethod
    def uniform(cls, total_time, lam_start=0.0, lam_end=2 * math.pi):
        return cls(float(total_time), "uniform", lam_start=lam_start, lam_end=lam_end)

    @classmethod
    def diabatic_window(cls, total_time, half_width, rate_multiplier, center=math.pi,
                        lam_start=0.0, lam_end=2 * math.pi):
        return cls(float(total_time), "diabatic_window", float(half_width), float(rate_multiplier),
                   center, lam_start, lam_end)

    @classmethod
    def from_rates(cls, outer_rate, window_rate, half_width, center=math.pi,
                   lam_start=0.0, lam_end=2 * math.pi):
        """Window schedule specified by its two sweep rates instead of its duration."""
        w = 2 * half_width
        total = (lam_end - lam_start - w) / outer_rate + w / window_rate
        return cls.diabatic_window(total, half_width, window_rate / outer_rate, center, lam_start, lam_end)

    @property
    def outer_rate(self) -> float:
        span = self.lam_end - self.lam_start
        if self.kind == "uniform":
            return span / self.total_time
        w = 2 * self.half_width
        return (span - w + w / self.rate_multiplier) / self.total_time

    @property
    def window_rate(self) -> float:
        return self.outer_rate * (self.rate_multiplier if self.kind == "diabatic_window" else 1.0)

    def knots(self):
        if self.kind == "uniform":
            return np.array([0.0, self.total_time]), np.array([self.lam_start, self.lam_end])
        lo, hi = self.center - self.half_width, self.center + self.half_width
        v = self.outer_rate
        t1 = (lo - self.lam_start) / v
        t2 = t1 + (hi - lo) / self.window_rate
        return (np.array([0.0, t1, t2, self.total_time]),
                np.array([self.lam_start, lo, hi, self.lam_end]))

    def lam(self, t):
        tk, lk = self.knots()
        return np.interp(t, tk, lk)

    def rate_at(self, lam: float) -> float:
        if self.kind == "diabatic_window" and abs(lam - self.center) < self.half_width:
            return self.window_rate
        return self.outer_rate


@dataclass
class EvolutionRecord:
    times: np.ndarray
    params: np.ndarray
    states: np.ndarray
    projector_fidelities: np.ndarray
    reference: BlochPath | None = field(default=None, repr=False)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def norm_drift(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.states, axis=1) - 1.0)))

    def bloch(self) -> np.ndarray:
        return bloch_of_state(self.states)


@dataclass(frozen=True)
class RunVerdict:
    """Outcome of a cycle run, judged at the basepoint.

    ``fidelity_same`` is the final population of the eigenprojector the run
    started in, ``fidelity_opposite`` that of the other one.
    """

    verdict: str
    fidelity_same: float
    fidelity_opposite: float
    threshold: float

    @property
    def permutation(self) -> Permutation | None:
        return {"identity": Permutation.IDENTITY, "swap": Permutation.SWAP}.get(self.verdict)


def judge(psi, a_start, threshold: float) -> RunVerdict:
    """Compare a final state with the two eigenprojectors ``P(+-a_start)``."""
    r = bloch_of_state(psi)
    a = np.asarray(a_start, dtype=float)
    same = float(np.clip(0.5 * (1 + r @ a), 0.0, 1.0))
    opposite = float(np.clip(0.5 * (1 - r @ a), 0.0, 1.0))
    if same >= threshold:
        verdict = "identity"
    elif opposite >= threshold:
        verdict = "swap"
    else:
        verdict = "unresolved"
    return RunVerdict(verdict, same, opposite, threshold)


def _normalized_state(psi0) -> np.ndarray:
    psi = np.asarray(psi0, dtype=complex).reshape(2)
    if abs(np.linalg.norm(psi) - 1) > 1e-9:
        raise ValueError("initial state must be normalised")
    return psi


def _propagate(steps: np.ndarray, psi0: np.ndarray) -> np.ndarray:
    """Apply a stack of 2x2 step matrices in order, returning every state."""
    u00, u01 = steps[:, 0, 0].tolist(), steps[:, 0, 1].tolist()
    u10, u11 = steps[:, 1, 0].tolist(), steps[:, 1, 1].tolist()
    x, y = complex(psi0[0]), complex(psi0[1])
    xs, ys = [x], [y]
    for a, b, c, d in zip(u00, u01, u10, u11):
        x, y = a * x + b * y, c * x + d * y
        xs.append(x)
        ys.append(y)
    return np.column_stack([xs, ys])


def continued_reference(model: ParametricModel, params, a_start) -> BlochPath:
    """Lift of the model's eigen-director path on ``params`` starting on the sheet of ``a_start``."""
    path = models.director_path_at(model, params, closed=False)
    rep = path.vectors[0]
    a0 = rep if rep @ np.asarray(a_start) >= 0 else -rep
    return lift_path(path, a0)


def unperturbed_reference(params, a_start) -> BlochPath:
    """The smooth crossing-model branch ``+-(cos(lam/2), sin(lam/2))`` on ``params``."""
    a = models.analytic_bloch_crossing(params)
    sign = 1.0 if a[0] @ np.asarray(a_start) >= 0 else -1.0
    return BlochPath(sign * a, np.asarray(params, dtype=float))


def evolve_continuous(model: ParametricModel | Callable, schedule: SweepSchedule, psi0,
                      dt: float, reference: BlochPath | None = None) -> EvolutionRecord:
    """Integrate the Schroedinger equation along ``schedule``.

    Parameters
    ----------
    model : ParametricModel or callable
        A Hamiltonian model, or any function ``lam -> 2x2 Hermitian matrix``.
    schedule : SweepSchedule
    psi0 : array_like
        Normalised initial state.
    dt : float
        Target step; the actual step is ``total_time / ceil(total_time / dt)``.
    reference : BlochPath, optional
        Projector family for ``projector_fidelities``. Defaults to the
        continued eigenprojector of ``model`` on the sheet closest to ``psi0``.

    Raises
    ------
    StepTooCoarse
        If ``||H|| dt >= 0.1`` anywhere on the sweep.
    """
    psi0 = _normalized_state(psi0)
    n = max(1, math.ceil(schedule.total_time / dt - 1e-9))
    step = schedule.total_time / n
    times = np.arange(n + 1) * step
    mid = schedule.lam(times[:-1] + 0.5 * step)
    if isinstance(model, ParametricModel):
        c, h = models.hamiltonian_coefficients(model, mid)
    else:
        coeffs = [algebra.pauli_coefficients(_checked(model(lam))) for lam in mid]
        c = np.array([cc for cc, _ in coeffs])
        h = np.array([hh for _, hh in coeffs])
    spectral_norm = np.abs(c) + np.linalg.norm(h, axis=-1)
    worst = float(np.max(spectral_norm)) * step
    if worst >= MAX_PHASE_PER_STEP:
        raise StepTooCoarse(f"||H|| dt reaches {worst:.3g}; reduce dt below "
                            f"{MAX_PHASE_PER_STEP / float(np.max(spectral_norm)):.3g}")
    states = _propagate(algebra.expm_i_coefficients(c, h, step), psi0)
    params = schedule.lam(times)
    if reference is None and isinstance(model, ParametricModel):
        reference = continued_reference(model, params, bloch_of_state(psi0))
    fids = fidelity_trace_arrays(states, params, reference) if reference is not None else np.ones(n + 1)
    return EvolutionRecord(times, params, states, fids, reference)


def _checked(H):
    H = np.asarray(H, dtype=complex)
    if not algebra.is_hermitian(H):
        raise algebra.NonHermitianInput("callable returned a non-Hermitian matrix")
    return H


def evolve_kicked(model: ParametricModel, lam_sequence, psi0,
                  reference: BlochPath | None = None) -> EvolutionRecord:
    """Apply ``psi_{n+1} = U(lam_n) psi_n`` for the kicked map.

    Sample ``k`` of the record is the state after ``k`` kicks and is compared
    with the reference at the parameter of the last kick applied (``lam_0``
    for the initial state).
    """
    if model.kind != "floquet_map":
        raise ValueError("evolve_kicked needs the floquet_map model")
    psi0 = _normalized_state(psi0)
    lam_sequence = np.asarray(lam_sequence, dtype=float)
    states = _propagate(models.kick_unitaries(model, lam_sequence), psi0)
    params = np.concatenate([lam_sequence[:1], lam_sequence])
    times = np.arange(len(states), dtype=float)
    if reference is None:
        reference = continued_reference(model, lam_sequence, bloch_of_state(psi0))
    fids = fidelity_trace_arrays(states, params, reference)
    return EvolutionRecord(times, params, states, fids, reference)


def fidelity_trace_arrays(states, params, reference: BlochPath) -> np.ndarray:
    ref_p = np.asarray(reference.params, dtype=float)
    if len(ref_p) == 0 or np.any(np.diff(ref_p) < 0):
        raise GridMismatch("reference parameters must be non-decreasing")
    slack = 0.5 * (float(np.max(np.diff(ref_p))) if len(ref_p) > 1 else 0.0) + 1e-12
    if np.min(params) < ref_p[0] - slack or np.max(params) > ref_p[-1] + slack:
        raise GridMismatch("record parameters fall outside the reference path")
    idx = np.clip(np.searchsorted(ref_p, params), 1, max(len(ref_p) - 1, 1))
    if len(ref_p) > 1:
        left_closer = np.abs(params - ref_p[idx - 1]) <= np.abs(ref_p[idx] - params)
        idx = np.where(left_closer, idx - 1, idx)
    else:
        idx = np.zeros(len(params), dtype=int)
    r = bloch_of_state(states)
    a = reference.samples[idx]
    return np.clip(0.5 * (1 + np.einsum("ij,ij->i", r, a)), 0.0, 1.0)


def fidelity_trace(record: EvolutionRecord, reference: BlochPath) -> np.ndarray:
    """Pointwise ``Tr(rho(t) P_ref(t))`` with the reference taken at the nearest ``lam``."""
    return fidelity_trace_arrays(record.states, record.params, reference)


def landau_zener_probability(epsilon: float, sweep_rate: float) -> float:
    """Diabatic-passage estimate ``exp(-pi eps^2 / (2 vbar))`` at the avoided crossing.

    ``vbar`` is the rate of change of the unperturbed splitting
    ``cos(lam/2)`` at ``lam = pi``, i.e. ``sweep_rate / 2``; the coupling
    between the crossing branches is ``eps/2``. This is an estimate used to
    choose sweep regimes, since the levels are only linear near the crossing.
    """
    if not (epsilon > 0 and sweep_rate > 0):
        raise NonPositiveInput("epsilon and sweep_rate must be positive")
    vbar = CROSSING_SPLITTING_SLOPE * sweep_rate
    return math.exp(-math.pi * epsilon**2 / (2 * vbar))


def co_rotating_lz_probability(epsilon: float, sweep_rate: float) -> float:
    """Diabatic estimate corrected for the rotation of the unperturbed eigenvector.

    In the frame that follows ``a(lam)``, which turns about ``e_x`` at angular
    rate ``sweep_rate / 2``, the coupling ``eps/2`` is reduced by
    ``sweep_rate / 4``. Feeding that coupling into the linear two-level
    formula gives ``exp(-pi (eps - v/2)^2 / v)``. It tracks
    :func:`diabatic_population` far better than
    :func:`landau_zener_probability` once ``v`` is comparable to ``eps``.
    """
    if not (epsilon > 0 and sweep_rate > 0):
        raise NonPositiveInput("epsilon and sweep_rate must be positive")
    return math.exp(-math.pi * (epsilon - 0.5 * sweep_rate) ** 2 / sweep_rate)


def rate_for_probability(epsilon: float, probability: float) -> float:
    """Sweep rate at which :func:`landau_zener_probability` equals ``probability``."""
    if not 0 < probability < 1:
        raise ValueError("probability must lie in (0, 1)")
    return -math.pi * epsilon**2 / (2 * CROSSING_SPLITTING_SLOPE * math.log(probability))


def diabatic_population(epsilon: float, sweep_rate: float, half_width: float = 1.5,
                        dt: float = 0.01) -> float:
    """Measured population transfer across the avoided crossing at a constant rate.

    Starts in the upper eigenstate of the perturbed Hamiltonian at
    ``pi - half_width`` and returns the population of the eigenstate at
    ``pi + half_width`` that continues the unperturbed branch (the lower one).
    """
    model = ParametricModel.perturbed(epsilon)
    lo, hi = math.pi - half_width, math.pi + half_width
    schedule = SweepSchedule.uniform((hi - lo) / sweep_rate, lo, hi)
    a_in = models.branch_bloch(model, lo, "upper")
    flat = BlochPath(np.array([a_in, a_in]), np.array([lo, hi]))
    record = evolve_continuous(model, schedule, eigvec_from_bloch(a_in), dt, reference=flat)
    a_out = models.branch_bloch(model, hi, "lower")
    r = bloch_of_state(record.final_state)
    return float(0.5 * (1 + r @ a_out))


def kicked_sequence(n_kicks: int = DEFAULT_KICKS, lam_start: float = 0.0,
                    lam_end: float = 2 * math.pi) -> np.ndarray:
    """``lam_n = lam_start + (lam_end - lam_start) n / N`` for ``n = 0 .. N-1``."""
    return lam_start + (lam_end - lam_start) * np.arange(n_kicks) / n_kicks


def director_trajectory(record: EvolutionRecord) -> DirectorPath:
    return DirectorPath.from_vectors(record.bloch(), record.params, closed=False)

