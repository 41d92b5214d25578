"""Iterative leakage-minimization interference alignment.

The solver alternates between the forward network and its reciprocal
(all links reversed).  In each direction it forms the interference
covariance at every receiver and points the receive filter along the
eigenvectors of the smallest eigenvalues — the subspace holding the
least interference power.  By network reciprocity each half-step can
only lower the total leakage, so the iteration descends toward an
alignment solution whenever the network supports one; on improper
networks the leakage settles at a positive floor instead.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from statistics import median

import numpy as np

from .model import SystemSpec, format_system
from .numerics import ChannelSet, complex_gaussian, fix_phases, orthonormalize, random_channel_set

__all__ = [
    "SolverOptions",
    "AlignmentSolution",
    "PairCheck",
    "RankCheck",
    "AlignmentReport",
    "TrialResult",
    "ExperimentSummary",
    "interference_covariance",
    "leakage_fraction",
    "alternating_minimization",
    "verify_alignment",
    "feasibility_experiment",
    "solution_summary",
]

# Iterations with less than stall_tolerance improvement before giving up.
_STALL_WINDOW = 50

# Stream tag for precoder initialization draws; distinct from the
# channel stream so experiments can vary starts with channels held.
_INIT_STREAM = 0x494E4954


@dataclass(frozen=True)
class SolverOptions:
    """Iteration limits and tolerances for the alternating solver."""

    max_iterations: int = 5000
    leakage_tolerance: float = 1e-8
    stall_tolerance: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.leakage_tolerance <= 0 or self.stall_tolerance <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True, eq=False)
class AlignmentSolution:
    """Filters and convergence record of one solve.

    ``history[i]`` is the largest per-user leakage fraction after i
    precoder updates; ``history[0]`` measures the initial precoders and
    ``history[-1]`` equals ``max(leakage)``.
    """

    precoders: tuple[np.ndarray, ...]
    combiners: tuple[np.ndarray, ...]
    leakage: tuple[float, ...]
    iterations_run: int
    history: tuple[float, ...]


def interference_covariance(
    rx_user: int, channels: ChannelSet, precoders
) -> np.ndarray:
    """Covariance of all interference arriving at one receiver.

    Sums (power/streams) * (H V)(H V)^dagger over every transmitter
    except the receiver's own; Hermitian positive semidefinite by
    construction.
    """
    if len(precoders) != channels.num_users:
        raise ValueError(
            f"{len(precoders)} precoders for {channels.num_users} users"
        )
    n_rx = channels.matrices[rx_user][rx_user].shape[0]
    q = np.zeros((n_rx, n_rx), dtype=np.complex128)
    for j in range(channels.num_users):
        if j == rx_user:
            continue
        h = channels.matrices[rx_user][j]
        v = np.asarray(precoders[j])
        if h.shape[1] != v.shape[0]:
            raise ValueError(
                f"channel [{rx_user}][{j}] is {h.shape} but precoder {j} "
                f"has {v.shape[0]} rows"
            )
        hv = h @ v
        q += (channels.powers[j] / v.shape[1]) * (hv @ hv.conj().T)
    return q


def _leakage_from_spectrum(values: np.ndarray, dof: int) -> float:
    total = float(values.sum())
    if total <= 1e-300:
        # No interference at all: alignment is trivially perfect.
        return 0.0
    return max(float(values[:dof].sum()), 0.0) / total


def leakage_fraction(q: np.ndarray, dof: int) -> float:
    """Fraction of interference power inside the desired subspace.

    The sum of the ``dof`` smallest eigenvalues of the interference
    covariance over its trace; 0 when the trace vanishes (nothing
    interferes), and never above dof/N.  Raises ValueError when ``dof``
    exceeds the matrix size or the matrix is not positive semidefinite
    within tolerance.
    """
    q = np.asarray(q, dtype=np.complex128)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {q.shape}")
    if dof > q.shape[0]:
        raise ValueError(
            f"{dof} streams cannot fit a {q.shape[0]}-antenna receiver"
        )
    values = np.linalg.eigvalsh(q)
    if values[0] < -1e-8 * max(1.0, float(values[-1])):
        raise ValueError(
            f"matrix is not positive semidefinite (lambda_min {values[0]:.3e})"
        )
    return _leakage_from_spectrum(values, dof)


def _check_compatible(spec: SystemSpec, channels: ChannelSet) -> None:
    if channels.num_users != spec.num_users:
        raise ValueError(
            f"channel set has {channels.num_users} users, spec has "
            f"{spec.num_users}"
        )
    for k, rx in enumerate(spec.users):
        for j, tx in enumerate(spec.users):
            shape = channels.matrices[k][j].shape
            if shape != (rx.rx_antennas, tx.tx_antennas):
                raise ValueError(
                    f"channel [{k}][{j}] has shape {shape}, expected "
                    f"({rx.rx_antennas}, {tx.tx_antennas})"
                )


def alternating_minimization(
    spec: SystemSpec,
    channels: ChannelSet,
    options: SolverOptions | None = None,
    initial_precoders=None,
) -> AlignmentSolution:
    """Minimize the interference leakage by alternating filter updates.

    Parameters
    ----------
    spec : SystemSpec
        The network; channel shapes must match it.
    channels : ChannelSet
        One channel realization.
    options : SolverOptions, optional
        Stopping rules and the initialization seed.
    initial_precoders : sequence of arrays, optional
        Warm start with given orthonormal precoders instead of the
        seeded random draw.

    Returns
    -------
    AlignmentSolution
        Orthonormal precoders/combiners, per-user leakage fractions,
        and the per-iteration max-leakage history.  Iteration stops
        when the max leakage falls below ``leakage_tolerance``, when it
        improves less than ``stall_tolerance`` over 50 iterations, or
        at ``max_iterations``.
    """
    opts = options if options is not None else SolverOptions()
    _check_compatible(spec, channels)
    dofs = [u.dof for u in spec.users]
    n_users = spec.num_users

    if initial_precoders is None:
        precoders = [
            orthonormalize(
                complex_gaussian(u.tx_antennas, u.dof, _INIT_STREAM, opts.seed, k)
            )
            for k, u in enumerate(spec.users)
        ]
    else:
        precoders = [np.asarray(v, dtype=np.complex128) for v in initial_precoders]
        for k, (u, v) in enumerate(zip(spec.users, precoders)):
            if v.shape != (u.tx_antennas, u.dof):
                raise ValueError(
                    f"initial precoder {k} has shape {v.shape}, expected "
                    f"({u.tx_antennas}, {u.dof})"
                )

    reverse = channels.reciprocal()
    history: list[float] = []
    while True:
        combiners = []
        leakage = []
        for k in range(n_users):
            q = interference_covariance(k, channels, precoders)
            values, vectors = np.linalg.eigh(q)
            leakage.append(_leakage_from_spectrum(values, dofs[k]))
            combiners.append(fix_phases(vectors[:, : dofs[k]]))
        history.append(max(leakage))
        iterations = len(history) - 1
        if history[-1] < opts.leakage_tolerance:
            break
        if iterations >= opts.max_iterations:
            break
        if len(history) > _STALL_WINDOW:
            # Stalled = the history stopped moving: its total variation
            # over the window is below tolerance.  (A signed difference
            # would misfire on transient humps, where the max wiggles
            # up while users trade leakage off and total still falls.)
            window = history[-1 - _STALL_WINDOW :]
            if max(window) - min(window) < opts.stall_tolerance:
                break
        precoders = []
        for k in range(n_users):
            q_rev = interference_covariance(k, reverse, combiners)
            _, vectors = np.linalg.eigh(q_rev)
            precoders.append(fix_phases(vectors[:, : dofs[k]]))

    return AlignmentSolution(
        tuple(precoders),
        tuple(combiners),
        tuple(leakage),
        iterations,
        tuple(history),
    )


@dataclass(frozen=True)
class PairCheck:
    """Zero-forcing residual of one interfering link."""

    rx_user: int
    tx_user: int
    residual: float
    passed: bool


@dataclass(frozen=True)
class RankCheck:
    """Singular values of one user's effective direct channel."""

    user: int
    singular_values: tuple[float, ...]
    passed: bool


@dataclass(frozen=True)
class AlignmentReport:
    cross: tuple[PairCheck, ...]
    ranks: tuple[RankCheck, ...]
    passed: bool


def verify_alignment(
    spec: SystemSpec,
    channels: ChannelSet,
    solution: AlignmentSolution,
    zero_tol: float = 1e-4,
    rank_tol: float = 1e-3,
) -> AlignmentReport:
    """Check the exact alignment conditions on a candidate solution.

    Every interfering pair must satisfy
    ``||U_k^dagger H[k][j] V_j||_F <= zero_tol`` and every user's
    effective direct channel ``U_k^dagger H[k][k] V_k`` must keep all
    of its singular values at or above ``rank_tol``.
    """
    _check_compatible(spec, channels)
    cross = []
    for k in range(spec.num_users):
        u_h = solution.combiners[k].conj().T
        for j in range(spec.num_users):
            if j == k:
                continue
            residual = float(
                np.linalg.norm(u_h @ channels.matrices[k][j] @ solution.precoders[j])
            )
            cross.append(PairCheck(k, j, residual, residual <= zero_tol))
    ranks = []
    for k in range(spec.num_users):
        direct = (
            solution.combiners[k].conj().T
            @ channels.matrices[k][k]
            @ solution.precoders[k]
        )
        singular = np.linalg.svd(direct, compute_uv=False)
        ranks.append(
            RankCheck(k, tuple(float(s) for s in singular), float(singular[-1]) >= rank_tol)
        )
    passed = all(c.passed for c in cross) and all(r.passed for r in ranks)
    return AlignmentReport(tuple(cross), tuple(ranks), passed)


@dataclass(frozen=True)
class TrialResult:
    seed: int
    final_leakage: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class ExperimentSummary:
    """Aggregate of independent solves over different seeds."""

    trials: tuple[TrialResult, ...]
    min_leakage: float
    median_leakage: float
    max_leakage: float
    fraction_converged: float
    converged_threshold: float


def feasibility_experiment(
    spec: SystemSpec,
    n_seeds: int,
    options: SolverOptions | None = None,
    channel_seed: int | None = None,
    converged_threshold: float = 1e-6,
) -> ExperimentSummary:
    """Solve over ``n_seeds`` independent channel/start realizations.

    Trial i uses seed ``options.seed + i`` for both the channel draw
    and the precoder start (the two are separate streams); pass
    ``channel_seed`` to hold one channel realization fixed while starts
    vary.  A trial counts as converged when its final max leakage is
    below ``converged_threshold``.
    """
    if n_seeds < 1:
        raise ValueError("n_seeds must be at least 1")
    opts = options if options is not None else SolverOptions()
    trials = []
    for i in range(n_seeds):
        trial_seed = opts.seed + i
        channels = random_channel_set(
            spec, channel_seed if channel_seed is not None else trial_seed
        )
        solution = alternating_minimization(
            spec, channels, replace(opts, seed=trial_seed)
        )
        final = solution.history[-1]
        trials.append(
            TrialResult(
                trial_seed,
                final,
                solution.iterations_run,
                final < converged_threshold,
            )
        )
    finals = [t.final_leakage for t in trials]
    return ExperimentSummary(
        tuple(trials),
        min(finals),
        float(median(finals)),
        max(finals),
        sum(t.converged for t in trials) / n_seeds,
        converged_threshold,
    )


def solution_summary(
    spec: SystemSpec,
    seed: int,
    solution: AlignmentSolution,
    converged_threshold: float = 1e-6,
) -> dict:
    """JSON-ready summary of one solve."""
    return {
        "system": format_system(spec),
        "seed": seed,
        "iterations": solution.iterations_run,
        "leakage": [float(p) for p in solution.leakage],
        "converged": bool(solution.history[-1] < converged_threshold),
        "history_len": len(solution.history),
    }
