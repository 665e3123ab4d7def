"""Precoder optimization: barrier-method power allocation, unitary rotation
descent, the alternating two-step driver, and the two reference baselines.

The two-step method fixes the precoder's left singular vectors to the
channel's right singular vectors, which reduces the problem to the diagonal
model y = diag(sigma) diag(sqrt(lambda)) V x + n.  Step one maximizes mutual
information over the power split lambda (concave, solved with a logarithmic
barrier and steepest descent); step two maximizes over the unitary rotation
V (descent on the unitary group with an SVD retraction).

Every line search compares objective values evaluated on one frozen
NoiseBatch (common random numbers); the MMSE matrix behind each gradient is
re-estimated at accepted iterates only.  Trace rows are measured on a
dedicated per-run batch so progress curves are comparable across phases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import EffectiveChannel
from .constellation import SymbolSpace
from .infotheory import (
    LN2,
    MiEstimate,
    NoiseBatch,
    derive_seed,
    draw_noise,
    mmse_matrix,
    mutual_information,
    mutual_information_nats,
    mutual_information_oracle,
)
from .manifold import project_to_stiefel, require_unitary, stiefel_gradient

__all__ = [
    "BarrierConfig",
    "OptimizerConfig",
    "Precoder",
    "TracePoint",
    "PowerResult",
    "RotationResult",
    "OptimizerReport",
    "EstimatorContext",
    "power_jacobian",
    "barrier_objective",
    "barrier_gradient",
    "optimize_power",
    "optimize_rotation",
    "optimize_two_step",
    "direct_gradient_baseline",
    "gaussian_waterfilling_baseline",
]

# Relative backoff of the uniform initial power split from the budget face.
INITIAL_POWER_BACKOFF = 1e-3

# Doubling/halving caps; reached only at the Monte Carlo noise floor.
_MAX_SEARCH_STEPS = 60

# Substream tags under one run seed.
_OPT_STREAM = 1
_TRACE_STREAM = 2
_REPORT_STREAM = 3
_INIT_STREAM = 4


@dataclass(frozen=True)
class BarrierConfig:
    """Knobs for the barrier power descent (also reused by the rotation descent).

    t0/alpha/epsilon: initial barrier weight, its growth factor, and the
    duality-gap style stop 1/t < epsilon.  grad_tol bounds the squared norm
    of the descent direction; max_inner_iters caps each descent loop.
    """

    t0: float = 1.0
    alpha: float = 10.0
    epsilon: float = 1e-5
    grad_tol: float = 1e-6
    max_inner_iters: int = 200

    def __post_init__(self):
        if self.t0 <= 0 or self.alpha <= 1 or self.epsilon <= 0:
            raise ValueError("require t0 > 0, alpha > 1, epsilon > 0")
        if self.grad_tol <= 0 or self.max_inner_iters < 1:
            raise ValueError("require grad_tol > 0 and max_inner_iters >= 1")


@dataclass(frozen=True)
class OptimizerConfig:
    """Run-level configuration shared by the two-step driver and baselines."""

    barrier: BarrierConfig = BarrierConfig()
    max_outer_rounds: int = 20
    outer_tol_std_errs: float = 1.0  # stop when a round gains less than this many std errs
    n_opt_samples: int = 2000
    n_report_samples: int = 100_000
    max_gradient_iters: int = 100
    rotation_start: str = "haar"  # identity is a stationary saddle of the rotation descent

    def __post_init__(self):
        if self.max_outer_rounds < 1 or self.max_gradient_iters < 1:
            raise ValueError("iteration budgets must be >= 1")
        if self.n_opt_samples < 2 or self.n_report_samples < 2:
            raise ValueError("sample sizes must be >= 2")
        if self.outer_tol_std_errs < 0:
            raise ValueError("outer_tol_std_errs must be >= 0")
        if self.rotation_start not in ("haar", "identity"):
            raise ValueError(f"rotation_start must be 'haar' or 'identity', got {self.rotation_start!r}")


@dataclass(frozen=True)
class Precoder:
    """Precoder in factored form P = u_mat @ diag(sqrt(lam)) @ v_mat.

    u_mat and v_mat are unitary; lam holds the squared singular values, so
    the transmit power is Tr(P P^H) = sum(lam), budgeted at 2L.
    """

    u_mat: np.ndarray
    lam: np.ndarray
    v_mat: np.ndarray

    def matrix(self) -> np.ndarray:
        return self.u_mat @ (np.sqrt(self.lam)[:, None] * self.v_mat)

    def power(self) -> float:
        return float(np.sum(self.lam))

    def validate(self, tol: float = 1e-8) -> "Precoder":
        require_unitary(self.u_mat, tol)
        require_unitary(self.v_mat, tol)
        if np.any(np.asarray(self.lam) < -1e-12):
            raise ValueError("lam entries must be nonnegative")
        budget = self.u_mat.shape[0]
        if self.power() > budget + 1e-9:
            raise ValueError(f"power {self.power():.12f} exceeds budget {budget}")
        return self


@dataclass(frozen=True)
class TracePoint:
    """One progress-curve sample: MI in bits at an accepted iterate."""

    index: int
    bits_per_use: float
    std_err: float
    phase: str  # "power", "rotation", or "gradient"


@dataclass(frozen=True)
class PowerResult:
    lam: np.ndarray
    converged: bool
    trace: list[TracePoint]


@dataclass(frozen=True)
class RotationResult:
    v_mat: np.ndarray
    converged: bool
    trace: list[TracePoint]


@dataclass(frozen=True)
class OptimizerReport:
    """Everything a run produced: trace, final precoder, reporting-grade MI."""

    method: str
    trace: list[TracePoint]
    final: Precoder
    final_mi: MiEstimate
    converged: bool
    seed: int
    rounds: int
    round_reports: list[MiEstimate] = field(default_factory=list)

    def to_dict(self) -> dict:
        def cmat(m: np.ndarray) -> dict:
            return {"re": np.asarray(m).real.tolist(), "im": np.asarray(m).imag.tolist()}

        def mi(e: MiEstimate) -> dict:
            return {
                "bits_per_use": e.bits_per_use,
                "std_err": e.std_err,
                "n_samples": e.n_samples,
                "seed": e.seed,
            }

        return {
            "method": self.method,
            "seed": self.seed,
            "converged": self.converged,
            "rounds": self.rounds,
            "final_mi": mi(self.final_mi),
            "final_precoder": {
                "u": cmat(self.final.u_mat),
                "lam": np.asarray(self.final.lam).tolist(),
                "v": cmat(self.final.v_mat),
            },
            "round_reports": [mi(e) for e in self.round_reports],
            "trace": [
                {
                    "index": p.index,
                    "bits_per_use": p.bits_per_use,
                    "std_err": p.std_err,
                    "phase": p.phase,
                }
                for p in self.trace
            ],
        }


@dataclass
class EstimatorContext:
    """Monte Carlo resources for one optimization run.

    next_batch() hands out fresh common-random-numbers batches in a
    deterministic substream sequence; trace_batch, when set, is the fixed
    batch every TracePoint is measured on.
    """

    space: SymbolSpace
    n_samples: int
    seed: int
    counter: int = 0
    trace_batch: NoiseBatch | None = None

    def next_batch(self) -> NoiseBatch:
        batch = draw_noise(self.space.dim, self.n_samples, derive_seed(self.seed, self.counter))
        self.counter += 1
        return batch


# ---------------------------------------------------------------------------
# gradients and barrier pieces


def power_jacobian(sigma: np.ndarray, v_mat: np.ndarray, e_mat: np.ndarray) -> np.ndarray:
    """d(MI)/d(lambda) for the diagonal model: sigma_i^2 Re[(V E V^H)_ii] / d.

    The MI here is per channel use and in nats, matching
    mutual_information_nats; the 1/d factor (d = block dimension) converts
    the per-block I-MMSE derivative to that normalization, so the result
    matches finite differences of the estimator itself.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    v_mat = np.asarray(v_mat, dtype=np.complex128)
    e_mat = np.asarray(e_mat, dtype=np.complex128)
    d = sigma.shape[0]
    if v_mat.shape != (d, d) or e_mat.shape != (d, d):
        raise ValueError("sigma, V, E must share one dimension")
    inner = np.einsum("ij,jk,ik->i", v_mat, e_mat, v_mat.conj())
    return sigma**2 * np.real(inner) / d


def barrier_objective(lam: np.ndarray, t: float, mi_fn) -> float:
    """Barrier-penalized objective f(lambda) = -MI + barrier, in nats.

    mi_fn(lambda) must return MI in nats on a frozen noise batch.  Outside
    the open feasible set {lambda > 0, sum(lambda) < budget} the value is
    +inf and mi_fn is never called; the budget is len(lambda), i.e. 2L for
    unit average symbol energy.
    """
    lam = np.asarray(lam, dtype=np.float64)
    if t <= 0:
        raise ValueError(f"barrier weight t must be > 0, got {t}")
    slack = lam.size - float(np.sum(lam))
    if np.any(lam <= 0.0) or slack <= 0.0:
        return float("inf")
    barrier = -(np.sum(np.log(lam)) + np.log(slack)) / t
    return float(-mi_fn(lam) + barrier)


def barrier_gradient(lam: np.ndarray, t: float, jacobian: np.ndarray) -> np.ndarray:
    """Gradient of the barrier objective given the MI jacobian (both in nats)."""
    lam = np.asarray(lam, dtype=np.float64)
    jacobian = np.asarray(jacobian, dtype=np.float64)
    if t <= 0:
        raise ValueError(f"barrier weight t must be > 0, got {t}")
    slack = lam.size - float(np.sum(lam))
    if np.any(lam <= 0.0) or slack <= 0.0:
        raise ValueError("lambda must lie strictly inside the feasible set")
    return -jacobian - (1.0 / lam - 1.0 / slack) / t


def _double_halve_search(f0: float, evaluate, dir_norm_sq: float):
    """Doubling/halving line search on a frozen-batch objective.

    Doubles gamma while the doubled step keeps beating the steep threshold
    f0 - f(2*gamma) >= gamma*|d|^2, then halves until the sufficient
    decrease f0 - f(gamma) >= gamma*|d|^2/2 holds.  Returns (gamma, f_trial,
    accepted); every accepted step satisfies the halving exit inequality, so
    cap exhaustion (the Monte Carlo noise floor) rejects the step and the
    caller treats the phase as converged.
    """
    gamma = 1.0
    for _ in range(_MAX_SEARCH_STEPS):
        if f0 - evaluate(2.0 * gamma) >= gamma * dir_norm_sq:
            gamma *= 2.0
        else:
            break
    for _ in range(_MAX_SEARCH_STEPS):
        f_trial = evaluate(gamma)
        if f0 - f_trial < 0.5 * gamma * dir_norm_sq:
            gamma *= 0.5
        else:
            return gamma, f_trial, True
    return gamma, f0, False


def _diag_model(sigma: np.ndarray, lam: np.ndarray, v_mat: np.ndarray):
    """(H, P) pair for the diagonalized channel at one (lambda, V) point."""
    h_eff = np.diag(np.asarray(sigma, dtype=np.complex128))
    p_eff = np.sqrt(np.asarray(lam, dtype=np.float64))[:, None] * v_mat
    return h_eff, p_eff


def _trace_point(ctx: EstimatorContext, trace: list, h_mat, p_mat, phase: str) -> None:
    if ctx.trace_batch is None:
        return
    est = mutual_information(h_mat, p_mat, ctx.space, ctx.trace_batch)
    trace.append(TracePoint(len(trace), est.bits_per_use, est.std_err, phase))


# ---------------------------------------------------------------------------
# step one: power allocation


def optimize_power(
    lam0: np.ndarray,
    sigma: np.ndarray,
    v_mat: np.ndarray,
    cfg: BarrierConfig,
    ctx: EstimatorContext,
) -> PowerResult:
    """Barrier-method steepest descent over the power split lambda.

    Runs the descent loop to gradient tolerance at each barrier weight t,
    then multiplies t by alpha until 1/t < epsilon.  A fresh noise batch is
    drawn at each t stage; within a stage every objective evaluation shares
    that stage's batch and the MMSE matrix is re-estimated at accepted
    iterates only.  Never returns an infeasible lambda.
    """
    lam = np.asarray(lam0, dtype=np.float64).copy()
    sigma = np.asarray(sigma, dtype=np.float64)
    v_mat = require_unitary(v_mat)
    if lam.shape != sigma.shape:
        raise ValueError("lambda and sigma must have the same shape")
    if np.any(lam <= 0) or float(np.sum(lam)) >= lam.size:
        raise ValueError("initial lambda must be strictly feasible")

    trace: list[TracePoint] = []
    _trace_point(ctx, trace, *_diag_model(sigma, lam, v_mat), "power")
    converged = True
    t = cfg.t0
    while True:
        batch = ctx.next_batch()

        def mi_at(lam_trial: np.ndarray) -> float:
            h_eff, p_eff = _diag_model(sigma, lam_trial, v_mat)
            return mutual_information_nats(h_eff, p_eff, ctx.space, batch)[0]

        for _ in range(cfg.max_inner_iters):
            h_eff, p_eff = _diag_model(sigma, lam, v_mat)
            e_mat = mmse_matrix(h_eff, p_eff, ctx.space, batch).matrix
            jac = power_jacobian(sigma, v_mat, e_mat)
            direction = -barrier_gradient(lam, t, jac)
            dir_norm_sq = float(direction @ direction)
            if dir_norm_sq < cfg.grad_tol:
                break
            f0 = barrier_objective(lam, t, mi_at)
            gamma, _, accepted = _double_halve_search(
                f0, lambda g: barrier_objective(lam + g * direction, t, mi_at), dir_norm_sq
            )
            if not accepted:  # line search hit the Monte Carlo noise floor
                break
            lam = lam + gamma * direction
            _trace_point(ctx, trace, *_diag_model(sigma, lam, v_mat), "power")
        else:
            converged = False
        if 1.0 / t < cfg.epsilon:
            break
        t *= cfg.alpha
    return PowerResult(lam=lam, converged=converged, trace=trace)


# ---------------------------------------------------------------------------
# step two: unitary rotation


def optimize_rotation(
    v0: np.ndarray,
    sigma: np.ndarray,
    lam: np.ndarray,
    cfg: BarrierConfig,
    ctx: EstimatorContext,
) -> RotationResult:
    """Projected steepest descent for the rotation V on the unitary group.

    Trial points and accepted steps are both retracted to the manifold with
    the SVD projection.  One frozen noise batch serves the whole call; the
    MMSE matrix is re-estimated at accepted iterates.
    """
    v_mat = require_unitary(v0)
    sigma = np.asarray(sigma, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    if np.any(lam < 0):
        raise ValueError("lambda entries must be nonnegative")
    batch = ctx.next_batch()

    def neg_mi(v_trial: np.ndarray) -> float:
        h_eff, p_eff = _diag_model(sigma, lam, v_trial)
        return -mutual_information_nats(h_eff, p_eff, ctx.space, batch)[0]

    def retract(w_mat: np.ndarray) -> np.ndarray:
        try:
            return project_to_stiefel(w_mat)
        except np.linalg.LinAlgError:
            return project_to_stiefel(w_mat + 1e-10 * np.eye(w_mat.shape[0]))

    trace: list[TracePoint] = []
    _trace_point(ctx, trace, *_diag_model(sigma, lam, v_mat), "rotation")
    converged = True
    for _ in range(cfg.max_inner_iters):
        h_eff, p_eff = _diag_model(sigma, lam, v_mat)
        e_mat = mmse_matrix(h_eff, p_eff, ctx.space, batch).matrix
        direction = -stiefel_gradient(sigma, lam, v_mat, e_mat)
        dir_norm_sq = float(np.real(np.vdot(direction, direction)))
        if dir_norm_sq < cfg.grad_tol:
            break
        g0 = neg_mi(v_mat)
        gamma, _, accepted = _double_halve_search(
            g0, lambda s: neg_mi(retract(v_mat + s * direction)), dir_norm_sq
        )
        if not accepted:
            break
        v_mat = retract(v_mat + gamma * direction)
        _trace_point(ctx, trace, *_diag_model(sigma, lam, v_mat), "rotation")
    else:
        converged = False
    return RotationResult(v_mat=v_mat, converged=converged, trace=trace)


# ---------------------------------------------------------------------------
# two-step driver


def _reindex(trace: list[TracePoint], points: list[TracePoint]) -> None:
    for p in points:
        trace.append(TracePoint(len(trace), p.bits_per_use, p.std_err, p.phase))


def optimize_two_step(
    channel: EffectiveChannel,
    space: SymbolSpace,
    cfg: OptimizerConfig,
    seed: int,
) -> OptimizerReport:
    """Alternate power and rotation optimization until the reporting-grade MI
    stops improving.

    The precoder's left factor is pinned to the channel's right singular
    vectors; lambda starts at the uniform split backed off the budget face by
    INITIAL_POWER_BACKOFF and V starts at a seeded Haar draw (identity is a
    stationary saddle of the rotation descent — the commutator-structured
    gradient vanishes there — so cfg.rotation_start="identity" is offered
    only for studying that effect).  After each round the full-model MI is
    estimated at n_report_samples; the driver stops when a round improves it
    by less than outer_tol_std_errs combined standard errors, or at
    max_outer_rounds (converged=False).
    """
    d = space.dim
    if channel.H.shape != (d, d):
        raise ValueError(
            f"channel dimension {channel.H.shape} does not match symbol space ({d}x{d})"
        )
    u_mat = channel.V
    sigma = channel.sigma
    lam = (1.0 - INITIAL_POWER_BACKOFF) * np.ones(d)
    if cfg.rotation_start == "haar":
        from scipy.stats import unitary_group

        v_mat = unitary_group.rvs(
            d, random_state=np.random.default_rng(derive_seed(seed, _INIT_STREAM))
        )
    else:
        v_mat = np.eye(d, dtype=np.complex128)

    ctx = EstimatorContext(
        space=space,
        n_samples=cfg.n_opt_samples,
        seed=derive_seed(seed, _OPT_STREAM),
        trace_batch=draw_noise(d, cfg.n_opt_samples, derive_seed(seed, _TRACE_STREAM)),
    )

    trace: list[TracePoint] = []
    round_reports: list[MiEstimate] = []
    converged = False
    rounds = 0
    current = None
    for round_index in range(cfg.max_outer_rounds):
        rounds = round_index + 1
        power = optimize_power(lam, sigma, v_mat, cfg.barrier, ctx)
        lam = power.lam
        _reindex(trace, power.trace)
        rotation = optimize_rotation(v_mat, sigma, lam, cfg.barrier, ctx)
        v_mat = rotation.v_mat
        _reindex(trace, rotation.trace)

        previous = current
        current = mutual_information_oracle(
            channel.H,
            Precoder(u_mat, lam, v_mat).matrix(),
            space,
            cfg.n_report_samples,
            derive_seed(seed, _REPORT_STREAM, round_index),
        )
        round_reports.append(current)
        if previous is not None:
            tol = cfg.outer_tol_std_errs * float(np.hypot(previous.std_err, current.std_err))
            if current.bits_per_use - previous.bits_per_use < tol:
                converged = True
                break

    final = Precoder(u_mat=u_mat, lam=lam, v_mat=v_mat)
    return OptimizerReport(
        method="two-step",
        trace=trace,
        final=final,
        final_mi=current,
        converged=converged,
        seed=seed,
        rounds=rounds,
        round_reports=round_reports,
    )


# ---------------------------------------------------------------------------
# baselines


def _factor_precoder(p_mat: np.ndarray) -> Precoder:
    u_mat, s, vh_mat = np.linalg.svd(p_mat)
    return Precoder(u_mat=u_mat, lam=s**2, v_mat=vh_mat)


def direct_gradient_baseline(
    channel: EffectiveChannel,
    space: SymbolSpace,
    cfg: OptimizerConfig,
    seed: int,
    p0: np.ndarray | None = None,
) -> OptimizerReport:
    """Projected gradient ascent on the precoder's per-stream loadings.

    The reference method the two-step algorithm is measured against: it
    follows the mutual-information ascent direction H^H H P E projected
    onto diagonal matrices, so each step adapts the complex per-stream
    loading directly but never rotates the signal basis.  Power is
    rescaled onto the sphere only when Tr(P P^H) exceeds the budget, and
    every step is backtracked on a shared noise batch.  Started from the
    identity it converges to the no-rotation local maximum; started from
    a precoder that already encodes a good rotation (e.g. a converged
    two-step solution) the loading direction is radial there, so no trial
    step survives backtracking and the start point is kept.
    """
    d = space.dim
    h_mat = channel.H
    if h_mat.shape != (d, d):
        raise ValueError("channel dimension does not match symbol space")
    budget = float(d)
    if p0 is None:
        p_mat = np.eye(d, dtype=np.complex128)
    else:
        p_mat = np.asarray(p0, dtype=np.complex128).copy()
        if p_mat.shape != (d, d):
            raise ValueError(f"p0 must be {d}x{d}")
        if float(np.real(np.vdot(p_mat, p_mat))) > budget + 1e-9:
            raise ValueError("p0 violates the power budget")

    ctx = EstimatorContext(
        space=space,
        n_samples=cfg.n_opt_samples,
        seed=derive_seed(seed, _OPT_STREAM),
        trace_batch=draw_noise(d, cfg.n_opt_samples, derive_seed(seed, _TRACE_STREAM)),
    )
    trace: list[TracePoint] = []
    _trace_point(ctx, trace, h_mat, p_mat, "gradient")

    converged = False
    stalls = 0
    iterations = 0
    for _ in range(cfg.max_gradient_iters):
        batch = ctx.next_batch()
        e_mat = mmse_matrix(h_mat, p_mat, space, batch).matrix
        # per-stream loading direction: diagonal projection of H^H H P E
        ascent = np.diag(np.diag(h_mat.conj().T @ h_mat @ p_mat @ e_mat))
        base, _ = mutual_information_nats(h_mat, p_mat, space, batch)
        ascent_norm = float(np.linalg.norm(ascent))
        if ascent_norm == 0.0:
            converged = True
            break
        # local trust region: first trial moves a quarter of |P|_F
        gamma = 0.25 * float(np.linalg.norm(p_mat)) / ascent_norm

        accepted = False
        trial = p_mat
        gain = 0.0
        for _ in range(40):
            trial = p_mat + gamma * ascent
            power = float(np.real(np.vdot(trial, trial)))
            if power > budget:
                trial = trial * np.sqrt(budget / power)
            value, _ = mutual_information_nats(h_mat, trial, space, batch)
            if value > base:
                accepted = True
                gain = value - base
                break
            gamma *= 0.5
        if not accepted:
            converged = True
            break
        p_mat = trial
        iterations += 1
        _trace_point(ctx, trace, h_mat, p_mat, "gradient")
        # three consecutive sub-noise gains on fresh batches = a stall
        if gain < 1e-4:
            stalls += 1
            if stalls >= 3:
                converged = True
                break
        else:
            stalls = 0

    final_mi = mutual_information_oracle(
        h_mat, p_mat, space, cfg.n_report_samples, derive_seed(seed, _REPORT_STREAM)
    )
    return OptimizerReport(
        method="gradient",
        trace=trace,
        final=_factor_precoder(p_mat),
        final_mi=final_mi,
        converged=converged,
        seed=seed,
        rounds=iterations,
        round_reports=[final_mi],
    )


def gaussian_waterfilling_baseline(
    channel: EffectiveChannel, budget: float | None = None
) -> Precoder:
    """Classic waterfilling power split for the Gaussian-capacity objective.

    lambda_i = max(0, nu - 1/sigma_i^2) with nu bisected until
    sum(lambda) equals the budget (2L by default) to within 1e-10; the
    rotation is identity and the left factor is the channel's V.  All-zero
    sigma degenerates to the uniform split by convention.
    """
    sigma = np.asarray(channel.sigma, dtype=np.float64)
    d = sigma.size
    total = float(d) if budget is None else float(budget)
    if total <= 0:
        raise ValueError(f"power budget must be > 0, got {total}")

    if np.all(sigma == 0.0):
        lam = np.full(d, total / d)
    else:
        inv_gain = np.full(d, np.inf)
        positive = sigma > 0
        inv_gain[positive] = 1.0 / sigma[positive] ** 2

        def allocated(nu: float) -> float:
            return float(np.sum(np.maximum(0.0, nu - inv_gain[positive])))

        lo = float(np.min(inv_gain[positive]))
        hi = lo + total + float(np.max(inv_gain[positive]))
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if allocated(mid) > total:
                hi = mid
            else:
                lo = mid
            if hi - lo < 1e-13 and abs(allocated(0.5 * (lo + hi)) - total) <= 1e-10:
                break
        nu = 0.5 * (lo + hi)
        lam = np.maximum(0.0, nu - inv_gain)
        lam[~positive] = 0.0

    return Precoder(
        u_mat=channel.V.copy(), lam=lam, v_mat=np.eye(d, dtype=np.complex128)
    )
