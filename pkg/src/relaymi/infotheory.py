"""Monte Carlo estimators for finite-alphabet mutual information.

For y = H P x + n with x uniform over a finite symbol space and n circular
complex Gaussian with unit variance per entry, the mutual information per
channel use is

    I = log M - (1/(2L M^(2L))) sum_m E_n[ log sum_k exp(-|HP(x_m-x_k)+n|^2 + |n|^2) ]

All internal computation is in nats (the MMSE gradient identity used by the
optimizer is exact in nats); conversion to bits happens only in reporting
types.  Every estimator is deterministic given a NoiseBatch, which is the
hook that makes common-random-numbers line searches work.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .constellation import SymbolSpace

__all__ = [
    "NoiseBatch",
    "MiEstimate",
    "MmseMatrix",
    "derive_seed",
    "draw_noise",
    "mutual_information",
    "mutual_information_nats",
    "mutual_information_oracle",
    "mmse_matrix",
    "check_stationarity",
    "unitary_invariance_check",
]

LN2 = float(np.log(2.0))

# Element budget for the (samples, K, K) exponent blocks; keeps peak memory
# near a few hundred MB even at K = M**(2L) in the hundreds.
_CHUNK_ELEMS = 1 << 22

# Stream tag separating oracle draws from optimization draws.
_ORACLE_STREAM = 7919


def derive_seed(root: int, *path: int) -> int:
    """Deterministic child seed for substream (root, *path).

    Built on SeedSequence so nearby roots and paths give statistically
    independent streams; the result is a plain integer, so any batch can be
    regenerated from its recorded seed alone.
    """
    ss = np.random.SeedSequence([int(root), *[int(p) for p in path]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class NoiseBatch:
    """Frozen block of i.i.d. circular complex Gaussian noise rows.

    samples[j] is one length-dim draw with unit variance per complex entry
    (real and imaginary parts each N(0, 1/2)).  Batches are immutable; the
    optimizer shares one batch across all evaluations inside a line search.
    """

    samples: np.ndarray  # (N, dim) complex
    seed: int

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]


def draw_noise(dim: int, n_samples: int, seed: int) -> NoiseBatch:
    """Draw a reproducible NoiseBatch; same (dim, n_samples, seed) is bitwise identical."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    rng = np.random.default_rng(int(seed))
    samples = rng.standard_normal((n_samples, dim)) + 1j * rng.standard_normal((n_samples, dim))
    samples *= np.sqrt(0.5)
    samples.setflags(write=False)
    return NoiseBatch(samples=samples, seed=int(seed))


@dataclass(frozen=True)
class MiEstimate:
    """Mutual information estimate in bits per channel use."""

    bits_per_use: float
    std_err: float  # standard error of the estimate, bits
    n_samples: int
    seed: int


@dataclass(frozen=True)
class MmseMatrix:
    """Estimated MMSE matrix E = E[(x - xhat(y))(x - xhat(y))^H], Hermitian."""

    matrix: np.ndarray  # (2L, 2L) complex
    n_samples: int


def _validated_product(h_mat: np.ndarray, p_mat: np.ndarray, space: SymbolSpace) -> np.ndarray:
    h_mat = np.asarray(h_mat, dtype=np.complex128)
    p_mat = np.asarray(p_mat, dtype=np.complex128)
    d = space.dim
    if h_mat.shape != (d, d) or p_mat.shape != (d, d):
        raise ValueError(
            f"H and P must be {d}x{d} to match the symbol space, "
            f"got {h_mat.shape} and {p_mat.shape}"
        )
    if not (np.all(np.isfinite(h_mat.view(np.float64))) and np.all(np.isfinite(p_mat.view(np.float64)))):
        raise ValueError("H and P entries must be finite")
    return h_mat @ p_mat


def _pair_geometry(hp: np.ndarray, vectors: np.ndarray):
    """Images s_k = HP x_k and the pairwise squared distances |s_m - s_k|^2."""
    s = vectors @ hp.T  # (K, dim)
    gram = s @ s.conj().T
    energy = np.real(np.diag(gram)).copy()
    normsq = energy[:, None] + energy[None, :] - 2.0 * np.real(gram)
    np.maximum(normsq, 0.0, out=normsq)  # clamp the tiny negatives from rounding
    return s, normsq


def _check_batch(noise: NoiseBatch, space: SymbolSpace) -> None:
    if noise.n_samples < 1:
        raise ValueError("noise batch is empty")
    if noise.dim != space.dim:
        raise ValueError(
            f"noise dimension {noise.dim} does not match symbol space dimension {space.dim}"
        )


def _sample_chunks(n_total: int, k: int):
    step = max(1, _CHUNK_ELEMS // max(1, k * k))
    for start in range(0, n_total, step):
        yield start, min(start + step, n_total)


def mutual_information_nats(
    h_mat: np.ndarray, p_mat: np.ndarray, space: SymbolSpace, noise: NoiseBatch
) -> tuple[float, float]:
    """Estimate I(x; HPx + n) in nats per channel use.

    Returns (value, standard error).  The per-noise-sample statistic is

        T_j = (1/(2L K)) sum_m logsumexp_k( -|s_m - s_k|^2 - 2 Re <s_m - s_k, n_j> )

    with s_k = HP x_k, and I = log(K)/(2L) - mean_j T_j.  The m = k term
    makes every inner exponent list contain 0, so the log-sum-exp shift is
    always anchored and T_j >= log-of-one; for H = 0 the estimate is exactly
    zero with zero variance.
    """
    hp = _validated_product(h_mat, p_mat, space)
    _check_batch(noise, space)
    s, normsq = _pair_geometry(hp, space.vectors)
    k = s.shape[0]
    two_l = space.dim
    n = noise.n_samples

    scores = np.empty(n)
    s_conj_t = s.conj().T
    for start, stop in _sample_chunks(n, k):
        a = np.real(noise.samples[start:stop] @ s_conj_t)  # (B, K): Re <s_m, n_j>
        expo = -normsq[None, :, :] - 2.0 * (a[:, :, None] - a[:, None, :])
        inner = logsumexp(expo, axis=2)  # (B, K), nats
        scores[start:stop] = inner.mean(axis=1) / two_l

    # log(K)/(2L) equals log(M) exactly in the reals; differencing per sample
    # before averaging makes the H = 0 case cancel to exactly 0.0 in floats.
    log_m = np.log(float(k)) / two_l
    deficits = log_m - scores
    value = float(np.mean(deficits))
    std_err = float(np.std(deficits, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return value, std_err


def mutual_information(
    h_mat: np.ndarray, p_mat: np.ndarray, space: SymbolSpace, noise: NoiseBatch
) -> MiEstimate:
    """Mutual information in bits per channel use; see mutual_information_nats."""
    nats, se_nats = mutual_information_nats(h_mat, p_mat, space, noise)
    return MiEstimate(
        bits_per_use=nats / LN2,
        std_err=se_nats / LN2,
        n_samples=noise.n_samples,
        seed=noise.seed,
    )


def mutual_information_oracle(
    h_mat: np.ndarray,
    p_mat: np.ndarray,
    space: SymbolSpace,
    n_samples: int = 100_000,
    seed: int = 0,
) -> MiEstimate:
    """Reporting-grade MI estimate on a dedicated noise stream.

    The stream is derived from (seed, oracle tag) so it never collides with
    optimization batches that share the same root seed.
    """
    batch = draw_noise(space.dim, n_samples, derive_seed(seed, _ORACLE_STREAM))
    return mutual_information(h_mat, p_mat, space, batch)


def mmse_matrix(
    h_mat: np.ndarray, p_mat: np.ndarray, space: SymbolSpace, noise: NoiseBatch
) -> MmseMatrix:
    """Estimate the MMSE matrix E of x given y = HPx + n.

    For every noise draw the posterior mean xhat = sum_l x_l softmax_l(
    -|y - HP x_l|^2 ) is evaluated at y = HP x_m + n for ALL symbol vectors
    x_m (the exact uniform average over x, not a sampled one), and the error
    outer products are averaged.  Each term is PSD, so the estimate is PSD by
    construction; it is Hermitian-symmetrized before returning.
    """
    hp = _validated_product(h_mat, p_mat, space)
    _check_batch(noise, space)
    vectors = space.vectors
    s, normsq = _pair_geometry(hp, vectors)
    k, d = s.shape
    n = noise.n_samples

    accum = np.zeros((d, d), dtype=np.complex128)
    s_conj_t = s.conj().T
    for start, stop in _sample_chunks(n, k):
        a = np.real(noise.samples[start:stop] @ s_conj_t)  # (B, K)
        expo = -normsq[None, :, :] - 2.0 * (a[:, :, None] - a[:, None, :])
        expo -= expo.max(axis=2, keepdims=True)
        weights = np.exp(expo)
        weights /= weights.sum(axis=2, keepdims=True)  # (B, K, K) over [j, m, l]
        xhat = weights.reshape(-1, k) @ vectors  # (B*K, dim)
        err = (vectors[None, :, :] - xhat.reshape(-1, k, d)).reshape(-1, d)
        accum += err.T @ err.conj()

    e_mat = accum / (n * k)
    e_mat = 0.5 * (e_mat + e_mat.conj().T)
    e_mat.setflags(write=False)
    return MmseMatrix(matrix=e_mat, n_samples=n)


def check_stationarity(
    h_mat: np.ndarray, p_mat: np.ndarray, e_mat: np.ndarray
) -> tuple[float, float]:
    """Diagnostic for the first-order optimality condition mu*P = H^H H P E.

    Returns (mu, residual) with mu the least-squares multiplier
    Re<P, G> / |P|_F^2 for G = H^H H P E and residual = |G - mu P|_F / |G|_F.
    A converged precoder has a small residual; G = 0 returns residual 0 by
    convention.  The multiplier is never consumed by the optimizer, only
    reported.
    """
    p_mat = np.asarray(p_mat, dtype=np.complex128)
    h_mat = np.asarray(h_mat, dtype=np.complex128)
    p_norm_sq = float(np.real(np.vdot(p_mat, p_mat)))
    if p_norm_sq == 0.0:
        raise ValueError("P must be nonzero")
    g_mat = h_mat.conj().T @ h_mat @ p_mat @ np.asarray(e_mat, dtype=np.complex128)
    g_norm = float(np.linalg.norm(g_mat))
    if g_norm == 0.0:
        return 0.0, 0.0
    mu = float(np.real(np.vdot(p_mat, g_mat))) / p_norm_sq
    residual = float(np.linalg.norm(g_mat - mu * p_mat)) / g_norm
    return mu, residual


def unitary_invariance_check(
    h_mat: np.ndarray,
    p_mat: np.ndarray,
    space: SymbolSpace,
    noise: NoiseBatch,
    rotation: np.ndarray,
) -> float:
    """|MI(UH, P, Un) - MI(H, P, n)| in bits, with the SAME rotated batch.

    Output rotations leave every distance |U(HPd + n)| unchanged, so the
    difference is pure floating-point noise (0.0 exactly for U = I).  Input
    rotations do NOT enjoy this and genuinely change finite-alphabet MI.
    """
    rotation = np.asarray(rotation, dtype=np.complex128)
    d = space.dim
    if rotation.shape != (d, d):
        raise ValueError(f"rotation must be {d}x{d}, got {rotation.shape}")
    defect = np.linalg.norm(rotation.conj().T @ rotation - np.eye(d))
    if defect > 1e-10:
        raise ValueError(f"rotation is not unitary: |U^H U - I|_F = {defect:.3e}")

    base, _ = mutual_information_nats(h_mat, p_mat, space, noise)
    rotated = NoiseBatch(samples=noise.samples @ rotation.T, seed=noise.seed)
    moved, _ = mutual_information_nats(rotation @ np.asarray(h_mat), p_mat, space, rotated)
    return abs(moved - base) / LN2
