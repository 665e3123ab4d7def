"""Two-hop amplify-and-forward relay channel with a direct link.

The source talks for L symbol periods while one selected relay listens, then
the relay retransmits an amplified copy for L more periods.  Stacking both
half-blocks gives a 2L x 2L effective linear channel with unit-variance
noise after the destination normalizes the second half-block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RelayNetworkParams",
    "EffectiveChannel",
    "amplification_factor",
    "effective_channel",
    "select_relay",
]


@dataclass(frozen=True)
class RelayNetworkParams:
    """Static description of one source/relays/destination network.

    Attributes
    ----------
    h_direct : complex
        Source-to-destination gain (may be 0: no direct link).
    relays : tuple[tuple[complex, complex], ...]
        Per-relay (source-to-relay gain, relay-to-destination gain).
    ps : float
        Source transmit power, > 0.
    pr : float
        Relay transmit power, >= 0.
    block_length : int
        L, the half-block length in symbol periods.
    """

    h_direct: complex
    relays: tuple[tuple[complex, complex], ...]
    ps: float
    pr: float
    block_length: int = 1

    def __post_init__(self):
        if len(self.relays) == 0:
            raise ValueError("at least one relay is required")
        if not np.isfinite(self.ps) or self.ps <= 0:
            raise ValueError(f"source power ps must be finite and > 0, got {self.ps}")
        if not np.isfinite(self.pr) or self.pr < 0:
            raise ValueError(f"relay power pr must be finite and >= 0, got {self.pr}")
        if self.block_length < 1:
            raise ValueError(f"block_length must be >= 1, got {self.block_length}")
        gains = [self.h_direct] + [g for pair in self.relays for g in pair]
        if not np.all(np.isfinite(np.asarray(gains, dtype=np.complex128))):
            raise ValueError("channel gains must be finite")

    @property
    def dim(self) -> int:
        return 2 * self.block_length


def amplification_factor(ps: float, pr: float, h_relay: complex) -> float:
    """Relay gain b that spends exactly pr per symbol on retransmission.

    The relay scales its received signal sqrt(ps)*h*s + noise so the average
    transmit energy equals pr, assuming unit-energy source symbols and unit
    noise variance:  b = sqrt(pr / (ps*|h|^2 + 1)).
    """
    if not np.isfinite(ps) or ps <= 0:
        raise ValueError(f"ps must be finite and > 0, got {ps}")
    if not np.isfinite(pr) or pr < 0:
        raise ValueError(f"pr must be finite and >= 0, got {pr}")
    return float(np.sqrt(pr / (ps * abs(h_relay) ** 2 + 1.0)))


@dataclass(frozen=True)
class EffectiveChannel:
    """Normalized 2L x 2L block channel for one selected relay.

    H = U @ diag(sigma) @ V.conj().T with sigma nonincreasing.  The second
    half-block is scaled by w = 1/sqrt(noise_power) so the stacked noise is
    white with unit variance; H is full rank iff the direct gain is nonzero.
    """

    relay: int
    b: float  # relay amplification gain
    noise_power: float  # pre-normalization variance 1 + b^2 |g|^2 at the destination
    w: float  # second half-block normalization 1/sqrt(noise_power)
    H: np.ndarray  # (2L, 2L) complex
    U: np.ndarray  # left singular vectors
    sigma: np.ndarray  # singular values, nonincreasing
    V: np.ndarray  # right singular vectors (columns)


def effective_channel(params: RelayNetworkParams, relay: int) -> EffectiveChannel:
    """Build the effective channel matrix and its SVD for one relay choice.

    Raises
    ------
    IndexError
        relay outside range(len(params.relays)).
    numpy.linalg.LinAlgError
        SVD failure, re-raised with condition diagnostics.
    """
    if not 0 <= relay < len(params.relays):
        raise IndexError(f"relay index {relay} out of range for {len(params.relays)} relays")
    h_r, g_r = params.relays[relay]
    el = params.block_length
    b = amplification_factor(params.ps, params.pr, h_r)
    noise_power = 1.0 + b**2 * abs(g_r) ** 2
    w = 1.0 / np.sqrt(noise_power)

    eye = np.eye(el, dtype=np.complex128)
    zero = np.zeros((el, el), dtype=np.complex128)
    top = np.hstack([params.h_direct * eye, zero])
    bottom = np.hstack([w * b * h_r * g_r * eye, w * params.h_direct * eye])
    h_mat = np.sqrt(params.ps) * np.vstack([top, bottom])

    try:
        u, sigma, vh = np.linalg.svd(h_mat)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - svd of finite 2Lx2L is robust
        raise np.linalg.LinAlgError(
            f"SVD of effective channel failed: {exc}; "
            f"fro_norm={np.linalg.norm(h_mat):.3e}, relay={relay}"
        ) from exc

    for mat in (h_mat, u, vh):
        mat.setflags(write=False)
    sigma.setflags(write=False)
    return EffectiveChannel(
        relay=relay,
        b=b,
        noise_power=float(noise_power),
        w=float(w),
        H=h_mat,
        U=u,
        sigma=sigma,
        V=vh.conj().T,
    )


def select_relay(params: RelayNetworkParams) -> int:
    """Pick the relay maximizing the Gaussian capacity proxy log det(I + H^H H).

    The finite-alphabet objective has no closed form before optimization, so
    selection uses the Gaussian proxy; ties resolve to the lowest index.
    """
    best_index = 0
    best_metric = -np.inf
    for i in range(len(params.relays)):
        sigma = effective_channel(params, i).sigma
        metric = float(np.sum(np.log1p(sigma**2)))
        if metric > best_metric:
            best_metric = metric
            best_index = i
    return best_index
