"""Parent-measurement post-processing for eta = 1/2 noisy qubit POVMs.

The parent measurement is a sharp projective measurement along a Haar-random
direction ``lambda``.  Coarse-graining its outcomes over the octants of a
certified frame yields the eight operators

    G_s = I/8 + v_s . sigma / 16,

and for a target POVM ``{(p_i, a_i)}`` the conditional probabilities

    p(i | octant s) = p_i * max(a_i . v_s, 0)
                      + (1 - mass(v_s)) * alpha_i / sum(alpha)

with noise weights ``alpha_i = (p_i / 2) (1 - (1/4) sum_s max(a_i . v_s, 0))``
reconstruct every half-visibility outcome operator exactly:

    sum_s p(i|s) G_s = p_i (I + a_i . sigma / 2) / 2.

This module builds those tables, verifies the reconstruction, and simulates
the whole protocol by Monte Carlo.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bloch import PauliOperator, random_unit_vectors
from .frames import (
    FRAME_ATOL,
    OCTANT_SIGNS,
    FrameCertificate,
    find_frame,
    positive_part,
)
from .povm import QubitPovm, born_probabilities
from .stats import z_scores

# Entries in (-TABLE_CLAMP, 0) or (1, 1 + TABLE_CLAMP), possible when the
# frame sits at its acceptance tolerance, are clamped into [0, 1].
TABLE_CLAMP = 1e-9

_MC_CHUNK = 1 << 17


class InvalidFrameError(ValueError):
    """Raised when a conditional table is requested for a non-certified frame."""


@dataclass(frozen=True, eq=False)
class OctantOperator:
    """Coarse-grained parent observable for one octant."""

    signs: tuple[int, int, int]
    operator: PauliOperator


def octant_operators(frame: FrameCertificate) -> list[OctantOperator]:
    """The eight closed-form octant operators ``I/8 + v_s . sigma / 16``."""
    return [
        OctantOperator(
            signs=tuple(int(s) for s in signs),
            operator=PauliOperator(0.125, vertex / 16.0),
        )
        for signs, vertex in zip(OCTANT_SIGNS, frame.cube.vertices)
    ]


def octant_operators_quadrature(
    frame: FrameCertificate, n_theta: int = 400, n_phi: int = 400
) -> list[PauliOperator]:
    """Numerically integrated octant operators (midpoint rule, oracle path).

    Integrates ``(1/4pi)(I + lambda . sigma)`` over each octant of the
    certified frame on an ``n_theta x n_phi`` grid in spherical coordinates
    of the rotated frame; the Bloch part is mapped back with the frame
    rotation.  Used to cross-check the closed forms.
    """
    rotation = frame.rotation
    results = []
    for sx, sy, sz in OCTANT_SIGNS:
        theta_lo, theta_hi = (0.0, np.pi / 2.0) if sz > 0 else (np.pi / 2.0, np.pi)
        if sx > 0 and sy > 0:
            phi_lo = 0.0
        elif sx < 0 and sy > 0:
            phi_lo = np.pi / 2.0
        elif sx < 0 and sy < 0:
            phi_lo = np.pi
        else:
            phi_lo = 3.0 * np.pi / 2.0
        phi_hi = phi_lo + np.pi / 2.0
        dt = (theta_hi - theta_lo) / n_theta
        dp = (phi_hi - phi_lo) / n_phi
        theta = theta_lo + dt * (np.arange(n_theta) + 0.5)
        phi = phi_lo + dp * (np.arange(n_phi) + 0.5)
        sin_t, cos_t = np.sin(theta), np.cos(theta)
        area = dt * dp / (4.0 * np.pi)
        t_part = area * sin_t.sum() * n_phi
        wx = area * (sin_t * sin_t).sum() * np.cos(phi).sum()
        wy = area * (sin_t * sin_t).sum() * np.sin(phi).sum()
        wz = area * (cos_t * sin_t).sum() * n_phi
        results.append(PauliOperator(t_part, rotation @ np.array([wx, wy, wz])))
    return results


def noise_weights(povm: QubitPovm, frame: FrameCertificate) -> np.ndarray:
    """Per-outcome noise weights; nonnegative for every POVM and frame."""
    theta_sum = positive_part(frame.cube.vertices @ povm.directions.T).sum(axis=0)
    return povm.weights / 2.0 * (1.0 - theta_sum / 4.0)


@dataclass(frozen=True, eq=False)
class ConditionalProbabilityTable:
    """Row-stochastic table ``p(outcome | octant)``, one row per octant."""

    povm: QubitPovm
    frame: FrameCertificate
    alphas: np.ndarray
    table: np.ndarray
    renorm_residual: float

    @property
    def n_outcomes(self) -> int:
        return self.povm.n_outcomes

    def cdf(self) -> np.ndarray:
        cdf = np.cumsum(self.table, axis=1)
        cdf[:, -1] = 1.0
        return cdf


def build_table(povm: QubitPovm, frame: FrameCertificate) -> ConditionalProbabilityTable:
    """Conditional probabilities realising the parent-measurement protocol."""
    if frame.max_value > 1.0 + FRAME_ATOL:
        raise InvalidFrameError(
            f"frame max vertex value {frame.max_value} exceeds 1 + {FRAME_ATOL}"
        )
    deterministic = positive_part(frame.cube.vertices @ povm.directions.T) * povm.weights
    vertex_mass = deterministic.sum(axis=1)
    alphas = povm.weights / 2.0 - deterministic.sum(axis=0) / 8.0
    alpha_sum = float(alphas.sum())
    if alpha_sum < 1e-12:
        # All vertex values equal 1, the deterministic term already
        # normalises and the noise term would be 0/0.
        table = deterministic.copy()
    else:
        table = deterministic + np.outer(1.0 - vertex_mass, alphas / alpha_sum)
    if table.min() < -TABLE_CLAMP or table.max() > 1.0 + TABLE_CLAMP:
        raise InvalidFrameError("conditional probabilities escape [0, 1] beyond tolerance")
    np.clip(table, 0.0, 1.0, out=table)
    row_sums = table.sum(axis=1)
    renorm_residual = float(np.max(np.abs(row_sums - 1.0)))
    table /= row_sums[:, None]
    table.setflags(write=False)
    alphas.setflags(write=False)
    return ConditionalProbabilityTable(
        povm=povm, frame=frame, alphas=alphas, table=table, renorm_residual=renorm_residual
    )


@dataclass(frozen=True)
class DecompositionReport:
    """Residuals of the octant-mixture reconstruction of the noisy POVM."""

    per_outcome: np.ndarray
    max_residual: float
    deterministic_residual: float
    noise_residual: float
    atol: float = 1e-10

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.atol


def verify_decomposition(cpt: ConditionalProbabilityTable) -> DecompositionReport:
    """Check ``sum_s p(i|s) G_s = p_i (I + a_i . sigma / 2) / 2`` per outcome.

    Also checks the two constituent identities: the deterministic term
    alone reconstructs the target minus ``alpha_i I``, and the noise term
    contributes exactly ``alpha_i I``.
    """
    povm, frame = cpt.povm, cpt.frame
    vertices = frame.cube.vertices
    table = cpt.table
    # Reconstruction in (t, w) components; G_s has t = 1/8, w = v_s / 16.
    recon_t = table.sum(axis=0) / 8.0
    recon_w = table.T @ vertices / 16.0
    target_t = povm.weights / 2.0
    target_w = povm.weights[:, None] * povm.directions / 4.0
    residuals = np.maximum(
        np.abs(recon_t - target_t),
        np.max(np.abs(recon_w - target_w), axis=1),
    )
    deterministic = positive_part(vertices @ povm.directions.T) * povm.weights
    det_t = deterministic.sum(axis=0) / 8.0
    det_w = deterministic.T @ vertices / 16.0
    det_res = np.maximum(
        np.abs(det_t - (target_t - cpt.alphas)),
        np.max(np.abs(det_w - target_w), axis=1),
    )
    noise = table - deterministic
    noise_t = noise.sum(axis=0) / 8.0
    noise_w = noise.T @ vertices / 16.0
    noise_res = np.maximum(np.abs(noise_t - cpt.alphas), np.max(np.abs(noise_w), axis=1))
    return DecompositionReport(
        per_outcome=residuals,
        max_residual=float(residuals.max()),
        deterministic_residual=float(det_res.max()),
        noise_residual=float(noise_res.max()),
    )


# ---------------------------------------------------------------------------
# Monte Carlo simulation of the protocol.


def sample_lambda(rng: np.random.Generator) -> np.ndarray:
    """One Haar-uniform direction on the unit sphere."""
    return random_unit_vectors(1, rng)[0]


def sample_lambda_batch(n: int, rng: np.random.Generator) -> np.ndarray:
    return random_unit_vectors(n, rng)


def octant_index(rotation: np.ndarray, lam) -> int | np.ndarray:
    """Octant of ``lambda`` in the rotated frame; a zero coordinate counts as +.

    Accepts a single vector or a batch of row vectors.
    """
    coords = np.asarray(lam, dtype=float) @ rotation
    negative = coords < 0
    index = negative @ np.array([4, 2, 1])
    return int(index) if index.ndim == 0 else index


def simulate_outcome(
    cpt: ConditionalProbabilityTable, lam, rng: np.random.Generator
) -> int:
    """Post-process one parent outcome ``lambda`` into a POVM outcome."""
    lam = np.asarray(lam, dtype=float)
    if abs(np.linalg.norm(lam) - 1.0) > 1e-9:
        raise ValueError("lambda must be a unit vector")
    row_cdf = cpt.cdf()[octant_index(cpt.frame.rotation, lam)]
    return int(np.searchsorted(row_cdf, rng.random(), side="right"))


def _chunk_counts(total: int, seed: int, chunk_size: int = _MC_CHUNK):
    """Fixed chunk layout with one spawned RNG stream per chunk.

    The layout depends only on (total, seed, chunk_size), never on how many
    workers consume the chunks, so results are worker-count independent.
    """
    n_chunks = max(1, -(-total // chunk_size)) if total else 0
    seeds = np.random.SeedSequence(seed).spawn(n_chunks) if n_chunks else []
    sizes = [min(chunk_size, total - k * chunk_size) for k in range(n_chunks)]
    return sizes, seeds


def _run_chunks(sampler, sizes, seeds, workers: int, shape) -> np.ndarray:
    counts = np.zeros(shape, dtype=np.int64)
    if not sizes:
        return counts
    jobs = [(m, np.random.default_rng(ss)) for m, ss in zip(sizes, seeds)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(lambda job: sampler(*job), jobs):
                counts += part
    else:
        for job in jobs:
            counts += sampler(*job)
    return counts


@dataclass(frozen=True, eq=False)
class SimulationReport:
    """Empirical outcome frequencies against the exact Born targets."""

    n_samples: int
    counts: np.ndarray
    born: np.ndarray
    z: np.ndarray
    seed: int
    chunk_size: int
    n_chunks: int

    @property
    def frequencies(self) -> np.ndarray:
        if self.n_samples == 0:
            return np.zeros_like(self.born)
        return self.counts / self.n_samples

    @property
    def max_abs_z(self) -> float:
        return float(np.max(np.abs(self.z))) if self.z.size else 0.0


def simulate_statistics(
    povm: QubitPovm,
    state_bloch,
    n_samples: int,
    rng_seed: int,
    workers: int = 1,
    frame: FrameCertificate | None = None,
) -> SimulationReport:
    """Run the full protocol ``n_samples`` times and compare to Born's rule.

    Each round measures the parent observable on the state (a Haar direction
    ``u`` accepted as ``+u`` or ``-u`` with the projective Born weights) and
    post-processes the result through the conditional table.  Targets are
    the Born probabilities of the half-visibility POVM.
    """
    state = np.asarray(state_bloch, dtype=float)
    targets = born_probabilities(povm, state, eta=0.5)
    if frame is None:
        frame = find_frame(povm)
    cpt = build_table(povm, frame)
    rotation = frame.rotation
    cdf = cpt.cdf()
    n_out = cpt.n_outcomes

    def sampler(m: int, rng: np.random.Generator) -> np.ndarray:
        u = sample_lambda_batch(m, rng)
        keep_plus = rng.random(m) < 0.5 * (1.0 + u @ state)
        lam = np.where(keep_plus[:, None], u, -u)
        octants = octant_index(rotation, lam)
        outcomes = (cdf[octants] <= rng.random(m)[:, None]).sum(axis=1)
        return np.bincount(outcomes, minlength=n_out)

    sizes, seeds = _chunk_counts(n_samples, rng_seed)
    counts = _run_chunks(sampler, sizes, seeds, workers, (n_out,))
    return SimulationReport(
        n_samples=n_samples,
        counts=counts,
        born=targets,
        z=z_scores(counts, targets, n_samples),
        seed=rng_seed,
        chunk_size=_MC_CHUNK,
        n_chunks=len(sizes),
    )
