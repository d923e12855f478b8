"""Gaussian measurement conditioning on one mode of a two-mode Gaussian state.

A rank-one Gaussian measurement is a displaced projection onto a pure
Gaussian seed state with CM ``V0 = R(phi) diag(u, 1/u) R(phi)^T``.  The
special cases are heterodyne detection (``u = 1``) and the two homodyne
detections, reached as the limits ``u -> 0`` (measuring the ``phi``
quadrature) and ``u -> +inf``.  The homodyne limits are evaluated
analytically through the rank-deficient limit of ``(B + V0)^{-1}`` instead
of plugging in a huge finite ``u``, which would lose precision.

Measuring mode B with outcome ``k`` (a real 2-vector; the complex outcome
``alpha = (q + i p)/2`` is supported via conversion helpers):

* outcome distribution: Gaussian with mean ``xB`` and covariance ``B + V0``,
* conditional mean of A: ``xA - C (B + V0)^{-1} (xB - k)``,
* conditional CM of A:   ``A - C (B + V0)^{-1} C^T`` (outcome-independent).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalFailure
from .symplectic import block_a, block_b, block_c, rotation_matrix

_SEED_DET_TOL = 1e-9


@dataclass(frozen=True)
class GaussianMeasurement:
    """Rank-one Gaussian POVM with pure seed CM ``R(phi) diag(u, 1/u) R(phi)^T``.

    ``u == 0`` and ``u == inf`` tag the two homodyne limits; any finite
    ``u > 0`` is an ordinary squeezed-state quasi-projection, with ``u == 1``
    being heterodyne detection.  ``phi`` is reduced modulo pi.
    """

    u: float
    phi: float = 0.0

    def __post_init__(self):
        u = float(self.u)
        if math.isnan(u) or u < 0.0:
            raise DomainError(f"measurement squeezing u must be >= 0, got {self.u}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "phi", float(self.phi) % math.pi)

    @classmethod
    def heterodyne(cls) -> "GaussianMeasurement":
        return cls(1.0)

    @classmethod
    def homodyne_q(cls, phi: float = 0.0) -> "GaussianMeasurement":
        """Sharp measurement of the ``phi``-rotated q quadrature (u -> 0)."""
        return cls(0.0, phi)

    @classmethod
    def homodyne_p(cls, phi: float = 0.0) -> "GaussianMeasurement":
        """Sharp measurement of the ``phi``-rotated p quadrature (u -> inf)."""
        return cls(math.inf, phi)

    @classmethod
    def from_seed_cm(cls, V0: np.ndarray, tol: float = _SEED_DET_TOL) -> "GaussianMeasurement":
        """Recover (u, phi) from a seed CM; rejects mixed (det != 1) seeds."""
        V0 = np.asarray(V0, float)
        if V0.shape != (2, 2) or abs(V0[0, 1] - V0[1, 0]) > 1e-12:
            raise DomainError("measurement seed must be a symmetric 2x2 CM")
        det = float(V0[0, 0] * V0[1, 1] - V0[0, 1] * V0[1, 0])
        if abs(det - 1.0) > tol:
            raise DomainError(
                f"measurement seed must be pure (det V0 = 1), got det = {det}; "
                "mixed seeds are not supported"
            )
        # eigendecomposition of a symmetric 2x2: eigenvalues u, 1/u
        half_diff = 0.5 * (V0[0, 0] - V0[1, 1])
        mean = 0.5 * (V0[0, 0] + V0[1, 1])
        rad = math.hypot(half_diff, V0[0, 1])
        u = mean + rad
        phi = 0.5 * math.atan2(2.0 * V0[0, 1], V0[0, 0] - V0[1, 1])
        return cls(u, phi)

    @property
    def is_heterodyne(self) -> bool:
        return self.u == 1.0

    @property
    def is_homodyne(self) -> bool:
        return self.u == 0.0 or math.isinf(self.u)

    @property
    def kind(self) -> str:
        if self.u == 0.0:
            return "homodyne_q"
        if math.isinf(self.u):
            return "homodyne_p"
        if self.u == 1.0:
            return "heterodyne"
        return "squeezed"

    def seed_cm(self) -> np.ndarray:
        """Seed CM for finite u; the homodyne limits have no finite seed."""
        if self.is_homodyne:
            raise DomainError("homodyne limits have no finite seed CM")
        R = rotation_matrix(self.phi)
        return R @ np.diag([self.u, 1.0 / self.u]) @ R.T


def inverse_b_plus_seed(B: np.ndarray, m: GaussianMeasurement) -> np.ndarray:
    """``(B + V0)^{-1}``, with the homodyne limits handled analytically.

    For ``u -> 0`` the inverse collapses onto the measured quadrature
    direction: in the frame rotated by ``phi`` it becomes
    ``diag(1/B'[0,0], 0)``; for ``u -> inf`` it is ``diag(0, 1/B'[1,1])``.
    """
    B = np.asarray(B, float)
    if m.is_homodyne:
        R = rotation_matrix(m.phi)
        Bp = R.T @ B @ R
        idx = 0 if m.u == 0.0 else 1
        diag = Bp[idx, idx]
        if diag <= 0.0:
            raise NumericalFailure("B block is not positive definite")
        lim = np.zeros((2, 2))
        lim[idx, idx] = 1.0 / diag
        return R @ lim @ R.T
    M = B + m.seed_cm()
    det = float(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    if det <= 0.0 or not math.isfinite(det):
        raise NumericalFailure("B + V0 is singular; cannot condition")
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]]) / det


@dataclass(frozen=True)
class ConditionalState:
    """Single-mode Gaussian state: mean 2-vector plus 2x2 CM."""

    mean: np.ndarray
    cm: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, float).reshape(2))
        object.__setattr__(self, "cm", np.asarray(self.cm, float).reshape(2, 2))

    def purity_parameter(self) -> float:
        """sqrt(det cm); equals 1 for pure states."""
        cm = self.cm
        return math.sqrt(max(cm[0, 0] * cm[1, 1] - cm[0, 1] * cm[1, 0], 0.0))


@dataclass(frozen=True)
class OutcomeDistribution:
    """Gaussian law of the measurement outcomes: mean ``xB``, cov ``B + V0``."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, float).reshape(2))
        object.__setattr__(self, "cov", np.asarray(self.cov, float).reshape(2, 2))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw ``n`` outcomes using a caller-supplied seeded generator."""
        return rng.multivariate_normal(self.mean, self.cov, size=n)


def _split_mean(mean_AB) -> tuple[np.ndarray, np.ndarray]:
    if mean_AB is None:
        return np.zeros(2), np.zeros(2)
    mean_AB = np.asarray(mean_AB, float).reshape(4)
    return mean_AB[:2], mean_AB[2:]


def outcome_distribution(
    V: np.ndarray, mean_AB, m: GaussianMeasurement
) -> OutcomeDistribution:
    """Distribution of outcomes when mode B is measured with ``m``.

    Undefined in the homodyne limits, where the outcome density does not
    converge to a two-dimensional Gaussian.
    """
    if m.is_homodyne:
        raise DomainError(
            "outcome distribution is not normalizable in the homodyne limit"
        )
    _, mean_b = _split_mean(mean_AB)
    return OutcomeDistribution(mean_b, block_b(V) + m.seed_cm())


def conditional_mean_map(V: np.ndarray, m: GaussianMeasurement) -> np.ndarray:
    """Linear map L = C (B + V0)^{-1} sending (k - xB) to the mean shift of A."""
    return block_c(V) @ inverse_b_plus_seed(block_b(V), m)


def conditional_cm(V: np.ndarray, m: GaussianMeasurement) -> np.ndarray:
    """Outcome-independent conditional CM of mode A: ``A - C (B+V0)^{-1} C^T``."""
    C = block_c(V)
    return block_a(V) - C @ inverse_b_plus_seed(block_b(V), m) @ C.T


def condition_on_outcome(
    V: np.ndarray, mean_AB, m: GaussianMeasurement, k
) -> ConditionalState:
    """State of mode A after measuring mode B with outcome ``k``."""
    mean_a, mean_b = _split_mean(mean_AB)
    k = np.asarray(k, float).reshape(2)
    L = conditional_mean_map(V, m)
    C = block_c(V)
    mean = mean_a + L @ (k - mean_b)
    cm = block_a(V) - L @ C.T
    return ConditionalState(mean, cm)


def _swap_modes(V: np.ndarray) -> np.ndarray:
    perm = [2, 3, 0, 1]
    return np.asarray(V, float)[np.ix_(perm, perm)]


def conditioning_on_mode_A(
    V: np.ndarray, mean_AB, m: GaussianMeasurement, k
) -> ConditionalState:
    """State of mode B after measuring mode A (A and B roles permuted)."""
    mean_a, mean_b = _split_mean(mean_AB)
    swapped_mean = np.concatenate([mean_b, mean_a])
    return condition_on_outcome(_swap_modes(V), swapped_mean, m, k)


def epr_squeezing_range(mu: float, u: float) -> float:
    """Squeezing prepared on the far mode of an EPR state of variance ``mu``.

    Measuring one EPR mode with seed squeezing ``u`` projects the other onto
    a pure squeezed state with CM diag(r, 1/r), ``r = (1 + u*mu)/(u + mu)``.
    The homodyne endpoints give exactly ``r = 1/mu`` (u = 0) and ``r = mu``
    (u = inf); heterodyne gives ``r = 1`` (coherent states).
    """
    if mu < 1.0:
        raise DomainError(f"EPR variance must be >= 1, got {mu}")
    if math.isnan(u) or u < 0.0:
        raise DomainError(f"measurement squeezing u must be >= 0, got {u}")
    if u == 0.0:
        return 1.0 / mu
    if math.isinf(u):
        return mu
    return (1.0 + u * mu) / (u + mu)


def gaussian_overlap(state1: ConditionalState, state2: ConditionalState) -> float:
    """Trace overlap of two single-mode Gaussian states.

    ``2 * exp(-(d^T (V1+V2)^{-1} d) / 2) / sqrt(det(V1+V2))`` with
    ``d`` the mean difference.  Equals 1 iff the states are identical and
    pure.
    """
    M = state1.cm + state2.cm
    det = float(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    if det <= 0.0:
        raise NumericalFailure("sum of CMs is singular")
    d = state1.mean - state2.mean
    inv = np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]]) / det
    return 2.0 * math.exp(-0.5 * float(d @ inv @ d)) / math.sqrt(det)


def outcome_to_complex(k) -> complex:
    """Real outcome 2-vector (q, p) to the complex amplitude (q + i p)/2."""
    k = np.asarray(k, float).reshape(2)
    return complex(0.5 * k[0], 0.5 * k[1])


def complex_to_outcome(alpha: complex) -> np.ndarray:
    """Complex amplitude back to the real outcome vector (q, p)."""
    return np.array([2.0 * alpha.real, 2.0 * alpha.imag])
