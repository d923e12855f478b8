"""Decomposition of two-mode Gaussian states into EPR-plus-local-channel form.

Every squeezed thermal state V(a, b, c, -c) equals an EPR state of variance
``b`` sent through a phase-insensitive channel on mode A, with

    tau = c^2 / (b^2 - 1),    eta = a - tau * b.

The general family adds input/output squeezers around an extended channel
(negative transmissivities allowed).  With ``theta(r) = sqrt(eta*r + |tau|*b)``
its normal form is

    a  = theta(r) * theta(1/r),
    c  = +- sqrt(|tau| (b^2 - 1) theta(1/r) / theta(r)),
    cp = -+ sign(tau) sqrt(|tau| (b^2 - 1) theta(r) / theta(1/r)),

for ``r in [1/b, b]``; the overall sign is set by the EPR correlation type.
Useful identities: ``c * cp = -sign(tau) |tau| (b^2 - 1)`` and
``|c/cp| = theta(1/r)/theta(r) = a / theta(r)^2``, which is strictly
decreasing in ``r`` whenever ``eta > 0``.

Holding ``a`` fixed inverts to

    eta = [sqrt(4 a^2 r^2 + (r^2-1)^2 tau^2 b^2) - (1+r^2) |tau| b] / (2r),

which is nonnegative iff ``|tau| <= a/b``, and the physicality constraint
``eta >= |1 - tau|`` confines ``tau`` to an interval [tau_min, tau_max]
implemented here in a cancellation-free rationalized form.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import GaussianChannelParams
from .errors import (
    DomainError,
    NotSqueezedThermalForm,
    NumericalFailure,
    OutOfFamily,
)
from .symplectic import BONA_FIDE_TOL, NormalFormCM, bona_fide_normal_form_mask

_R_DOMAIN_TOL = 1e-12
# Points per independently seeded sampler chunk; fixed so that output is
# byte-identical regardless of how many threads compute the chunks.
_CHUNK = 1 << 16


@dataclass(frozen=True)
class FamilyParams:
    """Witness of an EPR-plus-channel decomposition.

    ``b`` is the EPR variance (equal to the B-block variance of the output),
    ``r`` the input anti-squeezing, ``(tau, eta)`` the extended channel and
    ``sign`` the EPR correlation type.  The output squeezing ``xi`` is
    derived, never stored.
    """

    b: float
    r: float
    tau: float
    eta: float
    sign: int = 1

    def __post_init__(self):
        if self.b < 1.0 - 1e-12:
            raise DomainError(f"EPR variance must be >= 1, got {self.b}")
        lo, hi = 1.0 / self.b, self.b
        if not (lo - _R_DOMAIN_TOL <= self.r <= hi + _R_DOMAIN_TOL):
            raise DomainError(
                f"input squeezing r = {self.r} outside [1/b, b] = [{lo}, {hi}]"
            )
        if self.sign not in (1, -1):
            raise DomainError(f"EPR sign must be +1 or -1, got {self.sign}")
        self.channel  # validates eta >= |1 - tau|

    @property
    def channel(self) -> GaussianChannelParams:
        return GaussianChannelParams(self.tau, self.eta)

    @property
    def xi(self) -> float:
        """Output squeezing that brings the state back to normal form."""
        return self.r * _theta(1.0 / self.r, self.tau, self.eta, self.b) / _theta(
            self.r, self.tau, self.eta, self.b
        )


def _theta(r: float, tau: float, eta: float, b: float) -> float:
    return math.sqrt(eta * r + abs(tau) * b)


def squeezed_thermal_bound(a: float, b: float) -> float:
    """Largest c^2 compatible with a squeezed thermal state V(a, b, c, -c)."""
    return a * b - 1.0 - abs(a - b)


def decompose_squeezed_thermal(a: float, b: float, c: float) -> GaussianChannelParams:
    """Channel (tau, eta) realizing V(a, b, c, -c) from an EPR state of variance b.

    Inverts ``a = tau*b + eta``, ``c^2 = tau*(b^2 - 1)``.  The EPR
    correlation sign follows sign(c) and is not part of the channel.
    """
    if a < 1.0 - 1e-12 or b < 1.0 - 1e-12:
        raise NotSqueezedThermalForm(f"local variances must be >= 1, got a={a}, b={b}")
    if c == 0.0:
        return GaussianChannelParams(0.0, a)
    if b <= 1.0:
        raise DomainError("b = 1 admits no correlations (c must vanish)")
    c2 = c * c
    bound = squeezed_thermal_bound(a, b)
    if c2 > bound + 1e-9 * max(1.0, bound):
        raise NotSqueezedThermalForm(
            f"c^2 = {c2:.12g} exceeds the physical bound ab - 1 - |a - b| = {bound:.12g}"
        )
    tau = c2 / (b * b - 1.0)
    eta = a - tau * b
    # The bound check above tolerates boundary states that pass the
    # uncertainty validator only within its tolerance; their noise deficit is
    # slack-level, so snap onto the quantum-limited line instead of failing.
    floor = abs(1.0 - tau)
    if eta < floor:
        if eta < floor - 1e-6 * max(1.0, a):
            raise NotSqueezedThermalForm(
                f"state requires unphysical channel noise eta = {eta:.12g} < |1-tau| = {floor:.12g}"
            )
        eta = floor
    return GaussianChannelParams(tau, eta)


def family_cm_from_params(fp: FamilyParams) -> NormalFormCM:
    """Normal form (a, b, c, cp) generated by a decomposition witness.

    Works with theta(r)^2 throughout so that pure outputs (eta = 0, where
    theta(r) = theta(1/r) identically) stay exactly degenerate instead of
    splitting by square-root rounding.
    """
    t2_r = fp.eta * fp.r + abs(fp.tau) * fp.b
    t2_ri = fp.eta / fp.r + abs(fp.tau) * fp.b
    if t2_r <= 0.0 or t2_ri <= 0.0:
        raise NumericalFailure("degenerate channel: theta(r) vanished")
    a = math.sqrt(t2_r * t2_ri)
    amp = abs(fp.tau) * (fp.b * fp.b - 1.0)
    ratio = t2_ri / t2_r
    c = fp.sign * math.sqrt(amp * math.sqrt(ratio))
    sign_tau = 1.0 if fp.tau >= 0.0 else -1.0
    cp = -fp.sign * sign_tau * math.sqrt(amp / math.sqrt(ratio))
    return NormalFormCM(a=a, b=fp.b, c=c, cp=cp)


def eta_from_a(a: float, r: float, tau: float, b: float) -> float:
    """Channel noise that makes the family produce local variance ``a``.

    Solves ``theta(r) * theta(1/r) = a`` for eta; raises DomainError when the
    requested |tau| > a/b would force negative noise.
    """
    if a < 1.0 - 1e-12 or b < 1.0 - 1e-12:
        raise DomainError(f"local variances must be >= 1, got a={a}, b={b}")
    _check_r(r, b)
    tb = abs(tau) * b
    root = math.sqrt(4.0 * a * a * r * r + (r * r - 1.0) ** 2 * tau * tau * b * b)
    eta = (root - (1.0 + r * r) * tb) / (2.0 * r)
    if eta < 0.0:
        if eta < -1e-12 * max(1.0, a):
            raise DomainError(
                f"|tau| = {abs(tau)} exceeds a/b = {a / b}; no nonnegative noise exists"
            )
        eta = 0.0
    return eta


def _check_r(r: float, b: float) -> None:
    lo, hi = 1.0 / b, b
    if not (lo - _R_DOMAIN_TOL <= r <= hi + _R_DOMAIN_TOL):
        raise DomainError(f"r = {r} outside [1/b, b] = [{lo}, {hi}]")


def tau_bounds(a: float, b: float, r: float) -> tuple[float, float]:
    """Transmissivity interval on which ``eta_from_a(a, r, tau, b) >= |1-tau|``.

    Rationalized closed forms (no subtractive cancellation at the domain
    endpoints r = 1/b, r = b, where the textbook expressions become 0/0):

        tau_min = -2 r (a^2 - 1) / (p+ + sqrt(q + 4 a^2 r g+)),
        tau_max =  2 r (a^2 - 1) / (p- + sqrt(q - 4 a^2 r g-))   for a <= b,
        tau_max = (p+ + sqrt(q + 4 a^2 r g+)) / (2 g+)           for a >= b,

    with g+- = (r +- b)(r b +- 1), q = (r^2-1)^2 b^2 and
    p+- = b (1 + r^2) +- 2 r.
    """
    if a < 1.0 - 1e-12 or b < 1.0 - 1e-12:
        raise DomainError(f"local variances must be >= 1, got a={a}, b={b}")
    _check_r(r, b)
    if b <= 1.0 and a <= 1.0:
        # both modes at the vacuum limit: product states only
        return (0.0, 0.0)
    q = (r * r - 1.0) ** 2 * b * b
    g_plus = (r + b) * (r * b + 1.0)
    p_plus = b * (1.0 + r * r) + 2.0 * r
    root_plus = math.sqrt(q + 4.0 * a * a * r * g_plus)
    tau_min = -2.0 * r * (a * a - 1.0) / (p_plus + root_plus)
    if a <= b:
        g_minus = (r - b) * (r * b - 1.0)
        p_minus = b * (1.0 + r * r) - 2.0 * r
        rad = q - 4.0 * a * a * r * g_minus
        if rad < 0.0:
            if rad < -1e-9 * max(1.0, q):
                raise NumericalFailure(
                    f"negative radicand {rad} in tau_max; r outside its domain?"
                )
            rad = 0.0
        tau_max = 2.0 * r * (a * a - 1.0) / (p_minus + math.sqrt(rad))
    else:
        tau_max = (p_plus + root_plus) / (2.0 * g_plus)
    return (tau_min, tau_max)


def _tau_bounds_arrays(a: float, b: float, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized tau_bounds for fixed (a, b); assumes b > 1 or a > 1."""
    r = np.asarray(r, float)
    q = (r * r - 1.0) ** 2 * b * b
    g_plus = (r + b) * (r * b + 1.0)
    p_plus = b * (1.0 + r * r) + 2.0 * r
    root_plus = np.sqrt(q + 4.0 * a * a * r * g_plus)
    tau_min = -2.0 * r * (a * a - 1.0) / (p_plus + root_plus)
    if a <= b:
        g_minus = (r - b) * (r * b - 1.0)
        p_minus = b * (1.0 + r * r) - 2.0 * r
        rad = np.maximum(q - 4.0 * a * a * r * g_minus, 0.0)
        tau_max = 2.0 * r * (a * a - 1.0) / (p_minus + np.sqrt(rad))
    else:
        tau_max = (p_plus + root_plus) / (2.0 * g_plus)
    return tau_min, tau_max


@dataclass(frozen=True)
class SamplePoint:
    """One sampled correlation pair, with its decomposition witness."""

    c: float
    cp: float
    member: bool = True
    params: FamilyParams | None = None


class FamilySample:
    """Columnar batch of sampled family states at fixed (a, b).

    Behaves as a sequence of :class:`SamplePoint`; bulk consumers should use
    the column arrays directly.
    """

    def __init__(self, a, b, n, seed, c, cp, r, tau, eta, sign, redraws):
        self.a = float(a)
        self.b = float(b)
        self.n = int(n)
        self.seed = int(seed)
        self.c = c
        self.cp = cp
        self.r = r
        self.tau = tau
        self.eta = eta
        self.sign = sign
        self.redraws = int(redraws)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> SamplePoint:
        params = FamilyParams(
            b=self.b,
            r=float(self.r[i]),
            tau=float(self.tau[i]),
            eta=float(self.eta[i]),
            sign=int(self.sign[i]),
        )
        return SamplePoint(c=float(self.c[i]), cp=float(self.cp[i]), params=params)

    def __iter__(self):
        return (self[i] for i in range(self.n))


def _sample_chunk(a: float, b: float, n: int, seed: int, chunk_index: int):
    """Draw one deterministic chunk of family points.

    Each chunk derives its own stream from (seed, chunk_index), so the
    assembled output does not depend on how chunks are scheduled.
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, chunk_index))))
    lo, hi = 1.0 / b, b
    r = np.empty(n)
    tau = np.empty(n)
    sign = np.empty(n)
    pending = np.arange(n)
    redraws = 0
    while pending.size:
        m = pending.size
        r_try = rng.uniform(lo, hi, m)
        t_lo, t_hi = _tau_bounds_arrays(a, b, r_try)
        tau_try = t_lo + (t_hi - t_lo) * rng.uniform(0.0, 1.0, m)
        sign_try = np.where(rng.uniform(0.0, 1.0, m) < 0.5, 1.0, -1.0)
        ok = np.isfinite(r_try) & np.isfinite(tau_try)
        r[pending[ok]] = r_try[ok]
        tau[pending[ok]] = tau_try[ok]
        sign[pending[ok]] = sign_try[ok]
        redraws += int(m - ok.sum())
        pending = pending[~ok]

    tb = np.abs(tau) * b
    root = np.sqrt(4.0 * a * a * r * r + (r * r - 1.0) ** 2 * tau * tau * b * b)
    eta = np.maximum((root - (1.0 + r * r) * tb) / (2.0 * r), 0.0)
    th_r = np.sqrt(eta * r + tb)
    th_ri = np.sqrt(eta / r + tb)
    amp = np.abs(tau) * (b * b - 1.0)
    c = sign * np.sqrt(amp * th_ri / th_r)
    cp = -sign * np.sign(np.where(tau >= 0.0, 1.0, -1.0)) * np.sqrt(amp * th_r / th_ri)
    return c, cp, r, tau, eta, sign, redraws


def sample_family(
    a: float, b: float, n: int, seed: int, threads: int = 1
) -> FamilySample:
    """Sample ``n`` family states at fixed (a, b).

    Per point: r uniform on [1/b, b], tau uniform on [tau_min, tau_max] at
    that r, noise from :func:`eta_from_a`, and a fair EPR-sign coin, all from
    a counter-based stream keyed on (seed, chunk).  Output is reproducible
    for a fixed seed, independent of ``threads``.
    """
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    if a < 1.0 - 1e-12 or b < 1.0 - 1e-12:
        raise DomainError(f"local variances must be >= 1, got a={a}, b={b}")
    if b <= 1.0 and a <= 1.0:
        # no correlations possible; emit the product point deterministically
        zeros = np.zeros(n)
        return FamilySample(a, b, n, seed, zeros, zeros, np.ones(n),
                            zeros, np.full(n, a), np.ones(n), 0)
    sizes = [(i, min(_CHUNK, n - i * _CHUNK)) for i in range((n + _CHUNK - 1) // _CHUNK)]
    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda s: _sample_chunk(a, b, s[1], seed, s[0]), sizes))
    else:
        chunks = [_sample_chunk(a, b, m, seed, i) for i, m in sizes]
    cols = [np.concatenate([ch[j] for ch in chunks]) for j in range(6)]
    redraws = sum(ch[6] for ch in chunks)
    return FamilySample(a, b, n, seed, *cols, redraws)


def correlation_half_width(a: float, b: float) -> float:
    """Half-width of the bounding box of the physical (c, cp) region."""
    return math.sqrt(max(squeezed_thermal_bound(a, b), 0.0))


def occupancy_grid(
    sample: FamilySample, bins: int = 200, tol: float = BONA_FIDE_TOL
) -> dict:
    """Bin a sample onto the (c, cp) plane and measure region coverage.

    The grid spans the square bounding box of the physical region.  The
    coverage fraction is (cells holding at least one sample) / (cells whose
    center is a bona fide state).
    """
    a, b = sample.a, sample.b
    half = correlation_half_width(a, b)
    if half <= 0.0:
        grid = np.zeros((bins, bins), dtype=int)
        return {
            "a": a, "b": b, "n": sample.n, "seed": sample.seed, "bins": bins,
            "extent": [0.0, 0.0], "redraws": sample.redraws,
            "physical_cells": 0, "occupied_physical_cells": 0,
            "coverage_fraction": 0.0, "grid": grid,
        }
    width = 2.0 * half / bins
    idx_c = np.clip(((sample.c + half) / width).astype(int), 0, bins - 1)
    idx_cp = np.clip(((sample.cp + half) / width).astype(int), 0, bins - 1)
    grid = np.zeros((bins, bins), dtype=np.int64)
    np.add.at(grid, (idx_c, idx_cp), 1)

    centers = -half + width * (np.arange(bins) + 0.5)
    cc, pp = np.meshgrid(centers, centers, indexing="ij")
    physical = bona_fide_normal_form_mask(a, b, cc, pp, tol=tol)
    occupied = (grid > 0) & physical
    n_phys = int(physical.sum())
    n_occ = int(occupied.sum())
    return {
        "a": a, "b": b, "n": sample.n, "seed": sample.seed, "bins": bins,
        "extent": [-half, half], "redraws": sample.redraws,
        "physical_cells": n_phys, "occupied_physical_cells": n_occ,
        "coverage_fraction": (n_occ / n_phys) if n_phys else 0.0,
        "grid": grid,
    }


def membership(nf: NormalFormCM, tol: float = 1e-9) -> FamilyParams:
    """Search for a decomposition witness of a normal-form state.

    The EPR variance is pinned to ``b`` (the channel leaves mode B alone),
    |tau| follows from ``|c*cp| = |tau|(b^2-1)`` and its sign from
    ``sign(c*cp)``; the remaining unknown r solves the monotone equation
    ``|c/cp| = a/theta(r)^2`` by bisection on [1/b, b].  Raises OutOfFamily
    when no witness reproduces (a, c, cp) to within ``tol`` (relative to a).

    States on the axes (exactly one of c, cp zero) are only reached in the
    infinite-entanglement limit and are reported OutOfFamily.
    """
    a, b, c, cp = nf.a, nf.b, nf.c, nf.cp
    if not bool(bona_fide_normal_form_mask(a, b, c, cp)):
        raise DomainError(f"V({a}, {b}, {c}, {cp}) is not bona fide")
    scale = max(1.0, abs(c), abs(cp))
    if abs(c) <= 1e-12 * scale and abs(cp) <= 1e-12 * scale:
        return FamilyParams(b=b, r=1.0, tau=0.0, eta=a, sign=1)
    if abs(c) <= 1e-12 * scale or abs(cp) <= 1e-12 * scale:
        raise OutOfFamily(
            "axis states (c*cp = 0 with correlations) have no finite-b decomposition"
        )
    sign = 1 if c > 0 else -1
    if abs(cp + c) <= 1e-12 * scale:
        # squeezed thermal: r = 1, nonnegative transmissivity
        channel = decompose_squeezed_thermal(a, b, abs(c))
        return FamilyParams(b=b, r=1.0, tau=channel.tau, eta=channel.eta, sign=sign)

    abs_tau = abs(c * cp) / (b * b - 1.0)
    tau = abs_tau if c * cp < 0 else -abs_tau
    if abs_tau > a / b + 1e-12:
        raise OutOfFamily(
            f"|c*cp| = {abs(c * cp):.12g} needs |tau| = {abs_tau:.12g} > a/b = {a / b:.12g}"
        )
    rho = abs(c / cp)

    def ratio(r: float) -> float:
        eta = eta_from_a(a, r, tau, b)
        return a / (eta * r + abs_tau * b)

    lo, hi = 1.0 / b, b
    if abs(rho - 1.0) <= 1e-12:
        r = 1.0
    else:
        f_lo, f_hi = ratio(lo), ratio(hi)
        slack = 1e-9 * rho
        if rho > f_lo + slack or rho < f_hi - slack:
            raise OutOfFamily(
                f"|c/cp| = {rho:.12g} outside the reachable ratio range "
                f"[{f_hi:.12g}, {f_lo:.12g}] at b = {b:.12g}"
            )
        rho_c = min(max(rho, f_hi), f_lo)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if ratio(mid) > rho_c:
                lo = mid
            else:
                hi = mid
        r = 0.5 * (lo + hi)

    eta = eta_from_a(a, r, tau, b)
    floor = abs(1.0 - tau)
    if eta < floor:
        if eta < floor - 1e-6 * max(1.0, a):
            raise OutOfFamily(
                f"witness requires eta = {eta:.12g} < |1 - tau| = {floor:.12g}"
            )
        # snap to the boundary; the forward-error check below is the judge
        eta = floor
    fp = FamilyParams(b=b, r=r, tau=tau, eta=eta, sign=sign)
    out = family_cm_from_params(fp)
    err = max(abs(out.a - a), abs(out.c - c), abs(out.cp - cp))
    if err > tol * max(1.0, a):
        raise OutOfFamily(
            f"best candidate misses the target by {err:.3e} (tolerance {tol:.1e})"
        )
    return fp
