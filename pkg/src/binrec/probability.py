"""Counting and probability behind random-signal recovery: the symmetric
binomial CDF and its approximations, the orthant count of a generic subspace,
and the Monte Carlo recovery experiment that ties them to the certificate LP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .certificates import LPFailure, max_margin_lp, real_dual_basis, CERT_TOL
from .fourier import make_mask
from .grids import GridGeometry

__all__ = [
    "DegenerateBasis",
    "RecoveryExperiment",
    "binomial_cdf_half",
    "binomial_cdf_normal_approx",
    "hoeffding_tail",
    "orthant_count_formula",
    "orthant_count_oracle",
    "montecarlo_recovery",
    "binomial_ci",
]


class DegenerateBasis(ValueError):
    """The basis is not in general position (some r columns are dependent)."""


def binomial_cdf_half(r: int, n: int) -> float:
    """Exact sum_{i<=r} C(n,i) / 2^n via integer binomials."""
    if not 0 <= r <= n:
        raise ValueError(f"need 0 <= r <= n, got r={r}, n={n}")
    total = sum(math.comb(n, i) for i in range(r + 1))
    return total / 2**n


def binomial_cdf_normal_approx(r: int, n: int) -> float:
    """Normal approximation Phi((2r - n) / sqrt(n))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    z = (2 * r - n) / math.sqrt(n)
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def hoeffding_tail(r: int, n: int) -> tuple[float, float]:
    """(lower, upper) bounds on the symmetric binomial CDF.

    Returns (0, exp(-(2r-n)^2/(2n))/2) for r < n/2 and the mirrored lower
    bound for r > n/2; (0, 1) at r = n/2.  The 1/2 prefactor follows the
    usual asymptotic statement and can be slightly optimistic for very small
    n (e.g. r=0, n=2); the plain Hoeffding bound without it always holds.
    """
    if not 0 <= r <= n:
        raise ValueError(f"need 0 <= r <= n, got r={r}, n={n}")
    if 2 * r == n:
        return 0.0, 1.0
    bound = 0.5 * math.exp(-((2 * r - n) ** 2) / (2.0 * n))
    if 2 * r < n:
        return 0.0, bound
    return 1.0 - bound, 1.0


def orthant_count_formula(r: int, n: int) -> int:
    """Orthants met by a generic r-dimensional subspace: 2 sum_{i<r} C(n-1,i)."""
    if not 1 <= r <= n:
        raise ValueError(f"need 1 <= r <= n, got r={r}, n={n}")
    return 2 * sum(math.comb(n - 1, i) for i in range(r))


def _check_general_position(basis: np.ndarray) -> None:
    """All r-subsets of columns must be nonsingular (well away from zero)."""
    r, n = basis.shape
    cols = basis / np.maximum(np.linalg.norm(basis, axis=0, keepdims=True), 1e-300)
    from itertools import combinations

    for subset in combinations(range(n), r):
        if abs(np.linalg.det(cols[:, subset])) < 1e-9:
            raise DegenerateBasis(f"columns {subset} are (near-)dependent")


def orthant_count_oracle(basis: np.ndarray, n_samples: int = 4096, seed: int = 0) -> int:
    """Count sign vectors whose open orthant meets the row space of ``basis``.

    Brute force over all 2^n sign vectors: a pattern counts when an interior
    point exists, i.e. the system sigma_i (B^T c)_i >= 1 is feasible.  Random
    sampling settles most patterns constructively; the rest go through the
    phase-1 simplex.  Central symmetry halves the enumeration.
    """
    basis = np.atleast_2d(np.asarray(basis, float))
    r, n = basis.shape
    if n > 12:
        raise ValueError("oracle enumerates 2^n patterns; n <= 12 only")
    if not 1 <= r <= n:
        raise ValueError("need 1 <= r <= n")
    _check_general_position(basis)

    rng = np.random.default_rng(seed)
    points = basis.T @ rng.standard_normal((r, n_samples))  # (n, samples)
    signs = points > 0
    # Canonicalize each sampled pattern so its first component is True.
    flipped = np.where(signs[0][:, None], signs.T, ~signs.T)
    feasible = {row.tobytes() for row in flipped}

    bt = basis.T  # (n, r)
    count = 0
    for bits in range(1 << (n - 1)):
        sigma_bool = np.array(
            [True] + [(bits >> i) & 1 == 1 for i in range(n - 1)], dtype=bool
        )
        if sigma_bool.tobytes() in feasible:
            count += 1
            continue
        sigma = np.where(sigma_bool, 1.0, -1.0)
        a_ub = np.hstack([-sigma[:, None] * bt, sigma[:, None] * bt])  # c = c+ - c-
        res_lp = _feasible_interior(a_ub)
        if res_lp:
            count += 1
    return 2 * count


def _feasible_interior(a_ub: np.ndarray) -> bool:
    """Feasibility of a_ub z <= -1, z >= 0 via the package simplex."""
    from .simplex import simplex_solve

    m, ncols = a_ub.shape
    res = simplex_solve(np.zeros(ncols), a_ub=a_ub, b_ub=-np.ones(m))
    return res.status == "optimal"


def binomial_ci(p: float, trials: int, confidence: float = 0.99) -> tuple[float, float]:
    """Central confidence interval for the success *rate* at success prob p."""
    lo, hi = stats.binom.interval(confidence, trials, p)
    return float(lo) / trials, float(hi) / trials


@dataclass(frozen=True)
class RecoveryExperiment:
    """Monte Carlo estimate of the probability that a random binary signal is
    the unique relaxed solution under a random rank-r measurement map."""

    n: int
    r: int
    trials: int
    seed: int
    kind: str
    certified: int
    lp_failures: int
    predicted: float
    ci_low: float
    ci_high: float

    @property
    def empirical(self) -> float:
        return self.certified / self.trials


def montecarlo_recovery(
    n: int, r: int, trials: int, seed: int = 0, kind: str = "gaussian"
) -> RecoveryExperiment:
    """Draw (u0, A) pairs and decide recoverability by the certificate LP.

    kind "gaussian": dense A with iid normal entries (general position a.s.,
    so the expected rate is the r-1 binomial CDF at n-1).  kind
    "partial-fourier-random": random conjugate-closed masks of real rank r;
    general position is not guaranteed, so rates are reported, not asserted.
    """
    if not 1 <= r <= n:
        raise ValueError("need 1 <= r <= n")
    if kind not in ("gaussian", "partial-fourier-random"):
        raise ValueError(f"unknown kind {kind!r}")
    geometry = GridGeometry(1, n) if kind == "partial-fourier-random" else None
    certified = 0
    failures = 0
    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence((seed, trial)))
        bits = rng.integers(0, 2, size=n)
        sigma = np.where(bits == 1, -1.0, 1.0)
        if kind == "gaussian":
            phi = rng.standard_normal((r, n)).T
        else:
            mask_seed = int(rng.integers(0, 2**31))
            mask = make_mask("random", (r, mask_seed), geometry)
            phi, _ = real_dual_basis(mask)
        try:
            t, _, _ = max_margin_lp(phi, sigma)
        except LPFailure:
            failures += 1
            continue
        if t > CERT_TOL:
            certified += 1
    predicted = binomial_cdf_half(r - 1, n - 1)
    lo, hi = binomial_ci(predicted, trials)
    return RecoveryExperiment(
        n=n,
        r=r,
        trials=trials,
        seed=seed,
        kind=kind,
        certified=certified,
        lp_failures=failures,
        predicted=predicted,
        ci_low=lo,
        ci_high=hi,
    )
