"""Interval-null overlap p-values and the screening rule built on them.

For an uncertainty interval I and an interval null H0, the overlap fraction

    p = ( |I ∩ H0| / |I| ) * max{ |I| / (2 |H0|), 1 }

measures how compatible the estimate is with the null region; it is 0 exactly
when the intervals are disjoint and 1 when I sits inside H0 (after the small-
sample correction factor).  Screening keeps the variables whose p is exactly 0,
i.e. whose confidence interval clears the null region entirely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import EmptyCandidateSet, ZeroLengthInterval
from .linalg import OlsFit

# Fixed two-sided 97.5% normal quantile used by the screening intervals.
Z_CRIT = 1.96


@dataclass(frozen=True)
class Interval:
    """A closed interval [lo, hi] with lo <= hi, both finite."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ValueError(f"interval endpoints must be finite, got [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def overlap_length(self, other: "Interval") -> float:
        return max(0.0, min(self.hi, other.hi) - max(self.lo, other.lo))


def sgpv_value(interval: Interval, null: Interval) -> float:
    """Overlap p-value of ``interval`` against the null region ``null``.

    Both intervals must have positive length; the result is clamped to [0, 1].

    Raises
    ------
    ZeroLengthInterval
        If either interval has zero length.
    """
    li = interval.length
    lh = null.length
    if li <= 0.0 or lh <= 0.0:
        raise ZeroLengthInterval(
            f"overlap p-value needs positive lengths, got |I|={li}, |H0|={lh}"
        )
    p = (interval.overlap_length(null) / li) * max(li / (2.0 * lh), 1.0)
    return min(max(p, 0.0), 1.0)


def null_bound(
    candidate_fit: OlsFit,
    variant: str = "sebar",
    *,
    n: int | None = None,
    p: int | None = None,
) -> float:
    """Half-width of the null region, computed from the candidate-set fit.

    Variants
    --------
    - ``sebar``          : mean of the candidate-coefficient standard errors
    - ``sebar-loginfl``  : sebar * sqrt(log(n / p))   (needs n, p with n > p)
    - ``sebar-logdefl``  : sebar / sqrt(log(n / p))   (needs n, p with n/p > e)
    - ``const``          : sigma_hat / 12
    - ``zero``           : 0.0 (point null; classical screening)

    Raises
    ------
    EmptyCandidateSet
        If the fit carries no coefficients.
    ValueError
        On an unknown variant or missing/inadmissible n, p for the log variants.
    """
    if candidate_fit.p == 0:
        raise EmptyCandidateSet("null bound needs at least one candidate coefficient")
    sebar = float(candidate_fit.se.mean())
    if variant == "sebar":
        return sebar
    if variant in ("sebar-loginfl", "sebar-logdefl"):
        if n is None or p is None:
            raise ValueError(f"variant {variant!r} needs n and p")
        log_ratio = np.log(n / p)
        if log_ratio <= 0.0:
            raise ValueError(f"variant {variant!r} needs n > p, got n={n}, p={p}")
        factor = float(np.sqrt(log_ratio))
        return sebar * factor if variant == "sebar-loginfl" else sebar / factor
    if variant == "const":
        return float(np.sqrt(candidate_fit.sigma2_hat) / 12.0)
    if variant == "zero":
        return 0.0
    raise ValueError(f"unknown null bound variant {variant!r}")


@dataclass(frozen=True)
class SgpvReport:
    """Per-coefficient screening outcome for one candidate-set fit.

    ``keep`` marks the coefficients whose overlap p-value is exactly 0; the
    equivalent closed form is |beta_hat_k| > z * se_k + bound.
    """

    estimates: NDArray[np.float64]
    ses: NDArray[np.float64]
    intervals: tuple[Interval, ...]
    null: Interval
    p_values: NDArray[np.float64]
    keep: NDArray[np.bool_]


def screen(candidate_fit: OlsFit, bound: float, z: float = Z_CRIT) -> SgpvReport:
    """Score every candidate coefficient against the null region [-bound, bound].

    With ``bound == 0`` the overlap formula is undefined (zero-length null), so
    the point-null limit applies: keep iff the interval excludes 0, with the
    limiting p-value 0 (excluded) or 0.5 (straddles).

    Raises
    ------
    EmptyCandidateSet
        If the fit carries no coefficients.
    ZeroLengthInterval
        If some uncertainty interval has zero length (a zero standard error).
    ValueError
        If bound < 0 or z <= 0.
    """
    if candidate_fit.p == 0:
        raise EmptyCandidateSet("screening needs at least one candidate coefficient")
    if bound < 0.0:
        raise ValueError(f"null bound must be >= 0, got {bound}")
    if z <= 0.0:
        raise ValueError(f"z must be positive, got {z}")

    est = candidate_fit.beta_hat
    ses = candidate_fit.se
    intervals = tuple(
        Interval(float(b - z * s), float(b + z * s)) for b, s in zip(est, ses)
    )
    null = Interval(-bound, bound)

    if bound == 0.0:
        p_vals = np.array(
            [0.0 if (iv.lo > 0.0 or iv.hi < 0.0) else 0.5 for iv in intervals]
        )
    else:
        p_vals = np.array([sgpv_value(iv, null) for iv in intervals])

    return SgpvReport(
        estimates=est.copy(),
        ses=ses.copy(),
        intervals=intervals,
        null=null,
        p_values=p_vals,
        keep=(p_vals == 0.0),
    )
