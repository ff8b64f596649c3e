"""Triangular coefficient tables for the heterozygosity moment expansion.

The table holds the coefficients of m_k = sum_l A(k,l) theta^l, built by
the triangular recursion

    A(k,1) = 2^{k-1} (k-1)! / ((2k-1+theta) ... (k+theta))
    A(k,p) = sum_{l=p-1}^{k-1} w(k,l) A(l,p-1),     p >= 2

with w(k,l) = ((2k+theta)/2k) * 2^k k! Gamma(k+l+theta)
              / (2^l l! Gamma(2k+1+theta)).

theta = 0 gives the limit table (the recursion specializes verbatim).
All entries are kept in log scale; gamma ratios are differences of
log-gamma, never ratios of raw gamma values, since Gamma(2k+1) overflows
doubles near k = 85.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import DomainError
from .lognum import LogNum

__all__ = [
    "CoeffTable",
    "build_coeff_table",
    "build_limit_table",
    "b_term",
    "c_constant",
    "asymptotic_A",
    "c_combined",
    "asymptotic_C",
    "series_kmax",
    "cached_table",
    "cached_limit_table",
    "table_to_csv",
    "table_to_json",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class CoeffTable:
    """Triangular table of log A(k,l), 1 <= l <= k <= kmax.

    theta == 0 marks the limit table.  Entries outside the triangle are
    -inf in the backing array.
    """

    theta: float
    kmax: int
    log_entries: np.ndarray = field(repr=False)

    def log_entry(self, k: int, l: int) -> float:
        if not (1 <= l <= k <= self.kmax):
            raise DomainError(f"index (k={k}, l={l}) outside triangle kmax={self.kmax}")
        return float(self.log_entries[k, l])

    def entry(self, k: int, l: int) -> LogNum:
        return LogNum(self.log_entry(k, l))

    def log_column(self, l: int) -> np.ndarray:
        """log A(k,l) for k = 1..kmax (vector index k; -inf for k < l)."""
        if not (1 <= l <= self.kmax):
            raise DomainError(f"column l={l} outside 1..{self.kmax}")
        return self.log_entries[1:, l]

    @property
    def is_limit(self) -> bool:
        return self.theta == 0.0


def build_coeff_table(theta: float, kmax: int) -> CoeffTable:
    """Build the table of A(k,l)(theta) up to kmax.

    theta = 0 yields the limit coefficients.
    """
    if kmax < 1:
        raise DomainError(f"kmax must be >= 1, got {kmax}")
    if not (0.0 <= theta <= 1.0):
        raise DomainError(f"theta must lie in [0, 1], got {theta}")

    k = np.arange(1, kmax + 1, dtype=float)
    log_entries = np.full((kmax + 1, kmax + 1), -np.inf)
    # first column: 2^{k-1}(k-1)! Gamma(k+theta)/Gamma(2k+theta)
    log_entries[1:, 1] = (
        (k - 1.0) * _LN2 + gammaln(k) + gammaln(k + theta) - gammaln(2.0 * k + theta)
    )
    if kmax == 1:
        return CoeffTable(theta=float(theta), kmax=kmax, log_entries=log_entries)

    # recursion weights w(k,l), independent of p; valid for l <= k-1
    K = k[:, None]
    L = k[None, :]
    logw = (
        np.log((2.0 * K + theta) / (2.0 * K))
        + K * _LN2
        + gammaln(K + 1.0)
        - L * _LN2
        - gammaln(L + 1.0)
        + gammaln(K + L + theta)
        - gammaln(2.0 * K + 1.0 + theta)
    )
    logw[L > K - 1] = -np.inf

    for p in range(2, kmax + 1):
        prev = log_entries[1:, p - 1]  # -inf below l = p-1, so the sum self-restricts
        with np.errstate(invalid="ignore"):
            col = logsumexp(logw + prev[None, :], axis=1)
        col[: p - 1] = -np.inf  # entries with k < p are outside the triangle
        log_entries[1:, p] = col

    log_entries.setflags(write=False)
    return CoeffTable(theta=float(theta), kmax=kmax, log_entries=log_entries)


def build_limit_table(kmax: int) -> CoeffTable:
    """Table of the theta-free coefficients A(k,l) (theta = 0 tag)."""
    if kmax < 1:
        raise DomainError(f"kmax must be >= 1, got {kmax}")
    return build_coeff_table(0.0, kmax)


def b_term(k: int, l: int) -> LogNum:
    """B(k,l) = 2^k k! Gamma(k+l) / (2^l l! Gamma(2k+1)), 1 <= l <= k-1."""
    if not (1 <= l <= k - 1):
        raise DomainError(f"b_term needs 1 <= l <= k-1, got (k={k}, l={l})")
    log = (
        k * _LN2
        + gammaln(k + 1.0)
        + gammaln(k + l)
        - l * _LN2
        - gammaln(l + 1.0)
        - gammaln(2.0 * k + 1.0)
    )
    return LogNum(log)


def c_constant(p: int) -> float:
    """C_1 = sqrt(pi); C_{p+1} = C_p sqrt(pi) ((p+2)/p)^{p/2}."""
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    c = math.sqrt(math.pi)
    for q in range(1, p):
        c *= math.sqrt(math.pi) * ((q + 2.0) / q) ** (q / 2.0)
    return c


def asymptotic_A(k: int, p: int) -> LogNum:
    """Large-k approximation C_p k^{-p/2} (p/(p+1))^k.

    Evaluated verbatim at any k >= p; accuracy is only claimed for large k.
    """
    if not (1 <= p <= k):
        raise DomainError(f"need 1 <= p <= k, got (k={k}, p={p})")
    log = (
        math.log(c_constant(p))
        - 0.5 * p * math.log(k)
        + k * math.log(p / (p + 1.0))
    )
    return LogNum(log)


def series_kmax(x: float) -> int:
    """Table size that keeps the truncated Poisson-weight tail below the
    series tolerance even against the crude constant-cap tail bound.

    The series sum_k (x^k/k!) a_k peaks near k = x, but with a_k decaying
    like 2^-k the total is only ~e^{x/2}, so the relative tail check needs
    the cut past ~2.2 x (where x^K/K! drops below e^{x/2} * 1e-13).
    """
    return int(math.ceil(2.3 * x + 14.0 * math.sqrt(max(x, 0.0)) + 60.0))


def _bucket(kmax: int) -> int:
    # round up so nearby requests share one cached build
    return ((kmax + 63) // 64) * 64


@lru_cache(maxsize=16)
def _cached_table(theta: float, kmax_bucket: int) -> CoeffTable:
    return build_coeff_table(theta, kmax_bucket)


def cached_table(theta: float, kmax: int) -> CoeffTable:
    """Memoized table build (kmax rounded up to a shared bucket)."""
    return _cached_table(float(theta), _bucket(kmax))


def cached_limit_table(kmax: int) -> CoeffTable:
    return cached_table(0.0, kmax)


def c_combined(k: int, l: int, lam: float, table: CoeffTable | None = None) -> LogNum:
    """sum_{s=0}^{k-l} binom(k,s) ((lam-l)/lam)^s A(k-s,l), in log space.

    The binomial weight carries exponent s (the form consistent with the
    theta^{-(lam-l)} rescaling identity of the series it represents).
    """
    if not (1 <= l <= k):
        raise DomainError(f"need 1 <= l <= k, got (k={k}, l={l})")
    if lam <= l:
        raise DomainError(f"need lam > l, got (lam={lam}, l={l})")
    if table is None:
        table = cached_limit_table(k)
    elif not table.is_limit or table.kmax < k:
        raise DomainError("c_combined needs a limit table with kmax >= k")

    s = np.arange(0, k - l + 1, dtype=float)
    log_binom = gammaln(k + 1.0) - gammaln(s + 1.0) - gammaln(k - s + 1.0)
    log_ratio = s * math.log((lam - l) / lam)
    ks = (k - s).astype(int)
    log_a = table.log_entries[ks, l]
    return LogNum(logsumexp(log_binom + log_ratio + log_a))


def asymptotic_C(k: int, l: int, lam: float) -> LogNum:
    """Large-k approximation of c_combined:

    C_l (1 + (lam-l)(l+1)/(lam l))^{l/2} k^{-l/2} ((lam-l)/lam + l/(l+1))^k.
    """
    if not (1 <= l <= k):
        raise DomainError(f"need 1 <= l <= k, got (k={k}, l={l})")
    if lam <= l:
        raise DomainError(f"need lam > l, got (lam={lam}, l={l})")
    base = (lam - l) / lam + l / (l + 1.0)
    log = (
        math.log(c_constant(l))
        + 0.5 * l * math.log1p((lam - l) * (l + 1.0) / (lam * l))
        - 0.5 * l * math.log(k)
        + k * math.log(base)
    )
    return LogNum(log)


def _linear_repr(log_value: float) -> str:
    if log_value == -np.inf:
        return "0"
    if abs(log_value) < 700.0:
        return f"{math.exp(log_value):.17g}"
    # value not representable in linear scale: emit scientific notation
    # from the log representation
    log10 = log_value / math.log(10.0)
    exp10 = math.floor(log10)
    mantissa = 10.0 ** (log10 - exp10)
    return f"{mantissa:.17g}e{exp10:+d}"


def table_to_csv(table: CoeffTable, fp) -> None:
    """Write the triangle as rows k,l,A."""
    writer = csv.writer(fp)
    writer.writerow(["k", "l", "A"])
    for k in range(1, table.kmax + 1):
        for l in range(1, k + 1):
            writer.writerow([k, l, _linear_repr(table.log_entries[k, l])])


def table_to_json(table: CoeffTable) -> dict:
    """Triangular JSON mirror: {"theta", "kmax", "rows": [[A(k,1)..A(k,k)]...]}."""
    rows = []
    for k in range(1, table.kmax + 1):
        rows.append([_linear_repr(table.log_entries[k, l]) for l in range(1, k + 1)])
    return {"theta": table.theta, "kmax": table.kmax, "rows": rows}
