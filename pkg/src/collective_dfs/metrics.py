"""Scalability metrics for decoherence-free encodings of N qubits.

Large registers (N in the hundreds) overflow every float type in factorials,
so finite-N quantities are evaluated through ``lgamma`` and summed with a
compensated sum after shifting by the largest term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar

from .structure import df_dimension, strong_collective_dimension

LN2 = math.log(2.0)


@dataclass(frozen=True)
class MetricPoint:
    r: float
    d_df: float
    p_df: float

    @property
    def product(self) -> float:
        return self.d_df * self.p_df


def log_df_dimension(n: int, k: int) -> float:
    """Natural log of dim V(k), without forming the binomials."""
    if not 0 <= 2 * k <= n:
        raise ValueError(f"need 0 <= 2k <= n, got n={n}, k={k}")
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 2)
            + math.log(n - 2 * k + 1))


def d_df(n: int, k: int) -> float:
    """Logical qubits per physical qubit, ``log2(dim V(k)) / n``."""
    if k < 0 or 2 * k > n:
        raise ValueError(f"V({k}) is zero-dimensional for n={n}")
    return log_df_dimension(n, k) / LN2 / n


def d_df_asymptotic(r: float) -> float:
    """Binary entropy of ``r``; its large-N limit of ``d_df`` at ``k = r N``."""
    if not 0.0 <= r <= 0.5:
        raise ValueError(f"r must lie in [0, 1/2], got {r}")
    if r == 0.0:
        return 0.0
    return -(r * math.log2(r) + (1.0 - r) * math.log2(1.0 - r))


def p_df(n: int, k: int, exact: bool = False):
    """Fraction of W(k) that is decoherence-free, ``1 + k/(k - 1 - n)``."""
    if k < 0 or 2 * k > n:
        raise ValueError(f"need 0 <= 2k <= n, got n={n}, k={k}")
    value = 1 + Fraction(k, k - 1 - n)
    return value if exact else float(value)


def p_df_asymptotic(r: float) -> float:
    if not 0.0 <= r <= 0.5:
        raise ValueError(f"r must lie in [0, 1/2], got {r}")
    return (1.0 - 2.0 * r) / (1.0 - r)


def metric_point(r: float) -> MetricPoint:
    return MetricPoint(r, d_df_asymptotic(r), p_df_asymptotic(r))


def product_asymptotic(r: float) -> float:
    return d_df_asymptotic(r) * p_df_asymptotic(r)


def product_optimum(tol: float = 1e-9) -> float:
    """Excitation fraction maximising ``d_df * p_df`` (golden-section search)."""
    res = minimize_scalar(lambda r: -product_asymptotic(r), bracket=(1e-6, 0.25, 0.5),
                          method="golden", tol=tol)
    r = float(res.x)
    if not 0.0 < r < 0.5:
        raise RuntimeError(f"optimum search escaped its bracket: r={r}")
    return r


def spin_multiplicity(n: int, spin: int) -> int:
    """Number of spin-``J`` irreps of ``n`` qubits (n even, integer J)."""
    return df_dimension(n, n // 2 - spin)


def _log_leak_terms(n: int, j_tot: int) -> list[float]:
    half = n // 2
    base = math.lgamma(n + 1)
    return [math.log(2 * j + 1) + base - math.lgamma(half + j + 2) - math.lgamma(half - j + 1)
            for j in range(1, j_tot + 1)]


def _check_jtot(n: int, j_tot: int) -> None:
    if n < 2 or n % 2:
        raise ValueError(f"n must be even and >= 2, got {n}")
    if not 1 <= j_tot <= n // 2:
        raise ValueError(f"j_tot must lie in 1..{n // 2}, got {j_tot}")


def p_df_jtot(n: int, j_tot: int) -> float:
    """DF-to-leakage ratio of the strong-collective DFS against spins ``1..j_tot``."""
    _check_jtot(n, j_tot)
    half = n // 2
    log_dfs = math.lgamma(n + 1) - math.lgamma(half + 2) - math.lgamma(half + 1)
    terms = _log_leak_terms(n, j_tot)
    top = max(terms)
    log_den = top + math.log(math.fsum(math.exp(t - top) for t in terms))
    return math.exp(log_dfs - log_den)


def p_df_jtot_exact(n: int, j_tot: int) -> Fraction:
    """Big-integer evaluation of :func:`p_df_jtot`."""
    _check_jtot(n, j_tot)
    half = n // 2
    fact = math.factorial
    den = sum(Fraction((2 * j + 1) * fact(n), fact(half + j + 1) * fact(half - j))
              for j in range(1, j_tot + 1))
    return Fraction(strong_collective_dimension(n)) / den


def fig1_table(step: float = 1e-3) -> list[MetricPoint]:
    count = int(round(0.5 / step))
    return [metric_point(i * step) for i in range(count + 1)]


def fig2_table(n: int = 500) -> list[tuple[int, float]]:
    return [(j, p_df_jtot(n, j)) for j in range(1, n // 2 + 1)]


def fig2_series(n_max: int = 500) -> list[tuple[int, float, float, float]]:
    """``(n, p(1), p(2), p(n/2))`` for even ``n`` from 4 up; ``p(2)`` needs n >= 4."""
    return [(n, p_df_jtot(n, 1), p_df_jtot(n, 2), p_df_jtot(n, n // 2))
            for n in range(4, n_max + 1, 2)]


def convergence_gaps(r: float, sizes=(20, 100, 500)) -> np.ndarray:
    """``|d_df(n, round(r n)) - d_df_asymptotic(r)|`` for each size."""
    return np.array([abs(d_df(n, int(round(r * n))) - d_df_asymptotic(r)) for n in sizes])
