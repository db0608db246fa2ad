"""Monte Carlo checks of the exponential-mixture representations.

For i.i.d. Z_i ~ Exp(1),

    E[g(x_1 Z_1 + ... + x_n Z_n)] = H[x_1..x_n],   H(s) = s^(n-2) G(1/s),

with G the Laplace transform of g.  g(t) = t^q/q! gives H(s) = s^(q+n-1) and
so h_q(x); g(t) = exp(-t) gives H(s) = s^(n-1)/(s+1) with the closed-form
expectation prod 1/(1 + x_i).

Trials are drawn in fixed-size chunks, each from its own child of a
``numpy.random.SeedSequence``, and chunk statistics are merged in chunk
order.  The estimate therefore depends only on (seed, trials), never on how
many worker threads ran the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import (
    FunctionSpec,
    Monomial,
    NodeSet,
    RationalH,
    ReciprocalPower,
    ShiftedReciprocal,
    to_rational,
)
from .divdiff import divdiff, divdiff_exact
from .errors import DomainError
from .symmetric import chs

CHUNK = 1 << 14
MIN_TRIALS = 1000


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    trials: int
    seed: int
    target: float

    @property
    def z_score(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.mean == self.target else math.copysign(math.inf, self.mean - self.target)
        return (self.mean - self.target) / self.stderr


def _chunk_stats(kernel, x: np.ndarray, size: int, seq: np.random.SeedSequence):
    rng = np.random.Generator(np.random.PCG64(seq))
    u = rng.random((size, x.size))
    z = -np.log1p(-u)  # inverse CDF of Exp(1)
    s = (z * x).sum(axis=1)
    v = kernel(s)
    mean = float(np.sum(v)) / size
    m2 = float(np.sum((v - mean) ** 2))
    return size, mean, m2


def _merge(a, b):
    # Chan et al. pairwise update of (count, mean, M2)
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    d = mb - ma
    return n, ma + d * nb / n, sa + sb + d * d * na * nb / n


def _tree_reduce(stats):
    while len(stats) > 1:
        nxt = [_merge(stats[i], stats[i + 1]) for i in range(0, len(stats) - 1, 2)]
        if len(stats) % 2:
            nxt.append(stats[-1])
        stats = nxt
    return stats[0]


def sample_mean(kernel, x: Sequence[float], trials: int, seed: int, workers: int = 1):
    """(mean, stderr) of kernel(sum x_i Z_i) over ``trials`` draws."""
    if trials < 1:
        raise ValueError("trials must be positive")
    xv = np.asarray([float(v) for v in x], dtype=float)
    sizes = [CHUNK] * (trials // CHUNK)
    if trials % CHUNK:
        sizes.append(trials % CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, seqs))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(lambda j: _chunk_stats(kernel, xv, *j), jobs))
    else:
        stats = [_chunk_stats(kernel, xv, *j) for j in jobs]
    n, mean, m2 = _tree_reduce(stats)
    if n < 2:
        return mean, 0.0
    var = m2 / (n - 1)
    return mean, math.sqrt(var / n)


def _power_kernel(q: int):
    fq = float(math.factorial(q))
    return lambda s: s ** q / fq


def _exp_decay_kernel(s):
    return np.exp(-s)


def chs_monte_carlo(q: int, x: Sequence, trials: int, seed: int, workers: int = 1) -> MCEstimate:
    """Estimate h_q(x) = E[(sum x_i Z_i)^q] / q!; the target is h_q computed exactly."""
    if q < 0:
        raise ValueError("q must be nonnegative")
    if trials < MIN_TRIALS:
        raise ValueError(f"need at least {MIN_TRIALS} trials")
    target = float(chs(q, [to_rational(v) for v in x]))
    if q == 0:
        return MCEstimate(1.0, 0.0, trials, seed, target)
    mean, se = sample_mean(_power_kernel(q), x, trials, seed, workers)
    return MCEstimate(mean, se, trials, seed, target)


def laplace_transform_of(g_variant) -> FunctionSpec:
    """Catalog Laplace transform G for ``("power", q)`` or ``"exp_decay"``."""
    if g_variant == "exp_decay":
        return ShiftedReciprocal(1)
    kind, q = g_variant
    if kind != "power":
        raise ValueError(f"unknown g variant {g_variant!r}")
    return ReciprocalPower(q + 1)


def laplace_target(g_variant, x: NodeSet):
    """H[x_1..x_n] with H(s) = s^(n-2) G(1/s), exact when the nodes are rational."""
    h = RationalH(laplace_transform_of(g_variant), x.n)
    for v in x.values:
        if not h.domain.contains(v):
            raise DomainError(f"node {v} is outside the domain {h.domain} of {h.label()}")
    v = divdiff_exact(h, x)
    return v if v is not None else divdiff(h, x)


def laplace_identity_mc(g_variant, x: NodeSet, trials: int, seed: int, workers: int = 1) -> MCEstimate:
    """Estimate E[g(sum x_i Z_i)] against the divided-difference target H[x].

    ``g_variant`` is ``("power", q)`` for g(t) = t^q/q! or ``"exp_decay"`` for g(t) = exp(-t).
    """
    if trials < MIN_TRIALS:
        raise ValueError(f"need at least {MIN_TRIALS} trials")
    if g_variant == "exp_decay":
        if x[0] <= 0:
            raise DomainError("exp_decay needs strictly positive nodes")
        target = float(laplace_target(g_variant, x))
        mean, se = sample_mean(_exp_decay_kernel, x.values, trials, seed, workers)
        return MCEstimate(mean, se, trials, seed, target)
    kind, q = g_variant
    est = chs_monte_carlo(q, x.values, trials, seed, workers)
    return MCEstimate(est.mean, est.stderr, trials, seed, float(laplace_target(g_variant, x)))


def exp_decay_closed_form(x) -> Fraction:
    """prod 1/(1 + x_i), the exact expectation of exp(-sum x_i Z_i)."""
    out = Fraction(1)
    for v in x:
        out /= 1 + Fraction(v)
    return out


def divdiff_monte_carlo(f: FunctionSpec, nodes: NodeSet, trials: int, seed: int) -> MCEstimate | None:
    """Monte Carlo estimate of f[nodes] where a representation exists (monomials of degree >= n-1)."""
    if isinstance(f, Monomial) and f.degree >= nodes.n - 1:
        return chs_monte_carlo(f.degree - nodes.n + 1, nodes.values, max(trials, MIN_TRIALS), seed)
    return None
