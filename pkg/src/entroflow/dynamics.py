"""Measure-preserving dynamics and information production rates.

Two kinds of system are covered. A :class:`PermutationSystem` is a finite
probability space with a weight-preserving permutation; its join flow
{join of T^{-k}P, k < n} is materialized atom by atom and stabilizes after
at most as many steps as there are points. A :class:`SymbolicSystem` is
the left shift with a Bernoulli or stationary Markov measure; there the
n-th join of the generating partition is the exact distribution over
length-n cylinder words, computed by recursion over words (never by
sampling) under a hard word-count cap.

The information production rate h(P, T) is estimated from the exact block
entropies H_n as the last increment H_n - H_{n-1}. For stationary product
and Markov measures the increment equals the rate exactly from n = 2 on,
and for finite permutation systems it is exactly zero once the join flow
plateaus, which is what makes the rate estimate comparable against the
closed-form Markov rate without any asymptotic fitting. The H_n / n
sequence is reported alongside for reference; it approaches the same
limit but only at O(1/n) speed.

The supremum of rates over a finite family of partitions is an honest
lower bound for the true supremum over all partitions, and that is how
``ks_entropy_family`` and ``is_chaotic`` are to be read.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ResourceCapError, ValidationError
from .flows import (
    DEFAULT_EPSILON,
    LimitPointVerdict,
    PartitionFlow,
    detect_entropy_plateau,
)
from .partitions import (
    FiniteProbabilitySpace,
    Partition,
    entropy,
    is_coarsening,
    join,
    make_space,
    shannon_bits,
)

__all__ = [
    "DEFAULT_WORD_CAP",
    "CylinderDistribution",
    "InfoRateReport",
    "PermutationSystem",
    "SymbolicSystem",
    "TheoremCheckResult",
    "cyclic_system",
    "generating_partition",
    "info_rate_report",
    "is_chaotic",
    "iterated_join",
    "ks_entropy_family",
    "markov_entropy_rate",
    "parse_system_spec",
    "pullback_partition",
    "theorem_limit_point_check",
    "verify_generating_map",
]

#: Default cap on materialized word-distribution entries.
DEFAULT_WORD_CAP = 2**20

_STATIONARITY_TOL = 1e-10
_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class PermutationSystem:
    """A finite probability space with a measure-preserving permutation.

    ``mapping[i]`` is the image of point ``i``. Measure preservation for a
    permutation reduces to weight(mapping[i]) == weight(i), checked
    exactly up to 1e-12 on construction.
    """

    space: FiniteProbabilitySpace
    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.space.size
        if len(self.mapping) != n:
            raise ValidationError(
                f"mapping of length {len(self.mapping)} on a space of {n} points"
            )
        if sorted(self.mapping) != list(range(n)):
            raise ValidationError("mapping is not a permutation of the point indices")
        w = self.space.weight_array
        for i, image in enumerate(self.mapping):
            if abs(w[image] - w[i]) > _WEIGHT_TOL:
                raise ValidationError(
                    f"weight not preserved at point {i}: "
                    f"{w[i]!r} -> {w[image]!r}"
                )

    @cached_property
    def _mapping_array(self) -> np.ndarray:
        arr = np.asarray(self.mapping, dtype=np.int64)
        arr.setflags(write=False)
        return arr


def cyclic_system(n_points: int) -> PermutationSystem:
    """The cyclic shift i -> i + 1 (mod n) on n uniform points."""
    if n_points < 1:
        raise ValidationError(f"need at least one point, got {n_points}")
    space = make_space(tuple(range(n_points)), (1.0 / n_points,) * n_points)
    return PermutationSystem(space, tuple((i + 1) % n_points for i in range(n_points)))


@dataclass(frozen=True)
class SymbolicSystem:
    """Left shift over a finite alphabet with a Bernoulli or Markov measure.

    ``marginal`` is the single-symbol distribution (the Bernoulli vector
    p, or the stationary vector pi). ``transition`` is None for Bernoulli
    and the row-stochastic matrix Q for Markov, with pi Q = pi required to
    hold within 1e-10.
    """

    marginal: tuple[float, ...]
    transition: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self) -> None:
        p = np.asarray(self.marginal, dtype=float)
        if p.size < 2:
            raise ValidationError("alphabet needs at least two symbols")
        if np.any(p < 0.0) or not np.all(np.isfinite(p)):
            raise ValidationError("marginal must be a probability vector")
        if abs(float(p.sum()) - 1.0) > _WEIGHT_TOL:
            raise ValidationError(f"marginal sums to {float(p.sum())!r}, not 1")
        if self.transition is not None:
            q = np.asarray(self.transition, dtype=float)
            if q.shape != (p.size, p.size):
                raise ValidationError(
                    f"transition shape {q.shape} does not match alphabet size {p.size}"
                )
            if np.any(q < 0.0) or not np.all(np.isfinite(q)):
                raise ValidationError("transition entries must be nonnegative")
            rows = q.sum(axis=1)
            if np.any(np.abs(rows - 1.0) > _WEIGHT_TOL):
                raise ValidationError(f"transition rows sum to {rows!r}, not 1")
            drift = float(np.abs(p @ q - p).max())
            if drift > _STATIONARITY_TOL:
                raise ValidationError(
                    f"marginal is not stationary for the transition matrix "
                    f"(max |pi Q - pi| = {drift!r})"
                )

    @classmethod
    def bernoulli(cls, probabilities: Iterable[float]) -> "SymbolicSystem":
        return cls(tuple(float(x) for x in probabilities), None)

    @classmethod
    def markov(
        cls,
        transition: Iterable[Iterable[float]],
        stationary: Iterable[float] | None = None,
    ) -> "SymbolicSystem":
        """Markov shift from Q, deriving the stationary vector if not given."""
        q = np.asarray([[float(x) for x in row] for row in transition], dtype=float)
        if stationary is None:
            pi = _stationary_vector(q)
        else:
            pi = np.asarray([float(x) for x in stationary], dtype=float)
        return cls(tuple(pi.tolist()), tuple(tuple(row) for row in q.tolist()))

    @property
    def kind(self) -> str:
        return "bernoulli" if self.transition is None else "markov"

    @property
    def alphabet_size(self) -> int:
        return len(self.marginal)

    @cached_property
    def symbol_space(self) -> FiniteProbabilitySpace:
        """The alphabet as a probability space under the single-symbol law."""
        m = self.alphabet_size
        return make_space(tuple(str(s) for s in range(m)), self.marginal)


def _stationary_vector(q: np.ndarray) -> np.ndarray:
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValidationError(f"transition matrix must be square, got shape {q.shape}")
    eigvals, eigvecs = np.linalg.eig(q.T)
    k = int(np.argmin(np.abs(eigvals - 1.0)))
    if abs(eigvals[k] - 1.0) > 1e-8:
        raise ValidationError("transition matrix has no eigenvalue 1")
    v = np.real(eigvecs[:, k])
    total = v.sum()
    if abs(total) < 1e-300:
        raise ValidationError("degenerate stationary eigenvector")
    pi = v / total
    if np.any(pi < -1e-12):
        raise ValidationError("stationary vector has negative entries")
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def generating_partition(system: SymbolicSystem) -> Partition:
    """One atom per symbol, the partition whose joins are the cylinders."""
    return Partition.discrete(system.symbol_space)


def markov_entropy_rate(
    stationary: Iterable[float],
    transition: Iterable[Iterable[float]],
) -> float:
    """Closed-form entropy rate of a stationary Markov chain, in bits.

    Computes -sum_i pi_i sum_j Q_ij log2 Q_ij after checking that Q is
    row stochastic and pi is stationary within 1e-10. Serves as the
    independent oracle for the enumeration-based rate estimate.
    """
    system = SymbolicSystem.markov(transition, stationary)
    pi = np.asarray(system.marginal, dtype=float)
    q = np.asarray(system.transition, dtype=float)
    rows = np.array([shannon_bits(row) for row in q])
    return float(pi @ rows)


def pullback_partition(system: PermutationSystem, partition: Partition) -> Partition:
    """Preimage partition T^{-1}P, atom by atom.

    Preserves atom probabilities because the permutation preserves
    weights.
    """
    if partition.space is not system.space and partition.space != system.space:
        raise ValidationError("partition does not live on the system's space")
    mapping = system._mapping_array
    atoms = []
    for atom in partition.atoms:
        members = frozenset(atom)
        atoms.append([i for i in range(system.space.size) if int(mapping[i]) in members])
    return Partition(system.space, atoms)


@dataclass(frozen=True, eq=False)
class CylinderDistribution:
    """Exact distribution over reduced words of a fixed length.

    Stands in for the n-fold join on a symbolic system, whose atoms are
    cylinder sets. ``labels`` records the symbol -> group map that reduced
    the alphabet (identity for the generating partition).
    """

    word_length: int
    group_count: int
    labels: tuple[int, ...]
    probabilities: np.ndarray

    def __post_init__(self) -> None:
        self.probabilities.setflags(write=False)

    @property
    def entropy_bits(self) -> float:
        return shannon_bits(self.probabilities)

    def __len__(self) -> int:
        return int(self.probabilities.size)


def _symbol_labels(system: SymbolicSystem, partition: Partition | None) -> np.ndarray:
    """Symbol index -> atom index under a partition of the alphabet."""
    m = system.alphabet_size
    if partition is None:
        return np.arange(m, dtype=np.int64)
    if partition.space != system.symbol_space:
        raise ValidationError(
            "partition must live on the system's symbol space "
            "(see SymbolicSystem.symbol_space)"
        )
    owner = partition.atom_index_array.copy()
    owner[owner < 0] = 0  # zero-weight symbols: group is irrelevant
    return owner


def _check_cap(entries: int, cap: int) -> None:
    if entries > cap:
        raise ResourceCapError(
            f"word enumeration needs {entries} entries, over the cap of {cap}; "
            "raise the cap explicitly or lower n_max"
        )


class _WordEngine:
    """Exact block-entropy recursion for a symbolic system.

    Maintains either the plain word distribution (identity labelling) or
    a table over (reduced word, current symbol) for a lumped alphabet.
    Both paths enumerate exactly; neither samples.
    """

    def __init__(self, system: SymbolicSystem, labels: np.ndarray, cap: int):
        self.system = system
        self.labels = labels
        self.cap = int(cap)
        self.m = system.alphabet_size
        self.groups = int(labels.max()) + 1
        self.identity = self.groups == self.m and bool(
            np.all(labels == np.arange(self.m))
        )
        p = np.asarray(system.marginal, dtype=float)
        if system.transition is None:
            self.step_matrix = np.tile(p, (self.m, 1))
        else:
            self.step_matrix = np.asarray(system.transition, dtype=float)
        self.n = 1
        if self.identity:
            _check_cap(self.m, self.cap)
            self.vec = p.copy()
        else:
            _check_cap(self.groups * self.m, self.cap)
            table = np.zeros((self.groups, self.m))
            table[self.labels, np.arange(self.m)] = p
            self.table = table

    def block_entropy(self) -> float:
        if self.identity:
            return shannon_bits(self.vec)
        return shannon_bits(self.table.sum(axis=1))

    def word_probabilities(self) -> np.ndarray:
        if self.identity:
            return self.vec.copy()
        return self.table.sum(axis=1)

    def extend(self) -> None:
        """Grow every word by one symbol."""
        if self.identity:
            _check_cap(self.vec.size * self.m, self.cap)
            last = np.arange(self.vec.size) % self.m
            self.vec = (self.vec[:, None] * self.step_matrix[last]).reshape(-1)
        else:
            rows = self.table.shape[0]
            _check_cap(rows * self.groups * self.m, self.cap)
            grown = self.table @ self.step_matrix
            table = np.zeros((rows * self.groups, self.m))
            for g in range(self.groups):
                cols = np.flatnonzero(self.labels == g)
                block = table[g :: self.groups]
                block[:, cols] = grown[:, cols]
            self.table = table
        self.n += 1


def _block_entropies_symbolic(
    system: SymbolicSystem,
    partition: Partition | None,
    n_max: int,
    cap: int,
) -> list[float]:
    labels = _symbol_labels(system, partition)
    engine = _WordEngine(system, labels, cap)
    values = [engine.block_entropy()]
    for _ in range(1, n_max):
        engine.extend()
        values.append(engine.block_entropy())
    return values


def _join_flow_permutation(
    system: PermutationSystem,
    partition: Partition,
    n_max: int,
    cap: int,
) -> list[Partition]:
    """Materialize join(P, T^{-1}P, ..., T^{-(n-1)}P) for n = 1..n_max."""
    if partition.space is not system.space and partition.space != system.space:
        raise ValidationError("partition does not live on the system's space")
    joins = [partition]
    pulled = partition
    for _ in range(1, n_max):
        pulled = pullback_partition(system, pulled)
        current = join(joins[-1], pulled)
        _check_cap(current.n_atoms, cap)
        joins.append(current)
    return joins


def iterated_join(
    system: PermutationSystem | SymbolicSystem,
    partition: Partition | None,
    n: int,
    *,
    cap: int = DEFAULT_WORD_CAP,
) -> Partition | CylinderDistribution:
    """The n-fold join of pullbacks, join_{k<n} T^{-k}P.

    For a permutation system the result is an explicit partition and each
    n + 1 result refines the n result. For a symbolic system it is the
    exact length-n cylinder word distribution (reduced through the symbol
    partition when one is given; default is the generating partition).
    """
    if n < 1:
        raise ValidationError(f"n must be at least 1, got {n}")
    if isinstance(system, PermutationSystem):
        if partition is None:
            raise ValidationError("a permutation system needs an explicit partition")
        return _join_flow_permutation(system, partition, n, cap)[-1]
    labels = _symbol_labels(system, partition)
    engine = _WordEngine(system, labels, cap)
    for _ in range(1, n):
        engine.extend()
    return CylinderDistribution(
        word_length=n,
        group_count=engine.groups,
        labels=tuple(int(x) for x in labels),
        probabilities=engine.word_probabilities(),
    )


@dataclass(frozen=True)
class InfoRateReport:
    """Exact block entropies and the information production rate estimate.

    ``block_entropies[k]`` is H_{k+1} in bits, ``rates`` the H_n / n
    sequence, ``increments`` the differences H_n - H_{n-1} from n = 2 on.
    ``h_estimate`` is the final increment. ``converged`` reports whether
    the last increments agree within ``tolerance`` (spread of the last
    three, or of all of them when fewer exist).
    """

    n_max: int
    block_entropies: tuple[float, ...]
    rates: tuple[float, ...]
    increments: tuple[float, ...]
    h_estimate: float
    converged: bool
    tolerance: float


def _report_from_entropies(values: Sequence[float], tol: float) -> InfoRateReport:
    h = tuple(float(x) for x in values)
    n_max = len(h)
    rates = tuple(h[k] / (k + 1) for k in range(n_max))
    increments = tuple(h[k] - h[k - 1] for k in range(1, n_max))
    tail = increments[-3:]
    converged = bool(tail) and (max(tail) - min(tail)) < tol
    return InfoRateReport(
        n_max=n_max,
        block_entropies=h,
        rates=rates,
        increments=increments,
        h_estimate=increments[-1],
        converged=converged,
        tolerance=tol,
    )


def _block_entropy_sequence(
    system: PermutationSystem | SymbolicSystem,
    partition: Partition | None,
    n_max: int,
    cap: int,
) -> list[float]:
    if isinstance(system, PermutationSystem):
        if partition is None:
            raise ValidationError("a permutation system needs an explicit partition")
        return [entropy(p) for p in _join_flow_permutation(system, partition, n_max, cap)]
    return _block_entropies_symbolic(system, partition, n_max, cap)


def info_rate_report(
    system: PermutationSystem | SymbolicSystem,
    partition: Partition | None = None,
    n_max: int = 16,
    *,
    tol: float = 1e-6,
    cap: int = DEFAULT_WORD_CAP,
) -> InfoRateReport:
    """Exact H_n for n = 1..n_max and the rate estimate H_n - H_{n-1}.

    Args:
        system: permutation or symbolic system.
        partition: partition of the system's space (permutation) or of its
            symbol space (symbolic; default is the generating partition).
        n_max: number of block lengths to materialize, at least 2.
        tol: stabilization tolerance for the convergence flag.
        cap: hard bound on materialized words or atoms.
    """
    if n_max < 2:
        raise ValidationError(f"n_max must be at least 2, got {n_max}")
    values = _block_entropy_sequence(system, partition, n_max, cap)
    return _report_from_entropies(values, tol)


def ks_entropy_family(
    system: PermutationSystem | SymbolicSystem,
    family: Sequence[Partition],
    n_max: int = 16,
    *,
    tol: float = 1e-6,
    cap: int = DEFAULT_WORD_CAP,
) -> float:
    """Largest rate estimate over a finite family of partitions.

    A lower bound for the supremum over all partitions, honest rather
    than exhaustive: enlarging the family can only raise it.
    """
    if not family:
        raise ValidationError("the partition family must not be empty")
    return max(
        info_rate_report(system, p, n_max, tol=tol, cap=cap).h_estimate
        for p in family
    )


def is_chaotic(
    system: PermutationSystem | SymbolicSystem,
    family: Sequence[Partition],
    tol: float = 1e-6,
    n_max: int = 16,
    *,
    cap: int = DEFAULT_WORD_CAP,
) -> bool:
    """True when the family-restricted rate supremum exceeds ``tol``."""
    return ks_entropy_family(system, family, n_max, cap=cap) > tol


@dataclass(frozen=True)
class TheoremCheckResult:
    """Joint verdict of plateau detection and the rate estimate.

    ``consistent`` encodes the implication "refinements' flow with a limit
    point forces rate zero": it is False only when the plateau is
    witnessed yet the rate estimate stays at or above epsilon.
    """

    verdict: LimitPointVerdict
    h_estimate: float
    consistent: bool
    report: InfoRateReport


def theorem_limit_point_check(
    system: PermutationSystem | SymbolicSystem,
    partition: Partition | None = None,
    *,
    epsilon: float = DEFAULT_EPSILON,
    window: int | None = None,
    n_max: int = 24,
    cap: int = DEFAULT_WORD_CAP,
) -> TheoremCheckResult:
    """Check the join flow of a system for a limit point and rate zero.

    Materializes the entropy sequence of {join_{k<n} T^{-k}P} up to
    ``n_max``, runs plateau detection on it, and compares the verdict
    against the rate estimate.
    """
    report = info_rate_report(system, partition, n_max, cap=cap)
    verdict = detect_entropy_plateau(
        report.block_entropies,
        epsilon=epsilon,
        window=window,
        horizon=report.n_max,
    )
    consistent = verdict.status != "witnessed" or report.h_estimate < epsilon
    return TheoremCheckResult(
        verdict=verdict,
        h_estimate=report.h_estimate,
        consistent=consistent,
        report=report,
    )


def verify_generating_map(
    system: PermutationSystem | SymbolicSystem,
    ref_flow: PartitionFlow | None = None,
    n_max: int | None = None,
    *,
    cap: int = DEFAULT_WORD_CAP,
    tol: float = 1e-12,
) -> bool:
    """Check that a refinements' flow is the join flow of its first member.

    For a permutation system, compares join_{k<n} T^{-k}(ref_flow[0])
    against ref_flow[n-1] canonically for every n up to ``n_max`` (default
    the flow length). For a symbolic system the cylinder flow is the
    reference and cannot be materialized as finite partitions; there the
    check verifies the consistency that makes it a refinements' flow,
    namely that each length-(n+1) word distribution marginalizes onto the
    length-n one within ``tol``.
    """
    if isinstance(system, PermutationSystem):
        if ref_flow is None:
            raise ValidationError("a permutation system needs an explicit flow")
        limit = len(ref_flow) if n_max is None else min(n_max, len(ref_flow))
        joins = _join_flow_permutation(system, ref_flow[0], limit, cap)
        return all(joins[n - 1] == ref_flow[n - 1] for n in range(1, limit + 1))
    limit = 8 if n_max is None else n_max
    engine = _WordEngine(system, _symbol_labels(system, None), cap)
    previous = engine.word_probabilities()
    for _ in range(1, limit):
        engine.extend()
        current = engine.word_probabilities()
        marginal = current.reshape(-1, system.alphabet_size).sum(axis=1)
        if float(np.abs(marginal - previous).max()) > tol:
            return False
        previous = current
    return True


def parse_system_spec(text: str) -> PermutationSystem | SymbolicSystem:
    """Parse a compact system spec string.

    Formats:
        ``bernoulli:0.5,0.5``                 product measure over the listed p
        ``markov:[[0.9,0.1],[0.5,0.5]]``      Markov shift, stationary pi derived
        ``cycle:4``                           cyclic shift on n uniform points
    """
    head, sep, body = text.partition(":")
    if not sep:
        raise ValidationError(
            f"system spec {text!r} needs the form kind:parameters"
        )
    kind = head.strip().lower()
    body = body.strip()
    if kind == "bernoulli":
        try:
            probs = [float(x) for x in body.split(",")]
        except ValueError:
            raise ValidationError(f"bad bernoulli probabilities {body!r}") from None
        return SymbolicSystem.bernoulli(probs)
    if kind == "markov":
        try:
            matrix = json.loads(body)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad markov matrix {body!r}: {exc}") from None
        if not (
            isinstance(matrix, list)
            and matrix
            and all(isinstance(row, list) for row in matrix)
        ):
            raise ValidationError(f"markov matrix {body!r} must be a list of rows")
        return SymbolicSystem.markov(matrix)
    if kind == "cycle":
        try:
            n = int(body)
        except ValueError:
            raise ValidationError(f"bad cycle size {body!r}") from None
        return cyclic_system(n)
    raise ValidationError(
        f"unknown system kind {kind!r} (expected bernoulli, markov, or cycle)"
    )
