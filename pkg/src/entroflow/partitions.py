"""Finite probability spaces, partitions, and Shannon entropy in bits.

A partition carves the points of a finite probability space into disjoint
atoms; pushing the point weights through a partition gives a probability
vector over atoms and hence an entropy. Partitions are ordered by coarse
graining (P1 <= P2 when every atom of P1 is a union of atoms of P2), admit
a join (the coarsest common refinement, built from pairwise intersections)
and carry the entropy pseudo-distance d(P1, P2) = |H(P1) - H(P2)|. The
pseudo-distance separates entropies, not partitions: distinct partitions
with equal entropy sit at distance zero.

Zero-weight points are allowed. They may be omitted from atoms, and the
canonical form of a partition drops them before comparison, so equality of
partitions is equality of their traces on the positive-weight support.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import SpaceMismatchError, ValidationError

__all__ = [
    "DEFAULT_TOLERANCE",
    "AtomDistribution",
    "FiniteProbabilitySpace",
    "Partition",
    "atom_probabilities",
    "entropy",
    "is_coarsening",
    "join",
    "make_space",
    "pseudo_distance",
    "shannon_bits",
]

#: Default absolute tolerance for normalization checks.
DEFAULT_TOLERANCE = 1e-12


def shannon_bits(probabilities: Iterable[float] | np.ndarray) -> float:
    """Shannon entropy of a probability vector, in bits.

    Entries equal to zero contribute nothing (the 0 log 0 = 0 limit
    convention). The input is assumed to be a valid distribution; use
    :class:`AtomDistribution` when validation is wanted.
    """
    p = np.asarray(probabilities, dtype=float)
    pos = p[p > 0.0]
    if pos.size == 0:
        return 0.0
    # the + 0.0 turns a signed zero from rounding into plain 0.0
    return float(-(pos * np.log2(pos)).sum()) + 0.0


@dataclass(frozen=True)
class FiniteProbabilitySpace:
    """A finite set of labelled points with weights summing to one.

    Point labels are opaque hashable values; all structural operations work
    on point indices. Two spaces compare equal when their labels and
    weights agree entry for entry, and partitions built on equal spaces
    interoperate.
    """

    point_ids: tuple[Hashable, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.point_ids) == 0:
            raise ValidationError("a probability space needs at least one point")
        if len(self.point_ids) != len(self.weights):
            raise ValidationError(
                f"{len(self.point_ids)} point ids but {len(self.weights)} weights"
            )
        if len(set(self.point_ids)) != len(self.point_ids):
            raise ValidationError("duplicate point ids")
        w = np.asarray(self.weights, dtype=float)
        if not np.all(np.isfinite(w)):
            raise ValidationError("weights must be finite")
        if np.any(w < 0.0):
            raise ValidationError(f"negative weight: min is {w.min()!r}")
        total = float(w.sum())
        if abs(total - 1.0) > DEFAULT_TOLERANCE:
            raise ValidationError(
                f"unnormalized weights (sum {total!r}); pass normalize=True to "
                "make_space to rescale"
            )

    @cached_property
    def weight_array(self) -> np.ndarray:
        arr = np.asarray(self.weights, dtype=float)
        arr.setflags(write=False)
        return arr

    @property
    def size(self) -> int:
        return len(self.point_ids)

    @cached_property
    def _index_by_id(self) -> dict[Hashable, int]:
        return {pid: i for i, pid in enumerate(self.point_ids)}

    def index_of(self, point_id: Hashable) -> int:
        """Index of a point label, raising on unknown labels."""
        try:
            return self._index_by_id[point_id]
        except KeyError:
            raise ValidationError(f"unknown point id {point_id!r}") from None


def make_space(
    point_ids: Iterable[Hashable],
    weights: Iterable[float],
    *,
    normalize: bool = False,
    tol: float = DEFAULT_TOLERANCE,
) -> FiniteProbabilitySpace:
    """Build a finite probability space from labels and weights.

    Args:
        point_ids: distinct hashable labels, one per point.
        weights: nonnegative weights. Must sum to 1 within ``tol`` unless
            ``normalize`` is set, in which case they are rescaled.
        normalize: rescale the weights to total mass one.
        tol: absolute tolerance on the normalization check.

    Raises:
        ValidationError: on duplicate ids, negative weights, zero total
            mass, or an unnormalized vector when ``normalize`` is false.
    """
    ids = tuple(point_ids)
    w = np.asarray(list(weights), dtype=float)
    if w.size and np.any(w < 0.0):
        raise ValidationError(f"negative weight: min is {w.min()!r}")
    total = float(w.sum())
    if normalize:
        if total <= 0.0:
            raise ValidationError("zero total mass, cannot normalize")
        w = w / total
    elif w.size and abs(total - 1.0) > tol:
        raise ValidationError(
            f"unnormalized weights (sum {total!r}); pass normalize=True to rescale"
        )
    return FiniteProbabilitySpace(ids, tuple(float(x) for x in w))


@dataclass(frozen=True)
class AtomDistribution:
    """Probability vector over the atoms of a partition."""

    probabilities: tuple[float, ...]

    def __post_init__(self) -> None:
        p = np.asarray(self.probabilities, dtype=float)
        if p.size == 0:
            raise ValidationError("empty atom distribution")
        if np.any(p < 0.0):
            raise ValidationError(f"negative atom probability: min is {p.min()!r}")
        total = float(p.sum())
        if abs(total - 1.0) > DEFAULT_TOLERANCE:
            raise ValidationError(f"atom probabilities sum to {total!r}, not 1")

    @property
    def entropy_bits(self) -> float:
        return shannon_bits(self.probabilities)

    def __len__(self) -> int:
        return len(self.probabilities)


@dataclass(frozen=True)
class Partition:
    """A partition of a finite probability space into disjoint atoms.

    Atoms are frozensets of point indices. On construction the atoms are
    validated (nonempty, pairwise disjoint, covering every positive-weight
    point) and brought to canonical form: zero-weight points are dropped,
    atoms left empty by that are removed, and the rest are sorted by their
    smallest point index. Equality and hashing act on the canonical form.
    """

    space: FiniteProbabilitySpace
    atoms: tuple[frozenset[int], ...]

    def __init__(
        self,
        space: FiniteProbabilitySpace,
        atoms: Iterable[Iterable[int]],
    ) -> None:
        raw = [frozenset(int(i) for i in atom) for atom in atoms]
        if not raw:
            raise ValidationError("a partition needs at least one atom")
        seen: set[int] = set()
        for atom in raw:
            if not atom:
                raise ValidationError("empty atom")
            for i in atom:
                if not 0 <= i < space.size:
                    raise ValidationError(
                        f"point index {i} outside space of size {space.size}"
                    )
                if i in seen:
                    raise ValidationError(f"point index {i} appears in two atoms")
                seen.add(i)
        w = space.weight_array
        uncovered = [i for i in range(space.size) if w[i] > 0.0 and i not in seen]
        if uncovered:
            raise ValidationError(
                f"positive-weight points not covered by any atom: {uncovered[:8]}"
            )
        canonical = []
        for atom in raw:
            trimmed = frozenset(i for i in atom if w[i] > 0.0)
            if trimmed:
                canonical.append(trimmed)
        canonical.sort(key=min)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "atoms", tuple(canonical))

    @classmethod
    def from_point_ids(
        cls,
        space: FiniteProbabilitySpace,
        groups: Iterable[Iterable[Hashable]],
    ) -> "Partition":
        """Build a partition from groups of point labels instead of indices."""
        return cls(space, [[space.index_of(pid) for pid in g] for g in groups])

    @classmethod
    def discrete(cls, space: FiniteProbabilitySpace) -> "Partition":
        """The finest partition, one atom per point."""
        return cls(space, [[i] for i in range(space.size)])

    @classmethod
    def trivial(cls, space: FiniteProbabilitySpace) -> "Partition":
        """The coarsest partition, a single atom holding every point."""
        return cls(space, [list(range(space.size))])

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @cached_property
    def atom_index_array(self) -> np.ndarray:
        """Point index -> atom index, with -1 for uncovered zero-weight points."""
        owner = np.full(self.space.size, -1, dtype=np.int64)
        for k, atom in enumerate(self.atoms):
            owner[list(atom)] = k
        owner.setflags(write=False)
        return owner


def _require_same_space(a: Partition, b: Partition, what: str) -> None:
    if a.space is not b.space and a.space != b.space:
        raise SpaceMismatchError(f"{what} requires partitions of the same space")


def atom_probabilities(partition: Partition) -> AtomDistribution:
    """Push the point weights through a partition."""
    w = partition.space.weight_array
    return AtomDistribution(
        tuple(float(w[list(atom)].sum()) for atom in partition.atoms)
    )


def entropy(partition: Partition) -> float:
    """Shannon entropy H(P) of a partition, in bits."""
    return shannon_bits(atom_probabilities(partition).probabilities)


def is_coarsening(coarse: Partition, fine: Partition) -> bool:
    """True iff ``coarse`` <= ``fine``, every coarse atom a union of fine atoms.

    The relation is a partial order up to canonical equality: reflexive,
    transitive, and antisymmetric on canonical forms. Both partitions must
    live on the same space.
    """
    _require_same_space(coarse, fine, "is_coarsening")
    owner = coarse.atom_index_array
    for atom in fine.atoms:
        it = iter(atom)
        first = owner[next(it)]
        if any(owner[i] != first for i in it):
            return False
    return True


def join(a: Partition, b: Partition) -> Partition:
    """Coarsest common refinement of two partitions.

    Atoms are the nonempty pairwise intersections of atoms of ``a`` and
    ``b``. The result refines both inputs, and any partition refining both
    also refines the join.
    """
    _require_same_space(a, b, "join")
    ia = a.atom_index_array
    ib = b.atom_index_array
    cells: dict[tuple[int, int], list[int]] = {}
    for point in range(a.space.size):
        ka = int(ia[point])
        if ka < 0:
            continue
        kb = int(ib[point])
        if kb < 0:
            continue
        cells.setdefault((ka, kb), []).append(point)
    return Partition(a.space, cells.values())


def pseudo_distance(p1: Partition, p2: Partition) -> float:
    """Entropy pseudo-distance |H(P1) - H(P2)| in bits.

    Satisfies the pseudo-metric axioms (nonnegativity, symmetry, triangle
    inequality, d(P, P) = 0) but not separation: distinct partitions of
    equal entropy are at distance zero.
    """
    _require_same_space(p1, p2, "pseudo_distance")
    return abs(entropy(p1) - entropy(p2))
