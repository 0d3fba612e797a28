"""Finite partitions of a subset of a window into blocks.

A partition is stored as an integer label per window point, ``-1`` marking
points outside the partitioned subset.  Partitions built from symbolic
expressions remember them, which unlocks the symbolic cocontrolledness
fast path downstream.
"""

from __future__ import annotations

import numpy as np

from .subsets import membership_mask


class PartitionError(ValueError):
    pass


class Partition:
    def __init__(self, space, labels, exprs=None, names=None):
        self.space = space
        self.labels = np.asarray(labels, dtype=np.int64)
        if self.labels.shape != (len(space.points()),):
            raise PartitionError("labels must cover the window")
        self.n_blocks = int(self.labels.max()) + 1 if (self.labels >= 0).any() else 0
        self.exprs = list(exprs) if exprs is not None else None
        self.names = list(names) if names is not None else None

    @classmethod
    def from_exprs(cls, space, exprs, universe=None, names=None):
        """Blocks from expressions; they must be pairwise disjoint and must
        tile the universe (the whole window when not given)."""
        masks = [membership_mask(e, space) for e in exprs]
        labels = np.full(len(space.points()), -1, dtype=np.int64)
        covered = np.zeros(len(space.points()), dtype=bool)
        for i, m in enumerate(masks):
            if (covered & m).any():
                raise PartitionError(f"block {i} overlaps an earlier block")
            covered |= m
            labels[m] = i
        if universe is not None:
            uni = membership_mask(universe, space)
            if not (covered == uni).all():
                raise PartitionError("blocks do not tile the universe")
        elif not covered.all():
            raise PartitionError("blocks do not tile the window")
        return cls(space, labels, exprs=exprs, names=names)

    @classmethod
    def from_labels(cls, space, labels, names=None):
        return cls(space, labels, names=names)

    def block_mask(self, i):
        return self.labels == i

    def block_points(self, i):
        mask = self.block_mask(i)
        return [p for p, m in zip(self.space.points(), mask) if m]

    def block_expr(self, i):
        return self.exprs[i] if self.exprs is not None else None

    def block_of(self, p):
        return int(self.labels[self.space.point_index()[p]])

    def block_name(self, i):
        if self.names is not None:
            return self.names[i]
        return f"B{i}"

    def nonempty_blocks(self):
        return [i for i in range(self.n_blocks) if self.block_mask(i).any()]

    def restrict(self, mask):
        """Partition of the sub-universe cut out by a boolean mask.

        Block indexing is preserved; blocks may become empty.  Symbolic
        expressions are dropped because the cut is mask-level.
        """
        labels = np.where(mask, self.labels, -1)
        return Partition(self.space, labels, names=self.names)

    def pullback(self, point_map):
        """Partition with blocks ``point_map^{-1}(block_i)``, same indexing."""
        index = self.space.point_index()
        labels = np.array(
            [self.labels[index[point_map(p)]] for p in self.space.points()],
            dtype=np.int64,
        )
        return Partition(self.space, labels)

    def match_permutation(self, other):
        """If the two partitions have the same blocks as point sets, the
        permutation sending our index to theirs; None otherwise."""
        if self.n_blocks != other.n_blocks:
            return None
        perm = []
        for i in range(self.n_blocks):
            mask = self.block_mask(i)
            for j in range(other.n_blocks):
                if (mask == other.block_mask(j)).all():
                    perm.append(j)
                    break
            else:
                return None
        return perm

    def common_refinement(self, other):
        """Refinement by pairwise intersections of blocks.

        Returns ``(partition, pair_of)`` where ``pair_of[k] = (i, j)`` maps a
        refined block to its factors.
        """
        if self.space is not other.space:
            raise PartitionError("partitions live on different spaces")
        pairs = {}
        labels = np.full(len(self.space.points()), -1, dtype=np.int64)
        for idx in range(len(self.space.points())):
            a, b = int(self.labels[idx]), int(other.labels[idx])
            if a < 0 or b < 0:
                continue
            k = pairs.setdefault((a, b), len(pairs))
            labels[idx] = k
        pair_of = [None] * len(pairs)
        for (a, b), k in pairs.items():
            pair_of[k] = (a, b)
        return Partition(self.space, labels), pair_of
