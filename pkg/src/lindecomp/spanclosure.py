"""Basis of the smallest subspace containing W and stable under the actions U.

Starting from a maximal independent subset of W, every pass tries to extend
the basis by the images ``u(b)`` of basis vectors; the first pass that adds
nothing ends the loop. Each accepted vector keeps a witness: the seed it came
from and the word of generator indices that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numpy as np

from .actions import Action, FlatSpace
from .errors import DimensionError, NotInSpan
from .linalg import EchelonBasis, matmul_mod


@dataclass(frozen=True)
class Witness:
    """``word[0]`` is applied first."""

    origin_index: int
    word: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {"origin": self.origin_index, "word": list(self.word)}


@dataclass
class ClosureStats:
    passes: int = 0
    candidates: int = 0
    elimination_ops: int = 0
    action_ops: int = 0
    d: int = 0
    actions: int = 0
    seeds: int = 0
    rank: int = 0
    max_action_cost: int = 0

    @property
    def field_ops(self) -> int:
        return self.elimination_ops + self.action_ops

    @property
    def op_bound(self) -> int:
        return closure_op_bound(self.d, self.actions, self.seeds, self.max_action_cost, self.rank)

    def to_json(self) -> dict:
        return {
            "passes": self.passes,
            "candidates": self.candidates,
            "field_ops": self.field_ops,
            "elimination_ops": self.elimination_ops,
            "action_ops": self.action_ops,
            "op_bound": self.op_bound,
        }


def replay(witness: Witness, W: Sequence, U: Sequence[Action]) -> np.ndarray:
    v = np.asarray(W[witness.origin_index], dtype=np.int64)
    for g in witness.word:
        v = U[g].apply(v)
    return v


def cubic_bound(d: int, n_actions: int, n_seeds: int) -> int:
    """``d^3 |U|^2 + d |W|^2``, the polynomial the op counter is held to."""
    return d**3 * n_actions**2 + d * n_seeds**2


def closure_op_bound(d: int, n_actions: int, n_seeds: int, action_cost: int, rank: int) -> int:
    """Ceiling for a frontier-mode closure followed by one decomposition,
    one transport and one recombination.

    Elimination costs at most ``2 d^2`` per candidate (reduction plus
    coefficient bookkeeping), and at most ``d |U|`` candidates are tried,
    which is twice ``cubic_bound``. Action applications are charged at their
    actual cost, one per candidate. Post-processing is linear in the basis
    size: two eliminations, then one action and one accumulation per vector.
    """
    closure = 2 * cubic_bound(d, n_actions, n_seeds) + d * n_actions * action_cost
    post = 2 * d * d + rank * (action_cost + d)
    return closure + post


@dataclass
class SpanBasis:
    space: FlatSpace
    vectors: np.ndarray
    witnesses: list[Witness]
    echelon: EchelonBasis
    stats: ClosureStats
    parents: list[int] = field(default_factory=list)
    depths: list[int] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.witnesses)

    def __len__(self):
        return self.dim

    def contains(self, v) -> bool:
        return self.echelon.contains(v)

    def decompose(self, v) -> np.ndarray:
        """Coefficients over ``vectors``; raises ``NotInSpan``."""
        before = self.echelon.ops
        try:
            return self.echelon.decompose(v)
        finally:
            self.stats.elimination_ops += self.echelon.ops - before

    def is_invariant(self, U: Sequence[Action]) -> bool:
        if self.dim == 0:
            return True
        for u in U:
            for img in u.apply(self.vectors):
                if not self.echelon.contains(img):
                    return False
        return True

    def transport(self, seeds: Sequence, U: Sequence[Action]) -> np.ndarray:
        """Apply every witness word to a replacement seed.

        ``seeds[i]`` stands in for the original ``W[i]``; row ``k`` of the
        result is ``word_k`` applied to ``seeds[origin_k]``. Words share
        prefixes, so each row costs one action application.
        """
        k = self.dim
        out = np.zeros((k, self.space.d), dtype=np.int64)
        seeds = [self.space.check(s) for s in seeds]
        by_depth: dict[int, list[int]] = {}
        for idx, dep in enumerate(self.depths):
            by_depth.setdefault(dep, []).append(idx)
        for dep in sorted(by_depth):
            idxs = by_depth[dep]
            if dep == 0:
                for idx in idxs:
                    out[idx] = seeds[self.witnesses[idx].origin_index]
                continue
            groups: dict[int, list[int]] = {}
            for idx in idxs:
                groups.setdefault(self.witnesses[idx].word[-1], []).append(idx)
            for g, members in groups.items():
                parents = [self.parents[m] for m in members]
                out[members] = U[g].apply(out[parents])
                self.stats.action_ops += U[g].cost * len(members)
        return out

    def combine(self, coeffs, images: np.ndarray) -> np.ndarray:
        """``sum_i coeffs[i] * images[i]``."""
        coeffs = np.asarray(coeffs, dtype=np.int64)
        if coeffs.shape[0] == 0:
            return np.zeros(self.space.d, dtype=np.int64)
        self.stats.elimination_ops += coeffs.shape[0] * self.space.d
        return matmul_mod(coeffs, images, self.space.p)


def span_closure(
    W: Sequence,
    U: Sequence[Action],
    space: FlatSpace | None = None,
    *,
    frontier: bool = False,
    trace: TextIO | None = None,
) -> SpanBasis:
    """Basis of Sp(W^<U>) with witnesses.

    Candidates are tried basis-index major, generator-index minor. With
    ``frontier=True`` a pass only expands the vectors added by the previous
    pass; the resulting basis is identical, only cheaper to reach.
    """
    U = list(U)
    if space is None:
        if not U:
            raise ValueError("space is required when U is empty")
        space = U[0].space
    for u in U:
        if u.space.d != space.d:
            raise DimensionError("actions do not share the closure space")
    d, p = space.d, space.p
    seeds = space.check(np.asarray(W, dtype=np.int64).reshape(len(W), d)) if len(W) else np.zeros((0, d), dtype=np.int64)

    ech = EchelonBasis(d, p)
    stats = ClosureStats(d=d, actions=len(U), seeds=len(seeds), max_action_cost=max((u.cost for u in U), default=0))
    vectors: list[np.ndarray] = []
    witnesses: list[Witness] = []
    parents: list[int] = []
    depths: list[int] = []

    def accept(vec, wit, parent, depth, pass_no):
        vectors.append(vec)
        witnesses.append(wit)
        parents.append(parent)
        depths.append(depth)
        if trace is not None:
            trace.write(f"pass={pass_no} origin={wit.origin_index} word={list(wit.word)} rank={len(vectors)}\n")

    for i, w in enumerate(seeds):
        accepted, _ = ech.extend(w, coeffs=False)
        if accepted:
            accept(w, Witness(i, ()), -1, 0, 0)

    start = 0
    while vectors and U:
        stats.passes += 1
        end = len(vectors)
        src = range(start if frontier else 0, end)
        block = np.array(vectors[src.start : src.stop])
        images = []
        for u in U:
            images.append(u.apply(block))
            stats.action_ops += u.cost * len(src)
        for bi in src:
            for ui in range(len(U)):
                stats.candidates += 1
                cand = images[ui][bi - src.start]
                accepted, _ = ech.extend(cand, coeffs=False)
                if accepted:
                    wit = witnesses[bi]
                    accept(cand, Witness(wit.origin_index, wit.word + (ui,)), bi, depths[bi] + 1, stats.passes)
        if len(vectors) == end:
            break
        start = end

    stats.elimination_ops = ech.ops
    stats.rank = len(vectors)
    arr = np.array(vectors, dtype=np.int64).reshape(len(vectors), d)
    return SpanBasis(space, arr, witnesses, ech, stats, parents, depths)


def closure_decompose(basis: SpanBasis, target) -> list[tuple[int, Witness]]:
    """Nonzero ``(coefficient, witness)`` pairs summing to ``target``."""
    alpha = basis.decompose(target)
    return [(int(a), w) for a, w in zip(alpha, basis.witnesses) if a]


__all__ = [
    "ClosureStats",
    "NotInSpan",
    "SpanBasis",
    "Witness",
    "closure_decompose",
    "closure_op_bound",
    "cubic_bound",
    "replay",
    "span_closure",
]
