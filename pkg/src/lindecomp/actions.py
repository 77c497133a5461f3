"""F_p-linear actions on flattened matrix spaces.

A matrix over an algebra of dimension ``r`` is flattened row-major: entry
``(i, j)``, basis coefficient ``k`` goes to coordinate ``(i*cols + j)*r + k``.
Actions accept either a single flat vector of shape ``(d,)`` or a batch of
shape ``(m, d)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import Algebra, AlgMatrix, PrimeField, algebra_from_spec, trivial_algebra
from .errors import DimensionError, IncompatibleOperands
from .linalg import matmul_mod


@dataclass(frozen=True)
class FlatSpace:
    algebra: Algebra
    rows: int
    cols: int = 0

    def __post_init__(self):
        if self.cols == 0:
            object.__setattr__(self, "cols", self.rows)

    @classmethod
    def vector_space(cls, p: int, d: int) -> "FlatSpace":
        """Plain F_p^d, viewed as ``1 x d`` matrices over F_p."""
        return cls(trivial_algebra(PrimeField(p)), 1, d)

    @property
    def p(self) -> int:
        return self.algebra.p

    @property
    def r(self) -> int:
        return self.algebra.dim

    @property
    def d(self) -> int:
        return self.algebra.dim * self.rows * self.cols

    @property
    def n(self) -> int:
        if self.rows != self.cols:
            raise IncompatibleOperands("space of non-square matrices has no single side length")
        return self.rows

    def zero(self) -> np.ndarray:
        return np.zeros(self.d, dtype=np.int64)

    def random_vector(self, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.p, size=self.d)

    def to_spec(self) -> dict:
        return {"algebra": self.algebra.to_spec(), "rows": self.rows, "cols": self.cols}

    @classmethod
    def from_spec(cls, doc: dict) -> "FlatSpace":
        return cls(algebra_from_spec(doc["algebra"]), doc["rows"], doc["cols"])

    def check(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        if v.shape[-1:] != (self.d,) or v.ndim > 2:
            raise DimensionError(f"expected vectors of length {self.d}, got shape {v.shape}")
        return v % self.p


def flatten(M: AlgMatrix, space: FlatSpace | None = None) -> np.ndarray:
    if space is not None and (M.shape != (space.rows, space.cols) or M.algebra != space.algebra):
        raise DimensionError(f"{M.shape} matrix does not live in {space.rows}x{space.cols} space")
    return M.flat()


def unflatten(v, space: FlatSpace) -> AlgMatrix:
    v = space.check(v)
    if v.ndim != 1:
        raise DimensionError("unflatten expects a single vector")
    return AlgMatrix(space.algebra, v.reshape(space.rows, space.cols, space.r))


# --------------------------------------------------------------------------


class Action:
    """Base class. Subclasses set ``space`` and implement ``_apply``."""

    space: FlatSpace

    def apply(self, v) -> np.ndarray:
        v = self.space.check(v)
        single = v.ndim == 1
        out = self._apply(v[None, :] if single else v)
        return out[0] if single else out

    def __call__(self, v) -> np.ndarray:
        return self.apply(v)

    @property
    def cost(self) -> int:
        """Field multiply-adds per application to one vector."""
        raise NotImplementedError

    def _apply(self, V: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


def _default_space(M: AlgMatrix, space: FlatSpace | None) -> FlatSpace:
    return space if space is not None else FlatSpace(M.algebra, M.n, M.n)


def _left(space: FlatSpace, block: np.ndarray, V: np.ndarray) -> np.ndarray:
    m = V.shape[0]
    rows, cols, r = space.rows, space.cols, space.r
    X = V.reshape(m, rows, cols, r).transpose(1, 3, 0, 2).reshape(rows * r, m * cols)
    Y = matmul_mod(block, X, space.p)
    return np.ascontiguousarray(Y.reshape(rows, r, m, cols).transpose(2, 0, 3, 1)).reshape(m, -1)


def _right(space: FlatSpace, block: np.ndarray, V: np.ndarray) -> np.ndarray:
    m = V.shape[0]
    rows, cols, r = space.rows, space.cols, space.r
    return matmul_mod(V.reshape(m * rows, cols * r), block, space.p).reshape(m, -1)


@dataclass(frozen=True, eq=False)
class LeftMul(Action):
    matrix: AlgMatrix
    space: FlatSpace = None

    def __post_init__(self):
        object.__setattr__(self, "space", _default_space(self.matrix, self.space))
        if self.matrix.shape != (self.space.rows, self.space.rows):
            raise IncompatibleOperands(f"left factor {self.matrix.shape} does not fit {self.space.rows} rows")

    @cached_property
    def _block(self):
        return self.matrix.regular()

    @property
    def cost(self) -> int:
        s = self.space
        return Algebra.mul_cost(s.rows, s.rows, s.cols, s.r)

    def _apply(self, V):
        return _left(self.space, self._block, V)

    def to_json(self):
        return {"kind": "left_mul", "matrix": self.matrix.tolist()}


@dataclass(frozen=True, eq=False)
class RightMul(Action):
    matrix: AlgMatrix
    space: FlatSpace = None

    def __post_init__(self):
        object.__setattr__(self, "space", _default_space(self.matrix, self.space))
        if self.matrix.shape != (self.space.cols, self.space.cols):
            raise IncompatibleOperands(f"right factor {self.matrix.shape} does not fit {self.space.cols} cols")

    @cached_property
    def _block(self):
        return self.space.algebra.right_block(self.matrix.data)

    @property
    def cost(self) -> int:
        s = self.space
        return Algebra.mul_cost(s.rows, s.cols, s.cols, s.r)

    def _apply(self, V):
        return _right(self.space, self._block, V)

    def to_json(self):
        return {"kind": "right_mul", "matrix": self.matrix.tolist()}


@dataclass(frozen=True, eq=False)
class Sandwich(Action):
    """``x -> left @ x @ right``."""

    left: AlgMatrix
    right: AlgMatrix
    space: FlatSpace = None

    def __post_init__(self):
        if self.space is None:
            object.__setattr__(self, "space", FlatSpace(self.left.algebra, self.left.n, self.right.n))
        object.__setattr__(self, "_l", LeftMul(self.left, self.space))
        object.__setattr__(self, "_r", RightMul(self.right, self.space))

    @property
    def cost(self) -> int:
        return self._l.cost + self._r.cost

    def _apply(self, V):
        return self._r._apply(self._l._apply(V))

    def to_json(self):
        return {"kind": "sandwich", "left": self.left.tolist(), "right": self.right.tolist()}


@dataclass(frozen=True, eq=False)
class Conjugation(Action):
    """``x -> g x g^-1``. Raises ``NotInvertible`` for singular ``g``."""

    matrix: AlgMatrix
    space: FlatSpace = None

    def __post_init__(self):
        object.__setattr__(self, "space", _default_space(self.matrix, self.space))
        inv = self.matrix.inverse()
        object.__setattr__(self, "inverse", inv)
        object.__setattr__(self, "_s", Sandwich(self.matrix, inv, self.space))

    @property
    def cost(self) -> int:
        return self._s.cost

    def _apply(self, V):
        return self._s._apply(V)

    def to_json(self):
        return {"kind": "conjugation", "matrix": self.matrix.tolist()}


@dataclass(frozen=True, eq=False)
class ExplicitLinear(Action):
    """``v -> M v`` for an explicit ``d x d`` matrix over F_p."""

    matrix: np.ndarray
    space: FlatSpace

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=np.int64) % self.space.p
        if M.shape != (self.space.d, self.space.d):
            raise DimensionError(f"explicit action must be {self.space.d}x{self.space.d}, got {M.shape}")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @cached_property
    def _MT(self):
        return np.ascontiguousarray(self.matrix.T)

    @property
    def cost(self) -> int:
        return self.space.d ** 2

    def _apply(self, V):
        return matmul_mod(V, self._MT, self.space.p)

    def to_json(self):
        return {"kind": "explicit", "matrix": self.matrix.tolist()}


@dataclass(frozen=True, eq=False)
class Compose(Action):
    """``Compose([a, b])`` applies ``b`` first, then ``a``."""

    actions: tuple
    space: FlatSpace = None

    def __post_init__(self):
        acts = tuple(self.actions)
        if not acts:
            raise ValueError("Compose needs at least one action")
        object.__setattr__(self, "actions", acts)
        if self.space is None:
            object.__setattr__(self, "space", acts[0].space)

    @property
    def cost(self) -> int:
        return sum(a.cost for a in self.actions)

    def _apply(self, V):
        for a in reversed(self.actions):
            V = a._apply(V)
        return V

    def to_json(self):
        return {"kind": "compose", "actions": [a.to_json() for a in self.actions]}


def apply(action: Action, v) -> np.ndarray:
    return action.apply(v)


def action_from_json(doc: dict, space: FlatSpace) -> Action:
    kind = doc["kind"]
    mat = lambda key: AlgMatrix(space.algebra, doc[key])  # noqa: E731
    if kind == "left_mul":
        return LeftMul(mat("matrix"), space)
    if kind == "right_mul":
        return RightMul(mat("matrix"), space)
    if kind == "sandwich":
        return Sandwich(mat("left"), mat("right"), space)
    if kind == "conjugation":
        return Conjugation(mat("matrix"), space)
    if kind == "explicit":
        return ExplicitLinear(np.array(doc["matrix"], dtype=np.int64), space)
    if kind == "compose":
        return Compose(tuple(action_from_json(a, space) for a in doc["actions"]), space)
    raise ValueError(f"unknown action kind {kind!r}")


def to_matrix(action: Action) -> np.ndarray:
    """Materialize an action as its ``d x d`` matrix over F_p (columns are
    images of the standard basis)."""
    d = action.space.d
    return np.ascontiguousarray(action.apply(np.eye(d, dtype=np.int64)).T)


def materialize(action: Action) -> ExplicitLinear:
    return ExplicitLinear(to_matrix(action), action.space)


@dataclass
class CommuteResult:
    ok: bool
    counterexample: tuple | None = None

    def __bool__(self):
        return self.ok


def commute_check(U: Sequence[Action], W: Sequence[Action], trials: int = 3, rng: np.random.Generator | None = None) -> CommuteResult:
    """Randomized test that every ``u`` in U commutes with every ``w`` in W.

    On failure the counterexample is ``(i, j, v)``: indices into U and W and
    the vector that separates ``u(w(v))`` from ``w(u(v))``.
    """
    if not U or not W:
        return CommuteResult(True)
    rng = rng if rng is not None else np.random.default_rng(0)
    space = U[0].space
    V = rng.integers(0, space.p, size=(trials, space.d))
    for i, u in enumerate(U):
        for j, w in enumerate(W):
            lhs = u.apply(w.apply(V))
            rhs = w.apply(u.apply(V))
            bad = np.flatnonzero(np.any(lhs != rhs, axis=1))
            if bad.size:
                return CommuteResult(False, (i, j, V[bad[0]]))
    return CommuteResult(True)
