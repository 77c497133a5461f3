"""Prime fields, structure-constant algebras and matrices over them.

An :class:`Algebra` of dimension ``r`` over F_p stores its multiplication as a
dense ``(r, r, r)`` tensor ``T`` with ``e_i * e_j = sum_k T[i, j, k] e_k``.
An :class:`AlgMatrix` keeps its entries as an ``(rows, cols, r)`` integer
array, so the row-major flattening used by :mod:`lindecomp.actions` is just
``data.reshape(-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DivisionByZero,
    GroupTooLarge,
    IncompatibleOperands,
    NotInvertible,
)
from .linalg import inv_mod, matmul_mod

MAX_MODULUS = 2**31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise ValueError(f"modulus {self.p!r} is not prime")
        if self.p >= MAX_MODULUS:
            raise ValueError(f"modulus must be below 2**31, got {self.p}")
        object.__setattr__(self, "p", int(self.p))

    def __call__(self, x: int) -> int:
        return int(x) % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise DivisionByZero(f"0 has no inverse mod {self.p}")
        return pow(a, -1, self.p)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def elements(self) -> range:
        return range(self.p)


# --------------------------------------------------------------------------
# algebras


class Algebra:
    """Finite-dimensional associative unital algebra over F_p."""

    def __init__(self, field: PrimeField, structure_constants, unit, label: str = "", spec: dict | None = None):
        T = np.asarray(structure_constants, dtype=np.int64) % field.p
        r = T.shape[0]
        if T.shape != (r, r, r) or r < 1:
            raise ValueError(f"structure constants must have shape (r, r, r), got {T.shape}")
        unit = np.asarray(unit, dtype=np.int64) % field.p
        if unit.shape != (r,):
            raise ValueError("unit must be a length-r coefficient vector")
        T.setflags(write=False)
        unit.setflags(write=False)
        self.field = field
        self.p = field.p
        self.dim = r
        self.T = T
        self.unit = unit
        self.label = label or f"explicit[{r}]"
        self._spec = spec

    def __repr__(self):
        return f"Algebra({self.label}, p={self.p}, dim={self.dim})"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Algebra):
            return NotImplemented
        return (
            self.p == other.p
            and self.dim == other.dim
            and np.array_equal(self.T, other.T)
            and np.array_equal(self.unit, other.unit)
        )

    def __hash__(self):
        return hash((self.p, self.dim, self.T.tobytes()))

    # -- element level -----------------------------------------------------

    def mul(self, a, b) -> np.ndarray:
        """Product of two coefficient vectors."""
        return matmul_mod(np.asarray(b, dtype=np.int64), self.left_matrix(a).T, self.p)

    def left_matrix(self, a) -> np.ndarray:
        """``L`` with ``a * y == L @ y`` on coefficient vectors."""
        a = np.asarray(a, dtype=np.int64)
        return matmul_mod(a, self._T_left, self.p).reshape(self.dim, self.dim).T

    def right_matrix(self, b) -> np.ndarray:
        """``R`` with ``x * b == R @ x``."""
        b = np.asarray(b, dtype=np.int64)
        return matmul_mod(b, self._T_right, self.p).reshape(self.dim, self.dim).T

    @cached_property
    def _T_left(self) -> np.ndarray:
        # rows u, columns (s, t): T[u, s, t]
        return self.T.reshape(self.dim, self.dim * self.dim)

    @cached_property
    def _T_right(self) -> np.ndarray:
        # rows s, columns (u, t): T[u, s, t]
        return np.ascontiguousarray(self.T.transpose(1, 0, 2)).reshape(self.dim, self.dim * self.dim)

    def element(self, coeffs) -> "AlgebraElement":
        return AlgebraElement(self, coeffs)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, np.zeros(self.dim, dtype=np.int64))

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, self.unit)

    def basis_element(self, i: int) -> "AlgebraElement":
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return AlgebraElement(self, v)

    def random_element(self, rng: np.random.Generator) -> "AlgebraElement":
        return AlgebraElement(self, rng.integers(0, self.p, size=self.dim))

    @cached_property
    def is_commutative(self) -> bool:
        return bool(np.array_equal(self.T, self.T.transpose(1, 0, 2)))

    # -- matrix level ------------------------------------------------------

    def left_block(self, X: np.ndarray) -> np.ndarray:
        """Matrix of ``Y -> X Y`` on ``(b, c, r)`` data, as an ``(a r, b r)`` block.

        Row index is ``(i, t)``, column index ``(j, s)``; it acts on ``Y``
        rearranged so that rows are ``(j, s)`` and columns are ``c``.
        """
        a, b, r = X.shape
        L = matmul_mod(X.reshape(a * b, r), self._T_left, self.p).reshape(a, b, r, r)  # i j s t
        return np.ascontiguousarray(L.transpose(0, 3, 1, 2)).reshape(a * r, b * r)

    def right_block(self, Y: np.ndarray) -> np.ndarray:
        """Matrix of ``X -> X Y`` as a ``(b r, c r)`` block acting from the right
        on ``X.reshape(a, b r)``."""
        b, c, r = Y.shape
        R = matmul_mod(Y.reshape(b * c, r), self._T_right, self.p).reshape(b, c, r, r)  # j k u t
        return np.ascontiguousarray(R.transpose(0, 2, 1, 3)).reshape(b * r, c * r)

    def matmul_data(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        a, b, r = X.shape
        b2, c, _ = Y.shape
        if b != b2:
            raise IncompatibleOperands(f"cannot multiply {a}x{b} by {b2}x{c}")
        if r == 1:
            return matmul_mod(X[:, :, 0], Y[:, :, 0], self.p)[:, :, None]
        if a <= c:
            out = matmul_mod(self.left_block(X), np.ascontiguousarray(Y.transpose(0, 2, 1)).reshape(b * r, c), self.p)
            return np.ascontiguousarray(out.reshape(a, r, c).transpose(0, 2, 1))
        out = matmul_mod(X.reshape(a, b * r), self.right_block(Y), self.p)
        return out.reshape(a, c, r)

    @staticmethod
    def mul_cost(a: int, b: int, c: int, r: int) -> int:
        """Field multiply-adds for an ``a x b`` by ``b x c`` product."""
        return a * b * c * r * r

    # -- validation --------------------------------------------------------

    def check_associative(self) -> bool:
        """Exhaustive check of ``(e_i e_j) e_k == e_i (e_j e_k)``."""
        r, p = self.dim, self.p
        flat = self.T.reshape(r * r, r)
        lhs = matmul_mod(flat, self._T_left, p).reshape(r, r, r, r)  # (i j) k t
        # e_i (e_j e_k): sum_u T[j,k,u] T[i,u,t]
        Ti = np.ascontiguousarray(self.T.transpose(1, 0, 2)).reshape(r, r * r)  # u, (i t)
        rhs = matmul_mod(flat, Ti, p).reshape(r, r, r, r)  # j k i t
        return bool(np.array_equal(lhs, rhs.transpose(2, 0, 1, 3)))

    def check_unit(self) -> bool:
        eye = np.eye(self.dim, dtype=np.int64)
        return bool(
            np.array_equal(self.left_matrix(self.unit), eye)
            and np.array_equal(self.right_matrix(self.unit), eye)
        )

    # -- serialization -----------------------------------------------------

    def to_spec(self) -> dict:
        if self._spec is not None:
            return dict(self._spec)
        return {
            "field": self.p,
            "kind": "explicit",
            "label": self.label,
            "dim": self.dim,
            "structure_constants": self.T.tolist(),
            "unit": self.unit.tolist(),
        }


def algebra_from_spec(doc: dict) -> Algebra:
    """Inverse of :meth:`Algebra.to_spec`.

    Schema::

        {"field": p, "kind": "trivial"}
        {"field": p, "kind": "group_algebra", "generators": [[image list], ...]}
        {"field": p, "kind": "explicit", "dim": r,
         "structure_constants": r x r x r nested list, "unit": [r ints]}
    """
    F = PrimeField(int(doc["field"]))
    kind = doc["kind"]
    if kind == "trivial":
        return trivial_algebra(F)
    if kind == "group_algebra":
        return group_algebra(F, [tuple(g) for g in doc["generators"]], max_order=doc.get("max_order", 120))
    if kind == "explicit":
        return Algebra(F, doc["structure_constants"], doc["unit"], label=doc.get("label", ""))
    raise ValueError(f"unknown algebra kind {kind!r}")


def trivial_algebra(field: PrimeField) -> Algebra:
    return Algebra(field, [[[1]]], [1], label=f"F_{field.p}", spec={"field": field.p, "kind": "trivial"})


# --------------------------------------------------------------------------
# permutation groups and group algebras

Perm = tuple[int, ...]


def perm_compose(g: Perm, h: Perm) -> Perm:
    """``(g h)(x) = g(h(x))``."""
    return tuple(g[x] for x in h)


def perm_from_cycles(cycles: Iterable[Sequence[int]], degree: int) -> Perm:
    """Permutation from 1-based cycle notation, e.g. ``[(1, 2, 3)]``."""
    img = list(range(degree))
    for cyc in cycles:
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            img[a - 1] = b - 1
    return tuple(img)


def enumerate_group(generators: Sequence[Perm], max_order: int = 120) -> list[Perm]:
    """All elements of the generated group, identity first, in BFS order."""
    if not generators:
        raise ValueError("need at least one generator (use the identity for the trivial group)")
    degree = len(generators[0])
    if any(len(g) != degree or sorted(g) != list(range(degree)) for g in generators):
        raise ValueError("generators must be permutations of a common degree")
    ident = tuple(range(degree))
    elements = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in generators:
                y = perm_compose(g, x)
                if y not in seen:
                    seen.add(y)
                    elements.append(y)
                    nxt.append(y)
                    if len(elements) > max_order:
                        raise GroupTooLarge(f"group order exceeds {max_order}")
        frontier = nxt
    return elements


def group_algebra(field: PrimeField, generators: Sequence[Perm], max_order: int = 120, label: str = "") -> Algebra:
    """F_p[G] for the permutation group generated by ``generators``."""
    gens = [tuple(int(x) for x in g) for g in generators]
    elements = enumerate_group(gens, max_order)
    index = {g: i for i, g in enumerate(elements)}
    r = len(elements)
    T = np.zeros((r, r, r), dtype=np.int64)
    for i, g in enumerate(elements):
        for j, h in enumerate(elements):
            T[i, j, index[perm_compose(g, h)]] = 1
    unit = np.zeros(r, dtype=np.int64)
    unit[0] = 1
    alg = Algebra(
        field,
        T,
        unit,
        label=label or f"F_{field.p}[G|{r}]",
        spec={"field": field.p, "kind": "group_algebra", "generators": [list(g) for g in gens], "max_order": max_order},
    )
    alg.group_elements = elements
    return alg


def cyclic_group_algebra(field: PrimeField, k: int) -> Algebra:
    gen = tuple((i + 1) % k for i in range(k)) if k > 1 else (0,)
    return group_algebra(field, [gen], label=f"F_{field.p}[C_{k}]")


def symmetric_group_algebra(field: PrimeField, k: int) -> Algebra:
    if k < 2:
        return group_algebra(field, [(0,)], label=f"F_{field.p}[S_1]")
    gens = [perm_from_cycles([(1, 2)], k), perm_from_cycles([tuple(range(1, k + 1))], k)]
    return group_algebra(field, gens, label=f"F_{field.p}[S_{k}]")


def alternating_group_algebra(field: PrimeField, k: int) -> Algebra:
    if k < 3:
        return group_algebra(field, [tuple(range(max(k, 1)))], label=f"F_{field.p}[A_{k}]")
    if k == 5:
        gens = [perm_from_cycles([(1, 2, 3, 4, 5)], 5), perm_from_cycles([(1, 2, 3)], 5)]
    else:
        gens = [perm_from_cycles([(1, 2, i)], k) for i in range(3, k + 1)]
    return group_algebra(field, gens, label=f"F_{field.p}[A_{k}]")


def truncated_polynomial_algebra(field: PrimeField, k: int) -> Algebra:
    """F_p[t] / (t^k)."""
    T = np.zeros((k, k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k - i):
            T[i, j, i + j] = 1
    unit = np.zeros(k, dtype=np.int64)
    unit[0] = 1
    return Algebra(field, T, unit, label=f"F_{field.p}[t]/(t^{k})")


def matrix_algebra(field: PrimeField, m: int) -> Algebra:
    """Mat_m(F_p) with basis ``E_ij`` at index ``i*m + j``."""
    r = m * m
    T = np.zeros((r, r, r), dtype=np.int64)
    for i in range(m):
        for j in range(m):
            for l in range(m):
                T[i * m + j, j * m + l, i * m + l] = 1
    unit = np.zeros(r, dtype=np.int64)
    unit[[i * m + i for i in range(m)]] = 1
    return Algebra(field, T, unit, label=f"Mat_{m}(F_{field.p})")


_NAMED = {
    "trivial": lambda F, k: trivial_algebra(F),
    "cyclic": cyclic_group_algebra,
    "symmetric": symmetric_group_algebra,
    "alternating": alternating_group_algebra,
    "truncpoly": truncated_polynomial_algebra,
    "matrix": matrix_algebra,
}


def algebra_from_name(p: int, name: str) -> Algebra:
    """Build an algebra from a short name: ``trivial``, ``cyclic:3``,
    ``symmetric:3``, ``alternating:5`` (alias ``a5``), ``truncpoly:4``,
    ``matrix:2``."""
    F = PrimeField(p)
    if name == "a5":
        name = "alternating:5"
    kind, _, arg = name.partition(":")
    if kind not in _NAMED:
        raise ValueError(f"unknown algebra name {name!r}; choose from {sorted(_NAMED)}")
    return _NAMED[kind](F, int(arg) if arg else 0)


# --------------------------------------------------------------------------
# elements and matrices


def _check_same(x: Algebra, y: Algebra):
    if x is not y and x != y:
        raise IncompatibleOperands("operands live in different algebras")


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    algebra: Algebra
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.int64) % self.algebra.p
        if c.shape != (self.algebra.dim,):
            raise IncompatibleOperands(f"expected {self.algebra.dim} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.algebra == other.algebra and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def __add__(self, other):
        _check_same(self.algebra, other.algebra)
        return AlgebraElement(self.algebra, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _check_same(self.algebra, other.algebra)
        return AlgebraElement(self.algebra, self.coeffs - other.coeffs)

    def __neg__(self):
        return AlgebraElement(self.algebra, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return AlgebraElement(self.algebra, self.coeffs * (int(other) % self.algebra.p))
        _check_same(self.algebra, other.algebra)
        return AlgebraElement(self.algebra, self.algebra.mul(self.coeffs, other.coeffs))

    def __rmul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self * other
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.coeffs.any()


@dataclass(frozen=True, eq=False)
class AlgMatrix:
    """``rows x cols`` matrix over an :class:`Algebra`; usually square."""

    algebra: Algebra
    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.int64) % self.algebra.p
        if d.ndim != 3 or d.shape[2] != self.algebra.dim:
            raise IncompatibleOperands(f"data must have shape (rows, cols, {self.algebra.dim}), got {d.shape}")
        d.setflags(write=False)
        object.__setattr__(self, "data", d)

    # -- constructors --------------------------------------------------------

    @classmethod
    def zeros(cls, algebra: Algebra, rows: int, cols: int | None = None) -> "AlgMatrix":
        return cls(algebra, np.zeros((rows, rows if cols is None else cols, algebra.dim), dtype=np.int64))

    @classmethod
    def identity(cls, algebra: Algebra, n: int) -> "AlgMatrix":
        d = np.zeros((n, n, algebra.dim), dtype=np.int64)
        for i in range(n):
            d[i, i] = algebra.unit
        return cls(algebra, d)

    @classmethod
    def from_scalars(cls, algebra: Algebra, M) -> "AlgMatrix":
        """Embed an F_p matrix via ``c -> c * 1``."""
        M = np.asarray(M, dtype=np.int64)
        return cls(algebra, M[:, :, None] * algebra.unit[None, None, :])

    @classmethod
    def from_entries(cls, algebra: Algebra, entries: Sequence[Sequence[AlgebraElement]]) -> "AlgMatrix":
        return cls(algebra, np.array([[e.coeffs for e in row] for row in entries], dtype=np.int64))

    @classmethod
    def random(cls, algebra: Algebra, rows: int, cols: int | None, rng: np.random.Generator) -> "AlgMatrix":
        cols = rows if cols is None else cols
        return cls(algebra, rng.integers(0, algebra.p, size=(rows, cols, algebra.dim)))

    # -- shape ---------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    @property
    def n(self) -> int:
        rows, cols = self.shape
        if rows != cols:
            raise IncompatibleOperands(f"matrix is not square: {rows}x{cols}")
        return rows

    @property
    def p(self) -> int:
        return self.algebra.p

    def flat(self) -> np.ndarray:
        return self.data.reshape(-1).copy()

    def entry(self, i: int, j: int) -> AlgebraElement:
        return AlgebraElement(self.algebra, self.data[i, j])

    def block(self, rows: slice, cols: slice) -> "AlgMatrix":
        return AlgMatrix(self.algebra, self.data[rows, cols])

    def tolist(self) -> list:
        return self.data.tolist()

    # -- arithmetic ------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, AlgMatrix):
            return NotImplemented
        return self.algebra == other.algebra and np.array_equal(self.data, other.data)

    __hash__ = None

    def _check(self, other: "AlgMatrix", same_shape: bool):
        if not isinstance(other, AlgMatrix):
            raise IncompatibleOperands(f"expected AlgMatrix, got {type(other).__name__}")
        _check_same(self.algebra, other.algebra)
        if same_shape and self.shape != other.shape:
            raise IncompatibleOperands(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check(other, True)
        return AlgMatrix(self.algebra, self.data + other.data)

    def __sub__(self, other):
        self._check(other, True)
        return AlgMatrix(self.algebra, self.data - other.data)

    def __neg__(self):
        return AlgMatrix(self.algebra, -self.data)

    def scale(self, c: int) -> "AlgMatrix":
        return AlgMatrix(self.algebra, self.data * (int(c) % self.p))

    def __mul__(self, c):
        if isinstance(c, (int, np.integer)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other, False)
        if self.shape[1] != other.shape[0]:
            raise IncompatibleOperands(f"cannot multiply {self.shape} by {other.shape}")
        return AlgMatrix(self.algebra, self.algebra.matmul_data(self.data, other.data))

    def __pow__(self, k: int) -> "AlgMatrix":
        if k < 0:
            return self.inverse() ** (-k)
        result = AlgMatrix.identity(self.algebra, self.n)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    # -- inversion -------------------------------------------------------------

    def regular(self) -> np.ndarray:
        """Left regular representation: the ``(n r, n r)`` F_p matrix of
        ``Y -> self @ Y`` on column vectors over the algebra."""
        return self.algebra.left_block(self.data)

    def inverse(self) -> "AlgMatrix":
        n, r = self.n, self.algebra.dim
        try:
            inv = inv_mod(self.regular(), self.p)
        except NotInvertible:
            raise NotInvertible("matrix is not invertible over the algebra") from None
        E = np.zeros((n * r, n), dtype=np.int64)
        for k in range(n):
            E[k * r : (k + 1) * r, k] = self.algebra.unit
        cols = matmul_mod(inv, E, self.p)  # rows (j, s), columns k
        return AlgMatrix(self.algebra, cols.reshape(n, r, n).transpose(0, 2, 1))

    def is_invertible(self) -> bool:
        try:
            self.inverse()
        except NotInvertible:
            return False
        return True


# --------------------------------------------------------------------------
# element orders


@lru_cache(maxsize=None)
def _gl_order_factors(p: int, m: int) -> tuple[int, dict[int, int]]:
    from sympy import factorint

    order = 1
    factors: dict[int, int] = {}
    for i in range(m):
        order *= p**m - p**i
    factors[p] = m * (m - 1) // 2
    for i in range(1, m + 1):
        for q, e in factorint(p**i - 1).items():
            factors[q] = factors.get(q, 0) + e
    return order, {q: e for q, e in factors.items() if e}


def _matpow_mod(M: np.ndarray, k: int, p: int) -> np.ndarray:
    result = np.eye(M.shape[0], dtype=np.int64)
    base = M % p
    while k:
        if k & 1:
            result = matmul_mod(result, base, p)
        base = matmul_mod(base, base, p)
        k >>= 1
    return result


def element_order(M: AlgMatrix) -> int:
    """Multiplicative order of an invertible matrix over the algebra.

    Works through the faithful regular representation in GL_{nr}(F_p),
    whose order is known in closed form.
    """
    R = M.regular()
    m, p = R.shape[0], M.p
    order, factors = _gl_order_factors(p, m)
    eye = np.eye(m, dtype=np.int64)
    if not np.array_equal(_matpow_mod(R, order, p), eye):
        raise NotInvertible("element is not invertible")
    for q in factors:
        while order % q == 0 and np.array_equal(_matpow_mod(R, order // q, p), eye):
            order //= q
    return order
