"""Exact dense linear algebra over F_p.

Vectors are plain ``int64`` numpy arrays with entries in ``[0, p)``; the
modulus travels alongside them rather than inside a wrapper type.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, NoSolution, NotInSpan, NotInvertible

# float64 represents every integer below 2**53 exactly, so BLAS can be used
# for modular products as long as each partial sum stays below this bound.
_FLOAT_EXACT = 2**53
_INT_LIMIT = 2**63 - 1


def as_vector(v, p: int, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(v, dtype=np.int64) % p
    if arr.ndim != 1:
        raise DimensionError(f"expected a 1-d vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionError(f"expected length {dim}, got {arr.shape[0]}")
    return arr


def matmul_mod(a, b, p: int) -> np.ndarray:
    """``(a @ b) % p`` for integer arrays with entries in ``[0, p)``.

    The inner dimension is split into chunks small enough that no partial
    sum can lose precision.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    k = a.shape[-1]
    sq = (p - 1) ** 2
    if sq < _FLOAT_EXACT:
        chunk = _FLOAT_EXACT // sq
        if k <= chunk:
            return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64) % p
        use_float = True
    else:
        chunk = max(1, _INT_LIMIT // sq)
        use_float = False
    out = None
    for start in range(0, k, chunk):
        sl = slice(start, start + chunk)
        if use_float:
            part = np.rint(a[..., sl].astype(np.float64) @ b[sl].astype(np.float64)).astype(np.int64)
        else:
            part = a[..., sl] @ b[sl]
        part %= p
        out = part if out is None else (out + part) % p
    if out is None:
        return (a @ b) % p
    return out


def rref(M, p: int):
    """Reduced row echelon form of ``M`` over F_p.

    Returns ``(R, pivots)``. Pivot choice is the first nonzero entry in
    column order.
    """
    R = np.array(M, dtype=np.int64) % p
    if R.ndim != 2:
        raise DimensionError("rref expects a 2-d array")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] = R[r] * pow(int(R[r, c]), -1, p) % p
        col = R[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            R[hit] = (R[hit] - np.outer(col[hit], R[r])) % p
        pivots.append(c)
        r += 1
    return R, pivots


def rank(M, p: int) -> int:
    return len(rref(M, p)[1])


def nullspace(M, p: int) -> np.ndarray:
    """Basis of ``{x : M x = 0}`` as the rows of the returned array."""
    R, pivots = rref(M, p)
    cols = R.shape[1]
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, c in enumerate(pivots):
            basis[k, c] = (-R[i, f]) % p
    return basis


def solve_linear(A, b, p: int):
    """Solve ``A x = b`` over F_p.

    Returns ``(x, kernel)`` where ``x`` is one solution and the rows of
    ``kernel`` span the nullspace of ``A``. Raises ``NoSolution`` when the
    system is inconsistent.
    """
    A = np.asarray(A, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    if A.ndim != 2 or b.shape != (A.shape[0],):
        raise DimensionError(f"shape mismatch: A {A.shape}, b {b.shape}")
    rows, cols = A.shape
    R, pivots = rref(np.hstack([A, b[:, None]]), p)
    if pivots and pivots[-1] == cols:
        raise NoSolution("inconsistent linear system")
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = R[i, cols]
    pivset = set(pivots)
    free = [c for c in range(cols) if c not in pivset]
    kernel = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        kernel[k, f] = 1
        for i, c in enumerate(pivots):
            kernel[k, c] = (-R[i, f]) % p
    return x, kernel


def inv_mod(M, p: int) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64) % p
    n = M.shape[0]
    if M.shape != (n, n):
        raise DimensionError(f"inverse of non-square matrix {M.shape}")
    R, pivots = rref(np.hstack([M, np.eye(n, dtype=np.int64)]), p)
    if pivots[:n] != list(range(n)):
        raise NotInvertible("matrix is singular")
    return R[:, n:].copy()


class EchelonBasis:
    """Incrementally built basis kept in reduced row echelon form.

    Each echelon row remembers its expression in the *original* accepted
    vectors, so membership queries return coefficients over the vectors the
    caller actually supplied.

    ``ops`` counts multiply-add field operations spent so far.
    """

    def __init__(self, dim: int, p: int):
        self.dim = dim
        self.p = p
        self._rows = np.zeros((dim, dim), dtype=np.int64)
        self._coef = np.zeros((dim, dim), dtype=np.int64)
        self._orig = np.zeros((dim, dim), dtype=np.int64)
        self._piv = np.zeros(dim, dtype=np.int64)
        self.rank = 0
        self.ops = 0

    def copy(self) -> "EchelonBasis":
        new = EchelonBasis.__new__(EchelonBasis)
        new.dim, new.p, new.rank, new.ops = self.dim, self.p, self.rank, self.ops
        new._rows = self._rows.copy()
        new._coef = self._coef.copy()
        new._orig = self._orig.copy()
        new._piv = self._piv.copy()
        return new

    @property
    def pivots(self) -> list[int]:
        return sorted(int(c) for c in self._piv[: self.rank])

    @property
    def rows(self) -> np.ndarray:
        order = np.argsort(self._piv[: self.rank], kind="stable")
        return self._rows[: self.rank][order].copy()

    @property
    def originals(self) -> np.ndarray:
        return self._orig[: self.rank].copy()

    def _reduce(self, v: np.ndarray):
        k = self.rank
        f = v[self._piv[:k]]
        if k:
            res = (v - matmul_mod(f, self._rows[:k], self.p)) % self.p
        else:
            res = v.copy()
        self.ops += k * self.dim
        return f, res

    def extend(self, v, coeffs: bool = True):
        """Try to add ``v``.

        Returns ``(accepted, reduction_coeffs)``. When ``v`` is already in
        the span, ``reduction_coeffs`` expresses it over ``originals``
        (``None`` when ``coeffs`` is false or ``v`` was accepted).
        """
        v = as_vector(v, self.p, self.dim)
        p, k = self.p, self.rank
        f, res = self._reduce(v)
        nz = np.flatnonzero(res)
        if nz.size == 0:
            if not coeffs:
                return False, None
            self.ops += k * k
            return False, matmul_mod(f, self._coef[:k, :k], p) if k else np.zeros(0, dtype=np.int64)
        col = int(nz[0])
        inv = pow(int(res[col]), -1, p)
        new_row = res * inv % p
        new_coef = np.zeros(k + 1, dtype=np.int64)
        if k:
            new_coef[:k] = (-matmul_mod(f, self._coef[:k, :k], p)) % p
        new_coef[k] = 1
        new_coef = new_coef * inv % p
        factors = self._rows[:k, col].copy()
        hit = np.flatnonzero(factors)
        if hit.size:
            fh = factors[hit]
            self._rows[hit] = (self._rows[hit] - np.outer(fh, new_row)) % p
            self._coef[hit, : k + 1] = (self._coef[hit, : k + 1] - np.outer(fh, new_coef)) % p
        self._rows[k] = new_row
        self._coef[k, : k + 1] = new_coef
        self._orig[k] = v
        self._piv[k] = col
        self.rank = k + 1
        self.ops += k * k + self.dim + k + hit.size * (self.dim + k + 1)
        return True, None

    def contains(self, v) -> bool:
        v = as_vector(v, self.p, self.dim)
        return not np.any(self._reduce(v)[1])

    def decompose(self, v) -> np.ndarray:
        """Coefficients ``a`` with ``a @ originals == v``; exact, re-checked."""
        v = as_vector(v, self.p, self.dim)
        k, p = self.rank, self.p
        f, res = self._reduce(v)
        if np.any(res):
            raise NotInSpan("vector is outside the span of the basis")
        if k == 0:
            return np.zeros(0, dtype=np.int64)
        alpha = matmul_mod(f, self._coef[:k, :k], p)
        self.ops += k * k + k * self.dim
        if not np.array_equal(matmul_mod(alpha, self._orig[:k], p), v):
            raise AssertionError("re-substitution check failed")
        return alpha


def extend_basis(basis: EchelonBasis, v):
    """Functional form of ``EchelonBasis.extend``: the input is not modified."""
    new = basis.copy()
    accepted, coeffs = new.extend(v)
    return (new if accepted else basis), accepted, coeffs


def decompose(basis: EchelonBasis, v) -> np.ndarray:
    return basis.decompose(v)
