"""Independent oracles shared by the test modules.

Everything here is plain Python integer arithmetic on nested lists, so it
shares no code path with the numpy routines under test.
"""

from __future__ import annotations

import itertools

import numpy as np
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

# One "criterion N [PASS|FAIL] ..." line per acceptance criterion, echoed in
# the terminal summary so the verdicts survive output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

SMALL_PRIMES = (2, 3, 5, 7, 11, 13)


def brute_inverse(a: int, p: int) -> int:
    return next(x for x in range(p) if (a * x) % p == 1)


def naive_matmul(A, B, p: int):
    A, B = [[int(x) for x in row] for row in A], [[int(x) for x in row] for row in B]
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) % p for j in range(len(B[0]))] for i in range(len(A))]


def naive_matvec(M, v, p: int):
    return tuple(sum(int(M[i][j]) * int(v[j]) for j in range(len(v))) % p for i in range(len(M)))


def perm_product(g, h):
    """``(g h)(x) = g(h(x))``."""
    return tuple(g[h[x]] for x in range(len(h)))


def group_closure(gens):
    ident = tuple(range(len(gens[0])))
    seen = {ident}
    todo = [ident]
    while todo:
        x = todo.pop()
        for g in gens:
            y = perm_product(g, x)
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def group_algebra_matmul(elements, p: int, X, Y):
    """Product of matrices over F_p[G]; entries are coefficient arrays indexed
    like ``elements``. Computed straight from the group law."""
    index = {g: i for i, g in enumerate(elements)}
    rows, inner, r = X.shape
    cols = Y.shape[1]
    out = [[[0] * r for _ in range(cols)] for _ in range(rows)]
    for i in range(rows):
        for k in range(cols):
            acc = out[i][k]
            for j in range(inner):
                for a, g in enumerate(elements):
                    xa = int(X[i, j, a])
                    if not xa:
                        continue
                    for b, h in enumerate(elements):
                        yb = int(Y[j, k, b])
                        if yb:
                            c = index[perm_product(g, h)]
                            acc[c] = (acc[c] + xa * yb) % p
    return np.array(out, dtype=np.int64)


def structure_matmul(T, p: int, X, Y):
    """Product of matrices over an algebra given by structure constants."""
    rows, inner, r = X.shape
    cols = Y.shape[1]
    out = np.zeros((rows, cols, r), dtype=object)
    for i in range(rows):
        for k in range(cols):
            for j in range(inner):
                for a in range(r):
                    for b in range(r):
                        c = int(X[i, j, a]) * int(Y[j, k, b])
                        if c:
                            out[i, k] += c * T[a, b].astype(object)
    return (out % p).astype(np.int64)


def span_set(vectors, p: int, d: int) -> frozenset:
    """Every F_p-linear combination of ``vectors``, grown one vector at a time."""
    span = {tuple([0] * d)}
    for v in vectors:
        v = tuple(int(x) % p for x in v)
        if v in span:
            continue
        span = {tuple((s[i] + c * v[i]) % p for i in range(d)) for s in span for c in range(p)}
    return frozenset(span)


def orbit_vectors(W, mats, p: int, max_len: int):
    """``u_{a_k} ... u_{a_1} w`` for every word ``a`` with ``|a| <= max_len``."""
    out = []
    frontier = [tuple(int(x) % p for x in w) for w in W]
    out.extend(frontier)
    for _ in range(max_len):
        nxt = []
        for v in frontier:
            for M in mats:
                nxt.append(naive_matvec(M, v, p))
        frontier = list(set(nxt))
        out.extend(frontier)
    return out


def words(n_actions: int, max_len: int):
    for length in range(max_len + 1):
        yield from itertools.product(range(n_actions), repeat=length)


def micro_instance(seed: int, primes=(2, 3), max_d: int = 6):
    """Random ``(p, d, W, mats)`` with ``d <= max_d``: up to three seed
    vectors and up to three explicit ``d x d`` matrices, sometimes sparse so
    that proper invariant subspaces show up."""
    rng = np.random.default_rng(seed)
    p = int(rng.choice(primes))
    d = int(rng.integers(1, max_d + 1))
    n_w = int(rng.integers(1, 4))
    n_u = int(rng.integers(1, 4))
    W = rng.integers(0, p, size=(n_w, d))
    if rng.random() < 0.3:
        W[:, d // 2 :] = 0
    mats = []
    for _ in range(n_u):
        M = rng.integers(0, p, size=(d, d))
        if rng.random() < 0.5:
            M = np.triu(M)
        mats.append(M)
    return p, d, W, mats
