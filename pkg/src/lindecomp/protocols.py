"""Honest reference simulators for ten group-based key exchange schemes.

Each simulator draws an instance from a seeded generator, runs both parties'
computations, checks that they agree, and returns a :class:`Transcript`
whose ``public_view`` is everything an eavesdropper sees.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .actions import (
    Action,
    Conjugation,
    FlatSpace,
    LeftMul,
    RightMul,
    commute_check,
    materialize,
)
from .algebra import Algebra, AlgMatrix, algebra_from_name, alternating_group_algebra, PrimeField, element_order
from .attacks import PublicData
from .errors import NotInvertible, ParameterRejection, SamplerFailure

MAX_RESAMPLES = 50


class _Degenerate(Exception):
    """Internal: the current draw violates a scheme precondition."""


# --------------------------------------------------------------------------
# parameters


@dataclass
class KoLeeParams:
    p: int = 7
    n: int = 4
    algebra: str = "trivial"
    gens: int = 2
    word_length: int = 8
    style: str = "block_diagonal_split"


@dataclass
class WangCaoParams:
    p: int = 7
    n: int = 3
    algebra: str = "trivial"
    max_exponent: int = 32
    s: int = 0  # 0 = draw at random
    t: int = 0


@dataclass
class HurleyParams:
    p: int = 7
    n: int = 4
    gens: int = 1
    max_exponent: int = 32


@dataclass
class StickelParams:
    p: int = 7
    n: int = 3
    max_exponent: int = 32
    min_order: int = 3
    k: int = 0  # 0 = draw at random
    l: int = 0
    r: int = 0
    s: int = 0


@dataclass
class AlvarezParams:
    p: int = 7
    n: int = 2
    m: int = 2
    max_exponent: int = 32
    k1: int = 0  # 0 = draw at random
    k2: int = 0
    l1: int = 0
    l2: int = 0


@dataclass
class ShpilrainUshakovParams:
    p: int = 5
    n: int = 3
    algebra: str = "trivial"
    gens: int = 2
    word_length: int = 6
    style: str = "polynomial_in_matrix"


@dataclass
class RomanczukParams:
    p: int = 11
    n: int = 4
    degree: int = 3


@dataclass
class MahalanobisParams:
    p: int = 7
    n: int = 3
    algebra: str = "trivial"
    gens: int = 2
    word_length: int = 6
    style: str = "polynomial_in_matrix"
    explicit: bool = True


@dataclass
class HKKSParams:
    p: int = 7
    n: int = 2
    algebra: str = "cyclic:3"
    max_exponent: int = 32
    large: bool = False
    m: int = 0  # Alice's exponent, 0 = draw at random
    k: int = 0  # Bob's exponent


@dataclass(frozen=True)
class ProtocolInfo:
    tag: str
    name: str
    family: str
    params: type


CATALOG: dict[str, ProtocolInfo] = {
    info.tag: info
    for info in [
        ProtocolInfo("ko_lee", "Ko-Lee et al. key establishment", "conjugation", KoLeeParams),
        ProtocolInfo("wang_cao", "Wang-Cao et al. key establishment", "conjugation", WangCaoParams),
        ProtocolInfo("hurley", "Hurley-Hurley authentication", "left/right multiplication", HurleyParams),
        ProtocolInfo("stickel", "Stickel key exchange", "left/right multiplication", StickelParams),
        ProtocolInfo("alvarez", "Alvarez-Martinez et al. key exchange", "left/right multiplication", AlvarezParams),
        ProtocolInfo("shpilrain_ushakov", "Shpilrain-Ushakov key exchange", "left/right multiplication", ShpilrainUshakovParams),
        ProtocolInfo("romanczuk", "Romanczuk-Ustimenko key exchange", "left/right multiplication", RomanczukParams),
        ProtocolInfo("mahalanobis1", "Mahalanobis key exchange 1", "automorphisms", MahalanobisParams),
        ProtocolInfo("mahalanobis2", "Mahalanobis key exchange 2", "automorphisms", MahalanobisParams),
        ProtocolInfo("hkks", "Habeeb-Kahrobaei-Koupparis-Shpilrain key exchange", "automorphisms", HKKSParams),
    ]
}

TAGS = tuple(CATALOG)


def _coerce(value, typ):
    if isinstance(value, str):
        if typ in (bool, "bool"):
            return value.lower() in ("1", "true", "yes", "on")
        if typ in (int, "int"):
            return int(value)
    return value


def make_params(tag: str, overrides: dict | None = None):
    """Parameter dataclass for ``tag`` with string-or-typed overrides applied."""
    cls = CATALOG[tag].params
    fields = {f.name: f.type for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in (overrides or {}).items():
        if key not in fields:
            raise ValueError(f"{tag} has no parameter {key!r}; known: {sorted(fields)}")
        kwargs[key] = _coerce(value, fields[key])
    return cls(**kwargs)


@dataclass
class ProtocolInstance:
    tag: str
    params: dict = field(default_factory=dict)
    rng_seed: int | tuple = 0

    def __post_init__(self):
        if self.tag not in CATALOG:
            raise ValueError(f"unknown protocol {self.tag!r}; known: {', '.join(TAGS)}")

    def resolved_params(self):
        return make_params(self.tag, self.params)

    def rng(self) -> np.random.Generator:
        seed = self.rng_seed
        return np.random.default_rng(list(seed) if isinstance(seed, (tuple, list)) else seed)


@dataclass
class Transcript:
    tag: str
    public_view: PublicData
    private_view: dict[str, Any]
    honest_key: np.ndarray
    key_space: FlatSpace
    gen_ops: int = 0

    @property
    def key_matrix(self) -> AlgMatrix:
        return AlgMatrix(self.key_space.algebra, self.honest_key.reshape(self.key_space.rows, self.key_space.cols, self.key_space.r))

    def to_json(self, emit_private: bool = False) -> dict:
        doc = {
            "protocol": self.tag,
            "public": self.public_view.to_json(),
            "honest_key": self.honest_key.tolist(),
            "key_space": self.key_space.to_spec(),
            "gen_ops": self.gen_ops,
        }
        if emit_private:
            doc["private"] = {k: _jsonable(v) for k, v in self.private_view.items()}
        return doc


def _jsonable(v):
    if isinstance(v, AlgMatrix):
        return v.tolist()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


# --------------------------------------------------------------------------
# sampling helpers


class _Ops:
    """Counts field multiply-adds spent by the honest parties."""

    def __init__(self):
        self.count = 0

    def mul(self, X: AlgMatrix, Y: AlgMatrix) -> AlgMatrix:
        (a, b), (_, c) = X.shape, Y.shape
        self.count += Algebra.mul_cost(a, b, c, X.algebra.dim)
        return X @ Y

    def prod(self, *Xs: AlgMatrix) -> AlgMatrix:
        out = Xs[0]
        for X in Xs[1:]:
            out = self.mul(out, X)
        return out

    def power(self, X: AlgMatrix, k: int) -> AlgMatrix:
        """``X**k`` by repeated multiplication."""
        out = AlgMatrix.identity(X.algebra, X.n)
        for _ in range(k):
            out = self.mul(out, X)
        return out


def random_invertible(alg: Algebra, n: int, rng: np.random.Generator, tries: int = 200) -> AlgMatrix:
    for _ in range(tries):
        M = AlgMatrix.random(alg, n, n, rng)
        if M.is_invertible():
            return M
    raise SamplerFailure(f"no invertible {n}x{n} matrix over {alg.label} in {tries} draws")


def random_polynomial_in(M: AlgMatrix, rng: np.random.Generator, degree: int | None = None, tries: int = 200) -> AlgMatrix:
    """Invertible ``sum c_i M^i`` with random F_p coefficients."""
    degree = M.n if degree is None else degree
    powers = [AlgMatrix.identity(M.algebra, M.n)]
    for _ in range(degree):
        powers.append(powers[-1] @ M)
    for _ in range(tries):
        c = rng.integers(0, M.p, size=degree + 1)
        P = AlgMatrix.zeros(M.algebra, M.n)
        for ci, Pi in zip(c, powers):
            P = P + Pi.scale(int(ci))
        if P.is_invertible():
            return P
    raise SamplerFailure("no invertible polynomial in the given matrix")


def random_word(gens: list[AlgMatrix], invs: list[AlgMatrix], length: int, rng: np.random.Generator, ops: _Ops | None = None):
    """Product of ``length`` random letters from ``gens`` and ``invs``.

    Returns ``(element, letters)`` with letters as ``(index, +1/-1)``.
    """
    alg, n = gens[0].algebra, gens[0].n
    out = AlgMatrix.identity(alg, n)
    letters = []
    for _ in range(length):
        i = int(rng.integers(len(gens)))
        sign = 1 if rng.integers(2) else -1
        X = gens[i] if sign > 0 else invs[i]
        out = ops.mul(out, X) if ops else out @ X
        letters.append((i, sign))
    return out, letters


def _block_diag(alg: Algebra, X: AlgMatrix | None, Y: AlgMatrix | None, n1: int, n2: int) -> AlgMatrix:
    d = np.zeros((n1 + n2, n1 + n2, alg.dim), dtype=np.int64)
    d[:n1, :n1] = X.data if X is not None else AlgMatrix.identity(alg, n1).data
    d[n1:, n1:] = Y.data if Y is not None else AlgMatrix.identity(alg, n2).data
    return AlgMatrix(alg, d)


def commuting_subgroup_sampler(space: FlatSpace, style: str, count: int, rng: np.random.Generator, tries: int = 20):
    """Two lists of invertible matrices with ``u w == w u`` for every pair.

    Styles: ``polynomial_in_matrix`` (both sides are polynomials in one
    random matrix), ``center_scalars`` (U is scalar multiples of the
    identity, W arbitrary), ``block_diagonal_split`` (U lives in the top-left
    block, W in the bottom-right one).
    """
    alg, n = space.algebra, space.n
    for _ in range(tries):
        try:
            if style == "polynomial_in_matrix":
                M = random_invertible(alg, n, rng)
                U = [random_polynomial_in(M, rng) for _ in range(count)]
                W = [random_polynomial_in(M, rng) for _ in range(count)]
            elif style == "center_scalars":
                U = [AlgMatrix.identity(alg, n).scale(int(rng.integers(1, alg.p))) for _ in range(count)]
                W = [random_invertible(alg, n, rng) for _ in range(count)]
            elif style == "block_diagonal_split":
                if n < 2:
                    raise ValueError("block_diagonal_split needs n >= 2")
                n1 = n // 2
                n2 = n - n1
                U = [_block_diag(alg, random_invertible(alg, n1, rng), None, n1, n2) for _ in range(count)]
                W = [_block_diag(alg, None, random_invertible(alg, n2, rng), n1, n2) for _ in range(count)]
            else:
                raise ValueError(f"unknown sampler style {style!r}")
        except SamplerFailure:
            continue
        if all((u @ w) == (w @ u) for u in U for w in W):
            return U, W
    raise SamplerFailure(f"could not sample commuting families with style {style!r}")


def _inverses(mats: list[AlgMatrix]) -> list[AlgMatrix]:
    return [M.inverse() for M in mats]


def _conj(X: AlgMatrix, Xinv: AlgMatrix, g: AlgMatrix, ops: _Ops) -> AlgMatrix:
    return ops.prod(X, g, Xinv)


def _agree(*keys: AlgMatrix):
    for k in keys[1:]:
        if k != keys[0]:
            raise AssertionError("honest parties computed different keys")


def _space(params) -> tuple[Algebra, FlatSpace]:
    alg = algebra_from_name(params.p, getattr(params, "algebra", "trivial"))
    return alg, FlatSpace(alg, params.n)


# --------------------------------------------------------------------------
# the schemes


def _ko_lee(P: KoLeeParams, rng):
    alg, space = _space(P)
    ops = _Ops()
    Ug, Wg = commuting_subgroup_sampler(space, P.style, P.gens, rng)
    Ui, Wi = _inverses(Ug), _inverses(Wg)
    g = random_invertible(alg, P.n, rng)
    a, a_word = random_word(Ug, Ui, P.word_length, rng, ops)
    b, b_word = random_word(Wg, Wi, P.word_length, rng, ops)
    a_inv, b_inv = a.inverse(), b.inverse()
    g_a = _conj(a, a_inv, g, ops)
    g_b = _conj(b, b_inv, g, ops)
    K_A = _conj(a, a_inv, g_b, ops)
    K_B = _conj(b, b_inv, g_a, ops)
    _agree(K_A, K_B)
    pub = PublicData(
        space,
        [Conjugation(u, space) for u in Ug + Ui],
        [Conjugation(w, space) for w in Wg + Wi],
        {"g": g.flat(), "g_a": g_a.flat(), "g_b": g_b.flat()},
    )
    return pub, {"a": a, "b": b, "a_word": a_word, "b_word": b_word}, K_A, space, ops.count


def _wang_cao(P: WangCaoParams, rng):
    alg, space = _space(P)
    ops = _Ops()
    g = AlgMatrix.random(alg, P.n, P.n, rng)
    x = random_invertible(alg, P.n, rng)
    x_inv = x.inverse()
    s = P.s or int(rng.integers(1, P.max_exponent + 1))
    t = P.t or int(rng.integers(1, P.max_exponent + 1))
    xs, xs_inv = ops.power(x, s), ops.power(x_inv, s)
    xt, xt_inv = ops.power(x, t), ops.power(x_inv, t)
    g_s = ops.prod(xs, g, xs_inv)
    g_t = ops.prod(xt, g, xt_inv)
    K_A = ops.prod(xs, g_t, xs_inv)
    K_B = ops.prod(xt, g_s, xt_inv)
    _agree(K_A, K_B)
    act = [Conjugation(x, space)]
    pub = PublicData(space, act, act, {"g": g.flat(), "g_a": g_s.flat(), "g_b": g_t.flat()})
    return pub, {"s": s, "t": t}, K_A, space, ops.count


def _hurley(P: HurleyParams, rng):
    alg = algebra_from_name(P.p, "trivial")
    space = FlatSpace(alg, 1, P.n)
    ops = _Ops()
    M = random_invertible(alg, P.n, rng)
    G = [M] + [random_polynomial_in(M, rng) for _ in range(P.gens - 1)]
    Gi = _inverses(G)
    orders = [element_order(h) for h in G]
    if min(orders) < 3:
        raise _Degenerate("generator order too small")

    def pick():
        # product of generator powers with exponents in [1, min(order - 1, max_exponent)]
        parts = [ops.power(h, int(rng.integers(1, min(o - 1, P.max_exponent) + 1))) for h, o in zip(G, orders)]
        return ops.prod(*parts) if len(parts) > 1 else parts[0]

    B, A, A1, B1, B2 = pick(), pick(), pick(), pick(), pick()
    I = AlgMatrix.identity(alg, P.n)
    # words can cancel; any of these being 1 puts x or y on the wire in clear
    if any(M == I for M in (A, A1, B, B1, B2, A @ B1, B @ A1, A1 @ B2)):
        raise _Degenerate("a transmitted message would equal a secret")
    y = AlgMatrix.random(alg, 1, P.n, rng)
    x = AlgMatrix.random(alg, 1, P.n, rng)
    # 1. Bob publishes yB
    yB = ops.mul(y, B)
    # 2. Alice sends (xA, yBA1)
    xA, yBA1 = ops.mul(x, A), ops.mul(yB, A1)
    # 3. Bob sends (xAB1, yA1B2); yBA1 B^-1 B2 = y A1 B2 since G is abelian
    xAB1 = ops.mul(xA, B1)
    yA1B2 = ops.prod(yBA1, B.inverse(), B2)
    # 4. Alice strips A and A1 and sends xB1 - yB2
    xB1 = ops.mul(xAB1, A.inverse())
    yB2 = ops.mul(yA1B2, A1.inverse())
    z = xB1 - yB2
    # 5. Bob: z B1^-1 = x - y B2 B1^-1, then adds y B2 B1^-1 back
    B1_inv = B1.inverse()
    recovered = ops.mul(z, B1_inv) + ops.prod(y, B2, B1_inv)
    _agree(recovered, x)
    if yA1B2 != ops.prod(y, A1, B2):
        raise AssertionError("G is not commutative")
    act = [RightMul(h, space) for h in G + Gi]
    pub = PublicData(
        space,
        act,
        act,
        {
            "yB": yB.flat(),
            "xA": xA.flat(),
            "yBA1": yBA1.flat(),
            "xAB1": xAB1.flat(),
            "yA1B2": yA1B2.flat(),
            "xB1_minus_yB2": z.flat(),
        },
    )
    return pub, {"x": x, "y": y, "A": A, "A1": A1, "B": B, "B1": B1, "B2": B2}, x, space, ops.count


def _stickel(P: StickelParams, rng):
    alg = algebra_from_name(P.p, "trivial")
    space = FlatSpace(alg, P.n)
    ops = _Ops()
    g = random_invertible(alg, P.n, rng)
    f = random_invertible(alg, P.n, rng)
    if g @ f == f @ g:
        raise _Degenerate("g and f commute")
    k0, l0 = element_order(g), element_order(f)
    if min(k0, l0) < max(P.min_order, 3):
        raise _Degenerate("orders too small")

    def draw(fixed, order):
        if fixed:
            if not 1 <= fixed < order:
                raise ParameterRejection(f"exponent {fixed} outside [1, {order})")
            return fixed
        return int(rng.integers(2, min(order - 1, P.max_exponent) + 1))

    k, r = draw(P.k, k0), draw(P.r, k0)
    l, s = draw(P.l, l0), draw(P.s, l0)
    alice = ops.mul(ops.power(g, k), ops.power(f, l))
    bob = ops.mul(ops.power(g, r), ops.power(f, s))
    K_A = ops.prod(ops.power(g, k), bob, ops.power(f, l))
    K_B = ops.prod(ops.power(g, r), alice, ops.power(f, s))
    _agree(K_A, K_B, (g ** (k + r)) @ (f ** (l + s)))
    act = [LeftMul(g, space), RightMul(f, space)]
    pub = PublicData(
        space,
        act,
        act,
        {"base": AlgMatrix.identity(alg, P.n).flat(), "alice_pub": alice.flat(), "bob_pub": bob.flat()},
        params={"k0": k0, "l0": l0},
    )
    return pub, {"k": k, "l": l, "r": r, "s": s}, K_A, space, ops.count


def _alvarez(P: AlvarezParams, rng):
    alg = algebra_from_name(P.p, "trivial")
    n, m = P.n, P.m
    space = FlatSpace(alg, n + m)
    ops = _Ops()

    def block_matrix():
        A = random_invertible(alg, n, rng)
        B = random_invertible(alg, m, rng)
        X = AlgMatrix.random(alg, n, m, rng)
        d = np.zeros((n + m, n + m, 1), dtype=np.int64)
        d[:n, :n], d[:n, n:], d[n:, n:] = A.data, X.data, B.data
        return AlgMatrix(alg, d)

    M1, M2 = block_matrix(), block_matrix()
    m1, m2 = element_order(M1), element_order(M2)
    if min(m1, m2) < 2:
        raise _Degenerate("identity block matrix drawn")
    def ex(fixed, order):
        if fixed:
            if not 1 <= fixed < order:
                raise ParameterRejection(f"exponent {fixed} outside [1, {order})")
            return fixed
        return int(rng.integers(1, min(order - 1, P.max_exponent) + 1))

    k1, k2, l1, l2 = ex(P.k1, m1), ex(P.k2, m2), ex(P.l1, m1), ex(P.l2, m2)
    top, right, bot = (slice(0, n), slice(0, n)), (slice(0, n), slice(n, n + m)), (slice(n, n + m), slice(n, n + m))
    A_ = lambda M: M.block(*top)  # noqa: E731
    X_ = lambda M: M.block(*right)  # noqa: E731
    B_ = lambda M: M.block(*bot)  # noqa: E731

    M1k1, M2k2 = ops.power(M1, k1), ops.power(M2, k2)
    M1l1, M2l2 = ops.power(M1, l1), ops.power(M2, l2)
    C = ops.mul(M1k1, M2k2)
    D = ops.mul(M1l1, M2l2)
    K_A = (
        ops.prod(A_(M1k1), A_(D), X_(M2k2))
        + ops.prod(A_(M1k1), X_(D), B_(M2k2))
        + ops.prod(X_(M1k1), B_(D), B_(M2k2))
    )
    K_B = (
        ops.prod(A_(M1l1), A_(C), X_(M2l2))
        + ops.prod(A_(M1l1), X_(C), B_(M2l2))
        + ops.prod(X_(M1l1), B_(C), B_(M2l2))
    )
    closed_form = X_((M1 ** (k1 + l1)) @ (M2 ** (k2 + l2)))
    _agree(K_A, K_B, closed_form)
    act = [LeftMul(M1, space), RightMul(M2, space)]
    pub = PublicData(
        space,
        act,
        act,
        {"base": AlgMatrix.identity(alg, n + m).flat(), "alice_pub": C.flat(), "bob_pub": D.flat()},
        params={"n": n, "m": m, "m1": m1, "m2": m2},
    )
    key_space = FlatSpace(alg, n, m)
    return pub, {"k1": k1, "k2": k2, "l1": l1, "l2": l2}, K_A, key_space, ops.count


def _shpilrain_ushakov(P: ShpilrainUshakovParams, rng):
    alg, space = _space(P)
    ops = _Ops()
    Ug, Wg = commuting_subgroup_sampler(space, P.style, P.gens, rng)
    Ui, Wi = _inverses(Ug), _inverses(Wg)
    g = AlgMatrix.random(alg, P.n, P.n, rng)
    a, _ = random_word(Ug, Ui, P.word_length, rng, ops)
    a2, _ = random_word(Ug, Ui, P.word_length, rng, ops)
    b, _ = random_word(Wg, Wi, P.word_length, rng, ops)
    b2, _ = random_word(Wg, Wi, P.word_length, rng, ops)
    alice = ops.prod(a, g, a2)
    bob = ops.prod(b, g, b2)
    K_A = ops.prod(a, bob, a2)
    K_B = ops.prod(b, alice, b2)
    _agree(K_A, K_B)
    side = lambda mats: [LeftMul(x, space) for x in mats] + [RightMul(x, space) for x in mats]  # noqa: E731
    pub = PublicData(space, side(Ug + Ui), side(Wg + Wi), {"base": g.flat(), "alice_pub": alice.flat(), "bob_pub": bob.flat()})
    return pub, {"a": a, "a_prime": a2, "b": b, "b_prime": b2}, K_A, space, ops.count


def _romanczuk(P: RomanczukParams, rng):
    alg = algebra_from_name(P.p, "trivial")
    space = FlatSpace(alg, 1, P.n)
    ops = _Ops()
    C = random_invertible(alg, P.n, rng)
    D = random_polynomial_in(C, rng)
    g = AlgMatrix.random(alg, 1, P.n, rng)
    if not g.data.any():
        raise _Degenerate("zero vector")
    monomials = {}
    for i in range(P.degree + 1):
        for j in range(P.degree + 1 - i):
            monomials[(i, j)] = ops.mul(ops.power(C, i), ops.power(D, j))

    def poly():
        coeffs = {key: int(rng.integers(0, P.p)) for key in monomials}
        out = AlgMatrix.zeros(alg, P.n)
        for key, c in coeffs.items():
            out = out + monomials[key].scale(c)
        return out, coeffs

    Pm, Pc = poly()
    Qm, Qc = poly()
    gP, gQ = ops.mul(g, Pm), ops.mul(g, Qm)
    K_A = ops.mul(gQ, Pm)
    K_B = ops.mul(gP, Qm)
    _agree(K_A, K_B)
    act = [RightMul(C, space), RightMul(D, space)]
    pub = PublicData(space, act, act, {"g": g.flat(), "gP": gP.flat(), "gQ": gQ.flat()})
    private = {"P": {f"{i},{j}": c for (i, j), c in Pc.items()}, "Q": {f"{i},{j}": c for (i, j), c in Qc.items()}}
    return pub, private, K_A, space, ops.count


def _automorphism_families(P: MahalanobisParams, space: FlatSpace, rng):
    Ug, Wg = commuting_subgroup_sampler(space, P.style, P.gens, rng)
    Ui, Wi = _inverses(Ug), _inverses(Wg)

    def actions(mats):
        acts = [Conjugation(x, space) for x in mats]
        return [materialize(a) for a in acts] if P.explicit else acts

    return Ug, Ui, Wg, Wi, actions(Ug + Ui), actions(Wg + Wi)


def _mahalanobis1(P: MahalanobisParams, rng):
    alg, space = _space(P)
    ops = _Ops()
    Ug, Ui, Wg, Wi, U, W = _automorphism_families(P, space, rng)
    g = random_invertible(alg, P.n, rng)
    phi, _ = random_word(Ug, Ui, P.word_length, rng, ops)
    psi, _ = random_word(Wg, Wi, P.word_length, rng, ops)
    phi_i, psi_i = phi.inverse(), psi.inverse()
    g_phi = _conj(phi, phi_i, g, ops)
    g_psi = _conj(psi, psi_i, g, ops)
    K_A = _conj(phi, phi_i, g_psi, ops)
    K_B = _conj(psi, psi_i, g_phi, ops)
    _agree(K_A, K_B)
    pub = PublicData(space, U, W, {"g": g.flat(), "g_a": g_phi.flat(), "g_b": g_psi.flat()})
    return pub, {"phi": phi, "psi": psi}, K_A, space, ops.count


def _mahalanobis2(P: MahalanobisParams, rng):
    alg, space = _space(P)
    ops = _Ops()
    Ug, Ui, Wg, Wi, U, W = _automorphism_families(P, space, rng)
    g = random_invertible(alg, P.n, rng)
    phi, _ = random_word(Ug, Ui, P.word_length, rng, ops)
    xi, _ = random_word(Ug, Ui, P.word_length, rng, ops)
    psi, _ = random_word(Wg, Wi, P.word_length, rng, ops)
    phi_i, psi_i, xi_i = phi.inverse(), psi.inverse(), xi.inverse()
    g_phi = _conj(phi, phi_i, g, ops)  # Alice -> Bob
    g_phipsi = _conj(psi, psi_i, g_phi, ops)  # Bob -> Alice
    g_psi = _conj(phi_i, phi, g_phipsi, ops)  # Alice strips phi
    g_psixi = _conj(xi, xi_i, g_psi, ops)  # Alice -> Bob
    bob_key = _conj(psi_i, psi, g_psixi, ops)
    _agree(bob_key, _conj(xi, xi_i, g, ops))
    pub = PublicData(space, U, W, {"g_phi": g_phi.flat(), "g_phipsi": g_phipsi.flat(), "g_psixi": g_psixi.flat()})
    return pub, {"phi": phi, "psi": psi, "xi": xi}, bob_key, space, ops.count


def hkks_direct(g: AlgMatrix, H: AlgMatrix, H_inv: AlgMatrix, k: int) -> AlgMatrix:
    """``phi^{k-1}(g) ... phi(g) g`` expanded term by term, ``phi`` being
    conjugation by ``H``."""
    out = AlgMatrix.identity(g.algebra, g.n)
    term = g
    terms = []
    for _ in range(k):
        terms.append(term)
        term = H @ term @ H_inv
    for t in reversed(terms):
        out = out @ t
    return out


def _hkks(P: HKKSParams, rng):
    if P.large:
        alg, n = alternating_group_algebra(PrimeField(7), 5), 3
    else:
        alg, n = algebra_from_name(P.p, P.algebra), P.n
    space = FlatSpace(alg, n)
    ops = _Ops()
    g = AlgMatrix.random(alg, n, n, rng)
    H = random_invertible(alg, n, rng)
    H_inv = H.inverse()
    phi = Conjugation(H, space)
    m = P.m or int(rng.integers(1, P.max_exponent + 1))
    k = P.k or int(rng.integers(1, P.max_exponent + 1))

    def a(count):
        # (phi, g)^count in the semidirect product, second component only
        x = AlgMatrix.identity(alg, n)
        for _ in range(count):
            x = ops.mul(ops.prod(H, x, H_inv), g)
        return x

    a_m, a_n = a(m), a(k)

    def phi_pow(x, e):
        for _ in range(e):
            x = ops.prod(H, x, H_inv)
        return x

    K_A = ops.mul(phi_pow(a_n, m), a_m)
    K_B = ops.mul(phi_pow(a_m, k), a_n)
    _agree(K_A, K_B, hkks_direct(g, H, H_inv, m + k))
    pub = PublicData(space, [phi], [], {"g": g.flat(), "a_m": a_m.flat(), "a_n": a_n.flat()})
    return pub, {"m": m, "n": k, "H": H}, K_A, space, ops.count


SIMULATORS: dict[str, Callable] = {
    "ko_lee": _ko_lee,
    "wang_cao": _wang_cao,
    "hurley": _hurley,
    "stickel": _stickel,
    "alvarez": _alvarez,
    "shpilrain_ushakov": _shpilrain_ushakov,
    "romanczuk": _romanczuk,
    "mahalanobis1": _mahalanobis1,
    "mahalanobis2": _mahalanobis2,
    "hkks": _hkks,
}


def simulate(inst: ProtocolInstance) -> Transcript:
    """Run the honest scheme for ``inst``; same seed, same transcript."""
    params = inst.resolved_params()
    rng = inst.rng()
    sim = SIMULATORS[inst.tag]
    for _ in range(MAX_RESAMPLES):
        try:
            pub, private, key, key_space, gen_ops = sim(params, rng)
        except (_Degenerate, NotInvertible, SamplerFailure):
            continue
        pub.protocol_tag = inst.tag
        return Transcript(inst.tag, pub, private, key.flat(), key_space, gen_ops)
    raise ParameterRejection(f"{inst.tag}: no valid instance after {MAX_RESAMPLES} draws")
