"""Key recovery from public transcript data.

Every entry point receives only public material: the flat space, the public
action generators and the observed public vectors. None of them reconstructs
a private key; they rebuild the shared secret by re-applying the witness
words of a span basis to a different public vector.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .actions import (
    Action,
    FlatSpace,
    RightMul,
    action_from_json,
    commute_check,
    unflatten,
)
from .algebra import AlgMatrix
from .errors import MalformedTranscript, NoSolution, NotInSpan
from .linalg import EchelonBasis, matmul_mod, solve_linear
from .spanclosure import SpanBasis, Witness, closure_op_bound, span_closure

# The frontier schedule returns the same basis as the full re-scan and keeps
# the op count inside the closure bound on long chains.
FRONTIER = True

# Stream for per-basis-vector closure traces; set by the CLI's --trace.
TRACE = None


@dataclass
class PublicData:
    space: FlatSpace
    U: list[Action]
    W: list[Action]
    observed: dict[str, np.ndarray]
    protocol_tag: str = ""
    params: dict = field(default_factory=dict)

    def check(self, trials: int = 2) -> bool:
        for name, v in self.observed.items():
            self.space.check(v)
        return bool(commute_check(self.U, self.W, trials))

    def to_json(self) -> dict:
        return {
            "protocol": self.protocol_tag,
            "space": self.space.to_spec(),
            "U": [a.to_json() for a in self.U],
            "W": [a.to_json() for a in self.W],
            "observed": {k: np.asarray(v).tolist() for k, v in self.observed.items()},
            "params": self.params,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PublicData":
        space = FlatSpace.from_spec(doc["space"])
        return cls(
            space=space,
            U=[action_from_json(a, space) for a in doc["U"]],
            W=[action_from_json(a, space) for a in doc["W"]],
            observed={k: np.asarray(v, dtype=np.int64) for k, v in doc["observed"].items()},
            protocol_tag=doc.get("protocol", ""),
            params=doc.get("params", {}),
        )


@dataclass
class RecoveredKey:
    key: np.ndarray
    space: FlatSpace
    combination: list[tuple[int, Witness]] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def matrix(self) -> AlgMatrix:
        return unflatten(self.key, self.space)


def _stats(*bases: SpanBasis, extra_ops: int = 0) -> dict:
    return {
        "basis_dim": sum(b.dim for b in bases),
        "passes": sum(b.stats.passes for b in bases),
        "field_ops": sum(b.stats.field_ops for b in bases) + extra_ops,
        "op_bound": sum(b.stats.op_bound for b in bases) + extra_ops,
    }


def _decompose(basis: SpanBasis, v, what: str) -> np.ndarray:
    try:
        return basis.decompose(v)
    except NotInSpan:
        raise MalformedTranscript(f"{what} is not in the span of the public orbit") from None


# --------------------------------------------------------------------------
# generic templates


def basic_attack(U: Sequence[Action], W: Sequence[Action], v, v_a, v_b, space: FlatSpace | None = None) -> RecoveredKey:
    """Recover ``b(a(v))`` from ``v``, ``a(v)``, ``b(v)``.

    ``a`` lies in the monoid generated by ``U`` and commutes with ``b``. The
    orbit span of ``v`` under ``U`` gives ``a(v) = sum alpha_i c_i(v)`` with
    known words ``c_i``; the key is ``sum alpha_i c_i(b(v))``. ``W`` is not
    needed for the computation.
    """
    space = space if space is not None else U[0].space
    basis = span_closure([v], U, space, frontier=FRONTIER, trace=TRACE)
    alpha = _decompose(basis, v_a, "a(v)")
    images = basis.transport([v_b], U)
    key = basis.combine(alpha, images)
    combo = [(int(a), w) for a, w in zip(alpha, basis.witnesses) if a]
    return RecoveredKey(key, space, combo, _stats(basis))


def conjugation_attack(pub: PublicData) -> RecoveredKey:
    o = pub.observed
    return basic_attack(pub.U, pub.W, o["g"], o["g_a"], o["g_b"], pub.space)


def two_sided_attack(pub: PublicData) -> RecoveredKey:
    """``base``, ``a base a'`` and ``b base b'`` give ``a b base b' a'``.

    ``pub.U`` holds left and right multiplications by Alice's generators
    (and their inverses when her side is a group).
    """
    o = pub.observed
    return basic_attack(pub.U, pub.W, o["base"], o["alice_pub"], o["bob_pub"], pub.space)


def automorphism_attack(pub: PublicData) -> RecoveredKey:
    """Automorphisms are handed in as linear actions; the rest is the basic attack."""
    o = pub.observed
    return basic_attack(pub.U, pub.W, o["g"], o["g_a"], o["g_b"], pub.space)


# --------------------------------------------------------------------------
# scheme specific recoveries


def hurley_recover(pub: PublicData) -> RecoveredKey:
    """Recover the plaintext row vector ``x``.

    ``pub.U`` holds right multiplications by generators of the commutative
    group G and their inverses.
    """
    o, U, space = pub.observed, pub.U, pub.space
    basis1 = span_closure([o["yBA1"]], U, space, frontier=FRONTIER, trace=TRACE)
    alpha = _decompose(basis1, o["yB"], "yB")
    yB2 = basis1.combine(alpha, basis1.transport([o["yA1B2"]], U))

    basis2 = span_closure([o["xAB1"]], U, space, frontier=FRONTIER, trace=TRACE)
    beta = _decompose(basis2, o["xA"], "xA")
    x_minus = basis2.combine(beta, basis2.transport([o["xB1_minus_yB2"]], U))
    yB2B1inv = basis2.combine(beta, basis2.transport([yB2], U))
    x = (x_minus + yB2B1inv) % space.p
    return RecoveredKey(x, space, [], _stats(basis1, basis2, extra_ops=space.d))


def romanczuk_attack(g, gP, gQ, C: AlgMatrix, D: AlgMatrix) -> RecoveredKey:
    """Shared vector ``g Q P`` from the orbit span of ``g`` under ``C`` and ``D``."""
    space = FlatSpace(C.algebra, 1, C.n)
    U = [RightMul(C, space), RightMul(D, space)]
    return basic_attack(U, [], g, gP, gQ, space)


def blackburn_attack(g, gP, gQ, C: AlgMatrix, D: AlgMatrix) -> RecoveredKey:
    """Solve ``XC = CX, XD = DX, gX = gQ`` for some ``X``; the key is ``(gP) X``.

    Only defined for matrices over the prime field itself.
    """
    if C.algebra.dim != 1:
        raise ValueError("the commutant system is set up over F_p only")
    p, n = C.p, C.n
    Cm, Dm = C.data[:, :, 0], D.data[:, :, 0]
    I = np.eye(n, dtype=np.int64)
    g = np.asarray(g, dtype=np.int64) % p
    blocks = [
        np.kron(I, Cm.T) - np.kron(Cm, I),
        np.kron(I, Dm.T) - np.kron(Dm, I),
        np.kron(g[None, :], I),
    ]
    A = np.vstack(blocks) % p
    b = np.concatenate([np.zeros(2 * n * n, dtype=np.int64), np.asarray(gQ, dtype=np.int64) % p])
    try:
        x, kernel = solve_linear(A, b, p)
    except NoSolution:
        raise MalformedTranscript("no matrix in the commutant maps g to gQ") from None
    X = x.reshape(n, n)
    key = matmul_mod(np.asarray(gP, dtype=np.int64) % p, X, p)
    space = FlatSpace(C.algebra, 1, n)
    rows, cols = A.shape
    return RecoveredKey(key, space, [], {"basis_dim": n * n - kernel.shape[0], "passes": 0, "field_ops": rows * cols * min(rows, cols) + n * n, "op_bound": None})


def mahalanobis2_attack(g_phi, g_phipsi, g_psixi, alice_generators: Sequence[Action], space: FlatSpace | None = None) -> RecoveredKey:
    """Bob's session key ``xi(g)`` from the three public messages.

    The closure runs over the automorphism group that contains Alice's
    ``phi`` and ``xi``: ``psi xi (g)`` equals ``(phi^-1 xi)`` applied to
    ``phi psi (g)``, and ``phi^-1 xi`` lies in Alice's group.
    """
    U = list(alice_generators)
    space = space if space is not None else U[0].space
    basis = span_closure([g_phipsi], U, space, frontier=FRONTIER, trace=TRACE)
    alpha = _decompose(basis, g_psixi, "psi xi (g)")
    key = basis.combine(alpha, basis.transport([g_phi], U))
    combo = [(int(a), w) for a, w in zip(alpha, basis.witnesses) if a]
    return RecoveredKey(key, space, combo, _stats(basis))


def hkks_sequence(g: AlgMatrix, phi: Action, limit: int):
    """Yield ``a_0 = 1, a_1 = g, a_2 = phi(g) g, ...`` with ``a_{k+1} = phi(a_k) g``."""
    space = phi.space
    times_g = RightMul(g, space)
    x = AlgMatrix.identity(g.algebra, g.n).flat()
    for _ in range(limit):
        yield x
        x = times_g.apply(phi.apply(x))


def hkks_attack(g, phi: Action, a_m_pub, a_n_pub) -> RecoveredKey:
    """Shared key ``a_{m+n}`` from ``g``, ``phi``, ``a_m`` and ``a_n``.

    The sequence ``a_k`` is the orbit of ``1`` under the linear map
    ``x -> phi(x) g``, so a maximal independent prefix spans all of it.
    Writing ``a_n = sum eta_i a_i`` gives
    ``a_{m+n} = sum eta_i phi^i(a_m) a_i``.
    """
    space = phi.space
    p = space.p
    g_mat = g if isinstance(g, AlgMatrix) else unflatten(g, space)
    ech = EchelonBasis(space.d, p)
    prefix: list[np.ndarray] = []
    step_cost = phi.cost + RightMul(g_mat, space).cost
    for a in hkks_sequence(g_mat, phi, space.d + 1):
        accepted, _ = ech.extend(a, coeffs=False)
        if not accepted:
            break
        prefix.append(a)
    try:
        eta = ech.decompose(a_n_pub)
    except NotInSpan:
        raise MalformedTranscript("a_n is outside the span of the public sequence") from None

    alg = space.algebra
    y = space.check(a_m_pub)
    key = np.zeros(space.d, dtype=np.int64)
    shape = (space.rows, space.cols, space.r)
    mul_cost = alg.mul_cost(space.rows, space.rows, space.cols, space.r)
    for i, a_i in enumerate(prefix):
        if eta[i]:
            term = alg.matmul_data(y.reshape(shape), a_i.reshape(shape)).reshape(-1)
            key = (key + int(eta[i]) * term) % p
        if i + 1 < len(prefix):
            y = phi.apply(y)
    k = len(prefix)
    ops = ech.ops + k * step_cost + k * (phi.cost + mul_cost + space.d)
    bound = closure_op_bound(space.d, 1, 1, step_cost, k)
    return RecoveredKey(key, space, [], {"basis_dim": k, "passes": k, "field_ops": ops, "op_bound": bound})


# --------------------------------------------------------------------------
# dispatch by protocol tag


def _alvarez(pub: PublicData) -> RecoveredKey:
    full = two_sided_attack(pub)
    n, m = pub.params["n"], pub.params["m"]
    block = full.matrix.block(slice(0, n), slice(n, n + m))
    bspace = FlatSpace(pub.space.algebra, n, m)
    return RecoveredKey(block.flat(), bspace, full.combination, full.stats)


def _romanczuk(pub: PublicData) -> RecoveredKey:
    o = pub.observed
    return romanczuk_attack(o["g"], o["gP"], o["gQ"], pub.U[0].matrix, pub.U[1].matrix)


def _blackburn(pub: PublicData) -> RecoveredKey:
    o = pub.observed
    return blackburn_attack(o["g"], o["gP"], o["gQ"], pub.U[0].matrix, pub.U[1].matrix)


def _mahalanobis2(pub: PublicData) -> RecoveredKey:
    o = pub.observed
    return mahalanobis2_attack(o["g_phi"], o["g_phipsi"], o["g_psixi"], pub.U, pub.space)


def _hkks(pub: PublicData) -> RecoveredKey:
    o = pub.observed
    return hkks_attack(o["g"], pub.U[0], o["a_m"], o["a_n"])


ATTACKS: dict[str, Callable[[PublicData], RecoveredKey]] = {
    "ko_lee": conjugation_attack,
    "wang_cao": conjugation_attack,
    "hurley": hurley_recover,
    "stickel": two_sided_attack,
    "alvarez": _alvarez,
    "shpilrain_ushakov": two_sided_attack,
    "romanczuk": _romanczuk,
    "mahalanobis1": automorphism_attack,
    "mahalanobis2": _mahalanobis2,
    "hkks": _hkks,
}

# Independent second attack, where one exists.
CROSS_ATTACKS: dict[str, Callable[[PublicData], RecoveredKey]] = {
    "romanczuk": _blackburn,
}


def attack(pub: PublicData) -> RecoveredKey:
    """Run the attack registered for ``pub.protocol_tag`` and time it."""
    fn = ATTACKS.get(pub.protocol_tag)
    if fn is None:
        raise ValueError(f"no attack registered for {pub.protocol_tag!r}")
    t0 = time.perf_counter()
    rec = fn(pub)
    rec.stats["wall_time"] = time.perf_counter() - t0
    return rec
