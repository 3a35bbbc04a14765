"""Dilation, Poisson transforms, von Neumann probes, shift factorization.

Every construction here runs through the observability series of a defect
pair (D_{T*}, T*) or of a restricted-shift pair on a finite-dimensional
shift-invariant subspace.  Deep-level quantities use closed forms of the
truncated series (partial gramians and their one-step shifts); coefficient
identities are checked on materialized truncations at small depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .linalg import as_matrix, hermitian_part, psd_check, spectral_norm
from .spaces import (
    BallPoly,
    FockPoly,
    arveson_backshift,
    ball_family_matrix,
    coordinate_shift,
    eval_E,
    eval_G,
    fock_family_matrix,
    nc_obs_poly,
    ab_obs_poly,
    right_backshift,
    right_shift,
)
from .stein import CPMap, ab_gramian, nc_gramian, strong_stability
from .systems import OutputPair, is_commutative, tuple_power_word, tuple_power_multi
from .util import DEFAULT_TOL, DimensionError, HypothesisError, effective_tol
from .words import (
    MultiIndex,
    Word,
    arveson_weight,
    multi_indices_up_to,
    unit_index,
    words_up_to,
)


def row_defect(T: Sequence[np.ndarray]) -> np.ndarray:
    """I - sum_j T_j T_j*, the row-contraction defect."""
    T = [as_matrix(Tj) for Tj in T]
    m = T[0].shape[0]
    return np.eye(m, dtype=complex) - sum(Tj @ Tj.conj().T for Tj in T)


@dataclass
class DilationReport:
    defect: np.ndarray
    defect_sqrt: np.ndarray
    coefficient_space_dim: int
    obs_isometry_residual: float
    tail_bound: float
    compression_residuals: list[float]
    intertwining_residual: float
    poisson_unital_residual: float
    hypotheses: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.hypotheses.values())


def dilate(
    T: Sequence[np.ndarray],
    mode: str = "nc",
    depth: int = 40,
    tol: float = DEFAULT_TOL,
    coeff_check_depth: int = 5,
) -> DilationReport:
    """Shift dilation of a row contraction through its defect pair.

    Builds (D_{T*}, T*), certifies its observability series is close to an
    isometry (the Stein equality is exact for the defect pair, so the
    gramian equals the identity up to the geometric tail), checks the
    backshift intertwining coefficientwise at small depth, and compares T
    with the compression of the shift tuple using the closed form
    Obs* S_j Obs = (T*_j)* G_{depth-1}.
    """
    T = [as_matrix(Tj) for Tj in T]
    m = T[0].shape[0]
    hyp: dict[str, bool] = {}
    defect = hermitian_part(row_defect(T))
    verdict = psd_check(defect, max(tol, 1e-10))
    hyp["row_contraction"] = verdict.is_psd
    if not verdict.is_psd:
        return DilationReport(
            defect=defect,
            defect_sqrt=np.zeros_like(defect),
            coefficient_space_dim=0,
            obs_isometry_residual=float("inf"),
            tail_bound=float("inf"),
            compression_residuals=[float("inf")] * len(T),
            intertwining_residual=float("inf"),
            poisson_unital_residual=float("inf"),
            hypotheses=hyp,
        )
    if mode == "commutative":
        hyp["commutative"] = is_commutative(T)
    # the defect output map is the PSD square root itself
    vals, vecs = np.linalg.eigh(defect)
    vals = np.clip(vals, 0.0, None)
    Dsqrt = (vecs * np.sqrt(vals)) @ vecs.conj().T
    rank = int(np.sum(vals > effective_tol(tol, float(vals.max(initial=1.0)))))
    pair = OutputPair(C=Dsqrt, A=tuple(Tj.conj().T for Tj in T))
    stab = strong_stability(pair.A, max_level=depth, tol=tol)
    hyp["adjoint_strongly_stable"] = stab.verdict == "stable"
    # partial gramian to the requested depth, plus one step short of it
    phi = CPMap(pair.A)
    seed = pair.C.conj().T @ pair.C
    G = np.zeros_like(seed)
    term = seed.copy()
    G_prev = None
    for N in range(depth + 1):
        if N == depth:
            G_prev = G.copy()
        G = G + term
        term = phi(term)
    r = spectral_norm(sum(Aj.conj().T @ Aj for Aj in pair.A))
    tail = (
        spectral_norm(seed) * r ** (depth + 1) / (1 - r) if r < 1 else float("inf")
    )
    if mode == "commutative":
        gram = ab_gramian(pair, max_total_degree=depth, tol=tol)
        G = gram.value
        # commutative partial sums are dominated by the word sums; reuse bound
    iso_res = spectral_norm(G - np.eye(m))
    compression = []
    for j, Tj in enumerate(T):
        # Obs* S_j Obs = A_j* G_{depth-1} and A_j* = T_j
        Gm1 = G_prev if mode == "nc" else G
        compression.append(spectral_norm(Tj @ Gm1 - Tj))
    # coefficientwise intertwining at small depth (an exact index shuffle)
    inter = 0.0
    for col in range(m):
        x = np.zeros(m, dtype=complex)
        x[col] = 1.0
        if mode == "nc":
            f = nc_obs_poly(pair, x, coeff_check_depth)
            for j in range(1, pair.d + 1):
                lhs = right_backshift(j, f)
                rhs = nc_obs_poly(pair, pair.A[j - 1] @ x, coeff_check_depth)
                for v in set(lhs.coeffs) | set(rhs.coeffs):
                    if len(v) >= coeff_check_depth:
                        continue
                    inter = max(inter, float(np.abs(lhs[v] - rhs[v]).max()))
        else:
            f = ab_obs_poly(pair, x, coeff_check_depth)
            for j in range(1, pair.d + 1):
                lhs = arveson_backshift(j, f)
                rhs = ab_obs_poly(pair, pair.A[j - 1] @ x, coeff_check_depth)
                for n in set(lhs.coeffs) | set(rhs.coeffs):
                    if sum(n) >= coeff_check_depth:
                        continue
                    inter = max(inter, float(np.abs(lhs[n] - rhs[n]).max()))
    hyp["isometry_within_tail"] = iso_res <= max(tail * 1.01, 1e-14) + 1e-12
    return DilationReport(
        defect=defect,
        defect_sqrt=Dsqrt,
        coefficient_space_dim=rank,
        obs_isometry_residual=iso_res,
        tail_bound=tail,
        compression_residuals=compression,
        intertwining_residual=inter,
        poisson_unital_residual=iso_res,
        hypotheses=hyp,
    )


# ---------------------------------------------------------------------------
# Poisson transform on materialized truncated coordinates


def fock_basis_index(d: int, dim: int, depth: int) -> list[tuple[Word, int]]:
    return [(v, k) for v in words_up_to(d, depth) for k in range(dim)]


def obs_matrix(pair: OutputPair, depth: int) -> np.ndarray:
    """Matrix of the word observability series into truncated coordinates."""
    cols = []
    for col in range(pair.state_dim):
        x = np.zeros(pair.state_dim, dtype=complex)
        x[col] = 1.0
        f = nc_obs_poly(pair, x, depth)
        vec = np.concatenate([f[v] for v in words_up_to(pair.d, depth)])
        cols.append(vec)
    return np.array(cols).T


def poisson_transform(
    T: Sequence[np.ndarray], X: np.ndarray, depth: int = 8, tol: float = DEFAULT_TOL
) -> np.ndarray:
    """Obs* X Obs for the defect pair of a strict row contraction.

    X acts on the truncated word coordinates of the defect space (full state
    dimension is kept as the coefficient dimension, so X is indexed by
    (word, state-coordinate) pairs).
    """
    T = [as_matrix(Tj) for Tj in T]
    defect = hermitian_part(row_defect(T))
    verdict = psd_check(defect, max(tol, 1e-10))
    if not verdict.is_psd or spectral_norm(
        sum(Tj @ Tj.conj().T for Tj in T)
    ) >= 1:
        raise HypothesisError("need a strict row contraction")
    vals, vecs = np.linalg.eigh(defect)
    Dsqrt = (vecs * np.sqrt(np.clip(vals, 0, None))) @ vecs.conj().T
    pair = OutputPair(C=Dsqrt, A=tuple(Tj.conj().T for Tj in T))
    O = obs_matrix(pair, depth)
    X = as_matrix(X)
    if X.shape != (O.shape[0], O.shape[0]):
        raise DimensionError(
            f"X must act on the {O.shape[0]}-dimensional truncated coordinates"
        )
    return O.conj().T @ X @ O


def shift_matrix(j: int, d: int, dim: int, depth: int) -> np.ndarray:
    """Right-shift matrix on truncated word coordinates (compression)."""
    words = words_up_to(d, depth)
    pos = {v: i for i, v in enumerate(words)}
    n = len(words) * dim
    S = np.zeros((n, n), dtype=complex)
    for v, i in pos.items():
        w = v + (j,)
        if w in pos:
            k = pos[w]
            for c in range(dim):
                S[k * dim + c, i * dim + c] = 1.0
    return S


# ---------------------------------------------------------------------------
# von Neumann probe


@dataclass
class VonNeumannReport:
    lhs: float
    rhs_levels: list[float]
    satisfied_at_truncation: bool
    monotone: bool


def _poly_on_tuple(
    p: dict, T: Sequence[np.ndarray], mode: str
) -> np.ndarray:
    T = [as_matrix(Tj) for Tj in T]
    m = T[0].shape[0]
    out = np.zeros((m, m), dtype=complex)
    for key, coeff in p.items():
        key = tuple(key)
        base = (
            tuple_power_word(T, key)
            if mode == "nc"
            else tuple_power_multi(T, key)
        )
        out += complex(coeff) * base
    return out


def von_neumann_probe(
    T: Sequence[np.ndarray],
    p: dict,
    depth: int = 8,
    mode: str = "nc",
    tol: float = DEFAULT_TOL,
) -> VonNeumannReport:
    """Compare ||p(T)|| with compressions of p(shift) at growing depth.

    The compressions are nondecreasing lower bounds of the shift norm, so
    this is a probe of the inequality, never a proof; the report says
    whether the inequality held at the deepest truncation and whether the
    lower bounds were monotone.
    """
    T = [as_matrix(Tj) for Tj in T]
    d = len(T)
    defect = psd_check(hermitian_part(row_defect(T)), max(tol, 1e-10))
    if not defect.is_psd:
        raise HypothesisError("need a row contraction")
    lhs = spectral_norm(_poly_on_tuple(p, T, mode))
    rhs_levels: list[float] = []
    for N in range(1, depth + 1):
        if mode == "nc":
            words = words_up_to(d, N)
            pos = {v: i for i, v in enumerate(words)}
            M = np.zeros((len(words), len(words)), dtype=complex)
            for key, coeff in p.items():
                key = tuple(key)
                for v, i in pos.items():
                    w = v + tuple(reversed(key))  # S^key appends the reversed word
                    if w in pos:
                        M[pos[w], i] += complex(coeff)
            rhs_levels.append(spectral_norm(M))
        else:
            idxs = multi_indices_up_to(d, N)
            pos = {n: i for i, n in enumerate(idxs)}
            M = np.zeros((len(idxs), len(idxs)), dtype=complex)
            for key, coeff in p.items():
                key = tuple(key)
                for n, i in pos.items():
                    mkey = tuple(np.add(n, key))
                    if mkey in pos:
                        scale = math.sqrt(arveson_weight(mkey) / arveson_weight(n))
                        M[pos[mkey], i] += complex(coeff) * scale
            rhs_levels.append(spectral_norm(M))
    monotone = all(
        b >= a - 1e-12 for a, b in zip(rhs_levels, rhs_levels[1:])
    )
    satisfied = lhs <= rhs_levels[-1] + effective_tol(tol, max(1.0, lhs))
    return VonNeumannReport(
        lhs=lhs,
        rhs_levels=rhs_levels,
        satisfied_at_truncation=satisfied,
        monotone=monotone,
    )


# ---------------------------------------------------------------------------
# shift-invariant subspace factorization


@dataclass
class MultiplierPoly:
    """Coefficients of a multiplication operator between truncated spaces."""

    flavor: str  # nc | commutative
    coeffs: dict[tuple, np.ndarray]
    out_dim: int
    in_dim: int
    depth: int

    def word_matrix(self, domain_depth: int, d: int) -> np.ndarray:
        """Matrix of left multiplication from depth-limited domain into the
        range deep enough to hold every product."""
        dom_words = words_up_to(d, domain_depth)
        ran_words = words_up_to(d, domain_depth + self.depth)
        pos = {v: i for i, v in enumerate(ran_words)}
        M = np.zeros(
            (len(ran_words) * self.out_dim, len(dom_words) * self.in_dim),
            dtype=complex,
        )
        for u, theta in self.coeffs.items():
            for i, v in enumerate(dom_words):
                w = tuple(u) + v
                k = pos[w]
                M[
                    k * self.out_dim : (k + 1) * self.out_dim,
                    i * self.in_dim : (i + 1) * self.in_dim,
                ] += theta
        return M

    def ball_matrix(self, domain_degree: int, d: int) -> np.ndarray:
        """Weighted-coordinate matrix of multiplication between ball spaces."""
        dom = multi_indices_up_to(d, domain_degree)
        ran = multi_indices_up_to(d, domain_degree + self.depth)
        pos = {n: i for i, n in enumerate(ran)}
        M = np.zeros(
            (len(ran) * self.out_dim, len(dom) * self.in_dim), dtype=complex
        )
        for u, theta in self.coeffs.items():
            for i, n in enumerate(dom):
                mkey = tuple(np.add(n, u))
                k = pos[mkey]
                scale = math.sqrt(arveson_weight(mkey) / arveson_weight(n))
                M[
                    k * self.out_dim : (k + 1) * self.out_dim,
                    i * self.in_dim : (i + 1) * self.in_dim,
                ] += scale * theta
        return M


@dataclass
class BeurlingLaxResult:
    theta: MultiplierPoly
    input_dim: int
    hypotheses: dict[str, object]
    range_residual: float
    multiplier_norm: float
    singular_values: np.ndarray  # of the coefficient multiplication matrix
    operator_singular_values: np.ndarray  # of incl * Obs-adjoint
    partial_isometry_defect: float  # operator singular values off {0, 1}
    inner_defect: float  # multiplication singular values off 1 (collared)


def _defect_output(defect: np.ndarray, tol: float) -> np.ndarray:
    """C with C*C = defect and full row rank (rows = rank of the defect)."""
    vals, vecs = np.linalg.eigh(hermitian_part(defect))
    scale = float(np.abs(vals).max(initial=1.0))
    keep = vals > effective_tol(tol, scale)
    if not np.any(keep):
        return np.zeros((0, defect.shape[0]), dtype=complex)
    return (np.sqrt(vals[keep])[:, None] * vecs[:, keep].conj().T)


def beurling_lax(
    basis: Sequence[Union[FockPoly, BallPoly]],
    mode: str = "nc",
    collar: int = 2,
    tol: float = DEFAULT_TOL,
) -> BeurlingLaxResult:
    """Represent a finite-dimensional shift-invariant subspace as theta times
    the ambient space.

    The restricted-shift adjoints become the state tuple on the subspace
    coordinates, the defect of their column sum is factored into the output
    map (the input dimension is its rank), and theta's coefficients are read
    off the adjoint observability images of the input basis.  All identities
    are asserted away from the truncation boundary by the requested collar.
    """
    if mode not in ("nc", "commutative"):
        raise ValueError(f"unknown mode {mode!r}")
    if not basis:
        raise ValueError("need a nonempty basis")
    hyp: dict[str, object] = {}
    if mode == "nc":
        d = max((k for f in basis for v in f.coeffs for k in v), default=1)
        depth = max(f.depth for f in basis)
        support, M = fock_family_matrix(list(basis))
        dim = basis[0].dim
    else:
        d = len(next(iter(basis[0].coeffs)))
        depth = max(f.degree for f in basis)
        support, M = ball_family_matrix(list(basis), d)
        dim = basis[0].dim
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > effective_tol(tol, s[0])))
    if rank < len(basis):
        raise ValueError("basis is linearly dependent")
    Q = U[:, :rank]

    def to_poly(col: np.ndarray):
        if mode == "nc":
            coeffs = {
                v: col[r * dim : (r + 1) * dim] for r, v in enumerate(support)
            }
            return FockPoly(dim, depth, coeffs)
        coeffs = {
            n: col[r * dim : (r + 1) * dim] / math.sqrt(arveson_weight(n))
            for r, n in enumerate(support)
        }
        return BallPoly(dim, depth, coeffs)

    onb = [to_poly(Q[:, k]) for k in range(rank)]

    def embed(f) -> np.ndarray:
        if mode == "nc":
            _, mat = fock_family_matrix([f] + onb)
        else:
            _, mat = ball_family_matrix([f] + onb, d)
        return mat

    # restricted shifts in subspace coordinates, with invariance residuals
    shift_mats = []
    invariance = 0.0
    for j in range(1, d + 1):
        cols = []
        for f in onb:
            g = coordinate_shift(j, f, d) if mode == "commutative" else right_shift(j, f)
            mat = embed(g)
            vec, base = mat[:, 0], mat[:, 1:]
            coords = base.conj().T @ vec
            # only the interior (below the top level) is expected to stay
            resid = float(np.linalg.norm(vec - base @ coords))
            leak = math.sqrt(max(g.leakage, 0.0))
            invariance = max(invariance, max(resid - leak, 0.0) if leak else resid)
            cols.append(coords)
        shift_mats.append(np.array(cols).T)
    hyp["shift_invariance_residual"] = invariance
    hyp["shift_invariant"] = invariance <= effective_tol(max(tol, 1e-8), 1.0)
    R = [as_matrix(Rj) for Rj in shift_mats]
    row = sum(Rj @ Rj.conj().T for Rj in R)
    hyp["row_contraction"] = psd_check(
        hermitian_part(np.eye(rank) - row), max(tol, 1e-8)
    ).is_psd
    A = tuple(Rj.conj().T for Rj in R)
    stab = strong_stability(A, max_level=4 * rank + 8, tol=tol)
    hyp["adjoint_strongly_stable"] = stab.verdict == "stable"
    defect = hermitian_part(np.eye(rank) - sum(Aj.conj().T @ Aj for Aj in A))
    C = _defect_output(defect, max(tol, 1e-10))
    input_dim = C.shape[0]
    pair = OutputPair(C=C, A=A) if input_dim else None
    # theta coefficient at v: the subspace element with coordinates C* u,
    # read off in ambient coefficients
    coeffs: dict[tuple, np.ndarray] = {}
    if input_dim:
        Cs = C.conj().T  # rank x input_dim
        for u_col in range(input_dim):
            member = None
            for k in range(rank):
                piece = onb[k].scaled(Cs[k, u_col])
                member = piece if member is None else member.plus(piece)
            for key, c in member.coeffs.items():
                block = coeffs.setdefault(tuple(key), np.zeros((dim, input_dim), dtype=complex))
                block[:, u_col] = c
    theta = MultiplierPoly(
        flavor=mode, coeffs=coeffs, out_dim=dim, in_dim=max(input_dim, 1), depth=depth
    )
    # range check: theta applied to the observability image returns the basis
    range_res = 0.0
    if input_dim:
        for f in onb:
            coords = embed(f)[:, 1:].conj().T @ embed(f)[:, 0]
            if mode == "nc":
                series = nc_obs_poly(pair, coords, depth)
                recon = FockPoly(dim, 2 * depth, {})
                for u, theta_u in theta.coeffs.items():
                    for v, c in series.coeffs.items():
                        w = tuple(u) + v
                        if len(w) <= depth - collar:
                            add = FockPoly(dim, 2 * depth, {w: theta_u @ np.atleast_1d(c)})
                            recon = recon.plus(add)
                for v in {w for w in f.coeffs if len(w) <= depth - collar}:
                    range_res = max(range_res, float(np.abs(recon[v] - f[v]).max()))
                for v in {w for w in recon.coeffs if len(w) <= depth - collar}:
                    range_res = max(range_res, float(np.abs(recon[v] - f[v]).max()))
            else:
                series = ab_obs_poly(pair, coords, depth)
                recon = BallPoly(dim, 2 * depth, {})
                for u, theta_u in theta.coeffs.items():
                    for n, c in series.coeffs.items():
                        mkey = tuple(np.add(n, u))
                        if sum(mkey) <= depth - collar:
                            add = BallPoly(dim, 2 * depth, {mkey: theta_u @ np.atleast_1d(c)})
                            recon = recon.plus(add)
                for n in {k for k in f.coeffs if sum(k) <= depth - collar}:
                    range_res = max(range_res, float(np.abs(recon[n] - f[n]).max()))
                for n in {k for k in recon.coeffs if sum(k) <= depth - collar}:
                    range_res = max(range_res, float(np.abs(recon[n] - f[n]).max()))
    # the factorization operator incl * Obs-adjoint on truncated coordinates:
    # Obs is an exact isometry here (the pair is isometric with a nilpotent
    # tuple), so the operator is exactly a partial isometry and its singular
    # values certify that; the coefficient multiplication matrix agrees with
    # it on the initial space but sees the truncated tail of theta elsewhere.
    op_sv = np.zeros(0)
    pi_defect = float("inf")
    if input_dim:
        obs_cols = []
        for k in range(rank):
            x = np.zeros(rank, dtype=complex)
            x[k] = 1.0
            if mode == "nc":
                series = nc_obs_poly(pair, x, depth)
                vec = np.concatenate(
                    [series[v] for v in words_up_to(d, depth)]
                )
            else:
                series = ab_obs_poly(pair, x, depth)
                vec = np.concatenate(
                    [
                        math.sqrt(arveson_weight(n)) * series[n]
                        for n in multi_indices_up_to(d, depth)
                    ]
                )
            obs_cols.append(vec)
        O = np.array(obs_cols).T  # H_U coordinates x subspace coordinates
        obs_iso = spectral_norm(O.conj().T @ O - np.eye(rank))
        hyp["obs_isometry_residual"] = obs_iso
        theta_op = Q @ O.conj().T
        op_sv = np.linalg.svd(theta_op, compute_uv=False)
        pi_defect = float(
            max((min(abs(x - 1.0), abs(x)) for x in op_sv), default=0.0)
        )
    # multiplier norm of the coefficient matrix on a collared domain
    dom = max(depth - collar, 0)
    if input_dim:
        Mth = (
            theta.word_matrix(dom, d)
            if mode == "nc"
            else theta.ball_matrix(dom, d)
        )
        sv = np.linalg.svd(Mth, compute_uv=False)
        norm = float(sv.max(initial=0.0))
        inner_defect = float(max((abs(x - 1.0) for x in sv), default=0.0))
    else:
        sv = np.zeros(0)
        norm = 0.0
        inner_defect = float("inf")
    return BeurlingLaxResult(
        theta=theta,
        input_dim=input_dim,
        hypotheses=hyp,
        range_residual=range_res,
        multiplier_norm=norm,
        singular_values=sv,
        operator_singular_values=op_sv,
        partial_isometry_defect=pi_defect,
        inner_defect=inner_defect,
    )
