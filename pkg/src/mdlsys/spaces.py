"""Truncated Fock and ball-space coefficient stores, shifts, and model pairs.

A FockPoly is a word-indexed family of coefficient vectors with the plain
square-sum norm; a BallPoly is multi-index-indexed with weights n!/|n|!.
Forward shifts that would push a coefficient past the truncation depth
record the discarded mass in ``leakage`` instead of silently dropping it;
backshifts never leak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .linalg import as_matrix, as_vector, row_space_basis, spectral_norm
from .systems import OutputPair, tuple_power_word
from .util import DEFAULT_TOL, DimensionError, effective_tol
from .words import (
    MultiIndex,
    Word,
    arveson_weight,
    multi_indices_up_to,
    transpose,
    unit_index,
    words_up_to,
)


def _clean(vec: np.ndarray) -> Optional[np.ndarray]:
    return None if not np.any(vec) else vec


@dataclass
class FockPoly:
    """Word-indexed coefficients; absent words are zero."""

    dim: int
    depth: int
    coeffs: dict[Word, np.ndarray] = field(default_factory=dict)
    leakage: float = 0.0  # squared norm discarded past the depth

    def __post_init__(self):
        cleaned = {}
        for v, val in self.coeffs.items():
            vec = as_vector(val)
            if vec.size != self.dim:
                raise DimensionError(f"coefficient at {v} has size {vec.size}")
            if len(v) > self.depth:
                raise DimensionError(f"word {v} exceeds depth {self.depth}")
            if np.any(vec):
                cleaned[tuple(v)] = vec
        self.coeffs = cleaned

    def __getitem__(self, v: Word) -> np.ndarray:
        return self.coeffs.get(tuple(v), np.zeros(self.dim, dtype=complex))

    def norm2(self) -> float:
        return float(sum(np.vdot(c, c).real for c in self.coeffs.values()))

    def inner(self, other: "FockPoly") -> complex:
        acc = 0j
        for v, c in self.coeffs.items():
            o = other.coeffs.get(v)
            if o is not None:
                acc += np.vdot(o, c)  # linear in self, conjugate in other
        return acc

    def scaled(self, z: complex) -> "FockPoly":
        return FockPoly(self.dim, self.depth, {v: z * c for v, c in self.coeffs.items()})

    def plus(self, other: "FockPoly") -> "FockPoly":
        out = {v: c.copy() for v, c in self.coeffs.items()}
        for v, c in other.coeffs.items():
            out[v] = out.get(v, 0) + c
        return FockPoly(self.dim, max(self.depth, other.depth), out)


@dataclass
class BallPoly:
    """Multi-index coefficients with the weighted square-sum norm."""

    dim: int
    degree: int
    coeffs: dict[MultiIndex, np.ndarray] = field(default_factory=dict)
    leakage: float = 0.0

    def __post_init__(self):
        cleaned = {}
        for n, val in self.coeffs.items():
            vec = as_vector(val)
            if vec.size != self.dim:
                raise DimensionError(f"coefficient at {n} has size {vec.size}")
            if sum(n) > self.degree:
                raise DimensionError(f"index {n} exceeds degree {self.degree}")
            if np.any(vec):
                cleaned[tuple(n)] = vec
        self.coeffs = cleaned

    def __getitem__(self, n: MultiIndex) -> np.ndarray:
        return self.coeffs.get(tuple(n), np.zeros(self.dim, dtype=complex))

    def norm2(self) -> float:
        return float(
            sum(arveson_weight(n) * np.vdot(c, c).real for n, c in self.coeffs.items())
        )

    def inner(self, other: "BallPoly") -> complex:
        acc = 0j
        for n, c in self.coeffs.items():
            o = other.coeffs.get(n)
            if o is not None:
                acc += arveson_weight(n) * np.vdot(o, c)
        return acc

    def scaled(self, z: complex) -> "BallPoly":
        return BallPoly(self.dim, self.degree, {n: z * c for n, c in self.coeffs.items()})

    def plus(self, other: "BallPoly") -> "BallPoly":
        out = {n: c.copy() for n, c in self.coeffs.items()}
        for n, c in other.coeffs.items():
            out[n] = out.get(n, 0) + c
        return BallPoly(self.dim, max(self.degree, other.degree), out)

    def eval(self, lam: Sequence[complex]) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        out = np.zeros(self.dim, dtype=complex)
        for n, c in self.coeffs.items():
            out += c * np.prod(lam ** np.array(n))
        return out


# ---------------------------------------------------------------------------
# shifts on the word side


def right_shift(j: int, f: FockPoly) -> FockPoly:
    """Multiply by the j-th letter on the right; clipped at the depth."""
    out: dict[Word, np.ndarray] = {}
    leak = 0.0
    for v, c in f.coeffs.items():
        w = v + (j,)
        if len(w) > f.depth:
            leak += float(np.vdot(c, c).real)
        else:
            out[w] = c.copy()
    g = FockPoly(f.dim, f.depth, out)
    g.leakage = f.leakage + leak
    return g


def right_backshift(j: int, f: FockPoly) -> FockPoly:
    """Adjoint of the right shift: keep coefficients at words ending in j,
    stripping that letter."""
    out: dict[Word, np.ndarray] = {}
    for v, c in f.coeffs.items():
        if v and v[-1] == j:
            out[v[:-1]] = c.copy()
    g = FockPoly(f.dim, f.depth, out)
    g.leakage = f.leakage
    return g


def left_shift(j: int, f: FockPoly) -> FockPoly:
    out: dict[Word, np.ndarray] = {}
    leak = 0.0
    for v, c in f.coeffs.items():
        w = (j,) + v
        if len(w) > f.depth:
            leak += float(np.vdot(c, c).real)
        else:
            out[w] = c.copy()
    g = FockPoly(f.dim, f.depth, out)
    g.leakage = f.leakage + leak
    return g


def left_backshift(j: int, f: FockPoly) -> FockPoly:
    out: dict[Word, np.ndarray] = {}
    for v, c in f.coeffs.items():
        if v and v[0] == j:
            out[v[1:]] = c.copy()
    g = FockPoly(f.dim, f.depth, out)
    g.leakage = f.leakage
    return g


def tau(f: FockPoly) -> FockPoly:
    """The coefficient-transposing involution; isometric and involutive."""
    return FockPoly(
        f.dim, f.depth, {transpose(v): c.copy() for v, c in f.coeffs.items()}
    )


def eval_E(f: FockPoly) -> np.ndarray:
    """Coefficient at the empty word."""
    return f[()]


def constant_fock(vec, depth: int) -> FockPoly:
    v = as_vector(vec)
    return FockPoly(v.size, depth, {(): v})


# ---------------------------------------------------------------------------
# shifts on the ball side


def coordinate_shift(j: int, f: BallPoly, d: int) -> BallPoly:
    """Multiply by the j-th coordinate; clipped at the degree."""
    out: dict[MultiIndex, np.ndarray] = {}
    leak = 0.0
    e = unit_index(d, j)
    for n, c in f.coeffs.items():
        m = tuple(np.add(n, e))
        if sum(m) > f.degree:
            leak += arveson_weight(m) * float(np.vdot(c, c).real)
        else:
            out[m] = c.copy()
    g = BallPoly(f.dim, f.degree, out)
    g.leakage = f.leakage + leak
    return g


def arveson_backshift(j: int, f: BallPoly) -> BallPoly:
    """Adjoint of coordinate multiplication in the weighted metric:
    the monomial at m maps to (m_j/|m|) times the monomial at m - e_j."""
    out: dict[MultiIndex, np.ndarray] = {}
    for n, c in f.coeffs.items():
        if n[j - 1] == 0:
            continue
        m = list(n)
        m[j - 1] -= 1
        out[tuple(m)] = (n[j - 1] / sum(n)) * c
    g = BallPoly(f.dim, f.degree, out)
    g.leakage = f.leakage
    return g


def eval_G(f: BallPoly) -> np.ndarray:
    """Value at the origin: the coefficient at the zero index."""
    for n, c in f.coeffs.items():
        if sum(n) == 0:
            return c
    return np.zeros(f.dim, dtype=complex)


def constant_ball(vec, d: int, degree: int) -> BallPoly:
    v = as_vector(vec)
    return BallPoly(v.size, degree, {tuple([0] * d): v})


# ---------------------------------------------------------------------------
# observability polynomials


def nc_obs_poly(
    pair: OutputPair, x, depth: int, side: str = "right"
) -> FockPoly:
    """Truncated word series of outputs C A^v x (or C A^{transpose(v)} x for
    the left flavor)."""
    x = as_vector(x)
    coeffs: dict[Word, np.ndarray] = {}
    # walk states level by level instead of recomputing A^v per word
    states: dict[Word, np.ndarray] = {(): x}
    for v in words_up_to(pair.d, depth):
        if v not in states:
            j, w = v[0], v[1:]
            states[v] = pair.A[j - 1] @ states[w]
        key = transpose(v) if side == "left" else v
        coeffs[key] = pair.C @ states[v]
    return FockPoly(pair.output_dim, depth, coeffs)


def ab_obs_poly(pair: OutputPair, x, degree: int) -> BallPoly:
    """Truncated ball series with coefficients C W(n) x."""
    from .stein import output_power_rows

    x = as_vector(x)
    rows = output_power_rows(pair.C, pair.A, degree)
    coeffs = {n: CW @ x for n, CW in rows.items()}
    return BallPoly(pair.output_dim, degree, coeffs)


# ---------------------------------------------------------------------------
# matrix views of finite families


def fock_family_matrix(polys: Sequence[FockPoly]) -> tuple[list[Word], np.ndarray]:
    """Stack a family into columns over the union of supports (plain metric)."""
    support = sorted({v for f in polys for v in f.coeffs}, key=lambda v: (len(v), v))
    dim = polys[0].dim
    M = np.zeros((len(support) * dim, len(polys)), dtype=complex)
    for col, f in enumerate(polys):
        for row, v in enumerate(support):
            M[row * dim : (row + 1) * dim, col] = f[v]
    return support, M


def ball_family_matrix(
    polys: Sequence[BallPoly], d: int
) -> tuple[list[MultiIndex], np.ndarray]:
    """Stack a family into columns, scaled so plain column inner products
    reproduce the weighted metric."""
    support = sorted({n for f in polys for n in f.coeffs}, key=lambda n: (sum(n), n))
    dim = polys[0].dim
    M = np.zeros((len(support) * dim, len(polys)), dtype=complex)
    for col, f in enumerate(polys):
        for row, n in enumerate(support):
            M[row * dim : (row + 1) * dim, col] = math.sqrt(arveson_weight(n)) * f[n]
    return support, M


# ---------------------------------------------------------------------------
# model pair from a backshift-invariant subspace


@dataclass
class ModelPairResult:
    pair: OutputPair
    onb: list[FockPoly]  # orthonormal basis of the transposed subspace
    invariance_residual: float
    dim: int


def model_pair_from_fock_subspace(
    basis: Sequence[FockPoly], tol: float = DEFAULT_TOL
) -> ModelPairResult:
    """Recover an output pair whose observability series reproduces the span.

    The state space is the involution image of the input span, the state
    maps are the left backshifts restricted to it, and the output map is
    evaluation at the empty word.  The input span must be invariant under
    right backshifts (equivalently its image under the involution is
    invariant under left backshifts); the projection residual of that
    invariance is returned.
    """
    if not basis:
        raise ValueError("need a nonempty basis")
    dim, depth, d = basis[0].dim, max(f.depth for f in basis), _alphabet_of(basis)
    X = [tau(f) for f in basis]
    support, M = fock_family_matrix(X)
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > effective_tol(tol, s[0])))
    if rank < len(basis):
        raise ValueError("basis is linearly dependent")
    Q = U[:, :rank]

    def to_poly(col: np.ndarray) -> FockPoly:
        coeffs = {
            v: col[row * dim : (row + 1) * dim] for row, v in enumerate(support)
        }
        return FockPoly(dim, depth, coeffs)

    onb = [to_poly(Q[:, k]) for k in range(rank)]
    invariance_residual = 0.0
    A_mats = []
    for j in range(1, d + 1):
        cols = []
        for f in onb:
            g = left_backshift(j, f)
            _, gv = fock_family_matrix([g] + onb)  # shared support stacking
            vec, base = gv[:, 0], gv[:, 1:]
            coords = base.conj().T @ vec
            invariance_residual = max(
                invariance_residual, float(np.linalg.norm(vec - base @ coords))
            )
            cols.append(coords)
        A_mats.append(np.array(cols).T)
    C = np.array([eval_E(f) for f in onb]).T
    pair = OutputPair(C=C.reshape(dim, rank), A=tuple(A_mats))
    return ModelPairResult(
        pair=pair, onb=onb, invariance_residual=invariance_residual, dim=rank
    )


def _alphabet_of(polys: Sequence[FockPoly]) -> int:
    letters = {k for f in polys for v in f.coeffs for k in v}
    return max(letters) if letters else 1


def obs_poly_of_model(result: ModelPairResult, f: FockPoly, depth: int) -> FockPoly:
    """Observability series of the model pair at the coordinates of tau(f)."""
    g = tau(f)
    _, gv = fock_family_matrix([g] + result.onb)
    coords = gv[:, 1:].conj().T @ gv[:, 0]
    return nc_obs_poly(result.pair, coords, depth)


# ---------------------------------------------------------------------------
# Gleason solutions


@dataclass
class GleasonSolution:
    """A tuple T solving f - f(0) = sum_j lambda_j (T_j f) on a finite span."""

    basis: list[BallPoly]
    T: tuple[np.ndarray, ...]
    eval_matrix: np.ndarray  # value at the origin, in basis coordinates
    gram: np.ndarray  # Gram matrix of the basis
    contractive: bool
    coeff_residual: float
    sample_residual: float
    sample_tol: float


def _combine(basis: Sequence[BallPoly], coords: np.ndarray) -> BallPoly:
    out = BallPoly(basis[0].dim, max(f.degree for f in basis), {})
    for c, f in zip(coords, basis):
        if c != 0:
            out = out.plus(f.scaled(c))
    return out


def gleason_from_pair(
    pair: OutputPair,
    degree: int = 12,
    tol: float = DEFAULT_TOL,
    samples: int = 20,
    seed: int = 7,
) -> GleasonSolution:
    """Division operators on the range of the ball observability series.

    T_j sends the series of x to the series of A_j x, restricted to the
    orthocomplement of the gramian kernel; the identity
    f - f(0) = sum_j lambda_j (T_j f) then holds by the resolvent algebra.
    """
    from .stein import ab_gramian
    from .linalg import nullspace_basis

    gram_report = ab_gramian(pair, tol=tol)
    if gram_report.diverged:
        raise ValueError("ball gramian diverged; no bounded observability range")
    Ga = gram_report.value
    kern = nullspace_basis(Ga, max(tol, 1e-10))
    k = kern.shape[1]
    m = pair.state_dim
    if k:
        B = nullspace_basis(kern.conj().T, tol)  # orthonormal complement
    else:
        B = np.eye(m, dtype=complex)
    basis = [ab_obs_poly(pair, B[:, i], degree) for i in range(B.shape[1])]
    T = tuple(B.conj().T @ Aj @ B for Aj in pair.A)
    Gamma = B.conj().T @ Ga @ B
    Ceval = pair.C @ B
    lhs = sum(Tj.conj().T @ Gamma @ Tj for Tj in T) + Ceval.conj().T @ Ceval
    from .linalg import psd_check, hermitian_part

    contr = psd_check(hermitian_part(Gamma - lhs), max(tol, 1e-8)).is_psd
    coeff_res = _gleason_residual_coeffwise(basis, T, pair.d)
    rng = np.random.default_rng(seed)
    sample_res = 0.0
    for _ in range(samples):
        lam = rng.standard_normal(pair.d) + 1j * rng.standard_normal(pair.d)
        lam *= 0.5 / max(1.0, np.linalg.norm(lam))
        for i, f in enumerate(basis):
            val = f.eval(lam) - eval_G(f)
            acc = np.zeros(f.dim, dtype=complex)
            for j in range(1, pair.d + 1):
                Tf = _combine(basis, T[j - 1][:, i])
                acc += lam[j - 1] * Tf.eval(lam)
            sample_res = max(sample_res, float(np.abs(val - acc).max()))
    # point residuals only see the clipped top degree; bound that mass
    sample_tol = max(1e-12, 10 * _top_degree_mass(basis) * 0.5 ** (degree + 1))
    return GleasonSolution(
        basis=basis,
        T=T,
        eval_matrix=Ceval,
        gram=Gamma,
        contractive=contr,
        coeff_residual=coeff_res,
        sample_residual=sample_res,
        sample_tol=sample_tol,
    )


def _top_degree_mass(basis: Sequence[BallPoly]) -> float:
    worst = 0.0
    for f in basis:
        if not f.coeffs:
            continue
        top = max(sum(n) for n in f.coeffs)
        for n, c in f.coeffs.items():
            if sum(n) == top:
                worst = max(worst, float(np.abs(c).max()))
    return worst


def _gleason_residual_coeffwise(
    basis: Sequence[BallPoly], T: Sequence[np.ndarray], d: int
) -> float:
    """Exact coefficient defect of f - f(0) = sum_j lambda_j T_j f through the
    truncation degree."""
    worst = 0.0
    degree = min(f.degree for f in basis)
    for i, f in enumerate(basis):
        rhs: dict[MultiIndex, np.ndarray] = {}
        for j in range(1, d + 1):
            Tf = _combine(basis, T[j - 1][:, i])
            for n, c in Tf.coeffs.items():
                mkey = tuple(np.add(n, unit_index(d, j)))
                if sum(mkey) <= degree:
                    rhs[mkey] = rhs.get(mkey, 0) + c
        keys = {n for n in f.coeffs if 0 < sum(n) <= degree} | set(rhs)
        for n in keys:
            diff = f[n] - rhs.get(n, np.zeros(f.dim, dtype=complex))
            worst = max(worst, float(np.abs(diff).max()))
    return worst


@dataclass
class GleasonCheck:
    solves: bool
    contractive: bool
    equals_backshift: bool
    coeff_residual: float
    backshift_deviation: float


def gleason_check(sol: GleasonSolution, d: int, tol: float = DEFAULT_TOL) -> GleasonCheck:
    """Re-test a candidate solution: the division identity coefficientwise,
    contractivity on the basis Gram matrix, and agreement with the weighted
    backshifts."""
    coeff_res = _gleason_residual_coeffwise(sol.basis, sol.T, d)
    solves = coeff_res <= effective_tol(max(tol, 1e-10), 1.0)
    lhs = sum(Tj.conj().T @ sol.gram @ Tj for Tj in sol.T)
    lhs = lhs + sol.eval_matrix.conj().T @ sol.eval_matrix
    from .linalg import hermitian_part, psd_check

    contractive = psd_check(hermitian_part(sol.gram - lhs), max(tol, 1e-8)).is_psd
    deviation = 0.0
    degree = min(f.degree for f in sol.basis)
    for i, f in enumerate(sol.basis):
        for j in range(1, d + 1):
            viaT = _combine(sol.basis, sol.T[j - 1][:, i])
            viaS = arveson_backshift(j, f)
            for n in set(viaT.coeffs) | set(viaS.coeffs):
                if sum(n) >= degree:
                    continue  # backshift of clipped top degree is unreliable
                deviation = max(
                    deviation, float(np.abs(viaT[n] - viaS[n]).max())
                )
    return GleasonCheck(
        solves=solves,
        contractive=contractive,
        equals_backshift=deviation <= effective_tol(max(tol, 1e-10), 1.0),
        coeff_residual=coeff_res,
        backshift_deviation=deviation,
    )


# ---------------------------------------------------------------------------
# Hankel rationality probe


@dataclass
class HankelStep:
    size: int
    rank: int
    full_rank: bool
    min_singular_value: float  # of the equilibrated matrix
    min_singular_value_raw: float


@dataclass
class HankelReport:
    steps: list[HankelStep]

    def full_rank_through(self, size: int) -> bool:
        return all(s.full_rank for s in self.steps if s.size <= size)


def hankel_rationality_probe(
    seq: Sequence[complex] | Callable[[int], complex], n: int
) -> HankelReport:
    """Ranks of the k x k Hankel blocks [s_{i+j}] for k = 1..n.

    Bounded rank certifies a rational generating function; the minimum
    singular values (after diagonal equilibration) quantify how far each
    block is from a rank drop.
    """
    if callable(seq):
        s = [complex(seq(k)) for k in range(2 * n)]
    else:
        s = [complex(v) for v in seq]
        if len(s) < 2 * n - 1:
            raise ValueError(f"need at least {2 * n - 1} terms for size {n}")
    steps: list[HankelStep] = []
    for k in range(1, n + 1):
        H = np.array([[s[i + j] for j in range(k)] for i in range(k)])
        sv_raw = np.linalg.svd(H, compute_uv=False)
        diag = np.abs(np.diag(H))
        if np.all(diag > 0):
            dd = 1 / np.sqrt(diag)
            Hs = H * np.outer(dd, dd)
        else:  # fall back to max-entry row/column equilibration
            Hs = H.copy()
            for _ in range(25):
                r = np.sqrt(np.abs(Hs).max(axis=1))
                c = np.sqrt(np.abs(Hs).max(axis=0))
                r[r == 0] = 1.0
                c[c == 0] = 1.0
                Hs = Hs / np.outer(r, c)
        sv = np.linalg.svd(Hs, compute_uv=False)
        rank = int(np.linalg.matrix_rank(H))
        steps.append(
            HankelStep(
                size=k,
                rank=rank,
                full_rank=rank == k,
                min_singular_value=float(sv.min()),
                min_singular_value_raw=float(sv_raw.min()),
            )
        )
    return HankelReport(steps=steps)
