"""Gramians, Stein equations and inequalities, stability, observability.

The word-indexed observability gramian is the level series
sum_N Phi^N(C*C) for the completely positive map Phi(X) = sum_j A_j* X A_j;
its lattice counterpart weights fiber sums W(n) = sum over the fiber of A^v
by n!/|n|!.  Convergence is certified (or refuted) from the level norms, and
every report keeps the history it was decided on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .linalg import (
    HermitianVerdict,
    SteinSolveReport,
    as_matrix,
    hermitian_factor,
    hermitian_part,
    nullspace_basis,
    psd_check,
    row_space_basis,
    solve_sylvester_vectorized,
    spectral_norm,
)
from .systems import OutputPair, is_commutative
from .util import (
    BLOWUP_FACTOR,
    DEFAULT_MAX_LEVEL,
    DEFAULT_TOL,
    DimensionError,
    HypothesisError,
    effective_tol,
)
from .words import MultiIndex, arveson_weight, multi_indices, multi_indices_up_to, unit_index

#: consecutive level-norm ratios required below 1 before the geometric tail
#: bound is trusted
CERT_WINDOW = 5


@dataclass
class CPMap:
    """X -> sum_j A_j* X A_j, the completely positive step of all level sums."""

    A: tuple[np.ndarray, ...]

    def __post_init__(self):
        self.A = tuple(as_matrix(Aj) for Aj in self.A)
        m = self.A[0].shape[0]
        if any(Aj.shape != (m, m) for Aj in self.A):
            raise DimensionError("all A_j must be square of equal size")

    def __call__(self, X) -> np.ndarray:
        X = as_matrix(X)
        if X.shape != self.A[0].shape:
            raise DimensionError(f"argument shape {X.shape} does not match state")
        out = np.zeros_like(X)
        for Aj in self.A:
            out += Aj.conj().T @ X @ Aj
        return out


def cp_apply(A: Sequence[np.ndarray], X) -> np.ndarray:
    return CPMap(tuple(A))(X)


@dataclass
class GramianReport:
    """Partial-sum gramian with its convergence bookkeeping.

    ``converged`` means the geometric tail certificate fired (or the level
    terms vanished exactly); ``diverged`` means the partial sums crossed the
    blow-up threshold.  Neither flag set means the iteration was
    inconclusive at ``levels_used``.
    """

    value: np.ndarray
    levels_used: int
    level_norms: list[float]
    partial_norms: list[float]
    tail_estimate: float
    converged: bool
    diverged: bool
    terminated_exactly: bool
    stein_residual: Optional[float] = None
    flavor: str = "noncommutative"

    @property
    def verdict(self) -> str:
        if self.diverged:
            return "diverged"
        if self.converged:
            return "converged"
        return "inconclusive"


def _certificate(level_norms: list[float], scale: float, tol: float):
    """Geometric tail bound from the trailing level norms.

    Returns (converged, terminated_exactly, tail_estimate).  A full level of
    exact zeros propagates to all later levels (each level's rows are sums of
    previous-level rows times A_j), so it certifies exact termination.
    """
    sigma = level_norms[-1]
    if sigma == 0.0:
        return True, True, 0.0
    if len(level_norms) <= CERT_WINDOW:
        return False, False, float("inf")
    window = level_norms[-CERT_WINDOW - 1 :]
    ratios = [b / a if a > 0 else float("inf") for a, b in zip(window, window[1:])]
    r = max(ratios)
    if r >= 1.0:
        return False, False, float("inf")
    tail = sigma * r / (1.0 - r)
    return tail <= effective_tol(tol, scale), False, tail


def nc_gramian(
    pair: OutputPair,
    max_level: int = DEFAULT_MAX_LEVEL,
    tol: float = DEFAULT_TOL,
) -> GramianReport:
    """Word gramian sum_N Phi^N(C*C), with tail certificate and divergence cut."""
    phi = CPMap(pair.A)
    seed = pair.C.conj().T @ pair.C
    seed_norm = spectral_norm(seed)
    G = np.zeros_like(seed)
    term = seed.copy()
    level_norms: list[float] = []
    partial_norms: list[float] = []
    converged = diverged = terminated = False
    tail = float("inf")
    levels = 0
    for N in range(max_level + 1):
        G = G + term
        levels = N
        level_norms.append(spectral_norm(term))
        partial_norms.append(spectral_norm(G))
        if partial_norms[-1] > BLOWUP_FACTOR * max(1.0, seed_norm):
            diverged = True
            break
        converged, terminated, tail = _certificate(level_norms, partial_norms[-1], tol)
        if converged:
            break
        term = phi(term)
    residual = None
    if not diverged:
        residual = spectral_norm(G - phi(G) - seed)
    return GramianReport(
        value=hermitian_part(G),
        levels_used=levels,
        level_norms=level_norms,
        partial_norms=partial_norms,
        tail_estimate=tail if converged else (0.0 if terminated else tail),
        converged=converged,
        diverged=diverged,
        terminated_exactly=terminated,
        stein_residual=residual,
        flavor="noncommutative",
    )


@dataclass
class AbelianPowerTable:
    """Fiber sums W(n) = sum over the abelianization fiber of n of A^v.

    Filled by the recursion W(n) = sum_i W(n - e_i) A_i with W = 0 off the
    positive orthant and W(0) = I.
    """

    depth: int
    table: dict[MultiIndex, np.ndarray]

    def __getitem__(self, n: MultiIndex) -> np.ndarray:
        return self.table[tuple(n)]


def abelian_power_table(A: Sequence[np.ndarray], depth: int) -> AbelianPowerTable:
    A = [as_matrix(Aj) for Aj in A]
    d, m = len(A), A[0].shape[0]
    table: dict[MultiIndex, np.ndarray] = {tuple([0] * d): np.eye(m, dtype=complex)}
    for total in range(1, depth + 1):
        for n in multi_indices(d, total):
            acc = np.zeros((m, m), dtype=complex)
            for i in range(d):
                prev = tuple(np.subtract(n, unit_index(d, i + 1)))
                if min(prev) >= 0:
                    acc += table[prev] @ A[i]
            table[n] = acc
    return AbelianPowerTable(depth=depth, table=table)


def output_power_rows(
    C: np.ndarray, A: Sequence[np.ndarray], depth: int
) -> dict[MultiIndex, np.ndarray]:
    """C W(n) for |n| <= depth, via the same recursion on p x m rows only."""
    C = as_matrix(C)
    A = [as_matrix(Aj) for Aj in A]
    d = len(A)
    rows: dict[MultiIndex, np.ndarray] = {tuple([0] * d): C.copy()}
    for total in range(1, depth + 1):
        for n in multi_indices(d, total):
            acc = np.zeros_like(C)
            for i in range(d):
                prev = tuple(np.subtract(n, unit_index(d, i + 1)))
                if min(prev) >= 0:
                    acc += rows[prev] @ A[i]
            rows[n] = acc
    return rows


def ab_gramian(
    pair: OutputPair,
    max_total_degree: int = DEFAULT_MAX_LEVEL,
    tol: float = DEFAULT_TOL,
) -> GramianReport:
    """Lattice gramian sum_n (n!/|n|!) W(n)* C*C W(n), by total degree.

    No Stein residual is attached: the lattice gramian satisfies only the
    reverse inequality, not the equation.
    """
    d, m = pair.d, pair.state_dim
    C = pair.C
    seed_norm = spectral_norm(C.conj().T @ C)
    rows: dict[MultiIndex, np.ndarray] = {tuple([0] * d): C.copy()}
    G = np.zeros((m, m), dtype=complex)
    level_norms: list[float] = []
    partial_norms: list[float] = []
    converged = diverged = terminated = False
    tail = float("inf")
    levels = 0
    for total in range(max_total_degree + 1):
        if total > 0:
            new_rows: dict[MultiIndex, np.ndarray] = {}
            for n in multi_indices(d, total):
                acc = np.zeros_like(C)
                for i in range(d):
                    prev = tuple(np.subtract(n, unit_index(d, i + 1)))
                    if min(prev) >= 0:
                        acc += rows[prev] @ pair.A[i]
                new_rows[n] = acc
            rows = new_rows
        term = np.zeros((m, m), dtype=complex)
        for n, CW in rows.items():
            term += arveson_weight(n) * (CW.conj().T @ CW)
        G = G + term
        levels = total
        level_norms.append(spectral_norm(term))
        partial_norms.append(spectral_norm(G))
        if partial_norms[-1] > BLOWUP_FACTOR * max(1.0, seed_norm):
            diverged = True
            break
        converged, terminated, tail = _certificate(level_norms, partial_norms[-1], tol)
        if converged:
            break
    return GramianReport(
        value=hermitian_part(G),
        levels_used=levels,
        level_norms=level_norms,
        partial_norms=partial_norms,
        tail_estimate=tail if converged else (0.0 if terminated else tail),
        converged=converged,
        diverged=diverged,
        terminated_exactly=terminated,
        stein_residual=None,
        flavor="commutative",
    )


@dataclass
class ReverseSteinReport:
    """The reverse inequality C*C - G^a + sum_j A_j* G^a A_j >= 0 in parts."""

    q_matrix: np.ndarray  # C*C - G^a + sum A_j* G^a A_j  (PSD by theory)
    q_verdict: HermitianVerdict
    display: np.ndarray  # G^a - sum A_j* G^a A_j        (C*C not subtracted)
    display_verdict: HermitianVerdict
    complement: np.ndarray  # display - C*C = -q_matrix


def reverse_stein_residual(
    pair: OutputPair, gram: GramianReport, tol: float = DEFAULT_TOL
) -> ReverseSteinReport:
    if gram.flavor != "commutative":
        raise ValueError("reverse Stein residual applies to the lattice gramian")
    if not (gram.converged or gram.terminated_exactly):
        raise HypothesisError("lattice gramian did not converge")
    Ga = gram.value
    phi = CPMap(pair.A)
    seed = pair.C.conj().T @ pair.C
    display = hermitian_part(Ga - phi(Ga))
    q = hermitian_part(seed - display)
    return ReverseSteinReport(
        q_matrix=q,
        q_verdict=psd_check(q, tol),
        display=display,
        display_verdict=psd_check(display, tol),
        complement=-q,
    )


@dataclass
class ReverseSteinCertificate:
    """Per-index PSD blocks whose sum reproduces the reverse-Stein defect.

    Each block is assembled from the cross rows
    R(n,i,j) = C [ n_i W(n-e_j) A_j - n_j W(n-e_i) A_i ],
    scaled by (n - e_i - e_j)! / |n|! and halved over ordered pairs i != j.
    """

    depth: int
    blocks: dict[MultiIndex, np.ndarray]
    total: np.ndarray
    matches_residual: bool
    mismatch: float


def reverse_stein_certificate(
    pair: OutputPair, depth: int, tol: float = DEFAULT_TOL
) -> ReverseSteinCertificate:
    from math import factorial

    d, m = pair.d, pair.state_dim
    rows = output_power_rows(pair.C, pair.A, depth)
    blocks: dict[MultiIndex, np.ndarray] = {}
    total = np.zeros((m, m), dtype=complex)
    for N in range(1, depth + 1):
        for n in multi_indices(d, N):
            Sn = np.zeros((m, m), dtype=complex)
            for i in range(d):
                for j in range(d):
                    if i == j or n[i] == 0 or n[j] == 0:
                        continue
                    n_minus_j = tuple(np.subtract(n, unit_index(d, j + 1)))
                    n_minus_i = tuple(np.subtract(n, unit_index(d, i + 1)))
                    R = n[i] * rows[n_minus_j] @ pair.A[j] - n[j] * rows[n_minus_i] @ pair.A[i]
                    base = tuple(np.subtract(n_minus_j, unit_index(d, i + 1)))
                    coeff = 1.0
                    for k in base:
                        coeff *= factorial(k)
                    coeff /= factorial(N)
                    Sn += 0.5 * coeff * (R.conj().T @ R)
            if spectral_norm(Sn) > 0:
                blocks[n] = Sn
            total += Sn
    gram = ab_gramian(pair, max_total_degree=max(depth, DEFAULT_MAX_LEVEL), tol=tol)
    residual = reverse_stein_residual(pair, gram, tol)
    mismatch = spectral_norm(total - residual.q_matrix)
    scale = max(1.0, spectral_norm(residual.q_matrix))
    tail_slack = gram.tail_estimate if np.isfinite(gram.tail_estimate) else 0.0
    ok = mismatch <= max(effective_tol(1e-6, scale), 10 * tail_slack)
    return ReverseSteinCertificate(
        depth=depth, blocks=blocks, total=total, matches_residual=ok, mismatch=mismatch
    )


@dataclass
class SteinSolutionReport:
    mode: str
    solution: Optional[np.ndarray]
    residual: Optional[float]
    nullspace_dim: Optional[int]
    strictly_positive: Optional[bool]
    similarity: Optional[tuple[np.ndarray, tuple[np.ndarray, ...]]]
    similar_pair_contractive: Optional[HermitianVerdict]
    deltas_tried: list[float]
    converged: bool
    notes: str = ""


def stein_solve(
    pair: OutputPair,
    mode: str = "equation",
    tol: float = DEFAULT_TOL,
    max_level: int = 4 * DEFAULT_MAX_LEVEL,
) -> SteinSolutionReport:
    """Solve H - sum_j A_j* H A_j = C*C, or search for a strictly PD solution.

    Equation mode reports non-uniqueness through the null-space dimension of
    the vectorized map.  The strictly-positive search runs the convergent
    series for right sides C*C + delta I over decreasing delta and, on
    success, returns the similarity (C S^{-1}, S A_j S^{-1}) with H = S*S,
    verified to be a contractive pair.
    """
    seed = pair.C.conj().T @ pair.C
    if mode == "equation":
        rep = solve_sylvester_vectorized(pair.A, seed, tol)
        return SteinSolutionReport(
            mode=mode,
            solution=rep.solution,
            residual=rep.residual,
            nullspace_dim=rep.nullspace_dim,
            strictly_positive=None,
            similarity=None,
            similar_pair_contractive=None,
            deltas_tried=[],
            converged=not rep.singular,
            notes="singular map: solution is the least-squares representative"
            if rep.singular
            else "",
        )
    if mode != "strictly-positive-search":
        raise ValueError(f"unknown mode {mode!r}")
    phi = CPMap(pair.A)
    m = pair.state_dim
    deltas = [1.0, 0.1, 0.01]
    tried: list[float] = []
    for delta in deltas:
        tried.append(delta)
        rhs = seed + delta * np.eye(m)
        G = np.zeros((m, m), dtype=complex)
        term = rhs.copy()
        level_norms: list[float] = []
        ok = False
        for _ in range(max_level + 1):
            G = G + term
            level_norms.append(spectral_norm(term))
            converged, terminated, _ = _certificate(
                level_norms, spectral_norm(G), tol
            )
            if converged:
                ok = True
                break
            if spectral_norm(G) > BLOWUP_FACTOR * max(1.0, spectral_norm(rhs)):
                break
            term = phi(term)
        if not ok:
            continue
        H = hermitian_part(G)
        verdict = psd_check(H, tol)
        eigmin = verdict.min_eigenvalue
        if eigmin <= effective_tol(tol, spectral_norm(H)):
            continue
        S = hermitian_factor(H, tol)
        S_inv = np.linalg.inv(S)
        C_t = pair.C @ S_inv
        A_t = tuple(S @ Aj @ S_inv for Aj in pair.A)
        defect = np.eye(m) - sum(Aj.conj().T @ Aj for Aj in A_t) - C_t.conj().T @ C_t
        contractive = psd_check(hermitian_part(defect), max(tol, 1e-8))
        return SteinSolutionReport(
            mode=mode,
            solution=H,
            residual=spectral_norm(H - phi(H) - rhs),
            nullspace_dim=None,
            strictly_positive=True,
            similarity=(C_t, A_t),
            similar_pair_contractive=contractive,
            deltas_tried=tried,
            converged=True,
        )
    return SteinSolutionReport(
        mode=mode,
        solution=None,
        residual=None,
        nullspace_dim=None,
        strictly_positive=False,
        similarity=None,
        similar_pair_contractive=None,
        deltas_tried=tried,
        converged=False,
        notes="series diverged for every delta tried",
    )


@dataclass
class StabilityReport:
    levels: list[float]  # ||Phi^N(H or I)||
    verdict: str  # stable | unstable | inconclusive
    delta: np.ndarray  # last iterate Phi^N(I or H), the limit estimate
    tuple_contractive: bool
    weighted: bool


def strong_stability(
    A: Sequence[np.ndarray],
    H=None,
    max_level: int = DEFAULT_MAX_LEVEL,
    tol: float = DEFAULT_TOL,
) -> StabilityReport:
    """Classify the decay of the level sums Phi^N(H or I).

    ``stable`` requires the certified geometric decay below tolerance;
    ``unstable`` means certified not strongly stable, through either blow-up
    or (for contractive tuples, where the iterates decrease) a stabilized
    nonzero limit.
    """
    phi = CPMap(tuple(A))
    m = phi.A[0].shape[0]
    X = np.eye(m, dtype=complex) if H is None else hermitian_part(as_matrix(H))
    contractive = psd_check(np.eye(m) - phi(np.eye(m)), max(tol, 1e-12)).is_psd
    levels = [spectral_norm(X)]
    prev = X
    verdict = "inconclusive"
    for N in range(1, max_level + 1):
        cur = phi(prev)
        levels.append(spectral_norm(cur))
        if levels[-1] <= effective_tol(tol, levels[0]):
            conv, exact, _ = _certificate(levels, levels[0], tol)
            if conv or exact or levels[-1] == 0.0:
                verdict = "stable"
                prev = cur
                break
        if levels[-1] > BLOWUP_FACTOR * max(1.0, levels[0]):
            verdict = "unstable"
            prev = cur
            break
        if contractive and N >= 2:
            step = spectral_norm(cur - prev)
            if step <= effective_tol(tol, levels[0]) and levels[-1] > effective_tol(
                tol, levels[0]
            ):
                # decreasing sequence has stabilized at a nonzero limit
                verdict = "unstable"
                prev = cur
                break
        prev = cur
    return StabilityReport(
        levels=levels,
        verdict=verdict,
        delta=hermitian_part(prev),
        tuple_contractive=contractive,
        weighted=H is not None,
    )


@dataclass
class ObservabilityReport:
    observable: bool
    exactly_observable: bool
    a_observable: bool
    exactly_a_observable: bool
    unobservable_basis: np.ndarray  # columns span Ker of the word gramian
    a_unobservable_basis: np.ndarray  # columns span Ker of the lattice gramian
    rank_by_level: list[int]
    a_rank_by_degree: list[int]
    stabilized_at: int
    a_stabilized_at: int
    kernel_inclusion_ok: bool  # word kernel inside lattice kernel


def observability_analysis(
    pair: OutputPair, tol: float = DEFAULT_TOL, max_degree: int = 2 * DEFAULT_MAX_LEVEL
) -> ObservabilityReport:
    """Kernels of both observability operators by span stabilization.

    Word side: grow the row span of {C A^v} level by level, compressing to an
    orthonormal row basis between levels; once a level adds no rank the span
    is A_j-invariant and final.  Lattice side: same growth over the rows
    C W(n) by total degree, with a two-degree stabilization check (the fiber
    recursion mixes degrees, so one quiet degree is not conclusive there).
    """
    m, d = pair.state_dim, pair.d
    # word side
    basis = row_space_basis(pair.C, tol)
    ranks = [basis.shape[0]]
    stabilized = 0
    for level in range(1, m + 1):
        grown = np.vstack([basis] + [basis @ Aj for Aj in pair.A])
        new_basis = row_space_basis(grown, tol)
        ranks.append(new_basis.shape[0])
        if new_basis.shape[0] == basis.shape[0]:
            stabilized = level
            basis = new_basis
            break
        basis = new_basis
    kernel = nullspace_basis(basis if basis.size else np.zeros((1, m)), tol)
    # lattice side
    a_basis = row_space_basis(pair.C, tol)
    a_ranks = [a_basis.shape[0]]
    a_stabilized = 0
    cur_rows = {tuple([0] * d): pair.C.copy()}
    quiet = 0
    for degree in range(1, max_degree + 1):
        nxt: dict[MultiIndex, np.ndarray] = {}
        for n in multi_indices(d, degree):
            acc = np.zeros_like(pair.C)
            for i in range(d):
                prev = tuple(np.subtract(n, unit_index(d, i + 1)))
                if min(prev) >= 0 and prev in cur_rows:
                    acc += cur_rows[prev] @ pair.A[i]
            nxt[n] = acc
        cur_rows = nxt
        stacked = np.vstack([a_basis] + list(cur_rows.values()))
        new_basis = row_space_basis(stacked, tol)
        a_ranks.append(new_basis.shape[0])
        if new_basis.shape[0] == a_basis.shape[0]:
            quiet += 1
        else:
            quiet = 0
        a_basis = new_basis
        if quiet >= 2 or a_basis.shape[0] == m:
            a_stabilized = degree
            break
    a_kernel = nullspace_basis(a_basis if a_basis.size else np.zeros((1, m)), tol)
    observable = kernel.shape[1] == 0
    a_observable = a_kernel.shape[1] == 0
    # word kernel must sit inside the lattice kernel
    incl = True
    if kernel.shape[1]:
        proj = a_kernel @ (a_kernel.conj().T @ kernel) if a_kernel.size else 0 * kernel
        incl = spectral_norm(kernel - proj) <= effective_tol(tol, 1.0)
    return ObservabilityReport(
        observable=observable,
        exactly_observable=observable,
        a_observable=a_observable,
        exactly_a_observable=a_observable,
        unobservable_basis=kernel,
        a_unobservable_basis=a_kernel,
        rank_by_level=ranks,
        a_rank_by_degree=a_ranks,
        stabilized_at=stabilized,
        a_stabilized_at=a_stabilized,
        kernel_inclusion_ok=incl,
    )


@dataclass
class QSteinReport:
    """Behavior of the projection Q onto the orthocomplement of the
    unobservable subspace inside the Stein inequality."""

    q: np.ndarray
    inequality: HermitianVerdict  # Q - sum A_j* Q A_j - C*C >= 0
    equality_residual: float
    equality_holds: bool
    gram_below_q: Optional[HermitianVerdict]  # Q - G >= 0 (when G converged)
    q_below_identity: HermitianVerdict
    off_block_norms: list[float]  # ||A_j2|| in the kernel decomposition
    restricted_isometry_residual: float
    restricted_pair_isometric: bool


def q_stein_analysis(pair: OutputPair, tol: float = DEFAULT_TOL) -> QSteinReport:
    m = pair.state_dim
    contr = psd_check(
        np.eye(m) - cp_apply(pair.A, np.eye(m)) - pair.C.conj().T @ pair.C,
        max(tol, 1e-8),
    )
    if not contr.is_psd:
        raise HypothesisError(
            f"pair is not contractive (defect eigmin {contr.min_eigenvalue:.3e})"
        )
    obs = observability_analysis(pair, tol)
    K = obs.unobservable_basis  # columns span Ker
    k = K.shape[1]
    Q = np.eye(m, dtype=complex) - (K @ K.conj().T if k else 0)
    phi = CPMap(pair.A)
    seed = pair.C.conj().T @ pair.C
    ineq_matrix = hermitian_part(Q - phi(Q) - seed)
    ineq = psd_check(ineq_matrix, tol)
    eq_residual = spectral_norm(ineq_matrix)
    eq_holds = eq_residual <= effective_tol(max(tol, 1e-8), 1.0)
    gram = nc_gramian(pair, tol=tol)
    gram_below = None
    if gram.converged:
        gram_below = psd_check(hermitian_part(Q - gram.value), max(tol, 1e-8))
    q_below = psd_check(np.eye(m) - Q, tol)
    # block data relative to Ker + Ker-perp
    P = np.hstack([K, nullspace_basis(K.conj().T, tol)]) if k else np.eye(m, dtype=complex)
    off_norms: list[float] = []
    C0 = pair.C @ P[:, k:]
    A0 = []
    for Aj in pair.A:
        Ablk = P.conj().T @ Aj @ P
        off_norms.append(spectral_norm(Ablk[:k, k:]) if k else 0.0)
        A0.append(Ablk[k:, k:])
    iso = np.eye(m - k, dtype=complex) - sum(a.conj().T @ a for a in A0) - C0.conj().T @ C0
    iso_res = spectral_norm(iso)
    return QSteinReport(
        q=Q,
        inequality=ineq,
        equality_residual=eq_residual,
        equality_holds=eq_holds,
        gram_below_q=gram_below,
        q_below_identity=q_below,
        off_block_norms=off_norms,
        restricted_isometry_residual=iso_res,
        restricted_pair_isometric=iso_res <= effective_tol(max(tol, 1e-8), 1.0),
    )


def fixed_point_iterates(
    pair: OutputPair, steps: int
) -> list[np.ndarray]:
    """H_0 = 0, H_{k+1} = C*C + Phi(H_k); monotone nondecreasing toward the
    minimal solution."""
    phi = CPMap(pair.A)
    seed = pair.C.conj().T @ pair.C
    H = np.zeros_like(seed)
    out = [H]
    for _ in range(steps):
        H = seed + phi(H)
        out.append(H)
    return out


def c_abelian_defect(pair: OutputPair, max_total: int = 6) -> float:
    """max over fibers of ||C A^v - C A^u|| for words of equal letter counts."""
    from .systems import tuple_power_word
    from .words import fiber

    worst = 0.0
    for n in multi_indices_up_to(pair.d, max_total):
        first = None
        for v in fiber(n):
            r = pair.C @ tuple_power_word(pair.A, v)
            if first is None:
                first = r
            else:
                worst = max(worst, float(np.abs(r - first).max()))
    return worst
