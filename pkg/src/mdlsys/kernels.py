"""Positive kernels of output pairs, uniqueness and containment matchings.

The word kernel has coefficient C A^alpha H (A^beta)* C*; the ball kernel is
the resolvent sandwich C (I - Z(lam)A)^{-1} H (I - A* Z(zeta)*)^{-1} C*.
Matching coefficient data across two observable pairs recovers the unitary
(or isometric) intertwiner when one exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .linalg import (
    HermitianVerdict,
    as_matrix,
    as_vector,
    hermitian_part,
    psd_check,
    spectral_norm,
)
from .stein import ab_gramian, nc_gramian, observability_analysis, strong_stability
from .systems import OutputPair, is_commutative, resolvent_row, tuple_power_word
from .util import DEFAULT_TOL, DimensionError, HypothesisError, effective_tol
from .words import MultiIndex, Word, multi_indices_up_to, words_up_to


@dataclass
class KernelHandle:
    """A kernel described by its pair, Hermitian weight, and flavor."""

    pair: OutputPair
    H: Optional[np.ndarray] = None
    flavor: str = "noncommutative"  # | commutative | commutative-inverse-gramian

    def __post_init__(self):
        m = self.pair.state_dim
        if self.H is None:
            self.H = np.eye(m, dtype=complex)
        self.H = as_matrix(self.H)
        if self.H.shape != (m, m):
            raise DimensionError("weight must act on the state space")
        if self.flavor not in (
            "noncommutative",
            "commutative",
            "commutative-inverse-gramian",
        ):
            raise ValueError(f"unknown flavor {self.flavor!r}")

    def weight(self, tol: float = DEFAULT_TOL) -> np.ndarray:
        if self.flavor != "commutative-inverse-gramian":
            return self.H
        gram = ab_gramian(self.pair, tol=tol)
        if not (gram.converged or gram.terminated_exactly):
            raise HypothesisError("lattice gramian did not converge")
        verdict = psd_check(gram.value, tol)
        if verdict.min_eigenvalue <= 1e-8:
            raise HypothesisError(
                "inverse-gramian kernel refused: gramian not boundedly invertible "
                f"(min eigenvalue {verdict.min_eigenvalue:.3e})"
            )
        return np.linalg.inv(gram.value)


def nc_kernel_coeff(kh: KernelHandle, alpha: Word, beta: Word) -> np.ndarray:
    """Coefficient of the word kernel at (alpha, transpose(beta))."""
    if kh.flavor != "noncommutative":
        raise ValueError("word coefficients require the noncommutative flavor")
    pair = kh.pair
    Aa = tuple_power_word(pair.A, alpha)
    Ab = tuple_power_word(pair.A, beta)
    return pair.C @ Aa @ kh.H @ Ab.conj().T @ pair.C.conj().T


def ab_kernel_eval(
    kh: KernelHandle, lam: Sequence[complex], zeta: Sequence[complex], tol: float = DEFAULT_TOL
) -> np.ndarray:
    """Resolvent sandwich at a pair of ball points."""
    if kh.flavor == "noncommutative":
        raise ValueError("point evaluation requires a commutative flavor")
    H = kh.weight(tol)
    R1 = resolvent_row(kh.pair, lam)
    R2 = resolvent_row(kh.pair, zeta)
    return R1 @ H @ R2.conj().T


def arveson_kernel(lam: Sequence[complex], zeta: Sequence[complex]) -> complex:
    """1 / (1 - <lam, zeta>) on the ball."""
    lam = np.asarray(lam, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    inner = complex(np.sum(lam * zeta.conj()))
    if abs(inner) >= 1:
        raise ValueError(f"<lam, zeta> = {inner} is outside the kernel domain")
    return 1.0 / (1.0 - inner)


def kernel_gram(
    kh: KernelHandle, points: Sequence[Sequence[complex]], tol: float = DEFAULT_TOL
) -> HermitianVerdict:
    """PSD verdict of the block Gram matrix [K(lam_i, lam_j)]."""
    pts = [np.asarray(p, dtype=complex).reshape(-1) for p in points]
    p = kh.pair.output_dim
    G = np.zeros((p * len(pts), p * len(pts)), dtype=complex)
    for i, li in enumerate(pts):
        for j, lj in enumerate(pts):
            G[i * p : (i + 1) * p, j * p : (j + 1) * p] = ab_kernel_eval(kh, li, lj, tol)
    return psd_check(hermitian_part(G), max(tol, 1e-8))


# ---------------------------------------------------------------------------
# uniqueness and containment


@dataclass
class MatchReport:
    found: bool
    operator: Optional[np.ndarray]
    output_residual: float
    intertwine_residual: float
    isometry_residual: float
    hypotheses: dict[str, bool] = field(default_factory=dict)


def _coefficient_span(pair: OutputPair, mode: str, max_order: int) -> list[np.ndarray]:
    """Spanning vectors (A^beta)* C* e_y over words or multi-indices."""
    cols: list[np.ndarray] = []
    Cs = pair.C.conj().T  # m x p
    if mode == "nc":
        for beta in words_up_to(pair.d, max_order):
            blk = tuple_power_word(pair.A, beta).conj().T @ Cs
            cols.extend(blk[:, k] for k in range(blk.shape[1]))
    else:
        from .systems import tuple_power_multi

        for n in multi_indices_up_to(pair.d, max_order):
            blk = tuple_power_multi(pair.A, n).conj().T @ Cs
            cols.extend(blk[:, k] for k in range(blk.shape[1]))
    return cols


def unitary_equivalence(
    pair_a: OutputPair,
    pair_b: OutputPair,
    mode: str = "nc",
    tol: float = 1e-8,
) -> MatchReport:
    """Recover U with C_a = C_b U and U A_j = B_j U from coefficient matching.

    Built on the correspondence (A^beta)* C* y -> (B^beta)* C~* y over a
    spanning family; observability of both pairs makes the families span the
    state spaces.  Returns the least-squares representative and the verified
    residuals; ``found`` is False when any residual exceeds tolerance.
    """
    if mode not in ("nc", "commutative"):
        raise ValueError(f"unknown mode {mode!r}")
    hyp = {}
    obs_a = observability_analysis(pair_a)
    obs_b = observability_analysis(pair_b)
    hyp["pair_a_observable"] = obs_a.observable
    hyp["pair_b_observable"] = obs_b.observable
    if not (obs_a.observable and obs_b.observable):
        raise HypothesisError("both pairs must be observable")
    if pair_a.output_dim != pair_b.output_dim:
        raise HypothesisError("output dimensions differ")
    if mode == "commutative":
        hyp["pair_a_commutative"] = is_commutative(pair_a.A)
        hyp["pair_b_commutative"] = is_commutative(pair_b.A)
        if not (hyp["pair_a_commutative"] and hyp["pair_b_commutative"]):
            raise HypothesisError("commutative mode requires commuting tuples")
    order = max(pair_a.state_dim, pair_b.state_dim)
    X = np.array(_coefficient_span(pair_a, mode, order)).T
    Y = np.array(_coefficient_span(pair_b, mode, order)).T
    # U maps each spanning column of X to its counterpart in Y: U X = Y
    U = np.linalg.lstsq(X.T, Y.T, rcond=None)[0].T
    scale = max(1.0, spectral_norm(pair_a.C), spectral_norm(pair_b.C))
    out_res = spectral_norm(pair_a.C - pair_b.C @ U) / scale
    int_res = max(
        spectral_norm(U @ Aj - Bj @ U) for Aj, Bj in zip(pair_a.A, pair_b.A)
    )
    iso_res = spectral_norm(U.conj().T @ U - np.eye(pair_a.state_dim))
    found = max(out_res, int_res, iso_res) <= tol
    return MatchReport(
        found=found,
        operator=U if found else None,
        output_residual=out_res,
        intertwine_residual=int_res,
        isometry_residual=iso_res,
        hypotheses=hyp,
    )


def containment_isometry(
    pair_a: OutputPair, pair_b: OutputPair, tol: float = 1e-8
) -> MatchReport:
    """Recover the isometry V with C_a = C_b V and V A_j = B_j V.

    Both pairs must be isometric with commuting strongly stable tuples; the
    verdicts are attached.  V is built by matching the coefficient families
    through the adjoint correspondence and least-squares extension.
    """
    hyp = {}
    for name, pr in (("a", pair_a), ("b", pair_b)):
        m = pr.state_dim
        iso = np.eye(m) - sum(Aj.conj().T @ Aj for Aj in pr.A) - pr.C.conj().T @ pr.C
        hyp[f"pair_{name}_isometric"] = spectral_norm(iso) <= 1e-8
        hyp[f"pair_{name}_commutative"] = is_commutative(pr.A)
        hyp[f"pair_{name}_strongly_stable"] = (
            strong_stability(pr.A).verdict == "stable"
        )
    if not all(hyp.values()):
        raise HypothesisError(f"containment hypotheses failed: {hyp}")
    order = max(pair_a.state_dim, pair_b.state_dim)
    X = np.array(_coefficient_span(pair_b, "commutative", order)).T  # in big space
    Y = np.array(_coefficient_span(pair_a, "commutative", order)).T
    # W = V*: (B^n)* C_b* y -> (A^n)* C_a* y, then V = W*
    W = np.linalg.lstsq(X.T, Y.T, rcond=None)[0].T
    V = W.conj().T
    scale = max(1.0, spectral_norm(pair_a.C), spectral_norm(pair_b.C))
    out_res = spectral_norm(pair_a.C - pair_b.C @ V) / scale
    int_res = max(
        spectral_norm(V @ Aj - Bj @ V) for Aj, Bj in zip(pair_a.A, pair_b.A)
    )
    iso_res = spectral_norm(V.conj().T @ V - np.eye(pair_a.state_dim))
    found = max(out_res, int_res, iso_res) <= tol
    return MatchReport(
        found=found,
        operator=V if found else None,
        output_residual=out_res,
        intertwine_residual=int_res,
        isometry_residual=iso_res,
        hypotheses=hyp,
    )


def lifted_inner_product(
    pair: OutputPair, H, x, y, flavor: str = "nc", tol: float = DEFAULT_TOL
) -> complex:
    """<H Q x, Q y> with Q the projection onto the orthocomplement of the
    relevant unobservable subspace (word or lattice kernel)."""
    x, y = as_vector(x), as_vector(y)
    H = as_matrix(H) if H is not None else np.eye(pair.state_dim, dtype=complex)
    obs = observability_analysis(pair, tol)
    K = obs.unobservable_basis if flavor == "nc" else obs.a_unobservable_basis
    m = pair.state_dim
    Q = np.eye(m, dtype=complex) - (K @ K.conj().T if K.shape[1] else 0)
    Qx, Qy = Q @ x, Q @ y
    return complex(np.vdot(Qy, H @ Qx))
