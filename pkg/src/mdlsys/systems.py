"""Output pairs, Fornasini-Marchesini realizations, and their trajectories.

Two evolutions share one system matrix: the noncommutative recursion along
free-semigroup words, x(jv) = A_j x(v) + B_j u(v), and the commutative
lattice recursion x(n) = sum_j A_j x(n - e_j) + B_j u(n - e_j).  The
fiber-summing projection links them: projecting a word trajectory gives a
lattice trajectory of the same system.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .linalg import as_matrix, as_vector, spectral_norm, tensor_poly_interpolate
from .util import (
    CommutativityError,
    DEFAULT_TOL,
    DimensionError,
    SingularResolventError,
    effective_tol,
)
from .words import (
    MultiIndex,
    Word,
    abelianize,
    multi_indices_up_to,
    unit_index,
    words_up_to,
)


@dataclass
class OutputPair:
    """An output map C together with a state-update tuple A = (A_1..A_d)."""

    C: np.ndarray
    A: tuple[np.ndarray, ...]

    def __post_init__(self):
        self.C = as_matrix(self.C)
        self.A = tuple(as_matrix(Aj) for Aj in self.A)
        if not self.A:
            raise DimensionError("need at least one state matrix")
        m = self.A[0].shape[0]
        for Aj in self.A:
            if Aj.shape != (m, m):
                raise DimensionError("all A_j must be square of equal size")
        if self.C.shape[1] != m:
            raise DimensionError(
                f"C has {self.C.shape[1]} columns, state dimension is {m}"
            )

    @property
    def d(self) -> int:
        return len(self.A)

    @property
    def state_dim(self) -> int:
        return self.A[0].shape[0]

    @property
    def output_dim(self) -> int:
        return self.C.shape[0]

    def adjoint_tuple(self) -> tuple[np.ndarray, ...]:
        return tuple(Aj.conj().T for Aj in self.A)


@dataclass
class SystemRealization:
    """Full (A, B, C, D) block data; B and D default to zero blocks."""

    pair: OutputPair
    B: Optional[tuple[np.ndarray, ...]] = None
    D: Optional[np.ndarray] = None
    input_dim: Optional[int] = None

    def __post_init__(self):
        m = self.pair.state_dim
        p = self.pair.output_dim
        if self.B is not None:
            self.B = tuple(as_matrix(Bj) for Bj in self.B)
            if len(self.B) != self.pair.d:
                raise DimensionError("need one B_j per letter")
            q = self.B[0].shape[1]
            for Bj in self.B:
                if Bj.shape != (m, q):
                    raise DimensionError("all B_j must be m x q")
        else:
            q = self.input_dim if self.input_dim is not None else 1
            self.B = tuple(np.zeros((m, q), dtype=complex) for _ in range(self.pair.d))
        q = self.B[0].shape[1]
        if self.D is not None:
            self.D = as_matrix(self.D)
            if self.D.shape != (p, q):
                raise DimensionError(f"D must be {p} x {q}, got {self.D.shape}")
        else:
            self.D = np.zeros((p, q), dtype=complex)
        self.input_dim = q

    @property
    def d(self) -> int:
        return self.pair.d


def tuple_power_word(A: Sequence[np.ndarray], v: Word) -> np.ndarray:
    """A^v, the product of the A_k in the written order of the word."""
    m = as_matrix(A[0]).shape[0]
    out = np.eye(m, dtype=complex)
    for k in v:
        out = out @ A[k - 1]
    return out


def commutativity_defect(A: Sequence[np.ndarray]) -> float:
    """max over pairs of ||A_i A_j - A_j A_i||."""
    worst = 0.0
    for i in range(len(A)):
        for j in range(i + 1, len(A)):
            worst = max(worst, spectral_norm(A[i] @ A[j] - A[j] @ A[i]))
    return worst


def is_commutative(A: Sequence[np.ndarray], tol: float = DEFAULT_TOL) -> bool:
    scale = max((spectral_norm(Aj) for Aj in A), default=0.0)
    return commutativity_defect(A) <= tol * max(1.0, scale**2)


def tuple_power_multi(
    A: Sequence[np.ndarray], n: MultiIndex, tol: float = DEFAULT_TOL
) -> np.ndarray:
    """A_1^{n_1} ... A_d^{n_d}; requires a commuting tuple."""
    if not is_commutative(A, tol):
        raise CommutativityError(
            f"tuple is not commutative (defect {commutativity_defect(A):.3e})"
        )
    m = as_matrix(A[0]).shape[0]
    out = np.eye(m, dtype=complex)
    for j, power in enumerate(n):
        out = out @ np.linalg.matrix_power(np.asarray(A[j], dtype=complex), power)
    return out


@dataclass
class NCTrajectory:
    depth: int
    x: dict[Word, np.ndarray]
    y: dict[Word, np.ndarray]
    u: dict[Word, np.ndarray]


@dataclass
class LatticeTrajectory:
    depth: int
    x: dict[MultiIndex, np.ndarray]
    y: dict[MultiIndex, np.ndarray]
    u: dict[MultiIndex, np.ndarray]


def _input_at(u: Mapping, key, q: int) -> np.ndarray:
    val = u.get(key)
    if val is None:
        return np.zeros(q, dtype=complex)
    return as_vector(val)


def nc_simulate(
    sys: SystemRealization,
    x0,
    u: Optional[Mapping[Word, Sequence[complex]]] = None,
    depth: int = 4,
) -> NCTrajectory:
    """Run the word recursion from x(empty) = x0 down to the given depth."""
    u = u or {}
    m, q = sys.pair.state_dim, sys.input_dim
    x0 = as_vector(x0)
    if x0.size != m:
        raise DimensionError(f"x0 has size {x0.size}, state dimension is {m}")
    A, B, C, D = sys.pair.A, sys.B, sys.pair.C, sys.D
    xs: dict[Word, np.ndarray] = {(): x0}
    us: dict[Word, np.ndarray] = {}
    ys: dict[Word, np.ndarray] = {}
    for v in words_up_to(sys.d, depth):
        if v not in xs:
            # v = j w with w already computed (level order guarantees it)
            j, w = v[0], v[1:]
            xs[v] = A[j - 1] @ xs[w] + B[j - 1] @ _input_at(u, w, q)
        us[v] = _input_at(u, v, q)
        ys[v] = C @ xs[v] + D @ us[v]
    return NCTrajectory(depth=depth, x=xs, y=ys, u=us)


def lattice_simulate(
    sys: SystemRealization,
    x0,
    u: Optional[Mapping[MultiIndex, Sequence[complex]]] = None,
    depth: int = 4,
) -> LatticeTrajectory:
    """Run the lattice recursion with zero boundary outside the orthant.

    The state at the origin is pinned to x0; every other x(n) is determined
    by the recursion.
    """
    u = u or {}
    m, q, d = sys.pair.state_dim, sys.input_dim, sys.d
    x0 = as_vector(x0)
    if x0.size != m:
        raise DimensionError(f"x0 has size {x0.size}, state dimension is {m}")
    A, B, C, D = sys.pair.A, sys.B, sys.pair.C, sys.D
    xs: dict[MultiIndex, np.ndarray] = {}
    us: dict[MultiIndex, np.ndarray] = {}
    ys: dict[MultiIndex, np.ndarray] = {}
    for n in multi_indices_up_to(d, depth):
        if sum(n) == 0:
            xs[n] = x0
        else:
            acc = np.zeros(m, dtype=complex)
            for j in range(1, d + 1):
                prev = tuple(np.subtract(n, unit_index(d, j)))
                if min(prev) < 0:
                    continue  # zero boundary
                acc += A[j - 1] @ xs[prev] + B[j - 1] @ _input_at(u, prev, q)
            xs[n] = acc
        us[n] = _input_at(u, n, q)
        ys[n] = C @ xs[n] + D @ us[n]
    return LatticeTrajectory(depth=depth, x=xs, y=ys, u=us)


def project_input(u: Mapping[Word, Sequence[complex]], d: int) -> dict[MultiIndex, np.ndarray]:
    """Sum an input map over abelianization fibers."""
    out: dict[MultiIndex, np.ndarray] = {}
    for v, val in u.items():
        n = abelianize(tuple(v), d)
        vec = as_vector(val)
        out[n] = out.get(n, 0) + vec
    return out


def project_trajectory(traj: NCTrajectory, d: int) -> LatticeTrajectory:
    """Fiber-sum every signal of a word trajectory into a lattice trajectory."""

    def proj(signal: dict[Word, np.ndarray]) -> dict[MultiIndex, np.ndarray]:
        out: dict[MultiIndex, np.ndarray] = {}
        for v, val in signal.items():
            n = abelianize(v, d)
            out[n] = out.get(n, 0) + val
        return out

    return LatticeTrajectory(
        depth=traj.depth, x=proj(traj.x), y=proj(traj.y), u=proj(traj.u)
    )


def nc_transfer_coeff(sys: SystemRealization, v: Word) -> np.ndarray:
    """Word coefficient of the transfer series: D at the unit, else C A^w B_j
    for v = w j."""
    if len(v) == 0:
        return sys.D.copy()
    w, j = v[:-1], v[-1]
    return sys.pair.C @ tuple_power_word(sys.pair.A, w) @ sys.B[j - 1]


def pencil(A: Sequence[np.ndarray], lam: Sequence[complex]) -> np.ndarray:
    """I - sum_j lam_j A_j."""
    A0 = as_matrix(A[0])
    m = A0.shape[0]
    M = np.eye(m, dtype=complex)
    for lj, Aj in zip(lam, A):
        M = M - lj * np.asarray(Aj, dtype=complex)
    return M


def resolvent_row(pair: OutputPair, lam: Sequence[complex]) -> np.ndarray:
    """C (I - sum_j lam_j A_j)^{-1}."""
    M = pencil(pair.A, lam)
    try:
        return np.linalg.solve(M.T, pair.C.T).T
    except np.linalg.LinAlgError as exc:
        raise SingularResolventError(f"singular pencil at {lam}") from exc


def comm_transfer_eval(sys: SystemRealization, lam: Sequence[complex]) -> np.ndarray:
    """D + C (I - Z(lam) A)^{-1} Z(lam) B at a point of the ball."""
    lam = np.asarray(lam, dtype=complex).reshape(-1)
    if lam.size != sys.d:
        raise DimensionError(f"point has {lam.size} coordinates, need {sys.d}")
    ZB = sum(lj * Bj for lj, Bj in zip(lam, sys.B))
    row = resolvent_row(sys.pair, lam)
    return sys.D + row @ ZB


def det_pencil_coeffs(A: Sequence[np.ndarray]) -> np.ndarray:
    """Polynomial coefficients of det(I - sum_j lam_j A_j) by interpolation.

    Output index [i1, ..., id] is the coefficient of lam_1^i1 ... lam_d^id;
    the degree in each variable is at most the state dimension.
    """
    A = [as_matrix(Aj) for Aj in A]
    m = A[0].shape[0]

    def f(lam: np.ndarray) -> complex:
        return complex(np.linalg.det(pencil(A, lam)))

    return tensor_poly_interpolate(f, len(A), m)
