"""Random families of output pairs used by the experiment scripts and tests.

All generators take an explicit numpy Generator so runs are reproducible
from a recorded seed.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .linalg import spectral_norm
from .systems import OutputPair, SystemRealization
from .stein import observability_analysis


def _complex(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_tuple(
    rng: np.random.Generator, d: int, m: int, column_norm: float
) -> tuple[np.ndarray, ...]:
    """A tuple scaled so ||sum_j A_j* A_j|| equals the requested value."""
    A = [_complex(rng, m, m) for _ in range(d)]
    gram = sum(Aj.conj().T @ Aj for Aj in A)
    scale = np.sqrt(column_norm / spectral_norm(gram))
    return tuple(scale * Aj for Aj in A)


def random_commuting_tuple(
    rng: np.random.Generator, d: int, m: int, column_norm: float
) -> tuple[np.ndarray, ...]:
    """Commuting tuple built from polynomials in one random matrix."""
    B = _complex(rng, m, m)
    B /= spectral_norm(B)
    A = []
    for _ in range(d):
        c = _complex(rng, 3)
        A.append(c[0] * np.eye(m) + c[1] * B + c[2] * B @ B)
    gram = sum(Aj.conj().T @ Aj for Aj in A)
    scale = np.sqrt(column_norm / spectral_norm(gram))
    return tuple(scale * Aj for Aj in A)


def random_contractive_pair(
    rng: np.random.Generator,
    d: int,
    m: int,
    p: Optional[int] = None,
    column_norm: float = 0.6,
    commuting: bool = False,
) -> OutputPair:
    """A pair with sum_j A_j* A_j + C*C <= I and strongly stable tuple."""
    p = p or rng.integers(1, m + 1)
    A = (
        random_commuting_tuple(rng, d, m, column_norm)
        if commuting
        else random_tuple(rng, d, m, column_norm)
    )
    defect = np.eye(m) - sum(Aj.conj().T @ Aj for Aj in A)
    vals, vecs = np.linalg.eigh((defect + defect.conj().T) / 2)
    root = (vecs * np.sqrt(np.clip(vals, 0, None))) @ vecs.conj().T
    W = _complex(rng, p, m)
    W /= max(1.0, spectral_norm(W))
    return OutputPair(C=W @ root, A=A)


def random_isometric_pair(
    rng: np.random.Generator, d: int, m: int, column_norm: float = 0.6,
    commuting: bool = False,
) -> OutputPair:
    """C*C = I - sum_j A_j* A_j exactly, with a strongly stable tuple."""
    A = (
        random_commuting_tuple(rng, d, m, column_norm)
        if commuting
        else random_tuple(rng, d, m, column_norm)
    )
    defect = np.eye(m) - sum(Aj.conj().T @ Aj for Aj in A)
    vals, vecs = np.linalg.eigh((defect + defect.conj().T) / 2)
    C = (np.sqrt(np.clip(vals, 0, None))[:, None] * vecs.conj().T)
    return OutputPair(C=C, A=A)


def random_observable_pair(
    rng: np.random.Generator,
    d: int,
    m: int,
    p: int = 1,
    column_norm: float = 0.6,
    commuting: bool = False,
    attempts: int = 20,
) -> OutputPair:
    for _ in range(attempts):
        pair = random_contractive_pair(
            rng, d, m, p=p, column_norm=column_norm, commuting=commuting
        )
        if observability_analysis(pair).observable:
            return pair
    raise RuntimeError("failed to draw an observable pair")


def random_strict_row_contraction(
    rng: np.random.Generator, d: int, m: int, row_norm: float = 0.5
) -> tuple[np.ndarray, ...]:
    """Tuple scaled so ||sum_j T_j T_j*|| equals the requested value (< 1)."""
    T = [_complex(rng, m, m) for _ in range(d)]
    gram = sum(Tj @ Tj.conj().T for Tj in T)
    scale = np.sqrt(row_norm / spectral_norm(gram))
    return tuple(scale * Tj for Tj in T)


def random_unitary(rng: np.random.Generator, m: int) -> np.ndarray:
    Q, R = np.linalg.qr(_complex(rng, m, m))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_realization(
    rng: np.random.Generator, d: int, m: int, p: int, q: int, column_norm: float = 0.6
) -> SystemRealization:
    pair = random_contractive_pair(rng, d, m, p=p, column_norm=column_norm)
    B = tuple(0.5 * _complex(rng, m, q) for _ in range(d))
    D = 0.5 * _complex(rng, p, q)
    return SystemRealization(pair=pair, B=B, D=D)
