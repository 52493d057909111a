"""Elementary operators on truncated spin and oscillator Hilbert spaces.

Conventions used throughout the package:

* Fock states are indexed from 0; an oscillator space with cutoff ``n_max``
  has dimension ``n_max``.
* The two-level (spin) basis is (|e>, |g>) = (index 0, index 1), so
  sigma_z = diag(1, -1), sigma_+ = |e><g|, sigma_- = |g><e|.
* Composite operators put the spin factor on the outer (slow) index:
  block (i, j) of ``spin_tensor_osc(s, m)`` equals ``s[i, j] * m``, so a
  2x2 block matrix written over the spin states is literally the block
  structure of the assembled array.
* Operators are plain complex ``numpy.ndarray`` matrices.

Two independent constructions of the displacement operator are provided:
the generator exponential (exactly unitary on the truncated space) and the
closed-form Fock matrix elements in terms of associated Laguerre
polynomials (exact infinite-dimensional elements, not unitary at the
truncation edge). They serve as mutual oracles.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import eval_genlaguerre, gammaln


class Spin(Enum):
    """Names for the elementary two-level operators."""

    Z = "z"
    PLUS = "+"
    MINUS = "-"
    X = "x"
    Y = "y"
    IDENTITY = "1"


@dataclass(frozen=True)
class TruncationSpec:
    """Oscillator Fock cutoff plus an interior guard band.

    ``guard`` is the number of top Fock levels excluded from interior
    comparisons, so truncation artifacts at the edge do not pollute
    operator-identity checks.
    """

    n_max: int
    guard: int = 0

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValueError(f"n_max >= 1 violated (got {self.n_max})")
        if not 0 <= self.guard < self.n_max:
            raise ValueError(
                f"0 <= guard < n_max violated (got guard={self.guard}, n_max={self.n_max})"
            )

    @property
    def interior_dim(self) -> int:
        return self.n_max - self.guard


#: Default truncation for verification tasks.
DEFAULT_TRUNC = TruncationSpec(n_max=64, guard=16)


def _require_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    return a


def annihilation(trunc: TruncationSpec) -> np.ndarray:
    """Ladder operator a on the truncated Fock space: a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1, trunc.n_max, dtype=float)), 1).astype(complex)


def creation(trunc: TruncationSpec) -> np.ndarray:
    """Ladder operator a^dagger on the truncated Fock space."""
    return annihilation(trunc).conj().T


def number_op(trunc: TruncationSpec) -> np.ndarray:
    """Number operator diag(0, 1, ..., n_max-1).

    Equals dagger(a) @ a at every entry including the truncation edge
    (the edge defect of the truncated algebra sits in a @ dagger(a)).
    """
    return np.diag(np.arange(trunc.n_max, dtype=float)).astype(complex)


def osc_identity(trunc: TruncationSpec) -> np.ndarray:
    return np.eye(trunc.n_max, dtype=complex)


_SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
_SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
_SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
_SIGMA_X = _SIGMA_PLUS + _SIGMA_MINUS
_SIGMA_Y_STANDARD = 1j * (_SIGMA_MINUS - _SIGMA_PLUS)
_SIGMA_Y_ALT = 1j * _SIGMA_MINUS - _SIGMA_PLUS
_SPIN_IDENTITY = np.eye(2, dtype=complex)


def pauli(s: Spin) -> np.ndarray:
    """Two-level operator in the (|e>, |g>) basis.

    ``Spin.Y`` returns the ``i*sigma_- - sigma_+`` variant that appears in
    some trapped-ion derivations; note it is NOT Hermitian and differs from
    the conventional Pauli-Y (``sigma_y("standard")``).
    """
    table = {
        Spin.Z: _SIGMA_Z,
        Spin.PLUS: _SIGMA_PLUS,
        Spin.MINUS: _SIGMA_MINUS,
        Spin.X: _SIGMA_X,
        Spin.Y: _SIGMA_Y_ALT,
        Spin.IDENTITY: _SPIN_IDENTITY,
    }
    return table[s].copy()


def sigma_y(convention: str = "standard") -> np.ndarray:
    """Pauli-Y under the chosen convention.

    "standard": i*(sigma_- - sigma_+), the Hermitian Pauli matrix.
    "alt":      i*sigma_- - sigma_+, the non-Hermitian variant; kept so the
                rotation diagnostics can arbitrate between the two.
    """
    if convention == "standard":
        return _SIGMA_Y_STANDARD.copy()
    if convention == "alt":
        return _SIGMA_Y_ALT.copy()
    raise ValueError(f"unknown sigma_y convention: {convention!r}")


def dagger(a: np.ndarray) -> np.ndarray:
    """Hermitian adjoint."""
    return np.asarray(a).conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = _require_square(a, "a")
    b = _require_square(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    a = _require_square(a)
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def is_unitary(a: np.ndarray, tol: float = 1e-10) -> bool:
    a = _require_square(a)
    return bool(np.max(np.abs(a @ a.conj().T - np.eye(a.shape[0]))) <= tol)


def unitary_expm(generator: np.ndarray) -> np.ndarray:
    """exp(G) for an anti-Hermitian generator G.

    Computed through the eigendecomposition of the Hermitian matrix i*G, so
    the result is unitary to machine precision on the truncated space (a
    property downstream transformation identities rely on).
    """
    g = _require_square(generator, "generator")
    herm = 1j * g
    if np.max(np.abs(herm - herm.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(herm))):
        raise ValueError("generator must be anti-Hermitian")
    w, v = np.linalg.eigh(herm)
    return (v * np.exp(-1j * w)) @ v.conj().T


def displacement_generator(alpha: complex, trunc: TruncationSpec) -> np.ndarray:
    """Displacement operator exp(alpha*a^dagger - conj(alpha)*a).

    Exactly unitary on the truncated space by construction.
    """
    a = annihilation(trunc)
    return unitary_expm(alpha * a.conj().T - np.conj(alpha) * a)


def displacement_laguerre(alpha: complex, trunc: TruncationSpec) -> np.ndarray:
    """Displacement operator from its closed-form Fock matrix elements.

    <m|D(alpha)|n> = sqrt(n!/m!) alpha^(m-n) e^(-|alpha|^2/2) L_n^(m-n)(|alpha|^2)
    for m >= n, and the adjoint-symmetric expression below the diagonal.
    These are the exact infinite-dimensional matrix elements, truncated, so
    the result is NOT unitary at the truncation edge; it serves as an
    independent cross-check of :func:`displacement_generator`.
    """
    n_max = trunc.n_max
    aa = abs(alpha) ** 2
    out = np.zeros((n_max, n_max), dtype=complex)
    m_idx = np.arange(n_max)
    for n in range(n_max):
        # upper-left to diagonal: rows m >= n
        rows = m_idx[n:]
        pref = np.exp(0.5 * (gammaln(n + 1) - gammaln(rows + 1)) - aa / 2.0)
        out[rows, n] = pref * alpha ** (rows - n) * eval_genlaguerre(n, rows - n, aa)
        rows = m_idx[:n]
        pref = np.exp(0.5 * (gammaln(rows + 1) - gammaln(n + 1)) - aa / 2.0)
        out[rows, n] = pref * (-np.conj(alpha)) ** (n - rows) * eval_genlaguerre(rows, n - rows, aa)
    return out


def spin_tensor_osc(s: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Embed a 2x2 spin operator and an oscillator operator in the composite space.

    Spin is the outer (slow) index: the result has dimension 2*dim(m) and
    block (i, j) equals s[i, j] * m.
    """
    s = _require_square(s, "spin operator")
    m = _require_square(m, "oscillator operator")
    if s.shape != (2, 2):
        raise ValueError(f"spin operator must be 2x2, got {s.shape}")
    return np.kron(s, m)


def interior_block(a: np.ndarray, trunc: TruncationSpec) -> np.ndarray:
    """Strip guarded top Fock levels from an oscillator or composite matrix.

    Rows/columns with Fock index >= n_max - guard are removed; for a
    composite (2*n_max) matrix the guard strips the top of each spin block.
    """
    a = _require_square(a)
    k = trunc.interior_dim
    if a.shape[0] == trunc.n_max:
        return a[:k, :k].copy()
    if a.shape[0] == 2 * trunc.n_max:
        idx = np.r_[0:k, trunc.n_max:trunc.n_max + k]
        return a[np.ix_(idx, idx)].copy()
    raise ValueError(
        f"matrix dimension {a.shape[0]} matches neither n_max={trunc.n_max} "
        f"nor 2*n_max={2 * trunc.n_max}"
    )
