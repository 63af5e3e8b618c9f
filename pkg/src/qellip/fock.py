"""Exact two-mode Fock-space simulation on a square truncation.

States live on the grid |m>_p (x) |n>_s with 0 <= m, n <= M.  The
operators of interest are the diagonal pair

    N = N_p + N_s,        L = (N_p - N_s) / 2,

the modulus P = sqrt(N_p / (N_s + 1)) (also diagonal), and the unitary
relative-phase shift E, which acts inside each fixed-N layer as

    E |m, n> = |m-1, n+1>   (m >= 1),      E |0, N> = |N, 0>.

The wrap-around (vacuum) term closes each layer into a cyclic shift and
is always included; layers with N <= M are complete and E restricted to
them is exactly unitary, while clipped layers (N > M) only matter through
the recorded tail mass.

Construction is tail-checked: every constructor records the probability
lost to the truncation before renormalizing, and raises TruncationError
when it exceeds the tolerance (default 1e-10).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import (
    DimensionMismatchError,
    InconsistentSolutionError,
    InvalidParameterError,
    TruncationError,
)
from .phase_space import PhaseWaveFunction

DEFAULT_TAIL_TOL = 1e-10


@dataclass(frozen=True)
class TwoModeFockState:
    """Normalized amplitude grid over the truncated two-mode basis.

    amplitudes[m, n] multiplies |m>_p |n>_s; tail_mass is the norm
    deficit recorded before renormalization.
    """

    cutoff: int
    amplitudes: np.ndarray
    tail_mass: float


@dataclass(frozen=True)
class LayerOperator:
    """Dense operator restricted to one fixed-photon-number layer,
    in the basis |n, N-n> for n = 0..N."""

    photon_number: int
    matrix: np.ndarray


class DiagonalOperator:
    """Operator diagonal in the number basis, stored as its entry grid."""

    def __init__(self, values: np.ndarray):
        self.values = values
        self.cutoff = values.shape[0] - 1

    def apply(self, amps: np.ndarray) -> np.ndarray:
        return self.values * amps


class PhaseOperator:
    """The relative-phase unitary E on the square truncation."""

    def __init__(self, cutoff: int):
        self.cutoff = int(cutoff)

    def apply(self, amps: np.ndarray) -> np.ndarray:
        out = np.zeros_like(amps)
        out[:-1, 1:] = amps[1:, :-1]   # |m,n> <- |m+1,n-1| within each layer
        out[:, 0] = amps[0, :]         # wrap term |N,0><0,N| for every layer
        return out


def _index_grids(cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    m = np.arange(cutoff + 1, dtype=float)
    return np.meshgrid(m, m, indexing="ij")


def build_N_operator(cutoff: int) -> DiagonalOperator:
    """Total photon number, entries m + n."""
    m, n = _index_grids(cutoff)
    return DiagonalOperator(m + n)


def build_L_operator(cutoff: int) -> DiagonalOperator:
    """Half photon-number difference, entries (m - n) / 2."""
    m, n = _index_grids(cutoff)
    return DiagonalOperator(0.5 * (m - n))


def modulus_operator(cutoff: int) -> DiagonalOperator:
    """Amplitude-ratio modulus P = sqrt(N_p / (N_s + 1)).

    The +1 in the denominator is forced by operator ordering and breaks
    the classical p <-> s interchange symmetry.
    """
    m, n = _index_grids(cutoff)
    return DiagonalOperator(np.sqrt(m / (n + 1.0)))


def phase_operator(cutoff: int) -> PhaseOperator:
    return PhaseOperator(cutoff)


def phase_operator_layer(N: int) -> LayerOperator:
    """Cyclic-shift restriction of E to the N-photon layer.

    The matrix is the (N+1)-cycle permutation, hence unitary with
    eigenphases exactly uniform on the circle.
    """
    N = int(N)
    if N < 1:
        raise InvalidParameterError(f"layer photon number must be >= 1, got {N}")
    mat = np.zeros((N + 1, N + 1), dtype=complex)
    mat[np.arange(N), np.arange(1, N + 1)] = 1.0  # |n,N-n><n+1,N-n-1|
    mat[N, 0] = 1.0                               # |N,0><0,N|
    return LayerOperator(N, mat)


def _check_cutoff(cutoff: int) -> int:
    cutoff = int(cutoff)
    if cutoff < 1:
        raise InvalidParameterError(f"cutoff must be >= 1, got {cutoff}")
    return cutoff


def _finish_state(amps: np.ndarray, cutoff: int, tail_tol: float,
                  context: str) -> TwoModeFockState:
    captured = float(np.sum(np.abs(amps) ** 2))
    if not np.isfinite(captured):
        raise InconsistentSolutionError(
            f"{context}: non-finite amplitudes at cutoff {cutoff}"
        )
    tail = 1.0 - captured
    if tail > tail_tol:
        raise TruncationError(
            f"{context}: truncation tail {tail:.3e} exceeds tolerance {tail_tol:.1e} "
            f"at cutoff {cutoff}"
        )
    return TwoModeFockState(cutoff, amps / np.sqrt(captured), max(tail, 0.0))


def _coherent_vector(alpha: complex, cutoff: int) -> np.ndarray:
    """Poissonian amplitudes e^{-|a|^2/2} a^n / sqrt(n!) by recurrence."""
    v = np.empty(cutoff + 1, dtype=complex)
    v[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, cutoff + 1):
        v[n] = v[n - 1] * alpha / np.sqrt(n)
    return v


def auto_cutoff_coherent(alpha_p: complex, alpha_s: complex) -> int:
    """Cutoff putting the Poisson tail of both modes far below 1e-10."""
    mu = max(abs(alpha_p) ** 2, abs(alpha_s) ** 2)
    return int(np.ceil(mu + 12.0 * np.sqrt(mu + 1.0) + 25.0))


def coherent_state(alpha_p: complex, alpha_s: complex,
                   cutoff: int | None = None,
                   tail_tol: float = DEFAULT_TAIL_TOL) -> TwoModeFockState:
    """Two-mode coherent state |alpha_p> (x) |alpha_s>, truncated.

    Raises TruncationError when the Poisson tail beyond the cutoff
    exceeds ``tail_tol``.
    """
    if cutoff is None:
        cutoff = auto_cutoff_coherent(alpha_p, alpha_s)
    cutoff = _check_cutoff(cutoff)
    amps = np.outer(_coherent_vector(alpha_p, cutoff),
                    _coherent_vector(alpha_s, cutoff))
    return _finish_state(amps, cutoff, tail_tol, "coherent state")


def displacement_matrix(alpha: complex, cutoff: int) -> np.ndarray:
    """Truncated single-mode displacement matrix in the number basis.

    Computed as exp of the truncated generator alpha a^dag - conj(alpha) a,
    which is anti-Hermitian tridiagonal and gauge-equivalent (by a diagonal
    phase) to i times a real symmetric tridiagonal matrix; a structured
    eigensolve then gives the exponential directly.  The result is exactly
    unitary on the truncated space, with entries matching the infinite-
    space operator wherever its support is clear of the cutoff.

    Local three-term recurrences for the associated-Laguerre entries look
    cheaper but amplify roundoff like e^{n/2} along the matrix diagonals,
    losing all precision past |alpha| of a few; do not revert to them.
    """
    cutoff = _check_cutoff(cutoff)
    dim = cutoff + 1
    mag = abs(alpha)
    if mag == 0.0:
        return np.eye(dim, dtype=complex)
    w, v = eigh_tridiagonal(np.zeros(dim), mag * np.sqrt(np.arange(1.0, dim)))
    core = (v * np.exp(1j * w)) @ v.T
    gauge = (-1j * np.exp(1j * np.angle(alpha))) ** np.arange(dim)
    return (gauge[:, np.newaxis] * core) * np.conj(gauge)[np.newaxis, :]


def displaced_squeezed_state(alpha_p: complex, alpha_s: complex, zeta: complex,
                             cutoff: int | None = None,
                             tail_tol: float = DEFAULT_TAIL_TOL) -> TwoModeFockState:
    """Two-mode squeezed vacuum displaced in each mode.

    The pair part is sum_n (e^{i theta} tanh s)^n |n, n> / cosh s with
    zeta = s e^{i theta}; the displacements act as truncated matrices.
    zeta = 0 reduces exactly to ``coherent_state``.  Raises
    TruncationError when the pair tail or the mass pressed against the
    grid boundary exceeds ``tail_tol``.
    """
    zeta = complex(zeta)
    s = abs(zeta)
    if s == 0.0:
        return coherent_state(alpha_p, alpha_s, cutoff, tail_tol)
    if cutoff is None:
        # keep every pair column whose clipped mass could reach ~1e-12,
        # and cover the outer support edge (sqrt(n) + |alpha|)^2 of the
        # displaced number states those columns become
        r = np.tanh(s)
        amax = max(abs(alpha_p), abs(alpha_s))
        n_used = (12.0 * np.log(10.0) - np.log(1.0 - r * r)) / (-2.0 * np.log(r))
        edge = (np.sqrt(n_used) + amax) ** 2
        cutoff = int(np.ceil(edge + 8.0 * np.sqrt(edge + 1.0) + 25.0))
    cutoff = _check_cutoff(cutoff)

    r = np.tanh(s) * np.exp(1j * np.angle(zeta))
    pair_amps = (1.0 / np.cosh(s)) * r ** np.arange(cutoff + 1)
    scaled = displacement_matrix(alpha_p, cutoff) * pair_amps[np.newaxis, :]
    amps = scaled @ displacement_matrix(alpha_s, cutoff).T
    # the displacement factors are exactly unitary, so a clipped support
    # aliases off the cutoff instead of losing norm; catch it by the mass
    # sitting against the grid boundary
    band = (np.sum(np.abs(amps[-5:, :]) ** 2)
            + np.sum(np.abs(amps[:-5, -5:]) ** 2))
    if band > tail_tol:
        raise TruncationError(
            f"displaced squeezed state: boundary mass {band:.3e} exceeds "
            f"tolerance {tail_tol:.1e} at cutoff {cutoff}"
        )
    return _finish_state(amps, cutoff, tail_tol, "displaced squeezed state")


def squeezed_for_mean_photons(nbar: float, s: float, dphi: float = 0.0,
                              cutoff: int | None = None,
                              tail_tol: float = DEFAULT_TAIL_TOL) -> TwoModeFockState:
    """Displaced squeezed state at the balanced operating point.

    Splits nbar as |alpha_p| = |alpha_s| = sqrt(nbar/2 - sinh^2 s) with
    real displacement phases, and sets the squeezing angle so that
    dphi = phi_p + phi_s - theta is the requested noise-balance phase
    (dphi = 0 minimizes the photon-difference variance).
    """
    s = float(s)
    if s < 0.0:
        raise InvalidParameterError(f"squeezing magnitude must be >= 0, got {s}")
    alpha_sq = nbar / 2.0 - np.sinh(s) ** 2
    if alpha_sq < 0.0:
        raise InvalidParameterError(
            f"nbar={nbar} too small for squeezing s={s}: needs nbar >= 2 sinh^2 s"
        )
    alpha = np.sqrt(alpha_sq)
    zeta = s * np.exp(-1j * dphi)  # phi_p = phi_s = 0, so theta = -dphi
    return displaced_squeezed_state(alpha, alpha, zeta, cutoff, tail_tol)


def embed_phase_state(psi: PhaseWaveFunction, N: int,
                      tail_tol: float = DEFAULT_TAIL_TOL) -> TwoModeFockState:
    """Place a phase state onto the single Fock layer of N photons.

    The component Psi_l becomes the amplitude of |N/2 + l, N/2 - l>.
    N must be even so the index window is integer-centred; support
    clipped outside l in [-N/2, N/2] beyond ``tail_tol`` raises
    TruncationError.
    """
    N = int(N)
    if N < 2 or N % 2 != 0:
        raise InvalidParameterError(f"layer photon number must be even and >= 2, got {N}")
    half = N // 2
    amps = np.zeros((N + 1, N + 1), dtype=complex)
    for i, l in enumerate(psi.l_values):
        if -half <= l <= half:
            amps[half + l, half - l] = psi.amplitudes[i]
    return _finish_state(amps, N, tail_tol, f"phase state on layer N={N}")


def _check_dims(state: TwoModeFockState, op) -> None:
    if getattr(op, "cutoff", None) != state.cutoff:
        raise DimensionMismatchError(
            f"operator cutoff {getattr(op, 'cutoff', None)} != state cutoff {state.cutoff}"
        )


def expectation(state: TwoModeFockState, op) -> complex:
    """<psi| A |psi> for any operator exposing apply()."""
    _check_dims(state, op)
    return complex(np.vdot(state.amplitudes, op.apply(state.amplitudes)))


def variance_hermitian(state: TwoModeFockState, op) -> float:
    """<A^2> - <A>^2 for Hermitian A (uses <A^2> = ||A psi||^2)."""
    _check_dims(state, op)
    applied = op.apply(state.amplitudes)
    mean = np.vdot(state.amplitudes, applied).real
    second = np.vdot(applied, applied).real
    return max(second - mean * mean, 0.0)


def circular_variance_unitary(state: TwoModeFockState, unitary) -> float:
    """1 - |<U>|^2, the variance notion adapted to unitary operators."""
    e = expectation(state, unitary)
    return min(max(1.0 - abs(e) ** 2, 0.0), 1.0)


def extract_layer(state: TwoModeFockState, N: int) -> np.ndarray:
    """Unnormalized layer-N amplitude vector, entries <n, N-n | psi>."""
    if N > state.cutoff:
        raise DimensionMismatchError(f"layer {N} exceeds cutoff {state.cutoff}")
    n = np.arange(N + 1)
    return state.amplitudes[n, N - n]
