"""States on the relative-phase circle, stored by Fourier components.

A state is a square-summable sequence Psi_l over the integer
photon-difference index l, related to the continuous wave function by

    Psi(phi) = (2 pi)^{-1/2} sum_l exp(-i l phi) Psi_l,

so the probability density is p(phi) = |Psi(phi)|^2.  The Fourier side is
primary because embedding into Fock layers consumes Psi_l directly; the
density is derived on demand.

Constructors produce states whose density peaks at phi = pi (the
exp(-q cos phi) / exp(-kappa cos(phi - phi_0)) convention); use
``rotate`` to move the peak.  Mean photon-difference shifts are integer
index translations so the state stays 2 pi - periodic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ive

from .errors import InvalidParameterError, InvalidStateError
from .mathieu import MathieuSolution

_SQRT2 = np.sqrt(2.0)

#: probability mass allowed outside the stored support window
WINDOW_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class PhaseWaveFunction:
    """Fourier components of a relative-phase state.

    ``amplitudes[i]`` is Psi_l for l = ``l_min + i``; outside the window
    the components are zero (tail mass below WINDOW_TAIL_TOL).
    ``mean_l_offset`` records the integer index translation applied at
    construction.
    """

    l_min: int
    amplitudes: np.ndarray
    mean_l_offset: int = 0

    @property
    def l_values(self) -> np.ndarray:
        return np.arange(self.l_min, self.l_min + len(self.amplitudes))

    def component(self, l: int) -> complex:
        """Psi_l, zero outside the stored window."""
        i = int(l) - self.l_min
        if 0 <= i < len(self.amplitudes):
            return complex(self.amplitudes[i])
        return 0.0j

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class CircularMoments:
    """First and second moments on the circle.

    e_mean is <e^{i phi}>, e_var the circular variance 1 - |e_mean|^2;
    l_mean / l_var are ordinary moments of the photon-difference index.
    """

    e_mean: complex
    e_var: float
    l_mean: float
    l_var: float


def _require_int(value, name: str) -> int:
    try:
        out = int(value)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
    if out != value:
        raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
    return out


def _trimmed(l_min: int, amps: np.ndarray, mean_l_offset: int) -> PhaseWaveFunction:
    """Drop negligible edge components, renormalize, freeze the window."""
    mag2 = np.abs(amps) ** 2
    keep = np.nonzero(mag2 > WINDOW_TAIL_TOL * 1e-3)[0]
    if len(keep) == 0:
        raise InvalidStateError("phase state has no support")
    lo, hi = keep[0], keep[-1] + 1
    amps = amps[lo:hi].astype(complex)
    amps = amps / np.sqrt(np.sum(np.abs(amps) ** 2))
    return PhaseWaveFunction(l_min + lo, amps, mean_l_offset)


def phase_state(components: dict[int, complex], normalize: bool = True) -> PhaseWaveFunction:
    """Build a state from an {l: Psi_l} mapping (test/CLI convenience)."""
    if not components:
        raise InvalidStateError("empty component map")
    ls = sorted(components)
    l_min, l_max = ls[0], ls[-1]
    amps = np.zeros(l_max - l_min + 1, dtype=complex)
    for l, c in components.items():
        amps[_require_int(l, "l") - l_min] = c
    nrm = np.sqrt(np.sum(np.abs(amps) ** 2))
    if nrm == 0.0:
        raise InvalidStateError("zero-norm component map")
    if normalize:
        amps /= nrm
    elif abs(nrm - 1.0) > 1e-9:
        raise InvalidStateError(f"components not normalized: |Psi|^2 = {nrm**2:.3e}")
    return _trimmed(l_min, amps, 0)


def from_mathieu(sol: MathieuSolution, mean_l: int = 0) -> PhaseWaveFunction:
    """Phase state of the even Mathieu beam ce_{2k}( phi/2, q).

    The cosine coefficients map onto the Fourier side as
    Psi_0 = sqrt(2) A_0 and Psi_{+-j} = A_{2j} / sqrt(2); McLachlan
    normalization makes the result unit-norm by construction.  ``mean_l``
    translates the index window, fixing <L> exactly.
    """
    mean_l = _require_int(mean_l, "mean_l")
    A = sol.coefficients
    J = len(A)
    amps = np.zeros(2 * J - 1, dtype=complex)
    amps[J - 1] = _SQRT2 * A[0]
    for j in range(1, J):
        amps[J - 1 + j] = A[j] / _SQRT2
        amps[J - 1 - j] = A[j] / _SQRT2
    return _trimmed(-(J - 1) + mean_l, amps, mean_l)


def from_von_mises(kappa: float, phi0: float = 0.0, mean_l: int = 0) -> PhaseWaveFunction:
    """Phase state with von Mises density ~ exp[-kappa cos(phi - phi0)].

    Fourier components are Psi_l ~ (-1)^l exp(i l phi0) I_l(kappa/2),
    so |Psi_l|^2 = I_l(kappa/2)^2 / I_0(kappa).  Exponentially scaled
    Bessel values keep the construction stable at large kappa.
    """
    kappa = float(kappa)
    if not np.isfinite(kappa) or kappa < 0.0:
        raise InvalidParameterError(f"kappa must be finite and >= 0, got {kappa}")
    phi0 = float(phi0)
    if not np.isfinite(phi0):
        raise InvalidParameterError(f"phi0 must be finite, got {phi0}")
    mean_l = _require_int(mean_l, "mean_l")

    if kappa == 0.0:
        return PhaseWaveFunction(mean_l, np.ones(1, dtype=complex), mean_l)

    z = 0.5 * kappa
    l_max = int(np.ceil(z + 10.0 * np.sqrt(z + 1.0) + 20.0))
    while True:
        l = np.arange(-l_max, l_max + 1)
        w = ive(np.abs(l), z)  # I_l(z) exp(-z); common factor is normalized away
        if (w[0] / w[l_max]) ** 2 < WINDOW_TAIL_TOL * 1e-4:
            break
        l_max *= 2
    amps = ((-1.0) ** np.abs(l)) * np.exp(1j * l * phi0) * w
    return _trimmed(-l_max + mean_l, amps, mean_l)


def shift(psi: PhaseWaveFunction, m: int) -> PhaseWaveFunction:
    """Translate the index window by m: l_mean moves by exactly m."""
    m = _require_int(m, "m")
    return PhaseWaveFunction(psi.l_min + m, psi.amplitudes.copy(),
                             psi.mean_l_offset + m)


def rotate(psi: PhaseWaveFunction, theta: float) -> PhaseWaveFunction:
    """Rotate the density by theta: p(phi) -> p(phi - theta).

    Acts as Psi_l -> exp(i l theta) Psi_l, multiplying <e^{i phi}> by
    exp(i theta) and leaving every variance unchanged.
    """
    amps = psi.amplitudes * np.exp(1j * psi.l_values * theta)
    return PhaseWaveFunction(psi.l_min, amps, psi.mean_l_offset)


def circular_moments(psi: PhaseWaveFunction) -> CircularMoments:
    """Moments <e^{i phi}>, circular variance, <L>, Var L.

    <e^{i phi}> = sum_l conj(Psi_l) Psi_{l+1}; the circular variance is
    1 - |<e^{i phi}>|^2.  Raises InvalidStateError if the input norm is
    off by more than 1e-9.
    """
    nrm2 = psi.norm_sq()
    if abs(nrm2 - 1.0) > 1e-9:
        raise InvalidStateError(f"state not normalized: |Psi|^2 = {nrm2:.12e}")
    a = psi.amplitudes
    ls = psi.l_values.astype(float)
    p = np.abs(a) ** 2
    e_mean = complex(np.vdot(a[:-1], a[1:])) if len(a) > 1 else 0.0j
    l_mean = float(ls @ p)
    l_var = max(float((ls * ls) @ p) - l_mean * l_mean, 0.0)
    e_var = min(max(1.0 - abs(e_mean) ** 2, 0.0), 1.0)
    return CircularMoments(e_mean, e_var, l_mean, l_var)


def wave_function_values(psi: PhaseWaveFunction, phis: np.ndarray) -> np.ndarray:
    """Psi(phi) = (2 pi)^{-1/2} sum_l exp(-i l phi) Psi_l on given angles."""
    phis = np.asarray(phis, dtype=float)
    phase = np.exp(-1j * np.multiply.outer(phis, psi.l_values.astype(float)))
    return (phase @ psi.amplitudes) / np.sqrt(2.0 * np.pi)


def density_profile(psi: PhaseWaveFunction, grid_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Probability density on a uniform grid over [0, 2 pi).

    Returns (phi, p) arrays of length ``grid_points``.  On any grid finer
    than twice the support width the rectangle rule integrates p exactly
    (trigonometric polynomial), so sum(p) * dphi == 1 to rounding.
    """
    grid_points = int(grid_points)
    if grid_points < 2:
        raise InvalidParameterError(f"grid_points must be >= 2, got {grid_points}")
    phi = np.linspace(0.0, 2.0 * np.pi, grid_points, endpoint=False)
    p = np.abs(wave_function_values(psi, phi)) ** 2
    return phi, p
