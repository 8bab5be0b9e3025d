"""Domain types and environment builders for the dephasing lab.

A two-level system couples to ``n`` environment spins through a purely
diagonal interaction: the system observable and every spin observable are
the +/-1 operators in their local ``{|+>, |->}`` bases, spin ``j`` entering
with coupling constant ``g_j`` (units of inverse time, hbar = 1).  Neither
the system nor the environment has any self-Hamiltonian, so the dynamics
only rotates relative phases.

Environments come in two flavours that behave in opposite ways:

* random ones (couplings uniform on an interval, spin states uniform on the
  Bloch sphere), for which the system's off-diagonal terms collapse and stay
  small for a very long time, and
* structured ones (``EIGENSTATE``, ``BALANCED_EQUAL_COUPLING``), for which
  coherence survives or returns quickly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidRangeError

NORM_TOL = 1e-9

DEFAULT_G_MIN_FRACTION = 0.05

_SEED_LIMIT = 2**64


@dataclass(frozen=True)
class SystemAmplitudes:
    """Complex amplitudes (a, b) of the system state ``a|+> + b|->``."""

    a: complex
    b: complex

    def populations(self) -> tuple[float, float]:
        return abs(self.a) ** 2, abs(self.b) ** 2


@dataclass(frozen=True)
class EnvSpin:
    """One environment spin: coupling ``g`` and initial state ``alpha|+> + beta|->``."""

    g: float
    alpha: complex
    beta: complex

    @property
    def imbalance(self) -> float:
        """Population imbalance |alpha|^2 - |beta|^2 (the Bloch z-coordinate)."""
        return abs(self.alpha) ** 2 - abs(self.beta) ** 2


@dataclass(frozen=True)
class EnvironmentSpec:
    """Ordered collection of environment spins."""

    spins: tuple[EnvSpin, ...]

    def __post_init__(self):
        object.__setattr__(self, "spins", tuple(self.spins))

    @property
    def n(self) -> int:
        return len(self.spins)

    def couplings(self) -> np.ndarray:
        return np.array([s.g for s in self.spins], dtype=float)

    def imbalances(self) -> np.ndarray:
        return np.array([s.imbalance for s in self.spins], dtype=float)

    def amplitudes(self) -> np.ndarray:
        """(n, 2) array of the initial (alpha_j, beta_j) pairs."""
        return np.array([[s.alpha, s.beta] for s in self.spins], dtype=complex).reshape(-1, 2)


@dataclass(frozen=True)
class InteractionModel:
    """Phase convention of the dephasing interaction.

    Evolution over time ``t`` multiplies the product-basis state with
    eigenvalue signs ``(s, s_1, ..., s_n)`` by ``exp(i*t*sum_j g_j*s*s_j)``,
    so the aligned branch (system ``+``, spin ``j`` ``+``) advances by
    ``exp(+i*g_j*t)``.  Both the closed-form engine and the brute-force
    oracle follow this convention.
    """

    aligned_phase_sign: int = 1

    def branch_phase(self, g: float, t: float, system_sign: int, spin_sign: int) -> complex:
        return complex(np.exp(1j * self.aligned_phase_sign * g * t * system_sign * spin_sign))


INTERACTION = InteractionModel()


class ScenarioKind(enum.Enum):
    """Environment families used to probe when dephasing does and does not occur."""

    RANDOM = "random"
    EIGENSTATE = "eigenstate"
    BALANCED_EQUAL_COUPLING = "balanced"
    CUSTOM = "custom"


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < _SEED_LIMIT:
        raise InvalidRangeError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def build_environment_random(
    n: int, seed: int, g_min: float | None = None, g_max: float = 1.0
) -> EnvironmentSpec:
    """Draw ``n`` spins with couplings uniform on [g_min, g_max] and Bloch-uniform states.

    Spin states are sampled uniformly on the Bloch sphere: cos(theta) uniform
    on [-1, 1], azimuth phi uniform on [0, 2*pi), then alpha = cos(theta/2)
    and beta = exp(i*phi)*sin(theta/2).  That makes the per-spin imbalance
    d = |alpha|^2 - |beta|^2 = cos(theta) exactly uniform on [-1, 1].

    The draw is fully deterministic in (n, seed, g_min, g_max): a PCG64
    stream seeded with ``seed`` supplies 3n uniform doubles, consumed as
    n couplings, then n cos-latitudes, then n azimuths, so identical inputs
    rebuild bit-identical environments.  ``g_min`` defaults to
    0.05 * g_max, which keeps every spin meaningfully coupled.
    """
    if n < 0:
        raise InvalidRangeError(f"spin count must be non-negative, got {n}")
    seed = _check_seed(seed)
    if g_min is None:
        g_min = DEFAULT_G_MIN_FRACTION * g_max
    if not (0 < g_min <= g_max) or not math.isfinite(g_min) or not math.isfinite(g_max):
        raise InvalidRangeError(f"need 0 < g_min <= g_max, got g_min={g_min}, g_max={g_max}")

    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(3 * n)
    g = g_min + (g_max - g_min) * u[:n]
    cos_theta = 2.0 * u[n : 2 * n] - 1.0
    phi = (2.0 * math.pi) * u[2 * n :]
    half_theta = 0.5 * np.arccos(cos_theta)
    alpha = np.cos(half_theta)
    beta = np.exp(1j * phi) * np.sin(half_theta)
    spins = tuple(
        EnvSpin(float(gj), complex(aj), complex(bj)) for gj, aj, bj in zip(g, alpha, beta)
    )
    return EnvironmentSpec(spins)


def build_environment_scenario(kind: ScenarioKind, n: int, g: float) -> EnvironmentSpec:
    """Build one of the structured counterexample environments.

    ``EIGENSTATE``: every spin starts in the coupling eigenstate ``|+>`` —
    the environment picks up phases but never entangles with the system,
    so coherence is never lost.  ``BALANCED_EQUAL_COUPLING``: every spin is
    the balanced real superposition with the same coupling — coherence
    collapses but returns fully at t = pi/(2g) no matter how many spins.
    """
    if n < 0:
        raise InvalidRangeError(f"spin count must be non-negative, got {n}")
    if not math.isfinite(g) or g <= 0:
        raise InvalidRangeError(f"coupling must be positive and finite, got {g}")
    if kind is ScenarioKind.EIGENSTATE:
        spin = EnvSpin(float(g), 1.0 + 0.0j, 0.0j)
    elif kind is ScenarioKind.BALANCED_EQUAL_COUPLING:
        amp = complex(1.0 / math.sqrt(2.0))
        spin = EnvSpin(float(g), amp, amp)
    else:
        raise ValueError(
            f"{kind} is not a fixed-form scenario; use build_environment_random or "
            "construct an EnvironmentSpec directly"
        )
    return EnvironmentSpec((spin,) * n)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate(); empty ``failures`` means everything checked out."""

    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def _finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


def validate(sys: SystemAmplitudes, env: EnvironmentSpec) -> ValidationReport:
    """Check every type invariant and report each violation rather than raising."""
    failures: list[str] = []
    a, b = complex(sys.a), complex(sys.b)
    if not (_finite(a) and _finite(b)):
        failures.append("system amplitudes must be finite")
    else:
        norm = abs(a) ** 2 + abs(b) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            failures.append(f"system amplitudes not normalized: |a|^2 + |b|^2 = {norm:.6g}")
    for j, spin in enumerate(env.spins):
        if not math.isfinite(spin.g):
            failures.append(f"spin {j}: coupling must be finite, got {spin.g}")
        elif spin.g < 0:
            failures.append(f"spin {j}: coupling must be non-negative, got {spin.g}")
        alpha, beta = complex(spin.alpha), complex(spin.beta)
        if not (_finite(alpha) and _finite(beta)):
            failures.append(f"spin {j}: amplitudes must be finite")
            continue
        norm = abs(alpha) ** 2 + abs(beta) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            failures.append(
                f"spin {j}: amplitudes not normalized: |alpha|^2 + |beta|^2 = {norm:.6g}"
            )
    return ValidationReport(tuple(failures))
