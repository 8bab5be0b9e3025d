import math

import numpy as np
from hypothesis import settings
from hypothesis import strategies as st

from einlab import EnvSpin, EnvironmentSpec, SystemAmplitudes

settings.register_profile("einlab", derandomize=True)
settings.load_profile("einlab")


def bloch_spin(g: float, cos_theta: float, phi: float) -> EnvSpin:
    half = 0.5 * math.acos(cos_theta)
    return EnvSpin(g, complex(math.cos(half)), complex(np.exp(1j * phi) * math.sin(half)))


def random_environment(rng: np.random.Generator, n: int) -> EnvironmentSpec:
    """Environment drawn from a caller-owned generator (distinct from the seeded builder)."""
    spins = tuple(
        bloch_spin(
            float(rng.uniform(0.05, 1.0)),
            float(rng.uniform(-1.0, 1.0)),
            float(rng.uniform(0.0, 2.0 * math.pi)),
        )
        for _ in range(n)
    )
    return EnvironmentSpec(spins)


def random_system(rng: np.random.Generator) -> SystemAmplitudes:
    half = 0.5 * math.acos(rng.uniform(-1.0, 1.0))
    phase = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
    return SystemAmplitudes(complex(math.cos(half)), complex(phase * math.sin(half)))


env_spins = st.builds(
    bloch_spin,
    st.floats(min_value=0.01, max_value=5.0),
    st.floats(min_value=-1.0, max_value=1.0),
    st.floats(min_value=0.0, max_value=2.0 * math.pi, exclude_max=True),
)

environments = st.builds(
    EnvironmentSpec, st.lists(env_spins, min_size=0, max_size=8).map(tuple)
)

small_environments = st.builds(
    EnvironmentSpec, st.lists(env_spins, min_size=0, max_size=5).map(tuple)
)

times = st.floats(min_value=-50.0, max_value=50.0)

system_amplitudes = st.builds(
    lambda cos_theta, phi: SystemAmplitudes(
        complex(math.cos(0.5 * math.acos(cos_theta))),
        complex(np.exp(1j * phi) * math.sin(0.5 * math.acos(cos_theta))),
    ),
    st.floats(min_value=-1.0, max_value=1.0),
    st.floats(min_value=0.0, max_value=2.0 * math.pi, exclude_max=True),
)
