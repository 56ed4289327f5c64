"""Moving-source acoustic scene simulator: Python bindings."""

from ._wavefield import (
    Atmosphere,
    Error,
    Scene,
    __version__,
    absorption_coefficient,
    absorption_spectrum,
    absorption_terms,
    fft_magnitude,
    gcc_phat_tdoa,
    ground_truth_angle,
    read_wav,
    render,
    solve_emission,
    speed_of_sound,
    write_wav,
)

__all__ = [
    "Atmosphere",
    "Error",
    "Scene",
    "__version__",
    "absorption_coefficient",
    "absorption_spectrum",
    "absorption_terms",
    "fft_magnitude",
    "gcc_phat_tdoa",
    "ground_truth_angle",
    "read_wav",
    "render",
    "solve_emission",
    "speed_of_sound",
    "write_wav",
]
