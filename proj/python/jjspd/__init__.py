"""Josephson-junction single-photon detector models, simulation and fits."""

from ._core import (
    ConfigError,
    DataError,
    Error,
    NumericError,
    FitResult,
    Junction,
    LightModel,
    RateDataset,
    __version__,
    barrier_approx,
    barrier_exact,
    beam_radius,
    derive_junction,
    diffusion_current,
    effective_temperature,
    fd_transform,
    fit_dark,
    fit_gate_joint,
    fit_light,
    fit_light_retrap,
    load_rate_dataset,
    make_junction,
    optics_rate,
    photon_flux_density,
    poisson_probabilities,
    rate_dark,
    rate_light_measured,
    rate_mqt,
    rate_ta,
    sample_rates,
    set_thread_limit,
    simulate_cw,
    simulate_pulse,
    simulate_ramp,
    variance_mean_test,
)
