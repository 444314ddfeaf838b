"""Relay planning for D2D street networks."""

from ._d2drelay import (
    ConfigError,
    FiniteSizeError,
    __version__,
    angle_density,
    cash_flow,
    circumcircle_surface,
    estimate_p_star,
    invert_for_relay_fraction,
    load_config,
    mean_vacancy,
    minimal_relay_proportion,
    occupation_probability,
    relay_curve,
    street_stats,
    triangle_surface,
    user_density,
)

__all__ = [
    "ConfigError",
    "FiniteSizeError",
    "__version__",
    "angle_density",
    "cash_flow",
    "circumcircle_surface",
    "estimate_p_star",
    "invert_for_relay_fraction",
    "load_config",
    "mean_vacancy",
    "minimal_relay_proportion",
    "occupation_probability",
    "relay_curve",
    "street_stats",
    "triangle_surface",
    "user_density",
]
