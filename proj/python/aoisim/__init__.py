"""Age-of-information scheduling on a slotted collision uplink.

Thin wrapper over the compiled core: closed forms, simulation, share
optimization, the two-terminal dynamic-programming benchmark, and the
decentralized rotation protocol demo.
"""

from ._core import (
    __version__,
    drr_demo,
    heavy_traffic_beta,
    lower_bounds,
    mdp_gain,
    myopic_two_slot,
    rr_one_avg_aoi,
    rr_one_stationary,
    simulate,
    solve_rates,
)

__all__ = [
    "__version__",
    "drr_demo",
    "heavy_traffic_beta",
    "lower_bounds",
    "mdp_gain",
    "myopic_two_slot",
    "rr_one_avg_aoi",
    "rr_one_stationary",
    "simulate",
    "solve_rates",
]
