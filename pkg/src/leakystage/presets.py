"""Built-in run configurations reproducing the reference figures and examples.

Each preset is a complete config document (same structure as a YAML config
file).  They double as the regression fixtures for the CLI: presets must
produce byte-identical output across runs.
"""
from __future__ import annotations

import copy
from typing import Any

#: Rate set used by all illustrative runs; the critical level is 1/3.
FIGURE_PARAMS = {"beta": 0.6, "mu": 1.0, "delta": 1.8, "rho": 0.5}

PRESETS: dict[str, dict[str, Any]] = {
    # Envelope-versus-full-system comparison run: five releases, two time
    # units apart, deliberately crossing the threshold.
    "fig-envelope": {
        "params": FIGURE_PARAMS,
        "simulate": {
            "schedule": [[0.0, 0.46], [2.0, 0.24], [4.0, 0.24], [6.0, 0.24], [8.0, 0.24]],
            "S0": 0.08,
            "T": 12.0,
            "step": 0.01,
        },
    },
    # Fixed-horizon capacity curves B_n(h) with the 1 + h frontier.
    "panel-a": {
        "params": FIGURE_PARAMS,
        "phase": {
            "panel": "a",
            "h_range": [0.0, 4.0, 81],
            "n_curves": [2, 3, 4, 6, 10],
        },
    },
    # Overhead sawtooth k_safe(r) with cost-optimal counts at sampled k.
    "panel-b": {
        "params": FIGURE_PARAMS,
        "phase": {
            "panel": "b",
            "r_range": [1.02, 4.0, 150],
            "k_range": [0.0, 1.5, 7],
        },
    },
    # Uniform versus front-loaded allocation at r=2.1, n=3, h=2.
    "panel-c": {
        "params": FIGURE_PARAMS,
        "phase": {
            "panel": "c",
            "panel_c": {"r": 2.1, "n": 3, "h": 2.0},
        },
    },
    # Worked peak example: Q = 2.1 * delta_c staged three times, tau = 2.
    "peak-c": {
        "params": FIGURE_PARAMS,
        "peak": {"Q": 0.7, "n": 3, "tau": 2.0},
    },
    # Worked horizon example: same load within T = 4 (h = 2).
    "horizon-c": {
        "params": FIGURE_PARAMS,
        "horizon": {"Q": 0.7, "T": 4.0, "n_list": [2, 3, 4, 6, 10]},
    },
}


def preset(name: str) -> dict[str, Any]:
    """Return a deep copy of the named preset document."""
    return copy.deepcopy(PRESETS[name])
