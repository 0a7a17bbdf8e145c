"""Monte Carlo simulator for objective state reduction of an entangled qubit pair."""

import json

from ._core import *  # noqa: F401,F403
from ._core import __version__, _run_scenario


def run_scenario(name, **config):
    """Run a scenario (fig1, fig2, interrupt, born, dephasing).

    Keyword arguments override the scenario config fields (n_traj, alpha0_sq,
    t_max, noise, out_dir, ...). Returns a dict with outputs, checks and summary.
    """
    return json.loads(_run_scenario(name, json.dumps(config)))
