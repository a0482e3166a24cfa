"""Python bindings for the rflab Ricci flow lab."""

import json as _json

from ._rflab import *  # noqa: F401,F403
from ._rflab import __version__, parse_config as _parse_config, simulate as _simulate


def load_config(text, source="config"):
    """Parse sectioned key-value or JSON config text into a dict."""
    return _json.loads(_parse_config(text, source))


def run_scenario(config, out=None, grid=None, dt=None):
    """Run a scenario given as a dict or config text.

    Returns (trajectory, monitors dict, exit code, config hash).
    """
    if isinstance(config, str):
        config = load_config(config)
    traj, monitors, code, digest = _simulate(_json.dumps(config), out, grid, dt)
    return traj, _json.loads(monitors), code, digest
