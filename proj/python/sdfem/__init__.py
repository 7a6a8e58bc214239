"""Python bindings for the sdfem library.

Structured results are returned as plain dictionaries and nodal fields as
NumPy arrays of shape (N+1, N+1) indexed ``[j, i]``.
"""

import json as _json

import numpy as _np

from . import _sdfem
from ._sdfem import __version__, loglog_slope, mesh_coordinates, omega, place_x_star, sigma_policy

__all__ = [
    "__version__",
    "green",
    "loglog_slope",
    "mesh_coordinates",
    "mesh_info",
    "omega",
    "place_x_star",
    "sigma_policy",
    "solve",
    "sweep",
]


def mesh_info(N, eps, rho=2.5, beta1=1.0, beta2=1.0):
    """Transition parameters and counts of the Shishkin mesh."""
    return _json.loads(_sdfem.mesh_info(N, eps, rho, beta1, beta2))


def solve(N, eps, mode="standard", **problem):
    """Solve the f = 1 problem; returns (nodal values, relative residual)."""
    u, residual = _sdfem.solve(N, eps, mode, **problem)
    return _np.asarray(u), residual


def green(N, eps, x_star="center-s", mode="standard", k=2.0, **problem):
    """Discrete Green function for ``x_star`` given as (i, j) or a placement name.

    Returns ``(row, G)`` where ``row`` holds norms, ratios and residuals.
    """
    if isinstance(x_star, str):
        kw = {key: problem[key] for key in ("b1", "b2", "rho") if key in problem}
        i, j = _sdfem.place_x_star(N, eps, x_star, **kw)
    else:
        i, j = x_star
    row, G = _sdfem.green(N, eps, i, j, mode, k, **problem)
    return _json.loads(row), _np.asarray(G)


def sweep(config=None, **overrides):
    """Run a parameter sweep with checks; returns (report dict, CSV text)."""
    cfg = {"schema_version": 1}
    cfg.update(config or {})
    cfg.update(overrides)
    report, csv = _sdfem.sweep(_json.dumps(cfg))
    return _json.loads(report), csv
