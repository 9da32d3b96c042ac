"""RK4 propagation backends.

The compiled extension ``collective_dfs._rk4`` is used when it imports;
otherwise, or when ``COLLECTIVE_DFS_PURE_PYTHON=1`` is set, the numpy
implementation below runs. Both share one signature and agree to rounding.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from ._rk4 import rk4_propagate as _rk4_compiled
except ImportError:  # extension not built
    _rk4_compiled = None


def rk4_propagate_python(heff, jumps, rates, rho0, dt: float, nsteps: int,
                         record_every: int = 1) -> np.ndarray:
    """Numpy reference for :func:`collective_dfs._rk4.rk4_propagate`."""
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    heff = np.asarray(heff, dtype=complex)
    jumps = np.asarray(jumps, dtype=complex)
    rates = np.asarray(rates, dtype=float)
    jumps_dag = np.conj(np.swapaxes(jumps, 1, 2))

    def rhs(rho):
        t = heff @ rho
        out = -1j * (t - t.conj().T)
        for rate, jump, jump_dag in zip(rates, jumps, jumps_dag):
            out += rate * (jump @ rho @ jump_dag)
        return out

    rho = np.array(rho0, dtype=complex, copy=True)
    states = [rho.copy()]
    for s in range(1, nsteps + 1):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if s % record_every == 0 or s == nsteps:
            states.append(rho.copy())
    return np.array(states)


HAVE_COMPILED = _rk4_compiled is not None
BACKENDS = {"python": rk4_propagate_python}
if _rk4_compiled is not None:
    BACKENDS["cython"] = _rk4_compiled

if _rk4_compiled is not None and os.environ.get("COLLECTIVE_DFS_PURE_PYTHON", "") in ("", "0"):
    DEFAULT_BACKEND = "cython"
else:
    DEFAULT_BACKEND = "python"


def rk4_propagate(heff, jumps, rates, rho0, dt, nsteps, record_every=1, backend=None):
    name = backend or DEFAULT_BACKEND
    try:
        impl = BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {sorted(BACKENDS)}") from None
    return impl(heff, jumps, rates, rho0, float(dt), int(nsteps), int(record_every))
