"""Steady-state network initializer.

In steady state each pipe carries a constant mass flow and its pressure
profile obeys ``dp/dx = -beta phi|phi| / rho(p, x)``.  The solver treats
the non-slack nodal pressures and the per-pipe flows as unknowns, closes
them with the nodal mass balances and the per-pipe pressure-drop relations
(including compressor boosts at pipe ends), and drives the system to zero
with a damped Newton iteration around an adaptive ODE integration of each
pipe profile.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import SteadyStateError
from .network import Network
from .pipe import PipeState

PRESSURE_FLOOR = 1e4       # Pa; below this a pipe is considered drained
MAX_NEWTON_ITERS = 100
NODE_TOL = 1e-8            # kg/s
PIPE_TOL = 1e-4            # Pa
ODE_RTOL = 1e-10


def _constant_profile(p):
    return lambda x: p * np.ones_like(np.asarray(x, dtype=float))


def integrate_pipe_pressure(eos, geometry, p_in: float, mflow: float,
                            dense: bool = False):
    """Integrate the steady pressure profile from the pipe inlet.

    Returns ``(p_out, profile)`` where ``profile(x)`` is available when
    ``dense``.  If the pressure hits the floor before the outlet, ``p_out``
    continues linearly downward so a Newton caller sees a monotone,
    strongly negative residual instead of a crash.
    """
    length = geometry.length
    phi = mflow / geometry.area
    if p_in <= PRESSURE_FLOOR:
        return p_in - length, (_constant_profile(p_in) if dense else None)
    if geometry.beta == 0.0 or phi == 0.0:
        return p_in, (_constant_profile(p_in) if dense else None)
    drag = geometry.beta * phi * abs(phi)

    def rhs(x, p):
        return [-drag / eos.density(max(p[0], PRESSURE_FLOOR), x)]

    def hit_floor(x, p):
        return p[0] - PRESSURE_FLOOR
    hit_floor.terminal = True

    sol = solve_ivp(rhs, (0.0, length), [p_in], rtol=ODE_RTOL, atol=1e-2,
                    events=hit_floor, dense_output=dense)
    if sol.t[-1] < length:
        slope = drag / eos.density(PRESSURE_FLOOR, sol.t[-1])
        p_out = PRESSURE_FLOOR - slope * (length - sol.t[-1])
        return p_out, None
    profile = (lambda x, s=sol: s.sol(np.asarray(x, dtype=float))[0]) \
        if dense else None
    return float(sol.y[0, -1]), profile


@dataclass
class SteadySolution:
    """Converged steady state of a network at the schedule time t0."""

    node_pressures: dict
    pipe_flows: dict               # kg/s, positive from-node -> to-node
    pipe_end_pressures: dict       # pipe id -> (inlet, outlet) Pa, after boost
    profiles: dict                 # pipe id -> p(x) callable

    def populate(self, net: Network, t0: float = 0.0) -> None:
        """Write cell densities and face fluxes into every pipe state."""
        for e in net.edges:
            prof = self.profiles[e.id]
            xc = e.grid.cell_centers
            rho = np.asarray(net.eos.density(prof(xc), xc), dtype=float)
            phi = np.full(e.grid.n_cells + 1,
                          self.pipe_flows[e.id] / e.geometry.area)
            e.state = PipeState(rho, phi, time=t0)
        net.time = t0
        net.step_index = 0


def solve_steady_state(net: Network, t0: float = 0.0) -> SteadySolution:
    """Solve nodal pressures and pipe flows for schedules frozen at ``t0``."""
    slack = [n for n in net.nodes if n.is_slack]
    free_nodes = [n for n in net.nodes if not n.is_slack]
    n_p, n_m = len(free_nodes), len(net.edges)
    node_pos = {n.id: i for i, n in enumerate(free_nodes)}
    slack_p = {n.id: n.bc.pressure(t0) for n in slack}
    demands = {n.id: (0.0 if n.is_slack else n.bc.withdrawal(t0))
               for n in net.nodes}
    alpha_in = {e.id: (e.inlet_ratio(t0) if e.inlet_ratio else 1.0)
                for e in net.edges}
    alpha_out = {e.id: (e.outlet_ratio(t0) if e.outlet_ratio else 1.0)
                 for e in net.edges}
    p_scale = max(slack_p.values())

    def node_pressure(z, node_id):
        return slack_p[node_id] if node_id in slack_p \
            else z[node_pos[node_id]]

    def residual(z):
        res = np.empty(n_p + n_m)
        flows = z[n_p:]
        for i, n in enumerate(free_nodes):
            bal = -demands[n.id]
            for j, e in enumerate(net.edges):
                if e.to_node == n.id:
                    bal += flows[j]
                if e.from_node == n.id:
                    bal -= flows[j]
            res[i] = bal
        for j, e in enumerate(net.edges):
            p_in = alpha_in[e.id] * node_pressure(z, e.from_node)
            p_out, _ = integrate_pipe_pressure(net.eos, e.geometry, p_in,
                                               flows[j])
            res[n_p + j] = p_out - alpha_out[e.id] * node_pressure(z, e.to_node)
        return res

    def scaled_norm(res):
        s = res.copy()
        s[n_p:] /= p_scale
        return float(np.max(np.abs(s)))

    def converged(res):
        return (np.max(np.abs(res[:n_p]), initial=0.0) <= NODE_TOL and
                np.max(np.abs(res[n_p:]), initial=0.0) <= PIPE_TOL)

    # initial guess: slack pressure everywhere, minimum-norm demand routing
    z = np.empty(n_p + n_m)
    z[:n_p] = p_scale
    incid = np.zeros((n_p, n_m))
    for i, n in enumerate(free_nodes):
        for j, e in enumerate(net.edges):
            if e.to_node == n.id:
                incid[i, j] += 1.0
            if e.from_node == n.id:
                incid[i, j] -= 1.0
    rhs0 = np.array([demands[n.id] for n in free_nodes])
    if n_m and n_p:
        z[n_p:] = np.linalg.lstsq(incid, rhs0, rcond=None)[0]
    else:
        z[n_p:] = 0.0

    res = residual(z)
    for iteration in range(MAX_NEWTON_ITERS):
        if converged(res):
            break
        jac = np.empty((n_p + n_m, n_p + n_m))
        for k in range(n_p + n_m):
            typ = p_scale if k < n_p else max(1.0, abs(z[k]))
            h = 1e-7 * typ
            zp = z.copy()
            zp[k] += h
            jac[:, k] = (residual(zp) - res) / h
        try:
            dz = np.linalg.lstsq(jac, -res, rcond=None)[0]
        except np.linalg.LinAlgError:
            raise SteadyStateError("singular Jacobian in steady solve")
        base = scaled_norm(res)
        lam = 1.0
        for _ in range(14):
            trial = z + lam * dz
            trial_res = residual(trial)
            if scaled_norm(trial_res) < base or converged(trial_res):
                z, res = trial, trial_res
                break
            lam *= 0.5
        else:
            raise SteadyStateError(
                f"steady Newton stalled at iteration {iteration}; "
                f"worst node residual {np.max(np.abs(res[:n_p]), initial=0):.3e} kg/s")
    else:
        raise SteadyStateError(
            f"steady Newton did not converge in {MAX_NEWTON_ITERS} iterations; "
            f"worst node residual {np.max(np.abs(res[:n_p]), initial=0):.3e} kg/s")

    node_pressures = {n.id: node_pressure(z, n.id) for n in net.nodes}
    if any(p <= PRESSURE_FLOOR for p in node_pressures.values()):
        raise SteadyStateError("steady state has non-positive nodal pressure")
    flows = {e.id: float(z[n_p + j]) for j, e in enumerate(net.edges)}
    profiles, ends = {}, {}
    for e in net.edges:
        p_in = alpha_in[e.id] * node_pressures[e.from_node]
        p_out, prof = integrate_pipe_pressure(net.eos, e.geometry, p_in,
                                              flows[e.id], dense=True)
        if prof is None or p_out <= PRESSURE_FLOOR:
            raise SteadyStateError(f"pipe {e.id} drains below the pressure "
                                   f"floor in steady state")
        profiles[e.id] = prof
        ends[e.id] = (p_in, p_out)
    return SteadySolution(node_pressures=node_pressures, pipe_flows=flows,
                          pipe_end_pressures=ends, profiles=profiles)
