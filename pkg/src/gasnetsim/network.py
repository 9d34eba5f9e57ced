"""Metric-graph assembly of pipes and the three-phase network time step.

Each directed edge carries its own staggered grid and state; nodes couple
the adjoining pipe ends through a shared nodal pressure and optional
compressor boost ratios.  Flow from a pipe's from-node toward its to-node
is positive.

A network step runs three global phases: interior flux updates on every
pipe, nodal solves assigning every boundary-face flux, then density updates
on every pipe.  Per-node sums always run in fixed incidence order, so
results are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import pipe as pipe_ops
from .errors import CflViolationError, InfeasibleNodeError, SimulationError
from .pipe import LEFT, RIGHT, PipeGeometry, PipeGrid, PipeState
from .profiles import Constant, TimeProfile

UNIT_RATIO = Constant(1.0)


@dataclass
class SlackBC:
    """Prescribed nodal pressure; network injection there is free."""

    pressure: TimeProfile


@dataclass
class DemandBC:
    """Prescribed mass-flow withdrawal (kg/s, positive out of the network)."""

    withdrawal: TimeProfile


@dataclass
class Node:
    id: str
    bc: SlackBC | DemandBC

    @property
    def is_slack(self) -> bool:
        return isinstance(self.bc, SlackBC)


@dataclass
class PipeEdge:
    id: str
    from_node: str
    to_node: str
    geometry: PipeGeometry
    grid: PipeGrid
    state: PipeState | None = None
    inlet_ratio: TimeProfile | None = None    # compressor node -> pipe inlet
    outlet_ratio: TimeProfile | None = None   # compressor node -> pipe outlet


@dataclass
class _End:
    """One (edge, node) incidence with precomputed indexing."""

    edge: PipeEdge
    sgn: int            # +1: flow on this edge arrives at the node
    side: str           # which pipe end touches the node
    cell: int           # boundary cell index into rho
    face: int           # boundary face index into phi
    inner: int          # face adjacent to the boundary face
    x: float            # boundary cell-center coordinate
    ratio: TimeProfile = UNIT_RATIO

    @property
    def area(self) -> float:
        return self.edge.geometry.area

    @property
    def dx(self) -> float:
        return self.edge.grid.dx


class Network:
    """Validated pipe graph with one shared EoS model."""

    def __init__(self, nodes, edges, eos, time: float = 0.0):
        self.nodes = list(nodes)
        self.edges = list(edges)
        self.eos = eos
        self.time = time
        self.step_index = 0
        self._validate()
        self.incidence = {n.id: [] for n in self.nodes}
        for e in self.edges:
            xc = e.grid.cell_centers
            self.incidence[e.from_node].append(_End(
                edge=e, sgn=-1, side=LEFT, cell=0, face=0, inner=1,
                x=float(xc[0]), ratio=e.inlet_ratio or UNIT_RATIO))
            self.incidence[e.to_node].append(_End(
                edge=e, sgn=+1, side=RIGHT, cell=-1, face=-1, inner=-2,
                x=float(xc[-1]), ratio=e.outlet_ratio or UNIT_RATIO))
        self._dual_compressor_edges = [e for e in self.edges
                                       if e.inlet_ratio and e.outlet_ratio]

    def _validate(self):
        problems = []
        node_ids = [n.id for n in self.nodes]
        if len(set(node_ids)) != len(node_ids):
            problems.append("duplicate node ids")
        edge_ids = [e.id for e in self.edges]
        if len(set(edge_ids)) != len(edge_ids):
            problems.append("duplicate pipe ids")
        known = set(node_ids)
        for e in self.edges:
            if e.from_node not in known or e.to_node not in known:
                problems.append(f"pipe {e.id} references unknown node")
            if e.from_node == e.to_node:
                problems.append(f"pipe {e.id} is a self-loop")
        if not any(n.is_slack for n in self.nodes):
            problems.append("at least one slack (pressure) node is required")
        if self.nodes and self.edges and not problems:
            reach = {self.nodes[0].id}
            frontier = [self.nodes[0].id]
            adj = {n: set() for n in known}
            for e in self.edges:
                adj[e.from_node].add(e.to_node)
                adj[e.to_node].add(e.from_node)
            while frontier:
                nxt = adj[frontier.pop()] - reach
                reach |= nxt
                frontier.extend(nxt)
            if reach != known:
                problems.append("graph is not connected")
        if problems:
            raise ValueError("invalid network: " + "; ".join(problems))

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def edge(self, edge_id: str) -> PipeEdge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)

    def require_states(self):
        missing = [e.id for e in self.edges if e.state is None]
        if missing:
            raise SimulationError(f"pipes without initial state: {missing}")

    def total_mass(self) -> float:
        return sum(pipe_ops.total_mass(e.state, e.geometry, e.grid)
                   for e in self.edges)

    def boundary_inflow(self) -> float:
        """Net mass inflow rate summed pipe-locally, S (phi_0 - phi_N)."""
        return sum(pipe_ops.boundary_throughput(e.state, e.geometry)
                   for e in self.edges)

    def cfl_max_dt(self, safety: float = 1.0) -> float:
        return min(pipe_ops.cfl_max_dt(e.state, e.grid, self.eos, safety)
                   for e in self.edges)


def nodal_pressure_solve(weights, alphas, rho_ends, polys, q, inflow,
                         node_id: str = "?") -> float:
    """Nodal pressure from the discrete mass balance of the adjoining ends.

    Solves ``sum_k w_k rho_k(alpha_k p) = sum_k w_k rho_k^n - q + inflow``
    where ``w_k = S_k dx_k / dt``, ``inflow = sum_k sgn_k S_k phi_k-`` and
    each end's density map is the quadratic ``rho(p) = u p + v p**2``.
    """
    rhs = float(np.dot(weights, rho_ends)) - q + inflow
    if rhs < 0.0:
        raise InfeasibleNodeError(node_id, f"balance rhs {rhs:g} < 0")
    a = sum(w * v * al * al for w, al, (u, v) in zip(weights, alphas, polys))
    b = sum(w * u * al for w, al, (u, v) in zip(weights, alphas, polys))
    if b <= 0.0:
        raise InfeasibleNodeError(node_id, "degenerate density map")
    return 2.0 * rhs / (b + math.sqrt(b * b + 4.0 * a * rhs))


def nodal_pressure_solve_generic(weights, alphas, rho_ends, density_fns, q,
                                 inflow, p_scale: float,
                                 node_id: str = "?") -> float:
    """Bracketed root solve for EoS models without a quadratic density map.

    Requires each ``density_fns[k]`` to be strictly increasing.
    """
    rhs = float(np.dot(weights, rho_ends)) - q + inflow
    if rhs < 0.0:
        raise InfeasibleNodeError(node_id, f"balance rhs {rhs:g} < 0")

    def resid(p):
        return sum(w * fn(al * p) for w, al, fn
                   in zip(weights, alphas, density_fns)) - rhs

    lo, hi = 1.0, 10.0 * max(p_scale, 1.0)
    for _ in range(60):
        if resid(hi) >= 0.0:
            break
        hi *= 4.0
    else:
        raise InfeasibleNodeError(node_id, "no bracket for nodal pressure")
    if resid(lo) > 0.0:
        lo = 1e-6
        if resid(lo) > 0.0:
            raise InfeasibleNodeError(node_id, "no sign change in bracket")
    return brentq(resid, lo, hi, xtol=1e-9, rtol=8.9e-16, maxiter=200)


def flow_balance_residual(sgns, areas, phis, q: float) -> float:
    """Kirchhoff mass-balance residual sum_k sgn_k S_k phi_k - q in kg/s."""
    return float(np.dot(np.asarray(sgns, dtype=float),
                        np.asarray(areas, dtype=float) *
                        np.asarray(phis, dtype=float))) - q


def _solve_demand_node(net: Network, node: Node, ends, dt, t_half, t_next):
    """Phase-2 treatment of a withdrawal node; returns nodal pressure."""
    eos = net.eos
    q = node.bc.withdrawal(t_half)
    if len(ends) == 1:
        # dead-end pipe: the balance pins the boundary flux directly
        end = ends[0]
        end.edge.state.phi[end.face] = end.sgn * (q / end.area)
        return None
    weights = [end.area * end.dx / dt for end in ends]
    alphas = [end.ratio(t_next) for end in ends]
    rho_ends = [float(end.edge.state.rho[end.cell]) for end in ends]
    inflow = sum(end.sgn * end.area * float(end.edge.state.phi[end.inner])
                 for end in ends)
    if hasattr(eos, "density_poly"):
        polys = [eos.density_poly(end.x) for end in ends]
        p_l = nodal_pressure_solve(weights, alphas, rho_ends, polys, q,
                                   inflow, node.id)
        targets = [u * (al * p_l) + v * (al * p_l) ** 2
                   for al, (u, v) in zip(alphas, polys)]
    else:
        fns = [(lambda p, x=end.x: eos.density(p, x)) for end in ends]
        p_scale = max(eos.pressure(r, end.x) for r, end in zip(rho_ends, ends))
        p_l = nodal_pressure_solve_generic(weights, alphas, rho_ends, fns, q,
                                           inflow, p_scale, node.id)
        targets = [eos.density(al * p_l, end.x)
                   for al, end in zip(alphas, ends)]
    for end, rho_t in zip(ends, targets):
        pipe_ops.boundary_flux_from_density(end.edge.state, end.edge.grid,
                                            end.side, rho_t, dt)
    return p_l


def _apply_slack_node(net: Network, node: Node, ends, dt, t_next):
    p_l = node.bc.pressure(t_next)
    for end in ends:
        alpha = end.ratio(t_next)
        rho_t = net.eos.density(alpha * p_l, end.x)
        pipe_ops.boundary_flux_from_density(end.edge.state, end.edge.grid,
                                            end.side, rho_t, dt)
    return p_l


def network_step(net: Network, dt: float) -> dict:
    """Advance the whole network one step; returns per-node records.

    Each record is ``(pressure, net_inflow)`` where ``net_inflow`` is
    ``sum_k sgn_k S_k phi_k`` over the node's pipe ends: the withdrawal at
    demand nodes and the implied (negative of injection) at slack nodes.
    """
    net.require_states()
    t_half = net.time + 0.5 * dt
    t_next = net.time + dt

    for e in net._dual_compressor_edges:
        if e.inlet_ratio(t_next) > 1.0 + 1e-12 and \
                e.outlet_ratio(t_next) > 1.0 + 1e-12:
            raise SimulationError(
                f"compressors at both ends of pipe {e.id} active at t={t_next}")

    for e in net.edges:
        pipe_ops.interior_flux_update(e.state, e.geometry, e.grid, net.eos,
                                      dt, e.id)

    records = {}
    for node in net.nodes:
        ends = net.incidence[node.id]
        if node.is_slack:
            p_l = _apply_slack_node(net, node, ends, dt, t_next)
        else:
            p_l = _solve_demand_node(net, node, ends, dt, t_half, t_next)
        netflow = sum(end.sgn * end.area * float(end.edge.state.phi[end.face])
                      for end in ends)
        records[node.id] = [p_l, netflow]

    for e in net.edges:
        pipe_ops.density_update(e.state, e.grid, dt, e.id)
    net.time = t_next
    net.step_index += 1

    # dead-end demand nodes have no solved pressure; report the boundary
    # cell pressure pulled back through the local boost ratio
    for node in net.nodes:
        rec = records[node.id]
        if rec[0] is None:
            end = net.incidence[node.id][0]
            p_b = net.eos.pressure(float(end.edge.state.rho[end.cell]), end.x)
            rec[0] = p_b / end.ratio(t_next)
    return {k: tuple(v) for k, v in records.items()}


def check_network_cfl(net: Network, dt: float, safety: float = 1.0) -> None:
    net.require_states()
    dt_max = net.cfl_max_dt(safety)
    if dt > dt_max:
        raise CflViolationError(dt, dt_max, "network")


def grid_for_length(length: float, dx_target: float) -> PipeGrid:
    """Grid matching the pipe length exactly with spacing near dx_target."""
    n = max(2, round(length / dx_target))
    return PipeGrid(length=length, n_cells=n)
