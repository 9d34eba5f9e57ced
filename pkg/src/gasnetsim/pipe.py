"""Single-pipe staggered-grid state and the explicit update substeps.

Densities live at cell centers on integer time layers, fluxes at cell faces
(including both pipe ends) on half-integer layers.  A completed step leaves
the stored flux trailing the stored density by half a step, so ``step``
performs, in order: the interior flux update, the boundary-face update from
the boundary conditions, and the density update.

Mass is conserved exactly: summing the density update over cells telescopes
the interior fluxes away, leaving only the boundary throughput.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CflViolationError, PositivityError, UnstableRunError

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class PipeGeometry:
    """Physical pipe parameters: length, diameter, Darcy friction factor."""

    length: float
    diameter: float
    friction: float

    def __post_init__(self):
        if self.length <= 0 or self.diameter <= 0 or self.friction < 0:
            raise ValueError("pipe length and diameter must be positive, "
                             "friction non-negative")

    @property
    def area(self) -> float:
        return np.pi * self.diameter ** 2 / 4.0

    @property
    def beta(self) -> float:
        """Friction coefficient lambda/(2 D) in 1/m."""
        return self.friction / (2.0 * self.diameter)


@dataclass(frozen=True)
class PipeGrid:
    """Uniform staggered grid: ``n_cells`` centers, ``n_cells + 1`` faces."""

    length: float
    n_cells: int

    def __post_init__(self):
        if self.n_cells < 2:
            raise ValueError("need at least 2 cells so an interior face exists")
        if self.length <= 0:
            raise ValueError("grid length must be positive")

    @property
    def dx(self) -> float:
        return self.length / self.n_cells

    @property
    def cell_centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def faces(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.dx


@dataclass
class PipeState:
    """Density per cell at time ``time``; flux per face half a step behind."""

    rho: np.ndarray
    phi: np.ndarray
    time: float = 0.0
    step_index: int = 0

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.phi = np.asarray(self.phi, dtype=float)
        if self.phi.shape != (self.rho.size + 1,):
            raise ValueError("phi must have one more entry than rho")
        if np.any(self.rho <= 0):
            raise ValueError("initial density must be positive everywhere")

    def copy(self) -> "PipeState":
        return PipeState(self.rho.copy(), self.phi.copy(), self.time,
                         self.step_index)


def uniform_state(grid: PipeGrid, rho: float, phi: float = 0.0) -> PipeState:
    return PipeState(np.full(grid.n_cells, float(rho)),
                     np.full(grid.n_cells + 1, float(phi)))


def friction_invert(y, a):
    """Solve ``x (1 + a |x|) = y`` for x (unique real root), a >= 0.

    Uses the rationalized root ``sign(y) 2|y| / (1 + sqrt(1 + 4 a |y|))``,
    which is exact at a = 0 and avoids cancellation for small ``a |y|``.
    """
    if np.any(np.asarray(a) < 0):
        raise ValueError("friction context a must be non-negative")
    y = np.asarray(y, dtype=float)
    ay = np.abs(y)
    out = np.sign(y) * 2.0 * ay / (1.0 + np.sqrt(1.0 + 4.0 * a * ay))
    return float(out) if out.ndim == 0 else out


def interior_flux_update(state: PipeState, geom: PipeGeometry, grid: PipeGrid,
                         eos, dt: float, pipe_id: str = "") -> None:
    """Advance the interior-face fluxes one step using current densities.

    Each face decouples: with ``a = beta dt / (rho_i + rho_{i+1})`` the new
    flux solves ``x (1 + a |x|) = phi - (dt/dx)(p_{i+1} - p_i) - a phi|phi|``.
    """
    p = eos.pressure(state.rho, grid.cell_centers)
    a = geom.beta * dt / (state.rho[:-1] + state.rho[1:])
    phi = state.phi[1:-1]
    with np.errstate(over="ignore", invalid="ignore"):
        y = phi - (dt / grid.dx) * (p[1:] - p[:-1]) - a * phi * np.abs(phi)
        new = friction_invert(y, a)
    if not np.all(np.isfinite(new)):
        face = int(np.flatnonzero(~np.isfinite(new))[0]) + 1
        raise UnstableRunError(state.step_index, face, pipe_id)
    state.phi[1:-1] = new


def boundary_flux_from_density(state: PipeState, grid: PipeGrid, side: str,
                               rho_target: float, dt: float) -> float:
    """Set a boundary-face flux so the next density update lands the
    boundary cell exactly on ``rho_target``.  Interior faces must already be
    at the new half layer."""
    r = grid.dx / dt
    if side == LEFT:
        state.phi[0] = state.phi[1] + r * (rho_target - state.rho[0])
        return state.phi[0]
    if side == RIGHT:
        state.phi[-1] = state.phi[-2] - r * (rho_target - state.rho[-1])
        return state.phi[-1]
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def density_update(state: PipeState, grid: PipeGrid, dt: float,
                   pipe_id: str = "") -> None:
    """Advance densities one step from the face fluxes; advances time."""
    state.rho -= (dt / grid.dx) * np.diff(state.phi)
    if not np.all(state.rho > 0):
        bad = state.rho <= 0
        if not np.all(np.isfinite(state.rho)):
            bad = bad | ~np.isfinite(state.rho)
        cell = int(np.flatnonzero(bad)[0])
        raise PositivityError(state.step_index + 1, cell, pipe_id)
    state.step_index += 1
    state.time += dt


def cfl_max_dt(state: PipeState, grid: PipeGrid, eos, safety: float = 1.0) -> float:
    """Largest stable step ``safety * dx / max sqrt(P'(rho))`` over the
    current density field (frozen-coefficient bound)."""
    if not 0.0 < safety <= 1.0:
        raise ValueError("cfl safety must be in (0, 1]")
    speed = np.sqrt(np.max(eos.wave_speed_sq(state.rho, grid.cell_centers)))
    return safety * grid.dx / speed


def total_mass(state: PipeState, geom: PipeGeometry, grid: PipeGrid) -> float:
    return geom.area * grid.dx * float(np.sum(state.rho))


def boundary_throughput(state: PipeState, geom: PipeGeometry) -> float:
    """Net mass inflow rate S (phi_0 - phi_N) for the current flux layer."""
    return geom.area * (state.phi[0] - state.phi[-1])


class FluxBC:
    """Prescribed boundary mass flux; assigned directly at the half layer."""

    def __init__(self, profile):
        self.profile = profile

    def apply(self, state, geom, grid, eos, side, dt):
        value = self.profile(state.time + 0.5 * dt)
        state.phi[0 if side == LEFT else -1] = value


class DensityBC:
    """Prescribed boundary density, imposed via the mass-conservation
    back-solve at the boundary cell."""

    def __init__(self, profile):
        self.profile = profile

    def target_density(self, state, grid, eos, side, dt):
        return self.profile(state.time + dt)

    def apply(self, state, geom, grid, eos, side, dt):
        rho_t = self.target_density(state, grid, eos, side, dt)
        boundary_flux_from_density(state, grid, side, rho_t, dt)


class PressureBC(DensityBC):
    """Prescribed boundary pressure; converted to density through the EoS
    at the boundary cell center."""

    def target_density(self, state, grid, eos, side, dt):
        x = grid.cell_centers[0 if side == LEFT else -1]
        return eos.density(self.profile(state.time + dt), x)


def step(state: PipeState, geom: PipeGeometry, grid: PipeGrid, eos,
         bc_left, bc_right, dt: float, pipe_id: str = "") -> PipeState:
    """One full explicit step: interior fluxes, boundary fluxes, densities."""
    interior_flux_update(state, geom, grid, eos, dt, pipe_id)
    bc_left.apply(state, geom, grid, eos, LEFT, dt)
    bc_right.apply(state, geom, grid, eos, RIGHT, dt)
    density_update(state, grid, dt, pipe_id)
    return state


def face_velocity(state: PipeState) -> np.ndarray:
    """Diagnostic gas velocity phi/rho at faces; interior faces average the
    two adjacent cell densities, boundary faces use the boundary cell."""
    rho_face = np.empty_like(state.phi)
    rho_face[1:-1] = 0.5 * (state.rho[:-1] + state.rho[1:])
    rho_face[0] = state.rho[0]
    rho_face[-1] = state.rho[-1]
    return state.phi / rho_face


def check_cfl(state: PipeState, grid: PipeGrid, eos, dt: float,
              safety: float = 1.0, where: str = "") -> None:
    dt_max = cfl_max_dt(state, grid, eos, safety)
    if dt > dt_max:
        raise CflViolationError(dt, dt_max, where)
