"""Deterministic 3-DOF (surge, sway, yaw) maneuvering model.

The model is a response-type surrogate: first-order yaw response to rudder
with port/starboard asymmetry, rudder-induced speed loss, and an adverse
sway transient at steering onset (the "kick"). It is control-oriented, not
a hydrodynamic prediction tool; its free parameters live in ShipParams and
can be overridden from scenario files by users with identified coefficients.

Frames and units: world x east, world y north, heading in compass degrees
(0 = north, clockwise positive), rudder positive to starboard, body u
forward and v to starboard in m/s, yaw rate in deg/s. Integration is
fixed-step explicit Euler; the dynamics are non-stiff by construction.

All functions are pure: they never mutate their inputs and are safe to call
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import NonPositiveDt
from .grid import wrap_degrees


@dataclass(frozen=True)
class ShipParams:
    """Hull, rudder, and response-model parameters of the vehicle.

    turn_gain is the steady yaw rate per degree of starboard rudder (1/s);
    port turns divide it by asymmetry_factor, so the port turning radius is
    never smaller than starboard. kick_gain scales the adverse sway
    transient driven by the rudder's rate of change. speed_loss_gain is the
    fraction of steady speed lost at full starboard rudder.
    """

    length_m: float = 63.6
    beam_m: float = 16.4
    draft_m: float = 6.22
    steady_speed_mps: float = 7.7
    rudder_limit_port_deg: float = -35.0
    rudder_limit_stbd_deg: float = 35.0
    rudder_rate_degps: float = 3.0
    propeller_rpm: float = 180.0  # recorded, inert: speed is held by the governor
    turn_gain: float = 0.126
    turn_lag_s: float = 4.0
    asymmetry_factor: float = 1.13
    kick_gain: float = 0.1
    speed_loss_gain: float = 0.05
    speed_recovery_s: float = 4.0

    def __post_init__(self):
        if not (self.rudder_limit_port_deg < 0.0 < self.rudder_limit_stbd_deg):
            raise ValueError("rudder limits must straddle zero (port < 0 < starboard)")
        if self.steady_speed_mps <= 0:
            raise ValueError("steady_speed_mps must be positive")
        if self.turn_lag_s <= 0 or self.speed_recovery_s <= 0:
            raise ValueError("time constants must be positive")
        if self.asymmetry_factor < 1.0:
            raise ValueError("asymmetry_factor must be >= 1")
        if self.kick_gain < 0.0:
            raise ValueError("kick_gain must be >= 0")
        if not (0.0 <= self.speed_loss_gain < 1.0):
            raise ValueError("speed_loss_gain must be in [0, 1)")


@dataclass(frozen=True)
class ShipState:
    """Planar pose, body velocities, yaw rate, and actual rudder angle."""

    x_m: float = 0.0
    y_m: float = 0.0
    heading_deg: float = 0.0
    u_mps: float = 0.0
    v_mps: float = 0.0
    yaw_rate_degps: float = 0.0
    rudder_deg: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "heading_deg", wrap_degrees(self.heading_deg))


def trimmed_state(params: ShipParams, x_m: float = 0.0, y_m: float = 0.0,
                  heading_deg: float = 0.0) -> ShipState:
    """Steady straight-ahead state: u at trim speed, everything else zero."""
    return ShipState(x_m=x_m, y_m=y_m, heading_deg=heading_deg,
                     u_mps=params.steady_speed_mps)


def trim_steady_speed(params: ShipParams) -> float:
    """Straight-running equilibrium speed u0.

    By construction of the surrogate the zero-rudder surge equation has its
    fixed point exactly at steady_speed_mps; stepping a trimmed state with
    zero rudder leaves u unchanged bit-for-bit.
    """
    return params.steady_speed_mps


def clamp_rudder(params: ShipParams, rudder_command_deg: float) -> tuple[float, bool]:
    """Clamp a rudder command to the actuator limits.

    Returns (clamped_command, was_clamped). Planners must never exceed the
    limits by contract, so a True flag indicates a caller bug upstream; the
    dynamics still accept it gracefully.
    """
    lo, hi = params.rudder_limit_port_deg, params.rudder_limit_stbd_deg
    if rudder_command_deg < lo:
        return lo, True
    if rudder_command_deg > hi:
        return hi, True
    return rudder_command_deg, False


def step(state: ShipState, params: ShipParams, rudder_command_deg: float,
         dt: float) -> ShipState:
    """Advance the state by one Euler step of dt seconds.

    The actual rudder tracks the (clamped) command at no more than
    rudder_rate_degps. Yaw rate relaxes toward turn_gain * rudder (divided
    by asymmetry_factor on port rudder) with time constant turn_lag_s; u
    relaxes toward the speed-loss target with time constant
    speed_recovery_s; v decays with the yaw lag while receiving the adverse
    kick forcing; position integrates the world-frame velocity of the old
    state.
    """
    if dt <= 0:
        raise NonPositiveDt(f"dt must be > 0, got {dt}")
    cmd, _ = clamp_rudder(params, rudder_command_deg)

    # rate-limited rudder tracking; delta_move is the exact travel this step
    max_travel = params.rudder_rate_degps * dt
    delta_move = cmd - state.rudder_deg
    if delta_move > max_travel:
        delta_move = max_travel
    elif delta_move < -max_travel:
        delta_move = -max_travel
    rudder_new = state.rudder_deg + delta_move

    if rudder_new >= 0.0:
        yaw_rate_target = params.turn_gain * rudder_new
    else:
        yaw_rate_target = params.turn_gain * rudder_new / params.asymmetry_factor
    u_target = params.steady_speed_mps * (
        1.0 - params.speed_loss_gain * abs(rudder_new) / params.rudder_limit_stbd_deg
    )
    kick_coeff = params.kick_gain * params.steady_speed_mps / params.rudder_limit_stbd_deg

    h = math.radians(state.heading_deg)
    sh, ch = math.sin(h), math.cos(h)
    x_new = state.x_m + dt * (state.u_mps * sh + state.v_mps * ch)
    y_new = state.y_m + dt * (state.u_mps * ch - state.v_mps * sh)
    heading_new = state.heading_deg + dt * state.yaw_rate_degps

    u_new = state.u_mps + dt * (u_target - state.u_mps) / params.speed_recovery_s
    v_new = state.v_mps - dt * state.v_mps / params.turn_lag_s - kick_coeff * delta_move
    yaw_new = state.yaw_rate_degps + dt * (yaw_rate_target - state.yaw_rate_degps) / params.turn_lag_s

    return ShipState(x_m=x_new, y_m=y_new, heading_deg=heading_new,
                     u_mps=u_new, v_mps=v_new, yaw_rate_degps=yaw_new,
                     rudder_deg=rudder_new)


def simulate_turn(params: ShipParams, rudder_deg: float, duration_s: float,
                  dt: float) -> list[ShipState]:
    """Turning-circle run: constant rudder command from the trimmed state.

    Returns the sampled trajectory including the initial state. The caller
    chooses a duration long enough for at least one full circle when a
    steady-radius fit is wanted.
    """
    if dt <= 0:
        raise NonPositiveDt(f"dt must be > 0, got {dt}")
    states = [trimmed_state(params)]
    n = int(round(duration_s / dt))
    for _ in range(n):
        states.append(step(states[-1], params, rudder_deg, dt))
    return states


def steady_turn_radius(params: ShipParams, rudder_deg: float) -> float:
    """Analytic steady turning radius u_ss / omega_ss for a held rudder."""
    cmd, _ = clamp_rudder(params, rudder_deg)
    if cmd == 0.0:
        return math.inf
    if cmd >= 0.0:
        omega = params.turn_gain * cmd
    else:
        omega = params.turn_gain * cmd / params.asymmetry_factor
    u_ss = params.steady_speed_mps * (
        1.0 - params.speed_loss_gain * abs(cmd) / params.rudder_limit_stbd_deg
    )
    return abs(u_ss / math.radians(omega))


def with_overrides(params: ShipParams, **kwargs) -> ShipParams:
    """Copy params with selected fields replaced (scenario-file overrides)."""
    return replace(params, **kwargs)


def fitted_turn_radius(states: list[ShipState]) -> float:
    """Steady turning radius fitted from the last full loop of a turn run.

    Walks back from the end until a full 360 degrees of heading change is
    covered, then averages the x and y extents of that loop. The run must
    contain at least one settled full circle.
    """
    from .grid import signed_degrees

    total = 0.0
    start = 0
    for i in range(len(states) - 1, 0, -1):
        total += abs(signed_degrees(states[i].heading_deg - states[i - 1].heading_deg))
        if total >= 360.0:
            start = i - 1
            break
    else:
        raise ValueError("run too short: no full circle in the trajectory")
    xs = [s.x_m for s in states[start:]]
    ys = [s.y_m for s in states[start:]]
    return 0.25 * ((max(xs) - min(xs)) + (max(ys) - min(ys)))
