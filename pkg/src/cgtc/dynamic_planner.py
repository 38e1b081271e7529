"""Moving-obstacle encounters: speed bounds, virtual obstacle, two-stage plan.

The maintain-heading analysis projects both tracks to their intersection M
and bounds the obstacle speed from below and above: slow enough that it is
still clear of M when own ship crosses, or fast enough that it has cleared
M before own ship arrives. Between the bounds, a steering command is due:
a static virtual obstacle of minimal radius is placed at M such that
bypassing it tangentially keeps the separation at the critical instant at
least the sum of the two domain radii. Stage 1 bypasses the virtual disc;
once it is bypassed the plan drops it and drives to the destination
(stage 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Optional

from .cells import CellSet, build_cell_set, transform_cell
from .errors import (
    DestinationInsideObstacle,
    LengthMismatch,
    NoFeasibleRadius,
    NoForwardIntersection,
    ParallelCourses,
    StartInsideObstacle,
    ValidationError,
)
from .grid import CompassAngle, GridNode, compass_bearing
from .ship import ShipState
from .static_planner import (
    STEERING_THRESHOLD_DEG,
    Engagement,
    HeadingDecision,
    Obstacle,
    PlanResult,
    advance_pose,
    clearance,
    decide_heading,
    is_bypassed,
    pick_cell_index,
)

if TYPE_CHECKING:
    from .scenario import Scenario

Point = tuple[float, float]

_PARALLEL_EPS = 1e-12


class EncounterClass(Enum):
    MAINTAIN_OWN_FIRST = "maintain_own_first"
    MAINTAIN_OBSTACLE_FIRST = "maintain_obstacle_first"
    MUST_STEER = "must_steer"


@dataclass(frozen=True)
class Encounter:
    """Snapshot of a crossing geometry for the maintain-heading analysis."""

    own_pose: GridNode
    own_speed_mps: float
    obstacle: Obstacle
    meeting_point: Point
    l_s_m: float  # own run to the meeting point
    l_o_m: float  # obstacle run to the meeting point
    t_s: float    # own transit time l_s / V_s
    R_m: float    # own domain (= circle grid) radius
    R_o_m: float  # obstacle domain radius


@dataclass(frozen=True)
class Classification:
    kind: EncounterClass
    v_lo_mps: float
    v_hi_mps: float
    degenerate: bool = False


@dataclass(frozen=True)
class VirtualObstacle:
    """Static stand-in for a moving obstacle at the meeting point.

    radius_m is the minimal feasible disc radius solved from the
    critical-instant separation constraint. avoid_radius_m is the disc the
    planner actually bypasses: the constraint models the own center running
    a full domain radius outside the tangent point, so the disc whose
    tangent line is that modeled run is wider than radius_m by exactly that
    offset.
    """

    center: Point
    radius_m: float
    avoid_radius_m: float = 0.0

    def as_obstacle(self) -> Obstacle:
        return Obstacle(center=self.center,
                        radius_m=self.avoid_radius_m or self.radius_m)


def heading_intersection(own: GridNode, obstacle: Obstacle) -> Point:
    """Forward intersection M of the own-heading ray and the obstacle course ray."""
    hc = math.radians(own.heading.degrees)
    ho = math.radians(obstacle.course_deg)
    dcx, dcy = math.sin(hc), math.cos(hc)
    dox, doy = math.sin(ho), math.cos(ho)
    cross = dcx * doy - dcy * dox
    if abs(cross) < _PARALLEL_EPS:
        raise ParallelCourses(
            f"own heading {own.heading.degrees:.2f} parallel to course {obstacle.course_deg:.2f}"
        )
    rx = obstacle.center[0] - own.position[0]
    ry = obstacle.center[1] - own.position[1]
    t_own = (rx * doy - ry * dox) / cross
    t_obs = (rx * dcy - ry * dcx) / cross
    if t_own < 0.0 or t_obs < 0.0:
        raise NoForwardIntersection(
            f"tracks meet behind one vessel (own run {t_own:.1f} m, obstacle run {t_obs:.1f} m)"
        )
    return (own.position[0] + t_own * dcx, own.position[1] + t_own * dcy)


def make_encounter(own: GridNode, own_speed_mps: float, obstacle: Obstacle,
                   own_radius_m: float, obstacle_radius_m: float) -> Encounter:
    """Build the encounter snapshot; raises when the tracks do not cross forward."""
    m = heading_intersection(own, obstacle)
    l_s = math.dist(own.position, m)
    l_o = math.dist(obstacle.center, m)
    return Encounter(
        own_pose=own,
        own_speed_mps=own_speed_mps,
        obstacle=obstacle,
        meeting_point=m,
        l_s_m=l_s,
        l_o_m=l_o,
        t_s=l_s / own_speed_mps,
        R_m=own_radius_m,
        R_o_m=obstacle_radius_m,
    )


def classify_encounter(enc: Encounter) -> Classification:
    """Maintain-heading speed bounds for the obstacle.

    v_lo: obstacle slow enough to still be a domain-sum short of M when own
    ship crosses it. v_hi: obstacle fast enough to have cleared M by a
    domain-sum of own-ship run. Degenerate geometries (meeting point inside
    a domain-sum of either vessel) force MUST_STEER with a flag instead of
    raising.
    """
    sep = enc.R_m + enc.R_o_m
    cm = enc.l_s_m
    om = enc.l_o_m
    v_s = enc.own_speed_mps
    if cm <= sep or om <= sep:
        return Classification(EncounterClass.MUST_STEER, 0.0, math.inf, degenerate=True)
    v_lo = v_s * (om - sep) / cm
    v_hi = v_s * om / (cm - sep)
    v_o = enc.obstacle.speed_mps
    if v_o <= v_lo:
        kind = EncounterClass.MAINTAIN_OWN_FIRST
    elif v_o >= v_hi:
        kind = EncounterClass.MAINTAIN_OBSTACLE_FIRST
    else:
        kind = EncounterClass.MUST_STEER
    return Classification(kind, v_lo, v_hi)


def separation_at_critical(enc: Encounter, virtual_radius_m: float) -> float:
    """Separation between the advanced obstacle and own ship at the critical
    instant of a tangential bypass of a virtual disc of the given radius.

    Own ship runs l_s to the point where its domain circle is tangent to the
    virtual disc at M; the obstacle runs its own course for the same transit
    time. Positive return values above zero mean the domain-sum constraint
    holds with that margin.
    """
    c = enc.own_pose.position
    m = enc.meeting_point
    cm = math.dist(c, m)
    l_s_sq = cm * cm - virtual_radius_m * virtual_radius_m + enc.R_m * enc.R_m
    if l_s_sq <= 0.0 or virtual_radius_m > cm:
        return -math.inf
    l_s = math.sqrt(l_s_sq)
    if enc.R_m > l_s:
        return -math.inf
    ang = (compass_bearing(c, m).degrees
           + math.degrees(math.asin(virtual_radius_m / cm))
           + math.degrees(math.asin(enc.R_m / l_s)))
    a = math.radians(ang)
    cx = (c[0] + l_s * math.sin(a), c[1] + l_s * math.cos(a))

    t = l_s / enc.own_speed_mps
    l_o = enc.obstacle.speed_mps * t
    ho = math.radians(enc.obstacle.course_deg)
    ox = (enc.obstacle.center[0] + l_o * math.sin(ho),
          enc.obstacle.center[1] + l_o * math.cos(ho))
    return math.dist(ox, cx) - (enc.R_m + enc.R_o_m)


def virtual_obstacle_radius(enc: Encounter, tol_m: float = 0.1) -> VirtualObstacle:
    """Minimal virtual-disc radius making the critical-instant separation hold.

    Brackets the smallest sign change of the separation margin over
    (0, |CM|) with a coarse scan, then bisects to tol_m. At the returned
    radius the constraint is active (margin within a meter of zero).
    """
    c = enc.own_pose.position
    cm = math.dist(c, enc.meeting_point)
    if separation_at_critical(enc, 0.0) >= 0.0:
        # no disc needed: the tangency construction alone clears the obstacle
        return _with_avoid_radius(enc, cm, tol_m)

    n = 512
    lo = 0.0
    hi = None
    for i in range(1, n + 1):
        rx = cm * i / n
        if separation_at_critical(enc, rx) >= 0.0:
            hi = rx
            lo = cm * (i - 1) / n
            break
    if hi is None:
        raise NoFeasibleRadius(
            f"no virtual radius below |CM|={cm:.0f} m resolves the encounter"
        )
    while hi - lo > tol_m:
        mid = 0.5 * (lo + hi)
        if separation_at_critical(enc, mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    return _with_avoid_radius(enc, cm, hi)


def _with_avoid_radius(enc: Encounter, cm: float, r_x: float) -> VirtualObstacle:
    """Attach the planner-facing disc radius to a solved virtual obstacle.

    The modeled bypass run is tangent to nothing of radius r_x: it passes
    the tangent point a domain radius wide. The disc whose tangent line
    from the current position equals that run has radius
    cm * sin(asin(r_x/cm) + asin(R/l_s)).
    """
    l_s = math.sqrt(max(cm * cm - r_x * r_x + enc.R_m * enc.R_m, enc.R_m * enc.R_m))
    ang = math.asin(min(1.0, r_x / cm)) + math.asin(min(1.0, enc.R_m / l_s))
    avoid = min(cm * math.sin(min(ang, 0.5 * math.pi)), 0.99 * cm)
    return VirtualObstacle(center=enc.meeting_point, radius_m=r_x,
                           avoid_radius_m=avoid)


def min_separation(own_traj: list[ShipState],
                   obstacle_track: list[Point]) -> tuple[list[float], float]:
    """Pointwise own/obstacle distances over a common time base."""
    if len(own_traj) != len(obstacle_track):
        raise LengthMismatch(
            f"{len(own_traj)} own samples vs {len(obstacle_track)} obstacle samples"
        )
    series = [math.dist((s.x_m, s.y_m), p) for s, p in zip(own_traj, obstacle_track)]
    return series, min(series)


def plan_dynamic(scenario: "Scenario", cells: Optional[CellSet] = None) -> PlanResult:
    """Two-stage dynamic plan around one constant-velocity moving obstacle.

    A Maintain classification keeps heading decisions purely destination
    driven for the whole run (the speed bounds are a whole-track guarantee
    while courses hold). MustSteer pins a virtual static obstacle at the
    track intersection; stage 1 bypasses it through the static tangency
    strategy and stage 2 starts once it reports bypassed, dropping it for
    good and driving home. Static obstacles participate in every decision
    throughout, and the separation to the moving obstacle is recorded at
    every trajectory sample.
    """
    movers = [o for o in scenario.obstacles if o.moving]
    if len(movers) != 1:
        raise ValidationError(
            f"dynamic planning needs exactly one moving obstacle, got {len(movers)}"
        )
    mover = movers[0]
    statics = [o for o in scenario.obstacles if not o.moving]

    start_xy = (scenario.start_x_m, scenario.start_y_m)
    dest = (scenario.dest_x_m, scenario.dest_y_m)
    for o in statics:
        if math.dist(start_xy, o.center) <= o.radius_m:
            raise StartInsideObstacle(f"start {start_xy} inside obstacle at {o.center}")
        if math.dist(dest, o.center) <= o.radius_m:
            raise DestinationInsideObstacle(f"destination {dest} inside obstacle at {o.center}")

    if cells is None:
        cells = build_cell_set(scenario.ship, scenario.radius_m,
                               scenario.cell_resolution_deg, dt=scenario.dt_s)
    reach_tol = scenario.reach_tolerance_m
    v_s = scenario.ship.steady_speed_mps
    r_own = scenario.radius_m
    r_obs = mover.radius_m

    pose = GridNode(position=start_xy, heading=CompassAngle(scenario.start_heading_deg))
    nodes = [pose]
    trajectory: list[ShipState] = []
    times: list[float] = []
    commands: list[float] = []
    changes: list[float] = []
    separation: list[float] = []
    t = 0.0
    reached = False
    virtual: Optional[VirtualObstacle] = None
    virtual_done = False
    force_starboard = False
    engagement = Engagement()
    last_classified_heading: Optional[float] = None

    for _ in range(scenario.max_steps):
        if math.dist(pose.position, dest) < reach_tol:
            reached = True
            break

        obstacle_now = Obstacle(center=mover.position_at(t), radius_m=mover.radius_m,
                                speed_mps=mover.speed_mps, course_deg=mover.course_deg)
        force_starboard = False
        if not virtual_done and virtual is None:
            # The maintain-heading bounds are a whole-track guarantee under
            # constant courses, so they are re-derived only when the own
            # heading has changed since last evaluated. Once MustSteer fires,
            # the virtual disc stays fixed at that meeting point (a virtual
            # placed on an already-turned heading ray would clear its own
            # tangent cone immediately) and is dropped only via bypass.
            if last_classified_heading is None or pose.heading.degrees != last_classified_heading:
                try:
                    enc = make_encounter(pose, v_s, obstacle_now, r_own, r_obs)
                    cls = classify_encounter(enc)
                    if cls.kind is EncounterClass.MUST_STEER:
                        try:
                            virtual = virtual_obstacle_radius(enc)
                        except NoFeasibleRadius:
                            force_starboard = True
                except (ParallelCourses, NoForwardIntersection):
                    pass  # diverging tracks: no crossing risk from here
                last_classified_heading = pose.heading.degrees
        if virtual is not None and is_bypassed(pose, virtual.as_obstacle(), dest):
            virtual = None
            virtual_done = True

        tracked = list(enumerate(statics))
        if virtual is not None:
            tracked.append(("virtual", virtual.as_obstacle()))
        if force_starboard:
            decision = HeadingDecision(
                target_bearing_deg=pose.heading.plus(cells.max_heading_change_deg).degrees,
                heading_change_deg=cells.max_heading_change_deg,
                two_step=True, avoid_side=+1,
            )
        else:
            decision = decide_heading(pose, dest, tracked, cells, engagement)
        idx = pick_cell_index(decision, cells)
        cell = cells.cells[idx]
        commands.append(cells.command_for(decision.heading_change_deg))
        changes.append(cell.heading_change_deg)

        world = transform_cell(cell, pose.position[0], pose.position[1],
                               pose.heading.degrees)
        offsets = cell.sample_times_s
        if trajectory:
            new_samples = world[1:]
            new_times = [t + dt_off for dt_off in offsets[1:]]
        else:
            new_samples = world
            new_times = list(offsets)
        trajectory.extend(new_samples)
        times.extend(new_times)
        separation.extend(
            math.dist((s.x_m, s.y_m), mover.position_at(tt))
            for s, tt in zip(new_samples, new_times)
        )
        t += cell.duration_s
        pose = advance_pose(pose, cell, idx)
        nodes.append(pose)
    else:
        reached = math.dist(pose.position, dest) < reach_tol

    path_length = 0.0
    for a, b in zip(trajectory, trajectory[1:]):
        path_length += math.hypot(b.x_m - a.x_m, b.y_m - a.y_m)

    min_clear = None
    if statics:
        min_clear = min(clearance((s.x_m, s.y_m), statics) for s in trajectory)

    return PlanResult(
        nodes=nodes,
        trajectory=trajectory,
        sample_times_s=times,
        rudder_commands=commands,
        heading_changes_deg=changes,
        path_length_m=path_length,
        steering_count=sum(1 for cmd in commands if abs(cmd) >= STEERING_THRESHOLD_DEG),
        reached=reached,
        min_clearance_m=min_clear,
        separation_m=separation,
        min_separation_m=min(separation) if separation else None,
    )
