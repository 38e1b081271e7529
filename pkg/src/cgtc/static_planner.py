"""Heading selection and path construction amid static disc obstacles.

Free water: head straight for the destination, in one step when the bearing
is within the cell family's maximum heading change, otherwise turn the
maximum first and re-evaluate. Obstacle waters: aim at the tangent point of
the blocking obstacle whose bearing costs the smaller deviation from the
destination bearing, re-evaluating from every new node so the tangency
error shrinks as the obstacle is tracked (the continuous-tracking loop).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

from .cells import CellSet, TrajectoryCell, build_cell_set, transform_cell
from .errors import (
    DestinationInsideObstacle,
    InsideObstacle,
    StartInsideObstacle,
)
from .grid import CompassAngle, GridNode, compass_bearing, rotate_offset
from .ship import ShipState

if TYPE_CHECKING:
    from .scenario import Scenario

Point = tuple[float, float]

# commands smaller than this are trim, not steering (keeps steering counts
# meaningful when late-plan corrections drop below a degree)
STEERING_THRESHOLD_DEG = 1.0


@dataclass(frozen=True)
class Obstacle:
    """Disc obstacle; radius is already inflated by any safety margin.

    course_deg is the compass course of motion and is ignored for static
    obstacles (speed_mps == 0).
    """

    center: Point
    radius_m: float
    speed_mps: float = 0.0
    course_deg: float = 0.0

    def __post_init__(self):
        if self.radius_m <= 0:
            raise ValueError("obstacle radius must be positive")
        if self.speed_mps < 0:
            raise ValueError("obstacle speed must be non-negative")

    @property
    def moving(self) -> bool:
        return self.speed_mps > 0.0

    def position_at(self, t_s: float) -> Point:
        h = math.radians(self.course_deg)
        return (self.center[0] + self.speed_mps * t_s * math.sin(h),
                self.center[1] + self.speed_mps * t_s * math.cos(h))


@dataclass(frozen=True)
class HeadingDecision:
    """One search-loop decision: which bearing to pursue and how far to turn.

    heading_change_deg is already clamped to the cell family's maximum; when
    the full bearing difference exceeds it, two_step marks that the rest is
    left to re-evaluation from the next node. avoid_side is +1/-1 when the
    bearing is a starboard/port tangent (the executor then rounds the cell
    choice away from the obstacle), 0 for plain destination pursuit.
    """

    target_bearing_deg: float
    heading_change_deg: float
    two_step: bool
    avoid_side: int = 0


@dataclass
class PlanResult:
    nodes: list[GridNode]
    trajectory: list[ShipState]
    sample_times_s: list[float]
    rudder_commands: list[float]
    heading_changes_deg: list[float]
    path_length_m: float
    steering_count: int
    reached: bool
    min_clearance_m: Optional[float] = None
    separation_m: list[float] = field(default_factory=list)
    min_separation_m: Optional[float] = None


def tangent_angles(current: Point, obstacle: Obstacle) -> tuple[CompassAngle, CompassAngle]:
    """Bearings of the two tangent points of an obstacle disc, left first."""
    d = math.dist(current, obstacle.center)
    if d <= obstacle.radius_m:
        raise InsideObstacle(
            f"point {current} is inside obstacle at {obstacle.center} (r={obstacle.radius_m})"
        )
    center_bearing = compass_bearing(current, obstacle.center)
    half_deg = math.degrees(math.asin(obstacle.radius_m / d))
    return center_bearing.plus(-half_deg), center_bearing.plus(half_deg)


def is_bypassed(pose: GridNode, obstacle: Obstacle, destination: Point) -> bool:
    """True when the obstacle no longer needs to be tracked.

    Either the destination bearing clears the obstacle's tangent cone, or
    the obstacle center sits more than 90 degrees off the current heading
    (abeam or astern).
    """
    d = math.dist(pose.position, obstacle.center)
    if d <= obstacle.radius_m:
        return False
    center_bearing = compass_bearing(pose.position, obstacle.center)
    rel = abs(center_bearing.diff_from(pose.heading))
    if rel > 90.0:
        return True
    dest_bearing = compass_bearing(pose.position, destination)
    half_deg = math.degrees(math.asin(obstacle.radius_m / d))
    return abs(dest_bearing.diff_from(center_bearing)) >= half_deg


def select_heading_free(pose: GridNode, destination: Point,
                        cells: CellSet) -> HeadingDecision:
    """Free-water decision: aim at the destination, capped at the max turn."""
    bearing = compass_bearing(pose.position, destination)
    diff = bearing.diff_from(pose.heading)
    theta_m = cells.max_heading_change_deg
    if abs(diff) <= theta_m:
        return HeadingDecision(bearing.degrees, diff, two_step=False)
    capped = math.copysign(theta_m, diff)
    return HeadingDecision(bearing.degrees, capped, two_step=True)


def select_heading_static(pose: GridNode, destination: Point,
                          obstacles: list[Obstacle],
                          cells: CellSet,
                          committed_side: Optional[int] = None) -> HeadingDecision:
    """Decision among static obstacles via the extreme-tangency comparison.

    Collects the tangent bearings of every obstacle still blocking the
    destination bearing, takes the port-most and starboard-most of them,
    and pursues the one deviating less from the destination bearing (ties
    go starboard). Falls back to the free-water rule when nothing blocks.

    committed_side (+1 starboard / -1 port) skips the side comparison and
    pursues the blocking set's tangent envelope on that side; the plan loop
    passes it while an avoidance engagement is in progress so re-evaluation
    tracks one side instead of flip-flopping across the obstacle.
    """
    blocking = [o for o in obstacles if not is_bypassed(pose, o, destination)]
    if not blocking:
        return select_heading_free(pose, destination, cells)

    dest_bearing = compass_bearing(pose.position, destination)
    left_diffs = []
    right_diffs = []
    for obs in blocking:
        left, right = tangent_angles(pose.position, obs)
        left_diffs.append(left.diff_from(dest_bearing))
        right_diffs.append(right.diff_from(dest_bearing))

    if committed_side is None:
        port_most = min(left_diffs + right_diffs)
        stbd_most = max(left_diffs + right_diffs)
        # ties (within angle-arithmetic noise) break to starboard
        if abs(port_most) < abs(stbd_most) - 1e-9:
            chosen_diff, side = port_most, -1
        else:
            chosen_diff, side = stbd_most, +1
    elif committed_side > 0:
        chosen_diff, side = max(right_diffs), +1
    else:
        chosen_diff, side = min(left_diffs), -1

    bearing = dest_bearing.plus(chosen_diff)
    diff = bearing.diff_from(pose.heading)
    theta_m = cells.max_heading_change_deg
    if abs(diff) <= theta_m:
        return HeadingDecision(bearing.degrees, diff, two_step=False, avoid_side=side)
    capped = math.copysign(theta_m, diff)
    return HeadingDecision(bearing.degrees, capped, two_step=True, avoid_side=side)


@dataclass
class Engagement:
    """Avoidance-episode state for the continuous-tracking loop.

    The side chosen when obstacles first block is kept for as long as the
    blocking set stays connected to that episode (some obstacle of it is
    still blocking); a fresh episode re-runs the side comparison.
    """

    side: Optional[int] = None
    ids: frozenset = frozenset()


def decide_heading(pose: GridNode, destination: Point,
                   tracked: list[tuple[object, Obstacle]],
                   cells: CellSet, engagement: Engagement) -> HeadingDecision:
    """One planning decision with engagement bookkeeping.

    tracked pairs a stable identifier with each obstacle so an episode
    survives obstacles dropping out (and, for the dynamic planner, the
    virtual obstacle being refreshed under the same identifier).
    """
    blocking_ids = frozenset(
        oid for oid, o in tracked if not is_bypassed(pose, o, destination)
    )
    obstacles = [o for _, o in tracked]
    if not blocking_ids:
        engagement.side = None
        engagement.ids = frozenset()
        return select_heading_free(pose, destination, cells)
    if engagement.side is None or not (blocking_ids & engagement.ids):
        decision = select_heading_static(pose, destination, obstacles, cells)
        engagement.side = decision.avoid_side
    else:
        decision = select_heading_static(pose, destination, obstacles, cells,
                                         committed_side=engagement.side)
        # While tracking, only ever turn further away from the obstacle:
        # hold the heading when it already clears the committed-side tangent
        # (the re-aim commands decay to nothing as the path converges onto
        # the tangent line, instead of chasing the tangent back inward).
        if engagement.side > 0:
            held = max(0.0, decision.heading_change_deg)
        else:
            held = min(0.0, decision.heading_change_deg)
        if held != decision.heading_change_deg:
            decision = HeadingDecision(pose.heading.degrees, held,
                                       two_step=False, avoid_side=engagement.side)
    engagement.ids = blocking_ids
    return decision


def pick_cell_index(decision: HeadingDecision, cells: CellSet) -> int:
    """Cell to execute for a decision.

    Plain pursuit rounds to the nearest cell. A tangent-bearing decision
    rounds away from the obstacle instead, so quantization can never cut
    inside the tangent line (the no-entry guarantee survives the cell
    granularity).
    """
    res = cells.resolution_deg
    theta_m = cells.max_heading_change_deg
    x = max(-theta_m, min(theta_m, decision.heading_change_deg))
    if decision.avoid_side > 0:
        k = math.ceil(x / res - 1e-9)
    elif decision.avoid_side < 0:
        k = math.floor(x / res + 1e-9)
    else:
        k = round(x / res)
    half = int(round(theta_m / res))
    k = max(-half, min(half, k))
    return k + half


def advance_pose(pose: GridNode, cell: TrajectoryCell, cell_index: int) -> GridNode:
    """Child node reached by executing a cell from a pose."""
    off = rotate_offset(cell.end_offset, pose.heading.degrees)
    return GridNode(
        position=(pose.position[0] + off[0], pose.position[1] + off[1]),
        heading=pose.heading.plus(cell.heading_change_deg),
        parent=pose,
        cell_used=cell_index,
        depth=pose.depth + 1,
    )


def clearance(point: Point, obstacles: list[Obstacle]) -> float:
    """Distance from a point to the nearest obstacle boundary (signed)."""
    return min(math.dist(point, o.center) - o.radius_m for o in obstacles)


def plan_static(scenario: "Scenario", cells: Optional[CellSet] = None) -> PlanResult:
    """Continuous-tracking planning loop over static obstacles.

    Each iteration decides a heading, converts it to a rudder command via
    the cell relation, executes the nearest (safely rounded) cell, and
    re-evaluates from the new node. Terminates when within the reach
    tolerance of the destination, or with reached=False when the step
    budget runs out.
    """
    obstacles = scenario.obstacles
    start_xy = (scenario.start_x_m, scenario.start_y_m)
    dest = (scenario.dest_x_m, scenario.dest_y_m)
    for o in obstacles:
        if math.dist(start_xy, o.center) <= o.radius_m:
            raise StartInsideObstacle(f"start {start_xy} inside obstacle at {o.center}")
        if math.dist(dest, o.center) <= o.radius_m:
            raise DestinationInsideObstacle(f"destination {dest} inside obstacle at {o.center}")

    if cells is None:
        cells = build_cell_set(scenario.ship, scenario.radius_m,
                               scenario.cell_resolution_deg, dt=scenario.dt_s)
    reach_tol = scenario.reach_tolerance_m

    pose = GridNode(position=start_xy, heading=CompassAngle(scenario.start_heading_deg))
    nodes = [pose]
    trajectory: list[ShipState] = []
    times: list[float] = []
    commands: list[float] = []
    changes: list[float] = []
    t = 0.0
    reached = False
    engagement = Engagement()
    tracked = list(enumerate(obstacles))

    for _ in range(scenario.max_steps):
        if math.dist(pose.position, dest) < reach_tol:
            reached = True
            break
        decision = decide_heading(pose, dest, tracked, cells, engagement)
        idx = pick_cell_index(decision, cells)
        cell = cells.cells[idx]
        commands.append(cells.command_for(decision.heading_change_deg))
        changes.append(cell.heading_change_deg)

        world = transform_cell(cell, pose.position[0], pose.position[1],
                               pose.heading.degrees)
        offsets = cell.sample_times_s
        if trajectory:
            trajectory.extend(world[1:])
            times.extend(t + dt_off for dt_off in offsets[1:])
        else:
            trajectory.extend(world)
            times.extend(offsets)
        t += cell.duration_s
        pose = advance_pose(pose, cell, idx)
        nodes.append(pose)
    else:
        reached = math.dist(pose.position, dest) < reach_tol

    path_length = 0.0
    for a, b in zip(trajectory, trajectory[1:]):
        path_length += math.hypot(b.x_m - a.x_m, b.y_m - a.y_m)

    min_clear = None
    if obstacles:
        pts = [(s.x_m, s.y_m) for s in trajectory] or [start_xy]
        min_clear = min(clearance(pt, obstacles) for pt in pts)

    return PlanResult(
        nodes=nodes,
        trajectory=trajectory,
        sample_times_s=times,
        rudder_commands=commands,
        heading_changes_deg=changes,
        path_length_m=path_length,
        steering_count=sum(1 for c in commands if abs(c) >= STEERING_THRESHOLD_DEG),
        reached=reached,
        min_clearance_m=min_clear,
    )
