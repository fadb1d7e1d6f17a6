#!/usr/bin/env python3
"""Generate the Sc01..Sc13 scenario documents under data/scenarios/.

Layouts use right-hand traffic with 3.5 m lanes. The ego start is placed a
little more than 100 m before the first conflict and the goal just past the
last one; both are derived from the generated geometry.
"""

import argparse
import json
import math
from pathlib import Path

import numpy as np
from shapely.geometry import LineString

LANE = 3.5
HALF = LANE / 2
WIDTH = 1.8
SPEED = 13.89
SLOW = 8.33
APPROACH = 100.0
START_MARGIN = 1.0
UPSTREAM = 150.0
DOWNSTREAM = 100.0


class Turtle:
    def __init__(self, x, y, heading_deg):
        self.pts = [(x, y)]
        self.h = math.radians(heading_deg)

    @property
    def pos(self):
        return self.pts[-1]

    def line(self, length):
        x, y = self.pos
        self.pts.append((x + length * math.cos(self.h), y + length * math.sin(self.h)))
        return self

    def arc(self, radius, angle_deg):
        """Positive angles turn left."""
        total = math.radians(angle_deg)
        n = max(2, int(math.ceil(abs(total) * radius / 1.0)))
        sign = 1.0 if total > 0 else -1.0
        x0, y0 = self.pos
        cx = x0 - sign * radius * math.sin(self.h)
        cy = y0 + sign * radius * math.cos(self.h)
        start = self.h - sign * math.pi / 2
        for i in range(1, n + 1):
            a = start + total * i / n
            self.pts.append((cx + radius * math.cos(a), cy + radius * math.sin(a)))
        self.h += total
        return self


def straight(p0, p1):
    return [tuple(p0), tuple(p1)]


def fillet(points, radius):
    """Replace interior corners of a polyline by circular arcs."""
    pts = [np.asarray(p, float) for p in points]
    out = [tuple(pts[0])]
    for i in range(1, len(pts) - 1):
        a, b, c = pts[i - 1], pts[i], pts[i + 1]
        d0 = (b - a) / np.linalg.norm(b - a)
        d1 = (c - b) / np.linalg.norm(c - b)
        turn = math.atan2(d0[0] * d1[1] - d0[1] * d1[0], float(d0 @ d1))
        if abs(turn) < 1e-9:
            out.append(tuple(b))
            continue
        tangent = radius * math.tan(abs(turn) / 2)
        p_in = b - d0 * tangent
        out.append(tuple(p_in))
        t = Turtle(p_in[0], p_in[1], math.degrees(math.atan2(d0[1], d0[0])))
        t.arc(radius, math.degrees(turn))
        out.extend(t.pts[1:])
    out.append(tuple(pts[-1]))
    return out


def line_intersection(p, d, q, e):
    """Intersection of p + t d and q + u e."""
    m = np.array([[d[0], -e[0]], [d[1], -e[1]]], float)
    t, _ = np.linalg.solve(m, np.asarray(q, float) - np.asarray(p, float))
    return np.asarray(p, float) + t * np.asarray(d, float)


def rect(x0, y0, x1, y1):
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]


def corner_slots(cx, cy, half_ns, half_ew, heading_deg=90.0, setback=4.0, long=12.0, short=6.0):
    """Four corner rectangles around a junction centred at (cx, cy).

    half_ns is the half-width of the ego road, half_ew that of the crossing
    road. Sides are named from the point of view of a vehicle travelling along
    heading_deg (90 = north).
    """
    local = {
        ("left", -1): rect(-half_ns - setback - long, -half_ew - setback - short, -half_ns - setback, -half_ew - setback),
        ("left", 1): rect(-half_ns - setback - long, half_ew + setback, -half_ns - setback, half_ew + setback + short),
        ("right", -1): rect(half_ns + setback, -half_ew - setback - short, half_ns + setback + long, -half_ew - setback),
        ("right", 1): rect(half_ns + setback, half_ew + setback, half_ns + setback + long, half_ew + setback + short),
    }
    rot = math.radians(heading_deg - 90.0)
    c, s = math.cos(rot), math.sin(rot)
    slots = []
    for (side, _), verts in local.items():
        world = [[round(cx + c * x - s * y, 3), round(cy + s * x + c * y, 3)] for x, y in verts]
        slots.append({"side": side, "vertices": world})
    return slots


def sample_flags(ego, other, step=0.05):
    """Ego arc positions whose cross-section reaches into the other corridor."""
    line = LineString(ego)
    other_line = LineString(other)
    s = np.arange(0.0, line.length + 1e-9, step)
    flags = []
    for v in s:
        a = line.interpolate(max(v - 0.01, 0.0))
        b = line.interpolate(min(v + 0.01, line.length))
        c = line.interpolate(v)
        tx, ty = b.x - a.x, b.y - a.y
        n = math.hypot(tx, ty)
        nx, ny = -ty / n * WIDTH / 2, tx / n * WIDTH / 2
        section = LineString([(c.x - nx, c.y - ny), (c.x + nx, c.y + ny)])
        flags.append(other_line.distance(section) <= WIDTH / 2)
    return s, np.array(flags)


def conflict_runs(ego, other):
    s, flags = sample_flags(ego, other)
    runs, start = [], None
    for v, f in zip(s, flags):
        if f and start is None:
            start = v
        if not f and start is not None:
            runs.append((start, prev))
            start = None
        prev = v
    if start is not None:
        runs.append((start, s[-1]))
    return runs


def build(name, description, paths, flows, ego_path, occluders=(), leader=None, speed=SPEED,
          goal_after_crossing=8.0, goal_after_merge=40.0, fixed_route=None):
    path_map = {pid: verts for pid, verts in paths}
    ego = path_map[ego_path]
    ego_len = LineString(ego).length
    if fixed_route is not None:
        start, goal = fixed_route
    else:
        crossing_hi, first_lo, merge_lo = [], math.inf, None
        for f in flows:
            other = path_map[f["path"]]
            for lo, hi in conflict_runs(ego, other):
                first_lo = min(first_lo, lo)
                if hi >= ego_len - 0.06:
                    merge_lo = lo if merge_lo is None else min(merge_lo, lo)
                else:
                    crossing_hi.append(hi)
        if not math.isfinite(first_lo):
            raise SystemExit(f"{name}: no conflicts found")
        start = math.floor(first_lo - APPROACH - START_MARGIN)
        goal = 0.0
        if crossing_hi:
            goal = max(goal, max(crossing_hi) + goal_after_crossing)
        if merge_lo is not None:
            goal = max(goal, merge_lo + goal_after_merge)
        goal = math.ceil(goal)
        if start < 10:
            raise SystemExit(f"{name}: approach too short (start {start:.1f})")
        if goal > ego_len - 5:
            raise SystemExit(f"{name}: route too short for goal {goal:.1f} (length {ego_len:.1f})")
    doc = {
        "name": name,
        "description": description,
        "speed_limit": SPEED,
        "vehicle": {"length": 5.0, "width": WIDTH},
        "paths": [
            {"id": pid, "width": WIDTH, "vertices": [[round(x, 4), round(y, 4)] for x, y in verts]}
            for pid, verts in paths
        ],
        "flows": [
            {
                "path": f["path"],
                "emit_prob_per_second_initial": 0.10,
                "emit_prob_per_second_reduced": 0.05,
                "reduction_time": 30.0,
                "flow_speed": speed,
            }
            for f in flows
        ],
        "ego_route": {"path": ego_path, "start": float(start), "goal": float(goal)},
    }
    if occluders:
        doc["occluder_slots"] = list(occluders)
    if leader:
        doc["leader"] = leader
    return doc


def ego_north(x, y_first, y_end):
    """Straight northbound ego path long enough for the 100 m approach."""
    return straight((x, y_first - APPROACH - 25.0), (x, y_end))


def crossing_lanes(n_per_dir, cy=0.0, x_min=-UPSTREAM, x_max=UPSTREAM, prefix=""):
    """East-west road: eastbound lanes south of the centre, westbound north of it."""
    paths, flows = [], []
    for k in range(n_per_dir):
        off = HALF + k * LANE
        e = f"{prefix}east{k + 1}"
        w = f"{prefix}west{k + 1}"
        paths.append((e, straight((x_min, cy - off), (x_max, cy - off))))
        paths.append((w, straight((x_max, cy + off), (x_min, cy + off))))
        flows += [{"path": e}, {"path": w}]
    return paths, flows


def sc01(leader_speeds, name, description):
    ego = straight((HALF, 0.0), (HALF, 420.0))
    leader = {"gap": 40.0, "speeds": leader_speeds, "resample_period": 10.0}
    return build(name, description, [("ego", ego)], [], "ego", leader=leader, fixed_route=(5.0, 305.0))


def sc02():
    paths, flows = crossing_lanes(1)
    ego = ego_north(HALF, -HALF - HALF, DOWNSTREAM)
    return build("Sc02", "One lane per direction, straight crossing", [("ego", ego)] + paths, flows, "ego",
                 occluders=corner_slots(0, 0, LANE, LANE))


def curved_ego(y_junction_edge, radius=50.0):
    """Approach heading east, 90 degree left arc, then straight north through the junction."""
    lead_in = 12.0
    y_arc_end = y_junction_edge - lead_in
    t = Turtle(HALF - radius - 60.0, y_arc_end - radius, 0.0)
    t.line(60.0).arc(radius, 90.0).line(DOWNSTREAM - y_arc_end)
    return t.pts


def sc03():
    paths, flows = crossing_lanes(1)
    ego = curved_ego(-LANE)
    return build("Sc03", "One lane per direction, curved approach", [("ego", ego)] + paths, flows, "ego",
                 occluders=corner_slots(0, 0, LANE, LANE))


def sc04():
    # left turn from the northbound lane into the westbound lane
    r = 12.0
    y_turn = HALF - r
    t = Turtle(HALF, y_turn - APPROACH - 30.0, 90.0)
    t.line(APPROACH + 30.0).arc(r, 90.0).line(DOWNSTREAM)
    ego = t.pts
    paths = [
        ("ego", ego),
        ("east1", straight((-UPSTREAM, -HALF), (UPSTREAM, -HALF))),
        ("west1", straight((UPSTREAM, HALF), (-UPSTREAM, HALF))),
        ("south1", straight((-HALF, UPSTREAM), (-HALF, -UPSTREAM))),
    ]
    flows = [{"path": "east1"}, {"path": "west1"}, {"path": "south1"}]
    return build("Sc04", "Left turn across one lane per direction", paths, flows, "ego",
                 occluders=corner_slots(0, 0, LANE, LANE))


def merge_ego(x_merge=0.0, y_main=0.0, angle=30.0, radius=50.0):
    """Ramp at `angle` degrees joining the eastbound main lane at x_merge."""
    a = math.radians(angle)
    arc_dx = radius * math.sin(a)
    arc_dy = radius * (1 - math.cos(a))
    ramp = APPROACH + 40.0
    x0 = x_merge - arc_dx - ramp * math.cos(a)
    y0 = y_main - arc_dy - ramp * math.sin(a)
    t = Turtle(x0, y0, angle)
    t.line(ramp).arc(radius, -angle)
    return t


def sc05(speed=SPEED, name="Sc05", description="Merge into a continuous flow"):
    t = merge_ego()
    t.line(DOWNSTREAM + 50.0)
    main = straight((-UPSTREAM - 150.0, 0.0), (t.pos[0] + 20.0, 0.0))
    return build(name, description, [("ego", t.pts), ("main", main)], [{"path": "main"}], "ego", speed=speed)


def sc06():
    cx = 60.0
    t = merge_ego()
    t.line(cx + DOWNSTREAM)
    main = straight((-UPSTREAM - 150.0, 0.0), (t.pos[0] + 20.0, 0.0))
    # crossing road runs north-south; southbound lane is nearer the ego
    south = straight((cx - HALF, UPSTREAM), (cx - HALF, -UPSTREAM))
    north = straight((cx + HALF, -UPSTREAM), (cx + HALF, UPSTREAM))
    paths = [("ego", t.pts), ("main", main), ("south1", south), ("north1", north)]
    flows = [{"path": "main"}, {"path": "south1"}, {"path": "north1"}]
    return build("Sc06", "Merge followed by a one lane per direction crossing", paths, flows, "ego",
                 occluders=corner_slots(cx, HALF, LANE, LANE, heading_deg=0.0))


def sc07():
    paths, flows = crossing_lanes(3)
    ego = ego_north(HALF, -3 * LANE, DOWNSTREAM)
    return build("Sc07", "Three lanes per direction, straight crossing", [("ego", ego)] + paths, flows, "ego",
                 occluders=corner_slots(0, 0, 3 * LANE, 3 * LANE))


def sc08():
    paths, flows = crossing_lanes(3)
    ego = curved_ego(-3 * LANE)
    return build("Sc08", "Three lanes per direction, curved approach", [("ego", ego)] + paths, flows, "ego",
                 occluders=corner_slots(0, 0, 3 * LANE, 3 * LANE))


def sc09():
    second = 60.0
    p1, f1 = crossing_lanes(3)
    p2, f2 = crossing_lanes(3, cy=second, prefix="b_")
    ego = ego_north(HALF, -3 * LANE, second + DOWNSTREAM)
    return build("Sc09", "Two consecutive three lane crossings, 60 m apart", [("ego", ego)] + p1 + p2, f1 + f2,
                 "ego", occluders=corner_slots(0, 0, 3 * LANE, 3 * LANE))


def sc12():
    d = np.array([math.cos(math.radians(45)), math.sin(math.radians(45))])
    n_in = np.array([-d[1], d[0]])    # inbound lane of the NE arm lies north-west of its axis
    n_out = np.array([d[1], -d[0]])   # outbound lane lies south-east of it
    far = 150.0
    # NE arm inbound -> southbound stem lane
    a0 = far * d + HALF * n_in
    a_corner = line_intersection(a0, -d, (-HALF, 0.0), (0.0, -1.0))
    path_a = fillet([a0, a_corner, (-HALF, -UPSTREAM)], 8.0)
    # northern southbound lane -> NE arm outbound
    b_corner = line_intersection((-HALF, UPSTREAM), (0.0, -1.0), HALF * n_out, d)
    path_b = fillet([(-HALF, UPSTREAM), b_corner, far * d + HALF * n_out], 5.0)
    ego = ego_north(HALF, -LANE, DOWNSTREAM)
    slots = [
        {"side": "left", "vertices": rect(-LANE - 16.0, -LANE - 10.0, -LANE - 4.0, -LANE - 4.0)},
        {"side": "left", "vertices": rect(-LANE - 16.0, LANE + 4.0, -LANE - 4.0, LANE + 10.0)},
        {"side": "right", "vertices": rect(LANE + 4.0, -LANE - 10.0, LANE + 16.0, -LANE - 4.0)},
        {"side": "right", "vertices": rect(LANE + 10.0, -2.0, LANE + 22.0, 4.0)},
    ]
    paths = [("ego", ego), ("ne_in", [tuple(p) for p in path_a]), ("ne_out", [tuple(p) for p in path_b])]
    flows = [{"path": "ne_in"}, {"path": "ne_out"}]
    return build("Sc12", "Y-shaped junction with a 45 degree north-east arm", paths, flows, "ego", occluders=slots)


def sc13():
    # far side: two lanes left to right; near side: one lane right to left
    paths = [
        ("west1", straight((UPSTREAM, -HALF), (-UPSTREAM, -HALF))),
        ("east1", straight((-UPSTREAM, HALF), (UPSTREAM, HALF))),
        ("east2", straight((-UPSTREAM, HALF + LANE), (UPSTREAM, HALF + LANE))),
    ]
    flows = [{"path": "west1"}, {"path": "east1"}, {"path": "east2"}]
    ego = ego_north(HALF, -LANE, DOWNSTREAM)
    return build("Sc13", "Two lanes left to right beyond one lane right to left", [("ego", ego)] + paths, flows,
                 "ego", occluders=corner_slots(0, HALF, LANE, 1.5 * LANE))


def all_scenarios():
    return [
        sc01([8.33, 11.11, 13.89], "Sc01", "Car following behind a leader with changing speed"),
        sc02(),
        sc03(),
        sc04(),
        sc05(),
        sc06(),
        sc07(),
        sc08(),
        sc09(),
        sc01([4.17, 6.25, 8.33], "Sc10", "Car following behind a slow leader"),
        sc05(SLOW, "Sc11", "Merge into a slow continuous flow"),
        sc12(),
        sc13(),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "scenarios")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for doc in all_scenarios():
        target = args.out / f"{doc['name']}.json"
        target.write_text(json.dumps(doc, indent=1) + "\n")
        route = doc["ego_route"]
        print(f"{doc['name']}: start {route['start']:.0f} goal {route['goal']:.0f} -> {target}")


if __name__ == "__main__":
    main()
