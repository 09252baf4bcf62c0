#!/usr/bin/env python3
"""Writes the bundled scenario files into scenarios/.

Layouts are hand-authored reconstructions; coordinates are fixed by the seed.
"""
import json
import math
import random
import sys
from pathlib import Path

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "scenarios"


def rect(cx, cy, w, h, a=0.0):
    c, s = math.cos(a), math.sin(a)
    pts = []
    for dx, dy in ((-w / 2, -h / 2), (w / 2, -h / 2), (w / 2, h / 2), (-w / 2, h / 2)):
        pts.append([round(cx + c * dx - s * dy, 4), round(cy + s * dx + c * dy, 4)])
    return pts


def circle(cx, cy, r):
    return {"cx": round(cx, 4), "cy": round(cy, 4), "r": round(r, 4)}


def abcd_circles(seed=7, count=53):
    """Jittered field of circles between x=-16 and x=-3, packed so that no
    straight corridor wide enough for the robot exists."""
    rng = random.Random(seed)
    obstacles = []
    tries = 0
    while len(obstacles) < count and tries < 100000:
        tries += 1
        r = rng.uniform(0.35, 0.6)
        x = rng.uniform(-16.0, -3.0)
        y = rng.uniform(-4.3, 4.3)
        if all(math.hypot(x - o[0], y - o[1]) > r + o[2] + 0.25 for o in obstacles):
            obstacles.append((x, y, r))
    obstacles.sort(key=lambda o: (round(o[0], 3), o[1]))
    return obstacles


L_SHAPE = [rect(0.0, 0.0, 1.2, 0.3), rect(-0.45, 0.45, 0.3, 0.6)]


def planner(mode, horizon, mx, mi, max_steps=260, tol=0.25):
    return {"mode": mode, "horizon": horizon, "max_steps": max_steps, "goal_tolerance": tol,
            "weights": {"Mx": mx, "Mi": mi, "Mu": 0.1, "Mg": 10.0},
            "eta": 100.0, "epsilon": 1e-3, "state_reference": "zero"}


def abcd_obstacles(radius_scale=1.0):
    return [{"id": i + 1, "movable": True, "circle": circle(x, y, r * radius_scale),
             "motion": "free", "weight": 1.0}
            for i, (x, y, r) in enumerate(abcd_circles())]


def abcd_lshape(mode="mcd", horizon=21, mx=4.07, mi=0.5):
    return {
        "version": 1,
        "name": "abcd_lshape" if mode != "mcr" else "abcd_mcr",
        "domain": {"xmin": -20.0, "xmax": 1.0, "ymin": -5.0, "ymax": 5.0},
        "robot": {"model": "planar_velocity", "dt": 0.1,
                  "control_lower": [-2.5, -2.5, -2.5], "control_upper": [2.5, 2.5, 2.5],
                  "polygons": L_SHAPE,
                  "start": [-19.0, 0.0, 0.0], "goal": [0.0, 0.0, 0.0]},
        "obstacles": abcd_obstacles(),
        "planner": planner(mode, horizon, mx, mi),
    }


def abcd_circular():
    return {
        "version": 1,
        "name": "abcd_circular",
        "domain": {"xmin": -20.0, "xmax": 1.0, "ymin": -5.0, "ymax": 5.0},
        "robot": {"model": "down_cross_turn", "dt": 1.0,
                  "control_lower": [-1.5, -1.5, -math.pi], "control_upper": [1.5, 1.5, math.pi],
                  "polygons": [], "circles": [circle(0.0, 0.0, 0.5)],
                  "start": [-19.0, 0.0, 0.0], "goal": [0.0, 0.0, 0.0]},
        "obstacles": abcd_obstacles(),
        "planner": planner("mcd", 10, 0.5, 0.5, max_steps=80, tol=0.25),
    }


def roomba():
    # Charging station at the origin; the room spans x in [-5, 0.5], y in [-0.5, 4.5].
    dy = 4.0
    furniture = [
        rect(-3.0, -0.8 + dy, 2.2, 0.9),
        rect(-1.2, -1.8 + dy, 1.4, 0.8, 0.2),
        rect(-1.8, -0.9 + dy, 0.5, 0.5, 0.3),
        rect(-0.4, -1.1 + dy, 0.5, 0.5, -0.2),
        rect(-2.2, -3.0 + dy, 0.6, 0.6),
        rect(-4.0, -3.2 + dy, 0.5, 1.5),
        [[-0.9, -3.3 + dy], [-0.5, -3.5 + dy], [-0.3, -3.1 + dy], [-0.6, -2.8 + dy]],
    ]
    obstacles = [{"id": i + 1, "movable": True, "polygon": poly, "motion": "free", "weight": 1.0}
                 for i, poly in enumerate(furniture)]
    obstacles.append({"id": 8, "movable": True, "circle": circle(-2.9, -2.1 + dy, 0.3), "motion": "free", "weight": 1.0})
    return {
        "version": 1,
        "name": "roomba_room",
        "domain": {"xmin": -5.0, "xmax": 0.5, "ymin": -0.5, "ymax": 4.5},
        "robot": {"model": "down_cross_turn", "dt": 1.0,
                  "control_lower": [-0.3, -0.3, -math.pi], "control_upper": [0.3, 0.3, math.pi],
                  "polygons": [], "circles": [circle(0.0, 0.0, 0.17)],
                  "start": [-4.4, 4.0, 0.0], "goal": [0.0, 0.0, 0.0]},
        "obstacles": obstacles,
        "planner": planner("mcd", 10, 0.5, 0.5, max_steps=120, tol=0.15),
    }


def world19():
    rng = random.Random(19)
    obstacles = []
    placed = []
    i = 0
    while len(obstacles) < 19:
        cx = rng.uniform(-13.0, -2.0)
        cy = rng.uniform(-3.5, 3.5)
        if any(math.hypot(cx - p[0], cy - p[1]) < 1.7 for p in placed):
            continue
        placed.append((cx, cy))
        i += 1
        kind = i % 3
        if kind == 0:
            obstacles.append({"id": i, "movable": True, "circle": circle(cx, cy, rng.uniform(0.4, 0.7)),
                              "motion": "free", "weight": 1.0})
        elif kind == 1:
            obstacles.append({"id": i, "movable": True,
                              "polygon": rect(cx, cy, rng.uniform(0.8, 1.6), rng.uniform(0.6, 1.0), rng.uniform(-0.6, 0.6)),
                              "motion": "free", "weight": 1.0})
        else:
            r = rng.uniform(0.5, 0.8)
            a0 = rng.uniform(0, 2 * math.pi)
            tri = [[round(cx + r * math.cos(a0 + k * 2 * math.pi / 3), 4),
                    round(cy + r * math.sin(a0 + k * 2 * math.pi / 3), 4)] for k in range(3)]
            obstacles.append({"id": i, "movable": True, "polygon": tri,
                              "motion": "translate_only" if i % 4 == 0 else "free", "weight": 1.0})
    return {
        "version": 1,
        "name": "world19",
        "domain": {"xmin": -15.0, "xmax": 1.0, "ymin": -5.0, "ymax": 5.0},
        "robot": {"model": "down_cross_turn", "dt": 1.0,
                  "control_lower": [-1.0, -1.0, -math.pi], "control_upper": [1.0, 1.0, math.pi],
                  "polygons": [], "circles": [circle(0.0, 0.0, 0.45)],
                  "start": [-14.0, 0.0, 0.0], "goal": [0.0, 0.0, 0.0]},
        "obstacles": obstacles,
        "planner": planner("mcd", 10, 0.5, 0.5, max_steps=80, tol=0.25),
    }


def two_rooms(weighted=True):
    # A dividing wall at x = -6 with one doorway (y in [-1.5, 1.5]). A large
    # block closes its upper half and two small objects close the lower half.
    wall = lambda y0, y1: rect(-6.0, (y0 + y1) / 2, 0.3, y1 - y0)
    obstacles = [
        {"id": 100, "movable": False, "polygon": wall(-5.0, -1.5), "motion": "free", "weight": 1.0},
        {"id": 101, "movable": False, "polygon": wall(1.5, 5.0), "motion": "free", "weight": 1.0},
    ]
    large = [rect(-6.0, 0.75, 0.8, 1.5), rect(-8.5, -3.0, 1.2, 1.4), rect(-3.5, 3.2, 1.2, 1.4),
             rect(-9.5, 3.4, 1.8, 1.0), rect(-2.5, -3.2, 1.6, 1.0), rect(-10.8, -3.2, 1.0, 1.6)]
    small = [circle(-6.0, -0.37, 0.37), circle(-6.0, -1.12, 0.37),
             circle(-7.6, 2.6, 0.3), circle(-4.6, -2.3, 0.3), circle(-8.8, 2.0, 0.3),
             circle(-3.2, -1.9, 0.3), circle(-11.0, 2.6, 0.3), circle(-1.8, 2.3, 0.3),
             circle(-7.5, -4.0, 0.3), circle(-2.6, 4.0, 0.3), circle(-10.0, -1.9, 0.3)]
    next_id = 1
    for poly in large:
        obstacles.append({"id": next_id, "movable": True, "polygon": poly, "motion": "free",
                          "weight": 10.0 if weighted else 1.0})
        next_id += 1
    for c in small:
        obstacles.append({"id": next_id, "movable": True, "circle": c, "motion": "free", "weight": 1.0})
        next_id += 1
    return {
        "version": 1,
        "name": "two_rooms_weighted" if weighted else "two_rooms",
        "domain": {"xmin": -12.0, "xmax": 1.0, "ymin": -5.0, "ymax": 5.0},
        "robot": {"model": "planar_velocity", "dt": 0.1,
                  "control_lower": [-2.0, -2.0, -2.0], "control_upper": [2.0, 2.0, 2.0],
                  "polygons": [], "circles": [circle(0.0, 0.0, 0.35)],
                  "start": [-11.0, 0.9, 0.0], "goal": [0.0, 0.0, 0.0]},
        "obstacles": obstacles,
        "planner": planner("mcr", 10, 0.5, 0.5, max_steps=200, tol=0.25),
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    files = {
        "abcd_lshape.json": abcd_lshape(),
        "abcd_mcr.json": abcd_lshape(mode="mcr", horizon=10, mx=0.5, mi=0.5),
        "abcd_circular.json": abcd_circular(),
        "roomba_room.json": roomba(),
        "world19.json": world19(),
        "two_rooms.json": two_rooms(weighted=False),
        "two_rooms_weighted.json": two_rooms(weighted=True),
    }
    for name, doc in files.items():
        (OUT / name).write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
