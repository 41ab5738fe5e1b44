#!/usr/bin/env python3
"""Reference trial metrics for a telemetry CSV, written as golden JSON.

Usage: oracle.py TELEMETRY.csv L_CHANNEL MASS G > golden.json

Window detection, stride boundaries and time integrals are reimplemented
here from their definitions with numpy.
"""
import csv
import json
import math
import sys

import numpy as np

THRESHOLD, HYSTERESIS, MIN_DURATION = 0.05, 0.02, 0.25
EPS = 1e-9


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["t_s", "fx_n", "fy_n", "fz_n", "leg_left_rad", "leg_right_rad", "power_w"]
    return np.array([[float(v) for v in r] for r in rows[1:]])


def window(t, fx):
    lower = THRESHOLD - HYSTERESIS
    runs, start, last = [], None, None
    for ti, m in zip(t, np.abs(fx)):
        if start is None:
            if m > THRESHOLD:
                start, last = ti, ti
        elif m < lower:
            runs.append((start, last))
            start = None
        else:
            last = ti
    if start is not None:
        runs.append((start, last))
    runs = [r for r in runs if r[1] - r[0] >= MIN_DURATION]
    if not runs:
        return t[0], t[-1], True
    return runs[0][0], runs[-1][1], False


def integral(t, y, a, b):
    """Exact integral of the linear interpolant of (t, y) over [a, b]."""
    knots = np.concatenate(([a], t[(t > a) & (t < b)], [b]))
    vals = np.interp(knots, t, y)
    return float(np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(knots)))


def passage(u, t, k, target):
    du = u[k + 1] - u[k]
    if abs(du) < np.finfo(float).eps:
        return t[k + 1]
    s = min(max((target - u[k]) / du, 0.0), 1.0)
    return t[k] + s * (t[k + 1] - t[k])


def strides(t, leg):
    u = np.unwrap(leg)
    n = len(u)
    turns = range(math.ceil((u[0] - EPS) / (2 * math.pi)), math.floor((u.max() + EPS) / (2 * math.pi)) + 1)
    bounds = []
    for k in turns:
        target = 2 * math.pi * k
        reached = u >= target - EPS
        hits = np.flatnonzero(reached)
        if len(hits) == 0:
            continue
        i = hits[0]
        t_first = t[0] if i == 0 else passage(u, t, i - 1, target)
        misses = np.flatnonzero(~reached)
        if len(misses) and misses[-1] + 1 < n:
            t_last = passage(u, t, misses[-1], target)
        else:
            t_last = t_first
        bounds.append(0.5 * (t_first + t_last))
    return [(s, e) for s, e in zip(bounds, bounds[1:]) if e > s]


def main():
    path, l_channel, mass, g = sys.argv[1], *map(float, sys.argv[2:5])
    d = load(path)
    t, fx, fz, leg, power = d[:, 0], d[:, 1], d[:, 3], d[:, 4], d[:, 6]
    a, b, free = window(t, fx)
    a, b = max(a, t[0]), min(b, t[-1])
    dur = b - a
    v = l_channel / dur
    mean_fx = integral(t, -fx, a, b) / dur
    elec = integral(t, power, a, b)
    out = {
        "mean_fx_n": mean_fx,
        "mean_fz_n": integral(t, fz, a, b) / dur,
        "mean_power_w": elec / dur,
        "mean_velocity_mps": v,
        "drag_energy_j": mean_fx * l_channel,
        "electrical_energy_j": elec,
        "specific_resistance": (elec / dur) / (mass * g * v),
        "window": {"t_enter_s": a, "t_exit_s": b, "free_run": free},
        "strides": [],
    }
    for s, e in strides(t, leg):
        if s < a - 1e-12 or e > b + 1e-12:
            continue
        dt = e - s
        pe = integral(t, power, s, e)
        out["strides"].append({
            "stride": len(out["strides"]) + 1,
            "t_start_s": s,
            "t_end_s": e,
            "drag_energy_j": integral(t, -fx, s, e) / dt * v * dt,
            "electrical_energy_j": pe,
            "specific_resistance": (pe / dt) / (mass * g * v),
        })
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
