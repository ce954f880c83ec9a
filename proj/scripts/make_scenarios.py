#!/usr/bin/env python3
"""Regenerate the bundled scenario files.

Both scenarios are geometric reconstructions: the target quantities (frame
angles, ordering, certificate magnitudes) are fixed, but the underlying point
coordinates are not, so the shapes here are built so that the planner
reproduces those quantities exactly.

letter_a_to_i_20.json
    20 agents in the x-y plane. The "A" glyph is mirror-symmetric about an
    axis at 82.8 deg, which puts the max-min-separation direction exactly at
    172.8 deg; the "I" is collinear along 28.8 deg. Agent ids are assigned so
    the u-ordering equals the captioned permutation (b1=18, ..., b20=1,
    1-based).

cuboid_to_disk_60.json
    60 agents, 5x4x3 cuboid (18 m spacing) to a disk-shaped formation in the
    x-y plane built from sunflower phyllotaxis. Both formations get their
    coordinates along a separation direction re-spaced uniformly: a plain
    sunflower's projections are far too uneven to certify against
    delta = 0.19 m, epsilon = 0.40 m, and the re-spacing also makes each
    formation's optimal direction unique so the id assignment is stable.
    The cuboid is re-spaced along its horizontal footprint diagonal so both
    endpoint frames are planar and the frame rotation sweeps mu only. The disk center is offset 150 m laterally from the
    translated cuboid center so that aggressive deployment windows exercise
    the rotor-speed bound.
"""
import json
import numpy as np

GOLDEN = np.pi * (3.0 - np.sqrt(5.0))


def min_gap_objective(points_xy, n_dirs=100000):
    """Planar max-min-separation direction by dense scan + parabolic refine."""
    mus = np.arange(n_dirs) * np.pi / n_dirs
    dirs = np.stack([np.cos(mus), np.sin(mus)], axis=1)
    proj = points_xy @ dirs.T
    proj.sort(axis=0)
    gaps = np.diff(proj, axis=0).min(axis=0)
    i = int(np.argmax(gaps))
    return mus[i], gaps[i]


def letter_a_points():
    leg_x = [0.45, 1.35, 2.25, 3.15, 4.05, 4.95, 5.85, 6.75]
    leg_y = [8.4 * (6.75 - x) / 6.3 for x in leg_x]
    bar_x = [0.9, 1.8]
    bar_y = [2.8, 2.8]
    pts = []
    for x, y in zip(leg_x, leg_y):
        pts += [(-x, y), (x, y)]
    for x, y in zip(bar_x, bar_y):
        pts += [(-x, y), (x, y)]
    glyph = np.array(pts)
    rho = np.radians(172.8)  # glyph cross-axis direction -> 172.8 deg
    rot = np.array([[np.cos(rho), -np.sin(rho)], [np.sin(rho), np.cos(rho)]])
    return glyph @ rot.T


def letter_i_points():
    t = np.arange(20) * 0.7
    d = np.array([np.cos(np.radians(28.8)), np.sin(np.radians(28.8))])
    line = np.outer(t, d)
    return line - line.mean(axis=0)


def scenario_letters():
    # caption ordering, 1-based: b = (18,17,16,15,14,13,12,20,11,10,19,9,...,1)
    caption_b = [18, 17, 16, 15, 14, 13, 12, 20, 11, 10, 19, 9, 8, 7, 6, 5, 4, 3, 2, 1]
    caption0 = [b - 1 for b in caption_b]

    a_pts = letter_a_points()
    i_pts = letter_i_points() + np.array([24.0, 0.0])

    mu_a, _ = min_gap_objective(a_pts)
    mu_i, _ = min_gap_objective(i_pts - i_pts.mean(axis=0))
    rank_a = np.argsort(a_pts @ np.array([np.cos(mu_a), np.sin(mu_a)]))
    rank_i = np.argsort(i_pts @ np.array([np.cos(mu_i), np.sin(mu_i)]))
    # u increases along +c1; the captioned agent of order k gets the k-th point
    initial = np.zeros((20, 3))
    final = np.zeros((20, 3))
    for k in range(20):
        agent = caption0[k]
        initial[agent, :2] = a_pts[rank_a[k]]
        final[agent, :2] = i_pts[rank_i[k]]

    return {
        "name": "letter-a-to-i-20",
        "agents": 20,
        "delta": 0.05,
        "epsilon": 0.15,
        "window": {"t_s": 0.0, "t_f": 20.0},
        "translation": {"d0": [0.0, 0.0, 0.0], "v0": [1.2, 0.0, 0.0]},
        "initial_positions": initial.tolist(),
        "final_positions": final.tolist(),
        "sim": {"dt": 1e-3, "record_stride": 20},
    }


def scenario_cuboid_disk():
    spacing = 18.0
    cub = np.array([(i, j, k) for k in range(3) for j in range(4) for i in range(5)],
                   dtype=float) * spacing
    cub -= cub.mean(axis=0)

    n = 60
    k = np.arange(n)
    r = 40.0 * np.sqrt((k + 0.5) / n)
    th = k * GOLDEN
    disk = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)

    def canon(v):
        # the planner's canonical c1: z <= 0, ties broken toward y >= 0, x >= 0
        v = np.array(v, dtype=float)
        if abs(v[2]) < 1e-6:
            v[2] = 0.0
        if v[2] > 0 or (v[2] == 0 and (v[1] < 0 or (v[1] == 0 and v[0] < 0))):
            v = -v
        return v

    def respace(points, direction):
        # uniform spacing of the coordinates along `direction`
        along = points @ direction
        order = np.argsort(along)
        eq = np.empty(len(points))
        eq[order] = along.min() + np.arange(len(points)) * (along.max() - along.min()) / (len(points) - 1)
        return points + np.outer(eq - along, direction)

    # Re-space the cuboid along the horizontal footprint diagonal. Keeping the
    # separation direction horizontal at both endpoints means the frame-angle
    # schedule rotates in mu only instead of swinging the frame through the
    # vertical, which keeps mid-deployment accelerations gentle.
    dir_c = np.array([0.8, 0.6, 0.0])
    cub = respace(cub, dir_c)

    for _ in range(3):
        mu_d, _ = min_gap_objective(disk)
        c = np.array([np.cos(mu_d), np.sin(mu_d)])
        disk = respace(disk, c)
    mu_d, _ = min_gap_objective(disk)

    def canon(v):
        # the planner's canonical c1: z <= 0, ties broken toward y >= 0, x >= 0
        v = np.array(v, dtype=float)
        if abs(v[2]) < 1e-6:
            v[2] = 0.0
        if v[2] > 0 or (v[2] == 0 and (v[1] < 0 or (v[1] == 0 and v[0] < 0))):
            v = -v
        return v

    dir_d = canon([np.cos(mu_d), np.sin(mu_d), 0.0])

    # inertial placement: cuboid around d(0) = (0,0,40), disk around
    # d(50) + 150 m lateral offset, both windows of the translating frame
    d0 = np.array([0.0, 0.0, 40.0])
    v0 = np.array([10.0, 0.0, 0.0])
    t_f = 50.0
    initial_pts = cub + d0
    final_center = d0 + v0 * t_f + np.array([0.0, 150.0, 0.0])
    final_pts = np.column_stack([disk, np.zeros(n)]) + final_center

    # rank-match ids between the two formations along their optimal directions
    rank_c = np.argsort(initial_pts @ dir_c)
    rank_d = np.argsort(final_pts @ dir_d)
    initial = np.zeros((n, 3))
    final = np.zeros((n, 3))
    for q in range(n):
        initial[q] = initial_pts[rank_c[q]]
        final[q] = final_pts[rank_d[q]]

    return {
        "name": "cuboid-to-disk-60",
        "agents": n,
        "delta": 0.19,
        "epsilon": 0.40,
        "varpi_max": 215.0,
        "window": {"t_s": 0.0, "t_f": t_f},
        "translation": {"d0": d0.tolist(), "v0": v0.tolist()},
        "initial_positions": initial.tolist(),
        "final_positions": final.tolist(),
        "sim": {"dt": 1e-3, "record_stride": 50},
    }


def main():
    import os
    out_dir = os.path.join(os.path.dirname(__file__), "..", "scenarios")
    for name, scen in [("letter_a_to_i_20.json", scenario_letters()),
                       ("cuboid_to_disk_60.json", scenario_cuboid_disk())]:
        path = os.path.join(out_dir, name)
        with open(path, "w") as f:
            json.dump(scen, f, indent=2)
            f.write("\n")
        print("wrote", path)


if __name__ == "__main__":
    main()
