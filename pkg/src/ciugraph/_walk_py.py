"""Pure-Python walk statistics, used when the compiled kernel is unavailable."""

from math import sqrt


def walk_stats(seq, xs, ys, quads):
    """Single pass over a CIU id walk.

    ``xs``, ``ys`` and ``quads`` are indexed by CIU id. Returns
    ``(n, unique, mean_x, std_x, mean_y, std_y, total_path, self_cycles,
    self_cycles_quad, cross_edges, intra_edges)`` with population std.
    """
    n = len(seq)
    if n == 0:
        return (0, 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0, 0, 0, 0)
    seq = [int(a) for a in seq]
    mx = sum(xs[a] for a in seq) / n
    my = sum(ys[a] for a in seq) / n
    vx = vy = total = 0.0
    self_cycles = self_quad = cross = intra = 0
    prev = None
    for a in seq:
        dx = xs[a] - mx
        dy = ys[a] - my
        vx += dx * dx
        vy += dy * dy
        if prev is not None:
            dx = xs[a] - xs[prev]
            dy = ys[a] - ys[prev]
            total += sqrt(dx * dx + dy * dy)
            if a == prev:
                self_cycles += 1
            if quads[a] == quads[prev]:
                self_quad += 1
                intra += 1
            else:
                cross += 1
        prev = a
    return (n, len(set(seq)), mx, sqrt(vx / n), my, sqrt(vy / n), total,
            self_cycles, self_quad, cross, intra)
