# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled walk statistics; mirrors ciugraph._walk_py."""

from libc.math cimport sqrt


def walk_stats(const long long[:] seq, const double[:] xs, const double[:] ys, const long long[:] quads):
    cdef Py_ssize_t n = seq.shape[0]
    cdef Py_ssize_t i
    cdef long long a, b
    cdef double sx = 0.0, sy = 0.0, mx, my, vx = 0.0, vy = 0.0, dx, dy, total = 0.0
    cdef long long unique = 0, self_cycles = 0, self_quad = 0, cross = 0, intra = 0
    cdef unsigned char[:] seen
    if n == 0:
        return (0, 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0, 0, 0, 0)
    seen = bytearray(xs.shape[0])
    for i in range(n):
        a = seq[i]
        sx += xs[a]
        sy += ys[a]
        if not seen[a]:
            seen[a] = 1
            unique += 1
    mx = sx / n
    my = sy / n
    for i in range(n):
        a = seq[i]
        dx = xs[a] - mx
        dy = ys[a] - my
        vx += dx * dx
        vy += dy * dy
        if i > 0:
            b = seq[i - 1]
            dx = xs[a] - xs[b]
            dy = ys[a] - ys[b]
            total += sqrt(dx * dx + dy * dy)
            if a == b:
                self_cycles += 1
            if quads[a] == quads[b]:
                self_quad += 1
                intra += 1
            else:
                cross += 1
    return (n, unique, mx, sqrt(vx / n), my, sqrt(vy / n), total,
            self_cycles, self_quad, cross, intra)
