# cython: language_level=3
"""Compiled twins of the hot pixel kernels.

Must stay bit-identical to ``pyref``; the equivalence suite in
tests/test_kernels.py enforces this on randomized inputs.
"""

import numpy as np

cimport numpy as cnp


cdef inline cnp.uint64_t _mix64(cnp.uint64_t z) nogil:
    z = (z ^ (z >> 30)) * <cnp.uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <cnp.uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline int _clamp255(long v) nogil:
    if v < 0:
        return 0
    if v > 255:
        return 255
    return <int>v


def compose_zones(patch, mask, Py_ssize_t rx, Py_ssize_t ry, color):
    cdef unsigned char[:, :, ::1] p = patch
    cdef const unsigned char[:, :] m = mask.view(np.uint8)
    cdef Py_ssize_t rh = m.shape[0], rw = m.shape[1]
    cdef Py_ssize_t ix, jy
    cdef unsigned char cr = color[0], cg = color[1], cb = color[2]
    for jy in range(rh):
        for ix in range(rw):
            if m[jy, ix]:
                p[ry + jy, rx + ix, 0] = cr
                p[ry + jy, rx + ix, 1] = cg
                p[ry + jy, rx + ix, 2] = cb
            else:
                p[ry + jy, rx + ix, 0] = 0
                p[ry + jy, rx + ix, 1] = 0
                p[ry + jy, rx + ix, 2] = 0


def procedural_fill(patch, mask, Py_ssize_t rx, Py_ssize_t ry, color, seed):
    cdef unsigned char[:, :, ::1] p = patch
    cdef const unsigned char[:, :] m = mask.view(np.uint8)
    cdef Py_ssize_t ph = p.shape[0], pw = p.shape[1]
    cdef Py_ssize_t rh = m.shape[0], rw = m.shape[1]
    cdef Py_ssize_t xl = rx - 1, xr = rx + rw, yt = ry - 1, yb = ry + rh
    cdef bint has_h = xl >= 0 or xr < pw
    cdef bint has_lr = xl >= 0 and xr < pw
    cdef bint has_v = yt >= 0 or yb < ph
    cdef bint has_tb = yt >= 0 and yb < ph
    cdef long base[3]
    base[0] = color[0]
    base[1] = color[1]
    base[2] = color[2]
    cdef int dom = 0 if base[0] >= base[1] and base[0] >= base[2] else (1 if base[1] >= base[2] else 2)
    cdef cnp.uint64_t s = <cnp.uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef cnp.uint64_t golden = <cnp.uint64_t>0x9E3779B97F4A7C15
    cdef cnp.uint64_t z, idx
    cdef Py_ssize_t ix, jy, x, y, c
    cdef long delta, hv, vv, v, den, out[3]
    cdef bint collided

    for jy in range(rh):
        y = ry + jy
        for ix in range(rw):
            x = rx + ix
            if m[jy, ix]:
                idx = <cnp.uint64_t>(y * pw + x)
                z = _mix64(s + (idx + 1) * golden)
                delta = <long>(z % 97) - 48
                if delta == 0:
                    delta = 1
                collided = True
                for c in range(3):
                    out[c] = _clamp255(base[c] + delta)
                    if out[c] != base[c]:
                        collided = False
                if collided:
                    for c in range(3):
                        out[c] = _clamp255(base[c] - delta)
                if out[dom] < 1:
                    out[dom] = 1
                p[y, x, 0] = <unsigned char>out[0]
                p[y, x, 1] = <unsigned char>out[1]
                p[y, x, 2] = <unsigned char>out[2]
            else:
                for c in range(3):
                    if has_h:
                        if has_lr:
                            den = xr - xl
                            hv = (p[y, xl, c] * (xr - x) + p[y, xr, c] * (x - xl) + den // 2) // den
                        elif xl >= 0:
                            hv = p[y, xl, c]
                        else:
                            hv = p[y, xr, c]
                    if has_v:
                        if has_tb:
                            den = yb - yt
                            vv = (p[yt, x, c] * (yb - y) + p[yb, x, c] * (y - yt) + den // 2) // den
                        elif yt >= 0:
                            vv = p[yt, x, c]
                        else:
                            vv = p[yb, x, c]
                    if has_h and has_v:
                        v = (hv + vv + 1) // 2
                    elif has_h:
                        v = hv
                    elif has_v:
                        v = vv
                    else:
                        v = 0
                    p[y, x, c] = <unsigned char>v


def feather_blend(dst, patch, Py_ssize_t x0, Py_ssize_t y0, Py_ssize_t border):
    cdef unsigned char[:, :, ::1] d = dst
    cdef const unsigned char[:, :, :] q = patch
    cdef Py_ssize_t rh = q.shape[0], rw = q.shape[1]
    cdef Py_ssize_t ix, jy, c
    cdef long depth, den, a, v
    for jy in range(rh):
        for ix in range(rw):
            depth = ix
            if rw - 1 - ix < depth:
                depth = rw - 1 - ix
            if jy < depth:
                depth = jy
            if rh - 1 - jy < depth:
                depth = rh - 1 - jy
            if depth >= border:
                for c in range(3):
                    d[y0 + jy, x0 + ix, c] = q[jy, ix, c]
            else:
                den = border + 1
                a = depth + 1
                for c in range(3):
                    v = (q[jy, ix, c] * a + d[y0 + jy, x0 + ix, c] * (den - a) + den // 2) // den
                    d[y0 + jy, x0 + ix, c] = <unsigned char>v
