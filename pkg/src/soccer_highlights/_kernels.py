"""Compiled inner loops.  Everything here is integer-exact or plain float64 so
results do not depend on how callers split work across threads."""

import numpy as np
from numba import njit


def candidate_order(radius):
    """Search displacements sorted by the tie-break rule |dx|+|dy|, dy, dx."""
    cands = [(dx, dy) for dy in range(-radius, radius + 1) for dx in range(-radius, radius + 1)]
    cands.sort(key=lambda v: (abs(v[0]) + abs(v[1]), v[1], v[0]))
    arr = np.array(cands, dtype=np.int64)
    return arr[:, 0].copy(), arr[:, 1].copy()


@njit(cache=True, nogil=True)
def block_match(prev_padded, nxt, block, radius, cand_dx, cand_dy):
    """Full-search SAD block matching.

    ``prev_padded`` is the previous luma plane edge-padded by ``radius``.  The
    winner is the candidate minimizing (SAD, rank in ``cand_dx/cand_dy``).
    Candidates are visited in rank order and a later one only wins with a
    strictly smaller SAD.  The loops run candidate-major over whole rows so
    the inner loop is a contiguous absolute difference that vectorizes.
    """
    h, w = nxt.shape
    rows = (h + block - 1) // block
    cols = (w + block - 1) // block
    n_cand = cand_dx.shape[0]
    best = np.full((rows, cols), np.int64(1) << 62)
    best_c = np.zeros((rows, cols), dtype=np.int64)
    acc = np.zeros(w, dtype=np.int32)
    for c in range(n_cand):
        off = radius - cand_dx[c]
        for by in range(rows):
            y0 = by * block
            acc[:] = 0
            for y in range(y0, min(y0 + block, h)):
                row = nxt[y]
                src = prev_padded[y - cand_dy[c] + radius, off:off + w]
                for x in range(w):
                    acc[x] += abs(np.int32(row[x]) - np.int32(src[x]))
            for bx in range(cols):
                s = np.int64(0)
                for x in range(bx * block, min(bx * block + block, w)):
                    s += acc[x]
                if s < best[by, bx]:
                    best[by, bx] = s
                    best_c[by, bx] = c
    out_dx = np.empty((rows, cols), dtype=np.int64)
    out_dy = np.empty((rows, cols), dtype=np.int64)
    for by in range(rows):
        for bx in range(cols):
            out_dx[by, bx] = cand_dx[best_c[by, bx]]
            out_dy[by, bx] = cand_dy[best_c[by, bx]]
    return out_dx, out_dy


@njit(cache=True, nogil=True)
def goertzel_power(frames, coeffs):
    """Squared DFT magnitude of each row of ``frames`` at each bin coefficient.

    ``coeffs[k] = 2 cos(2 pi k / N)``.
    """
    n_frames, n = frames.shape
    n_bins = coeffs.shape[0]
    out = np.empty((n_frames, n_bins))
    s1 = np.empty(n_bins)
    s2 = np.empty(n_bins)
    for f in range(n_frames):
        s1[:] = 0.0
        s2[:] = 0.0
        for i in range(n):
            x = frames[f, i]
            for k in range(n_bins):
                s0 = x + coeffs[k] * s1[k] - s2[k]
                s2[k] = s1[k]
                s1[k] = s0
        for k in range(n_bins):
            out[f, k] = s1[k] * s1[k] + s2[k] * s2[k] - coeffs[k] * s1[k] * s2[k]
    return out
