"""Pure-Python (numpy) versions of the kernels in ``_core.pyx``."""
from collections import deque

import numpy as np

KIND_LE = 0
KIND_GE = 1
KIND_EQ = 2


def linear_errors(cand, coef, rhs, kind):
    s = cand @ coef.T - rhs
    err = np.where(kind == KIND_LE, np.maximum(s, 0.0),
                   np.where(kind == KIND_GE, np.maximum(-s, 0.0), np.abs(s)))
    return err.sum(axis=1)


def _reg(x):
    return np.where(x < 0.0, -(x * x + 1.0), x)


def upp_rdu(assign, counters, samples, weights):
    m = assign.shape[0]
    potency = (assign.reshape(m, 3, 3) * counters.reshape(1, 3, 3)).sum(axis=1)
    aim = np.minimum(1.0, potency[:, None, :] - samples[None, :, :])
    util = _reg(aim).sum(axis=2)
    util.sort(axis=1)
    return util @ weights


def distance_field(passable, sources):
    h, w = passable.shape
    dist = np.full((h, w), -1, dtype=np.int32)
    queue = deque()
    for x, y in sources:
        if 0 <= x < w and 0 <= y < h and dist[y, x] < 0:
            dist[y, x] = 0
            queue.append((x, y))
    grid = passable.tolist()
    out = dist.tolist()
    while queue:
        x, y = queue.popleft()
        d = out[y][x] + 1
        for nx, ny in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if 0 <= nx < w and 0 <= ny < h and out[ny][nx] < 0 and grid[ny][nx]:
                out[ny][nx] = d
                queue.append((nx, ny))
    return np.asarray(out, dtype=np.int32)
