"""Independent oracles shared by the test modules."""

import numpy as np


def naive_matmul(a, b):
    """Triple loop, k innermost, scalar accumulation starting from 0.0."""
    n, K = a.shape
    m = b.shape[1]
    out = np.zeros((n, m))
    for i in range(n):
        for j in range(m):
            s = 0.0
            for k in range(K):
                s += float(a[i, k]) * float(b[k, j])
            out[i, j] = s
    return out


def central_difference(f, params, h=1e-5):
    """Numerical gradient of scalar ``f()`` w.r.t. every entry of every array in ``params``.

    The arrays are perturbed in place and restored.
    """
    grads = []
    for p in params:
        g = np.zeros_like(p)
        flat, gflat = p.reshape(-1), g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = f()
            flat[i] = orig - h
            down = f()
            flat[i] = orig
            gflat[i] = (up - down) / (2 * h)
        grads.append(g)
    return grads


def max_relative_error(analytic, numeric, floor=1e-8):
    """max |a - n| / max(|a| + |n|, floor) over every entry of every block."""
    worst = 0.0
    for a, n in zip(analytic, numeric):
        a, n = np.asarray(a, dtype=float), np.asarray(n, dtype=float)
        err = np.abs(a - n) / np.maximum(np.abs(a) + np.abs(n), floor)
        worst = max(worst, float(err.max()))
    return worst


def confusion_loop(pred, truth):
    tp = tn = fp = fn = 0
    for p, t in zip(pred, truth):
        if p == 1 and t == 1:
            tp += 1
        elif p == 0 and t == 0:
            tn += 1
        elif p == 1:
            fp += 1
        else:
            fn += 1
    acc = (tp + tn) / (tp + tn + fp + fn)
    prec = tp / (tp + fp) if tp + fp else 0.0
    rec = tp / (tp + fn) if tp + fn else 0.0
    return tp, tn, fp, fn, acc, prec, rec
