"""Pure-Python scoring/update kernel, the fallback for environments
without the compiled extension.

Row accumulation is sequential (one vectorized add per feature row) so
results are bit-identical to the compiled kernel; see
benchmarks/bench_scoring.py for the speed comparison.
"""

import numpy as np

BACKEND = "python"


def score_rows(weights, rows, out):
    out[:] = 0.0
    for r in rows:
        out += weights[r]


def best_legal(scores, legal):
    best = -1
    best_score = 0.0
    for t in range(scores.shape[0]):
        if not legal[t]:
            continue
        if best < 0 or scores[t] > best_score:
            best = t
            best_score = scores[t]
    return best


def perceptron_update(weights, totals, stamps, rows, gold, pred, step):
    for r in rows:
        totals[r, gold] += (step - stamps[r, gold]) * weights[r, gold]
        stamps[r, gold] = step
        weights[r, gold] += 1.0
        totals[r, pred] += (step - stamps[r, pred]) * weights[r, pred]
        stamps[r, pred] = step
        weights[r, pred] -= 1.0


def finalize_average(weights, totals, stamps, step):
    out = np.zeros_like(weights)
    if step <= 0:
        return out
    pending = totals + (step - stamps) * weights
    np.divide(pending, float(step), out=out)
    return out
