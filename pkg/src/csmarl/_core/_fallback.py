"""Pure-numpy implementations of the hot kernels.

Shares its function signatures with the compiled extension so callers can
treat the two interchangeably; the extension is preferred at import when it
built successfully.
"""

import numpy as np

IMPL = "numpy"


def mlp_forward(X, weights, biases, out_tanh):
    """Batched dense forward pass: tanh hiddens, identity or tanh output.

    X is (B, d_in); returns (Y, activations) where activations[l] is the
    input to layer l (activations[0] is X itself), kept for the backward pass.
    """
    activations = [X]
    h = X
    last = len(weights) - 1
    for l, (W, b) in enumerate(zip(weights, biases)):
        z = h @ W + b
        if l < last or out_tanh:
            z = np.tanh(z)
        if l < last:
            activations.append(z)
        h = z
    return h, activations


def mlp_backward(activations, Y, weights, upstream, out_tanh):
    """Reverse-mode gradients of sum(upstream * Y) for a forward-pass cache.

    Returns (dWs, dbs, dX): parameter gradients summed over the batch plus
    per-row input gradients.
    """
    n_layers = len(weights)
    dWs = [None] * n_layers
    dbs = [None] * n_layers
    dz = upstream * (1.0 - Y * Y) if out_tanh else upstream
    for l in range(n_layers - 1, -1, -1):
        a = activations[l]
        dWs[l] = a.T @ dz
        dbs[l] = dz.sum(axis=0)
        da = dz @ weights[l].T
        if l > 0:
            dz = da * (1.0 - a * a)
    return dWs, dbs, da


def solve_games_batch(q1, q2, g1, g2, d1, d2):
    """Constrained Stackelberg pure-strategy solve for a stack of games.

    Inputs are (B, n1, n2) float arrays; thresholds are scalars (inf allowed).
    Ties break toward the lowest index and empty feasible sets fall back to
    the minimum-cost action, matching matgame.solve_constrained_stackelberg.
    Returns (leader, follower, feasible) arrays of shape (B,).
    """
    B = q1.shape[0]
    rows = np.arange(B)[:, None]

    feas2 = g2 <= d2
    q2_masked = np.where(feas2, q2, -np.inf)
    replies = np.where(feas2.any(axis=2), q2_masked.argmax(axis=2), g2.argmin(axis=2))

    q1_at = np.take_along_axis(q1, replies[:, :, None], axis=2)[:, :, 0]
    g1_at = np.take_along_axis(g1, replies[:, :, None], axis=2)[:, :, 0]
    feas1 = g1_at <= d1
    q1_masked = np.where(feas1, q1_at, -np.inf)
    leader = np.where(feas1.any(axis=1), q1_masked.argmax(axis=1), g1_at.argmin(axis=1))

    follower = replies[rows[:, 0], leader]
    feasible = (g1[rows[:, 0], leader, follower] <= d1) & (g2[rows[:, 0], leader, follower] <= d2)
    return leader.astype(np.int64), follower.astype(np.int64), feasible
