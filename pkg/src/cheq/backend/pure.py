"""Pure numpy implementation of the hot numeric kernels.

This is the fallback backend, used when the compiled extension is missing
(or when ``CHEQ_BACKEND=py`` forces it). Semantics are the contract; the
compiled backend in ``_core.pyx`` must agree with these functions to float
rounding.

Parameter layout for a feedforward net with layer sizes ``(n0, n1, ..., nL)``:
layer-major, weights before biases, weight matrices row-major with shape
``(n_k, n_{k-1})``. Hidden activations are relu or tanh; the output layer is
always identity.
"""

import numpy as np

ACT_RELU = 0
ACT_TANH = 1

NAME = "pure"


def param_count(sizes):
    return sum(sizes[k] * sizes[k - 1] + sizes[k] for k in range(1, len(sizes)))


def layer_views(params, sizes):
    """Weight/bias views into the flat parameter vector (no copies)."""
    ws, bs = [], []
    off = 0
    for k in range(1, len(sizes)):
        n, m = sizes[k], sizes[k - 1]
        ws.append(params[off:off + n * m].reshape(n, m))
        off += n * m
        bs.append(params[off:off + n])
        off += n
    return ws, bs


def forward_batch(params, sizes, act, x):
    """Forward pass for a batch ``x`` of shape (B, n0).

    Returns ``(y, cache)`` where cache holds the input to every layer
    (post-activation), as needed by :func:`backward_batch`.
    """
    ws, bs = layer_views(params, sizes)
    a = x
    cache = [a]
    last = len(ws) - 1
    for k, (w, b) in enumerate(zip(ws, bs)):
        h = a @ w.T + b
        if k < last:
            if act == ACT_RELU:
                a = np.maximum(h, 0.0)
            else:
                a = np.tanh(h)
            cache.append(a)
        else:
            a = h
    return a, cache


def backward_batch(params, sizes, act, cache, dy):
    """Reverse-mode pass. ``dy`` has shape (B, nL).

    Returns ``(dparams, dx)``: gradient of ``sum(dy * y)`` with respect to
    the flat parameters and to the batch input.
    """
    ws, _ = layer_views(params, sizes)
    dparams = np.empty_like(params)
    dws, dbs = layer_views(dparams, sizes)
    dh = np.ascontiguousarray(dy)
    for k in range(len(ws) - 1, -1, -1):
        if k < len(ws) - 1:
            a = cache[k + 1]
            if act == ACT_RELU:
                dh = dh * (a > 0.0)
            else:
                dh = dh * (1.0 - a * a)
        np.matmul(dh.T, cache[k], out=dws[k])
        dbs[k][:] = dh.sum(axis=0)
        if k > 0:
            dh = dh @ ws[k]
        else:
            dx = dh @ ws[0]
    return dparams, dx


def backward_input(params, sizes, act, cache, dy):
    """Like backward_batch but skips parameter gradients; returns dx only."""
    ws, _ = layer_views(params, sizes)
    dh = np.ascontiguousarray(dy)
    for k in range(len(ws) - 1, -1, -1):
        if k < len(ws) - 1:
            a = cache[k + 1]
            if act == ACT_RELU:
                dh = dh * (a > 0.0)
            else:
                dh = dh * (1.0 - a * a)
        dh = dh @ ws[k]
    return dh


def adam_update(params, grads, m, v, t, lr, beta1, beta2, eps):
    """One bias-corrected Adam step, in place. ``t`` is the step index
    after incrementing (1 on the first call)."""
    m *= beta1
    m += (1.0 - beta1) * grads
    v *= beta2
    v += (1.0 - beta2) * grads * grads
    mhat = m / (1.0 - beta1 ** t)
    vhat = v / (1.0 - beta2 ** t)
    params -= lr * mhat / (np.sqrt(vhat) + eps)


def polyak_update(target, online, tau):
    """target <- (1 - tau) * target + tau * online, in place."""
    target *= 1.0 - tau
    target += tau * online
