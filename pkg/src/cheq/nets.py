"""Minimal differentiable feedforward networks.

Everything the agents need from a neural network lives here: forward
passes, exact reverse-mode gradients, Adam, Polyak target tracking and a
binary checkpoint format. Networks are plain parameter containers around a
flat float64 vector; the math is delegated to :mod:`cheq.backend` so the
same code runs on the compiled or the pure kernels.

Flat parameter layout: layer-major, weights before biases, row-major weight
matrices of shape (fan_out, fan_in). This ordering is frozen because the
checkpoint format stores the raw vector.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from . import backend

ACTIVATIONS = {"relu": backend.ACT_RELU, "tanh": backend.ACT_TANH}

_CKPT_MAGIC = b"CHEQNET1"


class DimensionError(ValueError):
    """Input or gradient shape does not match the network."""


def param_count(sizes) -> int:
    """Number of parameters implied by the layer sizes alone."""
    return backend.param_count(tuple(sizes))


@dataclass
class Network:
    """A feedforward net: layer sizes, one flat parameter vector, views.

    ``weights[k]`` and ``biases[k]`` are views into ``flat``; mutating them
    mutates the network. Hidden layers use the configured activation, the
    output layer is identity.
    """

    sizes: tuple
    activation: str
    flat: np.ndarray

    def __post_init__(self):
        self.sizes = tuple(int(s) for s in self.sizes)
        if len(self.sizes) < 2 or any(s <= 0 for s in self.sizes):
            raise ValueError(f"bad layer sizes {self.sizes}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.flat.shape != (param_count(self.sizes),):
            raise DimensionError(
                f"flat vector has {self.flat.shape[0]} entries, "
                f"sizes {self.sizes} need {param_count(self.sizes)}")
        self._act = ACTIVATIONS[self.activation]
        self.weights, self.biases = backend.layer_views(self.flat, self.sizes)

    @classmethod
    def initialize(cls, sizes, activation, rng: np.random.Generator) -> "Network":
        """Fan-in scaled uniform init, U(-1/sqrt(fan_in), 1/sqrt(fan_in))."""
        sizes = tuple(int(s) for s in sizes)
        flat = np.empty(param_count(sizes), dtype=np.float64)
        net = cls(sizes, activation, flat)
        for k in range(len(sizes) - 1):
            bound = 1.0 / np.sqrt(sizes[k])
            net.weights[k][:] = rng.uniform(-bound, bound, size=net.weights[k].shape)
            net.biases[k][:] = rng.uniform(-bound, bound, size=net.biases[k].shape)
        return net

    @classmethod
    def zeros(cls, sizes, activation) -> "Network":
        sizes = tuple(int(s) for s in sizes)
        return cls(sizes, activation, np.zeros(param_count(sizes), dtype=np.float64))

    @property
    def in_dim(self) -> int:
        return self.sizes[0]

    @property
    def out_dim(self) -> int:
        return self.sizes[-1]

    @property
    def n_params(self) -> int:
        return self.flat.shape[0]

    def copy(self) -> "Network":
        return Network(self.sizes, self.activation, self.flat.copy())

    def forward(self, x) -> np.ndarray:
        """Single-vector forward pass."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1 or x.shape[0] != self.in_dim:
            raise DimensionError(f"input of length {x.shape} for in_dim {self.in_dim}")
        if not np.all(np.isfinite(x)):
            raise ValueError("non-finite network input")
        y, _ = backend.forward_batch(self.flat, self.sizes, self._act,
                                     np.ascontiguousarray(x[None, :]))
        return y[0]

    def forward_batch(self, x):
        """Batched forward pass. Returns (y, cache) for a later backward."""
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise DimensionError(f"batch shape {x.shape} for in_dim {self.in_dim}")
        return backend.forward_batch(self.flat, self.sizes, self._act, x)

    def backward_batch(self, cache, dy):
        """Gradient of sum(dy * output) wrt params and input, from a cache."""
        dy = np.ascontiguousarray(dy, dtype=np.float64)
        return backend.backward_batch(self.flat, self.sizes, self._act, cache, dy)

    def backward_input(self, cache, dy):
        """Input gradient only; cheaper when parameters are not updated."""
        dy = np.ascontiguousarray(dy, dtype=np.float64)
        return backend.backward_input(self.flat, self.sizes, self._act, cache, dy)

    def gradients(self, x, upstream) -> np.ndarray:
        """Flat gradient of ``upstream . output`` for one input vector."""
        x = np.ascontiguousarray(x, dtype=np.float64)
        upstream = np.asarray(upstream, dtype=np.float64)
        if upstream.shape != (self.out_dim,):
            raise DimensionError(
                f"upstream of shape {upstream.shape} for out_dim {self.out_dim}")
        _, cache = backend.forward_batch(self.flat, self.sizes, self._act, x[None, :])
        dparams, _ = backend.backward_batch(self.flat, self.sizes, self._act,
                                            cache, upstream[None, :])
        return dparams


@dataclass
class AdamState:
    """Adam moments for one parameter vector."""

    first_moment: np.ndarray
    second_moment: np.ndarray
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, n: int, beta1=0.9, beta2=0.999, eps=1e-8) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n), 0, beta1, beta2, eps)

    def copy(self) -> "AdamState":
        return AdamState(self.first_moment.copy(), self.second_moment.copy(),
                         self.step_count, self.beta1, self.beta2, self.eps)


def adam_step_inplace(params: np.ndarray, grads: np.ndarray, state: AdamState,
                      lr: float) -> None:
    """Bias-corrected Adam update applied in place. Refuses non-finite grads."""
    if grads.shape != params.shape:
        raise DimensionError(f"gradient shape {grads.shape} vs params {params.shape}")
    if not np.all(np.isfinite(grads)):
        raise FloatingPointError("non-finite gradient, update refused")
    state.step_count += 1
    backend.adam_update(params, np.ascontiguousarray(grads),
                        state.first_moment, state.second_moment,
                        state.step_count, lr, state.beta1, state.beta2, state.eps)


def adam_step(net: Network, grads: np.ndarray, state: AdamState, lr: float):
    """Functional Adam step: returns (new network, new state)."""
    out = net.copy()
    new_state = state.copy()
    adam_step_inplace(out.flat, np.asarray(grads, dtype=np.float64), new_state, lr)
    return out, new_state


def polyak_update_inplace(target: Network, online: Network, tau: float) -> None:
    if target.sizes != online.sizes:
        raise DimensionError("polyak update across different layer sizes")
    backend.polyak_update(target.flat, online.flat, tau)


def polyak_update(target: Network, online: Network, tau: float) -> Network:
    """target <- (1 - tau)*target + tau*online, returned as a new network."""
    out = target.copy()
    polyak_update_inplace(out, online, tau)
    return out


def save_network(net: Network, path) -> None:
    """Binary checkpoint: magic, JSON header, raw little-endian float64."""
    header = json.dumps({
        "sizes": list(net.sizes),
        "activation": net.activation,
        "param_count": net.n_params,
    }).encode()
    with open(path, "wb") as f:
        f.write(_CKPT_MAGIC)
        f.write(struct.pack("<I", len(header)))
        f.write(header)
        f.write(net.flat.astype("<f8", copy=False).tobytes())


def load_network(path) -> Network:
    with open(path, "rb") as f:
        magic = f.read(len(_CKPT_MAGIC))
        if magic != _CKPT_MAGIC:
            raise ValueError(f"not a network checkpoint: {path}")
        (hlen,) = struct.unpack("<I", f.read(4))
        header = json.loads(f.read(hlen).decode())
        data = f.read()
    flat = np.frombuffer(data, dtype="<f8").astype(np.float64)
    if flat.shape[0] != header["param_count"]:
        raise ValueError(f"checkpoint truncated: {path}")
    return Network(tuple(header["sizes"]), header["activation"], flat)
