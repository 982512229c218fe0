"""Monotone network core: parameters, bounded-ReLU forward pass, and the
two-uniform mixture initialization scheme.

The network maps [0,1]^m -> R_+ through hidden layers with non-negative
weights, non-positive biases and bounded-ReLU activations min(t, max(0, x)),
plus an optional non-negative linear skip from input to output.  These sign
constraints make every valid parameter set monotone in each input coordinate
by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


def brelu(x, t):
    """Bounded ReLU min(t, max(0, x)); `t` must be positive."""
    t_arr = np.asarray(t, dtype=np.float64)
    if (t_arr <= 0).any():
        raise InvalidInputError("bounded-ReLU cutoff must be positive")
    return np.clip(x, 0.0, t_arr)


def brelu_subgrad(x, t):
    """Subgradient of brelu wrt its input: 1 on the open interval (0, t)."""
    x = np.asarray(x, dtype=np.float64)
    return ((x > 0) & (x < np.asarray(t))).astype(np.float64)


@dataclass
class MvnnParams:
    """Parameters of one monotone network.

    ``weights`` holds W^1..W^K (K = len(weights)); ``biases`` and ``cutoffs``
    cover the K-1 hidden layers only (per-neuron cutoffs).  ``skip`` is an
    optional non-negative (m,) vector added linearly to the output.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    cutoffs: list[np.ndarray]
    skip: np.ndarray | None = None

    def __post_init__(self):
        self.weights = [np.asarray(w, dtype=np.float64) for w in self.weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in self.biases]
        self.cutoffs = [np.asarray(t, dtype=np.float64) for t in self.cutoffs]
        if self.skip is not None:
            self.skip = np.asarray(self.skip, dtype=np.float64).ravel()
        self.validate()

    def validate(self) -> None:
        K = len(self.weights)
        if K < 1:
            raise InvalidInputError("need at least an output layer")
        if len(self.biases) != K - 1 or len(self.cutoffs) != K - 1:
            raise InvalidInputError("biases/cutoffs must cover exactly the hidden layers")
        for k, W in enumerate(self.weights):
            if W.ndim != 2:
                raise InvalidInputError("weights must be matrices")
            if (W < 0).any():
                raise InvalidInputError(f"negative weight in layer {k + 1}")
            if k > 0 and W.shape[1] != self.weights[k - 1].shape[0]:
                raise InvalidInputError("inconsistent layer dimensions")
        if self.weights[-1].shape[0] != 1:
            raise InvalidInputError("output layer must have a single neuron")
        for k, b in enumerate(self.biases):
            if b.shape != (self.weights[k].shape[0],):
                raise InvalidInputError("bias shape mismatch")
            if (b > 0).any():
                raise InvalidInputError(f"positive bias in layer {k + 1}")
        for k, t in enumerate(self.cutoffs):
            if t.shape != (self.weights[k].shape[0],):
                raise InvalidInputError("cutoff shape mismatch")
            if (t <= 0).any():
                raise InvalidInputError(f"non-positive cutoff in layer {k + 1}")
        if self.skip is not None:
            if self.skip.shape != (self.m,):
                raise InvalidInputError("skip weights must have shape (m,)")
            if (self.skip < 0).any():
                raise InvalidInputError("negative skip weight")

    @property
    def m(self) -> int:
        return self.weights[0].shape[1]

    @property
    def num_hidden(self) -> int:
        return len(self.weights) - 1

    @property
    def layer_dims(self) -> list[int]:
        return [self.m] + [W.shape[0] for W in self.weights]

    def copy(self) -> "MvnnParams":
        return MvnnParams(
            weights=[W.copy() for W in self.weights],
            biases=[b.copy() for b in self.biases],
            cutoffs=[t.copy() for t in self.cutoffs],
            skip=None if self.skip is None else self.skip.copy(),
        )

    def forward(self, x) -> float | np.ndarray:
        """Evaluate the network on a single input (m,) or a batch (B, m)."""
        arr = np.asarray(x, dtype=np.float64)
        single = arr.ndim == 1
        z = arr.reshape(1, -1) if single else arr
        if z.shape[1] != self.m:
            raise InvalidInputError(f"input length {z.shape[1]} != {self.m}")
        inp = z
        for k in range(self.num_hidden):
            z = brelu(z @ self.weights[k].T + self.biases[k], self.cutoffs[k])
        out = (z @ self.weights[-1].T).ravel()
        if self.skip is not None:
            out = out + inp @ self.skip
        return float(out[0]) if single else out

    def evaluator(self):
        """Batch evaluator closure for the winner-determination solvers."""
        return self.forward

    def to_json_obj(self) -> dict:
        return {
            "layer_dims": self.layer_dims,
            "weights": [W.tolist() for W in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "cutoffs": [t.tolist() for t in self.cutoffs],
            "skip": None if self.skip is None else self.skip.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "MvnnParams":
        return cls(
            weights=[np.asarray(W) for W in obj["weights"]],
            biases=[np.asarray(b) for b in obj["biases"]],
            cutoffs=[np.asarray(t) for t in obj["cutoffs"]],
            skip=None if obj.get("skip") is None else np.asarray(obj["skip"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "MvnnParams":
        return cls.from_json_obj(json.loads(text))


# ---------------------------------------------------------------------------
# Initialization
# ---------------------------------------------------------------------------


@dataclass
class InitHyper:
    """Hyperparameters of the mixture initialization."""

    e_init: float = 1.0
    v_init: float = 0.05
    b_init: float = 0.05
    bias_init: float = 0.05
    eps_little: float = 0.1

    def __post_init__(self):
        if self.e_init <= 0 or self.v_init <= 0:
            raise InvalidInputError("e_init and v_init must be positive")
        if min(self.b_init, self.bias_init, self.eps_little) < 0:
            raise InvalidInputError("init hyperparameters must be non-negative")

    @property
    def m_k(self) -> float:
        # target mean of a pre-activated neuron before the bias correction
        return self.e_init + self.bias_init / 2.0


def mixture_params(d_prev: int, hyper: InitHyper) -> tuple[float, float, float]:
    """Mixture parameters (A, B, p) for a layer with fan-in ``d_prev``.

    Weights are drawn from Unif[0, A] with probability 1-p and Unif[0, B]
    with probability p, tuned so a pre-activated neuron keeps constant
    conditional mean e_init and (for wide layers) variance v_init.
    """
    if d_prev < 1:
        raise InvalidInputError("fan-in must be at least 1")
    d = float(d_prev)
    mk = hyper.m_k
    v = hyper.v_init
    if d <= mk * mk / (3.0 * v):
        # narrow layer: a single uniform with the right mean; variance >= v
        return 0.0, 2.0 * mk / d, 1.0
    b = max((3 * mk * mk + 3 * d * v) / (2 * mk * d) + hyper.eps_little / d, hyper.b_init)
    p = 1.0 - (b * b * d * d - 4 * b * mk * d + 4 * mk * mk) / (
        b * b * d * d - 4 * b * mk * d + 3 * mk * mk + 3 * d * v
    )
    a = (2 * mk - b * d * p) / (d * (1.0 - p))
    return a, b, p


def sample_mixture(d_out: int, d_prev: int, hyper: InitHyper, rng: np.random.Generator) -> np.ndarray:
    a, b, p = mixture_params(d_prev, hyper)
    big = rng.random((d_out, d_prev)) < p
    w = np.where(
        big,
        rng.uniform(0.0, b, size=(d_out, d_prev)),
        rng.uniform(0.0, a if a > 0 else 1.0, size=(d_out, d_prev)) * (a > 0),
    )
    return w


def init_params(
    layer_dims: list[int],
    hyper: InitHyper,
    cutoff_range: tuple[float, float] = (0.0, 1.0),
    seed: int | np.random.Generator = 0,
    skip: bool = False,
) -> MvnnParams:
    """Sample a fresh parameter set; deterministic for a fixed seed.

    ``layer_dims`` is [m, d_1, ..., d_{K-1}, 1].
    """
    if len(layer_dims) < 2 or layer_dims[-1] != 1:
        raise InvalidInputError("layer_dims must end in an output dimension of 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    lo, hi = cutoff_range
    weights, biases, cutoffs = [], [], []
    for k in range(1, len(layer_dims)):
        d_out, d_prev = layer_dims[k], layer_dims[k - 1]
        weights.append(sample_mixture(d_out, d_prev, hyper, rng))
        if k < len(layer_dims) - 1:
            biases.append(-rng.uniform(0.0, hyper.bias_init, size=d_out))
            t = rng.uniform(lo, hi, size=d_out)
            cutoffs.append(np.maximum(t, 1e-3))
    skip_w = rng.uniform(0.0, 1.0 / layer_dims[0], size=layer_dims[0]) if skip else None
    return MvnnParams(weights=weights, biases=biases, cutoffs=cutoffs, skip=skip_w)


def init_params_generic(
    layer_dims: list[int],
    cutoff_range: tuple[float, float] = (0.0, 1.0),
    seed: int | np.random.Generator = 0,
) -> MvnnParams:
    """Fan-in 1/sqrt(d) uniform initialization folded onto the non-negative
    axis; the classic scaling whose pre-activations blow past the cutoffs."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    lo, hi = cutoff_range
    weights, biases, cutoffs = [], [], []
    for k in range(1, len(layer_dims)):
        d_out, d_prev = layer_dims[k], layer_dims[k - 1]
        weights.append(rng.uniform(0.0, 2.0 / np.sqrt(d_prev), size=(d_out, d_prev)))
        if k < len(layer_dims) - 1:
            biases.append(np.zeros(d_out))
            cutoffs.append(np.maximum(rng.uniform(lo, hi, size=d_out), 1e-3))
    return MvnnParams(weights=weights, biases=biases, cutoffs=cutoffs)


def random_containment_pair(m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """A random pair of bundles with the first contained in the second."""
    big = (rng.random(m) < 0.6).astype(np.int64)
    keep = rng.random(m) < 0.5
    small = big * keep
    return small, big
