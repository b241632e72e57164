"""Learning Module

Fits an implicit generative model by stochastic ascent on the smoothed
t-statistic between data and generated samples. Gradients are assembled in
reverse mode: t-statistic -> marginals -> distances -> points -> generator
parameters.
"""

import logging
from enum import Enum
from functools import partial
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from ..exceptions import ParameterError, TrainingDivergedError
from ..geometry import EdgeMode, PointSample, pairwise_distances, pool_samples, pullback_to_points
from ..inference import (
    knn_marginals,
    knn_marginals_vjp,
    null_moments,
    st_marginals,
    st_marginals_vjp,
    t_statistic,
    t_statistic_cotangent,
)
from ..test_management import TestKind
from .datasets import two_moons

logger = logging.getLogger(__name__)

LOSS_COLUMNS = ["step", "loss", "t_stat"]


class Architecture(str, Enum):
    AFFINE = "affine"
    TANH = "tanh"


class GeneratorParams(BaseModel):
    """Generator weights: [W1, b1] (affine) or [W1, b1, W2, b2] (one tanh hidden layer)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    architecture: Architecture
    noise_dim: int = Field(ge=1)
    output_dim: int = Field(ge=1)
    width: Optional[int] = Field(default=None, ge=1)
    weights: List[np.ndarray]

    @model_validator(mode="after")
    def _check_shapes(self) -> "GeneratorParams":
        expected = self.shapes()
        if len(self.weights) != len(expected):
            raise ValueError(f"{self.architecture.value} generator needs {len(expected)} weight arrays")
        for array, shape in zip(self.weights, expected):
            if array.shape != shape:
                raise ValueError(f"Weight shape {array.shape} does not match {shape}")
            if not np.all(np.isfinite(array)):
                raise ValueError("Generator weights must be finite")
        return self

    @field_serializer("weights")
    def _as_lists(self, weights: List[np.ndarray]) -> list:
        return [array.tolist() for array in weights]

    def shapes(self) -> List[Tuple[int, ...]]:
        if self.architecture is Architecture.AFFINE:
            return [(self.noise_dim, self.output_dim), (self.output_dim,)]
        if self.width is None:
            raise ValueError("tanh generator needs a width")
        return [(self.noise_dim, self.width), (self.width,), (self.width, self.output_dim), (self.output_dim,)]

    def as_vector(self) -> np.ndarray:
        return np.concatenate([array.ravel() for array in self.weights])

    def with_vector(self, vector: np.ndarray) -> "GeneratorParams":
        """Same architecture with weights read from a flat vector."""
        weights, offset = [], 0
        for shape in self.shapes():
            size = int(np.prod(shape))
            weights.append(np.array(vector[offset:offset + size], dtype=float).reshape(shape))
            offset += size
        if offset != len(vector):
            raise ParameterError(f"Expected {offset} parameters, got {len(vector)}")
        return self.model_copy(update={"weights": weights})


class Generator:
    """Maps noise z to samples x = f_theta(z) and back-propagates through f_theta."""

    def __init__(self, params: GeneratorParams):
        self.params = params

    @classmethod
    def initialize(cls, architecture: Architecture, noise_dim: int, output_dim: int,
                   rng: np.random.Generator, width: Optional[int] = None) -> "Generator":
        """Gaussian weights scaled by 1 / sqrt(fan-in), zero biases."""
        architecture = Architecture(architecture)
        if architecture is Architecture.AFFINE:
            weights = [rng.standard_normal((noise_dim, output_dim)) / np.sqrt(noise_dim), np.zeros(output_dim)]
        else:
            if width is None:
                raise ParameterError("tanh generator needs a width")
            weights = [rng.standard_normal((noise_dim, width)) / np.sqrt(noise_dim), np.zeros(width),
                       rng.standard_normal((width, output_dim)) / np.sqrt(width), np.zeros(output_dim)]
        return cls(GeneratorParams(architecture=architecture, noise_dim=noise_dim, output_dim=output_dim,
                                   width=width, weights=weights))

    def forward(self, z: np.ndarray) -> Tuple[np.ndarray, tuple]:
        """Return samples and the cache needed by ``backward``."""
        weights = self.params.weights
        if self.params.architecture is Architecture.AFFINE:
            return z @ weights[0] + weights[1], (z,)
        hidden = np.tanh(z @ weights[0] + weights[1])
        return hidden @ weights[2] + weights[3], (z, hidden)

    def backward(self, cache: tuple, grad_x: np.ndarray) -> np.ndarray:
        """Flat parameter gradient given the gradient with respect to the samples."""
        weights = self.params.weights
        z = cache[0]
        if self.params.architecture is Architecture.AFFINE:
            grads = [z.T @ grad_x, grad_x.sum(axis=0)]
        else:
            hidden = cache[1]
            grad_hidden = (grad_x @ weights[2].T) * (1.0 - hidden ** 2)
            grads = [z.T @ grad_hidden, grad_hidden.sum(axis=0), hidden.T @ grad_x, grad_x.sum(axis=0)]
        return np.concatenate([grad.ravel() for grad in grads])

    def sample(self, z: np.ndarray) -> np.ndarray:
        return self.forward(z)[0]


class AdamConfig(BaseModel):
    lr: float = Field(default=1e-4, gt=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    eps: float = Field(default=1e-8, gt=0)


class AdamOptimizer:
    """Adam with bias-corrected first and second moment estimates (minimizes)."""

    def __init__(self, cfg: AdamConfig, size: int):
        self.cfg = cfg
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, x: np.ndarray, grad: np.ndarray) -> np.ndarray:
        cfg = self.cfg
        self.t += 1
        self.m = cfg.beta1 * self.m + (1.0 - cfg.beta1) * grad
        self.v = cfg.beta2 * self.v + (1.0 - cfg.beta2) * grad ** 2
        m_hat = self.m / (1.0 - cfg.beta1 ** self.t)
        v_hat = self.v / (1.0 - cfg.beta2 ** self.t)
        return x - cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.eps)


def objective_and_gradient(params: GeneratorParams, z: np.ndarray, real: np.ndarray, test: TestKind,
                           lam: float, k: int = 3) -> Tuple[float, np.ndarray, float]:
    """Loss -t between ``real`` (first sample) and generated points, with its parameter gradient.

    Args:
        params: Generator parameters
        z: Noise batch, one row per generated point
        real: Data batch
        test: ``fr-smooth`` or ``knn-smooth``
        lam: Temperature
        k: Neighbours for ``knn-smooth``

    Returns:
        (loss, flat gradient of the loss, t-statistic)
    """
    generator = Generator(params)
    generated, cache = generator.forward(z)
    data = pool_samples(PointSample.from_array(real), PointSample.from_array(generated))
    if TestKind(test) is TestKind.FR_SMOOTH:
        es = pairwise_distances(data.sample, mode=EdgeMode.UNDIRECTED)
        mu, m = st_marginals(es, lam), data.n - 1
        vjp = partial(st_marginals_vjp, es, lam)
    elif TestKind(test) is TestKind.KNN_SMOOTH:
        es = pairwise_distances(data.sample, mode=EdgeMode.DIRECTED)
        mu, m = knn_marginals(es, lam, k), k * data.n
        vjp = partial(knn_marginals_vjp, es, lam, k)
    else:
        raise ParameterError(f"Learning needs a smoothed test, got {test}")

    moments = null_moments(mu, es, data.n1, data.n2, m)
    crossing = es.crossing(data.labels)
    T = float(crossing @ mu.values)
    t = t_statistic(T, moments)
    cotangent = t_statistic_cotangent(T, moments, crossing, mu, es, data.n1, data.n2)
    grad_points = pullback_to_points(data.points, es, vjp(cotangent))
    grad_params = generator.backward(cache, grad_points[data.n1:])
    return -t, -grad_params, t


class LearnConfig(BaseModel):
    """Two-moons learning run."""

    test: TestKind = TestKind.FR_SMOOTH
    lam: float = Field(default=1.0, gt=0)
    k: int = Field(default=3, ge=1)
    batch: int = Field(default=256, ge=2)
    steps: int = Field(default=500, ge=0)
    adam: AdamConfig = Field(default_factory=AdamConfig)
    architecture: Architecture = Architecture.AFFINE
    width: int = Field(default=32, ge=1)
    noise_dim: int = Field(default=10, ge=1)
    noise: float = Field(default=0.05, ge=0)
    seed: int = 0

    @field_validator("test")
    @classmethod
    def _smoothed(cls, value: TestKind) -> TestKind:
        if value not in (TestKind.FR_SMOOTH, TestKind.KNN_SMOOTH):
            raise ValueError(f"learning needs a smoothed test, got {value.value}")
        return value


class LearnResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    initial: GeneratorParams
    params: GeneratorParams
    samples: np.ndarray
    loss_trace: pd.DataFrame


def initial_generator(cfg: LearnConfig) -> Generator:
    rng = np.random.default_rng([cfg.seed, 0])
    width = cfg.width if cfg.architecture is Architecture.TANH else None
    return Generator.initialize(cfg.architecture, cfg.noise_dim, 2, rng, width=width)


def _batch(cfg: LearnConfig, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    real = two_moons(cfg.batch, cfg.noise, rng).points
    return real, rng.standard_normal((cfg.batch, cfg.noise_dim))


def learn_toy(cfg: LearnConfig) -> LearnResult:
    """Train a generator on two moons.

    Step ``s`` draws its data and noise from ``default_rng([seed, 1, s])``.

    Returns:
        Initial and final parameters, a generated sample and the loss trace

    Raises:
        TrainingDivergedError: If the loss or its gradient becomes non-finite
    """
    generator = initial_generator(cfg)
    initial = generator.params
    optimizer = AdamOptimizer(cfg.adam, initial.as_vector().size)
    vector = initial.as_vector()
    trace = []
    for step in range(cfg.steps):
        real, z = _batch(cfg, np.random.default_rng([cfg.seed, 1, step]))
        loss, grad, t = objective_and_gradient(generator.params, z, real, cfg.test, cfg.lam, cfg.k)
        if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
            logger.error(f"Training diverged at step {step}")
            raise TrainingDivergedError(step, loss)
        vector = optimizer.step(vector, grad)
        generator = Generator(generator.params.with_vector(vector))
        trace.append({"step": step, "loss": loss, "t_stat": t})
        if step % 50 == 0:
            logger.info(f"step {step}: loss {loss:.5f}")

    z = np.random.default_rng([cfg.seed, 2]).standard_normal((cfg.batch, cfg.noise_dim))
    return LearnResult(initial=initial, params=generator.params, samples=generator.sample(z),
                       loss_trace=pd.DataFrame(trace, columns=LOSS_COLUMNS))


def mean_t_statistic(params: GeneratorParams, cfg: LearnConfig, batches: int = 20, seed: int = 0) -> float:
    """Mean smoothed t-statistic over held-out batches drawn from ``default_rng([seed, 3, b])``."""
    values = []
    for b in range(batches):
        real, z = _batch(cfg, np.random.default_rng([seed, 3, b]))
        values.append(objective_and_gradient(params, z, real, cfg.test, cfg.lam, cfg.k)[2])
    return float(np.mean(values))
