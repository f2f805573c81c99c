"""Seeded generators for the simulated varying-coefficient designs."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, NamedTuple, Optional, Tuple

import numpy as np

from ..errors import InvalidSpec
from ..screening.dataset import Dataset
from .housing import augment_housing

logger = logging.getLogger(__name__)

EXAMPLES = ("ex1", "ex2", "ex3", "ex4", "housing_augment")
SNR_DRAWS = 100_000


@dataclass(frozen=True)
class SimSpec:
    """
    Simulation design.

    Attributes:
        example_id: One of EXAMPLES
        n: Training sample size
        p: Number of covariates
        s: Number of nonzero coefficients (ex1)
        t1: Covariate correlation control (ex2-ex4)
        t2: Covariate/exposure correlation control (ex2-ex4)
        t: Correlation control of the artificial predictors (housing_augment)
        seed: Base seed
        test_fraction: Test share of the combined sample; the default gives a test set of n/2
    """

    example_id: str = "ex3"
    n: int = 400
    p: int = 1000
    s: int = 4
    t1: float = 0.0
    t2: float = 0.0
    t: float = 2.0
    seed: int = 0
    test_fraction: float = 1.0 / 3.0

    def __post_init__(self):
        if self.example_id not in EXAMPLES:
            raise InvalidSpec(f"Unknown example {self.example_id!r}; expected one of {EXAMPLES}")
        if self.n < 1 or self.p < 1:
            raise InvalidSpec(f"n and p must be positive, got n={self.n}, p={self.p}")
        if not 0.0 <= self.test_fraction < 1.0:
            raise InvalidSpec(f"test_fraction must be in [0, 1), got {self.test_fraction}")
        if min(self.t1, self.t2, self.t) < 0:
            raise InvalidSpec("Correlation controls t, t1, t2 must be nonnegative")
        if self.example_id == "ex1" and not 0 <= self.s <= min(25, self.p):
            raise InvalidSpec(f"ex1 needs 0 <= s <= min(25, p), got s={self.s}")
        minimum_p = {"ex2": 3, "ex3": 4, "ex4": 8}.get(self.example_id, 1)
        if self.p < minimum_p:
            raise InvalidSpec(f"{self.example_id} needs p >= {minimum_p}, got {self.p}")

    @property
    def n_test(self) -> int:
        return int(round(self.n * self.test_fraction / (1.0 - self.test_fraction)))


class SimulatedData(NamedTuple):
    train: Dataset
    test: Dataset
    true_support: Tuple[int, ...]
    snr: float


# Each design returns (w, x) for n rows and p columns, and a signal function of (w, x).


def _ex1_covariates(rng: np.random.Generator, n: int, p: int, spec: SimSpec) -> Tuple[np.ndarray, np.ndarray]:
    s = spec.s
    n_corr = min(50, max(p - s, 0))
    x = rng.standard_normal((n, p))
    if n_corr:
        mix = sum((-1) ** j * x[:, j] / 5.0 for j in range(s)) if s else np.zeros(n)
        x[:, p - n_corr :] = mix[:, None] + np.sqrt(1.0 - s / 25.0) * x[:, p - n_corr :]
    w = rng.uniform(size=n)
    return w, x


def _ex1_signal(w: np.ndarray, x: np.ndarray, spec: SimSpec) -> np.ndarray:
    signs = np.array([(-1.0) ** j for j in range(spec.s)])
    return x[:, : spec.s] @ signs if spec.s else np.zeros(w.size)


def _ex2_covariates(rng: np.random.Generator, n: int, p: int, spec: SimSpec) -> Tuple[np.ndarray, np.ndarray]:
    u = rng.uniform(size=(n, p + 2))
    shared = u[:, [p]]
    x = (u[:, :p] + spec.t1 * shared) / (1.0 + spec.t1)
    w = (u[:, p + 1] + spec.t2 * shared[:, 0]) / (1.0 + spec.t2)
    return w, x


def _ex2_signal(w: np.ndarray, x: np.ndarray, spec: SimSpec) -> np.ndarray:
    return 5.0 * w * x[:, 0] + 3.0 * (2.0 * w - 1.0) ** 2 * x[:, 1] + 4.0 * np.sin(2 * np.pi * w) * x[:, 2]


def _normal_covariates(rng: np.random.Generator, n: int, p: int, spec: SimSpec) -> Tuple[np.ndarray, np.ndarray]:
    z = rng.standard_normal((n, p))
    u = rng.uniform(size=(n, 2))
    x = (z + spec.t1 * u[:, [0]]) / (1.0 + spec.t1)
    w = (u[:, 1] + spec.t2 * u[:, 0]) / (1.0 + spec.t2)
    return w, x


def _ex3_signal(w: np.ndarray, x: np.ndarray, spec: SimSpec) -> np.ndarray:
    sine = np.sin(2 * np.pi * w)
    return (
        2.0 * x[:, 0]
        + 3.0 * w * x[:, 1]
        + (w + 1.0) ** 2 * x[:, 2]
        + 4.0 * sine / (2.0 - sine) * x[:, 3]
    )


def _ex4_signal(w: np.ndarray, x: np.ndarray, spec: SimSpec) -> np.ndarray:
    return (
        3.0 * w * x[:, 0]
        + (w + 1.0) ** 2 * x[:, 1]
        + (w - 2.0) ** 3 * x[:, 2]
        + 3.0 * np.sin(2 * np.pi * w) * x[:, 3]
        + np.exp(w) * x[:, 4]
        + 2.0 * x[:, 5]
        + 2.0 * x[:, 6]
        + 3.0 * np.sqrt(w) * x[:, 7]
    )


Covariates = Callable[[np.random.Generator, int, int, SimSpec], Tuple[np.ndarray, np.ndarray]]
Signal = Callable[[np.ndarray, np.ndarray, SimSpec], np.ndarray]

_DESIGNS: Dict[str, Tuple[Covariates, Signal, float]] = {
    "ex1": (_ex1_covariates, _ex1_signal, 3.0),
    "ex2": (_ex2_covariates, _ex2_signal, 1.0),
    "ex3": (_normal_covariates, _ex3_signal, 1.0),
    "ex4": (_normal_covariates, _ex4_signal, 1.0),
}


def true_support(spec: SimSpec) -> Tuple[int, ...]:
    size = {"ex1": spec.s, "ex2": 3, "ex3": 4, "ex4": 8}[spec.example_id]
    return tuple(range(size))


def _draw(rng: np.random.Generator, n: int, p: int, spec: SimSpec) -> Dataset:
    covariates, signal, noise_var = _DESIGNS[spec.example_id]
    w, x = covariates(rng, n, p, spec)
    y = signal(w, x, spec) + np.sqrt(noise_var) * rng.standard_normal(n)
    return Dataset(y=y, w=w, x=x)


def signal_to_noise(spec: SimSpec, draws: int = SNR_DRAWS, seed: Optional[int] = None) -> float:
    """
    Monte Carlo var(beta(W)^T X) / var(eps).

    Only the support columns are drawn; every design generates them with the
    same distribution whatever p is.
    """
    covariates, signal, noise_var = _DESIGNS[spec.example_id]
    support = true_support(spec)
    if not support:
        return 0.0
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed if seed is None else seed, 2]))
    w, x = covariates(rng, draws, len(support), spec)
    return float(np.var(signal(w, x, spec)) / noise_var)


def generate(spec: SimSpec, raw: Optional[Dataset] = None) -> SimulatedData:
    """
    Draw a training and a test dataset for the given design.

    Simulated examples get an independent test draw of size spec.n_test from
    the same model. The housing design augments `raw` with artificial
    predictors and splits it at random into spec.n training rows and the rest.

    Args:
        spec: Design
        raw: Real dataset, required for housing_augment

    Returns:
        (train, test, true support, SNR)
    """
    train_seq, test_seq, split_seq = np.random.SeedSequence(spec.seed).spawn(3)

    if spec.example_id == "housing_augment":
        if raw is None:
            raise InvalidSpec("housing_augment needs the raw housing dataset")
        if spec.n >= raw.n:
            raise InvalidSpec(f"Training size {spec.n} leaves no test rows out of {raw.n}")
        augmented = augment_housing(raw, spec.p, spec.t, int(train_seq.generate_state(1)[0]))
        order = np.random.default_rng(split_seq).permutation(raw.n)
        train = augmented.take_rows(np.sort(order[: spec.n]))
        test = augmented.take_rows(np.sort(order[spec.n :]))
        return SimulatedData(train, test, tuple(range(raw.p)), float("nan"))

    train = _draw(np.random.default_rng(train_seq), spec.n, spec.p, spec)
    test = _draw(np.random.default_rng(test_seq), max(spec.n_test, 1), spec.p, spec)
    snr = signal_to_noise(spec)
    logger.debug(f"Generated {spec.example_id}: n={spec.n}, p={spec.p}, SNR={snr:.3f}")
    return SimulatedData(train, test, true_support(spec), snr)
