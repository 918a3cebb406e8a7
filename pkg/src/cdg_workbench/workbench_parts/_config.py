import argparse
import logging
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Tuple

import numpy as np

from ..errors import ParseError
from ..exact_linear import DEFAULT_FIELD, Field, parse_field
from ..logger import get_logger

logger = get_logger(__name__)
logger.setLevel(logging.NOTSET)
logger.propagate = True

DEFAULT_WINDOW = (-4, 4)
OUTPUT_FORMATS = ("human", "json")
RECIPES = ("gamma_sum", "free_sum", "forget", "cone", "cone_identity", "twist")


def parse_window(text: str) -> Tuple[int, int]:
    """Parses a ``d0:d1`` degree window."""
    lo, sep, hi = text.partition(":")
    if not sep:
        raise ParseError("window must look like d0:d1", {"window": text})
    try:
        window = (int(lo), int(hi))
    except ValueError as exc:
        raise ParseError("window bounds must be integers", {"window": text}) from exc
    if window[0] > window[1]:
        raise ParseError("window is empty", {"window": text})
    return window


def child_seed(seed: int, index: int) -> int:
    """Deterministic per-instance seed derived from the run seed."""
    state = np.random.SeedSequence([seed, index]).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 32 | int(state[1])


@dataclass(frozen=True)
class WorkbenchConfig:
    field: Field = DEFAULT_FIELD
    seed: int = 0
    count: int = 100
    window: Tuple[int, int] = DEFAULT_WINDOW
    stages: int = 3
    output_format: str = "human"
    out: Optional[str] = None

    def __post_init__(self) -> None:
        if self.output_format not in OUTPUT_FORMATS:
            raise ParseError("unknown output format", {"format": self.output_format})
        if self.count < 0:
            raise ParseError("count must be nonnegative", {"count": self.count})
        if self.stages < 1:
            raise ParseError("at least one stage is required", {"stages": self.stages})

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "WorkbenchConfig":
        """Builds the configuration from parsed command-line flags."""
        config = cls(
            field=parse_field(args.field),
            seed=args.seed,
            count=args.count,
            window=parse_window(args.window),
            stages=args.stages,
            output_format=args.format,
            out=args.out,
        )
        logger.debug(
            "config: field=%s seed=%d count=%d window=%s stages=%d",
            config.field.name,
            config.seed,
            config.count,
            config.window,
            config.stages,
        )
        return config


@dataclass(frozen=True)
class RandomModulePolicy:
    """Size bound and recipe weights for random module generation."""

    max_dim: int = 40
    weights: Mapping[str, float] = field(
        default_factory=lambda: {
            "gamma_sum": 3.0,
            "free_sum": 1.0,
            "forget": 2.0,
            "cone": 2.0,
            "cone_identity": 1.0,
            "twist": 1.0,
        }
    )
    max_order: int = 3
    max_summands: int = 3
    max_depth: int = 2

    def __post_init__(self) -> None:
        unknown = set(self.weights) - set(RECIPES)
        if unknown:
            raise ParseError("unknown recipe", {"recipes": ", ".join(sorted(unknown))})
        if not any(w > 0 for w in self.weights.values()):
            raise ParseError("at least one recipe needs a positive weight")

    def with_weights(self, **weights: float) -> "RandomModulePolicy":
        merged = {**{r: 0.0 for r in RECIPES}, **weights}
        return replace(self, weights=merged)

    def probabilities(self) -> Tuple[Tuple[str, ...], np.ndarray]:
        names = tuple(r for r in RECIPES if self.weights.get(r, 0.0) > 0)
        p = np.array([float(self.weights[r]) for r in names])
        return names, p / p.sum()
