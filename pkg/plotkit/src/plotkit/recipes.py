"""Figure recipes: which files to draw, as what, into which image."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

KINDS = ("trajectory-pair", "sweep-envelope", "decoherence-overlay")


@dataclass(frozen=True)
class FigureRecipe:
    """One figure: a kind, its input CSVs, and the output image path.

    trajectory-pair stacks baseline-subtracted w_e and n_ph panels and
    overlays every input; sweep-envelope draws the w_e envelope of a
    single sweep table; decoherence-overlay overlays the w_e trace of
    each input, labeled by its dissipation rates.
    """

    kind: str
    inputs: tuple[Path, ...]
    output: Path
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "output", Path(self.output))
        if not self.inputs:
            raise ValueError("at least one input file is required")
        if self.kind == "sweep-envelope" and len(self.inputs) != 1:
            raise ValueError("sweep-envelope takes exactly one input table")
