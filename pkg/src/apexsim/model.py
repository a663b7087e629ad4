"""Plain data types shared by the disk model and the ranking engine."""

from dataclasses import dataclass

# Neighborhood kinds. "grid-row" treats every other block in the same row of the
# rows x cols grid as adjacent (track/sector analog). "contiguous" uses a window
# of +/- span addresses. "none" models random-access media: no spatial term at all.
GRID_ROW = "grid-row"
CONTIGUOUS = "contiguous"
NONE = "none"

# Spatial scores are a recomputed neighbor mean of full priority scores, which is
# a positive feedback loop at spatial weights >= 2. Clamp keeps long exploratory
# runs finite; no sanctioned run gets anywhere near it.
SF_LIMIT = 1e12


@dataclass(frozen=True)
class Neighborhood:
    kind: str
    span: int = 0

    def __post_init__(self):
        if self.kind not in (GRID_ROW, CONTIGUOUS, NONE):
            raise ValueError(f"unknown neighborhood kind: {self.kind!r}")
        if self.kind == CONTIGUOUS and self.span < 1:
            raise ValueError("contiguous neighborhood needs span >= 1")

    @classmethod
    def grid_row(cls) -> "Neighborhood":
        return cls(GRID_ROW)

    @classmethod
    def contiguous(cls, span: int) -> "Neighborhood":
        return cls(CONTIGUOUS, span)

    @classmethod
    def none(cls) -> "Neighborhood":
        return cls(NONE)

    @classmethod
    def parse(cls, text: str) -> "Neighborhood":
        """Accepts "grid-row", "none", or "contiguous:<span>"."""
        text = text.strip().lower()
        if text == GRID_ROW:
            return cls.grid_row()
        if text == NONE:
            return cls.none()
        if text.startswith(CONTIGUOUS):
            _, _, rest = text.partition(":")
            if rest:
                try:
                    return cls.contiguous(int(rest))
                except ValueError:
                    pass
        raise ValueError(f"cannot parse neighborhood: {text!r}")

    def __str__(self) -> str:
        if self.kind == CONTIGUOUS:
            return f"{CONTIGUOUS}:{self.span}"
        return self.kind


@dataclass(frozen=True)
class DiskGeometry:
    """Static shape of the modeled device.

    Addresses are row-major: block (r, c) lives at address r * cols + c.
    """

    rows: int
    cols: int
    block_size_bytes: int = 4096
    neighborhood: Neighborhood = Neighborhood.grid_row()

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("geometry needs at least one row and one column")
        if self.block_size_bytes < 1:
            raise ValueError("block size must be positive")

    @property
    def total_blocks(self) -> int:
        return self.rows * self.cols

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "block_size_bytes": self.block_size_bytes,
            "neighborhood": str(self.neighborhood),
        }


@dataclass(frozen=True)
class Hyperparams:
    """Ranking coefficients: weights on the history, usage, spatial and linking
    factors of the block score. The tuner walks an integer lattice of these."""

    hist: int
    usage: int
    spatial: int
    link: int

    LATTICE_MIN = 1
    LATTICE_MAX = 10

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.hist, self.usage, self.spatial, self.link)

    @classmethod
    def from_tuple(cls, t) -> "Hyperparams":
        h, u, s, l = t
        return cls(int(h), int(u), int(s), int(l))

    @classmethod
    def parse(cls, text: str) -> "Hyperparams":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected 4 comma-separated coefficients, got {text!r}")
        return cls.from_tuple(int(p) for p in parts)

    def in_lattice(self) -> bool:
        return all(
            self.LATTICE_MIN <= c <= self.LATTICE_MAX for c in self.as_tuple()
        )


@dataclass
class BlockFactors:
    """Per-block ranking inputs.

    hf counts sibling delete/overwrite churn while the block sits unused.
    uf counts accesses of the owning file (frozen once the block is freed).
    sf is the recomputed neighbor mean of full scores, 0 while used.
    lf is the binary linkage flag of the last owning file's format class.
    """

    hf: int
    uf: int
    sf: float
    lf: int


@dataclass
class MrpfRecord:
    """Most recent parent file of a block: which file last owned it, the full
    sibling set allocated to that file, and the content epoch of this block's
    payload while that file owned it. Drives churn propagation and recovery."""

    file_id: int
    siblings: frozenset
    content_epoch: int
