"""Labelled input-to-output velocity matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .exact import ExactScalar, as_exact, evaluate, format_scalar, substitute, symbols_of


@dataclass(frozen=True)
class TransferMatrix:
    """Output joint velocities = entries . input joint velocities.

    ``row_joints`` / ``col_joints`` name the turning joint behind each row and
    column, so matrices from different methods can be aligned.
    """

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    entries: tuple[tuple[ExactScalar, ...], ...]
    row_joints: tuple[int, ...]
    col_joints: tuple[int, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_labels), len(self.col_labels)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def apply(self, v: Sequence) -> list[ExactScalar]:
        return [as_exact(sum((a * x for a, x in zip(row, v)), 0)) for row in self.entries]

    def map(self, fn: Callable[[ExactScalar], ExactScalar]) -> TransferMatrix:
        rows = tuple(tuple(as_exact(fn(x)) for x in row) for row in self.entries)
        return TransferMatrix(self.row_labels, self.col_labels, rows, self.row_joints, self.col_joints)

    def evaluate(self, bindings: Mapping[str, object]) -> TransferMatrix:
        return self.map(lambda x: evaluate(x, bindings))

    def substitute(self, mapping: Mapping[str, object], target=None) -> TransferMatrix:
        return self.map(lambda x: substitute(x, mapping, target))

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for row in self.entries:
            for x in row:
                out |= symbols_of(x)
        return out

    def aligned(self, row_joints: Sequence[int], col_joints: Sequence[int]) -> TransferMatrix:
        """Permute rows and columns into the given joint order."""
        ri = [self.row_joints.index(j) for j in row_joints]
        ci = [self.col_joints.index(j) for j in col_joints]
        return TransferMatrix(
            tuple(self.row_labels[i] for i in ri),
            tuple(self.col_labels[j] for j in ci),
            tuple(tuple(self.entries[i][j] for j in ci) for i in ri),
            tuple(row_joints),
            tuple(col_joints),
        )

    def first_difference(self, other: TransferMatrix):
        """None if entrywise equal, else (row, col, mine, theirs)."""
        if self.shape != other.shape:
            return ("shape", "shape", self.shape, other.shape)
        for i, (ra, rb) in enumerate(zip(self.entries, other.entries)):
            for j, (a, b) in enumerate(zip(ra, rb)):
                if not (a == b):
                    return (i, j, a, b)
        return None

    def formatted(self) -> list[list[str]]:
        return [[format_scalar(x) for x in row] for row in self.entries]

    def to_dict(self) -> dict:
        return {
            "rows": list(self.row_labels),
            "cols": list(self.col_labels),
            "row_joints": list(self.row_joints),
            "col_joints": list(self.col_joints),
            "entries": self.formatted(),
        }
