"""Dense complex linear algebra for small qubit registers.

Everything in this package runs through ComplexMatrix: gate matrices,
encoders, channel atoms, realized circuits. Registers top out at eight
qubits (256 x 256), so matrices are stored dense in double precision and
all operations are plain numpy calls wrapped with dimension checks.

Bit convention used package-wide: in kron(a, b) the FIRST factor is the
most significant one (top wire of a circuit diagram, wire index 0).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerance:
    """Absolute per-entry bound used by comparison predicates."""

    epsilon: float

    def __post_init__(self):
        eps = float(self.epsilon)
        if not np.isfinite(eps) or eps < 0:
            raise ValueError(f"tolerance must be a finite non-negative real, got {self.epsilon!r}")
        object.__setattr__(self, "epsilon", eps)


def _eps(tol) -> float:
    if isinstance(tol, Tolerance):
        return tol.epsilon
    return Tolerance(float(tol)).epsilon


class ComplexMatrix:
    """Immutable dense complex matrix.

    Construct from a 2-D array-like, or from flat row-major entries plus
    explicit dimensions. Entries must all be finite.
    """

    __slots__ = ("_a",)

    def __init__(self, entries, dim_rows: int | None = None, dim_cols: int | None = None):
        a = np.asarray(entries, dtype=complex)
        if dim_rows is not None or dim_cols is not None:
            if dim_rows is None or dim_cols is None:
                raise ValueError("give both dim_rows and dim_cols or neither")
            if dim_rows <= 0 or dim_cols <= 0:
                raise ValueError("dimensions must be positive")
            if a.ndim != 1 or a.size != dim_rows * dim_cols:
                raise ValueError(
                    f"flat entries length {a.size} != dim_rows*dim_cols = {dim_rows * dim_cols}"
                )
            a = a.reshape(dim_rows, dim_cols)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
            raise ValueError("matrix entries must be finite (no NaN/Inf)")
        a = np.ascontiguousarray(a)
        a.setflags(write=False)
        object.__setattr__(self, "_a", a)

    @property
    def array(self) -> np.ndarray:
        """Read-only 2-D ndarray view of the matrix."""
        return self._a

    @property
    def dim_rows(self) -> int:
        return self._a.shape[0]

    @property
    def dim_cols(self) -> int:
        return self._a.shape[1]

    @property
    def entries(self) -> list[complex]:
        """Row-major entries as a flat list."""
        return self._a.reshape(-1).tolist()

    def __getitem__(self, key):
        return self._a[key]

    def __setattr__(self, name, value):
        raise AttributeError("ComplexMatrix is immutable")

    def __eq__(self, other):
        if not isinstance(other, ComplexMatrix):
            return NotImplemented
        return self._a.shape == other._a.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self):
        return hash((self._a.shape, self._a.tobytes()))

    def __repr__(self):
        return f"ComplexMatrix({self.dim_rows}x{self.dim_cols})"


def _as_array(m) -> np.ndarray:
    if isinstance(m, ComplexMatrix):
        return m.array
    return ComplexMatrix(m).array


def kron(a, b) -> ComplexMatrix:
    """Kronecker product; the first argument is the most significant factor."""
    return ComplexMatrix(np.kron(_as_array(a), _as_array(b)))


def matmul(a, b) -> ComplexMatrix:
    aa, bb = _as_array(a), _as_array(b)
    if aa.shape[1] != bb.shape[0]:
        raise ValueError(f"matmul dimension mismatch: {aa.shape} x {bb.shape}")
    return ComplexMatrix(aa @ bb)


def dagger(a) -> ComplexMatrix:
    return ComplexMatrix(_as_array(a).conj().T)


def is_unitary(a, tol) -> bool:
    aa = _as_array(a)
    if aa.shape[0] != aa.shape[1]:
        raise ValueError(f"is_unitary needs a square matrix, got {aa.shape}")
    dev = np.abs(aa.conj().T @ aa - np.eye(aa.shape[0])).max()
    return bool(dev <= _eps(tol))


def max_abs_diff(a, b) -> float:
    aa, bb = _as_array(a), _as_array(b)
    if aa.shape != bb.shape:
        raise ValueError(f"shape mismatch: {aa.shape} vs {bb.shape}")
    return float(np.abs(aa - bb).max())


def equal_up_to_global_phase(a, b, tol) -> bool:
    """Compare after aligning b's phase to a at a's largest-magnitude entry."""
    aa, bb = _as_array(a), _as_array(b)
    if aa.shape != bb.shape:
        raise ValueError(f"shape mismatch: {aa.shape} vs {bb.shape}")
    eps = _eps(tol)
    flat = np.argmax(np.abs(aa))
    pivot = aa.reshape(-1)[flat]
    if abs(pivot) == 0.0:
        return bool(np.abs(bb).max() <= eps)
    z = bb.reshape(-1)[flat] / pivot
    if abs(z) == 0.0:
        return False
    phase = z / abs(z)
    return bool(np.abs(phase * aa - bb).max() <= eps)


def matrix_to_text(m) -> str:
    """One row per line; entries as `re+imj`, whitespace separated, decimals only."""
    a = _as_array(m)
    lines = []
    for row in a:
        lines.append(" ".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in row))
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> ComplexMatrix:
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        rows.append([complex(tok) for tok in line.split()])
    if not rows:
        raise ValueError("empty matrix text")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged matrix text")
    return ComplexMatrix(rows)
