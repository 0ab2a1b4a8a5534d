"""Encoders and verification for fully-correlated noise W applied to every wire.

The channel model: rho -> sum_i p_i (W_i tensored over all wires) rho (...)^dagger
with a finite list of unitary atoms W_i. The 8x8 encoder conjugates any such
three-wire attack into block form whose upper block acts as identity-tensor-W,
so a data qubit parked on wire 1 rides through untouched while wire 2 absorbs
one copy of W and wire 0 stays |0>.

Wire roles for the three-wire scheme (wire 0 = top = most significant):
  wire 0: fixed |0> ancilla, returns to |0> exactly
  wire 1: protected data qubit
  wire 2: sink qubit, picks up one application of the attack unitary

The recursive scheme chains the same encoder over 2k+1 wires to protect k
data qubits (odd wires), with the sink still on wire 2 and every remaining
even wire returning to |0>.

NEW_U_ENTRIES / OLD_U_ENTRIES are deliberately plain mutable tables so a
test harness can corrupt one entry and confirm the verification battery
notices (see cli.cmd_verify).
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .circuit import (
    Circuit,
    DensityMatrix,
    StateVector,
    basis_state,
    fidelity,
    partial_trace,
    tensor,
    to_density,
)
from .gates import CNOT, Gate, PlacedGate, X, Z, controlled, ry, ry_x, x_ry
from .linalg import ComplexMatrix, is_unitary

_S13 = np.sqrt(1.0 / 3.0)
_S23 = np.sqrt(2.0 / 3.0)
_S16 = np.sqrt(1.0 / 6.0)
_S12 = np.sqrt(1.0 / 2.0)

# Corrected encoder: protects wire 1 for arbitrary attack unitaries.
NEW_U_ENTRIES = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0],
    [_S23, 0.0, 0.0, 0.0, _S13, 0.0, 0.0, 0.0],
    [-_S16, 0.0, _S12, 0.0, _S13, 0.0, 0.0, 0.0],
    [0.0, _S16, 0.0, _S12, 0.0, -_S13, 0.0, 0.0],
    [-_S16, 0.0, -_S12, 0.0, _S13, 0.0, 0.0, 0.0],
    [0.0, _S16, 0.0, -_S12, 0.0, -_S13, 0.0, 0.0],
    [0.0, -_S23, 0.0, 0.0, 0.0, -_S13, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
]

# Earlier published encoder; differs from the corrected one only in the
# last four columns. Kept for comparison and for the refutation check.
OLD_U_ENTRIES = [
    [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
    [_S23, 0.0, 0.0, 0.0, 0.0, _S13, 0.0, 0.0],
    [-_S16, 0.0, _S12, 0.0, 0.0, _S13, 0.0, 0.0],
    [0.0, _S16, 0.0, _S12, 0.0, 0.0, _S13, 0.0],
    [-_S16, 0.0, -_S12, 0.0, 0.0, _S13, 0.0, 0.0],
    [0.0, _S16, 0.0, -_S12, 0.0, 0.0, _S13, 0.0],
    [0.0, -_S23, 0.0, 0.0, 0.0, 0.0, _S13, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
]

# Rotation angle whose half-sine is sqrt(1/3); both decompositions mix the
# data and sink amplitudes through it.
THIRD_ANGLE = float(np.arcsin(np.sqrt(1.0 / 3.0)))

ANCILLA_WIRE = 0
DATA_WIRE = 1
SINK_WIRE = 2


def build_old_U() -> ComplexMatrix:
    """Earlier published 8x8 encoder (reads the mutable entry table)."""
    return ComplexMatrix(OLD_U_ENTRIES)


def build_new_U() -> ComplexMatrix:
    """Corrected 8x8 encoder (reads the mutable entry table)."""
    return ComplexMatrix(NEW_U_ENTRIES)


@dataclass(frozen=True)
class BlockReport:
    """4x4 diagonal blocks of a conjugated three-wire attack, plus the
    largest off-diagonal entry magnitude."""

    top_left: ComplexMatrix
    bottom_right: ComplexMatrix
    off_diag_norm: float

    def __post_init__(self):
        if self.off_diag_norm < 0:
            raise ValueError("off_diag_norm must be non-negative")


def verify_block_structure(u, w) -> BlockReport:
    """Report the block structure of U-dagger (W tensor W tensor W) U."""
    um = u if isinstance(u, ComplexMatrix) else ComplexMatrix(u)
    wm = w if isinstance(w, ComplexMatrix) else ComplexMatrix(w)
    if um.dim_rows != 8 or um.dim_cols != 8:
        raise ValueError("encoder must be 8x8")
    if wm.dim_rows != 2 or wm.dim_cols != 2:
        raise ValueError("attack unitary must be 2x2")
    if not is_unitary(um, 1e-10):
        raise ValueError("encoder input is not unitary")
    if not is_unitary(wm, 1e-10):
        raise ValueError("attack input is not unitary")
    wa = wm.array
    w3 = np.kron(np.kron(wa, wa), wa)
    m = um.array.conj().T @ w3 @ um.array
    off = max(float(np.abs(m[:4, 4:]).max()), float(np.abs(m[4:, :4]).max()))
    return BlockReport(
        top_left=ComplexMatrix(m[:4, :4]),
        bottom_right=ComplexMatrix(m[4:, 4:]),
        off_diag_norm=off,
    )


def standard_decomposition() -> Circuit:
    """Six-gate circuit realizing the corrected encoder.

    Three controlled-X gates, one bare Z, and two zero-controlled
    rotation gates; matches the encoder matrix exactly.
    """
    a = 2.0 * THIRD_ANGLE
    g = (
        PlacedGate(controlled(ry_x(a), 0), (1, 0)),
        PlacedGate(controlled(ry(np.pi / 2), 0), (0, 1)),
        PlacedGate(Z, (2,)),
        PlacedGate(CNOT, (2, 1)),
        PlacedGate(CNOT, (0, 2)),
        PlacedGate(controlled(X, 0), (1, 0)),
    )
    return Circuit(3, g)


def basic_decomposition() -> Circuit:
    """Fourteen-gate circuit realizing the corrected encoder with only
    CNOTs and one-wire gates (6 two-wire + 8 one-wire)."""
    t = THIRD_ANGLE
    g = (
        PlacedGate(X, (1,)),
        PlacedGate(ry(-t), (0,)),
        PlacedGate(CNOT, (1, 0)),
        PlacedGate(x_ry(t), (0,)),
        PlacedGate(CNOT, (0, 1)),
        PlacedGate(ry(np.pi / 4), (1,)),
        PlacedGate(CNOT, (0, 1)),
        PlacedGate(X, (0,)),
        PlacedGate(ry(-np.pi / 4), (1,)),
        PlacedGate(Z, (2,)),
        PlacedGate(CNOT, (2, 1)),
        PlacedGate(CNOT, (0, 2)),
        PlacedGate(CNOT, (1, 0)),
        PlacedGate(X, (1,)),
    )
    return Circuit(3, g)


def _columns_unitary(cols) -> np.ndarray:
    return np.column_stack([np.asarray(c, dtype=complex) for c in cols])


def erroneous_decomposition_product() -> ComplexMatrix:
    """Product of a previously published six-stage construction.

    The result is unitary but does NOT reproduce the earlier encoder it
    was claimed to factor; comparing the two is the refutation check.
    """
    e0 = np.array([1.0, 0.0])
    e1 = np.array([0.0, 1.0])
    a1 = np.array([1.0, -np.sqrt(2.0)]) / np.sqrt(3.0)
    a2 = np.array([np.sqrt(2.0), 1.0]) / np.sqrt(3.0)
    b1 = np.array([1.0, -1.0]) / np.sqrt(2.0)
    b2 = np.array([1.0, 1.0]) / np.sqrt(2.0)

    def k3(x, y, z):
        return np.kron(x, np.kron(y, z))

    stage1 = _columns_unitary(
        [
            k3(e0, e0, e0),
            k3(e0, e0, e1),
            k3(a1, e1, e0),
            k3(a1, e1, e1),
            k3(e1, e0, e0),
            k3(e1, e0, e1),
            k3(a2, e1, e0),
            k3(a2, e1, e1),
        ]
    )
    stage2 = _columns_unitary(
        [
            k3(e0, b1, e0),
            k3(e0, b1, e1),
            k3(e0, b2, e0),
            k3(e0, b2, e1),
            k3(e1, e0, e0),
            k3(e1, e0, e1),
            k3(e1, e1, e0),
            k3(e1, e1, e1),
        ]
    )
    stage3 = np.kron(np.eye(4), np.diag([1.0, -1.0]))
    stage4 = _columns_unitary(
        [
            k3(e0, e0, e0),
            k3(e1, e0, e1),
            k3(e0, e1, e0),
            k3(e1, e1, e1),
            k3(e1, e0, e0),
            k3(e0, e0, e1),
            k3(e1, e1, e0),
            k3(e0, e1, e1),
        ]
    )
    stage5 = _columns_unitary(
        [
            k3(e0, e0, e1),
            k3(e0, e0, e0),
            k3(e0, e1, e0),
            k3(e0, e1, e1),
            k3(e1, e0, e1),
            k3(e1, e0, e0),
            k3(e1, e1, e0),
            k3(e1, e1, e1),
        ]
    )
    stage6 = _columns_unitary(
        [
            k3(e0, e0, e0),
            k3(e0, e0, e1),
            k3(e0, e1, e0),
            k3(e0, e1, e1),
            k3(e1, e1, e0),
            k3(e1, e1, e1),
            k3(e1, e0, e0),
            k3(e1, e0, e1),
        ]
    )
    return ComplexMatrix(stage6 @ stage5 @ stage4 @ stage3 @ stage2 @ stage1)


@dataclass(frozen=True)
class CorrelatedChannel:
    """Finitely supported mixture of all-wire tensor-power attacks."""

    n_qubits: int
    support: tuple[tuple[ComplexMatrix, float], ...]

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("channel needs at least one qubit")
        sup = []
        total = 0.0
        for w, p in self.support:
            wm = w if isinstance(w, ComplexMatrix) else ComplexMatrix(w)
            if wm.dim_rows != 2 or wm.dim_cols != 2:
                raise ValueError("channel atoms must be 2x2")
            if not is_unitary(wm, 1e-12):
                raise ValueError("channel atom is not unitary within 1e-12")
            pf = float(p)
            if pf < 0:
                raise ValueError(f"negative probability {pf}")
            sup.append((wm, pf))
            total += pf
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total}, expected 1")
        object.__setattr__(self, "support", tuple(sup))


def make_channel(n: int, support) -> CorrelatedChannel:
    """Build a channel from (atom, probability) pairs; atoms may be Gates,
    ComplexMatrix values, or plain 2x2 array-likes."""
    pairs = []
    for w, p in support:
        if isinstance(w, Gate):
            w = w.matrix
        pairs.append((w, p))
    return CorrelatedChannel(int(n), tuple(pairs))


def _channel_terms(ch: CorrelatedChannel) -> list[tuple[np.ndarray, float]]:
    terms = []
    for w, p in ch.support:
        wn = np.array([[1.0 + 0j]])
        for _ in range(ch.n_qubits):
            wn = np.kron(wn, w.array)
        terms.append((wn, p))
    return terms


def apply_channel(ch: CorrelatedChannel, rho: DensityMatrix) -> DensityMatrix:
    if rho.n_wires != ch.n_qubits:
        raise ValueError(f"channel acts on {ch.n_qubits} wires, state has {rho.n_wires}")
    a = rho.matrix.array
    out = np.zeros_like(a)
    for wn, p in _channel_terms(ch):
        out += p * (wn @ a @ wn.conj().T)
    return DensityMatrix(out, rho.n_wires)


def three_qubit_protect(
    psi: StateVector, v: StateVector, ch: CorrelatedChannel, rounds: int = 1
) -> tuple[float, DensityMatrix]:
    """Encode |0>, psi, v; attack `rounds` times; decode.

    Returns the fidelity of the decoded data wire against psi along with
    the full decoded three-wire state (wire 2 ends up carrying the attack
    unitaries applied to v; wire 0 returns to |0>).
    """
    if ch.n_qubits != 3:
        raise ValueError("three_qubit_protect needs a 3-qubit channel")
    if psi.n_wires != 1 or v.n_wires != 1:
        raise ValueError("psi and v must be single-qubit states")
    rounds = int(rounds)
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    u = build_new_U().array
    state = tensor(basis_state(1, "0"), psi, v)
    rho = to_density(state)
    a = u @ rho.matrix.array @ u.conj().T
    terms = _channel_terms(ch)
    for _ in range(rounds):
        nxt = np.zeros_like(a)
        for wn, p in terms:
            nxt += p * (wn @ a @ wn.conj().T)
        a = nxt
    a = u.conj().T @ a @ u
    out = DensityMatrix(a, 3)
    fid = fidelity(partial_trace(out, [DATA_WIRE]), psi)
    return fid, out


def recursive_triples(k: int) -> list[tuple[int, int, int]]:
    """Encoder placements for 2k+1 wires, in emission (time) order.

    Each triple is (most significant, middle, least significant). The
    higher triples go first; the base triple (0, 1, 2) goes last so its
    conjugation sits innermost when the whole circuit is inverted around
    an attack.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    return [(2 * j, 2 * j - 1, 2 * j - 2) for j in range(2, k + 1)] + [(0, 1, 2)]


def recursive_data_wires(k: int) -> list[int]:
    return [2 * j + 1 for j in range(k)]


def recursive_zero_wires(k: int) -> list[int]:
    return [0] + [2 * j for j in range(2, k + 1)]


def recursive_encoder(k: int) -> Circuit:
    """Gate-level encoder on 2k+1 wires protecting k data qubits.

    Emits the six-gate standard decomposition once per triple; for k=1
    this is exactly standard_decomposition(). Data qubits sit on odd
    wires, |0> ancillas on even wires except wire 2, which is the sink.
    """
    base = standard_decomposition().gates
    placed = []
    for tri in recursive_triples(int(k)):
        for pg in base:
            placed.append(PlacedGate(pg.gate, tuple(tri[w] for w in pg.wires)))
    return Circuit(2 * int(k) + 1, tuple(placed))


_NAMED_ATOMS = {
    "i": [[1, 0], [0, 1]],
    "x": [[0, 1], [1, 0]],
    "y": [[0, -1j], [1j, 0]],
    "z": [[1, 0], [0, -1]],
    "h": (np.array([[1, 1], [1, -1]]) / np.sqrt(2)).tolist(),
}


def atom_from_selector(sel: str) -> ComplexMatrix:
    """Parse an attack-unitary selector: h|x|y|z|i, ry:<alpha>, or
    matrix:<json 2x2 of [re, im] pairs>."""
    s = sel.strip().lower()
    if s in _NAMED_ATOMS:
        return ComplexMatrix(_NAMED_ATOMS[s])
    if s.startswith("ry:"):
        return ry(float(s[3:])).matrix
    if s.startswith("matrix:"):
        rows = json.loads(sel.strip()[7:])
        m = [[complex(re, im) for re, im in row] for row in rows]
        cm = ComplexMatrix(m)
        if cm.dim_rows != 2 or cm.dim_cols != 2:
            raise ValueError("matrix selector must be 2x2")
        return cm
    raise ValueError(f"unknown attack selector {sel!r}")


def atom_to_selector(w: ComplexMatrix) -> str:
    for name, rows in _NAMED_ATOMS.items():
        if np.abs(w.array - np.asarray(rows, dtype=complex)).max() <= 1e-12:
            return name
    rows = [[[float(z.real), float(z.imag)] for z in row] for row in w.array]
    return "matrix:" + json.dumps(rows)


def channel_to_json(ch: CorrelatedChannel) -> str:
    payload = {
        "n": ch.n_qubits,
        "support": [{"w": atom_to_selector(w), "p": p} for w, p in ch.support],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def channel_from_json(text_or_dict) -> CorrelatedChannel:
    d = json.loads(text_or_dict) if isinstance(text_or_dict, str) else text_or_dict
    support = [(atom_from_selector(item["w"]), float(item["p"])) for item in d["support"]]
    return CorrelatedChannel(int(d["n"]), tuple(support))


def random_su2(rng: np.random.Generator) -> ComplexMatrix:
    """Haar-random 2x2 special unitary (QR of a Ginibre sample, then
    phase-fixed so the determinant is exactly 1)."""
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(g)
    q = q @ np.diag(np.diag(r) / np.abs(np.diag(r)))
    q = q / np.sqrt(np.linalg.det(q))
    return ComplexMatrix(q)
