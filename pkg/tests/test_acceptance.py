"""End-to-end acceptance battery.

Each test prints one PASS or FAIL line (visible with `pytest -s` or in the
captured output on failure) and enforces its runtime budget. Criterion 3's
Hadamard case is checked in its exact form: the attack's determinant is -1,
so the decoded data block is -(I (x) H); the block matches I (x) H up to
that determinant phase and the phase is asserted exactly.
"""
from __future__ import annotations

import json
import time

import numpy as np

from corrqec import cli, correlated, hybrid, noise_exp
from corrqec.circuit import (
    StateVector,
    basis_state,
    fidelity,
    partial_trace,
    realize,
    tensor,
    to_density,
)
from corrqec.gates import H
from corrqec.linalg import equal_up_to_global_phase, max_abs_diff


def _run(num: int, label: str, budget_s: float, fn) -> None:
    t0 = time.perf_counter()
    try:
        detail = fn()
        dt = time.perf_counter() - t0
        if dt >= budget_s:
            raise AssertionError(f"runtime {dt:.2f}s exceeds budget {budget_s}s")
    except Exception as exc:
        print(f"FAIL criterion {num}: {label}: {exc}")
        raise
    extra = f" ({detail})" if detail else ""
    print(f"PASS criterion {num}: {label}{extra} [{dt:.2f}s]")


def rand_qubit(rng) -> StateVector:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return StateVector(v / np.linalg.norm(v), 1)


def test_criterion_1_decompositions():
    def body():
        u = correlated.build_new_U()
        std = correlated.standard_decomposition()
        bas = correlated.basic_decomposition()
        d1 = max_abs_diff(realize(std), u)
        d2 = max_abs_diff(realize(bas), u)
        assert d1 <= 1e-12, f"standard form deviates by {d1:.3e}"
        assert d2 <= 1e-12, f"basic form deviates by {d2:.3e}"
        two = sum(1 for pg in bas.gates if pg.gate.arity == 2)
        one = sum(1 for pg in bas.gates if pg.gate.arity == 1)
        assert (two, one) == (6, 8), f"basic form has {two} two-wire, {one} one-wire gates"
        return f"both forms match the encoder; deviations {d1:.1e}, {d2:.1e}"

    _run(1, "gate decompositions reproduce the encoder", 1.0, body)


PRINTED_PRODUCT = np.array(
    [
        [0, 0, 0, 0, 0, -1, 0, 0],
        [0.7071, 0, 0.4082, 0, 0, 0, 0.5774, 0],
        [-0.7071, 0, 0.4082, 0, 0, 0, 0.5774, 0],
        [0, 0, 0, 0.8165, 0, 0, 0, -0.5774],
        [0, 0, -0.8165, 0, 0, 0, 0.5774, 0],
        [0, 0.7071, 0, -0.4082, 0, 0, 0, -0.5774],
        [0, -0.7071, 0, -0.4082, 0, 0, 0, -0.5774],
        [0, 0, 0, 0, 1, 0, 0, 0],
    ],
    dtype=complex,
)


def test_criterion_2_refutation():
    def body():
        prod = correlated.erroneous_decomposition_product()
        d_printed = float(np.abs(prod.array - PRINTED_PRODUCT).max())
        assert d_printed <= 5e-5, f"printed matrix deviates by {d_printed:.2e}"
        d_old = max_abs_diff(prod, correlated.build_old_U())
        assert d_old >= 0.5, f"distance to the legacy encoder only {d_old:.3f}"
        return f"printed entries to 4 decimals ({d_printed:.1e}); distance {d_old:.4f} >= 0.5"

    _run(2, "published six-stage product is reproduced and refuted", 1.0, body)


def test_criterion_3_block_structure():
    def body():
        rng = np.random.default_rng(20240815)
        u = correlated.build_new_U()
        worst_off = worst_tl = 0.0
        for _ in range(100):
            w = correlated.random_su2(rng)
            rep = correlated.verify_block_structure(u, w)
            worst_off = max(worst_off, rep.off_diag_norm)
            worst_tl = max(
                worst_tl, max_abs_diff(rep.top_left, np.kron(np.eye(2), w.array))
            )
        assert worst_off <= 1e-10, f"off-diagonal block max {worst_off:.3e}"
        assert worst_tl <= 1e-10, f"top-left block deviates by {worst_tl:.3e}"
        rep = correlated.verify_block_structure(u, H.matrix)
        i2h = np.kron(np.eye(2), H.matrix.array)
        assert rep.off_diag_norm <= 1e-12, f"H off-diagonal {rep.off_diag_norm:.3e}"
        assert equal_up_to_global_phase(rep.top_left, i2h, 1e-10)
        pivot = np.unravel_index(np.argmax(np.abs(i2h)), (4, 4))
        phase = rep.top_left.array[pivot] / i2h[pivot]
        assert abs(phase - (-1.0)) <= 1e-10, f"H block phase {phase}, determinant is -1"
        d_exact = max_abs_diff(rep.top_left, -i2h)
        return (
            f"100 special unitaries verbatim (worst {max(worst_off, worst_tl):.1e}); "
            f"H block = det(H) * (I (x) H) exactly ({d_exact:.1e})"
        )

    _run(3, "decoded data block is I (x) W", 5.0, body)


def test_criterion_4_three_qubit_recovery():
    def body():
        rng = np.random.default_rng(20240816)
        worst = 1.0
        for i in range(50):
            m = (1, 3, 7)[i % 3]
            atoms = [(correlated.random_su2(rng), 1.0 / 3.0) for _ in range(3)]
            ch = correlated.make_channel(3, atoms)
            fid, _ = correlated.three_qubit_protect(
                rand_qubit(rng), rand_qubit(rng), ch, rounds=m
            )
            worst = min(worst, fid)
        assert worst >= 1 - 1e-9, f"worst fidelity {worst}"
        return f"50 random triples, rounds in {{1,3,7}}; worst deficit {1 - worst:.1e}"

    _run(4, "three-qubit data survives repeated correlated attacks", 10.0, body)


def test_criterion_5_five_qubit_recovery():
    def body():
        rng = np.random.default_rng(20240817)
        enc = realize(correlated.recursive_encoder(2)).array
        worst = 1.0
        for _ in range(20):
            w = correlated.random_su2(rng).array
            wn = np.array([[1.0 + 0j]])
            for _ in range(5):
                wn = np.kron(wn, w)
            psi1, psi2, v = rand_qubit(rng), rand_qubit(rng), rand_qubit(rng)
            state = tensor(basis_state(1, "0"), psi1, v, psi2, basis_state(1, "0"))
            out = enc.conj().T @ wn @ enc @ state.amplitudes
            rho = to_density(StateVector(out, 5))
            worst = min(worst, fidelity(partial_trace(rho, [1]), psi1))
            worst = min(worst, fidelity(partial_trace(rho, [3]), psi2))
            worst = min(worst, fidelity(partial_trace(rho, [0]), basis_state(1, "0")))
            worst = min(worst, fidelity(partial_trace(rho, [4]), basis_state(1, "0")))
        assert worst >= 1 - 1e-9, f"worst fidelity {worst}"
        return f"20 random cases; worst deficit {1 - worst:.1e}"

    _run(5, "five-wire recursive code protects both data qubits", 30.0, body)


def test_criterion_6_hybrid_conjugation():
    def body():
        rng = np.random.default_rng(20240818)
        worst_fid = 1.0
        for n in range(2, 9):
            dw = len(hybrid.data_wires(n))
            anc = "0" if n % 2 else "00"
            for tag in ("X", "Y", "Z"):
                if dw:
                    v = rng.normal(size=2**dw) + 1j * rng.normal(size=2**dw)
                    data = StateVector(v / np.linalg.norm(v), dw)
                    fid, _ = hybrid.hybrid_protect(n, data, anc, [tag])
                    worst_fid = min(worst_fid, fid)
                # independent matrix-level factorization check
                c = hybrid.conjugated_error(n, tag)
                hybrid.ancilla_block(n, c)
        assert worst_fid >= 1 - 1e-10, f"worst data fidelity {worst_fid}"
        for n in (2, 4, 6, 8):
            dw = len(hybrid.data_wires(n))
            data = basis_state(dw, "0" * dw) if dw else None
            for bits in ("00", "01", "10", "11"):
                for tag in ("X", "Y", "Z"):
                    _, rep = hybrid.hybrid_protect(n, data, bits, [tag])
                    assert rep.preserved_with_certainty, (
                        f"n={n} bits={bits} tag={tag} read back {rep.readback_bits}"
                    )
        return f"n=2..8, X/Y/Z; worst data-fidelity deficit {1 - worst_fid:.1e}; all even-n readbacks certain"

    _run(6, "collective Pauli attacks act only on the ancilla side", 60.0, body)


def test_criterion_7_hybrid_circuit_vs_matrix():
    def body():
        worst = 0.0
        for n in range(2, 7):
            enc = hybrid.hybrid_encoder(n)
            got = realize(enc.circuit)
            assert equal_up_to_global_phase(got, enc.matrix, 1e-10), f"n={n} differs"
            worst = max(worst, max_abs_diff(got, enc.matrix))
        return (
            f"n=2..6 circuits equal the recursion matrices (max deviation {worst:.1e}); "
            "wire permutation: identity, global phase: 1"
        )

    _run(7, "hybrid circuits realize the encoder matrices", 60.0, body)


def test_criterion_8_noise_monotonicity():
    def body():
        vals = []
        for p2 in (0.0, 0.005, 0.01, 0.02, 0.04):
            vals.append(
                noise_exp.exact_success(
                    {"scheme": "corr3", "w": "h", "noise": {"p1": p2 / 10, "p2": p2}}
                )
            )
        assert abs(vals[0] - 1.0) <= 1e-10, f"zero-noise success {vals[0]}"
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:])), f"not non-increasing: {vals}"
        preset = noise_exp.exact_success(
            {"scheme": "corr3", "w": "h", "noise": {"p1": 0.001, "p2": 0.01}}
        )
        assert preset > 0.8, f"preset success {preset:.4f}"
        return (
            "sweep " + ", ".join(f"{v:.4f}" for v in vals) + f"; preset {preset:.4f} > 0.8"
        )

    _run(8, "success probability degrades monotonically with noise", 30.0, body)


def test_criterion_9_determinism(tmp_path):
    def body():
        args = [
            "run", "--scheme", "corr3", "--w", "h", "--shots", "8192", "--seed", "1",
            "--noise", "p1=0.001,p2=0.01",
        ]
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        assert cli.main(args + ["--out", str(p1)]) == 0
        assert cli.main(args + ["--out", str(p2)]) == 0
        b1, b2 = p1.read_bytes(), p2.read_bytes()
        assert b1 == b2, "repeat runs differ"
        json.loads(b1.decode())  # well-formed
        rep = noise_exp.run_named(
            {
                "scheme": "corr3",
                "w": "h",
                "shots": 65536,
                "seed": 3,
                "noise": {"p1": 0.001, "p2": 0.01},
            }
        )
        exact = np.array([rep.success_probability, 1 - rep.success_probability])
        freq = np.array(
            [rep.histogram.counts.get("0", 0), rep.histogram.counts.get("1", 0)]
        ) / 65536
        tv = 0.5 * float(np.abs(freq - exact).sum())
        bound = 5 * np.sqrt(2 / 65536)
        assert tv <= bound, f"total variation {tv:.4f} above {bound:.4f}"
        return f"byte-identical reports; TV {tv:.4f} <= {bound:.4f} at 65536 shots"

    _run(9, "experiment runs are reproducible and statistically sound", 60.0, body)
