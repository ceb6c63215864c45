"""End-to-end acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary
(and immediately, when run with ``-s``).
"""

import json
import math

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from fockrel import sampling
from fockrel.checks import (
    FAIL_MARGIN,
    check_adjoint_theorem,
    check_boundedness,
    check_c_selfadjoint_theorem,
    check_domain_closure,
    check_hermitian_theorem,
    check_lower_bound_expansive,
    check_multivalued_part,
    check_unitary_theorem,
    companion_conjugation,
)
from fockrel.cli import main
from fockrel.errors import InvalidConjugationError
from fockrel.relation import relation_norm
from fockrel.symbols import SymbolTriple, build_smax, conjugation_matrix, validate_conjugation, wco_matrix


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def rng(seed):
    return np.random.default_rng(seed)


def test_01_conjugation_axioms():
    N, k = 40, 20
    g = rng(101)
    worst_inv = worst_iso = 0.0
    for _ in range(25):
        p = sampling.conjugation(g)
        assert abs(p.b) <= 1
        M = conjugation_matrix(p, N)
        worst_inv = max(worst_inv, np.max(np.abs((M @ M.conj())[:k, :k] - np.eye(k))))
        worst_iso = max(worst_iso, np.max(np.abs((M.conj().T @ M)[:k, :k] - np.eye(k))))
    with pytest.raises(InvalidConjugationError):
        validate_conjugation(-1, 0, 0)
    ok = worst_inv <= 1e-8 and worst_iso <= 1e-8
    record(1, "conjugation involution and isometry", ok,
           f"involution {worst_inv:.1e}, isometry {worst_iso:.1e}; (-1,0,0) rejected")


def test_02_m0_adjoint_matrix_identity():
    g = rng(102)
    worst = 0.0
    for _ in range(25):
        C, D, A, B = (sampling._disc(g, 0, 1) for _ in range(4))
        W = wco_matrix(C, D, A, B, 30)
        W_hat = wco_matrix(np.conj(C), np.conj(B), np.conj(A), np.conj(D), 30)
        worst = max(worst, np.max(np.abs(W_hat - W.conj().T)))
    record(2, "m=0 adjoint equals conjugate transpose", worst <= 1e-10, f"max entry error {worst:.1e}")


def test_03_multivalued_part():
    g = rng(103)
    reports = []
    for m in range(4):
        for _ in range(10):
            p = sampling.conjugation(g)
            reports.append(check_multivalued_part(sampling.adjoint_form_triple(g, p, m), 40))
    worst = max(r.metrics["max_angle"] for r in reports)
    ok = all(r.passed for r in reports)
    record(3, "multivalued part is span{e_0..e_(m-1)}", ok, f"40 triples, max angle {worst:.1e}")


def test_04_domain_closure_and_exclusion():
    g = rng(104)
    reports = []
    for m in range(4):
        for _ in range(5):
            p = sampling.conjugation(g)
            reports.append(check_domain_closure(sampling.adjoint_form_triple(g, p, m), 40, p=p))
    worst = max(r.metrics["max_angle"] for r in reports)
    excl = min(r.metrics.get("min_exclusion_residual", math.inf) for r in reports)
    ok = all(r.passed for r in reports) and excl > 1e-3
    record(4, "domain closure and kernel exclusion", ok,
           f"max angle {worst:.1e}, min exclusion residual {excl:.3f}")


def test_05_adjoint_pairing_and_convergence():
    g = rng(105)
    reports = []
    for m in range(3):
        for _ in range(10):
            p = sampling.conjugation(g)
            reports.append(check_adjoint_theorem(sampling.adjoint_form_triple(g, p, m), p, 40, 20))
    pairing = max(r.metrics["pairing"] for r in reports)
    angle = max(r.metrics["window_angle"] for r in reports)
    growth = max(r.metrics["window_angle_growth"] for r in reports)
    ok = all(r.passed for r in reports)
    record(5, "adjoint pairing and windowed graph convergence", ok,
           f"pairing {pairing:.1e}, angle N=40 {angle:.1e}, growth to N=50 {growth:.1e}")


def test_06_c_selfadjoint_family():
    g = rng(106)
    good, bad = [], []
    for i in range(25):
        p = sampling.conjugation(g)
        t = sampling.c_selfadjoint_triple(g, p, i % 3)
        good.append(check_c_selfadjoint_theorem(t, p, 40))
        off = SymbolTriple(t.C, t.D + 0.1, t.A, t.B, t.E, t.F, t.m)
        bad.append(check_c_selfadjoint_theorem(off, p, 40))
    pairing = max(r.metrics["pairing"] for r in good)
    angle = max(r.metrics["graph_angle"] for r in good)
    margin = min(r.metrics["pairing"] for r in bad)
    ok = (all(r.passed for r in good) and not any(r.passed for r in bad)
          and margin >= max(1e-5, FAIL_MARGIN * 1e-8))
    record(6, "C-selfadjoint family and D perturbation", ok,
           f"pairing {pairing:.1e}, angle {angle:.1e}, perturbed min violation {margin:.1e}")


def test_07_hermitian_family():
    g = rng(107)
    good, bad = [], []
    for i in range(25):
        t = sampling.hermitian_triple(g, i % 3)
        good.append(check_hermitian_theorem(t, 40))
        off = SymbolTriple(t.C, t.D, t.A + 0.1j, t.B, t.E, t.F, t.m)
        bad.append(check_hermitian_theorem(off, 40))
    companion = [check_c_selfadjoint_theorem(r_t, companion_conjugation(r_t), 40).passed
                 for r_t in (SymbolTriple(**{k: v for k, v in r.parameters["triple"].items()})
                             for r in good if r.passed)]
    pairing = max(r.metrics["pairing"] for r in good)
    ok = all(r.passed for r in good) and not any(r.passed for r in bad) and all(companion)
    record(7, "hermitian family, perturbation and companion conjugation", ok,
           f"pairing {pairing:.1e}, {sum(companion)}/{len(good)} companion conjugation passes")


def test_08_unitary_classification():
    g = rng(108)
    good = [check_unitary_theorem(sampling.unitary_triple(g), 60) for _ in range(10)]
    block = max(r.metrics["gram_block_error"] for r in good)
    multi = [check_unitary_theorem(sampling.generic_triple(g, 1 + i % 3), 30) for i in range(10)]
    witnessed = all(not r.passed and r.metrics["multivalued_dim"] >= 1 for r in multi)
    ok = all(r.passed and r.metrics["block_size"] == 20 for r in good) and witnessed
    record(8, "unitary classification", ok,
           f"Gram block error {block:.1e}; {len(multi)} m>=1 triples rejected with multivalued witness")


def test_09_expansive_lower_bound():
    g = rng(109)
    reports = [check_lower_bound_expansive(sampling.expansive_triple(g, i % 3), 40) for i in range(9)]
    low = min(r.metrics["lower_bound"] for r in reports)
    drift = max(r.metrics["drift"] for r in reports)
    ok = all(r.passed for r in reports)
    record(9, "expansive lower bound", ok, f"min bound {low:.3f}, max drift N=40->50 {drift:.1e}")


def test_10_boundedness_branches():
    g = rng(110)
    stable = [check_boundedness(sampling.contractive_triple(g, i % 3), 30) for i in range(9)]
    stable += [check_boundedness(sampling.isometric_shift_triple(g, i % 3), 30) for i in range(9)]
    drift = max(r.metrics["norm_drift"] for r in stable)
    branches = {r.metrics["branch"] for r in stable}
    t = SymbolTriple(1, 1, 1, 0, 1, 0, 0)
    norms = [relation_norm(build_smax(t, N)) for N in (30, 40, 50)]
    growing = all(b > a for a, b in zip(norms, norms[1:]))
    ok = all(r.passed for r in stable) and branches == {1, 2} and growing
    record(10, "boundedness branches", ok,
           f"max drift N=30->40 {drift:.1e}; violating family norms {', '.join(f'{n:.1f}' for n in norms)}")


def test_11_sweep_determinism(tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps({"truncation": 30, "sweep": {"count": 3, "seed": 2024}}))
    out = [tmp_path / "a.json", tmp_path / "b.json"]
    codes = [main(["sweep", "--config", str(cfg), "--report", str(p), "--format", "json"]) for p in out]
    same = out[0].read_bytes() == out[1].read_bytes()
    record(11, "sweep determinism", same and codes == [0, 0],
           f"exit codes {codes}, {len(out[0].read_bytes())} bytes, identical={same}")
