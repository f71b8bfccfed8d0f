"""Acceptance criteria, one test each, run at their stated tolerances.

Each test records a ``criterion N: PASS/FAIL`` line (shown in the terminal
summary) before asserting.
"""

import csv
import io
import time

import numpy as np
import pytest

from resource_gauges import cli, gauges, linalg, measures
from resource_gauges.theories import (
    CoherenceK,
    GenuineMultipartite,
    MagicQubits,
    SchmidtK,
    _stabilizers_cached,
    clifford_generators,
    stabilizer_enumerate,
)

import oracles
from conftest import t_state

S3 = np.sqrt(3.0)
Q1, Q2 = MagicQubits(1), MagicQubits(2)


def haar(d, rng):
    return linalg.sample_pure(d, rng)


def test_criterion_1_t_state_goldens(acceptance):
    T = t_state()
    t0 = time.perf_counter()
    rg = measures.generalized_robustness(T, Q1)
    t_rg = time.perf_counter() - t0
    t0 = time.perf_counter()
    rs = measures.standard_robustness(T, Q1)
    t_rs = time.perf_counter() - t0
    rg_prog = measures.generalized_robustness(T, Q1, method="program")
    err_g = abs(rg.value - (2 - S3))
    err_gp = abs(rg_prog.value - (2 - S3))
    err_s = abs(rs.value - (S3 - 1) / 2)
    ok = err_g <= 1e-5 and err_gp <= 1e-5 and err_s <= 1e-6 and t_rg < 1 and t_rs < 1
    acceptance(
        1, ok,
        f"R_g={rg.value:.9f} (program {rg_prog.value:.9f}) R_s={rs.value:.9f} "
        f"errors {err_g:.1e}/{err_gp:.1e}/{err_s:.1e} times {t_rg:.3f}s/{t_rs:.3f}s",
    )
    assert ok


def test_criterion_2_two_qubit_t_state(acceptance):
    TT = np.kron(t_state(), t_state())
    t0 = time.perf_counter()
    rs = measures.standard_robustness(TT, Q2)
    rg = measures.generalized_robustness(TT, Q2, method="program")
    elapsed = time.perf_counter() - t0
    ok = abs(rs.value - 0.616) <= 5e-3 and abs(rg.value - 0.607) <= 5e-3 and elapsed < 60
    acceptance(2, ok, f"R_s={rs.value:.6f} R_g={rg.value:.6f} ({rg.status}) in {elapsed:.2f}s")
    assert ok


def _collapse_theories():
    out = [CoherenceK(d, k) for d in range(2, 6) for k in range(1, min(3, d - 1) + 1)]
    out += [SchmidtK(d, d, k) for d in range(2, 5) for k in range(1, min(3, d - 1) + 1)]
    return out + [Q1, Q2]


def test_criterion_3_pure_state_collapse(acceptance):
    rng = np.random.default_rng(3)
    worst_rg, worst_nuc, bad = 0.0, 0.0, []
    for theory in _collapse_theories():
        for _ in range(100):
            psi = haar(theory.dim, rng)
            prog = measures.generalized_robustness(psi, theory, method="program")
            if isinstance(theory, MagicQubits):
                # n = 1 has an explicit formula; n = 2 uses the l1 program over the dictionary
                gv = gauges.qubit_magic_gauge(psi) if theory.n == 1 else measures.vector_gauge(psi, theory).value
                nuc = measures.nuclear_gauge(linalg.projector(psi), theory).value
                worst_nuc = max(worst_nuc, abs(nuc - gv**2))
            else:
                gv = gauges.closed_form_vector_gauge(psi, theory)
            err = abs(prog.value - (gv**2 - 1.0))
            if err > 1e-5:
                bad.append(str(theory))
            worst_rg = max(worst_rg, err)
    ok = worst_rg <= 1e-5 and worst_nuc <= 1e-4
    acceptance(
        3, ok,
        f"{len(_collapse_theories())} theories x 100 states: max |R_g - (G_V^2-1)|={worst_rg:.2e}, "
        f"max |G_W - G_V^2| (magic)={worst_nuc:.2e}" + (f" failing in {sorted(set(bad))}" if bad else ""),
    )
    assert ok


def test_criterion_4_ksupport_vs_dual_ball(acceptance):
    rng = np.random.default_rng(4)
    worst = 0.0
    count = 0
    while count < 500:
        d = int(rng.integers(1, 7))
        x = rng.normal(size=d) + 1j * rng.normal(size=d)
        for k in range(1, d + 1):
            worst = max(worst, abs(gauges.ksupport_norm(x, k) - oracles.ksupport_dual_ball(x, k)))
        count += 1
    ok = worst <= 1e-5
    acceptance(4, ok, f"500 vectors, d<=6, all k: max deviation {worst:.2e}")
    assert ok


def test_criterion_5_negativity_two_routes(acceptance):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(200):
        psi = haar(9, rng)
        worst = max(worst, abs(gauges.pure_negativity(psi, 3, 3) - measures.negativity(linalg.projector(psi), 3, 3)))
    ok = worst <= 1e-8
    acceptance(5, ok, f"200 states 3x3: max deviation {worst:.2e}")
    assert ok


def test_criterion_6_inequality_suite(acceptance):
    failed = {}
    for text in ("magic:n=1", "coherence:d=4,k=1"):
        cfg = measures.SolverConfig(restarts=1, sweeps=1)
        rep = cli.run_checks(cli.parse_theory(text), 50, seed=0, config=cfg)
        bad = [r.name for r in rep.values() if not r.passed]
        if bad:
            failed[text] = bad
    ok = not failed
    acceptance(6, ok, "50 states each for magic:n=1, coherence:d=4,k=1" + (f"; failing {failed}" if failed else ""))
    assert ok


def test_criterion_7_stabilizer_enumeration(acceptance):
    _stabilizers_cached.cache_clear()
    t0 = time.perf_counter()
    states = {n: stabilizer_enumerate(n) for n in (1, 2)}
    elapsed = time.perf_counter() - t0
    closure = 0.0
    for n, s in states.items():
        for g in clifford_generators(n):
            # every image must coincide with some enumerated state up to phase
            best = np.max(np.abs((s @ g.T).conj() @ s.T), axis=1)
            closure = max(closure, float(np.max(1.0 - best)))
    counts = (states[1].shape[0], states[2].shape[0])
    ok = counts == (6, 60) and closure <= 1e-10 and elapsed < 5
    acceptance(7, ok, f"counts {counts}, closure defect {closure:.1e}, {elapsed:.3f}s")
    assert ok


def test_criterion_8_geometric_relation(acceptance):
    rng = np.random.default_rng(8)
    theories = [CoherenceK(4, 1), CoherenceK(5, 2), SchmidtK(3, 3, 1), SchmidtK(4, 4, 2),
                GenuineMultipartite((2, 2, 2)), Q1, Q2]
    worst_rel = -np.inf
    for theory in theories:
        for _ in range(100):
            psi = haar(theory.dim, rng)
            G = gauges.geometric_pure(psi, theory)
            rg = measures.generalized_robustness(psi, theory).value
            worst_rel = max(worst_rel, G / (1.0 - G) - rg)
    worst_fw, worst_gap = 0.0, 0.0
    for theory in (CoherenceK(4, 1), Q1, Q2):
        for _ in range(30):
            psi = haar(theory.dim, rng)
            fw = measures.geometric_measure(linalg.projector(psi), theory, method="fw")
            worst_fw = max(worst_fw, abs(fw.value - gauges.geometric_pure(psi, theory)))
            worst_gap = max(worst_gap, fw.stats["fw_gap"])
    ok = worst_rel <= 1e-6 and worst_fw <= 1e-5 and worst_gap <= 1e-6
    acceptance(
        8, ok,
        f"max G/(1-G) - R_g={worst_rel:.2e} over {len(theories)}x100 states; "
        f"Frank-Wolfe max error {worst_fw:.2e}, max gap {worst_gap:.2e}",
    )
    assert ok


def test_criterion_9_sweep(acceptance, tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    codes = [cli.main(["sweep", "--family", "magic_T_mix", "--n", "1", "--points", "21", "--seed", "0",
                       "--output", str(p)]) for p in paths]
    same = paths[0].read_bytes() == paths[1].read_bytes()
    rows = list(csv.reader(io.StringIO(paths[0].read_text())))
    header, vals = rows[0], np.array(rows[1:], dtype=float)
    curves = vals[:, 1:]
    zero_tol = 1e-9
    initial_zero = bool(np.all(np.abs(curves[0]) <= zero_tol))
    # length of the segment on which every curve vanishes
    zero_run = int(np.argmax(~np.all(np.abs(curves) <= zero_tol, axis=1)))
    monotone = bool(np.all(np.diff(curves, axis=0) >= -zero_tol))
    col = {name: i for i, name in enumerate(header)}
    end_rs = vals[-1, col["standard_robustness"]]
    end_rg = vals[-1, col["generalized_robustness"]]
    endpoints = abs(end_rs - (S3 - 1) / 2) <= 1e-6 and abs(end_rg - (2 - S3)) <= 1e-5
    ok = codes == [0, 0] and same and initial_zero and zero_run >= 2 and monotone and endpoints
    acceptance(
        9, ok,
        f"21 points, byte-identical={same}, all curves zero for alpha<={vals[zero_run - 1, 0]:.2f}, "
        f"nondecreasing={monotone}, endpoints R_s={end_rs:.9f} R_g={end_rg:.9f}",
    )
    assert ok
