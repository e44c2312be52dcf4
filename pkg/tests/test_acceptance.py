"""Acceptance criteria AC1-AC14, one test each, each reporting a PASS/FAIL line."""

import json
import math
import time

import numpy as np

from inclusionlab import io
from inclusionlab.classify import bj_run_profile, bj_verdict
from inclusionlab.cli import main
from inclusionlab.linalg import (
    SystemSpec,
    co_norm,
    co_spectral_radius,
    operator_norm,
    spectral_radius,
    word_product,
)
from inclusionlab.lyapunov import explicit_law, random_switching_exponent, simulate
from inclusionlab.spectral import (
    InfeasibleCertified,
    chaos_feasibility,
    cojsr_bounds,
    growth_curve,
    jsr_bounds,
    periodic_stability_check,
)
from inclusionlab.symbolic import EventuallyPeriodic, constant_law, geometric_law
from inclusionlab.synth import (
    RotationSynthInput,
    hyperbolic_divergent_law,
    line_distance,
    replay_fixed_schedule,
    synthesize_rotation,
    synthesize_uniform,
    synthesize_zero_exponent,
    verify_pointwise_chaotic,
    verify_uniform_chaotic,
)
from systems import (
    PHI,
    diag_pair,
    golden_rotation_system,
    random_pair_corpus,
    rot,
    scalar_half_two,
    scaled_rotations,
    shear_block_system,
)

LOG2 = math.log(2)


def test_ac01_diagonal_exactness(ac_report):
    t0 = time.perf_counter()
    jt = jsr_bounds(diag_pair(), 3)
    ct = cojsr_bounds(diag_pair(), 3)
    dt = time.perf_counter() - t0
    ok = (abs(jt.best_lower - 3) <= 1e-9 and abs(jt.best_upper - 3) <= 1e-9
          and abs(ct.best_lower - 1 / 3) <= 1e-9 and abs(ct.best_upper - 1 / 3) <= 1e-9 and dt < 1.0)
    ac_report("AC1", ok, f"JSR in [{jt.best_lower!r}, {jt.best_upper!r}], co-JSR in [{ct.best_lower!r}, "
                         f"{ct.best_upper!r}], {dt:.3f}s")


def test_ac02_sandwich_on_random_corpus(ac_report):
    t0 = time.perf_counter()
    bad = []
    for i, (A, B) in enumerate(random_pair_corpus()):
        t = jsr_bounds(SystemSpec.of(A, B), 8)
        best = [min(r.upper for r in t.rows[:n]) for n in range(1, 9)]
        rows_ok = all(r.lower <= r.upper + 1e-9 for r in t.rows)
        mono = all(b <= a for a, b in zip(best, best[1:]))
        # submultiplicativity: the length-2n row never exceeds the length-n row
        fekete = all(t.rows[2 * n - 1].upper <= t.rows[n - 1].upper + 1e-9 for n in range(1, 5))
        sandwich = t.best_lower <= t.best_upper + 1e-9
        if not (rows_ok and mono and fekete and sandwich and t.completed_depth == 8):
            bad.append(i)
    dt = time.perf_counter() - t0
    ac_report("AC2", not bad and dt < 30.0, f"100 pairs to n=8, violations {bad}, {dt:.2f}s")


def scalar_closed_form(k_max):
    # E_k = least integer above log2 k; the ledger sits at E_(k-1) before stage k
    E = [0] + [k.bit_length() for k in range(1, k_max + 1)]
    return [(E[k - 1] + E[k], 2 * E[k]) for k in range(1, k_max + 1)]


def test_ac03_uniform_scalar(ac_report):
    S = scalar_half_two()
    t0 = time.perf_counter()
    res = synthesize_uniform(S, (1,), (2,), (), 10)
    cert = res.cert
    worst = 0.0
    ineq = True
    w = []
    for s in cert.stages:
        w += [1] * s.ell_k
        nc = operator_norm(word_product(S, w))
        w += [2] * s.L_k
        ce = co_norm(word_product(S, w))
        worst = max(worst, abs(nc / s.norm_after_contract - 1), abs(ce / s.conorm_after_expand - 1))
        ineq &= nc < 1 / s.k and ce > s.k
    counts = [(s.ell_k, s.L_k) for s in cert.stages]
    ver = verify_uniform_chaotic(S, res.law, cert.stages[-1].cumulative_length, 0.1, 10)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and ineq and counts == scalar_closed_form(10) and ver.passed and dt < 1.0
    ac_report("AC3", ok, f"counts {counts}, replay rel err {worst:.1e}, verify pass={ver.passed}, {dt:.3f}s")


def test_ac04_geometric_law_ledger(ac_report):
    N = 2**12
    led = replay_fixed_schedule(scalar_half_two(), geometric_law(), N).log2_norm
    early = led[:2].min() <= -2 and led[:6].max() >= 2
    exact = abs(led[1] + 2) < 1e-12 and abs(led[5] - 2) < 1e-12
    # block boundaries n = 2^(J+1) - 2 hold the running extremes -2(2^J+1)/3 and 2(2^J-1)/3
    bounds_ok = True
    for J in range(1, 11):
        n = 2 ** (J + 1) - 2
        want = -2 * (2**J + 1) / 3 if J % 2 else 2 * (2**J - 1) / 3
        bounds_ok &= abs(led[n - 1] - want) < 1e-9
        run = led[:n]
        bounds_ok &= abs((run.min() if J % 2 else run.max()) - want) < 1e-9
    ac_report("AC4", early and exact and bounds_ok,
              f"log2 at n=2: {float(led[1])!r}, n=6: {float(led[5])!r}, block extremes to 2^12 match={bounds_ok}")


def golden_rotation_input():
    S = golden_rotation_system()
    div_law, y0, rate = hyperbolic_divergent_law(S, 1, 2)
    inp = RotationSynthInput(1, np.array([0.0, 1.0]), constant_law(3), y0, div_law, np.array([1.0, 0.0]),
                             (0.5, 0.1, 9.9e-4), align_cap=1_000_000, drive_cap=10_000)
    return S, inp, rate


def test_ac05_rotation_synthesis(ac_report):
    t0 = time.perf_counter()
    S, inp, rate = golden_rotation_input()
    res = synthesize_rotation(S, inp)
    N = res.pointwise_cert[-1].cumulative_length
    idx = [st.align_down.index for st in res.pointwise_cert] + [st.align_up.index for st in res.pointwise_cert]
    rec = simulate(S, res.law, inp.u, N, checkpoints=idx)
    states = dict(zip(rec.checkpoints.tolist(), rec.renorm_states))
    align_ok = True
    for st in res.pointwise_cert:
        for al, target in ((st.align_down, inp.stable_x0), (st.align_up, inp.divergent_y0)):
            align_ok &= al.repeats <= inp.align_cap
            align_ok &= line_distance(states[al.index], target) <= al.delta
        align_ok &= st.drive_down <= inp.drive_cap and st.drive_up <= inp.drive_cap
    lmin, lmax = float(rec.log_norms.min()), float(rec.log_norms.max())
    dt = time.perf_counter() - t0
    ok = (len(res.pointwise_cert) >= 3 and lmin < math.log(1e-3) and lmax > math.log(1e3) and align_ok
          and verify_pointwise_chaotic(S, res.law, inp.u, N, 1e-3, 1e3).passed and dt < 60.0)
    ac_report("AC5", ok, f"{len(res.pointwise_cert)} stages, min {math.exp(lmin):.3g}, max {math.exp(lmax):.4g}, "
                         f"alignments re-verified={align_ok}, divergent period rate {rate:.4f}, {dt:.2f}s")


def test_ac06_zero_exponent(ac_report):
    N = 10_000
    res = synthesize_zero_exponent(scalar_half_two(), (1,), (2,), [1.0], (0.25, 4.0), N)
    tail = np.exp(res.log_norms[res.first_crossing - 1:])
    lam = abs(res.log_norms[-1] / N)
    ok = tail.min() >= 1 / 8 and tail.max() <= 8 and lam < 3e-4 and lam <= res.excursion_bound.C / N
    ac_report("AC6", ok, f"norms after first crossing in [{float(tail.min())!r}, {float(tail.max())!r}], "
                         f"|lambda_N| = {float(lam)!r}")


def test_ac07_orthogonal_infeasible(ac_report, tmp_path, capsys):
    S = SystemSpec.of(rot(0.4), rot(2.0), np.array([[1.0, 0.0], [0.0, -1.0]]))
    v = chaos_feasibility(S, 4)
    ok = isinstance(v, InfeasibleCertified) and v.n == 1 and abs(v.value - 1) <= 1e-12
    io.save_system(S, tmp_path / "orth.json")
    codes = [main(["feasibility", "--in", str(tmp_path / "orth.json")]),
             main(["synthesize", "--mode", "uniform", "--k-max", "10", "--in", str(tmp_path / "orth.json")])]
    capsys.readouterr()
    ac_report("AC7", ok and codes == [2, 2], f"verdict {type(v).__name__} n={getattr(v, 'n', None)} "
                                             f"value={getattr(v, 'value', None)!r}, CLI exit codes {codes}")


def test_ac08_periodic_law_fails(ac_report):
    law = EventuallyPeriodic((), (1, 2))
    S = scalar_half_two()
    rep = verify_uniform_chaotic(S, law, 10_000, 0.4, 1.1)
    led = replay_fixed_schedule(S, law, 10_000)
    vals = np.exp(led.log_norm)
    ok = not rep.passed and vals.min() >= 0.5 - 1e-12 and vals.max() <= 1 + 1e-12
    ac_report("AC8", ok, f"verify pass={rep.passed}, ledger in [{float(vals.min())!r}, {float(vals.max())!r}]")


def test_ac09_monte_carlo(ac_report):
    t0 = time.perf_counter()
    S = diag_pair()
    N, T = 100_000, 50
    mc = random_switching_exponent(S, None, T, N, seed=20240601, keep_laws=True)
    target = (math.log(2) + math.log(3)) / 2
    passes = [verify_pointwise_chaotic(S, explicit_law(l), x0, N, 1e-3, 1e3).passed for l, x0 in zip(mc.laws, mc.x0s)]
    dt = time.perf_counter() - t0
    ok = abs(mc.mean - target) < 0.05 and not any(passes) and dt < 60.0
    ac_report("AC9", ok, f"mean {mc.mean:.5f} (target {target:.5f}, stderr {mc.stderr:.1e}), "
                         f"pointwise passes {sum(passes)}/{T}, {dt:.2f}s")


def test_ac10_block_identity_and_growth(ac_report):
    S, (F1, F2) = shear_block_system(1 / PHI)
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 65))
        w = tuple(int(s) for s in rng.integers(1, 3, n))
        P = np.eye(2)
        for k in w:  # plain left fold, independent of the library's product code
            P = (F1, F2)[k - 1] @ P
        want = np.block([[P, n * P], [np.zeros((2, 2)), P]])
        got = word_product(S, w)
        worst = max(worst, float(np.linalg.norm(got - want) / np.linalg.norm(want)))
    g = growth_curve(S, 64, fit_range=(16, 64))
    ok = worst <= 1e-9 and abs(g.exponent - 1.0) <= 0.1
    ac_report("AC10", ok, f"max relative identity error {worst:.1e}, fitted exponent {g.exponent:.4f} "
                          f"({g.method}, golden-normalised shears)")


def test_ac11_scaled_rotations(ac_report):
    S = scaled_rotations()
    rep = periodic_stability_check(S, 6)
    g = growth_curve(S, 12).values
    ok = rep.verdict == "AllStableUpTo" and rep.depth == 6 and bool(np.all(np.diff(g) < 0))
    ac_report("AC11", ok, f"{rep.verdict}({rep.depth}), max ratio {rep.max_ratio!r}, g_n strictly decreasing")


def test_ac12_classification(ac_report):
    a = bj_verdict(constant_law(1), 2**14).verdict
    b = bj_verdict(EventuallyPeriodic((), (1, 2)), 2**14).verdict
    c = bj_verdict(geometric_law(), 2**14)
    prof = bj_run_profile(geometric_law(), 2**14)
    ok = (a == "NonchaoticCertified" and b == "ChaoticCertified" and c.verdict == "CandidateNonchaotic"
          and prof.growing == {1: True, 2: True})
    ac_report("AC12", ok, f"{a}, {b}, {c.verdict} with growing symbols {c.evidence['growing_symbols']}")


def test_ac13_duality(ac_report):
    worst, chain = 0.0, True
    for A, B in random_pair_corpus():
        for M in (A, B):
            worst = max(worst, abs(co_norm(M) - 1 / operator_norm(np.linalg.inv(M))))
            chain &= co_norm(M) <= co_spectral_radius(M) <= spectral_radius(M) <= operator_norm(M)
    ac_report("AC13", worst <= 1e-9 and chain, f"max duality gap {worst:.1e}, ordering chain holds={chain}")


def test_ac14_cli_determinism(ac_report, tmp_path, capsys):
    S = SystemSpec.of([[0.5, 0.3], [-0.1, 0.6]], [[1.5, 0.2], [0.1, 1.3]])
    io.save_system(S, tmp_path / "s.json")
    io.save_law(geometric_law(), tmp_path / "law.json")
    sysf, lawf = str(tmp_path / "s.json"), str(tmp_path / "law.json")
    commands = [
        ["analyze", "--in", sysf, "--depth", "10"],
        ["feasibility", "--in", sysf, "--depth", "6"],
        ["growth", "--in", sysf, "--depth", "10"],
        ["synthesize", "--in", sysf, "--k-max", "8"],
        ["synthesize", "--mode", "zero", "--in", sysf, "--horizon", "2000"],
        ["simulate", "--in", sysf, "--trials", "130", "--horizon", "1000", "--seed", "3"],
        ["simulate", "--in", sysf, "--law", lawf, "--horizon", "5000", "--x0", "1,1"],
        ["classify", "--law", lawf, "--in", sysf, "--delta", "0.01"],
    ]
    mismatched = []
    for i, cmd in enumerate(commands):
        outs = []
        for threads in ("1", "8", "1", "8"):
            p = tmp_path / f"o{i}_{len(outs)}.json"
            main(cmd + ["--threads", threads, "--out", str(p)])
            outs.append(p.read_bytes())
        json.loads(outs[0])
        if len(set(outs)) != 1:
            mismatched.append(cmd[0])
    capsys.readouterr()
    ac_report("AC14", not mismatched, f"{len(commands)} commands x threads 1/8 twice, mismatches {mismatched}")
