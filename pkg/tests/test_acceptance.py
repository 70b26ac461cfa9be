"""Acceptance suite: one test (or test group) per criterion, with a PASS/FAIL summary line each.

Exact checks run in Laurent mode, numeric ones at the stated loop values and
tolerances.  The summary is printed at the end of the pytest run.
"""

import gc
import random
import shutil
import subprocess
import sys
import time

import pytest

from palab.diagram import catalan
from palab.graded import element_U, element_W
from palab.spectral import Frame
from palab.verify import (
    Context,
    commutant_report,
    cup_orthogonality_residual,
    lambda_nullity,
    norm_report,
    prop_alpha,
    prop_hilbert,
    prop_inclusion,
    prop_jones,
    prop_moments,
    prop_three_term_unit,
    three_term_v1_residual,
    v_space_report,
)

RESULTS: dict = {}
EXACT = Context(None)
RESIDUAL = 1e-8


def record(n, ok, detail):
    RESULTS.setdefault(n, []).append((bool(ok), detail))
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


def rng(tag):
    return random.Random(f"acceptance-{tag}")


# -- 1: Hilbert algebra ----------------------------------------------------------

def hilbert_block(ks, rs, max_degree, samples, tag):
    witnesses = []
    for r in rs:
        for k in ks:
            w = prop_hilbert(k, r, max_degree, samples, rng(f"{tag}-{k}-{r}"), EXACT)
            if w is not None:
                witnesses.append(w)
    return witnesses


def test_criterion_1_hilbert_algebra():
    start = time.perf_counter()
    witnesses = hilbert_block((0, 1, 2), (1, 2), 3, 200, "hilbert")
    elapsed = time.perf_counter() - start
    ok = not witnesses and elapsed < 120
    record(1, ok, f"200 triples x 6 (k,r), degrees <= 3, {elapsed:.1f}s, failures={len(witnesses)}")
    assert not witnesses, witnesses[0]
    assert elapsed < 120


# -- 2: inclusion isometry -------------------------------------------------------

def test_criterion_2_inclusion_isometry():
    pairs = [(k, l) for k in range(4) for l in range(k + 1, 4)]
    witnesses = [w for k, l in pairs if (w := prop_inclusion(k, l, 1, 3, 100, rng(f"incl-{k}-{l}"), EXACT))]
    record(2, not witnesses, f"{len(pairs)} level pairs, 100 samples each")
    assert not witnesses, witnesses[0]


# -- 3: cup orthogonality and three-term expansion -------------------------------

def test_criterion_3_orthogonality_and_three_term():
    ortho = max(cup_orthogonality_residual(k, 1, 2.0) for k in (0, 1))
    exact = [w for k in (0, 1, 2) if (w := prop_three_term_unit(k, 1, 4, EXACT))]
    v1 = max(three_term_v1_residual(k, 1, 2.0) for k in (0, 1))
    ok = ortho < RESIDUAL and not exact and v1 < RESIDUAL
    record(3, ok, f"orthonormality residual {ortho:.2e}, exact on I (p+q <= 4): {not exact}, V_1 residual {v1:.2e}")
    assert ortho < RESIDUAL
    assert not exact, exact[0]
    assert v1 < RESIDUAL


# -- 4: alpha constant -----------------------------------------------------------

def test_criterion_4_alpha_constant():
    witnesses = [w for k in (0, 1, 2) if (w := prop_alpha(k, 1, 4, EXACT))]
    record(4, not witnesses, "<alpha_n, alpha_n> = 2(delta^2 - 1) for n = 1..4, k = 0..2")
    assert not witnesses, witnesses[0]


# -- 5: Jones projection and Markov property -------------------------------------

def test_criterion_5_jones_markov():
    witnesses = [w for k in (1, 2) if (w := prop_jones(k, 1, 3, 100, rng(f"jones-{k}"), EXACT))]
    record(5, not witnesses, "e_k projection, tr(e_k) = delta^-2, Markov and e x e law; k = 1, 2; 100 samples")
    assert not witnesses, witnesses[0]


# -- 6: moments ------------------------------------------------------------------

def test_criterion_6_moments():
    witnesses = [w for k in (0, 1) if (w := prop_moments(k, 1, 8, EXACT))]
    record(6, not witnesses, "tr(U^m) = lattice-path moment for m <= 8, k <= 1")
    assert not witnesses, witnesses[0]


# -- 7: norm bounds --------------------------------------------------------------

NORM_N = 5
NORM_DELTAS = (2.0, 2.5)


@pytest.fixture(scope="module")
def norm_reports():
    out = {}
    for delta in NORM_DELTAS:
        frame = Frame(0, 1, delta)
        for name, a in (("U", element_U(0)), ("W", element_W(0))):
            out[(name, delta)] = norm_report(a, NORM_N, delta, frame)
        frame.release()
        del frame
        gc.collect()
    return out


def test_criterion_7_blocks_and_U_bound(norm_reports):
    problems = []
    for (name, delta), rep in norm_reports.items():
        if name == "U" and rep["norm"] > 2 * delta + 1 + RESIDUAL:
            problems.append(f"|L_U| = {rep['norm']:.6f} at delta={delta}")
        for b in rep["blocks"]:
            if b["max"] > b["constant"] + RESIDUAL:
                problems.append(f"L_{name}^{b['i']} = {b['max']:.6f} > {b['constant']:.6f} at delta={delta}")
            if b["stability"] > 1e-6:
                problems.append(f"L_{name}^{b['i']} moved {b['stability']:.2e} from l=4 to l=5 at delta={delta}")
    u = ", ".join(f"{norm_reports[('U', d)]['norm']:.4f}" for d in NORM_DELTAS)
    record(7, not problems, f"blocks within constants and stable; |L_U| = {u} (N=5)")
    assert not problems, problems


@pytest.mark.xfail(strict=True, reason="the truncated norm of L_W exceeds 2 delta + 1 (it tends to 3 delta)")
def test_criterion_7_W_bound(norm_reports):
    over = {d: norm_reports[("W", d)]["norm"] for d in NORM_DELTAS}
    ok = all(v <= 2 * d + 1 + RESIDUAL for d, v in over.items())
    detail = ", ".join(f"|L_W| = {v:.4f} vs {2 * d + 1} at delta={d}" for d, v in over.items())
    record(7, ok, detail)
    assert ok, detail


# -- 8: commutants ---------------------------------------------------------------

def test_criterion_8_commutants():
    problems = []
    for k in (0, 1, 2):
        rep = commutant_report(k, 4, 2.0)
        if rep["nullity"] != catalan(k) or rep["residual"] >= RESIDUAL or rep["distance_to_P0k"] >= RESIDUAL:
            problems.append(f"k={k}: {rep}")
    for delta in (1.5, 2.0, 3.0):
        for k in range(4):
            nullity, _ = lambda_nullity(k, delta)
            if nullity:
                problems.append(f"Lambda nullity {nullity} at k={k}, delta={delta}")
    record(8, not problems, "commutant of {U, W} = P_0,k for k <= 2; Lambda trace-zero nullity 0")
    assert not problems, problems


# -- 9: V_n consistency ----------------------------------------------------------

def test_criterion_9_v_spaces():
    problems = []
    dims = {}
    for k in (0, 1):
        rep = v_space_report(k, 1, 2.0, 3)
        dims[k] = rep["dims"]
        if max(rep["distances"]) >= RESIDUAL:
            problems.append(f"k={k}: distances {rep['distances']}")
        if any(rep["bookkeeping_defects"]):
            problems.append(f"k={k}: bookkeeping {rep['bookkeeping_defects']}")
    if dims[0][:3] != [1, 1, 11]:
        problems.append(f"k=0 dims {dims[0]}")
    record(9, not problems, f"dim V_n: k=0 {dims[0]}, k=1 {dims[1]}")
    assert not problems, problems


# -- 10: two bands per group -----------------------------------------------------

def test_criterion_10_two_bands():
    r = 2
    failures = hilbert_block((0, 1), (r,), 2, 200, "hilbert-r2")
    failures += [w for k, l in ((0, 1), (0, 2), (1, 2))
                 if (w := prop_inclusion(k, l, r, 2, 100, rng(f"incl-r2-{k}-{l}"), EXACT))]
    failures += [w for k in (0, 1) if (w := prop_three_term_unit(k, r, 4, EXACT))]
    failures += [w for k in (0, 1) if (w := prop_alpha(k, r, 4, EXACT))]
    failures += [w for w in [prop_jones(1, r, 2, 100, rng("jones-r2"), EXACT)] if w]
    record(10, not failures, "criteria 1-5 exact at r=2, k <= 1, degrees <= 2")
    assert not failures, failures[0]


# -- 11: reproducibility ---------------------------------------------------------

def test_criterion_11_reproducible_cli():
    exe = shutil.which("palab")
    cmd = [exe] if exe else [sys.executable, "-m", "palab.cli"]
    cmd += ["verify", "--suite", "all", "--seed", "42"]
    start = time.perf_counter()
    first = subprocess.run(cmd, capture_output=True, check=False)
    second = subprocess.run(cmd, capture_output=True, check=False)
    elapsed = time.perf_counter() - start
    same = first.stdout == second.stdout and len(first.stdout) > 0
    ok = same and elapsed < 900 and first.returncode == 0
    record(11, ok, f"byte-identical={same}, exit={first.returncode}, two runs in {elapsed:.1f}s")
    assert same
    assert first.returncode == 0, first.stderr.decode()
    assert elapsed < 900
