"""Acceptance gate: one test per criterion, each printed as a pass/fail line
in the terminal summary (see conftest.py)."""

import io
import json
import math
import time

import pytest

from apgeo.cli import EXIT_OK, run
from apgeo.exact_core import IntMatrix, mat_pow, mat_pow_mod, parse_matrix
from apgeo.filtration import (
    kernel_order_check,
    n_of_brute,
    n_table,
    n_table_brute,
    prime_power_series,
    stability_radius,
)
from apgeo.geodesics import abs_prim_root, hyperbolic, is_absolutely_primitive, is_primitive, length_class
from apgeo.progressions import (
    ProgressionWitness,
    build_progression,
    build_progression_containing,
    prime_density_report,
    verify_witness,
)
from apgeo.ramsey import TransferMap, find_mono_ap, transfer_progression, verify_transferred, vdw_number

from conftest import a1, hyperbolic_matrices

FIB = parse_matrix("2,1;1,1")
LIFT_PRIMES = (3, 5, 7, 11, 13)


def lifting_corpus():
    """24 hyperbolic matrices with entries in [-4, 4], evenly spaced through the full list."""
    cands = [g for g in hyperbolic_matrices(4) if abs(g.trace()) <= 20]
    return cands[::len(cands) // 24][:24]


def run_cli(*argv):
    out = io.StringIO()
    return run(["--no-cache", *argv], out), out.getvalue()


@pytest.mark.criterion(1, "lifting law: ratios in {1,p}, fast = brute, R <= 4 on 24 matrices x 5 primes, < 60 s")
def test_lifting_law():
    corpus = lifting_corpus()
    assert len(corpus) >= 20
    start = time.perf_counter()
    for g in corpus:
        for p in LIFT_PRIMES:
            eta = a1(p)
            fast = n_table(g, eta, 6)
            for r in range(1, 6):
                assert fast[r + 1] // fast[r] in (1, p) and fast[r + 1] % fast[r] == 0, (g, p, r)
            assert n_table_brute(g, eta, 5) == {r: fast[r] for r in range(1, 6)}, (g, p)
            assert stability_radius(g, eta, cap=4).R <= 4
    assert time.perf_counter() - start < 60


@pytest.mark.criterion(2, "kernel orders: exhaustive p=3, the (2,1) exception, sampled checks, < 30 s")
def test_kernel_orders():
    start = time.perf_counter()
    for i in (1, 2):
        rep = kernel_order_check(2, 3, i, "exhaustive")
        assert rep.passed and not rep.violations and rep.checked == 729
    rep = kernel_order_check(2, 2, 1, "exhaustive")
    three = [[3, 0], [0, 3]]
    assert any(w["B"] == three for w in rep.excluded_witnesses)
    b = IntMatrix(((3, 0), (0, 3)))
    assert mat_pow_mod(b, 2, 8).is_identity() and b.det() % 8 == 1
    assert not b.reduce(4).is_identity() and b.reduce(2).is_identity()
    for n, p, i in [(2, 5, 1), (3, 3, 1), (2, 3, 2)]:
        rep = kernel_order_check(n, p, i, "sampled", samples=500, seed=0)
        assert rep.passed and rep.checked == 500
    assert time.perf_counter() - start < 30


@pytest.mark.criterion(3, "prime-power series for [[2,1],[1,1]] at p = 5: n = 5, 25, 125 and theta_1 exact")
def test_prime_power_series():
    series = prime_power_series(FIB, a1(5), 3)
    assert [(r, n) for r, n, _ in series] == [(1, 5), (2, 25), (3, 125)]
    assert [n_of_brute(FIB, a1(5), r) for r in (1, 2, 3)] == [5, 25, 125]
    assert series[0][2] == parse_matrix("89,275;11,34")
    for _, _, theta in series:
        assert theta.det() == 1 and is_primitive(hyperbolic(theta, 5))


@pytest.mark.criterion(4, "five-term progression C*{5,11,17,23,29} with C = 1260 confirmed by brute n, verified, < 120 s")
def test_five_term_progression():
    start = time.perf_counter()
    code, text = run_cli("progression", "--k", "5", "--gamma", "2,1;1,1")
    assert code == EXIT_OK
    w = ProgressionWitness.from_json(json.loads(text))
    assert w.primes == [5, 11, 17, 23, 29]
    R = max(stability_radius(FIB, a1(p)).R for p in w.primes)
    oracle = math.lcm(*(n_of_brute(FIB, a1(p), R) for p in w.primes))
    assert (R, oracle) == (1, 1260)
    assert w.R == R and w.C == oracle
    assert w.multipliers == [oracle * p for p in w.primes]
    assert {b - a for a, b in zip(w.multipliers, w.multipliers[1:])} == {6 * oracle}
    assert len(str(w.terms[-1].theta[0, 0])) > 1000
    rep = verify_witness(w)
    assert rep.passed, rep.failures
    assert time.perf_counter() - start < 120


@pytest.mark.criterion(5, "progression containing [[6,1],[5,1]] (j = 2): 2 | C and verified")
def test_containing_progression():
    gamma = parse_matrix("6,1;5,1")
    g = hyperbolic(gamma)
    assert is_primitive(g) and not is_absolutely_primitive(g)
    w = build_progression_containing(gamma, 3)
    assert w.j == 2 and w.C % 2 == 0
    target = length_class(g).multiplier
    assert target == 2
    assert all(m % target == 0 for m in w.multipliers)
    rep = verify_witness(w)
    assert rep.passed, rep.failures


@pytest.mark.criterion(6, "transfer with d_M = 2, d_M' = 3, period-2 map, k = 3: integral monochromatic AP")
def test_transfer():
    w = build_progression(FIB, 3)
    tm = TransferMap(2, 3, ((1, 1), (2, 3)))
    tp = transfer_progression(w, tm, 3)
    assert len({tm.pair(i) for i in tp.indices}) == 1
    assert find_mono_ap(tm.coloring(tp.N), 3) == (tp.start, tp.difference)
    ms = tp.multipliers
    assert len(ms) == 3 and all(isinstance(m, int) and m > 0 for m in ms)
    assert ms[1] - ms[0] == ms[2] - ms[1] > 0
    p, q = tp.ratio
    for m, t in zip(ms, tp.indices):
        assert m * q * tm.d == (tp.witness.C // tp.witness.j) * tm.d_prime * p * tp.witness.primes[t - 1]
    assert verify_transferred(tp).passed


@pytest.mark.criterion(7, "W(2,3) = 9 by exhaustive search with the {1,2,5,6}/{3,4,7,8} certificate, < 1 s")
def test_van_der_waerden():
    start = time.perf_counter()
    res = vdw_number(2, 3, 20)
    elapsed = time.perf_counter() - start
    assert res.N == 9
    assert res.certificate.colors == (0, 0, 1, 1, 0, 0, 1, 1)
    assert find_mono_ap(res.certificate, 3) is None
    assert elapsed < 1


@pytest.mark.criterion(8, "split primes for D0 = 5 up to 10^5 within 0.02 of 1/2")
def test_density():
    assert abs(prime_density_report(5, 10 ** 5).proportion - 0.5) <= 0.02


@pytest.mark.criterion(9, "geodesic invariants on every hyperbolic matrix with entries bounded by 30")
def test_geodesic_invariants():
    mats = hyperbolic_matrices(30)
    assert len(mats) > 7000
    for g in mats:
        h = hyperbolic(g)
        if is_absolutely_primitive(h):
            assert is_primitive(h)
        for m in (2, 3):
            assert not is_primitive(hyperbolic(mat_pow(g, m), h.d0))
        mu, m = abs_prim_root(h)
        assert is_absolutely_primitive(mu) and mu.d0 == h.d0
        assert mu.lam ** m == h.lam
        assert length_class(h).multiplier == m * length_class(mu).multiplier
