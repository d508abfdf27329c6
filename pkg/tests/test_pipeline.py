import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zerominor.ec import INFINITY
from zerominor.matfq import KernelView, MatrixFq, left_kernel, normalize_kernel, rank, right_kernel
from zerominor.pipeline import (
    Exhausted,
    LasVegasConfig,
    MultiplierSet,
    NoHit,
    PointCollisionError,
    RecoveryError,
    Solution,
    build_M,
    build_row,
    default_n_prime,
    draw_multipliers,
    iterate_once,
    monomial_basis,
    recover_m,
    solve,
)
from zerominor.problem_l import certificate_from_vector, scan_entries, verify_certificate


def sum_relation_holds(inst, sol):
    """sum_{S_P} n_i P - sum_{S_Q} n_j Q = O by direct curve arithmetic."""
    c = inst.curve
    acc = INFINITY
    for row in sol.certificate.selected_rows:
        n = sol.multipliers.multiplier_of_row(row)
        if sol.multipliers.side_of_row(row) == "P":
            acc = c.add(acc, c.scalar_mul(inst.P, n))
        else:
            acc = c.add(acc, c.scalar_mul(inst.Q, -n))
    return acc.is_infinity


# -- configuration -------------------------------------------------------------------

def test_config_defaults_and_validation():
    cfg = LasVegasConfig(n_prime=3)
    assert (cfg.k, cfg.l, cfg.s, cfg.t) == (9, 9, 10, 8)
    assert LasVegasConfig(n_prime=2, s=8).t == 4
    for bad in (dict(s=6, t=6), dict(s=7, t=6), dict(s=0)):
        with pytest.raises(ValueError):
            LasVegasConfig(n_prime=2, **bad)
    with pytest.raises(ValueError):
        LasVegasConfig(n_prime=2, strategy="random")
    with pytest.raises(ValueError):
        LasVegasConfig(n_prime=0)


def test_default_n_prime():
    assert default_n_prime(5) == 3
    assert default_n_prime(2) == 2
    assert default_n_prime(2 ** 16 + 1) == 17


# -- monomials and rows ---------------------------------------------------------------

def test_monomial_basis_small_cases():
    assert monomial_basis(1) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    b2 = monomial_basis(2)
    assert len(b2) == 6 == math.comb(4, 2)
    assert b2[:3] == ((2, 0, 0), (1, 1, 0), (1, 0, 1))
    with pytest.raises(ValueError):
        monomial_basis(0)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 30, 120])
def test_monomial_basis_size_and_order(n):
    b = monomial_basis(n)
    assert len(b) == (n + 1) * (n + 2) // 2
    assert len(set(b)) == len(b)
    assert all(sum(t) == n for t in b)
    assert list(b) == sorted(b, reverse=True)   # graded lex with x > y > z
    if n == 120:
        assert len(b) == 7381


def test_build_row(small_prime_instance):
    f = small_prime_instance.field
    P = small_prime_instance.P
    assert build_row(f, P, monomial_basis(1)) == [P.x, P.y, 1]
    row = build_row(f, type(P)(0, P.y), monomial_basis(2))
    for (u, _, _), e in zip(monomial_basis(2), row):
        if u > 0:
            assert e == 0
    with pytest.raises(ValueError):
        build_row(f, INFINITY, monomial_basis(2))


def test_rows_annihilate_right_kernel_curves(small_binary_instance):
    inst = small_binary_instance
    rng = np.random.default_rng(0)
    basis = monomial_basis(2)
    mults = draw_multipliers(inst.order, 3, 1, rng)   # 4 points, 6 monomials
    M = build_M(inst, mults, basis)
    for coeffs in right_kernel(M).rows:
        for row in M.rows:
            acc = 0
            for a, b in zip(row, coeffs):
                acc = inst.field.add(acc, inst.field.mul(a, b))
            assert acc == 0


# -- the point matrix ---------------------------------------------------------------------

@pytest.mark.parametrize("n_prime", [2, 3])
def test_kernel_dimension_is_k_generically(mid_prime_instance, n_prime):
    inst = mid_prime_instance
    k = 3 * n_prime
    rng = np.random.default_rng(n_prime)
    dims = []
    for _ in range(10):
        M = build_M(inst, draw_multipliers(inst.order, k + 1, k - 1, rng), monomial_basis(n_prime))
        assert M.shape == (2 * k, (n_prime + 1) * (n_prime + 2) // 2)
        K = left_kernel(M)
        assert K.nrows == 2 * k - rank(M)
        dims.append(K.nrows)
    assert dims.count(k) >= 9


@pytest.mark.parametrize("n_prime", [1, 2, 3])
def test_points_summing_to_identity_lose_rank(mid_prime_instance, n_prime):
    """3n' points summing to O lie on a degree-n' curve: the 3n' rows are dependent."""
    inst = mid_prime_instance
    k = 3 * n_prime
    p = inst.order
    rng = np.random.default_rng(10 + n_prime)
    for _ in range(5):
        ns = [int(x) for x in rng.integers(1, p, k - 1)]
        last = (-sum(ns)) % p
        if last == 0 or len(set(ns + [last])) < k:
            continue
        mults = MultiplierSet(tuple(ns + [last]), ())
        M = build_M(inst, mults, monomial_basis(n_prime))
        assert rank(M) <= k - 1
        # a generic set of 3n' points is independent
        generic = MultiplierSet(tuple(int(x) for x in rng.choice(np.arange(1, p), k, replace=False)), ())
        assert rank(build_M(inst, generic, monomial_basis(n_prime))) == k


def test_duplicate_point_is_a_collision(small_prime_instance):
    inst = small_prime_instance
    m = inst.known_m
    n = 5
    # n_i P = -n_j Q  <=>  n_i = -n_j m (mod p)
    nj = 7
    ni = (-nj * m) % inst.order
    with pytest.raises(PointCollisionError):
        build_M(inst, MultiplierSet((n, ni), (nj,)), monomial_basis(1))


def test_draw_multipliers_are_distinct_and_in_range(small_prime_instance):
    rng = np.random.default_rng(1)
    ms = draw_multipliers(small_prime_instance.order, 10, 8, rng)
    assert len(set(ms.all)) == 18
    assert all(1 <= n < small_prime_instance.order for n in ms.all)
    with pytest.raises(ValueError):
        draw_multipliers(11, 6, 6, rng)


# -- recovery -------------------------------------------------------------------------------

def test_two_point_relation_recovers_m(small_prime_instance):
    inst = small_prime_instance
    p = inst.order
    n_q = 1234 % p
    n_p = n_q * inst.known_m % p
    mults = MultiplierSet((n_p, 3), (n_q,))
    cert = certificate_from_vector([5, 0, 9])
    assert recover_m(cert, mults, inst) == n_p * pow(n_q, -1, p) % p == inst.known_m


def test_p_side_only_certificate_is_rejected(small_prime_instance):
    mults = MultiplierSet((2, 3, 4), (5,))
    with pytest.raises(RecoveryError):
        recover_m(certificate_from_vector([1, 1, 1, 0]), mults, small_prime_instance)


def test_wrong_relation_fails_verification(small_prime_instance):
    inst = small_prime_instance
    mults = MultiplierSet((2, 3), (5,))
    cand = 2 * pow(5, -1, inst.order) % inst.order
    if cand == inst.known_m:
        pytest.skip("accidental solution")
    with pytest.raises(RecoveryError):
        recover_m(certificate_from_vector([1, 0, 1]), mults, inst)


# -- rounds and the solve loop ------------------------------------------------------------

@pytest.mark.parametrize("strategy", ["entries", "all2minors", "schur"])
def test_solve_finds_planted_m(small_prime_instance, small_binary_instance, strategy):
    for inst in (small_prime_instance, small_binary_instance):
        sol = solve(inst, LasVegasConfig(n_prime=2, strategy=strategy, seed=1, max_iterations=5000))
        assert isinstance(sol, Solution)
        assert sol.m == inst.known_m
        assert sum_relation_holds(inst, sol)
        assert len(sol.certificate.selected_rows) == 6
        assert sol.iterations >= 1


def test_entries_strategy_solves_whenever_a_has_a_zero_entry():
    from zerominor.instances import gen_instance
    inst = gen_instance(8, "binary", np.random.default_rng(12))
    cfg = LasVegasConfig(n_prime=2, strategy="entries")
    rng = np.random.default_rng(5)
    seen_zero = 0
    for _ in range(100):
        captured = []
        out = iterate_once(inst, cfg, rng, dump=captured.append)
        view = normalize_kernel(captured[0], cfg.k)
        if not isinstance(view, KernelView):
            continue
        if scan_entries(view.A) is not None:
            seen_zero += 1
            assert isinstance(out, Solution) or "P-side" in out.reason or "fails" in out.reason
        else:
            assert isinstance(out, NoHit)
    assert seen_zero > 0


def test_every_certificate_is_a_kernel_vector(small_binary_instance):
    inst = small_binary_instance
    cfg = LasVegasConfig(n_prime=2, strategy="schur")
    rng = np.random.default_rng(6)
    solved = 0
    for _ in range(40):
        captured = []
        out = iterate_once(inst, cfg, rng, dump=captured.append)
        if isinstance(out, Solution):
            solved += 1
            assert verify_certificate(captured[0], out.certificate)
            M = build_M(inst, out.multipliers, monomial_basis(2))
            assert M.vecmul(out.certificate.v) == [0] * M.ncols
    assert solved > 0


def test_max_iterations_zero_is_exhausted(small_prime_instance):
    out = solve(small_prime_instance, LasVegasConfig(n_prime=2, max_iterations=0))
    assert isinstance(out, Exhausted) and out.iterations == 0
    out = solve(small_prime_instance, LasVegasConfig(n_prime=2, max_iterations=0, workers=2))
    assert isinstance(out, Exhausted)


def test_single_worker_transcripts_are_identical(small_prime_instance):
    cfg = LasVegasConfig(n_prime=2, strategy="all2minors", seed=99, max_iterations=500)
    runs = []
    for _ in range(2):
        log = []
        sol = solve(small_prime_instance, cfg, transcript=lambda r: log.append(json.dumps(r, sort_keys=True)))
        runs.append((sol.m, sol.iterations, log))
    assert runs[0] == runs[1]
    assert len(runs[0][2]) == runs[0][1]


def test_different_streams_differ(small_prime_instance):
    cfg = LasVegasConfig(n_prime=2, seed=3, max_iterations=500)
    a, b = [], []
    solve(small_prime_instance, cfg, stream=(0,), transcript=a.append)
    solve(small_prime_instance, cfg, stream=(1,), transcript=b.append)
    assert a[0]["multipliers"] != b[0]["multipliers"]


def test_basis_permutation_only_permutes_columns(small_binary_instance):
    inst = small_binary_instance
    basis = monomial_basis(2)
    shuffled = tuple(basis[i] for i in (3, 0, 5, 1, 4, 2))
    rng = np.random.default_rng(8)
    mults = draw_multipliers(inst.order, 7, 5, rng)
    M1, M2 = build_M(inst, mults, basis), build_M(inst, mults, shuffled)
    assert M2 == M1.permute_columns([3, 0, 5, 1, 4, 2])
    cfg = LasVegasConfig(n_prime=2, seed=4, max_iterations=2000)
    s1 = solve(inst, cfg, basis=basis)
    s2 = solve(inst, cfg, basis=shuffled)
    assert s1.m == s2.m == inst.known_m
    assert s1.iterations == s2.iterations


def test_parallel_workers_return_verified_solutions(small_binary_instance):
    inst = small_binary_instance
    log = []
    sol = solve(inst, LasVegasConfig(n_prime=2, seed=2, workers=2, max_iterations=4000), transcript=log.append)
    assert isinstance(sol, Solution) and inst.check_solution(sol.m)
    assert sum_relation_holds(inst, sol)
    assert {r["worker"] for r in log} <= {0, 1}


def test_kernel_dump_layout(small_prime_instance, tmp_path):
    cfg = LasVegasConfig(n_prime=2, seed=1, max_iterations=50)
    sol = solve(small_prime_instance, cfg, dump_dir=tmp_path)
    files = sorted((tmp_path / "kernel").iterdir())
    assert len(files) == sol.iterations
    K = MatrixFq.parse_dump(small_prime_instance.field, files[0].read_text())
    assert K.shape == (6, 12)


@settings(max_examples=8)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 4))
def test_solutions_always_verify(seed, n_prime):
    from zerominor.instances import gen_instance
    inst = gen_instance(10, "prime", np.random.default_rng(seed))
    sol = solve(inst, LasVegasConfig(n_prime=n_prime, seed=seed, max_iterations=3000))
    assert isinstance(sol, Solution)
    assert inst.curve.scalar_mul(inst.P, sol.m) == inst.Q
