"""Acceptance gate: one test per shipping criterion, each printing a verdict.

Run with ``pytest -v tests/test_acceptance.py`` for the per-criterion
pass/fail lines (add ``-s`` to also see the measured margins).  The corpus
fixtures are shared between criteria, so the file is fastest when run as a
whole.  Expect a few minutes of wall time; the large least-squares
reproductions dominate.
"""

import time

import numpy as np
import pytest

from mixfactor import (
    BASIC_METHODS,
    dct2,
    dct3,
    extract_r,
    form_q,
    gen_condition,
    gen_correlated,
    gen_devils_stairs,
    gen_gap,
    gen_heavytail,
    gen_kahan,
    haar_sample,
    house_qr,
    house_qrcp,
    jacobi_svd,
    qlp,
    ros_apply,
    ros_dense,
    ros_sample,
    rr_conditions,
    rurv_haar,
    rurv_ros,
    rvalue_ratios,
    rvlu_ros,
    solve_basic,
    solve_min_norm,
    solve_overdetermined,
    urv_reconstruct,
    vlu_reconstruct,
    column_norm_stats,
)
from mixfactor.cli import main as cli_main

EPS = np.finfo(np.float64).eps


def report(number, name, ok, detail):
    print(f"criterion {number:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {number} {name}: {detail}"


# ---------------------------------------------------------------------------
# shared corpora


@pytest.fixture(scope="module")
def factorization_corpus():
    """200 random shapes in [1, 64]^2, all five factorizations of each."""
    rng = np.random.default_rng(817263545)
    records = []
    elapsed = 0.0
    for _ in range(200):
        m = int(rng.integers(1, 65))
        n = int(rng.integers(1, 65))
        a = rng.standard_normal((m, n))
        seeds = rng.spawn(3)
        t0 = time.perf_counter()
        factors = {
            "qr": house_qr(a),
            "qrcp": house_qrcp(a),
            "rurv-haar": rurv_haar(a, seeds[0]),
            "rurv-ros": rurv_ros(a, 1, seeds[1]),
            "rvlu-ros": rvlu_ros(a, 1, seeds[2]),
        }
        elapsed += time.perf_counter() - t0
        records.append((a, factors))
    return records, elapsed


@pytest.fixture(scope="module")
def kahan_sweep():
    """Rank-revealing reports at the hardest split of the Kahan matrix.

    For each size: the pivoted factorization once (it is deterministic) and
    ten randomized factorizations per mixing backend.
    """
    rng = np.random.default_rng(555443322)
    sweeps = []
    for m in range(20, 201, 20):
        a = gen_kahan(m)
        sigma = jacobi_svd(a, want_vectors=False).sigma
        k = m - 1
        entry = {
            "m": m,
            "qrcp": rr_conditions(sigma, extract_r(house_qrcp(a)), k),
            "rurv-haar": [], "rurv-ros": [],
        }
        for _ in range(10):
            entry["rurv-haar"].append(rr_conditions(sigma, rurv_haar(a, rng.spawn(1)[0]).r, k))
            entry["rurv-ros"].append(rr_conditions(sigma, rurv_ros(a, 1, rng.spawn(1)[0]).r, k))
        sweeps.append(entry)
    return sweeps


def reconstruct(name, a, f):
    if name == "qr":
        return form_q(f) @ extract_r(f)
    if name == "qrcp":
        out = np.empty_like(a)
        out[:, f.perm] = form_q(f) @ extract_r(f)
        return out
    if name == "rvlu-ros":
        return vlu_reconstruct(f)
    return urv_reconstruct(f)


def orthogonal_factors(name, f):
    """All square orthogonal matrices accumulated by one factorization."""
    if name in ("qr", "qrcp"):
        return [form_q(f)]
    if name == "rvlu-ros":
        return [ros_dense(f.v), form_q(f.u)]
    v = f.v if isinstance(f.v, np.ndarray) else ros_dense(f.v)
    return [form_q(f.u), v]


# ---------------------------------------------------------------------------
# criteria


def test_criterion_01_factorization_correctness(factorization_corpus):
    records, elapsed = factorization_corpus
    worst = 0.0
    t0 = time.perf_counter()
    for a, factors in records:
        m, n = a.shape
        scale = 200 * max(m, n) * EPS * max(np.linalg.norm(a), EPS)
        for name, f in factors.items():
            err = np.linalg.norm(reconstruct(name, a, f) - a)
            worst = max(worst, err / scale)
    total = elapsed + (time.perf_counter() - t0)
    ok = worst <= 1.0 and total < 30.0
    report(1, "factorization correctness", ok,
           f"worst error {worst:.3f} of budget, {total:.1f}s of 30s")


def test_criterion_02_orthogonality(factorization_corpus):
    records, _ = factorization_corpus
    worst = 0.0
    for a, factors in records:
        for name, f in factors.items():
            for q in orthogonal_factors(name, f):
                n = q.shape[0]
                err = np.linalg.norm(q.T @ q - np.eye(n))
                worst = max(worst, err / (100 * n * EPS))
    ok = worst <= 1.0
    report(2, "orthogonal factors", ok, f"worst {worst:.3f} of the 100*n*eps budget")


def test_criterion_03_transform_exactness():
    lengths = list(range(1, 33)) + [100, 250, 257, 1024]
    worst_fwd = worst_rt = 0.0
    for n in lengths:
        x = np.random.default_rng(n).standard_normal(n)
        norm = np.linalg.norm(x)
        k = np.arange(n)[:, None]
        j = np.arange(n)[None, :]
        weights = np.full(n, np.sqrt(2.0 / n))
        weights[0] = np.sqrt(1.0 / n)
        table = weights[:, None] * np.cos(np.pi * k * (2 * j + 1) / (2.0 * n))
        worst_fwd = max(worst_fwd, np.linalg.norm(dct2(x) - table @ x) / (1e-12 * norm))
        worst_fwd = max(worst_fwd, np.linalg.norm(dct3(x) - table.T @ x) / (1e-12 * norm))
        worst_rt = max(worst_rt, np.linalg.norm(dct3(dct2(x)) - x) / (1e-13 * norm))
    ok = worst_fwd <= 1.0 and worst_rt <= 1.0
    report(3, "transform exactness", ok,
           f"worst vs cosine sum {worst_fwd:.3f}, worst roundtrip {worst_rt:.3f} of budget")


def test_criterion_04_mixing_preserves_spectrum():
    # relative to the largest singular value: a float orthogonal factor is
    # only orthogonal to eps, which perturbs every sigma_i by about
    # eps * sigma_1 regardless of its own size
    rng = np.random.default_rng(24681012)
    worst = 0.0
    for trial in range(50):
        m = int(rng.integers(2, 81))
        n = int(rng.integers(2, 81))
        kappa = 10.0 ** rng.uniform(0.0, 8.0)
        a = gen_condition(m, n, kappa, rng.spawn(1)[0]).a
        if trial % 2 == 0:
            mixed = ros_apply(ros_sample(n, 1, rng.spawn(1)[0]), a, "right-transpose")
        else:
            mixed = a @ haar_sample(n, rng.spawn(1)[0]).T
        sigma = np.linalg.svd(a, compute_uv=False)
        sigma_mixed = np.linalg.svd(mixed, compute_uv=False)
        worst = max(worst, np.max(np.abs(sigma_mixed - sigma)) / sigma[0])
    ok = worst <= 1e-11
    report(4, "mixing preserves singular values", ok,
           f"worst scaled deviation {worst:.2e} vs 1e-11")


def test_criterion_05_column_norm_variance_reduction():
    rng = np.random.default_rng(987650)
    wins = {"haar": 0, "ros": 0}
    worst_mean = 0.0
    seeds = 100
    for _ in range(seeds):
        a = gen_heavytail(250, 250, rng.spawn(1)[0])
        pre = column_norm_stats(a)
        worst_mean = max(worst_mean, abs(pre.mean - 1.0))
        post_haar = column_norm_stats(a @ haar_sample(250, rng.spawn(1)[0]).T)
        post_ros = column_norm_stats(
            ros_apply(ros_sample(250, 1, rng.spawn(1)[0]), a, "right-transpose"))
        wins["haar"] += post_haar.stdev < pre.stdev
        wins["ros"] += post_ros.stdev < pre.stdev
    ok = wins["haar"] >= 95 and wins["ros"] >= 95 and worst_mean <= 0.01
    report(5, "mixing shrinks column-norm spread", ok,
           f"haar {wins['haar']}/{seeds}, ros {wins['ros']}/{seeds}, "
           f"generator mean within {worst_mean:.2e} of 1")


def test_criterion_06_correlated_columns_need_mixing():
    # note: the >= 18/20 count is a statistical gate on a heavy-tailed
    # quantity (the mixed leading block's smallest singular value follows
    # the square-random-matrix 1/u law, so the per-seed hit probability is
    # about 0.83); the seed protocol here is the plain sequential one and
    # the observed count is reported as measured
    t0 = time.perf_counter()
    seeds = 20
    big_ratio = 0
    worst_ros = 0.0
    ratios = []
    for seed in range(seeds):
        rng = np.random.default_rng(seed)
        a = gen_correlated(1000, 1500, 10, 1e-4, rng)
        b = rng.standard_normal(1000)
        naive = solve_basic(a, b, method="qr-basic")
        mixed = solve_basic(a, b, method="rurv-ros-basic", rng=rng)
        ratios.append(naive.residual_norm / mixed.residual_norm)
        big_ratio += ratios[-1] >= 1e2
        worst_ros = max(worst_ros, mixed.residual_norm)
    total = time.perf_counter() - t0
    ok = big_ratio >= 18 and worst_ros <= 1e-9 and total < 120.0
    report(6, "duplicated columns defeat the plain basic solve", ok,
           f"ratio >= 1e2 in {big_ratio}/{seeds} (median {np.median(ratios):.0f}), "
           f"worst mixed residual {worst_ros:.2e}, {total:.0f}s of 120s")


def test_criterion_07_uncorrelated_systems_are_easy_for_everyone():
    methods = BASIC_METHODS + ("rvlu-minnorm",)
    worst = {method: 0.0 for method in methods}
    for seed in range(20):
        rng = np.random.default_rng(seed)
        a = gen_correlated(1000, 1500, 0, 1e-4, rng)
        b = rng.standard_normal(1000)
        for method in BASIC_METHODS:
            sol = solve_basic(a, b, method=method, rng=rng)
            worst[method] = max(worst[method], sol.residual_norm)
        sol = solve_min_norm(a, b, rng=rng)
        worst["rvlu-minnorm"] = max(worst["rvlu-minnorm"], sol.residual_norm)
    bad = {k: v for k, v in worst.items() if v > 1e-10}
    summary = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report(7, "no duplicated columns, every method succeeds", not bad, summary)


def test_criterion_08_pivoting_fails_on_kahan_mixing_does_not(kahan_sweep):
    c = 0.1
    s = np.sqrt(1.0 - c * c)
    all_sizes_ok = True
    details = []
    for entry in kahan_sweep:
        m = entry["m"]
        bound = 0.5 * c**3 * (1.0 + c) ** (m - 4) / s
        qrcp_ok = entry["qrcp"].max_ratio_r11 >= bound
        tame = {name: sum(max(r.max_ratio_r11, r.max_ratio_r22) <= 1e4
                          for r in entry[name])
                for name in ("rurv-haar", "rurv-ros")}
        size_ok = qrcp_ok and tame["rurv-haar"] >= 9 and tame["rurv-ros"] >= 9
        all_sizes_ok = all_sizes_ok and size_ok
        details.append(f"m={m} qrcp x{entry['qrcp'].max_ratio_r11 / bound:.1f}")
    last = kahan_sweep[-1]
    report(8, "pivoted factor hides rank on the adversarial triangle", all_sizes_ok,
           f"qrcp/bound at m=200: {last['qrcp'].max_ratio_r11:.2e}"
           f"/{0.5 * c**3 * 1.1**196 / s:.2e}, randomized stay <= 1e4")


def test_criterion_09_interlacing(factorization_corpus, kahan_sweep):
    worst = np.inf
    for a, factors in factorization_corpus[0]:
        rk = min(a.shape)
        if rk < 2:
            continue
        sigma = np.linalg.svd(a, compute_uv=False)
        k = rk // 2
        for name, f in factors.items():
            if name == "rvlu-ros":
                r = f.l.T
            else:
                r = extract_r(f) if name in ("qr", "qrcp") else f.r
            r = r[:rk]
            s11 = np.linalg.svd(r[:k, :k], compute_uv=False)
            s22 = np.linalg.svd(r[k:, k:], compute_uv=False)
            with np.errstate(divide="ignore", invalid="ignore"):
                r11 = sigma[:k] / s11
                r22 = s22 / sigma[k:k + s22.size]
            finite = np.concatenate([r11[np.isfinite(r11)], r22[np.isfinite(r22)]])
            if finite.size:
                worst = min(worst, np.min(finite))
    for entry in kahan_sweep:
        for rep in [entry["qrcp"]] + entry["rurv-haar"] + entry["rurv-ros"]:
            worst = min(worst, rep.ratios_r11.min(), rep.ratios_r22.min())
    ok = worst >= 1.0 - 1e-10
    report(9, "interlacing lower bounds", ok, f"smallest ratio {worst:.12f}")


def test_criterion_10_rvalue_enclosure():
    cases = {
        "gap": gen_gap(128, 64, 1e-10, rng=31),
        "stairs": gen_devils_stairs(128, 16, 0.1, rng=32),
        "condition": gen_condition(128, 128, 1e6, rng=33),
    }
    margins = []
    ok = True
    for name, g in cases.items():
        rep = rvalue_ratios(extract_r(house_qrcp(g.a))[:128], g.sigma)
        inside = (rep.min >= rep.lower_bound * (1 - 1e-10)
                  and rep.max <= rep.upper_bound * (1 + 1e-10))
        ok = ok and inside
        margins.append(f"{name} [{rep.min / rep.lower_bound:.2f}, "
                       f"{rep.max / rep.upper_bound:.2f}]")
    a = gen_kahan(128)
    sigma = jacobi_svd(a, want_vectors=False).sigma
    rep = rvalue_ratios(a, sigma)
    inside = (rep.min >= rep.lower_bound * (1 - 1e-10)
              and rep.max <= rep.upper_bound * (1 + 1e-10))
    ok = ok and inside
    margins.append(f"kahan [{rep.min / rep.lower_bound:.2f}, {rep.max / rep.upper_bound:.2f}]")
    report(10, "R-values stay inside the triangular enclosure", ok,
           "ratio/bound spans " + "; ".join(margins))


def test_criterion_11_gap_detection():
    rng = np.random.default_rng(778899)
    hits = 0
    seeds = 100
    for _ in range(seeds):
        g = gen_gap(128, 64, 1e-10, rng.spawn(1)[0])
        lv = qlp(g.a, first="rurv-ros", rng=rng.spawn(1)[0]).l_values
        hits += lv[63] / lv[64] >= 1e6
    ok = hits >= 95
    report(11, "two-pass L-values expose the spectral cliff", ok,
           f"detected in {hits}/{seeds} seeds")


def test_criterion_12_minimum_norm_matches_pseudoinverse():
    rng = np.random.default_rng(13579)
    worst = 0.0
    for _ in range(50):
        m = int(rng.integers(2, 61))
        n = int(rng.integers(m + 1, m + 80))
        kappa = 10.0 ** rng.uniform(0.0, 6.0)
        a = gen_condition(m, n, kappa, rng.spawn(1)[0]).a
        b = rng.standard_normal(m)
        x = solve_min_norm(a, b, rng=rng.spawn(1)[0]).x
        x_ref = np.linalg.pinv(a) @ b
        worst = max(worst, np.linalg.norm(x - x_ref) / np.linalg.norm(x_ref))
    ok = worst <= 1e-8
    report(12, "minimum-norm solution matches the pseudoinverse", ok,
           f"worst relative deviation {worst:.2e} vs 1e-8")


def test_criterion_13_least_squares_optimality():
    rng = np.random.default_rng(24680)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(5, 100))
        m = n + int(rng.integers(1, 200))
        kappa = 10.0 ** rng.uniform(0.0, 6.0)
        a = gen_condition(m, n, kappa, rng.spawn(1)[0]).a  # two-norm is 1
        b = rng.standard_normal(m)
        for method in ("qr-overdet", "rurv-ros-overdet"):
            sol = solve_overdetermined(a, b, method=method, rng=rng.spawn(1)[0])
            grad = np.linalg.norm(a.T @ (a @ sol.x - b))
            scale = np.linalg.norm(sol.x) + np.linalg.norm(b)
            worst = max(worst, grad / (1e-10 * scale))
    ok = worst <= 1.0
    report(13, "normal equations hold at the solution", ok,
           f"worst gradient {worst:.3f} of the 1e-10 budget")


def test_criterion_14_implicit_equals_dense():
    rng = np.random.default_rng(11111)
    worst = 0.0
    for n in range(1, 9):
        for num_mixes in (1, 2, 3):
            op = ros_sample(n, num_mixes, rng.spawn(1)[0])
            op.presort = rng.permutation(n)
            v = ros_dense(op)
            a = rng.standard_normal((n, n))
            for mode, dense in (("right-transpose", a @ v.T), ("right", a @ v),
                                ("left", v @ a), ("left-transpose", v.T @ a)):
                err = np.max(np.abs(ros_apply(op, a, mode) - dense))
                worst = max(worst, err)
    ok = worst <= 1e-13
    report(14, "implicit mixing equals dense multiplication", ok,
           f"worst entrywise gap {worst:.2e} vs 1e-13")


def test_criterion_15_byte_identical_reruns(tmp_path):
    commands = [
        ["gen", "--family", "gap", "--m", "24", "--k", "12", "--seed", "5"],
        ["exp", "rr-scaling", "--family", "kahan", "--sizes", "20,30",
         "--reps", "2", "--seed", "6"],
        ["exp", "ls-bench", "--sizes", "20", "--reps", "1", "--seed", "7"],
    ]
    identical = True
    for i, argv in enumerate(commands):
        out1, out2 = tmp_path / f"a{i}", tmp_path / f"b{i}"
        assert cli_main(argv + ["--no-timestamp", "--out", str(out1)]) == 0
        assert cli_main(argv + ["--no-timestamp", "--out", str(out2)]) == 0
        identical = identical and out1.read_bytes() == out2.read_bytes()
    report(15, "identical flags give identical bytes", identical,
           f"{len(commands)} commands re-run")
