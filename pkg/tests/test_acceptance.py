"""Acceptance gate: eleven pinned criteria, one test and one printed
PASS/FAIL line each.

Every tolerance and seed here is frozen; a change to any of them is a
behavioural change of the package, not a test tweak. Statistical
criteria use fixed seeds, so they are deterministic reruns of a
calibrated measurement, not live hypothesis tests.
"""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from proxdeg import (
    ConeSpec,
    ExperimentConfig,
    GraphKind,
    PearlSpec,
    PointSet,
    Rect,
    Region,
    StaircaseSpec,
    count_maxima,
    count_minima,
    gabriel,
    gabriel_naive,
    harmonic,
    make_staircase,
    make_tiara,
    rng_graph,
    run_trials,
    sample_uniform,
    stretch_factor,
    theoretical_k,
    trial_generator,
    undirected_view,
    yao,
)


def report(num, slug, ok):
    print(f"ACCEPTANCE {num:02d} {slug}: {'PASS' if ok else 'FAIL'}")
    return ok


def edge_set(g):
    return {(int(u), int(v)) for u, v in g.edges}


def test_criterion_01_fast_builder_equals_reference():
    sizes = (10, 50, 200)
    bad = []
    for i in range(100):
        rng = np.random.default_rng(1000 + i)
        pts = PointSet(rng.random((sizes[i % 3], 2)))
        if gabriel(pts) != gabriel_naive(pts):
            bad.append(i)
    ok = not bad
    assert report(1, "disk-empty-oracle-equivalence", ok), f"mismatched sets: {bad}"


def test_criterion_02_lune_graph_inside_disk_graph():
    violations = 0
    for i in range(200):
        rng = np.random.default_rng(2000 + i)
        pts = PointSet(rng.random((128, 2)))
        extra = edge_set(rng_graph(pts)) - edge_set(gabriel(pts))
        violations += len(extra)
    ok = violations == 0
    assert report(2, "lune-subset-of-disk", ok), f"{violations} extra edges"


def test_criterion_03_maxima_mean_matches_harmonic_number():
    m, trials = 1000, 2000
    rng = np.random.default_rng(3000)
    vals = [count_maxima(PointSet(rng.random((m, 2)))) for _ in range(trials)]
    mean = float(np.mean(vals))
    h = harmonic(m)
    ok = abs(mean - h) <= 0.2 and math.log(m) <= mean <= math.log(m) + 1.0
    assert report(3, "maxima-harmonic-mean", ok), f"mean={mean:.4f}, H_m={h:.4f}"


def test_criterion_04_l_shape_minima_bound():
    m, trials = 1000, 500
    region = Region.rect_union([Rect(0.0, 0.0, 1.0, 0.5), Rect(0.0, 0.5, 0.5, 1.0)])
    vals = [
        count_minima(sample_uniform(region, m, trial_generator(4000, t)))
        for t in range(trials)
    ]
    mean = float(np.mean(vals))
    bound = 4.0 * (math.log(m) + 1.0)
    ok = mean <= bound
    assert report(4, "two-rectangle-minima-bound", ok), f"mean={mean:.4f} > {bound:.4f}"


def test_criterion_05_disk_empty_edge_density():
    out = run_trials(ExperimentConfig(
        graph_kind=GraphKind("gabriel"),
        support=Region.unit_square(),
        n=2000,
        trials=50,
        seed=501,
        measures=("edge_count",),
    ))
    density = out.stats["edge_count"].mean / 2000.0
    ok = 1.7 <= density <= 2.05
    assert report(5, "disk-empty-edge-density", ok), f"edges/n={density:.5f}"


def test_criterion_06_cone_graph_structural_bounds():
    bad = []
    for p in (2, 4, 7, 13):
        for offset in (0.0, 0.3):
            for i in range(3):
                rng = np.random.default_rng(600 + i)
                pts = PointSet(rng.random((300, 2)))
                d = yao(pts, ConeSpec(p, offset=offset))
                if d.out_degrees().max() > p or d.edge_count > p * pts.n:
                    bad.append((p, offset, i))
    ok = not bad
    assert report(6, "cone-graph-degree-and-size", ok), f"violations: {bad}"


def test_criterion_07_witness_constructions_force_degree():
    center = (0.0, 0.0)
    ring = make_tiara(PearlSpec(7, 1.0), center)
    tiara_pts = PointSet(np.vstack([[center], ring.coords]))
    gdeg = gabriel(tiara_pts).degrees()[0]

    stairs = make_staircase(StaircaseSpec(8, 1.0), center)
    stair_pts = PointSet(np.vstack([[center], stairs.coords]))
    ydeg = undirected_view(yao(stair_pts, ConeSpec(4))).degrees()[0]

    ok = gdeg >= 7 and ydeg >= 8
    assert report(7, "generated-witness-degrees", ok), f"gabriel={gdeg}, yao={ydeg}"


def test_criterion_08_edge_length_law():
    n = 10_000
    out = run_trials(ExperimentConfig(
        graph_kind=GraphKind("gabriel"),
        support=Region.unit_square(),
        n=n,
        trials=50,
        seed=801,
        measures=("max_edge_length",),
    ))
    cap = 3.0 * math.sqrt(math.log(n) / n)
    worst = out.stats["max_edge_length"].max
    ok = worst <= cap
    assert report(8, "longest-edge-law", ok), f"max={worst:.6f} > {cap:.6f}"


# ---------------------------------------------------------------------------
# criteria 9 and 11 share two CLI experiment runs


CLI_CASES = {
    "gabriel-unit-square": [
        "--graph", "gabriel", "--support", "unit-square", "--seed", "901",
    ],
    "yao4-rotated-square": [
        "--graph", "yao", "--p", "4", "--support", "rotated-square",
        "--seed", "902",
    ],
}

NS = (1000, 10_000, 100_000)


def run_cli_experiment(case, outdir, tag):
    out = outdir / f"{case}-{tag}.json"
    raw = outdir / f"{case}-{tag}.csv"
    argv = [
        sys.executable, "-m", "proxdeg.cli", "experiment",
        *CLI_CASES[case],
        "--n", ",".join(str(n) for n in NS),
        "--trials", "20",
        "--measure", "max_degree",
        "--workers", "1",
        "--out", str(out),
        "--raw-out", str(raw),
    ]
    res = subprocess.run(argv, capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    return out, raw


@pytest.fixture(scope="module")
def cli_runs(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("cli-experiments")
    return {
        case: run_cli_experiment(case, outdir, "first") for case in CLI_CASES
    }, outdir


def ratios_by_n(raw_path):
    per_n = {n: [] for n in NS}
    for line in open(raw_path):
        if line.startswith("#") or line.startswith("n,"):
            continue
        n_s, _, deg_s = line.strip().split(",")
        n = int(n_s)
        per_n[n].append(int(deg_s) / theoretical_k(n))
    assert all(len(v) == 20 for v in per_n.values())
    return per_n


def test_criterion_09_degree_concentration(cli_runs):
    runs, _ = cli_runs
    lo, hi, growth_cap = 1.0 / 12.0, 4.0, 1.25
    problems = []
    for case, (_, raw) in runs.items():
        per_n = ratios_by_n(raw)
        for n, rs in per_n.items():
            outside = [r for r in rs if not lo <= r <= hi]
            if outside:
                problems.append(f"{case} n={n} ratios outside band: {outside}")
        growth = np.mean(per_n[NS[-1]]) / np.mean(per_n[NS[0]])
        if growth > growth_cap:
            problems.append(f"{case} mean ratio growth {growth:.3f} > {growth_cap}")
    ok = not problems
    assert report(9, "slow-degree-growth", ok), "; ".join(problems)


def test_criterion_10_spanner_bound():
    p = 8
    bound = 1.0 / (1.0 - 2.0 * math.sin(math.pi / p))
    worst = 0.0
    for i in range(20):
        pts = sample_uniform(Region.unit_square(), 100, trial_generator(1001, i))
        worst = max(worst, stretch_factor(yao(pts, ConeSpec(p)), pts))
    ok = worst <= bound
    assert report(10, "cone-spanner-bound", ok), f"stretch={worst:.4f} > {bound:.4f}"


def test_criterion_11_repeat_runs_are_byte_identical(cli_runs):
    runs, outdir = cli_runs
    same = True
    for case, (_, raw_first) in runs.items():
        _, raw_again = run_cli_experiment(case, outdir, "again")
        same = same and open(raw_first, "rb").read() == open(raw_again, "rb").read()
    assert report(11, "byte-identical-reruns", same)
