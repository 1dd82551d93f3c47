"""Acceptance suite: one test per benchmark criterion, printed pass/fail.

Criterion 2 (the d = 30 transition sweep) takes a few minutes and is
opt-in: run it with `QNETID_EXTENDED=1 pytest tests/test_acceptance.py`
or `pytest -m extended`.

Criteria 1 and 3 intentionally run the idealized benchmark targets and
are expected to fail in part; see README "Known deviations from the
idealized benchmark" for the measured behavior and the analysis of why
the idealized plateau is not attainable (graphs with a vertex-fixing
automorphism are exactly non-identifiable from a single basis-state
trajectory, and they are common at 5 <= d <= 9).
"""

import os

import numpy as np
import pytest

from qnetid.dynamics import exact_gram, liouvillian, propagate, sample_trajectory, unitary_conjugate
from qnetid.identify import (
    build_P_trapezoid,
    build_Q,
    commutant_dimension,
    commutator,
    relative_error,
    solve_commutator,
)
from qnetid.linalg import spectral_norm
from qnetid.netmodel import basis_density
from qnetid.partialinfo import (
    UnobservableError,
    diagonal_selector,
    exact_derivative_stacks,
    extract_hamiltonian,
    identity_initial_batch,
    observability_rank,
    physical_decomposition,
    reconstruct_liouvillian,
)
from qnetid.svgplot import emit_plot
from qnetid.sweep import SweepConfig, run_error_sweep, run_solvability_sweep, run_sweep

from conftest import random_admissible, random_density, random_hermitian

MASTER_SEED = 0


def report(criterion: str, passed: bool, detail: str) -> bool:
    print(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
    return passed


class TestCriterion1RoundTripSolvability:
    """100 seeded networks per d in 2..12, p=0.5, tau=3, dt=0.01, full
    sampling, basis initial state: mean solvability 1.0 for 4 <= d <= 12
    and >= 0.9 for d in {2, 3}.  Runs in well under 3 minutes."""

    def test_solvability_plateau(self):
        cfg = SweepConfig(
            seed=MASTER_SEED, d_min=2, d_max=12, p_link=0.5, taus=(3.0,),
            dt=0.01, subsamples=(1,), trials=100,
        )
        res = run_solvability_sweep(cfg)
        sbar = {rec.d: rec.solvability_mean for rec in res.records}
        detail = " ".join(f"d={d}:{v:.2f}" for d, v in sorted(sbar.items()))
        ok_small = all(sbar[d] >= 0.9 for d in (2, 3))
        ok_band = all(sbar[d] == 1.0 for d in range(4, 13))
        report("criterion 1 (solvability round trip)", ok_small and ok_band, detail)
        assert ok_small, f"mean solvability below 0.9 at d in 2..3: {detail}"
        assert ok_band, f"mean solvability below 1.0 inside 4..12: {detail}"


@pytest.mark.extended
@pytest.mark.skipif(
    not os.environ.get("QNETID_EXTENDED"),
    reason="transition sweep to d=30 takes minutes; set QNETID_EXTENDED=1",
)
class TestCriterion2CriticalSize:
    """tau=3, p=0.5, d swept to 30 (quadrature on n_s/5 samples): the mean
    solvability transitions from 1 to 0 at a critical size of 28 +- 4."""

    def test_transition_location(self):
        cfg = SweepConfig(
            seed=MASTER_SEED, d_min=2, d_max=30, p_link=0.5, taus=(3.0,),
            dt=0.01, subsamples=(5,), trials=100,
        )
        res = run_solvability_sweep(cfg)
        curve = {rec.d: rec.solvability_mean for rec in res.records}
        marks = res.critical_sizes()["tau=3,n_tilde=60"]
        d_c = marks["last_full_d"]
        first_zero = marks["first_zero_d"]
        detail = (f"last d at 1.0 -> {d_c}, first d at 0.0 -> {first_zero}; "
                  + " ".join(f"{d}:{v:.2f}" for d, v in sorted(curve.items()) if d >= 20))
        ok = d_c is not None and 24 <= d_c <= 32 and first_zero is not None
        report("criterion 2 (critical size)", ok, detail)
        assert d_c is not None and 24 <= d_c <= 32, detail
        assert first_zero is not None and first_zero > d_c, detail


class TestCriterion3ErrorBenchmark:
    """Median relative error over solvable trials: <= 0.05 for d <= 8 at
    every (tau, n~) in {1,2} x {n_s/20, n_s/10, n_s/5, n_s}, and for
    tau=2 at full sampling up to d = 12."""

    def test_error_medians(self):
        failures = []
        lines = []
        for tau, d_hi in ((1.0, 8), (2.0, 12)):
            cfg = SweepConfig(
                seed=MASTER_SEED, d_min=2, d_max=d_hi, p_link=0.5, taus=(tau,),
                dt=0.01, subsamples=(20, 10, 5, 1), trials=100,
            )
            res = run_error_sweep(cfg)
            n_s = cfg.n_samples(tau)
            for rec in res.records:
                sub = n_s // rec.n_tilde
                in_band = rec.d <= 8 or (tau == 2.0 and sub == 1 and rec.d <= 12)
                if not in_band:
                    continue
                med = rec.eps_median
                lines.append(f"tau={tau:g} n~=ns/{sub} d={rec.d}: {med:.4f}")
                if med is None or med > 0.05:
                    failures.append(lines[-1])
        ok = not failures
        report("criterion 3 (error benchmark)", ok,
               f"{len(lines)} cells checked; over 0.05: {failures or 'none'}")
        assert ok, "median relative error above 0.05 in: " + "; ".join(failures)


class TestCriterion4IntegrationIdentity:
    """For exact P and endpoints, the ground truth satisfies the
    commutator equation to 1e-9 relative on 1000 random instances."""

    def test_identity_residual(self):
        rng = np.random.default_rng(MASTER_SEED + 4)
        worst = 0.0
        for _ in range(1000):
            d = int(rng.integers(2, 7))
            h = random_hermitian(rng, d)
            rho0 = random_density(rng, d)
            tau = float(rng.uniform(0.5, 3.0))
            p = exact_gram(h, rho0, tau)
            q = build_Q(rho0, propagate(h, rho0, tau))
            worst = max(worst, spectral_norm(commutator(h, p) - q) / spectral_norm(q))
        ok = worst <= 1e-9
        report("criterion 4 (integration identity)", ok, f"worst relative residual {worst:.2e}")
        assert ok


class TestCriterion5UniquenessEquivalence:
    """Rank-deficiency verdict of the solver and the nullity of the
    admissible commutant never disagree on 500 instances including
    engineered degenerate ones; maximally mixed data is always
    non-unique."""

    def test_equivalence(self):
        rng = np.random.default_rng(MASTER_SEED + 5)
        cases = []
        for d in (2, 3, 4, 5, 6):
            cases.append(np.eye(d, dtype=complex))                      # commutes with all
            cases.append(np.eye(d, dtype=complex) / d)                  # maximally mixed
            proj = np.zeros((d, d), dtype=complex)
            proj[0, 0] = float(d)
            cases.append(proj)                                          # stationary basis state
            rep = np.ones(d)
            rep[: d // 2 + 1] = 2.0
            cases.append(np.diag(rep).astype(complex))                  # repeated diagonal
        while len(cases) < 500:
            d = int(rng.integers(2, 7))
            cases.append(random_density(rng, d) + 0.1 * np.eye(d))
        disagreements = 0
        mixed_ok = True
        for p in cases:
            d = p.shape[0]
            q = commutator(random_admissible(rng, d), p)
            rep = solve_commutator(p, q)
            dim = commutant_dimension(p)
            if (rep.outcome == "non_unique") != (dim > 0):
                disagreements += 1
            if np.allclose(p, np.eye(d) / d) and rep.outcome != "non_unique":
                mixed_ok = False
        ok = disagreements == 0 and mixed_ok
        report("criterion 5 (uniqueness equivalence)", ok,
               f"{len(cases)} instances, {disagreements} disagreements")
        assert ok

    def test_zero_commutant_means_unique_solution(self):
        rng = np.random.default_rng(MASTER_SEED + 55)
        p = random_density(rng, 4) + 0.2 * np.eye(4)
        m_true = random_admissible(rng, 4)
        rep = solve_commutator(p, commutator(m_true, p))
        assert rep.outcome == "unique"
        assert relative_error(rep.m_hat, m_true) <= 1e-8


class TestCriterion6TrapezoidConvergence:
    """Halving the sampling period divides the quadrature error by about
    four (ratio within [3.5, 4.5]) on 50 random instances, d <= 5."""

    def test_second_order(self):
        rng = np.random.default_rng(MASTER_SEED + 6)
        ratios = []
        for _ in range(50):
            d = int(rng.integers(2, 6))
            h = random_hermitian(rng, d, norm=1.5)
            rho0 = random_density(rng, d)
            p_exact = exact_gram(h, rho0, 1.0)
            e_h = spectral_norm(
                build_P_trapezoid(sample_trajectory(h, rho0, 1.0, 0.05)) - p_exact
            )
            e_h2 = spectral_norm(
                build_P_trapezoid(sample_trajectory(h, rho0, 1.0, 0.025)) - p_exact
            )
            ratios.append(e_h / e_h2)
        lo, hi = min(ratios), max(ratios)
        ok = 3.5 <= lo and hi <= 4.5
        report("criterion 6 (trapezoid convergence)", ok, f"ratios in [{lo:.3f}, {hi:.3f}]")
        assert ok


class TestCriterion7PartialInformationRoundTrip:
    """Exact derivative stacks for 100 random Hamiltonians with nonzero
    diagonal (d in {2, 3}): observable pairs reconstruct the generator
    and the traceless Hamiltonian to 1e-8, unobservable ones report
    failure; every zero-diagonal Hamiltonian is structurally
    unobservable."""

    def test_round_trip(self):
        rng = np.random.default_rng(MASTER_SEED + 7)
        worst_l = worst_h = 0.0
        observable = unobservable = 0
        for i in range(100):
            d = 2 if i % 2 == 0 else 3
            while True:
                h = random_hermitian(rng, d, norm=1.0)
                if np.max(np.abs(np.diag(h).real)) >= 0.1:
                    break
            lv = liouvillian(h)
            _, obs = observability_rank(diagonal_selector(d), lv)
            stacks = exact_derivative_stacks(lv, identity_initial_batch(d), d * d)
            if obs:
                observable += 1
                l_hat = reconstruct_liouvillian(stacks, identity_initial_batch(d))
                worst_l = max(worst_l, spectral_norm(l_hat - lv))
                h_traceless = h - np.trace(h) / d * np.eye(d)
                worst_h = max(
                    worst_h, spectral_norm(extract_hamiltonian(l_hat) - h_traceless)
                )
            else:
                unobservable += 1
                with pytest.raises(UnobservableError):
                    reconstruct_liouvillian(stacks, identity_initial_batch(d))
        ok = worst_l <= 1e-8 and worst_h <= 1e-8
        report(
            "criterion 7 (partial-information round trip)", ok,
            f"{observable} observable (worst generator error {worst_l:.2e}, "
            f"worst Hamiltonian error {worst_h:.2e}), {unobservable} unobservable",
        )
        assert ok

    def test_structural_unobservability(self):
        rng = np.random.default_rng(MASTER_SEED + 77)
        violations = 0
        for i in range(100):
            d = 2 if i % 2 == 0 else 3
            h = random_admissible(rng, d)
            rank, _ = observability_rank(diagonal_selector(d), liouvillian(h))
            if rank > d * d - 1:
                violations += 1
        ok = violations == 0
        report("criterion 7b (zero-diagonal unobservability)", ok,
               f"{violations} of 100 zero-diagonal instances reached full rank")
        assert ok


class TestCriterion8DecompositionIdentity:
    """The preparable-state decomposition reproduces |k><j| to 1e-14 for
    every pair up to d = 5, and recombining the propagated terms matches
    direct propagation to 1e-10."""

    def test_identity_and_linearity(self):
        rng = np.random.default_rng(MASTER_SEED + 8)
        worst_id = worst_prop = 0.0
        pairs = 0
        for d in range(2, 6):
            h = random_hermitian(rng, d)
            t = float(rng.uniform(0.3, 1.5))
            for k in range(1, d + 1):
                for j in range(k + 1, d + 1):
                    pairs += 1
                    target = np.zeros((d, d), dtype=complex)
                    target[k - 1, j - 1] = 1.0
                    terms = physical_decomposition(d, k, j)
                    acc = sum(c * rho for rho, c in terms)
                    worst_id = max(worst_id, float(np.max(np.abs(acc - target))))
                    direct = unitary_conjugate(h, target, t)
                    recombined = sum(c * propagate(h, rho, t) for rho, c in terms)
                    worst_prop = max(worst_prop, float(np.max(np.abs(direct - recombined))))
        ok = worst_id <= 1e-14 and worst_prop <= 1e-10
        report("criterion 8 (decomposition identity)", ok,
               f"{pairs} pairs, identity error {worst_id:.1e}, propagation error {worst_prop:.1e}")
        assert ok


class TestCriterion9Determinism:
    """Re-running a sweep with the same seed produces byte-identical CSV
    and SVG outputs."""

    def test_byte_identical_outputs(self, tmp_path):
        cfg = SweepConfig(
            seed=MASTER_SEED, d_min=2, d_max=4, taus=(1.0,), dt=0.01,
            subsamples=(5, 1), trials=10,
        )
        csv_a, csv_b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_solvability_sweep(cfg, out_csv=csv_a)
        run_solvability_sweep(cfg, out_csv=csv_b)
        svg_a = emit_plot(csv_a, "solvability", tmp_path / "a.svg")
        svg_b = emit_plot(csv_b, "solvability", tmp_path / "b.svg")
        csv_same = csv_a.read_bytes() == csv_b.read_bytes()
        svg_same = svg_a.read_bytes() == svg_b.read_bytes()

        err_a, err_b = tmp_path / "ea.csv", tmp_path / "eb.csv"
        run_error_sweep(cfg, out_csv=err_a)
        run_error_sweep(cfg, out_csv=err_b)
        err_same = err_a.read_bytes() == err_b.read_bytes()

        ok = csv_same and svg_same and err_same
        report("criterion 9 (determinism)", ok,
               f"csv identical: {csv_same}, svg identical: {svg_same}, "
               f"error csv identical: {err_same}")
        assert ok
