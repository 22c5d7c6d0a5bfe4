import pytest

from torsion_forge.core import sweeps
from torsion_forge.core.errors import DegenerateElementError, InputError
from torsion_forge.core.sweeps import run_suite, sample_seeds, suite_checks


def test_suites_partition_the_checks():
    identities, torsion = suite_checks("identities"), suite_checks("torsion")
    assert set(identities).isdisjoint(torsion)
    assert set(suite_checks("all")) == set(identities) | set(torsion)
    assert len(identities) == 18 and len(torsion) == 15


def test_unknown_suite():
    with pytest.raises(InputError):
        suite_checks("everything")


def test_sample_seeds_are_reproducible():
    assert sample_seeds(7, 5) == sample_seeds(7, 5)
    assert sample_seeds(7, 5) != sample_seeds(8, 5)


@pytest.mark.parametrize("suite", ["identities", "torsion"])
def test_small_sweep_passes(suite):
    report = run_suite(suite, samples=2, seed=11, tol=1e-8, workers=2)
    assert report.passed, {key: check.errors for key, check in report.checks.items() if not check.passed}
    assert report.failing_seeds == []
    assert set(report.suite_max_residuals()) == {suite}


def test_sweeps_are_deterministic_across_worker_counts():
    first = run_suite("identities", samples=3, seed=5, workers=1)
    second = run_suite("identities", samples=3, seed=5, workers=3)
    assert {k: c.max_residual for k, c in first.checks.items()} == {k: c.max_residual for k, c in second.checks.items()}
    assert {k: c.worst_seed for k, c in first.checks.items()} == {k: c.worst_seed for k, c in second.checks.items()}


def test_zero_samples_pass_vacuously():
    report = run_suite("all", samples=0)
    assert report.passed
    assert report.warnings


def test_sweep_arguments_are_checked():
    with pytest.raises(InputError):
        run_suite("identities", samples=-1)
    with pytest.raises(InputError):
        run_suite("identities", samples=1, workers=0)


def test_failures_name_their_seeds(monkeypatch):
    monkeypatch.setattr(sweeps, "IDENTITY_CHECKS", {"always_off": lambda rng: 1.0})
    report = run_suite("identities", samples=3, seed=3, workers=1)
    summary = report.checks["always_off"]
    assert not report.passed
    assert summary.failing_seeds == sample_seeds(3, 3)
    assert summary.max_residual == 1.0


def test_errors_count_as_failures(monkeypatch):
    def degenerate(rng):
        raise DegenerateElementError("sin alpha = 0")
    monkeypatch.setattr(sweeps, "IDENTITY_CHECKS", {"degenerate": degenerate})
    report = run_suite("identities", samples=2, seed=3, workers=1)
    summary = report.checks["degenerate"]
    assert summary.max_residual == float("inf")
    assert len(summary.errors) == 2
    assert "DegenerateElementError" in summary.errors[0]


def test_tolerance_scales_per_check():
    report = run_suite("torsion", samples=0, tol=1e-9)
    assert report.checks["assembly_fsl_d1"].threshold == pytest.approx(1e-7)
    assert report.checks["pants_cone"].threshold == pytest.approx(1e-9)
