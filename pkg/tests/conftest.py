"""Shared fixtures: deterministic hypothesis profile and the two
full-size simulation studies reused across test modules."""

import time

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bpreg import simulate

settings.register_profile(
    "ci",
    derandomize=True,
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

# Design seed for the reference study.  Fixed once; the acceptance bands
# were verified against this draw and the suite asserts them verbatim.
STUDY_SEED = 1004
STUDY_M = 10000


class StudyRun:
    """A completed simulation study plus its wall-clock duration."""

    def __init__(self, cfg, samples, seconds):
        self.cfg = cfg
        self.samples = samples
        self.seconds = seconds
        self.report = simulate.summarize(samples)

    def bias(self, estimator):
        est = self.samples.estimates[estimator]
        return est.mean(axis=0) - self.cfg.true_theta

    def var(self, estimator):
        return self.samples.estimates[estimator].var(axis=0)


def _run_study(n):
    cfg = simulate.McConfig(n=n, p=1, q=1, m=STUDY_M, seed=STUDY_SEED)
    t0 = time.perf_counter()
    samples = simulate.simulate_replicates(cfg)
    return StudyRun(cfg, samples, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def study30():
    return _run_study(30)


@pytest.fixture(scope="session")
def study60():
    return _run_study(60)
