import math
import operator

import pytest
from wulink.parallel import Job, run_ordered


def test_job() -> None:
    job = Job(operator.pow, 2, 10)
    assert job() == 1024
    assert Job(int, "ff", base=16)() == 255


def test_run_ordered_in_process() -> None:
    jobs = [Job(math.comb, 6, k) for k in range(7)]
    assert run_ordered(jobs) == [1, 6, 15, 20, 15, 6, 1]
    assert run_ordered(jobs, workers=1) == [1, 6, 15, 20, 15, 6, 1]
    assert run_ordered([]) == []


@pytest.mark.parametrize("workers", [2, 8])
def test_run_ordered_in_workers(workers: int) -> None:
    jobs = [Job(math.gcd, 360, k) for k in range(1, 13)]
    assert run_ordered(jobs, workers=workers) == [math.gcd(360, k) for k in range(1, 13)]
