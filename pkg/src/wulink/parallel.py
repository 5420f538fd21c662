from concurrent.futures import ProcessPoolExecutor
from multiprocessing import get_context
from typing import Any, Callable, Generic, ParamSpec, Sequence, TypeVar

from .logger import logger

P = ParamSpec("P")
R = TypeVar("R")


class Job(Generic[R]):
    def __init__(
        self,
        f: Callable[P, R],
        *args: P.args,
        **kwargs: P.kwargs,
    ) -> None:
        self.f = f
        self.args = args
        self.kwargs = kwargs

    def __call__(self) -> R:
        return self.f(*self.args, **self.kwargs)


def _run(job: Job[Any]) -> Any:
    return job()


def run_ordered(jobs: Sequence[Job[R]], workers: int = 0) -> list[R]:
    """
    Run independent jobs and return their results in submission order.

    With `workers` of 0 or 1 everything runs in this process; otherwise the jobs
    go to a spawn-context process pool, so `f` and its arguments must pickle.
    """
    if workers <= 1 or len(jobs) <= 1:
        return [job() for job in jobs]
    workers = min(workers, len(jobs))
    logger.info("Running {} jobs on {} worker processes".format(len(jobs), workers))
    with ProcessPoolExecutor(max_workers=workers, mp_context=get_context("spawn")) as executor:
        return list(executor.map(_run, jobs))
