"""Batch runs over generated problems: one task per generator config, one seed each.

``compare`` and ``bench`` hand every seeded :class:`GeneratorConfig` to a worker that
generates, solves and times one instance. With ``jobs == 1`` the tasks run inline so
that traces and tracebacks come from the calling thread.
"""
import contextlib
from concurrent.futures import Executor, Future, ThreadPoolExecutor, wait
from threading import Lock
from typing import Any, Callable, Iterator, List, Sequence, TypeVar

from wasabi import msg

from .config import GeneratorConfig

T = TypeVar("T")


class SerialExecutor(Executor):
    """Solves each submitted instance task at once, in the submitting thread."""

    def __init__(self) -> None:
        self._closed = False
        self._closed_lock = Lock()

    def submit(self, fn: Callable[..., T], *args: Any, **kwargs: Any) -> "Future[T]":
        with self._closed_lock:
            if self._closed:
                raise RuntimeError("cannot solve more instances after shutdown")
        done: "Future[T]" = Future()
        try:
            done.set_result(fn(*args, **kwargs))
        except BaseException as e:
            done.set_exception(e)
        return done

    def shutdown(self, wait: bool = True, **kwargs: Any) -> None:
        with self._closed_lock:
            self._closed = True


@contextlib.contextmanager
def make_executor(jobs: int) -> Iterator[Executor]:
    """Thread pool of ``jobs`` instance workers, or the inline executor for one job."""
    if jobs < 1:
        raise ValueError(f"jobs must be at least 1, got {jobs}")
    if jobs == 1:
        with SerialExecutor() as ex:
            yield ex
    else:
        with ThreadPoolExecutor(max_workers=jobs, thread_name_prefix="ccsp-instance") as ex:
            yield ex


def map_problems(
    run: Callable[[GeneratorConfig], T], configs: Sequence[GeneratorConfig], jobs: int
) -> List[T]:
    """Run one task per seeded config; rows come back in seed order.

    The first failing task is reported with its seed and its exception re-raised.
    """
    with make_executor(jobs) as ex:
        futures = [ex.submit(run, cfg) for cfg in configs]
        wait(futures)
    for cfg, future in zip(configs, futures):
        error = future.exception()
        if error is not None:
            msg.fail(f"instance with seed {cfg.seed} failed", str(error))
            raise error
    return [future.result() for future in futures]
