import asyncio
import os
import sys
import traceback
from contextlib import asynccontextmanager
from dataclasses import dataclass
from functools import wraps
from typing import Any, Callable, Hashable

ISATTY = sys.stderr.isatty()


@asynccontextmanager
async def pretty_go(message):
    cols, _ = os.get_terminal_size(sys.stderr.fileno()) if ISATTY else (80, 0)
    print(f"> {message:{cols - 10}}", flush=True, end="", file=sys.stderr)
    try:
        yield
        print("[ok]", file=sys.stderr)
    except Exception as e:
        print("[failed]", e, file=sys.stderr)
        raise


@dataclass(frozen=True)
class Failure:
    """Stands in for the result of a job that raised"""

    key: Hashable
    error: Exception

    @property
    def status(self) -> str:
        return f"failed:{type(self.error).__name__}"


def error_resilient(fn):
    @wraps(fn)
    async def wrapper(self, key, *args, **kwargs):
        try:
            return await fn(self, key, *args, **kwargs)
        except Exception as err:
            self.err_count += 1
            print(flush=True, file=sys.stderr)
            print("ERROR", self.err_count, "::", repr(err), file=sys.stderr)
            print(traceback.format_exc(), file=sys.stderr)
            return Failure(key, err)

    return wrapper


class ReplicateRunner:
    """Runs one blocking job per key on worker threads, at most `threads` at once.

    Results come back in key order whatever the scheduling, so a fold over
    them is deterministic.
    """

    def __init__(self, threads: int):
        self.threads = threads
        self.err_count = int()

    @error_resilient
    async def _run_one(self, key, job, semaphore):
        async with semaphore:
            result = await asyncio.to_thread(job, key)
        print(".", end="", flush=True, file=sys.stderr)
        return result

    async def map(self, job: Callable[[Any], Any], keys) -> list:
        semaphore = asyncio.Semaphore(self.threads)
        results = await asyncio.gather(*(self._run_one(key, job, semaphore) for key in keys))
        print(file=sys.stderr)
        return results


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
