import logging
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Iterable, List

from .. import __version__
from ..config import NUMERICS_CONFIG, SWEEP_CONFIG
from ..errors import HyperMTError
from ..geometry import make_context
from ..reporting import RunReport
from .run_config import RunConfig


class BaseStudy(ABC):
    """One CLI command: computes per-item records and a summary over them"""

    columns: List[str] = []

    def __init__(self, config: RunConfig):
        self.config = config
        self.ctx = make_context(config.n)
        self.logger = logging.getLogger(self.__class__.__name__)

    @abstractmethod
    def run(self) -> List[Dict[str, Any]]:
        """Compute the per-item records"""
        pass

    @abstractmethod
    def summarize(self, items: List[Dict[str, Any]]) -> Dict[str, Any]:
        """Aggregate the records; must carry a boolean 'pass'"""
        pass

    def map_items(self, fn: Callable[[Any], Dict[str, Any]], params: Iterable[Any]) -> List[Dict[str, Any]]:
        """Apply fn to every parameter; results come back in parameter order"""
        params = list(params)

        def guarded(param):
            try:
                return fn(param)
            except HyperMTError as e:
                self.logger.error(f"Item {param!r} failed: {e}")
                raise

        if self.config.workers > 1 and len(params) > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as executor:
                return list(executor.map(guarded, params))
        return [guarded(param) for param in params]

    def execute(self) -> RunReport:
        self.logger.info(f"Starting {self.config.command} for n={self.config.n}")
        started = time.perf_counter()
        items = self.run()
        finished = time.perf_counter()
        summary = self.summarize(items)
        passed = bool(summary.get("pass", True))
        self.logger.info(
            f"Finished {self.config.command}: {len(items)} items, "
            f"{'pass' if passed else 'FAIL'} in {finished - started:.2f}s"
        )
        config = self.config.as_dict()
        config["defaults"] = {"numerics": dict(NUMERICS_CONFIG), "sweep": dict(SWEEP_CONFIG)}
        config["defaults"]["sweep"].pop("max_workers", None)
        return RunReport(
            command=self.config.command,
            config=config,
            version=__version__,
            items=items,
            summary=summary,
            passed=passed,
            columns=list(self.columns),
            timings={"run_seconds": finished - started},
        )
