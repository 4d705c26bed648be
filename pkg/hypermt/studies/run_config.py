from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from ..config import OUTPUT_CONFIG, SWEEP_CONFIG
from ..precision import Precision

COMMANDS = (
    "verify-lemma",
    "verify-comparison",
    "psi-k",
    "moser",
    "lower-bound",
    "profile-report",
)


@dataclass
class RunConfig:
    command: str
    n: int = 2
    lam: float = 0.0
    alpha_factor: float = 1.0
    p: Optional[float] = None
    t_min: float = SWEEP_CONFIG["lemma_grid"]["t_min"]
    t_max: float = SWEEP_CONFIG["lemma_grid"]["t_max"]
    points: int = SWEEP_CONFIG["lemma_grid"]["points"]
    spacing: str = SWEEP_CONFIG["lemma_grid"]["spacing"]
    k_values: List[float] = field(default_factory=list)
    seed: int = SWEEP_CONFIG["seed"]
    count: int = SWEEP_CONFIG["comparison_count"]
    precision: Precision = Precision.DOUBLE
    workers: int = 1
    fmt: str = OUTPUT_CONFIG["format"]
    output: Optional[str] = None
    profile: Optional[str] = None
    derivative_chain: bool = False

    def as_dict(self) -> Dict[str, Any]:
        record = asdict(self)
        record["precision"] = Precision.parse(self.precision).value
        # run-local settings that must not change the report bytes
        for key in ("workers", "output"):
            record.pop(key)
        return record
