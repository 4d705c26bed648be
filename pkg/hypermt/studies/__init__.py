from .base_study import BaseStudy
from .comparison_study import ComparisonStudy
from .lemma_study import LemmaStudy
from .lower_bound_study import LowerBoundStudy
from .moser_study import MoserStudy
from .profile_report_study import ProfileReportStudy
from .psi_k_study import PsiKStudy
from .run_config import COMMANDS, RunConfig

STUDIES = {
    "verify-lemma": LemmaStudy,
    "verify-comparison": ComparisonStudy,
    "psi-k": PsiKStudy,
    "moser": MoserStudy,
    "lower-bound": LowerBoundStudy,
    "profile-report": ProfileReportStudy,
}

__all__ = [
    "BaseStudy",
    "COMMANDS",
    "ComparisonStudy",
    "LemmaStudy",
    "LowerBoundStudy",
    "MoserStudy",
    "ProfileReportStudy",
    "PsiKStudy",
    "RunConfig",
    "STUDIES",
]
