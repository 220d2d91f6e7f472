"""

Exact mutation of quivers with real weights.

"""
__version__ = "0.1.0"

from .cyclo import AngleLabel as AngleLabel
from .cyclo import CycloReal as CycloReal
from .cyclo import from_label as from_label
from .cyclo import to_label as to_label
from .cyclo import weight as weight
from .documents import load_quiver as load_quiver
from .documents import save_quiver as save_quiver
from .dot import export_dot as export_dot
from .errors import QmutError as QmutError
from .explorer import ClassReport as ClassReport
from .explorer import ExploreBudget as ExploreBudget
from .explorer import Verdict as Verdict
from .explorer import classify_rank3 as classify_rank3
from .explorer import explore as explore
from .quiver import Quiver as Quiver
from .quiver import canonical_form as canonical_form
from .quiver import mutate as mutate
from .quiver import mutate_sequence as mutate_sequence
from .realization import Realization as Realization
from .realization import verify_class_realization as verify_class_realization
from .series import Family as Family
from .series import StandardForm as StandardForm
from .series import param_mutation as param_mutation
