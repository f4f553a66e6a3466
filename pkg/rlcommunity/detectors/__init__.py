from .leading_eigenvector import LeadingEigenvector
from .walktrap import Walktrap
from .label_propagation import LabelPropagation
from .multilevel import Multilevel

from .leading_eigenvector import detect_leading_eigenvector
from .walktrap import detect_walktrap
from .label_propagation import detect_label_propagation
from .multilevel import detect_multilevel
