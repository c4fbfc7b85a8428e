"""Classification of purely infinite simple Leavitt path algebras of small graphs.

Graphs are compared through their pointed K0 data and connected by explicit
sequences of shift and out-split moves, each of which preserves the algebra.
"""

from .errors import (
    GraphFormatError,
    LpaError,
    MoveError,
    PreconditionError,
    SizeCapExceeded,
    TorsionCapExceeded,
)
from .explorer import (
    ClassificationTable,
    SearchBounds,
    canonical_form,
    classify,
    enumerate_pis_sing,
    find_path,
    graph_iso,
    search_path,
)
from .intlat import AbelianGroup, SmithForm, cokernel, smith_normal_form
from .invariants import PointedK0, k0_data, pointed_iso
from .moves import (
    MoveCertificate,
    MoveStep,
    PartitionSpec,
    apply_amalgamate,
    apply_outsplit,
    apply_shift,
    apply_unshift,
    maximal_outsplit,
    verify_certificate,
)
from .multigraph import MultiGraph, PropertyReport, analyze, builtin, from_incidence, parse_graph
from .pipeline import (
    cert_divides,
    cert_expand,
    cert_fish,
    cert_open_tails,
    cert_remove_sources,
    cert_stabilize,
    euclid_S,
    phi,
)

__version__ = "0.1.0"

__all__ = [
    "GraphFormatError",
    "LpaError",
    "MoveError",
    "PreconditionError",
    "SizeCapExceeded",
    "TorsionCapExceeded",
    "ClassificationTable",
    "SearchBounds",
    "canonical_form",
    "classify",
    "enumerate_pis_sing",
    "find_path",
    "graph_iso",
    "search_path",
    "AbelianGroup",
    "SmithForm",
    "cokernel",
    "smith_normal_form",
    "PointedK0",
    "k0_data",
    "pointed_iso",
    "MoveCertificate",
    "MoveStep",
    "PartitionSpec",
    "apply_amalgamate",
    "apply_outsplit",
    "apply_shift",
    "apply_unshift",
    "maximal_outsplit",
    "verify_certificate",
    "MultiGraph",
    "PropertyReport",
    "analyze",
    "builtin",
    "from_incidence",
    "parse_graph",
    "cert_divides",
    "cert_expand",
    "cert_fish",
    "cert_open_tails",
    "cert_remove_sources",
    "cert_stabilize",
    "euclid_S",
    "phi",
]
