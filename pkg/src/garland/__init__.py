"""Local spectral checks for cohomology vanishing on buildings of compact
hyperbolic simplex type, with the finite-field geometries and simplicial
machinery they need."""
from .coxeter import CoxeterDiagram, classify, enumerate_hyperbolic, identify_spherical_type
from .complexes import WeightedComplex, build, join
from .criterion import check_building, minimal_q, threshold, vanishing_demo
from .finfield import GF, field_of_order
from .geometry import construct_gon, flag_complex, gon_kappa_closed_form
from .spectra import LaplacianPair, kappa_of

__version__ = "0.1.0"

__all__ = [
    "CoxeterDiagram", "GF", "LaplacianPair", "WeightedComplex", "build", "check_building",
    "classify", "construct_gon", "enumerate_hyperbolic", "field_of_order", "flag_complex",
    "gon_kappa_closed_form", "identify_spherical_type", "join", "kappa_of", "minimal_q",
    "threshold", "vanishing_demo",
]
