"""First-passage percolation on Z^2: geodesics, limit shapes, geodesic order and Busemann functions."""

from .busemann import BusemannSample, RhoFit, busemann_along, delta_h, fit_rho, halfplane_monotone_check
from .config import ExperimentConfig, load_config, parse_config
from .errors import FPPError
from .experiments import EXPERIMENTS, ExperimentReport, run_experiment
from .geodesic import Geodesic, ShortestPaths, geodesic, geodesic_tree, out_set, passage_time
from .lattice import FULL, HALF, DualEdge, Point, SectorSpec, sector_arc
from .order import backward_cluster, coalescence_point, compare, extremal_proxy
from .shape import ShapeEstimate, TangentLine, estimate_g, estimate_shape, fit_tangent
from .weights import Distribution, EdgeId, WeightField, make_field

__version__ = "0.1.0"
