"""ASEP / stochastic six-vertex simulation under KPZ rescaling."""

try:
    from ._kpzsim import *  # installed layout (scikit-build-core)
except ImportError:  # in-tree build: the extension sits on sys.path directly
    from _kpzsim import *  # noqa: F401,F403

__all__ = [
    "coeffs",
    "rho_eps_lambda",
    "vertex_update",
    "colored_vertex_update",
    "simulate",
    "sheet",
    "uc_distance",
    "ks_distance",
    "rw_above_line_dp",
    "check",
]
