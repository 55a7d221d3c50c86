"""Graded modules over A = Q[x0,x1,x2,x3]/(x0*x3 + x1^(2n-1) + x2^2), Ext groups
in qgr(A) by truncation colimits, mutations and exceptional collections."""

from .rings import make_ring, hilbert_dim, hilbert_series_coefficients
from .modules import (
    PresentedModule,
    ModuleMap,
    make_A_twist,
    make_chi,
    make_Q,
    make_Q_top,
    make_G,
    make_H,
    make_Aq01,
)
from .ext import ext_qgr, ext_dims, ext_class, yoneda_compose, is_nonzero
from .collection import builtin_collection, verify_collection

__version__ = "0.1.0"

__all__ = [
    "make_ring",
    "hilbert_dim",
    "hilbert_series_coefficients",
    "PresentedModule",
    "ModuleMap",
    "make_A_twist",
    "make_chi",
    "make_Q",
    "make_Q_top",
    "make_G",
    "make_H",
    "make_Aq01",
    "ext_qgr",
    "ext_dims",
    "ext_class",
    "yoneda_compose",
    "is_nonzero",
    "builtin_collection",
    "verify_collection",
]
