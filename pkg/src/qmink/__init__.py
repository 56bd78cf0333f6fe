"""Minkowski products of rotation sets on the unit quaternion sphere."""
from .errors import DomainError, UsageError
from .quat import (
    ONE, I, J, K, AxisAngle, Quaternion, UnitQuaternion, compose_axis_angle, conj, exp_unit,
    from_axis_angle, inner, inv, mul, norm, rotate, to_axis_angle,
)
from .cloud import PointCloud, make_rng, read_ply
from .rotation_sets import (
    Arc, AxisCap, FullSphere, RotationSet, Singleton, SphericalCap, TangentPlane4,
    contains, from_descriptor, on_boundary, sample, tangent_plane,
)
from .minkowski import (
    ArcSurface, ProductResult, Translated, arc_product_general, arc_product_same_axis,
    axiscap_bound, cap_product, corner_eta, product, rank_defect_locus, translate,
)
from .chart import (
    bch, cayley_phi, cayley_psi, cap_image_under_phi, exp_so3, hat, hyperspherical,
    from_hyperspherical, log_so3, stereo_project, stereo_unproject, vee,
)
from .boundary import (
    BoundaryVerdict, CapUnion, cap_boundary_lemma, interior_rule, necessary_condition,
    non_boundary_corollary, sample_product_boundary, sufficient_condition,
)
from .oracle import VerificationReport, product_cloud, project_cloud, verify

__version__ = "0.1.0"
