"""circlelab: a numerical laboratory for perturbed rigid rotations of the circle."""

from .bounds import (cos_lemma_check, cosh_margin, ellipse_segment_distance,
                     essential_bound_test, real_root_count, strip_root_count)
from .constructions import (SamplerConfig, analytic_sample, cube_sample,
                            force_attractors, haar_ck_sample, porous_center,
                            prevalence_monte_carlo, shift_inequality_test)
from .dynamics import (AttractorCensus, CircleMapFamily, OrbitRecord,
                       attractor_census, cyclicity_probe, iterate,
                       periodic_orbits, predicted_attractors, rotation_number)
from .fourier import FourierSeries, ck_norm
from .sturm import (certified_lower_bound, hurwitz_step, polya_positive_check,
                    sh_certificate, sign_changes)
from .torus import (HarmonicField2D, TorusField, flow_poincare, limit_cycle_census,
                    poincare_first_order_check, psi, reduced_series)

__version__ = "0.1.0"

__all__ = [
    "AttractorCensus", "CircleMapFamily", "FourierSeries", "HarmonicField2D",
    "OrbitRecord", "SamplerConfig", "TorusField", "analytic_sample",
    "attractor_census", "certified_lower_bound", "ck_norm", "cos_lemma_check",
    "cosh_margin", "cube_sample", "cyclicity_probe", "ellipse_segment_distance",
    "essential_bound_test", "flow_poincare", "force_attractors", "haar_ck_sample",
    "hurwitz_step", "iterate", "limit_cycle_census", "periodic_orbits",
    "poincare_first_order_check", "polya_positive_check", "porous_center",
    "predicted_attractors", "prevalence_monte_carlo", "psi", "real_root_count",
    "reduced_series", "rotation_number", "sh_certificate", "shift_inequality_test",
    "sign_changes", "strip_root_count",
]
