"""Differential calculus on lifted spaces of measures, mappings,
submanifolds and curves.

The library represents functionals in one shared cylinder shape — an outer
scalar function composed with pairings of generator objects against a
point — and lifts derivatives along vector-field flows to that shape in
closed form.  Four concrete instances (particle measures, finite-label
mappings, simplicial submanifolds, curves) plug into one instance-
independent layer of derivations, generated differential forms and Cartan
calculus, and a deterministic harness verifies the identities suite by
suite.
"""

from .errors import (DomainViolationError, InvalidArgumentError,
                     InvalidMeshError, LiftedError, NumericFailureError,
                     UnsupportedOperationError, UsageError)
from .fields import (Ball, BumpField, BumpProfile, ExpProfile, LinearProfile,
                     PolynomialField, Profile, ScalarField, SinProfile,
                     SqrtShiftProfile, TanhProfile, UserScalarField, bump,
                     constant, coordinate, f_add, f_affine, f_compose, f_mul,
                     f_partial, f_scale, f_shift, linear_form, monomial,
                     psi_partial, xi_from_psi)
from .smooth import (AffineEmbedding, ConformalMetric, ConstantMetric,
                     RiemannianMetric, VectorField, constant_field,
                     direct_sum_field, directional_derivative,
                     euclidean_metric, field_from_components, flow,
                     lie_bracket, linear_field, metric_gradient,
                     scaled_bump_field)
from .forms import (DifferentialForm, coordinate_form, exterior_derivative,
                    form_from_coeffs, interior_product, lie_derivative_form,
                    wedge_ambient)
from .cylinder import PairingFunctional
from .geometry import (Derivation, Form, GeometryInstance, GeometryMorphism,
                       bracket_derivations, cartan_residual,
                       degeneracy_residual, eval_form, exterior_d,
                       interior_bracket_residual, lie_derivative,
                       pushforward_commutes_residual, pushforward_form,
                       tangent_equal_probe, wedge)
from .measures import (MeasureEnsemble, MeasureFunctional, ParticleMeasure,
                       convolution_rewrite, convolve_measures, density_map,
                       density_rewrite, dirichlet_form, embedding_rewrite,
                       gradient, lifted_derivative, markov_defect,
                       push_measure, pushforward_measure,
                       read_particle_measure, tangent_inner_product,
                       write_particle_measure)
from .mappings import (LabeledSpace, MappingFunctional, MappingPoint,
                       mapping_embedding_rewrite, mapping_lifted_derivative,
                       precompose, product_generator, push_mapping,
                       read_mapping_point, write_mapping_point)
from .simplicial import (SimplicialManifold, SubmanifoldFunctional, boundary,
                         boundary_rewrite, boundary_weak_diff_check,
                         circle_line_integral, deform, disk_convergence_study,
                         disk_mesh, integrate_form,
                         integrate_form_with_estimate, loop_mesh, read_mesh,
                         refine, segment_mesh, sphere_mesh, square_mesh,
                         stokes_check, triangle_mesh, write_mesh)
from .curves import (ActionFunctional, Curve, action_lifted_derivative,
                     circle_curve, flowed_curve, kinetic_density, line_curve,
                     polynomial_curve, prolong, push_curve, read_curve,
                     smoothed_speed_density, spline_curve, write_curve)
from .sampling import (curve_geometry, mapping_geometry, measure_geometry,
                       submanifold_geometry)
from .harness import CaseReport, SuiteConfig, case_rng, run_suite, suite_names

__version__ = "0.1.0"
