"""Roadmap planners, shortest-path engines, radius rules and analytic bounds."""

from detprm.planner.bounds import Certification, CertificationQuery, certify_sample_count, suboptimality_factor
from detprm.planner.fmt import fmt_star
from detprm.planner.plan import VARIANTS, config_samples, plan
from detprm.planner.radius import RadiusRule, connection_radius, gamma_prm, knn_count, unit_ball_volume
from detprm.planner.roadmap import (
    Roadmap,
    build_knn_roadmap,
    build_roadmap,
    count_distinct_lengths,
    length_classes,
    radius_pairs,
)
from detprm.planner.search import ENGINES, shortest_path
