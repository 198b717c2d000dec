"""Obstacle models, collision and clearance queries, benchmark problem families."""

from detprm.environments.chain import (
    DEFAULT_EDGE_RESOLUTION,
    chain_config_free,
    chain_edge_collision_free,
    chain_edges_collision_free,
    chain_forward_kinematics,
)
from detprm.environments.families import (
    MAZE_GAP,
    chain_problem,
    corner_problem,
    family_problem,
    fixed_spheres,
    maze2d,
    random_spheres,
    recursive_maze,
    rect_env,
)
from detprm.environments.geometry import (
    AABox,
    Chain,
    ClearanceReport,
    CollisionError,
    Environment,
    Sphere,
    inflate,
    min_clearance,
    segment_clearance,
    segment_collision_free,
    segments_collision_free,
)
from detprm.environments.io import (
    PROBLEM_SCHEMA,
    ProblemFileError,
    load_problem,
    load_shipped_problem,
    problem_from_json,
    problem_to_json,
    save_problem,
    shipped_problem_names,
)
