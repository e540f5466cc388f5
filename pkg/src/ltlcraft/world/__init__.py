"""Grid world, label function, features and map generation."""
from .adversarial import (
    Candidate, adversarial_select, advancing_propositions, bfs_distances, greedy_cost,
    optimal_cost, score_map,
)
from .grid import (
    ALL_PROPOSITIONS, DEFAULT_COUNTS, FEATURE_KINDS, PROPOSITION_KIND, RAW_MATERIALS, TOOLS,
    Action, GridMap, MapError, ObjectKind, WorldState, feature_size, features, hour, load_map,
    proposition_for, random_map, save_map, step,
)
