from .calibration import calibrate_budgets, constrained_count
from .fixtures import Fixture, fixtures
from .gadgets import (GadgetParams, brute_force_sat, gadget_values, gen_3sat_revenue, gen_gadget,
                      parse_dimacs, random_3cnf)
from .scaling import ScaleConfig, ScaledInstance, compress_by_clustering, scale_instance
from .stylized import KINDS, GenConfig, gen_stylized, truncated_normal

__all__ = ["calibrate_budgets", "constrained_count", "Fixture", "fixtures", "GadgetParams",
           "brute_force_sat", "gadget_values", "gen_3sat_revenue", "gen_gadget", "parse_dimacs",
           "random_3cnf", "ScaleConfig", "ScaledInstance", "compress_by_clustering",
           "scale_instance", "KINDS", "GenConfig", "gen_stylized", "truncated_normal"]
