"""Cover constructions; each returns a family and a verified certificate."""

from .singleton import singleton_cover
from .volume import constant_density_cover, volume_cover
from .randomized import randomized_cover
from .powertrick import blow_up, exact_oracle_inner, power_trick_extract, uniformize_cover
from .stars import StarSystem, linear_constant_cover, star_greedy_witness, star_parameters
from .weighted import dyadic_decompose, weight_class_cover
from .nearly_linear import linear_decompose, nearly_linear_cover

__all__ = [
    "singleton_cover", "volume_cover", "constant_density_cover", "randomized_cover",
    "blow_up", "exact_oracle_inner", "power_trick_extract", "uniformize_cover",
    "StarSystem", "linear_constant_cover", "star_greedy_witness", "star_parameters",
    "dyadic_decompose", "weight_class_cover", "linear_decompose", "nearly_linear_cover",
]
