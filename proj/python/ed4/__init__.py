from ._ed4 import (
    Ed4Error,
    apply_permutation,
    bound_clockmix,
    bound_hungarian,
    clockmix_pair,
    mix_label_hard,
    random_shuffle,
)

__all__ = [
    "Ed4Error",
    "apply_permutation",
    "bound_clockmix",
    "bound_hungarian",
    "clockmix_pair",
    "mix_label_hard",
    "random_shuffle",
]
