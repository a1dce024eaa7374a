"""Hypothesis strategies for small set systems."""
from fractions import Fraction

from hypothesis import strategies as st

from submeasure_lab.algebra import AtomSet, Cover, GroundSet
from submeasure_lab.submeasure import WeightedCoverFamily
from submeasure_lab.utils import iter_bits

small_weights = st.fractions(min_value=Fraction(1, 8), max_value=3, max_denominator=8)


@st.composite
def families(draw, max_atoms: int = 6, max_members: int = 8):
    """(n_atoms, masks): non-empty subsets of a small ground set."""
    n_atoms = draw(st.integers(min_value=1, max_value=max_atoms))
    full = (1 << n_atoms) - 1
    masks = draw(
        st.lists(st.integers(min_value=1, max_value=full), min_size=1, max_size=max_members)
    )
    return n_atoms, masks


@st.composite
def weighted_covers(draw, max_atoms: int = 6, max_entries: int = 7):
    """A weighted cover whose union is the whole ground set."""
    n_atoms, masks = draw(families(max_atoms, max_entries))
    full = (1 << n_atoms) - 1
    union = 0
    for mask in masks:
        union |= mask
    if union != full:
        masks.append(full & ~union)
    weights = draw(st.lists(small_weights, min_size=len(masks), max_size=len(masks)))
    return Cover.from_indices(GroundSet(n_atoms), [list(iter_bits(m)) for m in masks], weights)


@st.composite
def point_pairs(draw, n_coords: int, alphabet: int = 3):
    """Two points of {0..alphabet-1}^n_coords."""
    coords = st.lists(
        st.integers(min_value=0, max_value=alphabet - 1), min_size=n_coords, max_size=n_coords
    )
    return draw(coords), draw(coords)


@st.composite
def generator_families(draw, max_atoms: int = 6, max_generators: int = 6):
    """Weighted generators with a whole-space fallback."""
    n_atoms, masks = draw(families(max_atoms, max_generators))
    weights = draw(st.lists(small_weights, min_size=len(masks), max_size=len(masks)))
    ground = GroundSet(n_atoms)
    generators = tuple((AtomSet(ground, mask), weight) for mask, weight in zip(masks, weights))
    return WeightedCoverFamily(generators, draw(small_weights) + 1, ground)
