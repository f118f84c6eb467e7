"""Bundled coefficient tables for the two reference constructions.

ex1_*: hexagonal symmetry group, M = [[2,-1],[1,1]], order-3 mask, dual and
wavelet pair. ex2_*: axial symmetry group, M = diag(3,2), order-1 bank with
five symmetrized wavelet pairs. Files use the dense-table text form with the
origin coefficient in brackets.
"""

from importlib import resources

from ..laurent import LaurentPoly, parse_table


def load_text(name: str) -> str:
    return resources.files(__package__).joinpath(name).read_text()


def load_mask_table(name: str) -> LaurentPoly:
    """Parse fixture `name` (e.g. 'ex1_m0') into a LaurentPoly."""
    if not name.endswith(".txt"):
        name += ".txt"
    return parse_table(load_text(name))
