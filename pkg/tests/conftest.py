"""
Shared fixtures.
"""
import pytest

from app.models.structure import GeneralStructure
from app.models.vocabulary import Vocabulary
from app.services.textio import parse_structure

M0_TEXT = """
(structure
  (vocabulary (predicate P 1))
  (universe a b)
  (predicate P (a 1/4) (b 3/4)))
"""

# Binary P with a twin pair: b and c are indistinguishable by atomic formulas
TWINS_TEXT = """
(structure
  (vocabulary (predicate P 2))
  (universe a b c)
  (predicate P (a a 0) (a b 1/2) (a c 1/2)
               (b a 1) (b b 1/4) (b c 1/4)
               (c a 1) (c b 1/4) (c c 1/4)))
"""

# Unary function swapping a and b; Q tells nothing apart
SWAP_TEXT = """
(structure
  (vocabulary (predicate Q 1) (function F 1) (constant c))
  (universe a b)
  (predicate Q (a 1/2) (b 1/2))
  (function F (a b) (b a))
  (constant c a))
"""


@pytest.fixture
def unary_vocab() -> Vocabulary:
    return Vocabulary(predicates=(("P", 1),))


@pytest.fixture
def m0() -> GeneralStructure:
    return parse_structure(M0_TEXT)


@pytest.fixture
def twins() -> GeneralStructure:
    return parse_structure(TWINS_TEXT)


@pytest.fixture
def swap() -> GeneralStructure:
    return parse_structure(SWAP_TEXT)
