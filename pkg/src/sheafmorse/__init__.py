"""Constructible sheaves on face posets, their microsupport in dimension one,
and the quotient categories obtained by killing Morse characters."""

from .errors import ParseError, ResourceLimitError, SheafMorseError, ValidationError
from .facets import (ConormalPoint1D, ConstructibleOpen, FacePoset, RefinementMap, SimplicialComplex, open_arc,
                     orientation_1d, standard_complex, subdivide_1d, subdivide_1d_times)
from .kernel import BACKEND
from .microsheaf import (Casting, PosetModule, augmentation, comparison_map, constant_sheaf, indicator_resolution,
                         interval_casting_1d, local_system, microstalk, microsupport_1d, minimal_casting_1d,
                         resolve_module, sections, skyscraper, stalk)
from .theatre import (MorseCharacter, QuotientContext, StopSpec1D, auto_cast_1d, cast_point_1d,
                      casting_independence, morse_character, peel, quotient_hom, right_orthogonal, stop_removal,
                      tower_replacement)
from .twisted import (HomComplex, Morphism, TwistedComplex, compose, mapping_cone, pullback, representable, shift,
                      verify_quasi_iso)
from .zchain import CohomologyReport, IntegerComplex, IntegerMatrix, cohomology, smith_normal_form

__version__ = "0.1.0"
