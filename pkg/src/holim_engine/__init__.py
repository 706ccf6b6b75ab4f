"""Exact homotopy-limit computations over finite categories.

Finite categories with total composition tables, finite-set and
rational-chain-complex valued diagrams, ends/coends/Kan extensions,
nerves of loop-free categories, Bousfield-Kan homotopy limits and fat
totalizations, all in exact rational arithmetic.

The main entry points:

    fincat    -- categories, functors, commas, degree functions
    exactalg  -- exact rational matrices, kernels, quotients
    chaincx   -- chain complexes, hom complexes, powering
    ssets     -- semisimplicial sets, nerves, weights
    endkan    -- (co)limits, (co)ends, Kan extensions
    holim     -- frames, bk_holim, fat_tot, comparison maps
    dsl, cli  -- the workspace text format and `holim-engine`
"""

from . import chaincx, dsl, endkan, errors, exactalg, fincat, holim, randgen, \
    ssets
from .chaincx import (ChainComplex, ChainMap, betti_numbers, equalizer_kernel,
                      hom_complex, homology, is_quasi_iso, make_chain_map,
                      make_complex, power, product_total)
from .endkan import (ChainDiagram, FinSetDiagram, coend_finset,
                     co_yoneda_check, end_chain, end_finset, finset_colimit,
                     finset_limit, fubini_check, lan, lan_via_coend,
                     nat_trans_bruteforce, ran, ran_via_end, restrict)
from .exactalg import RationalMatrix, quotient_basis, rank_kernel, solve
from .fincat import (DegreeFunction, FinCategory, FunctorData, comma_over,
                     comma_under_functor, is_direct, opposite, product,
                     validate_category, validate_functor)
from .holim import (SimplicialFrame, bk_holim, change_of_diagrams_iso,
                    check_homotopy_initial, check_reedy_fibrant,
                    comparison_map, fat_tot, fibrant_frame,
                    holim_we_invariance, homotopy_pullback, matching_object)
from .ssets import (SemiSimplicialSet, SSetMap, Weight, boundary,
                    check_point_resolution, homology_contractible, nerve,
                    nerve_of_comma_under, nerve_weight, normalized_chains,
                    standard_simplex)

__version__ = "0.1.0"
