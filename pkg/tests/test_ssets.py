import random
from math import comb

import pytest

from holim_engine.chaincx import betti_numbers, validate_map
from holim_engine.errors import EmptyComplex, NotLoopFree
from holim_engine.fincat import (FinCategory, arrow_category, chain_poset,
                                 comma_over, cospan_category,
                                 identity_functor, object_inclusion,
                                 terminal_category, validate_category)
from holim_engine.randgen import random_loopfree_category
from holim_engine.ssets import (EMPTY_SSET, Weight, augmentation, boundary,
                                chains_of_map, check_point_resolution,
                                constant_point_weight, euler_characteristic,
                                homology_contractible, identity_sset_map,
                                nerve, nerve_of_comma_under, nerve_weight,
                                normalized_chains, point, standard_simplex,
                                validate_sset, validate_weight)


def test_standard_simplex_cell_counts():
    for n in range(5):
        K = standard_simplex(n)
        validate_sset(K)
        for k in range(n + 1):
            assert len(K.n_cells(k)) == comb(n + 1, k + 1)


def test_boundary_omits_top_cell():
    B, incl = boundary(2)
    assert len(B.n_cells(0)) == 3
    assert len(B.n_cells(1)) == 3
    assert len(B.n_cells(2)) == 0
    assert betti_numbers(normalized_chains(B)) == {0: 1, 1: 1}


def test_boundary_of_point_is_empty():
    B, incl = boundary(0)
    assert B.is_empty()


def test_nerve_terminal_is_point():
    K = nerve(terminal_category())
    assert len(K.n_cells(0)) == 1 and K.top_dim == 0


def test_nerve_arrow_is_interval():
    K = nerve(arrow_category())
    assert len(K.n_cells(0)) == 2 and len(K.n_cells(1)) == 1
    validate_sset(K)


def test_nerve_of_chain_poset_is_simplex():
    K = nerve(chain_poset(2))
    assert [len(K.n_cells(k)) for k in range(3)] == [3, 3, 1]
    validate_sset(K)
    N = normalized_chains(K)
    assert betti_numbers(N) == {0: 1}


def test_nerve_rejects_loops():
    table = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 1}
    M = validate_category(FinCategory(
        1, ("x",), (0, 0), (0, 0), ("id_x", "e"), (0,), table))
    with pytest.raises(NotLoopFree):
        nerve(M)


def test_nerve_simplicial_identities_randomized():
    rng = random.Random(100)
    for _ in range(15):
        C = random_loopfree_category(rng)
        validate_sset(nerve(C))


def test_normalized_chains_point():
    N = normalized_chains(point())
    assert dict(N.dims) == {0: 1}


def test_normalized_chains_interval_orientation():
    # d(edge) = vertex 1 minus vertex 0
    N = normalized_chains(standard_simplex(1))
    assert dict(N.dims) == {0: 2, 1: 1}
    col = N.d(1).column(0)
    assert (col[0], col[1]) == (-1, 1)


def test_homology_contractible():
    assert homology_contractible(point())
    for n in range(1, 5):
        assert homology_contractible(standard_simplex(n))
    B, _ = boundary(2)
    assert not homology_contractible(B)
    with pytest.raises(EmptyComplex):
        homology_contractible(EMPTY_SSET)


def test_comma_nerves_contractible_randomized():
    rng = random.Random(200)
    for _ in range(15):
        C = random_loopfree_category(rng)
        for g in C.objects():
            K = nerve(comma_over(C, g).cat)
            assert homology_contractible(K)
            assert euler_characteristic(K) == 1


def test_nerve_weight_over_arrow():
    C = arrow_category()
    W = validate_weight(nerve_weight(C))
    assert W.value(0).top_dim == 0          # point at a
    assert len(W.value(1).n_cells(0)) == 2  # interval at b
    assert len(W.value(1).n_cells(1)) == 1
    f = C.non_identities()[0]
    act = W.action(f)
    com_b = comma_over(C, 1)
    vertex = act(0, W.value(0).n_cells(0)[0])
    assert com_b.object_keys[vertex] == f


def test_nerve_weight_functorial_randomized():
    rng = random.Random(300)
    for _ in range(10):
        C = random_loopfree_category(rng)
        W = nerve_weight(C)
        validate_weight(W)
        for m in C.morphisms():
            validate_map(chains_of_map(W.action(m)))


def test_nerve_of_comma_under_identity_matches_nerve_weight():
    C = chain_poset(2)
    W1 = nerve_weight(C)
    W2 = nerve_of_comma_under(identity_functor(C))
    for x in C.objects():
        assert [len(cs) for cs in W1.value(x).cells] == \
            [len(cs) for cs in W2.value(x).cells]


def test_nerve_of_comma_under_point_inclusions():
    C = arrow_category()
    Wa = nerve_of_comma_under(object_inclusion(C, 0))
    assert Wa.value(0).total_cells() == 1
    assert Wa.value(1).total_cells() == 1
    Wb = nerve_of_comma_under(object_inclusion(C, 1))
    assert Wb.value(0).is_empty()
    assert Wb.value(1).total_cells() == 1


def test_check_point_resolution_nerve_weight():
    rep = check_point_resolution(nerve_weight(arrow_category()))
    assert rep.passed and rep.whitelisted and all(rep.per_object)


def test_check_point_resolution_constant_point():
    rep = check_point_resolution(constant_point_weight(arrow_category()))
    assert rep.passed  # [1] has an initial object
    rep2 = check_point_resolution(constant_point_weight(cospan_category()))
    assert not rep2.passed  # the cospan has no initial object


def test_check_point_resolution_rejects_boundary_value():
    B, _ = boundary(2)
    C = terminal_category()
    W = Weight(C, (B,), {0: identity_sset_map(B)}, provenance="custom")
    rep = check_point_resolution(W)
    assert not rep.passed and not rep.per_object[0]


def test_augmentation_is_chain_map():
    for n in range(4):
        validate_map(augmentation(standard_simplex(n)))
    rng = random.Random(42)
    for _ in range(5):
        C = random_loopfree_category(rng)
        validate_map(augmentation(nerve(C)))
