import random
from fractions import Fraction

import pytest

from holim_engine import chaincx, holim
from holim_engine.chaincx import (ZERO_COMPLEX, betti_numbers, hom_precompose,
                                  identity_map, is_quasi_iso, make_chain_map,
                                  make_complex, single, zero_map)
from holim_engine.endkan import (ChainDiagram, ChainDiagramMap,
                                 end_induced_map, restrict)
from holim_engine.errors import (DepthExceeded, NotComponentwiseWE,
                                 NotLoopFree, TruncationTooShallow,
                                 WeightRejected)
from holim_engine.exactalg import RationalMatrix
from holim_engine.fincat import (arrow_category, chain_poset,
                                 cospan_category, identity_functor,
                                 object_inclusion, terminal_category,
                                 validate_functor, FunctorData, find_initial)
from holim_engine.holim import (bk_holim, change_of_diagrams_iso,
                                check_homotopy_initial, check_reedy_fibrant,
                                comparison_map, constant_cosimplicial,
                                cosimplicial_from_cofaces,
                                cosimplicial_replacement, cospan_diagram,
                                delta_plus_category, fat_tot, fibrant_frame,
                                holim_we_invariance, homotopy_pullback,
                                mapping_path_complex, matching_object,
                                weighted_end)
from holim_engine.randgen import (fattened_quasi_iso, random_chain_complex,
                                  random_chain_map, random_cospan_diagram,
                                  random_poset, random_poset_chain_diagram)
from holim_engine.ssets import (constant_point_weight, nerve_weight,
                                normalized_chains, augmentation)

M = RationalMatrix.from_rows


def arrow_chain_diagram(A, B, fmap):
    C = arrow_category()
    f = C.non_identities()[0]
    return ChainDiagram(C, [A, B], {C.identity[0]: identity_map(A),
                                    C.identity[1]: identity_map(B),
                                    f: fmap})


def constant_diagram(C, c):
    return ChainDiagram(C, [c for _ in C.objects()],
                        lambda m: identity_map(c))


# --- frames ---------------------------------------------------------------------

def test_frame_levels():
    frame = fibrant_frame(single(0), 2)
    assert frame.level(0).dims == single(0).dims
    assert dict(frame.level(1).dims) == {0: 2, -1: 1}
    assert betti_numbers(frame.level(1)) == {0: 1}
    with pytest.raises(DepthExceeded):
        frame.level(3)


def test_frame_zero_complex():
    frame = fibrant_frame(ZERO_COMPLEX, 2)
    assert frame.level(2).is_zero()


def test_frame_coface_functoriality():
    rng = random.Random(1)
    c = random_chain_complex(rng, max_dim=2, max_width=2)
    frame = fibrant_frame(c, 3)
    # (0,2) into [3] factors as <0,2,3> after <0,2> etc.; spot-check one
    r1 = frame.coface_action((0, 2), 3)
    r2a = frame.coface_action((0, 1, 2), 3)   # [2] -> [3]
    r2b = frame.coface_action((0, 2), 2)      # [1] -> [2], image {0, 2}
    comp = chaincx.compose_maps(r2b, r2a)
    for k in frame.level(3).degrees():
        assert comp.component(k) == r1.component(k)


def test_matching_object_base_cases():
    frame = fibrant_frame(single(0), 2)
    M0, map0 = matching_object(frame, 0)
    assert M0.is_zero()
    M1, map1 = matching_object(frame, 1)
    assert dict(M1.dims) == {0: 2}
    # evaluation at the two vertices
    assert map1.component(0).rows == 2


def test_check_reedy_fibrant():
    rng = random.Random(2)
    frame = fibrant_frame(single(0), 3)
    assert check_reedy_fibrant(frame, 3).passed
    frame0 = fibrant_frame(ZERO_COMPLEX, 2)
    assert check_reedy_fibrant(frame0, 2).passed
    cone = make_complex({0: 1, 1: 1}, {1: M([[1]])})
    assert check_reedy_fibrant(fibrant_frame(cone, 2), 2).passed


# --- Bousfield-Kan --------------------------------------------------------------

def test_bk_holim_terminal():
    rng = random.Random(3)
    c = random_chain_complex(rng)
    F = constant_diagram(terminal_category(), c)
    res = bk_holim(F)
    assert res.betti == betti_numbers(c)


def test_bk_holim_arrow_identity():
    F = arrow_chain_diagram(single(0), single(0),
                            make_chain_map(single(0), single(0),
                                           {0: M([[1]])}))
    res = bk_holim(F)
    assert res.betti == {0: 1}


def test_bk_holim_rejects_bad_weight():
    from holim_engine.ssets import Weight, boundary, identity_sset_map
    B, _ = boundary(2)
    C = terminal_category()
    W = Weight(C, (B,), {0: identity_sset_map(B)})
    F = constant_diagram(C, single(0))
    with pytest.raises(WeightRejected):
        bk_holim(F, W)


def test_bk_holim_rejects_loops():
    from holim_engine.fincat import FinCategory, validate_category
    table = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0}
    Z2 = validate_category(FinCategory(
        1, ("x",), (0, 0), (0, 0), ("id_x", "e"), (0,), table))
    F = ChainDiagram(Z2, [single(0)], lambda m: identity_map(single(0)))
    with pytest.raises(NotLoopFree):
        bk_holim(F)


def test_bk_holim_finite_dimension_bound():
    rng = random.Random(4)
    from holim_engine.ssets import nerve_weight
    for _ in range(5):
        P = random_poset(rng, 3)
        F = random_poset_chain_diagram(rng, P, max_dim=2, max_width=2)
        res = bk_holim(F)
        W = nerve_weight(P)
        bound = sum(F.value(g).total_dim() * W.value(g).total_cells()
                    for g in P.objects())
        assert res.complex.total_dim() <= bound


def test_weight_independence_over_arrow():
    # nerve weight vs constant point over [1]: comparison map along the
    # augmentations is a quasi-iso
    rng = random.Random(5)
    A = random_chain_complex(rng, max_dim=2, max_width=2)
    B = random_chain_complex(rng, max_dim=2, max_width=2)
    fmap = random_chain_map(rng, A, B)
    F = arrow_chain_diagram(A, B, fmap)
    C = F.base
    Wn = nerve_weight(C)
    Wp = constant_point_weight(C)
    En = weighted_end(F, Wn)
    Ep = weighted_end(F, Wp)
    assert betti_numbers(En.complex) == betti_numbers(Ep.complex)
    comps = [hom_precompose(augmentation(Wn.value(g)), F.value(g))
             for g in C.objects()]
    comp = end_induced_map(Ep, En, comps)
    ok, _ = is_quasi_iso(comp)
    assert ok


# --- homotopy pullback ------------------------------------------------------------

def test_pullback_identity_legs():
    c = single(0)
    ident = make_chain_map(c, c, {0: M([[1]])})
    res, rep = homotopy_pullback(ident, ident)
    assert rep.passed
    assert res.betti == {0: 1}


def test_pullback_two_zero_legs():
    c = single(0)
    z = zero_map(ZERO_COMPLEX, c)
    res, rep = homotopy_pullback(z, z)
    assert rep.passed
    assert res.betti == {-1: 1}


def test_pullback_zero_target():
    rng = random.Random(6)
    A = random_chain_complex(rng)
    B = random_chain_complex(rng)
    res, rep = homotopy_pullback(zero_map(A, ZERO_COMPLEX),
                                 zero_map(B, ZERO_COMPLEX))
    assert rep.passed
    expected = {}
    for k in set(A.degrees()) | set(B.degrees()):
        b = betti_numbers(A).get(k, 0) + betti_numbers(B).get(k, 0)
        if b:
            expected[k] = b
    assert res.betti == expected


def test_pullback_oracle_randomized():
    rng = random.Random(7)
    for _ in range(10):
        D = random_cospan_diagram(rng)
        C = D.base
        p = D.action(C.hom(0, 2)[0])
        q = D.action(C.hom(1, 2)[0])
        res, rep = homotopy_pullback(p, q)
        assert rep.passed, (rep.betti_bk, rep.betti_oracle)


def test_mapping_path_complex_d_squared():
    rng = random.Random(8)
    for _ in range(10):
        D = random_cospan_diagram(rng)
        C = D.base
        P = mapping_path_complex(D.action(C.hom(0, 2)[0]),
                                 D.action(C.hom(1, 2)[0]))
        # make_complex already asserts d o d = 0
        assert P.lo <= P.hi or P.is_zero()


# --- fat totalization ---------------------------------------------------------------

def test_delta_plus_category_counts():
    C = delta_plus_category(2)
    assert C.n_objects == 3
    # morphisms [m] -> [n]: C(n+1, m+1) injections
    assert C.n_morphisms == 1 + 2 + 3 + 1 + 3 + 1


def test_fat_tot_constant_point():
    X = constant_cosimplicial(single(0), 3)
    res = fat_tot(X)
    assert res.stable_from == -2
    assert res.betti_at(0) == 1
    for k in (-1, -2):
        assert res.betti_at(k) == 0
    with pytest.raises(TruncationTooShallow):
        res.betti_at(-3)


def test_fat_tot_zero():
    X = constant_cosimplicial(ZERO_COMPLEX, 2)
    res = fat_tot(X)
    assert res.complex.is_zero()


def test_fat_tot_constant_matches_input():
    rng = random.Random(9)
    for _ in range(3):
        c = random_chain_complex(rng, max_dim=2, max_width=2)
        N = (c.hi - c.lo) + 2 if not c.is_zero() else 2
        res = fat_tot(constant_cosimplicial(c, N))
        want = betti_numbers(c)
        for k in range(res.stable_from, c.hi + 1):
            assert res.betti_at(k) == want.get(k, 0)


def test_fat_tot_of_cosimplicial_replacement_matches_bk():
    # the spec's cospan (0 -> Q[0] <- 0): holim has H_{-1} = 1
    C = cospan_category()
    z = ZERO_COMPLEX
    c = single(0)
    F = ChainDiagram(C, [z, z, c],
                     {C.identity[0]: identity_map(z),
                      C.identity[1]: identity_map(z),
                      C.identity[2]: identity_map(c),
                      C.hom(0, 2)[0]: zero_map(z, c),
                      C.hom(1, 2)[0]: zero_map(z, c)})
    bk = bk_holim(F)
    assert bk.betti == {-1: 1}
    X = cosimplicial_replacement(F, 3)
    res = fat_tot(X)
    for k in range(res.stable_from, 1):
        assert res.betti_at(k) == bk.betti.get(k, 0)


def test_cosimplicial_replacement_levels_for_cospan():
    C = cospan_category()
    F = constant_diagram(C, single(0))
    X = cosimplicial_replacement(F, 2)
    # chains of length n in the cospan: 3 + 2n of them
    assert X.value(0).dim(0) == 3
    assert X.value(1).dim(0) == 5
    assert X.value(2).dim(0) == 7


# --- homotopy-initial functors --------------------------------------------------------

def test_homotopy_initial_identity():
    rng = random.Random(10)
    P = random_poset(rng, 3)
    assert check_homotopy_initial(identity_functor(P)).passed


def test_homotopy_initial_initial_object():
    P = random_poset(random.Random(11), 3, with_bottom=True)
    i = find_initial(P)
    assert i is not None
    rep = check_homotopy_initial(object_inclusion(P, i))
    assert rep.passed


def test_homotopy_initial_fails_for_non_initial():
    C = arrow_category()
    rep = check_homotopy_initial(object_inclusion(C, 1))
    assert not rep.passed
    assert rep.per_object == (False, True)


# --- change of diagrams and comparison ---------------------------------------------

def test_change_of_diagrams_identity():
    rng = random.Random(12)
    P = random_poset(rng, 3)
    F = random_poset_chain_diagram(rng, P, max_dim=2, max_width=2)
    rep = change_of_diagrams_iso(identity_functor(P), F)
    assert rep.passed
    assert rep.dims_over_source == rep.dims_over_target


def test_change_of_diagrams_point_inclusion():
    c = single(0)
    ident = make_chain_map(c, c, {0: M([[1]])})
    F = arrow_chain_diagram(c, c, ident)
    rep = change_of_diagrams_iso(object_inclusion(arrow_category(), 0), F)
    assert rep.passed


def test_change_of_diagrams_zero():
    C = arrow_category()
    F = constant_diagram(C, ZERO_COMPLEX)
    rep = change_of_diagrams_iso(object_inclusion(C, 0), F)
    assert rep.passed
    assert rep.dims_over_source == {} == rep.dims_over_target


def test_comparison_identity_functor():
    rng = random.Random(13)
    P = random_poset(rng, 3)
    F = random_poset_chain_diagram(rng, P, max_dim=2, max_width=2)
    cmap, rep = comparison_map(identity_functor(P), F)
    assert rep.change_of_diagrams_ok
    assert rep.quasi_iso
    # over the identity the comparison is an isomorphism of complexes
    from holim_engine.exactalg import rank
    for k in cmap.source.degrees():
        m = cmap.component(k)
        assert m.rows == m.cols and rank(m) == m.rows


def test_comparison_initial_inclusion_quasi_iso():
    c = single(0)
    ident = make_chain_map(c, c, {0: M([[1]])})
    F = arrow_chain_diagram(c, c, ident)
    cmap, rep = comparison_map(object_inclusion(arrow_category(), 0), F)
    assert rep.quasi_iso
    assert rep.betti_full == {0: 1}
    assert rep.betti_restricted == {0: 1}


def test_comparison_non_initial_detected():
    # f: {b} into [1] with F = (Q[0] --0--> Q[0]): both ends have H_0 = 1
    # but the comparison map is zero on homology
    c = single(0)
    F = arrow_chain_diagram(c, c, zero_map(c, c))
    cmap, rep = comparison_map(object_inclusion(arrow_category(), 1), F)
    assert rep.change_of_diagrams_ok
    assert rep.betti_full == {0: 1}
    assert rep.betti_restricted == {0: 1}
    assert not rep.quasi_iso


def test_bk_holim_initial_object_value():
    # holim over a shape with initial object i is F(i) up to quasi-iso
    rng = random.Random(14)
    for _ in range(4):
        P = random_poset(rng, 3, with_bottom=True)
        F = random_poset_chain_diagram(rng, P, max_dim=2, max_width=2)
        i = find_initial(P)
        cmap, rep = comparison_map(object_inclusion(P, i), F)
        assert rep.quasi_iso
        assert rep.betti_full == betti_numbers(F.value(i))


# --- homotopy invariance -----------------------------------------------------------

def test_we_invariance_identity():
    rng = random.Random(15)
    P = random_poset(rng, 3)
    F = random_poset_chain_diagram(rng, P, max_dim=2, max_width=2)
    alpha = ChainDiagramMap(F, F, {x: identity_map(F.value(x))
                                   for x in P.objects()})
    rep = holim_we_invariance(alpha)
    assert rep.quasi_iso


def test_we_invariance_fattened():
    rng = random.Random(16)
    for _ in range(4):
        P = random_poset(rng, 3)
        G = random_poset_chain_diagram(rng, P, max_dim=2, max_width=2)
        F, alpha = fattened_quasi_iso(rng, G)
        rep = holim_we_invariance(alpha)
        assert rep.quasi_iso
        assert rep.betti_source == rep.betti_target


def test_we_invariance_rejects_non_we():
    c = single(0)
    F = arrow_chain_diagram(c, c, zero_map(c, c))
    G = constant_diagram(arrow_category(), ZERO_COMPLEX)
    alpha = ChainDiagramMap(F, G, {0: zero_map(c, ZERO_COMPLEX),
                                   1: zero_map(c, ZERO_COMPLEX)})
    with pytest.raises(NotComponentwiseWE):
        holim_we_invariance(alpha)


def test_matching_map_is_vertex_evaluation():
    frame = fibrant_frame(single(0), 1)
    _, mmap = matching_object(frame, 1)
    assert mmap.component(0) == RationalMatrix.identity(2)


def test_fattot_depth_too_shallow_detected():
    # with the minimum depth the stable range still starts above lo - 1
    X = constant_cosimplicial(single(0), 1)
    res = fat_tot(X)
    assert res.stable_from == 0
    with pytest.raises(TruncationTooShallow):
        res.betti_at(-1)


def test_bk_holim_accepts_constant_point_weight_over_arrow():
    rng = random.Random(17)
    A = random_chain_complex(rng, max_dim=2, max_width=2)
    B = random_chain_complex(rng, max_dim=2, max_width=2)
    F = arrow_chain_diagram(A, B, random_chain_map(rng, A, B))
    res_pt = bk_holim(F, constant_point_weight(F.base))
    res_nw = bk_holim(F)
    assert res_pt.betti == res_nw.betti
