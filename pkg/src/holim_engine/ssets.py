"""Finite semisimplicial sets (nondegenerate cells and face maps only).

Nerves of loop-free categories, standard simplices and their
boundaries, normalized chains, and homology-level contractibility.
Degeneracies are never materialized: every construction used here
(nerves, postcomposition actions, functor-induced cell maps) preserves
nondegeneracy, and normalized chains only see nondegenerate cells.

Nerve conventions: a k-cell is a chain of k composable non-identity
morphisms; d_0 drops the first arrow, d_k the last, inner d_i composes
at the i-th object.  On 1-cells this gives d(f) = tgt(f) - src(f).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Mapping, Optional

from . import chaincx
from .chaincx import ChainComplex, ChainMap, make_chain_map
from .errors import EmptyComplex, NotLoopFree, SimplicialError
from .exactalg import RationalMatrix
from .fincat import (Comma, FinCategory, FunctorData, comma_over,
                     comma_under_functor, find_initial, is_direct)


@dataclass(frozen=True)
class SemiSimplicialSet:
    cells: tuple[tuple, ...]                 # cells[n] = ordered n-cells
    faces: Mapping[tuple[int, object], tuple]  # (n, cell) -> (d_0, ..., d_n)

    @property
    def top_dim(self) -> int:
        return len(self.cells) - 1

    def n_cells(self, n: int) -> tuple:
        if 0 <= n < len(self.cells):
            return self.cells[n]
        return ()

    def is_empty(self) -> bool:
        return not any(self.cells)

    def face(self, n: int, cell, i: int):
        return self.faces[(n, cell)][i]

    @cached_property
    def _index(self) -> dict:
        out = {}
        for n, cs in enumerate(self.cells):
            for j, c in enumerate(cs):
                out[(n, c)] = j
        return out

    def cell_index(self, n: int, cell) -> int:
        return self._index[(n, cell)]

    def total_cells(self) -> int:
        return sum(len(cs) for cs in self.cells)


EMPTY_SSET = SemiSimplicialSet((), {})


def make_sset(cells, faces) -> SemiSimplicialSet:
    cells = tuple(tuple(cs) for cs in cells)
    while cells and not cells[-1]:
        cells = cells[:-1]
    K = SemiSimplicialSet(cells, dict(faces))
    return validate_sset(K)


def validate_sset(K: SemiSimplicialSet) -> SemiSimplicialSet:
    for n in range(1, len(K.cells)):
        lower = set(K.n_cells(n - 1))
        for c in K.n_cells(n):
            fs = K.faces.get((n, c))
            if fs is None or len(fs) != n + 1:
                raise SimplicialError(
                    f"cell {c!r} in dimension {n} lacks its {n + 1} faces")
            for f in fs:
                if f not in lower:
                    raise SimplicialError(
                        f"face of {c!r} is not a cell of dimension {n - 1}")
    for n in range(2, len(K.cells)):
        for c in K.n_cells(n):
            for j in range(1, n + 1):
                for i in range(j):
                    # d_i d_j = d_{j-1} d_i for i < j
                    a = K.face(n - 1, K.face(n, c, j), i)
                    b = K.face(n - 1, K.face(n, c, i), j - 1)
                    if a != b:
                        raise SimplicialError(
                            f"simplicial identity fails on {c!r} (i={i}, j={j})")
    return K


@dataclass(frozen=True)
class SSetMap:
    source: SemiSimplicialSet
    target: SemiSimplicialSet
    mapping: Mapping[tuple[int, object], object]   # (n, cell) -> cell

    def __call__(self, n: int, cell):
        return self.mapping[(n, cell)]


def make_sset_map(source: SemiSimplicialSet, target: SemiSimplicialSet,
                  mapping) -> SSetMap:
    m = SSetMap(source, target, dict(mapping))
    for n, cs in enumerate(source.cells):
        tset = set(target.n_cells(n))
        for c in cs:
            if (n, c) not in m.mapping:
                raise SimplicialError(f"cell {c!r} (dim {n}) has no image")
            if m.mapping[(n, c)] not in tset:
                raise SimplicialError(
                    f"image of {c!r} is not a target cell of dimension {n}")
            if n:
                for i in range(n + 1):
                    if target.face(n, m.mapping[(n, c)], i) != \
                            m.mapping[(n - 1, source.face(n, c, i))]:
                        raise SimplicialError(
                            f"map does not commute with d_{i} on {c!r}")
    return m


def identity_sset_map(K: SemiSimplicialSet) -> SSetMap:
    return SSetMap(K, K, {(n, c): c for n, cs in enumerate(K.cells)
                          for c in cs})


def compose_sset_maps(g: SSetMap, f: SSetMap) -> SSetMap:
    return SSetMap(f.source, g.target,
                   {(n, c): g.mapping[(n, v)]
                    for (n, c), v in f.mapping.items()})


# --- standard simplices -------------------------------------------------------

def standard_simplex(n: int) -> SemiSimplicialSet:
    """Delta^n: k-cells are the (k+1)-subsets of {0..n}; d_i drops the
    i-th vertex."""
    if n < 0:
        raise SimplicialError("negative dimension")
    cells = [tuple(combinations(range(n + 1), k + 1)) for k in range(n + 1)]
    faces = {}
    for k in range(1, n + 1):
        for c in cells[k]:
            faces[(k, c)] = tuple(c[:i] + c[i + 1:] for i in range(k + 1))
    return SemiSimplicialSet(tuple(cells), faces)


def boundary(n: int) -> tuple[SemiSimplicialSet, SSetMap]:
    """The boundary of Delta^n with its inclusion."""
    full = standard_simplex(n)
    cells = list(full.cells[:-1])
    if n == 0:
        B = EMPTY_SSET
    else:
        faces = {key: v for key, v in full.faces.items() if key[0] < n}
        B = SemiSimplicialSet(tuple(cells), faces)
    incl = SSetMap(B, full, {(k, c): c for k, cs in enumerate(B.cells)
                             for c in cs})
    return B, incl


def point() -> SemiSimplicialSet:
    return standard_simplex(0)


def sset_point_map(K: SemiSimplicialSet) -> Optional[SSetMap]:
    """The collapse K -> Delta^0 exists as a cell map only when K has no
    higher cells; the chain-level collapse is `augmentation`."""
    if K.top_dim <= 0:
        return SSetMap(K, point(), {(0, c): (0,) for c in K.n_cells(0)})
    return None


# --- nerves -------------------------------------------------------------------

def nerve(C: FinCategory) -> SemiSimplicialSet:
    """Nerve of a loop-free category; k-cells are chains of k composable
    non-identity morphisms, 0-cells are the objects."""
    if is_direct(C) is None:
        raise NotLoopFree("nerve requires a loop-free category")
    if C.n_objects == 0:
        return EMPTY_SSET
    nonid = C.non_identities()
    cells: list[tuple] = [tuple(C.objects())]
    faces: dict = {}
    prev = [(m,) for m in nonid]
    if prev:
        cells.append(tuple(prev))
        for (m,) in prev:
            faces[(1, (m,))] = (C.tgt(m), C.src(m))
    while prev:
        nxt = []
        k = len(prev[0]) + 1
        for chain in prev:
            for m in nonid:
                if C.src(m) == C.tgt(chain[-1]):
                    nxt.append(chain + (m,))
        if not nxt:
            break
        cells.append(tuple(nxt))
        for chain in nxt:
            fs = [chain[1:]]
            for i in range(1, k):
                comp = C.comp(chain[i], chain[i - 1])
                fs.append(chain[:i - 1] + (comp,) + chain[i + 1:])
            fs.append(chain[:-1])
            faces[(k, chain)] = tuple(fs)
        prev = nxt
    return SemiSimplicialSet(tuple(cells), faces)


@dataclass(frozen=True)
class Weight:
    """A diagram of semisimplicial sets over a finite category, used as
    the exponent of the Bousfield-Kan end."""
    base: FinCategory
    values: tuple[SemiSimplicialSet, ...]
    actions: Mapping[int, SSetMap]
    provenance: str = "custom"

    def value(self, obj: int) -> SemiSimplicialSet:
        return self.values[obj]

    def action(self, mor: int) -> SSetMap:
        return self.actions[mor]


def validate_weight(W: Weight) -> Weight:
    C = W.base
    for m in C.morphisms():
        a = W.actions.get(m)
        if a is None:
            raise SimplicialError(f"weight lacks an action for morphism {m}")
        if a.source is not W.values[C.src(m)] and \
                a.source != W.values[C.src(m)]:
            raise SimplicialError(f"action source mismatch at morphism {m}")
        if a.target is not W.values[C.tgt(m)] and \
                a.target != W.values[C.tgt(m)]:
            raise SimplicialError(f"action target mismatch at morphism {m}")
        make_sset_map(a.source, a.target, a.mapping)
    for x in C.objects():
        if W.actions[C.identity[x]].mapping != \
                identity_sset_map(W.values[x]).mapping:
            raise SimplicialError(f"identity action at object {x} is not id")
    for (g, f), h in C.compose_table.items():
        comp = compose_sset_maps(W.actions[g], W.actions[f])
        if comp.mapping != W.actions[h].mapping:
            raise SimplicialError(
                f"weight action not functorial on ({g}, {f})")
    return W


def _comma_mor_lookup(com: Comma) -> dict:
    return {com.mor_key(m): m for m in com.cat.morphisms()}


def _nerve_cell_map(com1: Comma, com2: Comma, obj_map: dict, K1, K2) -> SSetMap:
    """Cell map N(com1) -> N(com2) induced by an object translation and
    the identity on underlying morphisms."""
    look = _comma_mor_lookup(com2)

    def mor_image(m):
        i, j, u = com1.mor_key(m)
        return look[(obj_map[i], obj_map[j], u)]

    mapping = {}
    for c in K1.n_cells(0):
        mapping[(0, c)] = obj_map[c]
    for n in range(1, len(K1.cells)):
        for chain in K1.n_cells(n):
            mapping[(n, chain)] = tuple(mor_image(m) for m in chain)
    return SSetMap(K1, K2, mapping)


def nerve_weight(C: FinCategory) -> Weight:
    """gamma |-> N(C over gamma), acting by postcomposition on the
    augmentations; a projectively cofibrant resolution of the point."""
    if is_direct(C) is None:
        raise NotLoopFree("nerve weight requires a loop-free category")
    commas = [comma_over(C, g) for g in C.objects()]
    values = [nerve(com.cat) for com in commas]
    actions = {}
    for u in C.morphisms():
        s, t = C.src(u), C.tgt(u)
        com1, com2 = commas[s], commas[t]
        keys2 = {a: i for i, a in enumerate(com2.object_keys)}
        obj_map = {i: keys2[C.comp(u, a)]
                   for i, a in enumerate(com1.object_keys)}
        actions[u] = _nerve_cell_map(com1, com2, obj_map, values[s], values[t])
    return Weight(C, tuple(values), actions, provenance="nerve_weight")


def nerve_of_comma_under(f: FunctorData) -> Weight:
    """gamma' |-> N(f over gamma') as a weight over the target of f."""
    G, Gp = f.source, f.target
    if is_direct(G) is None or is_direct(Gp) is None:
        raise NotLoopFree("comma nerves require loop-free categories")
    commas = [comma_under_functor(f, gp) for gp in Gp.objects()]
    values = [nerve(com.cat) for com in commas]
    actions = {}
    for u in Gp.morphisms():
        s, t = Gp.src(u), Gp.tgt(u)
        com1, com2 = commas[s], commas[t]
        keys2 = {k: i for i, k in enumerate(com2.object_keys)}
        obj_map = {i: keys2[(x, Gp.comp(u, a))]
                   for i, (x, a) in enumerate(com1.object_keys)}
        actions[u] = _nerve_cell_map(com1, com2, obj_map, values[s], values[t])
    return Weight(Gp, tuple(values), actions,
                  provenance="nerve_of_comma_under")


def constant_point_weight(C: FinCategory) -> Weight:
    pt = point()
    ident = identity_sset_map(pt)
    return Weight(C, tuple(pt for _ in C.objects()),
                  {m: ident for m in C.morphisms()},
                  provenance="constant_point")


# --- chains -------------------------------------------------------------------

def normalized_chains(K: SemiSimplicialSet) -> ChainComplex:
    """Free Q-span of the nondegenerate cells with d = sum (-1)^i d_i."""
    if K.is_empty():
        return chaincx.ZERO_COMPLEX
    dims = {n: len(cs) for n, cs in enumerate(K.cells)}
    diff = {}
    for n in range(1, len(K.cells)):
        rows = [[Fraction(0)] * dims[n] for _ in range(dims[n - 1])]
        for j, c in enumerate(K.n_cells(n)):
            for i, fc in enumerate(K.faces[(n, c)]):
                r = K.cell_index(n - 1, fc)
                rows[r][j] += Fraction(-1 if i % 2 else 1)
        diff[n] = RationalMatrix(dims[n - 1], dims[n],
                                 tuple(tuple(r) for r in rows))
    return chaincx.make_complex(dims, diff)


def chains_of_map(m: SSetMap) -> ChainMap:
    A, B = normalized_chains(m.source), normalized_chains(m.target)
    comps = {}
    for n, cs in enumerate(m.source.cells):
        if not cs:
            continue
        rows = [[Fraction(0)] * len(cs)
                for _ in range(len(m.target.n_cells(n)))]
        for j, c in enumerate(cs):
            rows[m.target.cell_index(n, m.mapping[(n, c)])][j] += Fraction(1)
        comps[n] = RationalMatrix(len(m.target.n_cells(n)), len(cs),
                                  tuple(tuple(r) for r in rows))
    return make_chain_map(A, B, comps, check=False)


def augmentation(K: SemiSimplicialSet) -> ChainMap:
    """Chains of K -> Q[0], each vertex to 1; the chain-level collapse
    K -> point."""
    N = normalized_chains(K)
    pt = chaincx.single(0, 1)
    if K.is_empty():
        return chaincx.zero_map(N, pt)
    row = RationalMatrix(1, len(K.n_cells(0)),
                         (tuple(Fraction(1) for _ in K.n_cells(0)),))
    return make_chain_map(N, pt, {0: row}, check=True)


def homology_contractible(K: SemiSimplicialSet) -> bool:
    """True iff H_0 = Q and H_k = 0 for k > 0."""
    if K.is_empty():
        raise EmptyComplex("the empty semisimplicial set is never contractible")
    C = normalized_chains(K)
    b0, _ = chaincx.homology(C, 0)
    if b0 != 1:
        return False
    for k in range(1, C.hi + 1):
        b, _ = chaincx.homology(C, k)
        if b:
            return False
    return True


def euler_characteristic(K: SemiSimplicialSet) -> int:
    return sum((-1 if n % 2 else 1) * len(cs)
               for n, cs in enumerate(K.cells))


# --- point-resolution checking -------------------------------------------------

@dataclass(frozen=True)
class PointResolutionReport:
    per_object: tuple[bool, ...]
    whitelisted: bool
    provenance: str
    passed: bool


def check_point_resolution(W: Weight) -> PointResolutionReport:
    """Per-object homology contractibility plus the structural
    cofibrancy whitelist (see module notes: cofibrancy is not decided
    algorithmically; the whitelist covers every weight the formulas use)."""
    per_object = []
    for x in W.base.objects():
        K = W.value(x)
        if K.is_empty():
            per_object.append(False)
        else:
            per_object.append(homology_contractible(K))
    if W.provenance == "nerve_weight":
        white = True
    elif W.provenance == "nerve_of_comma_under":
        # f_! of the cofibrant nerve weight; cofibrant resolution of the
        # point exactly when f is homotopy-initial, i.e. all values pass
        white = all(per_object)
    elif W.provenance == "constant_point":
        white = find_initial(W.base) is not None
    else:
        white = False
    return PointResolutionReport(tuple(per_object), white, W.provenance,
                                 passed=white and all(per_object))
