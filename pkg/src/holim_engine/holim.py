"""The homotopy-limit engine.

Everything here computes ends of powered bifunctors: the weighted end
of a diagram F with weight W is the end of
(x, y) |-> Hom(chains of W(x), F(y)) over product(opposite(G), G).
With the nerve weight g |-> N(G over g) this is the Bousfield-Kan
homotopy limit; with the truncated injective-simplex weight it is the
fat totalization.

Quasi-isomorphism is only ever asserted along an explicitly constructed
comparison map; equal Betti numbers alone are reported as consistent,
never as quasi-isomorphic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Mapping, Optional, Sequence

from . import chaincx, fincat, ssets
from .chaincx import (ChainComplex, ChainMap, betti_numbers, compose_maps,
                      direct_sum, hom_complex, hom_postcompose,
                      hom_precompose, identity_map, is_quasi_iso,
                      make_chain_map, power)
from .endkan import (ChainDiagram, ChainDiagramMap, EndChain,
                     bifunctor_diagram, end_chain, end_induced_map, restrict,
                     validate_chain_diagram_map)
from .errors import (DepthExceeded, DiagramError, NotComponentwiseWE,
                     NotLoopFree, ShapeMismatch, TruncationTooShallow,
                     WeightRejected)
from .exactalg import RationalMatrix, rank, solve_matrix
from .fincat import (FinCategory, FunctorData, comma_over,
                     comma_under_functor, cospan_category, is_direct,
                     validate_category)
from .ssets import (SSetMap, Weight, boundary, chains_of_map,
                    check_point_resolution, homology_contractible, nerve,
                    nerve_of_comma_under, nerve_weight, normalized_chains,
                    standard_simplex)


@dataclass
class HolimResult:
    complex: ChainComplex
    betti: dict[int, int]
    provenance: str
    end: Optional[EndChain] = None


# --- simplicial frames ---------------------------------------------------------

class SimplicialFrame:
    """Levels power(Delta^n, c) of the Reedy-fibrant replacement of the
    constant cosimplicial object at c, with restriction maps along the
    injective cofaces."""

    def __init__(self, underlying: ChainComplex, depth: int):
        self.underlying = underlying
        self.depth = depth
        self.simplices = [standard_simplex(n) for n in range(depth + 1)]
        self.levels = [power(K, underlying) for K in self.simplices]
        self._restrictions: dict[tuple, ChainMap] = {}

    def level(self, n: int) -> ChainComplex:
        if n > self.depth:
            raise DepthExceeded(f"frame materialized to depth {self.depth}")
        return self.levels[n]

    def coface_action(self, vertices: tuple[int, ...], n: int) -> ChainMap:
        """Restriction level(n) -> level(m) along the injection with the
        given image vertices (m + 1 of them)."""
        if n > self.depth:
            raise DepthExceeded(f"frame materialized to depth {self.depth}")
        key = (vertices, n)
        got = self._restrictions.get(key)
        if got is None:
            m = len(vertices) - 1
            smap = _simplex_inclusion(self.simplices[m], self.simplices[n],
                                      vertices)
            got = hom_precompose(chains_of_map(smap), self.underlying)
            self._restrictions[key] = got
        return got


def _simplex_inclusion(Ksmall, Kbig, vertices) -> SSetMap:
    mapping = {}
    for k, cells in enumerate(Ksmall.cells):
        for c in cells:
            mapping[(k, c)] = tuple(vertices[v] for v in c)
    return SSetMap(Ksmall, Kbig, mapping)


def fibrant_frame(c: ChainComplex, depth: int) -> SimplicialFrame:
    """Materialize levels 0..depth and verify each unit map
    c -> power(Delta^n, c) is a quasi-isomorphism."""
    frame = SimplicialFrame(c, depth)
    for n in range(depth + 1):
        unit = hom_precompose(ssets.augmentation(frame.simplices[n]), c)
        ok, _ = is_quasi_iso(unit)
        if not ok:
            raise DiagramError(f"unit map into level {n} is not a quasi-iso")
    return frame


def matching_object(frame: SimplicialFrame, n: int):
    """power(boundary of Delta^n, c) with the restriction map from
    level n."""
    if n > frame.depth:
        raise DepthExceeded(f"frame materialized to depth {frame.depth}")
    B, incl = boundary(n)
    M = power(B, frame.underlying)
    mmap = hom_precompose(chains_of_map(incl), frame.underlying)
    return M, mmap


@dataclass(frozen=True)
class ReedyReport:
    per_level: tuple[bool, ...]
    passed: bool


def check_reedy_fibrant(frame: SimplicialFrame, depth: int) -> ReedyReport:
    """Matching maps must be degreewise surjective (the fibrations of
    this model); over Q a failure indicates an implementation bug."""
    verdicts = []
    for n in range(depth + 1):
        M, mmap = matching_object(frame, n)
        ok = True
        for k in M.degrees():
            if rank(mmap.component(k)) != M.dim(k):
                ok = False
        verdicts.append(ok)
    return ReedyReport(tuple(verdicts), all(verdicts))


# --- weighted ends and the Bousfield-Kan formula ---------------------------------

def weighted_end(F: ChainDiagram, W: Weight,
                 generators: Optional[Sequence[int]] = None) -> EndChain:
    """The end over product(opposite(G), G) of
    (x, y) |-> Hom(chains of W(x), F(y))."""
    G = F.base
    if W.base != G:
        raise ShapeMismatch("weight and diagram have different bases")
    NW = [normalized_chains(W.value(x)) for x in G.objects()]
    NW_maps: dict[int, ChainMap] = {}

    def nw_map(m):
        got = NW_maps.get(m)
        if got is None:
            got = chains_of_map(W.action(m))
            NW_maps[m] = got
        return got

    def value_at(x, y):
        return hom_complex(NW[x], F.value(y))

    def action_at(m1, m2):
        pre = hom_precompose(nw_map(m1), F.value(G.src(m2)))
        post = hom_postcompose(NW[G.src(m1)], F.action(m2))
        return compose_maps(post, pre)

    H = bifunctor_diagram(G, value_at, action_at)
    return end_chain(H, generators=generators)


def bk_holim(F: ChainDiagram, W: Optional[Weight] = None) -> HolimResult:
    """Bousfield-Kan homotopy limit: the end of F powered by a
    projectively cofibrant resolution of the point (default: the nerves
    of the slice categories)."""
    G = F.base
    if is_direct(G) is None:
        raise NotLoopFree("bk_holim requires a loop-free base")
    if W is None:
        W = nerve_weight(G)
    report = check_point_resolution(W)
    if not report.passed:
        raise WeightRejected(
            f"weight (provenance {W.provenance!r}) is not a certified "
            f"cofibrant resolution of the point")
    end = weighted_end(F, W)
    return HolimResult(end.complex, betti_numbers(end.complex),
                       f"bousfield-kan end, {W.provenance} weight",
                       end=end)


# --- homotopy pullback ------------------------------------------------------------

def cospan_diagram(p: ChainMap, q: ChainMap) -> ChainDiagram:
    if p.target.dims != q.target.dims:
        raise ShapeMismatch("cospan legs have different targets")
    C = cospan_category()
    values = [p.source, q.source, p.target]
    actions = {C.identity[0]: identity_map(p.source),
               C.identity[1]: identity_map(q.source),
               C.identity[2]: identity_map(p.target),
               C.hom(0, 2)[0]: p,
               C.hom(1, 2)[0]: q}
    return ChainDiagram(C, values, actions)


def mapping_path_complex(p: ChainMap, q: ChainMap) -> ChainComplex:
    """The independent homotopy-pullback oracle: degree k part
    A_k + B_k + C_{k+1}, d(a, b, c) = (da, db, p(a) - q(b) - dc)."""
    A, B, C = p.source, q.source, p.target
    nonzero = [x for x in (A, B) if not x.is_zero()]
    los = [x.lo for x in nonzero] + ([C.lo - 1] if not C.is_zero() else [])
    his = [x.hi for x in nonzero] + ([C.hi - 1] if not C.is_zero() else [])
    if not los:
        return chaincx.ZERO_COMPLEX
    lo, hi = min(los), max(his)
    dims = {k: A.dim(k) + B.dim(k) + C.dim(k + 1) for k in range(lo, hi + 1)}
    diff = {}
    for k in range(lo + 1, hi + 1):
        rows = [[Fraction(0)] * dims[k] for _ in range(dims.get(k - 1, 0))]
        oa, ob, oc = 0, A.dim(k - 1), A.dim(k - 1) + B.dim(k - 1)
        ja, jb, jc = 0, A.dim(k), A.dim(k) + B.dim(k)
        _put(rows, oa, ja, A.d(k))
        _put(rows, ob, jb, B.d(k))
        _put(rows, oc, ja, p.component(k))
        _put(rows, oc, jb, q.component(k).scale(-1))
        _put(rows, oc, jc, C.d(k + 1).scale(-1))
        diff[k] = RationalMatrix(dims.get(k - 1, 0), dims[k],
                                 tuple(tuple(r) for r in rows))
    return chaincx.make_complex(dims, diff)


def _put(rows, r0, c0, blk):
    for i in range(blk.rows):
        row = rows[r0 + i]
        for j in range(blk.cols):
            if blk.entries[i][j]:
                row[c0 + j] = blk.entries[i][j]


@dataclass(frozen=True)
class PullbackReport:
    betti_bk: dict[int, int]
    betti_oracle: dict[int, int]
    passed: bool


def homotopy_pullback(p: ChainMap, q: ChainMap):
    """bk_holim over the cospan, cross-checked against the mapping-path
    oracle; returns (HolimResult, PullbackReport)."""
    F = cospan_diagram(p, q)
    res = bk_holim(F)
    oracle = betti_numbers(mapping_path_complex(p, q))
    rep = PullbackReport(res.betti, oracle, res.betti == oracle)
    res.provenance = "bousfield-kan end over the cospan + mapping-path oracle"
    return res, rep


# --- truncated injective-simplex category and fat totalization ---------------------

@lru_cache(maxsize=None)
def _delta_plus_records(N: int) -> tuple[tuple[int, int, tuple], ...]:
    records = []   # (m, n, image vertices)
    for m in range(N + 1):
        for n in range(m, N + 1):
            for t in combinations(range(n + 1), m + 1):
                records.append((m, n, t))
    return tuple(records)


@lru_cache(maxsize=None)
def delta_plus_category(N: int) -> FinCategory:
    """Injective monotone maps between [0], ..., [N]; a morphism is
    interned by its image vertex tuple."""
    objs = [f"[{n}]" for n in range(N + 1)]
    records = _delta_plus_records(N)
    index = {r: i for i, r in enumerate(records)}
    mor_src = tuple(r[0] for r in records)
    mor_tgt = tuple(r[1] for r in records)
    labels = tuple(f"<{','.join(map(str, t))}>:{m}->{n}"
                   for m, n, t in records)
    identity = tuple(index[(n, n, tuple(range(n + 1)))] for n in range(N + 1))
    table = {}
    for j, (b2, c2, t2) in enumerate(records):
        for i, (a1, b1, t1) in enumerate(records):
            if b1 == b2:
                comp = tuple(t2[v] for v in t1)
                table[(j, i)] = index[(a1, c2, comp)]
    C = FinCategory(N + 1, tuple(objs), mor_src, mor_tgt, labels, identity,
                    table)
    return validate_category(C)


def delta_plus_vertices(C: FinCategory, m: int) -> tuple[int, ...]:
    """Recover the image tuple of a morphism of delta_plus_category."""
    return _delta_plus_records(C.n_objects - 1)[m][2]


def cosimplicial_from_cofaces(levels: Sequence[ChainComplex],
                              cofaces: Mapping[tuple[int, int], ChainMap]) \
        -> ChainDiagram:
    """Build the diagram over delta_plus_category from coface maps
    cofaces[(n, i)] : X^{n-1} -> X^n, verifying the coface identities."""
    N = len(levels) - 1
    for n in range(1, N):
        for j in range(n + 2):
            for i in range(j):
                lhs = compose_maps(cofaces[(n + 1, j)], cofaces[(n, i)])
                rhs = compose_maps(cofaces[(n + 1, i)], cofaces[(n, j - 1)])
                for k in levels[n - 1].degrees():
                    if lhs.component(k) != rhs.component(k):
                        raise DiagramError(
                            f"coface identity fails at (n={n}, i={i}, j={j})")
    C = delta_plus_category(N)

    def action(m):
        a, b = C.src(m), C.tgt(m)
        if a == b:
            return identity_map(levels[a])
        t = delta_plus_vertices(C, m)
        missing = sorted(set(range(b + 1)) - set(t), reverse=True)
        # delta^{i_1} o ... o delta^{i_r} with i_1 > ... > i_r
        out = None
        dim = a
        for i in reversed(missing):
            step = cofaces[(dim + 1, i)]
            out = step if out is None else compose_maps(step, out)
            dim += 1
        return out

    return ChainDiagram(C, list(levels), action)


def constant_cosimplicial(c: ChainComplex, N: int) -> ChainDiagram:
    ident = identity_map(c)
    return cosimplicial_from_cofaces(
        [c] * (N + 1), {(n, i): ident for n in range(1, N + 1)
                        for i in range(n + 1)})


def cosimplicial_replacement(F: ChainDiagram, N: int) -> ChainDiagram:
    """X^n = product over chains [n] -> G (identities allowed) of the
    value at the last object, with the usual cofaces."""
    G = F.base
    chains: list[list[tuple]] = [[(x,) for x in G.objects()]]
    for n in range(1, N + 1):
        nxt = []
        for c in chains[-1]:
            last = c[0] if n == 1 else G.tgt(c[-1])
            if n == 1:
                for m in G.morphisms():
                    if G.src(m) == c[0]:
                        nxt.append((c[0], m))
            else:
                for m in G.morphisms():
                    if G.src(m) == last:
                        nxt.append(c + (m,))
        chains.append(nxt)

    def last_obj(c):
        return c[0] if len(c) == 1 else G.tgt(c[-1])

    def face_chain(c, i):
        """c o delta^i for a chain of length n >= 1."""
        n = len(c) - 1
        if i == 0:
            if n == 1:
                return (G.tgt(c[1]),)
            return (G.tgt(c[1]),) + c[2:]
        if i == n:
            return c[:-1]
        return c[:i] + (G.comp(c[i + 1], c[i]),) + c[i + 2:]

    levels, index = [], []
    for n in range(N + 1):
        S, _, _ = direct_sum([F.value(last_obj(c)) for c in chains[n]])
        levels.append(S)
        index.append({c: i for i, c in enumerate(chains[n])})
    cofaces = {}
    for n in range(1, N + 1):
        dims_src = [F.value(last_obj(c)) for c in chains[n - 1]]
        for i in range(n + 1):
            comps = {}
            for k in levels[n - 1].degrees():
                rows = [[Fraction(0)] * levels[n - 1].dim(k)
                        for _ in range(levels[n].dim(k))]
                r0 = 0
                for c in chains[n]:
                    src_c = face_chain(c, i)
                    ci = index[n - 1][src_c]
                    c0 = sum(dims_src[j].dim(k) for j in range(ci))
                    if i == n:
                        blk = F.action(c[-1]).component(k)
                    else:
                        blk = RationalMatrix.identity(
                            F.value(last_obj(c)).dim(k))
                    _put(rows, r0, c0, blk)
                    r0 += F.value(last_obj(c)).dim(k)
                comps[k] = RationalMatrix(levels[n].dim(k),
                                          levels[n - 1].dim(k),
                                          tuple(tuple(r) for r in rows))
            cofaces[(n, i)] = make_chain_map(levels[n - 1], levels[n], comps,
                                             check=False)
    return cosimplicial_from_cofaces(levels, cofaces)


@dataclass
class FatTotResult(HolimResult):
    truncation: int = 0
    stable_from: int = 0

    def betti_at(self, k: int) -> int:
        if k < self.stable_from:
            raise TruncationTooShallow(k, self.stable_from)
        return self.betti.get(k, 0)


def fat_tot(X: ChainDiagram) -> FatTotResult:
    """Fat totalization: the end over the truncated injective-simplex
    category of power(Delta^n, X^n), cross-checked against the direct
    double-complex totalization.

    Homology is final in degrees >= max_n hi(X^n) - N + 1: level n only
    reaches total degree k when lo(X^n) - n <= k <= hi(X^n) - n."""
    C = X.base
    N = C.n_objects - 1
    if C != delta_plus_category(N):
        raise ShapeMismatch(
            "fat_tot expects a diagram over delta_plus_category(N)")
    simplices = [standard_simplex(n) for n in range(N + 1)]
    chains = [normalized_chains(K) for K in simplices]

    def value_at(m, n):
        return hom_complex(chains[m], X.value(n))

    smap_cache: dict[int, ChainMap] = {}

    def chain_map_of(m1):
        got = smap_cache.get(m1)
        if got is None:
            a, b = C.src(m1), C.tgt(m1)
            t = delta_plus_vertices(C, m1)
            got = chains_of_map(_simplex_inclusion(simplices[a],
                                                   simplices[b], t))
            smap_cache[m1] = got
        return got

    def action_at(m1, m2):
        pre = hom_precompose(chain_map_of(m1), X.value(C.src(m2)))
        post = hom_postcompose(chains[C.src(m1)], X.action(m2))
        return compose_maps(post, pre)

    H = bifunctor_diagram(C, value_at, action_at)
    end = end_chain(H)
    betti = betti_numbers(end.complex)
    his = [X.value(n).hi for n in range(N + 1) if not X.value(n).is_zero()]
    stable_from = (max(his) - N + 1) if his else end.complex.lo
    # independent route: the double complex of top-cell blocks
    columns = [X.value(n) for n in range(N + 1)]
    cofaces = {}
    for n in range(1, N + 1):
        for i in range(n + 1):
            t = tuple(v for v in range(n + 1) if v != i)
            m = None
            for mm in C.morphisms():
                if C.src(mm) == n - 1 and C.tgt(mm) == n and \
                        delta_plus_vertices(C, mm) == t:
                    m = mm
                    break
            cofaces[(n, i)] = X.action(m)

    def horizontal(n, q):
        if n + 1 > N:
            return None
        cols_n = columns[n]
        if not cols_n.dim(q):
            return None
        out = RationalMatrix.zero(columns[n + 1].dim(q), cols_n.dim(q))
        for i in range(n + 2):
            blk = cofaces[(n + 1, i)].component(q)
            blk = blk.scale(-1 if i % 2 else 1)
            out = out + blk
        sign = -1 if (q - n - 1) % 2 else 1
        return out.scale(sign)

    T = chaincx.product_total(columns, horizontal)
    if betti_numbers(T) != betti:
        raise DiagramError(
            "fat totalization end disagrees with the double complex")
    return FatTotResult(end.complex, betti,
                        f"fat totalization, truncation {N}",
                        end=end, truncation=N, stable_from=stable_from)


# --- homotopy-initial functors -----------------------------------------------------

@dataclass(frozen=True)
class InitialReport:
    per_object: tuple[bool, ...]
    passed: bool


def check_homotopy_initial(f: FunctorData) -> InitialReport:
    """Homology-level certificate: every comma nerve N(f over g') must be
    nonempty and homology-contractible."""
    if is_direct(f.source) is None or is_direct(f.target) is None:
        raise NotLoopFree("homotopy-initiality needs loop-free categories")
    verdicts = []
    for gp in f.target.objects():
        K = nerve(comma_under_functor(f, gp).cat)
        if K.is_empty():
            verdicts.append(False)
        else:
            verdicts.append(homology_contractible(K))
    return InitialReport(tuple(verdicts), all(verdicts))


def _collapse_chain_map(f: FunctorData, under: fincat.Comma,
                        over: fincat.Comma, K_under, K_over) -> ChainMap:
    """Chains of N(f over g') -> chains of N(G' over g'): apply f to a
    comma chain; cells whose image chain contains an identity step die
    (their image simplex is degenerate)."""
    G, Gp = f.source, f.target
    over_obj = {a: i for i, a in enumerate(over.object_keys)}
    over_mor = {over.mor_key(m): m for m in over.cat.morphisms()}
    A = normalized_chains(K_under)
    B = normalized_chains(K_over)

    def obj_image(i):
        gamma, alpha = under.object_keys[i]
        return over_obj[alpha]

    comps = {}
    for n, cells in enumerate(K_under.cells):
        if not cells:
            continue
        rows = [[Fraction(0)] * len(cells)
                for _ in range(len(K_over.n_cells(n)))]
        for j, c in enumerate(cells):
            if n == 0:
                rows[K_over.cell_index(0, obj_image(c))][j] += Fraction(1)
                continue
            image = []
            alive = True
            for mhat in c:
                i1, i2, m = under.mor_key(mhat)
                fm = f.morphism_map[m]
                if Gp.is_identity(fm):
                    alive = False
                    break
                image.append(over_mor[(obj_image(i1), obj_image(i2), fm)])
            if alive:
                rows[K_over.cell_index(n, tuple(image))][j] += Fraction(1)
        comps[n] = RationalMatrix(len(K_over.n_cells(n)), len(cells),
                                  tuple(tuple(r) for r in rows))
    return make_chain_map(A, B, comps, check=True)


def _relift_sset_map(f: FunctorData, over: fincat.Comma,
                     under_f: fincat.Comma, K_over, K_under) -> SSetMap:
    """N(G over g) -> N(f over f(g)): keep the chain, push augmentations
    through f.  No collapse can occur: the underlying morphisms are
    unchanged."""
    G, Gp = f.source, f.target
    under_obj = {key: i for i, key in enumerate(under_f.object_keys)}
    under_mor = {under_f.mor_key(m): m for m in under_f.cat.morphisms()}

    def obj_image(i):
        beta = over.object_keys[i]          # beta: x -> g in G
        x = G.src(beta)
        return under_obj[(x, f.morphism_map[beta])]

    mapping = {}
    for c in K_over.n_cells(0):
        mapping[(0, c)] = obj_image(c)
    for n in range(1, len(K_over.cells)):
        for c in K_over.n_cells(n):
            image = []
            for mhat in c:
                i1, i2, m = over.mor_key(mhat)
                image.append(under_mor[(obj_image(i1), obj_image(i2), m)])
            mapping[(n, c)] = tuple(image)
    return ssets.make_sset_map(K_over, K_under, mapping)


@dataclass
class ChangeOfDiagramsReport:
    dims_over_source: dict[int, int]
    dims_over_target: dict[int, int]
    iso: bool

    @property
    def passed(self) -> bool:
        return self.iso and self.dims_over_source == self.dims_over_target


def _change_of_diagrams(f: FunctorData, F: ChainDiagram):
    """Both sides of the change-of-diagrams lemma with the explicit
    basis-level isomorphism Theta between them.

    Returns (E_comma, E_restricted, Theta, report): E_comma is the end
    over the target weighted by N(f over -), E_restricted the end over
    the source of f*F weighted by the nerve weight."""
    G, Gp = f.source, f.target
    if is_direct(G) is None or is_direct(Gp) is None:
        raise NotLoopFree("change of diagrams needs loop-free categories")
    V = nerve_of_comma_under(f)
    E2 = weighted_end(F, V)
    Frest = restrict(f, F)
    WG = nerve_weight(G)
    E3 = weighted_end(Frest, WG)
    # blocks of Theta: project to the f(g) component and precompose with
    # the relift N(G over g) -> N(f over f(g))
    under_commas = [comma_under_functor(f, gp) for gp in Gp.objects()]
    over_commas = [comma_over(G, g) for g in G.objects()]
    NV = [normalized_chains(V.value(gp)) for gp in Gp.objects()]
    comps = {}
    for k in E2.complex.degrees():
        if not E2.complex.dim(k) and not E3.complex.dim(k):
            continue
        rows = [[Fraction(0)] * E2.sum_complex.dim(k)
                for _ in range(E3.sum_complex.dim(k))]
        r0 = 0
        for g in G.objects():
            fg = f.object_map[g]
            lam = _relift_sset_map(f, over_commas[g], under_commas[fg],
                                   WG.value(g), V.value(fg))
            blk = hom_precompose(chains_of_map(lam),
                                 F.value(fg)).component(k)
            c0 = sum(hom_complex(NV[gp], F.value(gp)).dim(k)
                     for gp in range(fg))
            _put(rows, r0, c0, blk)
            r0 += blk.rows
        big = RationalMatrix(E3.sum_complex.dim(k), E2.sum_complex.dim(k),
                             tuple(tuple(r) for r in rows))
        X = solve_matrix(E3.inclusion.component(k),
                         big * E2.inclusion.component(k))
        if X is None:
            raise DiagramError("change-of-diagrams map does not restrict")
        comps[k] = X
    theta = make_chain_map(E2.complex, E3.complex, comps, check=True)
    iso = all(theta.component(k).rows == theta.component(k).cols and
              rank(theta.component(k)) == theta.component(k).rows
              for k in set(E2.complex.degrees()) | set(E3.complex.degrees()))
    report = ChangeOfDiagramsReport(
        {k: E3.complex.dim(k) for k in E3.complex.degrees() if E3.complex.dim(k)},
        {k: E2.complex.dim(k) for k in E2.complex.degrees() if E2.complex.dim(k)},
        iso)
    return E2, E3, theta, report


def change_of_diagrams_iso(f: FunctorData, F: ChainDiagram) \
        -> ChangeOfDiagramsReport:
    _, _, _, report = _change_of_diagrams(f, F)
    return report


@dataclass
class ComparisonReport:
    quasi_iso: bool
    change_of_diagrams_ok: bool
    betti_full: dict[int, int]
    betti_restricted: dict[int, int]


def comparison_map(f: FunctorData, F: ChainDiagram):
    """The comparison holim over the target -> holim over the source of
    the restriction, built from the weight transformation
    N(f over -) -> N(G' over -) followed by the change-of-diagrams
    isomorphism; reports whether it is a quasi-isomorphism."""
    G, Gp = f.source, f.target
    if is_direct(G) is None or is_direct(Gp) is None:
        raise NotLoopFree("comparison needs loop-free categories")
    if F.base != Gp:
        raise ShapeMismatch("diagram must live over the target of f")
    Wp = nerve_weight(Gp)
    E1 = weighted_end(F, Wp)
    V = nerve_of_comma_under(f)
    under_commas = [comma_under_functor(f, gp) for gp in Gp.objects()]
    over_commas = [comma_over(Gp, gp) for gp in Gp.objects()]
    E2, E3, theta, cod_report = _change_of_diagrams(f, F)
    comps = []
    for gp in Gp.objects():
        tau = _collapse_chain_map(f, under_commas[gp], over_commas[gp],
                                  V.value(gp), Wp.value(gp))
        comps.append(hom_precompose(tau, F.value(gp)))
    comp12 = end_induced_map(E1, E2, comps)
    full = compose_maps(theta, comp12)
    ok, _ = is_quasi_iso(full)
    report = ComparisonReport(
        ok, cod_report.passed,
        betti_numbers(E1.complex), betti_numbers(E3.complex))
    return full, report


# --- homotopy invariance -----------------------------------------------------------

@dataclass(frozen=True)
class InvarianceReport:
    quasi_iso: bool
    betti_source: dict[int, int]
    betti_target: dict[int, int]


def holim_we_invariance(alpha: ChainDiagramMap) -> InvarianceReport:
    """A componentwise quasi-isomorphism F => G must induce a
    quasi-isomorphism bk_holim(F) -> bk_holim(G)."""
    G = alpha.source.base
    validate_chain_diagram_map(alpha)
    for x in G.objects():
        ok, _ = is_quasi_iso(alpha.component(x))
        if not ok:
            raise NotComponentwiseWE(
                f"component at object {x} is not a quasi-isomorphism")
    W = nerve_weight(G)
    NW = [normalized_chains(W.value(x)) for x in G.objects()]
    E_F = weighted_end(alpha.source, W)
    E_G = weighted_end(alpha.target, W)
    comps = [hom_postcompose(NW[x], alpha.component(x)) for x in G.objects()]
    induced = end_induced_map(E_F, E_G, comps)
    ok, _ = is_quasi_iso(induced)
    return InvarianceReport(ok, betti_numbers(E_F.complex),
                            betti_numbers(E_G.complex))
