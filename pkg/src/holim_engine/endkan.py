"""Limits, colimits, ends, coends and Kan extensions.

FinSet-valued diagrams are eager tables; chain-valued diagrams carry
lazily memoized action maps because bifunctors over product categories
grow quadratically in morphisms.

Ends are computed by the equalizer formula: the equalizer of the two
maps  prod_g H(g, g) => prod_f H(src f, tgt f)  given by pushing along
f in the covariant slot and pulling along f in the contravariant slot.
Equalizing over a generating set of morphisms suffices: for a genuine
bifunctor the condition for a composite follows from the conditions for
its factors by the interchange law.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

from .chaincx import (ChainComplex, ChainMap, compose_maps, direct_sum,
                      subcomplex_from_kernels, validate_map)
from .errors import DiagramError, ShapeMismatch
from .exactalg import RationalMatrix, rank_kernel
from .fincat import (Comma, FinCategory, FunctorData, comma_from,
                     comma_under_functor, generating_morphisms, opposite,
                     product, product_mor, product_obj)


# --- finite-set diagrams ------------------------------------------------------

@dataclass(frozen=True)
class FinSetDiagram:
    base: FinCategory
    values: tuple[tuple, ...]
    actions: Mapping[int, dict]

    def value(self, x: int) -> tuple:
        return self.values[x]

    def action(self, m: int) -> dict:
        return self.actions[m]


def validate_finset_diagram(F: FinSetDiagram) -> FinSetDiagram:
    C = F.base
    if len(F.values) != C.n_objects:
        raise DiagramError("diagram lacks values for some objects")
    for x in C.objects():
        if len(set(F.values[x])) != len(F.values[x]):
            raise DiagramError(f"value at object {x} has repeated elements")
    for m in C.morphisms():
        a = F.actions.get(m)
        if a is None:
            raise DiagramError(f"diagram lacks an action for morphism {m}")
        sx, tx = C.src(m), C.tgt(m)
        if set(a.keys()) != set(F.values[sx]):
            raise DiagramError(f"action of morphism {m} has wrong domain")
        for v in a.values():
            if v not in set(F.values[tx]):
                raise DiagramError(f"action of morphism {m} leaves the target")
    for x in C.objects():
        ide = F.actions[C.identity[x]]
        if any(ide[e] != e for e in F.values[x]):
            raise DiagramError(f"identity action at object {x} is not id")
    for (g, f), h in C.compose_table.items():
        ag, af, ah = F.actions[g], F.actions[f], F.actions[h]
        for e in F.values[C.src(f)]:
            if ag[af[e]] != ah[e]:
                raise DiagramError(
                    f"diagram not functorial on the pair ({g}, {f})")
    return F


def constant_finset_diagram(C: FinCategory, elements) -> FinSetDiagram:
    elements = tuple(elements)
    act = {e: e for e in elements}
    return FinSetDiagram(C, tuple(elements for _ in C.objects()),
                         {m: dict(act) for m in C.morphisms()})


def representable_finset_diagram(C: FinCategory, o: int) -> FinSetDiagram:
    """Hom(o, -) with postcomposition actions."""
    values = tuple(tuple(C.hom(o, x)) for x in C.objects())
    actions = {m: {a: C.comp(m, a) for a in values[C.src(m)]}
               for m in C.morphisms()}
    return FinSetDiagram(C, values, actions)


@dataclass(frozen=True)
class LimitResult:
    elements: tuple[tuple, ...]   # tuples indexed by object order

    def project(self, obj: int, element: tuple):
        return element[obj]


@dataclass(frozen=True)
class ColimitResult:
    classes: tuple[tuple, ...]    # each class: sorted tuple of (obj, elem)
    injections: Mapping[tuple, int]

    def inject(self, obj: int, elem) -> int:
        return self.injections[(obj, elem)]


def finset_limit(F: FinSetDiagram) -> LimitResult:
    """Tuples in the product satisfying every action equation,
    enumerated in lexicographic (object index, element index) order."""
    C = F.base
    gens = generating_morphisms(C)
    by_stage: dict[int, list[int]] = {}
    for m in gens:
        by_stage.setdefault(max(C.src(m), C.tgt(m)), []).append(m)
    out: list[tuple] = []
    partial: list = []

    def ok(stage: int) -> bool:
        for m in by_stage.get(stage, ()):
            if F.actions[m][partial[C.src(m)]] != partial[C.tgt(m)]:
                return False
        return True

    def extend(stage: int):
        if stage == C.n_objects:
            out.append(tuple(partial))
            return
        for e in F.values[stage]:
            partial.append(e)
            if ok(stage):
                extend(stage + 1)
            partial.pop()

    extend(0)
    return LimitResult(tuple(out))


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller representative for determinism
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def finset_colimit(F: FinSetDiagram) -> ColimitResult:
    """Disjoint union quotiented by the congruence generated by the
    action identifications (union-find)."""
    C = F.base
    items = [(x, e) for x in C.objects() for e in F.values[x]]
    order = {it: i for i, it in enumerate(items)}
    uf = _UnionFind(range(len(items)))
    for m in generating_morphisms(C):
        sx, tx = C.src(m), C.tgt(m)
        for e in F.values[sx]:
            uf.union(order[(sx, e)], order[(tx, F.actions[m][e])])
    roots: dict[int, list] = {}
    for it, i in order.items():
        roots.setdefault(uf.find(i), []).append(it)
    classes = tuple(tuple(sorted(mem, key=lambda it: order[it]))
                    for _, mem in sorted(roots.items()))
    injections = {it: ci for ci, mem in enumerate(classes) for it in mem}
    return ColimitResult(classes, injections)


# --- finite-set ends and coends -----------------------------------------------

def _split_product_base(P: FinCategory) -> FinCategory:
    if P.product_of is None:
        raise DiagramError("end requires a diagram over a product category")
    left, right = P.product_of
    if opposite(right) != left:
        raise DiagramError(
            "end requires the base product(opposite(G), G)")
    return right


def hom_bifunctor(F: FinSetDiagram, G: FinSetDiagram) -> FinSetDiagram:
    """Hom(F-, G-) over product(opposite(base), base); an element of
    H(x, y) is the tuple of images (in F.value(x) order) of a function
    F(x) -> G(y)."""
    if F.base != G.base:
        raise DiagramError("Hom bifunctor needs diagrams over one base")
    C = F.base
    P = product(opposite(C), C)

    def functions(x, y):
        fx, gy = F.values[x], G.values[y]
        if not fx:
            return ((),)
        out = [()]
        for _ in fx:
            out = [t + (e,) for t in out for e in gy]
        return tuple(out)

    values = []
    for x in C.objects():
        for y in C.objects():
            values.append(functions(x, y))
    f_index = [{e: i for i, e in enumerate(F.values[x])}
               for x in C.objects()]
    actions = {}
    for m1 in C.morphisms():        # contravariant slot (morphism of op)
        for m2 in C.morphisms():    # covariant slot
            x_src, y_src = C.tgt(m1), C.src(m2)
            x_tgt = C.src(m1)
            a1, a2 = F.actions[m1], G.actions[m2]
            act = {}
            for t in functions(x_src, y_src):
                img = tuple(a2[t[f_index[x_src][a1[e]]]]
                            for e in F.values[x_tgt])
                act[t] = img
            actions[product_mor(P, m1, m2)] = act
    return FinSetDiagram(P, tuple(values), actions)


def end_finset(H: FinSetDiagram) -> tuple[tuple, ...]:
    """The end of a bifunctor over product(opposite(G), G): families
    (x_g) with f_*(x_g) = f^*(x_g') for every f: g -> g'."""
    P = H.base
    G = _split_product_base(P)
    gens = generating_morphisms(G)
    by_stage: dict[int, list[int]] = {}
    for f in gens:
        by_stage.setdefault(max(G.src(f), G.tgt(f)), []).append(f)
    diag = [H.value(product_obj(P, g, g)) for g in G.objects()]
    push = {f: H.action(product_mor(P, G.identity[G.src(f)], f))
            for f in gens}
    pull = {f: H.action(product_mor(P, f, G.identity[G.tgt(f)]))
            for f in gens}
    out: list[tuple] = []
    partial: list = []

    def ok(stage: int) -> bool:
        for f in by_stage.get(stage, ()):
            if push[f][partial[G.src(f)]] != pull[f][partial[G.tgt(f)]]:
                return False
        return True

    def extend(stage: int):
        if stage == G.n_objects:
            out.append(tuple(partial))
            return
        for e in diag[stage]:
            partial.append(e)
            if ok(stage):
                extend(stage + 1)
            partial.pop()

    extend(0)
    return tuple(out)


def coend_finset(H: FinSetDiagram) -> ColimitResult:
    """Coequalizer of the dual pair, as classes of the diagonal union."""
    P = H.base
    G = _split_product_base(P)
    items = [(g, e) for g in G.objects()
             for e in H.value(product_obj(P, g, g))]
    order = {it: i for i, it in enumerate(items)}
    uf = _UnionFind(range(len(items)))
    for f in generating_morphisms(G):
        s, t = G.src(f), G.tgt(f)
        # for u in H(t, s): H(f, s)(u) ~ H(t, f)(u)
        pull = H.action(product_mor(P, f, G.identity[s]))
        push = H.action(product_mor(P, G.identity[t], f))
        for u in H.value(product_obj(P, t, s)):
            uf.union(order[(s, pull[u])], order[(t, push[u])])
    roots: dict[int, list] = {}
    for it, i in order.items():
        roots.setdefault(uf.find(i), []).append(it)
    classes = tuple(tuple(sorted(mem, key=lambda it: order[it]))
                    for _, mem in sorted(roots.items()))
    injections = {it: ci for ci, mem in enumerate(classes) for it in mem}
    return ColimitResult(classes, injections)


def nat_trans_bruteforce(F: FinSetDiagram, G: FinSetDiagram) -> tuple[tuple, ...]:
    """All natural transformations F => G by enumeration of component
    families filtered by the naturality squares; the independent oracle
    for ends of Hom bifunctors."""
    if F.base != G.base:
        raise DiagramError("diagrams must share the base")
    C = F.base
    gens = generating_morphisms(C)
    by_stage: dict[int, list[int]] = {}
    for m in gens:
        by_stage.setdefault(max(C.src(m), C.tgt(m)), []).append(m)
    f_index = [{e: i for i, e in enumerate(F.values[x])} for x in C.objects()]

    def candidates(x):
        fx, gx = F.values[x], G.values[x]
        out = [()]
        for _ in fx:
            out = [t + (e,) for t in out for e in gx]
        return out

    out: list[tuple] = []
    partial: list = []

    def natural(stage: int) -> bool:
        for m in by_stage.get(stage, ()):
            sx, tx = C.src(m), C.tgt(m)
            am_f, am_g = F.actions[m], G.actions[m]
            for e in F.values[sx]:
                lhs = partial[tx][f_index[tx][am_f[e]]]
                rhs = am_g[partial[sx][f_index[sx][e]]]
                if lhs != rhs:
                    return False
        return True

    def extend(stage: int):
        if stage == C.n_objects:
            out.append(tuple(partial))
            return
        for comp in candidates(stage):
            partial.append(comp)
            if natural(stage):
                extend(stage + 1)
            partial.pop()

    extend(0)
    return tuple(out)


# --- Kan extensions -----------------------------------------------------------

@dataclass(frozen=True)
class KanExtension:
    diagram: FinSetDiagram
    commas: tuple[Comma, ...]
    details: tuple


def lan(f: FunctorData, F: FinSetDiagram) -> KanExtension:
    """Left Kan extension: pointwise colimit over the comma (f over g')."""
    G, Gp = f.source, f.target
    if F.base != G:
        raise DiagramError("diagram is not over the source of the functor")
    commas = [comma_under_functor(f, gp) for gp in Gp.objects()]
    colims = []
    for com in commas:
        vals = tuple(F.values[x] for x, _ in com.object_keys)
        acts = {m: F.actions[com.projection.morphism_map[m]]
                for m in com.cat.morphisms()}
        colims.append(finset_colimit(FinSetDiagram(com.cat, vals, acts)))
    values = tuple(tuple(range(len(col.classes))) for col in colims)
    actions = {}
    for u in Gp.morphisms():
        s, t = Gp.src(u), Gp.tgt(u)
        com_s, com_t = commas[s], commas[t]
        tgt_keys = {k: i for i, k in enumerate(com_t.object_keys)}
        act = {}
        for ci, members in enumerate(colims[s].classes):
            i, x = members[0]
            gamma, alpha = com_s.object_keys[i]
            j = tgt_keys[(gamma, Gp.comp(u, alpha))]
            act[ci] = colims[t].inject(j, x)
        actions[u] = act
    return KanExtension(FinSetDiagram(Gp, values, actions), tuple(commas),
                        tuple(colims))


def ran(f: FunctorData, F: FinSetDiagram) -> KanExtension:
    """Right Kan extension: pointwise limit over the comma (g' under f)."""
    G, Gp = f.source, f.target
    if F.base != G:
        raise DiagramError("diagram is not over the source of the functor")
    commas = [comma_from(f, gp) for gp in Gp.objects()]
    lims = []
    for com in commas:
        vals = tuple(F.values[x] for x, _ in com.object_keys)
        acts = {m: F.actions[com.projection.morphism_map[m]]
                for m in com.cat.morphisms()}
        lims.append(finset_limit(FinSetDiagram(com.cat, vals, acts)))
    values = tuple(tuple(lim.elements) for lim in lims)
    actions = {}
    for u in Gp.morphisms():
        s, t = Gp.src(u), Gp.tgt(u)
        com_s, com_t = commas[s], commas[t]
        src_keys = {k: i for i, k in enumerate(com_s.object_keys)}
        act = {}
        for el in lims[s].elements:
            img = tuple(el[src_keys[(gamma, Gp.comp(beta, u))]]
                        for gamma, beta in com_t.object_keys)
            act[el] = img
        actions[u] = act
    return KanExtension(FinSetDiagram(Gp, values, actions), tuple(commas),
                        tuple(lims))


def restrict(f: FunctorData, F):
    """Precompose a diagram with a functor: (f*F)(g) = F(f(g))."""
    if isinstance(F, FinSetDiagram):
        if F.base != f.target:
            raise ShapeMismatch("diagram is not over the target of the functor")
        return FinSetDiagram(
            f.source,
            tuple(F.values[f.object_map[x]] for x in f.source.objects()),
            {m: F.actions[f.morphism_map[m]] for m in f.source.morphisms()})
    if isinstance(F, ChainDiagram):
        if F.base != f.target:
            raise ShapeMismatch("diagram is not over the target of the functor")
        return ChainDiagram(
            f.source,
            [F.value(f.object_map[x]) for x in f.source.objects()],
            lambda m: F.action(f.morphism_map[m]))
    raise ShapeMismatch("restrict expects a FinSet or chain diagram")


def lan_via_coend(f: FunctorData, F: FinSetDiagram) -> KanExtension:
    """Left Kan extension by the coend formula
    Lan_f F (g') = coend over g of Hom(f g, g') x F(g)."""
    G, Gp = f.source, f.target
    P = product(opposite(G), G)
    coends, bifs = [], []
    for gp in Gp.objects():
        values = []
        for x in G.objects():
            homs = Gp.hom(f.object_map[x], gp)
            for y in G.objects():
                values.append(tuple((a, e) for a in homs
                                    for e in F.values[y]))
        actions = {}
        for m1 in G.morphisms():
            for m2 in G.morphisms():
                x_src = G.tgt(m1)
                y_src = G.src(m2)
                fm1 = f.morphism_map[m1]
                act = {}
                for (a, e) in values[product_obj(P, x_src, y_src)]:
                    act[(a, e)] = (Gp.comp(a, fm1), F.actions[m2][e])
                actions[product_mor(P, m1, m2)] = act
        H = FinSetDiagram(P, tuple(values), actions)
        bifs.append(H)
        coends.append(coend_finset(H))
    values_out = tuple(tuple(range(len(col.classes))) for col in coends)
    actions_out = {}
    for u in Gp.morphisms():
        s, t = Gp.src(u), Gp.tgt(u)
        act = {}
        for ci, members in enumerate(coends[s].classes):
            g, (a, e) = members[0]
            act[ci] = coends[t].inject(g, (Gp.comp(u, a), e))
        actions_out[u] = act
    return KanExtension(FinSetDiagram(Gp, values_out, actions_out), (),
                        tuple(coends))


def ran_via_end(f: FunctorData, F: FinSetDiagram) -> KanExtension:
    """Right Kan extension by the end formula
    Ran_f F (g') = end over g of F(g)^(Hom(g', f g))."""
    G, Gp = f.source, f.target
    P = product(opposite(G), G)
    ends, homs_all = [], []
    for gp in Gp.objects():
        homs = [tuple(Gp.hom(gp, f.object_map[x])) for x in G.objects()]
        homs_all.append(homs)

        def functions(x, y):
            out = [()]
            for _ in homs[x]:
                out = [t + (e,) for t in out for e in F.values[y]]
            return tuple(out)

        values = []
        for x in G.objects():
            for y in G.objects():
                values.append(functions(x, y))
        h_index = [{a: i for i, a in enumerate(homs[x])}
                   for x in G.objects()]
        actions = {}
        for m1 in G.morphisms():
            for m2 in G.morphisms():
                x_src, x_tgt = G.tgt(m1), G.src(m1)
                y_src = G.src(m2)
                fm1 = f.morphism_map[m1]
                a2 = F.actions[m2]
                act = {}
                for t in values[product_obj(P, x_src, y_src)]:
                    act[t] = tuple(
                        a2[t[h_index[x_src][Gp.comp(fm1, b)]]]
                        for b in homs[x_tgt])
                actions[product_mor(P, m1, m2)] = act
        ends.append(end_finset(FinSetDiagram(P, tuple(values), actions)))
    values_out = tuple(tuple(e) for e in ends)
    actions_out = {}
    for u in Gp.morphisms():
        s, t = Gp.src(u), Gp.tgt(u)
        act = {}
        for fam in ends[s]:
            img = []
            for x in G.objects():
                img.append(tuple(
                    fam[x][homs_all[s][x].index(Gp.comp(b, u))]
                    for b in homs_all[t][x]))
            act[fam] = tuple(img)
        actions_out[u] = act
    return KanExtension(FinSetDiagram(Gp, values_out, actions_out), (),
                        tuple(ends))


@dataclass(frozen=True)
class CoYonedaReport:
    passed: bool
    end_size: int
    value_size: int


def co_yoneda_check(G_diag: FinSetDiagram, f: FunctorData,
                    gamma: int) -> CoYonedaReport:
    """Exhibits the bijection G(f gamma) = end over g' of
    G(g')^(Hom(f gamma, g'))."""
    Gp = G_diag.base
    if f.target != Gp:
        raise DiagramError("functor target must be the diagram base")
    o = f.object_map[gamma]
    P = product(opposite(Gp), Gp)
    homs = [tuple(Gp.hom(o, x)) for x in Gp.objects()]
    h_index = [{a: i for i, a in enumerate(homs[x])} for x in Gp.objects()]

    def functions(x, y):
        out = [()]
        for _ in homs[x]:
            out = [t + (e,) for t in out for e in G_diag.values[y]]
        return tuple(out)

    values = []
    for x in Gp.objects():
        for y in Gp.objects():
            values.append(functions(x, y))
    actions = {}
    for m1 in Gp.morphisms():
        for m2 in Gp.morphisms():
            x_src, x_tgt = Gp.tgt(m1), Gp.src(m1)
            y_src = Gp.src(m2)
            a2 = G_diag.actions[m2]
            act = {}
            for t in values[product_obj(P, x_src, y_src)]:
                act[t] = tuple(a2[t[h_index[x_src][Gp.comp(m1, b)]]]
                               for b in homs[x_tgt])
            actions[product_mor(P, m1, m2)] = act
    end = end_finset(FinSetDiagram(P, tuple(values), actions))
    end_set = set(end)
    # canonical map: g |-> (beta |-> G(beta)(g)) per object
    images = []
    ok = True
    for g in G_diag.values[o]:
        fam = tuple(tuple(G_diag.actions[b][g] for b in homs[x])
                    for x in Gp.objects())
        if fam not in end_set:
            ok = False
        images.append(fam)
    if len(set(images)) != len(images) or len(images) != len(end):
        ok = False
    return CoYonedaReport(ok, len(end), len(G_diag.values[o]))


# --- chain-valued diagrams ----------------------------------------------------

class ChainDiagram:
    """A chain-complex-valued diagram; `action` may be a table or a
    callable (memoized) so bifunctors over product bases stay lazy."""

    def __init__(self, base: FinCategory, values, action):
        self.base = base
        self._values = list(values)
        if callable(action):
            self._action_fn: Optional[Callable[[int], ChainMap]] = action
            self._actions: dict[int, ChainMap] = {}
        else:
            self._action_fn = None
            self._actions = dict(action)

    def value(self, x: int) -> ChainComplex:
        return self._values[x]

    def action(self, m: int) -> ChainMap:
        got = self._actions.get(m)
        if got is None:
            if self._action_fn is None:
                raise DiagramError(f"diagram lacks an action for morphism {m}")
            got = self._action_fn(m)
            self._actions[m] = got
        return got


def validate_chain_diagram(D: ChainDiagram) -> ChainDiagram:
    C = D.base
    for m in C.morphisms():
        a = D.action(m)
        if a.source.dims != D.value(C.src(m)).dims or \
                a.target.dims != D.value(C.tgt(m)).dims:
            raise DiagramError(f"action of morphism {m} has wrong shape")
        validate_map(a)
    for x in C.objects():
        ide = D.action(C.identity[x])
        V = D.value(x)
        for k in V.degrees():
            if V.dim(k) and ide.component(k) != \
                    RationalMatrix.identity(V.dim(k)):
                raise DiagramError(f"identity action at object {x} is not id")
    for (g, f), h in C.compose_table.items():
        lhs = compose_maps(D.action(g), D.action(f))
        rhs = D.action(h)
        for k in D.value(C.src(f)).degrees():
            if lhs.component(k) != rhs.component(k):
                raise DiagramError(
                    f"chain diagram not functorial on the pair ({g}, {f})")
    return D


@dataclass
class ChainDiagramMap:
    """A natural transformation of chain diagrams."""
    source: ChainDiagram
    target: ChainDiagram
    components: Mapping[int, ChainMap]

    def component(self, x: int) -> ChainMap:
        return self.components[x]


def validate_chain_diagram_map(a: ChainDiagramMap) -> ChainDiagramMap:
    C = a.source.base
    if a.target.base != C:
        raise DiagramError("natural transformation needs one base")
    for m in C.morphisms():
        lhs = compose_maps(a.component(C.tgt(m)), a.source.action(m))
        rhs = compose_maps(a.target.action(m), a.component(C.src(m)))
        for k in a.source.value(C.src(m)).degrees():
            if lhs.component(k) != rhs.component(k):
                raise DiagramError(f"naturality fails at morphism {m}")
    return a


# --- chain ends ---------------------------------------------------------------

@dataclass
class EndChain:
    complex: ChainComplex
    inclusion: ChainMap            # into the sum of diagonal values
    sum_complex: ChainComplex
    projections: list[ChainMap]    # end -> H(g, g), by object of G
    base: FinCategory              # G


def end_chain(H: ChainDiagram, generators: Optional[Sequence[int]] = None,
              check_dinaturality: bool = True) -> EndChain:
    """End of a chain bifunctor over product(opposite(G), G): the
    degreewise kernel of (pushforward - pullback) between the sums of
    diagonal values and of per-condition values."""
    P = H.base
    G = _split_product_base(P)
    gens = list(generating_morphisms(G) if generators is None else generators)
    diag = [H.value(product_obj(P, g, g)) for g in G.objects()]
    S, s_incls, s_projs = direct_sum(diag)
    push = [H.action(product_mor(P, G.identity[G.src(f)], f)) for f in gens]
    pull = [H.action(product_mor(P, f, G.identity[G.tgt(f)])) for f in gens]
    targets = [p.target for p in push]
    kernels: dict[int, RationalMatrix] = {}
    for k in S.degrees():
        if not S.dim(k):
            continue
        rows: list[tuple] = []
        for i, f in enumerate(gens):
            t_dim = targets[i].dim(k)
            if not t_dim:
                continue
            s, t = G.src(f), G.tgt(f)
            mp = push[i].component(k)
            ml = pull[i].component(k)
            off_s = sum(diag[x].dim(k) for x in range(s))
            off_t = sum(diag[x].dim(k) for x in range(t))
            for r in range(t_dim):
                row = [Fraction(0)] * S.dim(k)
                for j in range(mp.cols):
                    v = mp.entries[r][j]
                    if v:
                        row[off_s + j] += v
                for j in range(ml.cols):
                    v = ml.entries[r][j]
                    if v:
                        row[off_t + j] -= v
                rows.append(tuple(row))
        M = RationalMatrix(len(rows), S.dim(k), tuple(rows))
        _, basis = rank_kernel(M)
        kernels[k] = RationalMatrix.from_columns(basis, S.dim(k))
    E, incl = subcomplex_from_kernels(S, kernels)
    projections = [compose_maps(pr, incl) for pr in s_projs]
    if check_dinaturality:
        for i, f in enumerate(gens):
            s, t = G.src(f), G.tgt(f)
            lhs = compose_maps(push[i], projections[s])
            rhs = compose_maps(pull[i], projections[t])
            for k in E.degrees():
                if lhs.component(k) != rhs.component(k):
                    raise DiagramError(
                        f"end wedge does not commute at morphism {f}")
    return EndChain(E, incl, S, projections, G)


def bifunctor_diagram(G: FinCategory, value_at: Callable[[int, int], ChainComplex],
                      action_at: Callable[[int, int], ChainMap]) -> ChainDiagram:
    """Assemble a lazy ChainDiagram over product(opposite(G), G) from a
    value callback (x, y) and an action callback on morphism pairs."""
    P = product(opposite(G), G)
    nG = G.n_objects

    def value(i):
        return value_at(i // nG, i % nG)

    values = [value(i) for i in range(P.n_objects)]

    def action(m):
        m1, m2 = divmod(m, G.n_morphisms)
        return action_at(m1, m2)

    return ChainDiagram(P, values, action)


def end_induced_map(src: EndChain, tgt: EndChain,
                    comps: Sequence[ChainMap]) -> ChainMap:
    """The map of ends induced by per-object maps of diagonal values
    that commute with both equalizer legs."""
    from .exactalg import solve_matrix
    components = {}
    for k in src.complex.degrees():
        if not src.complex.dim(k):
            continue
        rows_out: list[list] = [[Fraction(0)] * src.sum_complex.dim(k)
                                for _ in range(tgt.sum_complex.dim(k))]
        off_s = off_t = 0
        for x, c in enumerate(comps):
            m = c.component(k)
            for i in range(m.rows):
                for j in range(m.cols):
                    if m.entries[i][j]:
                        rows_out[off_t + i][off_s + j] = m.entries[i][j]
            off_s += m.cols
            off_t += m.rows
        big = RationalMatrix(tgt.sum_complex.dim(k), src.sum_complex.dim(k),
                             tuple(tuple(r) for r in rows_out))
        X = solve_matrix(tgt.inclusion.component(k),
                         big * src.inclusion.component(k))
        if X is None:
            raise DiagramError("induced map does not restrict to the end")
        components[k] = X
    return ChainMap(src.complex, tgt.complex, components)


def hom_set_bifunctor(C: FinCategory) -> FinSetDiagram:
    """Hom(-, -) over product(opposite(C), C); elements are morphism ids."""
    P = product(opposite(C), C)
    values = tuple(tuple(C.hom(x, y)) for x in C.objects()
                   for y in C.objects())
    actions = {}
    for m1 in C.morphisms():
        for m2 in C.morphisms():
            act = {a: C.comp(C.comp(m2, a), m1)
                   for a in C.hom(C.tgt(m1), C.src(m2))}
            actions[product_mor(P, m1, m2)] = act
    return FinSetDiagram(P, values, actions)


# --- agreement of the two Kan extension formulas --------------------------------

def lan_agreement(f: FunctorData, F: FinSetDiagram) -> bool:
    """The canonical bijection between the comma-colimit and coend forms
    of the left Kan extension, checked elementwise and naturally."""
    ke = lan(f, F)
    kc = lan_via_coend(f, F)
    Gp = f.target
    bijections = []
    for gp in Gp.objects():
        col = ke.details[gp]
        coe = kc.details[gp]
        if len(col.classes) != len(coe.classes):
            return False
        bij = {}
        for ci, members in enumerate(col.classes):
            images = set()
            for i, x in members:
                gamma, alpha = ke.commas[gp].object_keys[i]
                images.add(coe.inject(gamma, (alpha, x)))
            if len(images) != 1:
                return False
            bij[ci] = images.pop()
        if len(set(bij.values())) != len(bij):
            return False
        bijections.append(bij)
    for u in Gp.morphisms():
        s, t = Gp.src(u), Gp.tgt(u)
        for ci in range(len(ke.details[s].classes)):
            lhs = bijections[t][ke.diagram.actions[u][ci]]
            rhs = kc.diagram.actions[u][bijections[s][ci]]
            if lhs != rhs:
                return False
    return True


def ran_agreement(f: FunctorData, F: FinSetDiagram) -> bool:
    """The canonical bijection between the comma-limit and end forms of
    the right Kan extension."""
    ke = ran(f, F)
    re_ = ran_via_end(f, F)
    G, Gp = f.source, f.target
    bijections = []
    for gp in Gp.objects():
        homs = [tuple(Gp.hom(gp, f.object_map[x])) for x in G.objects()]
        lim_set = {el: i for i, el in enumerate(ke.details[gp].elements)}
        fams = re_.details[gp]
        if len(fams) != len(lim_set):
            return False
        bij = {}
        seen = set()
        for fam in fams:
            el = tuple(fam[gamma][homs[gamma].index(beta)]
                       for gamma, beta in ke.commas[gp].object_keys)
            if el not in lim_set or el in seen:
                return False
            seen.add(el)
            bij[fam] = el
        bijections.append(bij)
    for u in Gp.morphisms():
        s, t = Gp.src(u), Gp.tgt(u)
        for fam in re_.details[s]:
            lhs = bijections[t][re_.diagram.actions[u][fam]]
            rhs = ke.diagram.actions[u][bijections[s][fam]]
            if lhs != rhs:
                return False
    return True


# --- Fubini ---------------------------------------------------------------------

@dataclass(frozen=True)
class FubiniReport:
    dims_joint: dict
    dims_first_inner: dict
    dims_second_inner: dict
    subspaces_equal: bool
    differentials_equal: bool

    @property
    def passed(self) -> bool:
        return (self.dims_joint == self.dims_first_inner ==
                self.dims_second_inner and self.subspaces_equal and
                self.differentials_equal)


def _canonical_subcomplex(ambient: ChainComplex, incl: ChainMap):
    """Canonical (RREF) basis of the embedded subcomplex and the
    differential rewritten in that basis."""
    from .exactalg import canonical_row_basis, solve_matrix
    bases, dims = {}, {}
    for k in ambient.degrees():
        m = incl.component(k)
        if not m.cols:
            continue
        rows = canonical_row_basis([m.column(j) for j in range(m.cols)],
                                   ambient.dim(k))
        if rows:
            bases[k] = RationalMatrix.from_columns(rows, ambient.dim(k))
            dims[k] = len(rows)
    diffs = {}
    for k in sorted(bases):
        if (k - 1) in bases:
            X = solve_matrix(bases[k - 1], ambient.d(k) * bases[k])
            if X is None:
                raise DiagramError("canonical basis is not a subcomplex")
            diffs[k] = X
        elif not (ambient.d(k) * bases[k]).is_zero():
            raise DiagramError("canonical basis is not a subcomplex")
    return dims, bases, diffs


def fubini_check(H: ChainDiagram, G1: FinCategory,
                 G2: FinCategory) -> FubiniReport:
    """Ends over a product base in both iterated orders and jointly;
    all three must be the identical subcomplex of the diagonal sum, with
    identical differentials in the canonical basis."""
    PP = product(G1, G2)
    P = H.base
    if P.product_of is None or P.product_of[1] != PP:
        raise DiagramError("fubini_check needs a diagram over "
                           "product(opposite(G1 x G2), G1 x G2)")
    n1, n2 = G1.n_objects, G2.n_objects
    nm1, nm2 = G1.n_morphisms, G2.n_morphisms

    def pp_obj(g, d):
        return g * n2 + d

    def pp_mor(u, v):
        return u * nm2 + v

    joint = end_chain(H)

    def inner_over_second(gm, gp):
        P2 = product(opposite(G2), G2)
        values = [H.value(product_obj(P, pp_obj(gm, i // n2),
                                      pp_obj(gp, i % n2)))
                  for i in range(P2.n_objects)]

        def action(m):
            m2m, m2p = divmod(m, nm2)
            return H.action(product_mor(
                P, pp_mor(G1.identity[gm], m2m), pp_mor(G1.identity[gp], m2p)))

        return end_chain(ChainDiagram(P2, values, action))

    def inner_over_first(dm, dp):
        P1 = product(opposite(G1), G1)
        values = [H.value(product_obj(P, pp_obj(i // n1, dm),
                                      pp_obj(i % n1, dp)))
                  for i in range(P1.n_objects)]

        def action(m):
            m1m, m1p = divmod(m, nm1)
            return H.action(product_mor(
                P, pp_mor(m1m, G2.identity[dm]), pp_mor(m1p, G2.identity[dp])))

        return end_chain(ChainDiagram(P1, values, action))

    def outer_end(Gout, Gin, inner, cross_action):
        """inner[(a, b)] for objects of Gout; returns the outer EndChain
        plus the per-object inner results on the diagonal."""
        Pout = product(opposite(Gout), Gout)
        inner_all = {}
        for a in Gout.objects():
            for b in Gout.objects():
                inner_all[(a, b)] = inner(a, b)
        values = [inner_all[(i // Gout.n_objects,
                             i % Gout.n_objects)].complex
                  for i in range(Pout.n_objects)]

        def action(m):
            mm, mp = divmod(m, Gout.n_morphisms)
            srcpair = (Gout.tgt(mm), Gout.src(mp))
            tgtpair = (Gout.src(mm), Gout.tgt(mp))
            comps = [cross_action(mm, mp, d) for d in Gin.objects()]
            return end_induced_map(inner_all[srcpair], inner_all[tgtpair],
                                   comps)

        E = end_chain(ChainDiagram(Pout, values, action))
        return E, [inner_all[(g, g)] for g in Gout.objects()]

    E_a, inners_a = outer_end(
        G1, G2, inner_over_second,
        lambda mm, mp, d: H.action(product_mor(
            P, pp_mor(mm, G2.identity[d]), pp_mor(mp, G2.identity[d]))))
    E_b, inners_b = outer_end(
        G2, G1, inner_over_first,
        lambda mm, mp, g: H.action(product_mor(
            P, pp_mor(G1.identity[g], mm), pp_mor(G1.identity[g], mp))))

    ambient = joint.sum_complex
    # embed both iterated ends into the joint diagonal sum
    def total_inclusion(outer: EndChain, inners, major_first: bool):
        comps = {}
        for k in outer.complex.degrees():
            if not outer.complex.dim(k):
                continue
            n_rows = ambient.dim(k)
            out_m = outer.inclusion.component(k)
            rows = [[Fraction(0)] * out_m.rows for _ in range(n_rows)]
            # row offset of the (g, d) diagonal block in the joint sum
            def joint_off(g, d):
                off = 0
                for gg in range(n1):
                    for dd in range(n2):
                        if (gg, dd) == (g, d):
                            return off
                        off += H.value(product_obj(
                            P, pp_obj(gg, dd), pp_obj(gg, dd))).dim(k)
                raise AssertionError

            col_off = 0
            for pos, inn in enumerate(inners):
                m = inn.inclusion.component(k)
                # rows of m are blocks over the inner base objects
                inner_off = 0
                for d2 in range(len(inn.projections)):
                    blk_dim = inn.projections[d2].target.dim(k)
                    g, d = (pos, d2) if major_first else (d2, pos)
                    jo = joint_off(g, d)
                    for i in range(blk_dim):
                        for j in range(m.cols):
                            v = m.entries[inner_off + i][j]
                            if v:
                                rows[jo + i][col_off + j] = v
                    inner_off += blk_dim
                col_off += m.cols
            # compose: outer coords -> inner coords -> joint ambient
            big = RationalMatrix(n_rows, out_m.rows,
                                 tuple(tuple(r) for r in rows))
            comps[k] = big * out_m
        return ChainMap(outer.complex, ambient, comps)

    incl_a = total_inclusion(E_a, inners_a, major_first=True)
    incl_b = total_inclusion(E_b, inners_b, major_first=False)
    dims_j, bas_j, dif_j = _canonical_subcomplex(ambient, joint.inclusion)
    dims_a, bas_a, dif_a = _canonical_subcomplex(ambient, incl_a)
    dims_b, bas_b, dif_b = _canonical_subcomplex(ambient, incl_b)
    sub_eq = bas_j == bas_a == bas_b
    dif_eq = dif_j == dif_a == dif_b
    return FubiniReport(dims_j, dims_a, dims_b, sub_eq, dif_eq)
