from pathlib import Path

import pytest

import holim_engine.cli as cli_mod
from holim_engine.chaincx import betti_numbers
from holim_engine.dsl import parse, pretty_print
from holim_engine.errors import (DSquareNonzero, NotLoopFree, ParseError,
                                 UnknownBinding)

CORPUS = Path(cli_mod.__file__).parent / "corpus"


ARROW_SRC = """
category C {
  objects: a, b
  arrows: f: a -> b
}
"""


def test_parse_arrow_category_with_composite():
    ws = parse("""
category C {
  objects: a, b, c
  arrows: f: a -> b, g: b -> c
}
""")
    C = ws.get("C", "category").value
    # identities + f + g + the auto-named composite g.f
    assert C.n_morphisms == 6
    assert "g.f" in C.mor_labels


def test_parse_relations_quotient():
    ws = parse("""
category C {
  objects: a, b, c
  arrows: f: a -> b, g: b -> c, h: a -> c
  relations: g.f = h
}
""")
    C = ws.get("C", "category").value
    # the composite g.f is identified with h: 3 identities + 3 arrows
    assert C.n_morphisms == 6
    f = C.mor_labels.index("f")
    g = C.mor_labels.index("g")
    h = C.mor_labels.index("h")
    assert C.comp(g, f) == h


def test_parse_rejects_cyclic_generators_without_table():
    with pytest.raises(NotLoopFree):
        parse("""
category M {
  objects: x
  arrows: e: x -> x
}
""")


def test_parse_table_mode_allows_loops():
    ws = parse("""
category M {
  objects: x
  arrows: e: x -> x
  compose: e * e = id_x
}
""")
    M = ws.get("M", "category").value
    e = M.mor_labels.index("e")
    assert M.comp(e, e) == M.identity[0]


def test_parse_complex_and_d_square_error():
    ws = parse("""
complex K {
  degrees: 0..1
  dim 0: 2
  dim 1: 1
  d 1: [[1], [-1]]
}
""")
    K = ws.get("K", "complex").value
    assert dict(K.dims) == {0: 2, 1: 1}
    with pytest.raises(DSquareNonzero) as exc:
        parse("""
complex Bad {
  degrees: 0..2
  dim 0: 1
  dim 1: 1
  dim 2: 1
  d 1: [[1]]
  d 2: [[1]]
}
""")
    assert "Bad" in str(exc.value)


def test_unicode_minus_accepted():
    ws = parse("complex K { degrees: 0..1; dim 0: 1; dim 1: 1; "
               "d 1: [[−2]] }")
    K = ws.get("K", "complex").value
    assert K.d(1).entries[0][0] == -2


def test_parse_diagram_actions_derived():
    ws = parse("""
category C {
  objects: a, b, c
  arrows: f: a -> b, g: b -> c
}
diagram S over C into FinSet {
  at a: {x, y}
  at b: {u}
  at c: {w, z}
  on f: x -> u, y -> u
  on g: u -> w
}
""")
    S = ws.get("S", "diagram_finset").value
    C = S.base
    gf = C.mor_labels.index("g.f")
    assert S.actions[gf] == {"x": "w", "y": "w"}


def test_parse_functor_and_missing_entries():
    ws = parse(ARROW_SRC + """
category T { objects: t }
functor i : T -> C { t => a }
""")
    F = ws.get("i", "functor").value
    assert F.object_map == (0,)
    with pytest.raises(UnknownBinding):
        parse(ARROW_SRC + """
category T { objects: t }
functor j : T -> C { }
""")


def test_unknown_binding_and_duplicates():
    with pytest.raises(UnknownBinding):
        parse("diagram D over Nope into FinSet { }")
    with pytest.raises(ParseError):
        parse("category C { objects: a }\ncategory C { objects: b }")


def test_syntax_error_carries_position():
    with pytest.raises(ParseError) as exc:
        parse("category C %")
    assert "line" in str(exc.value)


def _chain_diagrams_equal(D1, D2):
    if D1.base != D2.base:
        return False
    for x in D1.base.objects():
        if D1.value(x) != D2.value(x):
            return False
    for m in D1.base.morphisms():
        if D1.action(m) != D2.action(m):
            return False
    return True


@pytest.mark.parametrize("name", ["arrow.hle", "cospan.hle", "hom_end.hle"])
def test_roundtrip_corpus(name):
    src = (CORPUS / name).read_text()
    ws1 = parse(src)
    printed = pretty_print(ws1)
    ws2 = parse(printed)
    assert ws1.order == ws2.order
    for nm in ws1.order:
        b1, b2 = ws1.bindings[nm], ws2.bindings[nm]
        assert b1.kind == b2.kind
        if b1.kind == "diagram_ch":
            assert _chain_diagrams_equal(b1.value, b2.value)
        else:
            assert b1.value == b2.value
    # printing is idempotent
    assert pretty_print(ws2) == printed


def test_roundtrip_product_base():
    src = (CORPUS / "hom_end.hle").read_text()
    ws = parse(src)
    H = ws.get("H", "diagram_finset").value
    assert H.base.n_objects == 4
    printed = pretty_print(ws)
    assert "over op(C) * C" in printed


def test_corpus_loop_diagram_value():
    ws = parse((CORPUS / "cospan.hle").read_text())
    loop = ws.get("Loop", "diagram_ch").value
    assert loop.value(0).is_zero()
    assert betti_numbers(loop.value(2)) == {0: 1}


def test_semantic_error_names_binding_and_line():
    src = """complex Good { degrees: 0..0; dim 0: 1 }

complex Bad {
  degrees: 0..2
  dim 0: 1
  dim 1: 1
  dim 2: 1
  d 1: [[1]]
  d 2: [[1]]
}
"""
    with pytest.raises(DSquareNonzero) as exc:
        parse(src)
    msg = str(exc.value)
    assert "Bad" in msg and "line 3" in msg


def test_chain_rule_violation_in_diagram():
    from holim_engine.errors import ChainRuleViolation
    src = """
category C { objects: a, b; arrows: f: a -> b }
complex K { degrees: 0..1; dim 0: 1; dim 1: 1; d 1: [[1]] }
complex L { degrees: 0..1; dim 0: 1; dim 1: 1; d 1: [[0]] }
diagram D over C into Ch {
  at a: K
  at b: L
  on f: deg 0: [[1]], deg 1: [[1]]
}
"""
    with pytest.raises(ChainRuleViolation) as exc:
        parse(src)
    assert "D" in str(exc.value)


def test_functor_label_ambiguity_rejected():
    src = """
category C { objects: f, b; arrows: f: f -> b }
functor G : C -> C { f => f; b => b }
"""
    with pytest.raises(ParseError):
        parse(src)
