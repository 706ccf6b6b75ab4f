"""Command dispatch and the `holim-engine` entry point.

Exit codes: 0 = success / all checks passed, 1 = computation error,
2 = a verification verdict failed.  JSON output is deterministic:
sorted keys, fixed separators, newline-terminated.  The environment
variable HOLIM_ENGINE_THREADS caps the number of workers used by the
`verify` suites; items are reported in submission order either way.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from . import chaincx, dsl, endkan, fincat, holim, randgen, ssets
from .chaincx import betti_numbers
from .endkan import (coend_finset, end_chain, end_finset, finset_colimit,
                     finset_limit, lan, lan_agreement, nat_trans_bruteforce,
                     ran, ran_agreement, co_yoneda_check, hom_bifunctor)
from .errors import EngineError, TypeMismatch, UnknownBinding
from .fincat import comma_over, find_terminal, is_direct, opposite
from .ssets import check_point_resolution, nerve, nerve_weight

USAGE_COMMANDS = ("end", "coend", "lim", "colim", "lan", "ran", "nerve",
                  "homology", "holim", "hopullback", "fattot", "hoinitial",
                  "compare-holim", "verify")


@dataclass
class Report:
    command: str
    human: str
    payload: dict
    verdict: Optional[str] = None

    @property
    def exit_code(self) -> int:
        return 0 if self.verdict in (None, "pass") else 2


def _betti_json(betti: dict[int, int]) -> dict[str, int]:
    return {str(k): v for k, v in sorted(betti.items())}


def _fmt_elem(e) -> str:
    if isinstance(e, tuple):
        return "(" + ",".join(_fmt_elem(x) for x in e) + ")"
    return str(e)


def run_command(ws: dsl.Workspace, command: str, depth: int = 4,
                seed: int = 0) -> Report:
    parts = shlex.split(command)
    if not parts:
        raise TypeMismatch("empty command")
    cmd, args = parts[0], parts[1:]
    if cmd not in USAGE_COMMANDS:
        raise TypeMismatch(f"unknown command {cmd!r}; commands: "
                           f"{', '.join(USAGE_COMMANDS)}")
    handler = {
        "end": _cmd_end, "coend": _cmd_coend, "lim": _cmd_lim,
        "colim": _cmd_colim, "lan": _cmd_lan, "ran": _cmd_ran,
        "nerve": _cmd_nerve, "homology": _cmd_homology,
        "holim": _cmd_holim, "hopullback": _cmd_hopullback,
        "fattot": _cmd_fattot, "hoinitial": _cmd_hoinitial,
        "compare-holim": _cmd_compare_holim, "verify": _cmd_verify,
    }[cmd]
    return handler(ws, args, depth=depth, seed=seed)


def _one_arg(args, cmd):
    if len(args) != 1:
        raise TypeMismatch(f"{cmd} expects exactly one binding name")
    return args[0]


def _cmd_end(ws, args, **kw):
    name = _one_arg(args, "end")
    b = ws.bindings.get(name)
    if b is None:
        raise UnknownBinding(f"no binding named {name!r}")
    if b.kind == "diagram_finset":
        elems = end_finset(b.value)
        return Report("end",
                      f"{len(elems)} elements\n" +
                      "\n".join("  " + _fmt_elem(e) for e in elems),
                      {"command": "end", "size": len(elems),
                       "elements": [_fmt_elem(e) for e in elems]})
    if b.kind == "diagram_ch":
        E = end_chain(b.value)
        betti = betti_numbers(E.complex)
        return Report("end", f"end complex betti: {betti}",
                      {"command": "end", "betti": _betti_json(betti)})
    raise TypeMismatch(f"end expects a diagram, got {b.kind}")


def _cmd_coend(ws, args, **kw):
    name = _one_arg(args, "coend")
    b = ws.get(name, "diagram_finset")
    col = coend_finset(b.value)
    return Report(
        "coend",
        f"{len(col.classes)} classes\n" +
        "\n".join("  {" + ", ".join(_fmt_elem(e) for e in cl) + "}"
                  for cl in col.classes),
        {"command": "coend", "size": len(col.classes),
         "classes": [[_fmt_elem(e) for e in cl] for cl in col.classes]})


def _cmd_lim(ws, args, **kw):
    name = _one_arg(args, "lim")
    b = ws.get(name, "diagram_finset")
    lim = finset_limit(b.value)
    return Report("lim",
                  f"{len(lim.elements)} elements\n" +
                  "\n".join("  " + _fmt_elem(e) for e in lim.elements),
                  {"command": "lim", "size": len(lim.elements),
                   "elements": [_fmt_elem(e) for e in lim.elements]})


def _cmd_colim(ws, args, **kw):
    name = _one_arg(args, "colim")
    b = ws.get(name, "diagram_finset")
    col = finset_colimit(b.value)
    return Report(
        "colim",
        f"{len(col.classes)} classes",
        {"command": "colim", "size": len(col.classes),
         "classes": [[_fmt_elem(e) for e in cl] for cl in col.classes]})


def _kan(ws, args, which, op):
    if len(args) != 2:
        raise TypeMismatch(f"{which} expects: {which} FUNCTOR DIAGRAM")
    f = ws.get(args[0], "functor").value
    D = ws.get(args[1], "diagram_finset").value
    ke = op(f, D)
    sizes = {f.target.obj_labels[x]: len(ke.diagram.values[x])
             for x in f.target.objects()}
    human = "\n".join(f"  at {lab}: {n} elements"
                      for lab, n in sorted(sizes.items()))
    return Report(which, human,
                  {"command": which, "sizes": dict(sorted(sizes.items()))})


def _cmd_lan(ws, args, **kw):
    return _kan(ws, args, "lan", lan)


def _cmd_ran(ws, args, **kw):
    return _kan(ws, args, "ran", ran)


def _cmd_nerve(ws, args, **kw):
    name = _one_arg(args, "nerve")
    C = ws.get(name, "category").value
    K = nerve(C)
    counts = {str(n): len(cs) for n, cs in enumerate(K.cells)}
    human = "\n".join(f"  dimension {n}: {len(cs)} cells"
                      for n, cs in enumerate(K.cells))
    return Report("nerve", human, {"command": "nerve", "cells": counts})


def _cmd_homology(ws, args, **kw):
    name = _one_arg(args, "homology")
    C = ws.get(name, "complex").value
    betti = betti_numbers(C)
    return Report("homology", f"betti: {betti}",
                  {"command": "homology", "betti": _betti_json(betti)})


def _cmd_holim(ws, args, **kw):
    name = _one_arg(args, "holim")
    D = ws.get(name, "diagram_ch").value
    res = holim.bk_holim(D)
    return Report("holim",
                  f"betti: {res.betti}\nprovenance: {res.provenance}",
                  {"command": "holim", "betti": _betti_json(res.betti),
                   "provenance": res.provenance})


def _cospan_legs(D):
    C = D.base
    nonid = C.non_identities()
    if C.n_objects != 3 or len(nonid) != 2:
        raise TypeMismatch("hopullback expects a diagram over a cospan")
    f, g = sorted(nonid, key=lambda m: C.src(m))
    if C.tgt(f) != C.tgt(g) or C.src(f) == C.src(g):
        raise TypeMismatch("hopullback expects a diagram over a cospan")
    return D.action(f), D.action(g)


def _cmd_hopullback(ws, args, **kw):
    name = _one_arg(args, "hopullback")
    D = ws.get(name, "diagram_ch").value
    p, q = _cospan_legs(D)
    res, rep = holim.homotopy_pullback(p, q)
    verdict = "pass" if rep.passed else "fail"
    return Report(
        "hopullback",
        f"betti: {res.betti}\noracle betti: {rep.betti_oracle}\n"
        f"oracle agreement: {verdict}",
        {"command": "hopullback", "betti": _betti_json(res.betti),
         "oracle_betti": _betti_json(rep.betti_oracle),
         "provenance": res.provenance, "verdict": verdict},
        verdict=verdict)


def _cmd_fattot(ws, args, depth=4, **kw):
    name = _one_arg(args, "fattot")
    D = ws.get(name, "diagram_ch").value
    X = holim.cosimplicial_replacement(D, depth)
    res = holim.fat_tot(X)
    # degrees below the stable range are truncation artifacts; report
    # only what the truncation bound certifies
    stable = {k: v for k, v in res.betti.items() if k >= res.stable_from}
    return Report(
        "fattot",
        f"betti: {stable}\nstable for degrees >= {res.stable_from}\n"
        f"provenance: {res.provenance}",
        {"command": "fattot", "betti": _betti_json(stable),
         "stable_from": res.stable_from, "truncation": res.truncation,
         "provenance": res.provenance})


def _cmd_hoinitial(ws, args, **kw):
    name = _one_arg(args, "hoinitial")
    f = ws.get(name, "functor").value
    rep = holim.check_homotopy_initial(f)
    verdict = "pass" if rep.passed else "fail"
    lines = [f"  at {f.target.obj_labels[x]}: "
             f"{'contractible' if ok else 'NOT contractible'}"
             for x, ok in enumerate(rep.per_object)]
    return Report("hoinitial", "\n".join(lines + [verdict]),
                  {"command": "hoinitial", "verdict": verdict,
                   "per_object": {f.target.obj_labels[x]: ok
                                  for x, ok in enumerate(rep.per_object)}},
                  verdict=verdict)


def _cmd_compare_holim(ws, args, **kw):
    if len(args) != 2:
        raise TypeMismatch("compare-holim expects: compare-holim FUNCTOR "
                           "DIAGRAM")
    f = ws.get(args[0], "functor").value
    D = ws.get(args[1], "diagram_ch").value
    cmap, rep = holim.comparison_map(f, D)
    verdict = "pass" if rep.quasi_iso else "fail"
    return Report(
        "compare-holim",
        f"holim over target betti: {rep.betti_full}\n"
        f"holim of restriction betti: {rep.betti_restricted}\n"
        f"comparison quasi-isomorphism: {verdict}",
        {"command": "compare-holim", "verdict": verdict,
         "betti_target": _betti_json(rep.betti_full),
         "betti_restricted": _betti_json(rep.betti_restricted),
         "change_of_diagrams_ok": rep.change_of_diagrams_ok},
        verdict=verdict)


# --- verify suites -----------------------------------------------------------------

def _suite_bindings(ws, rng):
    for name in ws.order:
        b = ws.bindings[name]

        def check(b=b):
            if b.kind == "category":
                fincat.validate_category(b.value)
            elif b.kind == "complex":
                chaincx.validate_complex(b.value)
            elif b.kind == "diagram_ch":
                endkan.validate_chain_diagram(b.value)
            elif b.kind == "diagram_finset":
                endkan.validate_finset_diagram(b.value)
            elif b.kind == "functor":
                fincat.validate_functor(b.value)
            return True, ""

        yield f"validate {b.kind} {name}", check


def _suite_categories(ws, rng):
    for name in ws.order:
        b = ws.bindings[name]
        if b.kind != "category":
            continue
        C = b.value

        def check_op(C=C):
            ok = opposite(opposite(C)) == C
            return ok, "" if ok else "opposite is not an involution"

        yield f"opposite involution {name}", check_op
        if is_direct(C) is not None:
            def check_commas(C=C):
                for g in C.objects():
                    com = comma_over(C, g)
                    if find_terminal(com.cat) is None:
                        return False, f"comma over {C.obj_labels[g]} " \
                            f"has no terminal object"
                    K = nerve(com.cat)
                    if not ssets.homology_contractible(K):
                        return False, f"comma nerve at {C.obj_labels[g]} " \
                            f"not contractible"
                return True, ""

            yield f"comma nerves {name}", check_commas


def _suite_weights(ws, rng):
    for name in ws.order:
        b = ws.bindings[name]
        if b.kind != "category" or is_direct(b.value) is None:
            continue

        def check(C=b.value):
            rep = check_point_resolution(nerve_weight(C))
            return rep.passed, "" if rep.passed else "resolution rejected"

        yield f"nerve weight resolves the point {name}", check


def _suite_holim(ws, rng):
    for name in ws.order:
        b = ws.bindings[name]
        if b.kind != "diagram_ch" or is_direct(b.value.base) is None:
            continue

        def check(D=b.value):
            res = holim.bk_holim(D)
            W = nerve_weight(D.base)
            bound = sum(D.value(g).total_dim() * W.value(g).total_cells()
                        for g in D.base.objects())
            if res.complex.total_dim() > bound:
                return False, "dimension bound exceeded"
            return True, ""

        yield f"bousfield-kan computes {name}", check
        try:
            _cospan_legs(b.value)
        except TypeMismatch:
            continue

        def check_oracle(D=b.value):
            p, q = _cospan_legs(D)
            _, rep = holim.homotopy_pullback(p, q)
            return rep.passed, "" if rep.passed else \
                f"oracle mismatch: {rep.betti_bk} vs {rep.betti_oracle}"

        yield f"pullback oracle {name}", check_oracle


def _suite_random(ws, rng):
    def end_vs_bruteforce(i):
        def check():
            r = random.Random(rng.randrange(2 ** 32))
            C, F, G = randgen.random_finset_pair(r, cap=3000)
            end = end_finset(hom_bifunctor(F, G))
            brute = nat_trans_bruteforce(F, G)
            ok = len(end) == len(brute)
            return ok, "" if ok else f"{len(end)} != {len(brute)}"
        return check

    def kan_agreements(i):
        def check():
            r = random.Random(rng.randrange(2 ** 32))
            f = randgen.random_functor_between_loopfree(r)
            F = randgen.random_finset_diagram(r, f.source, max_size=2)
            ok = lan_agreement(f, F) and ran_agreement(f, F)
            return ok, "" if ok else "formula disagreement"
        return check

    def pullback_oracle(i):
        def check():
            r = random.Random(rng.randrange(2 ** 32))
            D = randgen.random_cospan_diagram(r, max_dim=2, max_width=2)
            p, q = _cospan_legs(D)
            _, rep = holim.homotopy_pullback(p, q)
            return rep.passed, "" if rep.passed else "oracle mismatch"
        return check

    def coyoneda(i):
        def check():
            r = random.Random(rng.randrange(2 ** 32))
            f = randgen.random_functor_between_loopfree(r)
            G = randgen.random_finset_diagram(r, f.target, max_size=2)
            rep = co_yoneda_check(G, f, r.randrange(f.source.n_objects))
            return rep.passed, "" if rep.passed else "bijection failed"
        return check

    for i in range(5):
        yield f"random end vs enumeration #{i}", end_vs_bruteforce(i)
    for i in range(3):
        yield f"random kan formula agreement #{i}", kan_agreements(i)
    for i in range(3):
        yield f"random pullback oracle #{i}", pullback_oracle(i)
    for i in range(2):
        yield f"random co-yoneda #{i}", coyoneda(i)


_SUITES = {"bindings": (_suite_bindings,),
           "categories": (_suite_categories,),
           "weights": (_suite_weights,),
           "holim": (_suite_holim,),
           "random": (_suite_random,),
           "all": (_suite_bindings, _suite_categories, _suite_weights,
                   _suite_holim, _suite_random)}


def _cmd_verify(ws, args, seed=0, **kw):
    suite_name = args[0] if args else "all"
    if suite_name not in _SUITES:
        raise TypeMismatch(f"unknown suite {suite_name!r}; suites: "
                           f"{', '.join(sorted(_SUITES))}")
    rng = random.Random(seed)
    items = []
    for gen in _SUITES[suite_name]:
        items.extend(gen(ws, rng))
    threads = max(1, int(os.environ.get("HOLIM_ENGINE_THREADS", "1")))

    def run_item(item):
        name, fn = item
        try:
            ok, detail = fn()
        except EngineError as e:
            ok, detail = False, str(e)
        return name, ok, detail

    if threads == 1:
        results = [run_item(it) for it in items]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(run_item, items))
    lines = []
    for name, ok, detail in results:
        mark = "PASS" if ok else "FAIL"
        lines.append(f"{mark} {name}" + (f": {detail}" if detail else ""))
    n_fail = sum(1 for _, ok, _ in results if not ok)
    verdict = "pass" if n_fail == 0 else "fail"
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    return Report(
        "verify", "\n".join(lines),
        {"command": "verify", "suite": suite_name, "verdict": verdict,
         "items": [{"name": n, "passed": ok, "detail": d}
                   for n, ok, d in results]},
        verdict=verdict)


# --- entry point --------------------------------------------------------------------

def main(argv: Optional[list[str]] = None) -> int:
    ap = argparse.ArgumentParser(
        prog="holim-engine",
        description="ends, Kan extensions and homotopy limits over finite "
                    "categories, exactly")
    ap.add_argument("file", help="workspace file (.hle)")
    ap.add_argument("--cmd", required=True,
                    help="command to run, e.g. 'holim D' or 'verify all'")
    ap.add_argument("--json", action="store_true", help="emit JSON")
    ap.add_argument("--seed", type=int, default=0,
                    help="seed for randomized verification items")
    ap.add_argument("--depth", type=int, default=4,
                    help="truncation depth for fattot")
    ns = ap.parse_args(argv)
    try:
        with open(ns.file, "r", encoding="utf-8") as fh:
            source = fh.read()
        ws = dsl.parse(source)
        report = run_command(ws, ns.cmd, depth=ns.depth, seed=ns.seed)
    except EngineError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if ns.json:
        print(json.dumps(report.payload, sort_keys=True,
                         separators=(", ", ": ")))
    else:
        print(report.human)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
