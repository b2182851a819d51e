"""Command-line front end: ``boolmeasures measure | verify <suite> | domain-info``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from fractions import Fraction
from typing import Callable

import numpy as np

from . import __version__
from .catalog import DomainTooLargeError, SpecError, as_spec, build, parameter_table
from .domain import AtLeast, is_composable, max_link_size, validate_domain
from .exact import BudgetExceeded
from .measures import (BooleanFunction, DomainConstants, UnsupportedDomainError, check_relations,
                       degree, measure)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 2, 3, 4

SUITES = ("relations", "sensitivity", "degree1", "families", "rsk", "spectral")

#: shape -> count tables the rsk suite compares against when the domain matches
REFERENCE_CENSUS = {
    "sym:4": {(4,): 1, (3, 1): 9, (2, 2): 4, (2, 1, 1): 9, (1, 1, 1, 1): 1},
    "pm:3,2": {(6,): 1, (4, 2): 9, (2, 2, 2): 5},
    "ms:2,3": {(5,): 1, (4, 1): 4, (3, 2): 5},
    "product:3,3,3": {(3,): 10, (2, 1): 16, (1, 1, 1): 1},
}


class InputError(ValueError):
    pass


def _env_int(name: str, default: int | None) -> int | None:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise InputError(f"{name} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise InputError(f"{name} must be positive")
    return value


def _jsonable(obj):
    if isinstance(obj, AtLeast):
        return f">={int(obj)}"
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {(",".join(map(str, k)) if isinstance(k, tuple) else str(k)): _jsonable(v)
                for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _envelope(command: str, domain: str, seed: int, result: dict) -> dict:
    return {"tool": "boolmeasures", "version": __version__, "command": command,
            "domain": domain, "seed": seed, "result": _jsonable(result)}


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _value_string(bits: int, size: int) -> str:
    return "".join("1" if (bits >> i) & 1 else "0" for i in range(size))


# ---------------------------------------------------------------- measure


def cmd_measure(args) -> tuple[dict, int]:
    try:
        with open(args.function, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.function}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise InputError(str(exc)) from exc
    if not isinstance(obj, dict) or "values" not in obj:
        raise InputError(f"{args.function}: expected an object with 'domain' and 'values'")
    spec = args.domain or obj.get("domain")
    if spec is None:
        raise InputError("no domain given on the command line or in the function file")
    d = build(spec)
    if args.domain and obj.get("domain") and str(as_spec(obj["domain"])) != str(d.spec):
        raise InputError(f"function file is for {obj['domain']}, not {d.spec}")
    try:
        f = BooleanFunction.from_json(obj, domain=d)
    except ValueError as exc:
        raise InputError(f"{args.function}: {exc}") from exc
    budget = _env_int("BOOLMEASURES_U_BUDGET", 200_000)
    report, witnesses = measure(f, Fraction(args.eps), with_u=not args.no_u, u_budget=budget)
    violated = check_relations(report, DomainConstants.of(d))
    result = {"function": f.value_string(), "measures": report.to_json(),
              "witnesses": witnesses, "violated_relations": violated}
    ok = not violated and witnesses["optimal_tree_correct"] and witnesses.get("algorithm1_tree_correct", True)
    return _envelope("measure", str(d.spec), args.seed, result), EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- verify suites


def _functions(d, args) -> tuple[np.ndarray, str]:
    from .batch import all_functions, random_functions
    if args.exhaustive:
        return all_functions(d), "exhaustive"
    count = args.sample or _env_int("BOOLMEASURES_SAMPLE", 2000)
    return random_functions(d, count, args.seed), f"sample of {count}"


def suite_relations(d, args) -> tuple[dict, bool]:
    from .batch import run_battery
    fbits, mode = _functions(d, args)
    bat = run_battery(d, fbits, with_u=not args.no_u, replay_trees=args.replay_trees,
                      workers=args.workers)
    examples = {}
    for i, name in bat.violations:
        examples.setdefault(name, _value_string(int(bat.fbits[i]), d.size))
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["function", "deg", "adeg", "C", "C0", "C1", "U", "D", "s", "bs", "fbs"])
            for i in range(bat.size):
                u = "" if bat.U is None else (f">={int(bat.U[i])}" if isinstance(bat.U[i], AtLeast)
                                              else int(bat.U[i]))
                w.writerow([_value_string(int(bat.fbits[i]), d.size), int(bat.deg[i]),
                            "" if bat.adeg is None else int(bat.adeg[i]), int(bat.C[i]),
                            int(bat.C0[i]), int(bat.C1[i]), u, int(bat.D[i]), int(bat.s[i]),
                            int(bat.bs[i]), str(bat.fbs[i])])
    ok = not bat.violations and bat.fbs_mismatches == 0
    return {"mode": mode, "functions": bat.size, "violations": dict(bat.counts()),
            "counterexamples": examples, "fbs_instances": bat.fbs_instances,
            "fbs_primal_dual_mismatches": bat.fbs_mismatches, "trees_replayed": bat.trees_checked}, ok


def _sensitivity_claim(d) -> tuple[str, Callable[[int, int], bool]] | None:
    kind = d.spec.kind
    if kind == "cube":
        return "s^2 >= deg", lambda s, k: s * s >= k
    if kind == "pm" and d.spec.params[1:] == (2,):
        return "s^2 >= deg", lambda s, k: s * s >= k
    if kind in ("sym", "ms"):
        return "2 s^2 >= deg", lambda s, k: 2 * s * s >= k
    return None


def suite_sensitivity(d, args) -> tuple[dict, bool]:
    from .batch import sensitivity_degree
    claim = _sensitivity_claim(d)
    if claim is None:
        raise UnsupportedDomainError(f"no sensitivity-degree claim is checked for {d.spec}")
    fbits, mode = _functions(d, args)
    name, holds = claim
    failures = 0
    examples: list[str] = []
    hist: dict[str, int] = {}
    step = 1 << 16
    for start in range(0, len(fbits), step):
        part = fbits[start:start + step]
        s, deg = sensitivity_degree(d, part)
        pairs, counts = np.unique(np.stack([s, deg], axis=1), axis=0, return_counts=True)
        for (a, b), c in zip(pairs.tolist(), counts.tolist()):
            hist[f"s={a},deg={b}"] = hist.get(f"s={a},deg={b}", 0) + c
            if not holds(a, b):
                failures += c
        if len(examples) < 5:
            for i in range(len(part)):
                if not holds(int(s[i]), int(deg[i])):
                    examples.append(_value_string(int(part[i]), d.size))
                    if len(examples) == 5:
                        break
    return {"mode": mode, "functions": len(fbits), "claim": name, "failures": failures,
            "counterexamples": examples, "histogram": dict(sorted(hist.items()))}, failures == 0


def suite_degree1(d, args) -> tuple[dict, bool]:
    from .lowdegree import (degree1_report, enumerate_degree_at_most, nonneg_degree1_decompose,
                            single_query_functions, sym_degree1_census, triangle_identity_holds)
    rep = degree1_report(d)
    ok = not rep["other"]
    out = {"count": rep["count"], "classes": rep["classes"],
           "other": [_value_string(b, d.size) for b in rep["other"][:5]]}
    kind = d.spec.kind
    if kind == "sym":
        direct = single_query_functions(d)
        funcs = set(enumerate_degree_at_most(d, 1))
        out["census_formula"] = sym_degree1_census(d.spec.n)
        out["census_direct"] = len(direct)
        out["equals_single_coordinate_functions"] = funcs == direct
        ok &= funcs == direct and len(direct) == sym_degree1_census(d.spec.n)
    if d.size <= 24:
        cross = enumerate_degree_at_most(d, 1, "filter")
        out["filter_cross_check"] = cross == enumerate_degree_at_most(d, 1)
        ok &= out["filter_cross_check"]
    if kind == "sym" or (kind == "pm" and d.spec.params[1:] == (2,)):
        failed = 0
        for fb in enumerate_degree_at_most(d, 1):
            try:
                nonneg_degree1_decompose(d, [(fb >> x) & 1 for x in range(d.size)])
            except ValueError:
                failed += 1
        out["decomposition_failures"] = failed
        ok &= failed == 0
        if kind == "pm" and d.spec.n == 3:
            out["six_vertex_identity"] = triangle_identity_holds(d)
            ok &= out["six_vertex_identity"]
    return out, ok


def _expected_max(d, t: int) -> int | None:
    kind = d.spec.kind
    n = d.spec.n
    if kind == "sym" and t <= n:
        return math.factorial(n - t)
    if kind == "pm" and d.spec.params[1:] == (2,) and t <= n:
        return math.prod(range(2 * n - 2 * t - 1, 0, -2))
    return None


def suite_families(d, args) -> tuple[dict, bool]:
    from .families import covering_construction, intersection_bound, is_t_link, max_t_intersecting
    from .measures import PreconditionError
    t = args.t
    budget = _env_int("BOOLMEASURES_CLIQUE_BUDGET", 2_000_000)
    res = max_t_intersecting(d, t, enumerate_all=True, budget=budget)
    ok = res.exact
    out = {"t": t, "max_size": res.size, "exact": res.exact, "upper": res.upper,
           "maximizers": len(res.all_maximizers or []), "L_t": max_link_size(d, t)}
    expected = _expected_max(d, t)
    if expected is not None:
        out["expected"] = expected
        ok &= res.size == expected
    if res.all_maximizers:
        out["all_maximizers_are_links"] = all(is_t_link(d, F, t) for F in res.all_maximizers)
        if res.size == max_link_size(d, t):
            degs = {degree(BooleanFunction(d, sum(1 << i for i in F))) for F in res.all_maximizers}
            out["maximizer_degrees"] = sorted(degs)
            ok &= max(degs) <= t
        covers = []
        for F in res.all_maximizers[:4]:
            try:
                cv = covering_construction(d, F, F, t)
            except (ValueError, PreconditionError) as exc:
                covers.append({"premise": str(exc)})
                continue
            covers.append({"outcome": cv.outcome, "covered": cv.covered, "within_bound": cv.within_bound})
            ok &= cv.covered and cv.within_bound
        out["covering"] = covers
    ib = intersection_bound(d, t)
    out["intersection_bound"] = "unbounded up to n" if ib.unbounded else ib.value
    if d.spec.kind == "sym" and t < d.spec.n and math.factorial(d.spec.n - t) <= 24:
        from .spectral import star_lemma_check
        st = star_lemma_check(d, t)
        out["star_lemma"] = {"checked": st.checked, "holds": st.holds}
        ok &= st.holds
    return out, ok


def suite_rsk(d, args) -> tuple[dict, bool]:
    from .rsk import (decomposition_census, greene_invariant, is_bijective, level_increments,
                      matching_permutation, multislice_word, permutation_of, point_shape,
                      product_word)
    census = decomposition_census(d)
    counts = {k: len(v) for k, v in census.items()}
    ok = sum(counts.values()) == d.size and is_bijective(d)
    out = {"counts": counts, "bijective": ok}
    ref = REFERENCE_CENSUS.get(str(d.spec))
    if ref is not None:
        out["matches_reference"] = counts == ref
        ok &= counts == ref
    kind = d.spec.kind
    if kind in ("sym", "ms", "pm"):
        census_lv, dims = level_increments(d)
        out["levels"] = census_lv
        out["dimension_increments"] = dims
        ok &= census_lv == dims
    greene_bad = 0
    if d.spec.n <= 6 or (kind == "pm" and d.spec.n <= 3):
        for x in range(d.size):
            shape = point_shape(d, x)
            if kind == "sym":
                word, dec, strict = permutation_of(d, x), False, True
            elif kind == "ms":
                word, dec, strict = multislice_word(d, x).bottom, False, True
            elif kind == "pm":
                word, dec, strict = matching_permutation(d, x), True, True
            else:
                word, dec, strict = product_word(d, x), False, False
            for k in range(1, len(shape) + 1):
                if greene_invariant(word, k, decreasing=dec, strict=strict) != sum(shape[:k]):
                    greene_bad += 1
                    break
        out["greene_mismatches"] = greene_bad
    return out, ok and greene_bad == 0


def suite_spectral(d, args) -> tuple[dict, bool]:
    from .spectral import (check_spanning, derangement_matrix, pseudo_char_family, verify_inducing,
                           verify_t_good)
    ok = True
    levels = {}
    shortfalls = []
    top = d.n - 1 if d.spec.kind != "ms" else d.n
    for k in range(0, top + 1):
        r, dim = check_spanning(d, k)
        levels[k] = {"rank": r, "dimension": dim}
        ok &= r == dim
    for c in pseudo_char_family(d, top):
        w = verify_inducing(d, c)
        if not w.meets_claim:
            shortfalls.append({"shape": c.shape, "A": [list(r) for r in c.A.rows], "dprime": w.dprime,
                               "claimed": str(w.claimed)})
    ok &= not shortfalls
    out = {"spanning": levels, "inducing_shortfalls": len(shortfalls), "examples": shortfalls[:3]}
    if d.spec.kind == "sym" and d.size <= 24:
        rep = verify_t_good(d, derangement_matrix(d), 1)
        out["derangement_t_good"] = {str(i): {"passed": p.passed, "detail": p.detail}
                                     for i, p in rep.properties.items()}
        out["omega"] = rep.omega
        ok &= rep.passed(1, 2, 3, 4)
    return out, ok


SUITE_FUNCS = {"relations": suite_relations, "sensitivity": suite_sensitivity, "degree1": suite_degree1,
               "families": suite_families, "rsk": suite_rsk, "spectral": suite_spectral}


def cmd_verify(args) -> tuple[dict, int]:
    d = build(args.domain)
    result, ok = SUITE_FUNCS[args.suite](d, args)
    result["passed"] = bool(ok)
    return _envelope(f"verify {args.suite}", str(d.spec), args.seed, result), EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- domain-info


def cmd_domain_info(args) -> tuple[dict, int]:
    d = build(args.spec)
    closed = parameter_table(d.spec)
    info = {"points": d.size, "queries": len(d.queries), "universe": d.universe_size, "n": d.n,
            "closed_form": {"chi": closed.chunk, "Delta": closed.max_degree,
                            "Lambda": closed.conflict_bound, "B": closed.bs_ratio_lb,
                            "B_tilde": closed.sens_ratio_lb},
            "valid": not validate_domain(d)}
    if d.size <= _env_int("BOOLMEASURES_INFO_POINTS", 200):
        k = DomainConstants.of(d)
        info["computed"] = {"chi": k.chunk, "Delta": k.delta, "Lambda": k.lam, "B": k.B,
                            "B_tilde": k.Bt, "ratios_exact": k.exact_ratios}
        comp = is_composable(d, max_blocks=2)
        info["composable"] = comp.composable
        info["affine_criterion"] = comp.affine_criterion
    return _envelope("domain-info", str(d.spec), args.seed, info), EXIT_OK


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boolmeasures", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="write the JSON report here instead of stdout")

    m = sub.add_parser("measure", help="compute every measure of one function")
    m.add_argument("--domain")
    m.add_argument("--function", required=True, help="JSON file with 'domain' and 'values'")
    m.add_argument("--eps", default="1/3")
    m.add_argument("--no-u", action="store_true", help="skip unambiguous certificate complexity")
    common(m)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--domain", required=True)
    v.add_argument("--exhaustive", action="store_true")
    v.add_argument("--sample", type=int)
    v.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    v.add_argument("--csv", help="per-function CSV (relations suite)")
    v.add_argument("--t", type=int, default=1, help="intersection parameter (families suite)")
    v.add_argument("--no-u", action="store_true")
    v.add_argument("--replay-trees", action="store_true")
    common(v)

    i = sub.add_parser("domain-info", help="print the domain's parameters")
    i.add_argument("spec")
    common(i)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"measure": cmd_measure, "verify": cmd_verify, "domain-info": cmd_domain_info}
    try:
        if getattr(args, "sample", None) is not None and args.sample <= 0:
            raise InputError("--sample must be positive")
        doc, code = handlers[args.command](args)
    except (BudgetExceeded, DomainTooLargeError) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, SpecError, UnsupportedDomainError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(doc, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
