"""Command-line surface: load inputs, run verification suites, emit reports.

Every run emits one report with the schema {command, params, seed, cases_run,
hypothesis_satisfied, violations, result, wall_time}, as JSON (default) or
text. Exit codes: 0 clean, 1 at least one violation, 2 usage or input errors,
3 infeasible enumeration budget. Same config and seed give byte-identical
JSON up to the wall_time field. File coordinates are 1-based; the core
modules are 0-based, and the conversion happens entirely in this layer.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .cube_core import (
    DEFAULT_TOL,
    MAX_DENSE_N,
    Bias,
    BiasedFunction,
    transform,
)
from .families import (
    Hypergraph,
    SetFamily,
    compress,
    cover_numbers,
    criticality_classify,
    expand,
    junta_extract,
    pseudorandomness_report,
    shadow,
    turan_exact,
)
from .hc_verify import default_corpus_spec, generate_corpus, verify_global_hc
from .influence import (
    beta_smallness,
    influence_table,
    russo_check,
    verify_equivalence_lemmas,
)
from .product_space import Factor, ProductSpace, efron_stein, verify_es_hc
from .rv_poly import FiniteRV, MultilinearPoly, SmoothTest, invariance_gap
from .threshold import boost_search, threshold_checks

CORPUS_COMMANDS = ("verify-hc", "verify-es", "verify-inv", "verify-threshold",
                   "corpus-suite")


# ---------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """One resolved invocation; everything here is echoed into the report."""

    command: str
    subcommand: str | None = None
    inputs: dict = field(default_factory=dict)   # name -> path
    seed: int | None = None
    params: dict = field(default_factory=dict)
    tol: float = DEFAULT_TOL
    fmt: str = "json"
    replay: int | None = None
    threads: int = 1

    def __post_init__(self):
        if self.command in CORPUS_COMMANDS and self.seed is None:
            raise ValueError(f"{self.command} requires --seed")
        if self.fmt not in ("json", "text"):
            raise ValueError("format must be json or text")
        if self.tol <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.threads < 1:
            raise ValueError("thread count must be >= 1")


def _env_threads() -> int:
    raw = os.environ.get("BIASEDCUBE_THREADS", "1")
    try:
        val = int(raw)
    except ValueError:
        raise ValueError(f"BIASEDCUBE_THREADS must be an integer, got {raw!r}")
    return val


# ---------------------------------------------------------------------------
# input files
# ---------------------------------------------------------------------------

def _rows(text: str):
    """Nonblank lines as (lineno, tokens)."""
    out = []
    for i, line in enumerate(text.splitlines()):
        toks = line.split()
        if toks:
            out.append((i + 1, toks))
    return out


def _fail(src: str, lineno: int, msg: str):
    raise ValueError(f"{src}:{lineno}: {msg}")


def _parse_int(tok: str, src: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        _fail(src, lineno, f"{what} must be an integer, got {tok!r}")


def _parse_float(tok: str, src: str, lineno: int, what: str) -> float:
    try:
        return float(tok)
    except ValueError:
        _fail(src, lineno, f"{what} must be a number, got {tok!r}")


def _parse_function(text: str, src: str) -> BiasedFunction:
    rows = _rows(text)
    if not rows:
        _fail(src, 1, "empty function file; expected header 'n p'")
    lineno, head = rows[0]
    if len(head) != 2:
        _fail(src, lineno, "header must be 'n p'")
    n = _parse_int(head[0], src, lineno, "n")
    p = _parse_float(head[1], src, lineno, "p")
    if not 0 <= n <= MAX_DENSE_N:
        _fail(src, lineno, f"n must lie in 0..{MAX_DENSE_N}")
    if not 0.0 < p < 1.0:
        _fail(src, lineno, "p must lie in (0, 1)")
    body = [(ln, t) for ln, toks in rows[1:] for t in toks]
    size = 1 << n
    if len(body) == size:
        values = np.empty(size)
        for x, (ln, tok) in enumerate(body):
            values[x] = _parse_float(tok, src, ln, f"value f({x})")
        return BiasedFunction(n, Bias(p), values)
    if len(body) == 1:
        ln, tok = body[0]
        digits = (size + 3) // 4
        if len(tok) != digits:
            _fail(src, ln, f"hex table for n = {n} needs exactly {digits} "
                           f"digits, got {len(tok)}")
        try:
            packed = int(tok, 16)
        except ValueError:
            _fail(src, ln, f"not a hex string: {tok!r}")
        # bit x of the integer is f(x); the leftmost digit covers the top masks
        values = np.array([(packed >> x) & 1 for x in range(size)], dtype=np.float64)
        return BiasedFunction(n, Bias(p), values)
    _fail(src, rows[-1][0],
          f"expected {size} values or one hex token, found {len(body)} tokens")


def _edge_vertices(toks, src, lineno, n):
    verts = [_parse_int(t, src, lineno, "vertex") for t in toks]
    for v in verts:
        if not 1 <= v <= n:
            _fail(src, lineno, f"vertex {v} out of range 1..{n}")
    if any(a >= b for a, b in zip(verts, verts[1:])):
        _fail(src, lineno, "vertices must be strictly increasing")
    return verts


def _parse_family(text: str, src: str) -> SetFamily:
    rows = _rows(text)
    if not rows:
        _fail(src, 1, "empty family file; expected header 'n k'")
    lineno, head = rows[0]
    if len(head) != 2:
        _fail(src, lineno, "header must be 'n k'")
    n = _parse_int(head[0], src, lineno, "n")
    k = _parse_int(head[1], src, lineno, "k")
    if not 1 <= n <= MAX_DENSE_N:
        _fail(src, lineno, f"n must lie in 1..{MAX_DENSE_N}")
    if not 1 <= k <= n:
        _fail(src, lineno, "need 1 <= k <= n")
    masks = []
    for lineno, toks in rows[1:]:
        if len(toks) != k:
            _fail(src, lineno, f"edge must have exactly {k} vertices")
        verts = _edge_vertices(toks, src, lineno, n)
        masks.append(sum(1 << (v - 1) for v in verts))
    return SetFamily(n, k, tuple(masks))


def _parse_hypergraph(text: str, src: str) -> Hypergraph:
    rows = _rows(text)
    if not rows:
        _fail(src, 1, "empty hypergraph file; expected header 'n'")
    lineno, head = rows[0]
    if len(head) != 1:
        _fail(src, lineno, "header must be a single vertex count 'n'")
    n = _parse_int(head[0], src, lineno, "n")
    if n < 1:
        _fail(src, lineno, "n must be positive")
    edges = []
    for lineno, toks in rows[1:]:
        edges.append(frozenset(_edge_vertices(toks, src, lineno, n)))
    try:
        return Hypergraph(tuple(range(1, n + 1)), tuple(edges))
    except ValueError as e:
        _fail(src, rows[0][0], str(e))


def _parse_rvset(text: str, src: str) -> list:
    rows = _rows(text)
    if not rows:
        _fail(src, 1, "empty rvset file; expected value/prob pairs per line")
    out = []
    for lineno, toks in rows:
        if len(toks) % 2 or len(toks) < 4:
            _fail(src, lineno, "need alternating value/prob pairs, >= 2 atoms")
        vals = np.array([_parse_float(t, src, lineno, "value")
                         for t in toks[0::2]])
        probs = np.array([_parse_float(t, src, lineno, "probability")
                          for t in toks[1::2]])
        try:
            plain = FiniteRV(vals, probs)
            out.append(FiniteRV(vals, probs,
                                sigma=math.sqrt(plain.variance())))
        except ValueError as e:
            _fail(src, lineno, str(e))
    return out


def load_input(path: str, kind: str):
    """Parse one input file; errors carry path and line number."""
    parsers = {
        "function": _parse_function,
        "family": _parse_family,
        "hypergraph": _parse_hypergraph,
        "rvset": _parse_rvset,
    }
    if kind not in parsers:
        raise ValueError(f"unknown input kind {kind!r}")
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parsers[kind](text, path)


def emit_function(f: BiasedFunction) -> str:
    """Inverse of the function parser, value route; loading it back is exact."""
    vals = " ".join(repr(float(v)) for v in f.values)
    return f"{f.n} {f.bias.p!r}\n{vals}\n"


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _mask_to_vertices(mask: int) -> list:
    return [i + 1 for i in range(mask.bit_length()) if (mask >> i) & 1]


def _family_summary(fam: SetFamily) -> dict:
    return {"n": fam.n, "k": fam.k, "size": len(fam), "mu": fam.mu()}


def _random_monotone(rng, n: int, p: float) -> BiasedFunction:
    vals = (rng.random(1 << n) < 0.35).astype(np.float64)
    for x in range(1 << n):
        if vals[x]:
            for i in range(n):
                vals[x | (1 << i)] = 1.0
    return BiasedFunction(n, Bias(p), vals)


def _select(indices, replay):
    if replay is None:
        return list(indices)
    return [i for i in indices if i == replay]


# ---------------------------------------------------------------------------
# command handlers: single-input operations
# ---------------------------------------------------------------------------

def _cmd_transform(config):
    f = load_input(config.inputs["function"], "function")
    spec = transform(f)
    back = transform(spec, "inverse")
    scale = 1.0 + float(np.max(np.abs(f.values)))
    gap = float(np.max(np.abs(back.values - f.values)))
    violations = []
    if gap > 1e-12 * scale:
        violations.append({"check": "round_trip", "gap": gap})
    cutoff = 1e-12 * (1.0 + float(np.max(np.abs(spec.coeffs))))
    listing = [{"set": _mask_to_vertices(S), "coeff": float(c)}
               for S, c in enumerate(spec.coeffs) if abs(c) > cutoff]
    result = {"n": f.n, "p": f.bias.p, "spectrum": listing,
              "round_trip_gap": gap}
    return 1, 1, violations, result


def _cmd_influence(config):
    f = load_input(config.inputs["function"], "function")
    tab = influence_table(f, config.tol)
    beta = beta_smallness(f)
    by_size = []
    for m in range(min(f.n, 4) + 1):
        val, S = tab.max_over_size(m)
        if S >= 0:
            by_size.append({"size": m, "max_influence": val,
                            "set": _mask_to_vertices(S)})
    result = {"n": f.n, "p": f.bias.p, "total": tab.total, "beta": beta,
              "expectation": f.expectation(), "max_by_size": by_size}
    return 1, 1, [], result


def _cmd_explore_boost(config):
    f = load_input(config.inputs["function"], "function")
    rep = boost_search(f, config.params["max_size"])
    rows = [{**row, "set": [i + 1 for i in row["set"]]} for row in rep["rows"]]
    result = {**rep, "rows": rows}
    return 1, 1, [], result


# ---------------------------------------------------------------------------
# command handlers: families subcommands
# ---------------------------------------------------------------------------

def _hypergraph_result(g: Hypergraph) -> dict:
    return {"vertices": list(g.vertices),
            "edges": sorted(sorted(e) for e in g.edges)}


def _cmd_families(config):
    sub = config.subcommand
    p = config.params
    if sub == "expand":
        g = load_input(config.inputs["hypergraph"], "hypergraph")
        result = _hypergraph_result(expand(g, p["k"]))
    elif sub == "cover":
        g = load_input(config.inputs["hypergraph"], "hypergraph")
        rep = cover_numbers(g, k=p.get("k"))
        result = {"tau": rep["tau"], "cc": rep["cc"],
                  "tau_witness": sorted(rep["tau_witness"]),
                  "cc_witness": sorted(rep["cc_witness"])}
    elif sub == "compress":
        fam = load_input(config.inputs["family"], "family")
        out = compress(fam, p["i"] - 1, p["j"] - 1)
        result = {**_family_summary(out),
                  "edges": [_mask_to_vertices(m) for m in out.edges],
                  "fixed_point": out.edges == fam.edges}
    elif sub == "shadow":
        fam = load_input(config.inputs["family"], "family")
        fat = (p["fat_r"], p["fat_c"]) if p.get("fat_r") is not None else None
        out = shadow(fam, ell=p.get("ell"), fat=fat)
        result = {**_family_summary(out),
                  "edges": [_mask_to_vertices(m) for m in out.edges]}
    elif sub == "pseudo":
        fam = load_input(config.inputs["family"], "family")
        rep = pseudorandomness_report(fam, a=p["a"], r=p["r"], eps=p["eps"],
                                      delta=p["delta"], p=p.get("p"))
        for part in ("uncapturable", "global", "p_global"):
            w = rep[part].get("witness")
            if w is not None:
                rep[part]["witness_vertices"] = _mask_to_vertices(w)
        rep["boundary_cases"] = [
            {"kind": kind, "set": _mask_to_vertices(J), "value": val}
            for kind, J, val in rep["boundary_cases"]]
        result = rep
    elif sub == "turan":
        g = load_input(config.inputs["hypergraph"], "hypergraph")
        value, wits = turan_exact(g, p["k"], p["n"])
        result = {"value": value, "witness_count": len(wits),
                  "witnesses": [[_mask_to_vertices(m) for m in w.edges]
                                for w in wits[:2]]}
    elif sub == "junta":
        fam = load_input(config.inputs["family"], "family")
        J, residual = junta_extract(fam, p["beta"])
        result = {"junta": [i + 1 for i in J],
                  "residual": _family_summary(residual)}
    elif sub == "critical":
        g = load_input(config.inputs["hypergraph"], "hypergraph")
        rep = criticality_classify(g, n=p.get("n"), k=p.get("k"))
        result = {key: rep[key] for key in
                  ("tau", "cc", "tau_equals_cc", "critical", "a1", "a2")}
        result["critical_edge"] = (sorted(rep["critical_edge"])
                                   if rep["critical_edge"] else None)
        result["f_a1a2"] = {
            "num_edges": rep["f_a1a2"]["num_edges"],
            "edges": sorted(sorted(e) for e in rep["f_a1a2"]["edges"]),
        }
        if rep.get("family") is not None:
            result["family"] = _family_summary(rep["family"])
    else:
        raise ValueError(f"unknown families subcommand {sub!r}")
    return 1, 1, [], result


# ---------------------------------------------------------------------------
# command handlers: seeded suites
# ---------------------------------------------------------------------------

def _cmd_verify_hc(config):
    spec = default_corpus_spec(max_n=config.params["max_n"],
                               per_combo=config.params["per_combo"])
    corpus = generate_corpus(config.seed, spec)
    violations = []
    cases = 0
    by_tag = {}
    for idx in _select(range(len(corpus.entries)), config.replay):
        entry = corpus.entries[idx]
        cases += 1
        by_tag[entry.tag] = by_tag.get(entry.tag, 0) + 1
        rep = verify_global_hc(entry.function, config.tol)
        if not rep["passed"]:
            violations.append({"check": "global_hc", "index": idx,
                               "tag": entry.tag, "n": entry.function.n,
                               "p": entry.function.bias.p, "replay": idx})
    _maybe_inject(config, violations)
    return cases, cases, violations, {"corpus_size": len(corpus.entries),
                                      "by_tag": by_tag}


def _cmd_verify_es(config):
    rng = np.random.default_rng(config.seed)
    violations = []
    cases = 0
    for idx in range(config.params["cases"]):
        k = int(rng.integers(1, 5))
        sizes = [int(rng.integers(2, 4)) for _ in range(k)]
        factors = []
        for m in sizes:
            raw = rng.uniform(0.05, 1.0, size=m)
            factors.append(Factor(raw / raw.sum()))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            space = ProductSpace(tuple(factors))
        values = rng.normal(size=space.npoints)
        if config.replay is not None and idx != config.replay:
            continue
        cases += 1
        comp = efron_stein(values, space)
        gap = float(np.max(np.abs(comp.reconstruct() - values)))
        if gap > 1e-10 * (1.0 + float(np.max(np.abs(values)))):
            violations.append({"check": "es_reconstruction", "index": idx,
                               "gap": gap, "replay": idx})
        rep = verify_es_hc(values, space, q=4, rho=1.0 / 64.0, tol=config.tol)
        if not rep["passed"]:
            violations.append({"check": "es_hc", "index": idx,
                               "lhs": rep["lhs"], "rhs": rep["rhs"],
                               "replay": idx})
    _maybe_inject(config, violations)
    return cases, cases, violations, {"spaces": config.params["cases"]}


def _cube_test() -> SmoothTest:
    return SmoothTest(lambda x: x ** 3, 6.0, "phi(x) = x^3, phi''' = 6")


def _cmd_verify_inv(config):
    rng = np.random.default_rng(config.seed)
    max_n = config.params["max_n"]
    rvset = None
    if "rvset" in config.inputs:
        rvset = load_input(config.inputs["rvset"], "rvset")
    violations = []
    cases = 0
    test = _cube_test()
    for idx in range(config.params["cases"]):
        n = len(rvset) if rvset is not None else int(rng.integers(1, max_n + 1))
        coeffs = rng.normal(size=1 << n)
        pc = np.array([bin(S).count("1") for S in range(1 << n)])
        coeffs[pc > 2] = 0.0
        poly = MultilinearPoly(n, coeffs)
        xs = [FiniteRV.rademacher()] * n
        if rvset is not None:
            ys = rvset
        else:
            ys = [FiniteRV.rademacher() if rng.random() < 0.5
                  else FiniteRV.biased_character(float(rng.uniform(0.1, 0.9)))
                  for _ in range(n)]
        if config.replay is not None and idx != config.replay:
            continue
        cases += 1
        rep = invariance_gap(poly, xs, ys, test, config.tol)
        if not rep["passed"]:
            violations.append({"check": "invariance", "index": idx, "n": n,
                               "lhs": rep["lhs"], "rhs": rep["rhs"],
                               "replay": idx})
    _maybe_inject(config, violations)
    return cases, cases, violations, {"polynomials": config.params["cases"]}


def _threshold_case(f, p, q, eps, C, tol, idx, violations, counts):
    rep = threshold_checks(f, p, q, eps=eps, C=C, tol=tol)
    counts["prop"] += 1
    if not rep["prop"]["holds"]:
        violations.append({"check": "threshold_prop", "index": idx,
                           "p": p, "q": q, "replay": idx})
    for name in ("quantitative_ns", "qr_sharp_threshold"):
        branch = rep[name]
        if branch["hypothesis"]:
            counts[name] += 1
            if branch["holds"] is False:
                violations.append({"check": name, "index": idx,
                                   "p": p, "q": q, "replay": idx})


def _cmd_verify_threshold(config):
    rng = np.random.default_rng(config.seed)
    max_n = config.params["max_n"]
    pairs = config.params["pairs"]
    eps = config.params["eps"]
    C = config.params["C"]
    grid = np.linspace(0.05, 0.95, 37)
    counts = {"prop": 0, "quantitative_ns": 0, "qr_sharp_threshold": 0}
    violations = []
    cases = 0
    idx = 0
    for _ in range(config.params["cases"]):
        n = int(rng.integers(1, max_n + 1))
        f = _random_monotone(rng, n, 0.5)
        for _ in range(pairs):
            p, q = sorted(float(v) for v in
                          rng.choice(grid, size=2, replace=False))
            my_turn = config.replay is None or idx == config.replay
            if my_turn:
                cases += 1
                _threshold_case(f, p, q, eps, C, config.tol, idx,
                                violations, counts)
            idx += 1
    _maybe_inject(config, violations)
    return cases, counts, violations, {"functions": config.params["cases"],
                                       "pairs_per_function": pairs}


def _cmd_corpus_suite(config):
    spec = default_corpus_spec(max_n=config.params["max_n"],
                               per_combo=config.params["per_combo"])
    corpus = generate_corpus(config.seed, spec)
    tol = config.tol
    counts = {"global_hc": 0, "russo": 0, "threshold_prop": 0,
              "equiv/gen_influence_control": 0, "equiv/rem": 0,
              "equiv/restrict": 0, "equiv/converse": 0,
              "quantitative_ns": 0, "qr_sharp_threshold": 0}
    violations = []
    cases = 0
    for idx in _select(range(len(corpus.entries)), config.replay):
        entry = corpus.entries[idx]
        f = entry.function
        cases += 1

        rep = verify_global_hc(f, tol)
        counts["global_hc"] += 1
        if not rep["passed"]:
            violations.append({"check": "global_hc", "index": idx,
                               "tag": entry.tag, "replay": idx})

        boolean = f.is_boolean(tol)
        if boolean:
            for r in (1, 2):
                eq = verify_equivalence_lemmas(f, r, 0.25, tol)
                for name, branch in eq["branches"].items():
                    key = f"equiv/{name}"
                    if branch["hypothesis_held"]:
                        counts[key] += 1
                        if not branch["conclusion_held"]:
                            violations.append({"check": key, "index": idx,
                                               "r": r, "tag": entry.tag,
                                               "replay": idx})

        if boolean and f.is_monotone():
            p = f.bias.p
            if 0.002 < p < 0.998:
                ru = russo_check(f, p, 1e-3, tol)
                counts["russo"] += 1
                if not ru["passed"]:
                    violations.append({"check": "russo", "index": idx,
                                       "error": ru["error"],
                                       "bound": ru["bound"], "replay": idx})
            q = (1.0 + p) / 2.0
            if p < q < 1.0:
                stats = {"prop": 0, "quantitative_ns": 0,
                         "qr_sharp_threshold": 0}
                _threshold_case(f, p, q, config.params["eps"],
                                config.params["C"], tol, idx, violations,
                                stats)
                counts["threshold_prop"] += stats["prop"]
                counts["quantitative_ns"] += stats["quantitative_ns"]
                counts["qr_sharp_threshold"] += stats["qr_sharp_threshold"]
    _maybe_inject(config, violations)
    return cases, counts, violations, {"corpus_size": len(corpus.entries)}


def _maybe_inject(config, violations):
    if config.params.get("inject_violation"):
        violations.append({"check": "synthetic", "injected": True,
                           "index": -1})


_HANDLERS = {
    "transform": _cmd_transform,
    "influence": _cmd_influence,
    "verify-hc": _cmd_verify_hc,
    "verify-es": _cmd_verify_es,
    "verify-inv": _cmd_verify_inv,
    "verify-threshold": _cmd_verify_threshold,
    "families": _cmd_families,
    "explore-boost": _cmd_explore_boost,
    "corpus-suite": _cmd_corpus_suite,
}


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def run_report(config: RunConfig):
    """Execute one config; returns (exit_code, report dict)."""
    if config.command not in _HANDLERS:
        raise ValueError(f"unknown command {config.command!r}")
    start = time.perf_counter()
    cases, satisfied, violations, result = _HANDLERS[config.command](config)
    name = config.command
    if config.subcommand:
        name = f"{config.command} {config.subcommand}"
    report = {
        "command": name,
        "params": _jsonable({**config.params, "inputs": config.inputs,
                             "tol": config.tol, "threads": config.threads,
                             "replay": config.replay}),
        "seed": config.seed,
        "cases_run": cases,
        "hypothesis_satisfied": _jsonable(satisfied),
        "violations": _jsonable(violations),
        "result": _jsonable(result),
        "wall_time": time.perf_counter() - start,
    }
    return (1 if violations else 0), report


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    lines = [f"command: {report['command']}",
             f"seed: {report['seed']}",
             f"cases_run: {report['cases_run']}",
             f"hypothesis_satisfied: {json.dumps(report['hypothesis_satisfied'], sort_keys=True)}",
             f"violations: {len(report['violations'])}"]
    for v in report["violations"]:
        lines.append("  " + json.dumps(v, sort_keys=True))
    lines.append(f"result: {json.dumps(report['result'], sort_keys=True)}")
    lines.append(f"wall_time: {report['wall_time']:.3f}s")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="biasedcube",
        description="Verification suites for biased-cube hypercontractivity, "
                    "thresholds, and set-family combinatorics.")
    sub = top.add_subparsers(dest="command", required=True)

    def common(sp, seed_required=False):
        sp.add_argument("--seed", type=int, required=seed_required,
                        help="PRNG seed (mandatory for corpus commands)")
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help="tolerance override (default 1e-9)")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--replay", type=int, default=None,
                        help="re-run only the case with this index")

    sp = sub.add_parser("transform", help="spectrum of a function file")
    sp.add_argument("function")
    common(sp)

    sp = sub.add_parser("influence", help="generalized influence summary")
    sp.add_argument("function")
    common(sp)

    sp = sub.add_parser("verify-hc", help="hypercontractivity corpus suite")
    sp.add_argument("--max-n", type=int, default=12)
    sp.add_argument("--per-combo", type=int, default=2)
    sp.add_argument("--inject-violation", action="store_true")
    common(sp, seed_required=True)

    sp = sub.add_parser("verify-es", help="product-space suite")
    sp.add_argument("--cases", type=int, default=100)
    sp.add_argument("--inject-violation", action="store_true")
    common(sp, seed_required=True)

    sp = sub.add_parser("verify-inv", help="invariance-principle suite")
    sp.add_argument("--cases", type=int, default=50)
    sp.add_argument("--max-n", type=int, default=6)
    sp.add_argument("--rvset", default=None,
                    help="optional rvset file for the target variables")
    sp.add_argument("--inject-violation", action="store_true")
    common(sp, seed_required=True)

    sp = sub.add_parser("verify-threshold", help="sharp-threshold suite")
    sp.add_argument("--cases", type=int, default=10)
    sp.add_argument("--pairs", type=int, default=20)
    sp.add_argument("--max-n", type=int, default=10)
    sp.add_argument("--eps", type=float, default=0.25)
    sp.add_argument("--C", type=float, default=4.0)
    sp.add_argument("--inject-violation", action="store_true")
    common(sp, seed_required=True)

    fam = sub.add_parser("families", help="set-family operations")
    fsub = fam.add_subparsers(dest="subcommand", required=True)

    sp = fsub.add_parser("expand", help="expand a hypergraph to uniformity k")
    sp.add_argument("hypergraph")
    sp.add_argument("--k", type=int, required=True)
    common(sp)

    sp = fsub.add_parser("cover", help="transversal and crosscut numbers")
    sp.add_argument("hypergraph")
    sp.add_argument("--k", type=int, default=None)
    common(sp)

    sp = fsub.add_parser("compress", help="apply C_{i,j} to a family")
    sp.add_argument("family")
    sp.add_argument("--i", type=int, required=True, help="1-based target")
    sp.add_argument("--j", type=int, required=True, help="1-based source")
    common(sp)

    sp = fsub.add_parser("shadow", help="plain or fat shadow")
    sp.add_argument("family")
    sp.add_argument("--ell", type=int, default=None)
    sp.add_argument("--fat-r", type=int, default=None)
    sp.add_argument("--fat-c", type=float, default=None)
    common(sp)

    sp = fsub.add_parser("pseudo", help="uncapturability/globalness report")
    sp.add_argument("family")
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--p", type=float, default=None)
    common(sp)

    sp = fsub.add_parser("turan", help="exact Turan number of an expansion")
    sp.add_argument("hypergraph")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    common(sp)

    sp = fsub.add_parser("junta", help="high-degree junta extraction")
    sp.add_argument("family")
    sp.add_argument("--beta", type=float, required=True)
    common(sp)

    sp = fsub.add_parser("critical", help="criticality classification")
    sp.add_argument("hypergraph")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--k", type=int, default=None)
    common(sp)

    sp = sub.add_parser("explore-boost", help="density-boost explorer")
    sp.add_argument("function")
    sp.add_argument("--max-size", type=int, default=3)
    common(sp)

    sp = sub.add_parser("corpus-suite", help="aggregate corpus run")
    sp.add_argument("--max-n", type=int, default=10)
    sp.add_argument("--per-combo", type=int, default=2)
    sp.add_argument("--eps", type=float, default=0.25)
    sp.add_argument("--C", type=float, default=4.0)
    sp.add_argument("--inject-violation", action="store_true")
    common(sp, seed_required=True)

    return top


_INPUT_ARGS = ("function", "family", "hypergraph", "rvset")
_PARAM_ARGS = ("max_n", "per_combo", "cases", "pairs", "eps", "C", "max_size",
               "k", "n", "i", "j", "ell", "fat_r", "fat_c", "a", "r", "delta",
               "p", "beta", "inject_violation")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    inputs = {}
    for name in _INPUT_ARGS:
        val = getattr(args, name, None)
        if isinstance(val, str):
            inputs[name] = val
    params = {}
    for name in _PARAM_ARGS:
        if hasattr(args, name):
            params[name] = getattr(args, name)
    return RunConfig(
        command=args.command,
        subcommand=getattr(args, "subcommand", None),
        inputs=inputs,
        seed=args.seed,
        params=params,
        tol=args.tol,
        fmt=args.format,
        replay=args.replay,
        threads=_env_threads(),
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    try:
        config = config_from_args(args)
        code, report = run_report(config)
    except ValueError as e:
        if "budget" in str(e).lower():
            print(f"error: {e}", file=sys.stderr)
            return 3
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(render(report, config.fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
