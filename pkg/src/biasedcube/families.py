"""Set families and expanded hypergraphs: covers, compressions, shadows,
pseudorandomness testers, containment search, exact small Turan numbers,
junta extraction, criticality.

Families are k-uniform and stored as sorted bitmask tuples over [n]
(coordinate i = bit i). Hypergraphs carry integer vertex labels so that
expansion can allocate fresh labels deterministically. All searches are
exact: branch and bound with certified pruning, no heuristics that could
miss a witness.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

MAX_SUBSET_ENUM = 300_000
MAX_FAMILY_ENUM = 500_000
MAX_TURAN_SETS = 30


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask >> i:
        if (mask >> i) & 1:
            out.append(i)
        i += 1
    return out


def _mask(bits) -> int:
    out = 0
    for b in bits:
        out |= 1 << b
    return out


# ---------------------------------------------------------------------------
# set families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SetFamily:
    """A k-uniform family over ground set [n], edges as sorted bitmasks."""

    n: int
    k: int
    edges: tuple

    def __post_init__(self):
        if not (0 <= self.k <= self.n):
            raise ValueError("need 0 <= k <= n")
        canon = tuple(sorted(set(int(e) for e in self.edges)))
        for e in canon:
            if e < 0 or e >> self.n:
                raise ValueError(f"edge {e:b} does not fit in [{self.n}]")
            if bin(e).count("1") != self.k:
                raise ValueError(f"edge {e:b} is not a {self.k}-set")
        object.__setattr__(self, "edges", canon)

    def __len__(self) -> int:
        return len(self.edges)

    def mu(self) -> float:
        return len(self.edges) / math.comb(self.n, self.k)

    def contains_mask(self, mask: int) -> bool:
        return mask in set(self.edges)

    def link_count(self, B: int, J: int) -> int:
        """|F^B_J| = #{F in F: F cap J = B}."""
        if B & ~J:
            raise ValueError("B must be a subset of J")
        return sum(1 for e in self.edges if e & J == B)

    def link_measure(self, B: int, J: int) -> float:
        """mu(F^B_J) with the (n-|J|, k-|B|) normalization."""
        nb, nj = bin(B).count("1"), bin(J).count("1")
        denom = math.comb(self.n - nj, self.k - nb)
        if denom == 0:
            return 0.0
        return self.link_count(B, J) / denom

    def link(self, B: int, J: int) -> "SetFamily":
        """F^B_J as a family over the remaining coordinates, relabeled to
        [n - |J|] preserving order."""
        if B & ~J:
            raise ValueError("B must be a subset of J")
        keep = [i for i in range(self.n) if not (J >> i) & 1]
        pos = {v: idx for idx, v in enumerate(keep)}
        out = []
        for e in self.edges:
            if e & J == B:
                out.append(_mask(pos[b] for b in _bits(e & ~J)))
        return SetFamily(len(keep), self.k - bin(B).count("1"), tuple(out))

    @classmethod
    def complete(cls, n: int, k: int) -> "SetFamily":
        return cls(n, k, tuple(_mask(c) for c in
                               itertools.combinations(range(n), k)))


@dataclass(frozen=True)
class Star:
    """S_{n,k,J} = {A in [n] choose k : A cap J != empty}."""

    n: int
    k: int
    J: int

    def family(self) -> SetFamily:
        edges = [_mask(c) for c in itertools.combinations(range(self.n), self.k)
                 if _mask(c) & self.J]
        return SetFamily(self.n, self.k, tuple(edges))

    def size(self) -> int:
        # complement count: k-sets avoiding J
        j = bin(self.J).count("1")
        return math.comb(self.n, self.k) - math.comb(self.n - j, self.k)


def generated_family(n: int, k: int, generators) -> SetFamily:
    """G_{n,k}(T) = union over T of {A: T subset A}."""
    if math.comb(n, k) > MAX_FAMILY_ENUM:
        raise ValueError("generator budget exceeded: ground family too large to enumerate")
    gens = [int(t) for t in generators]
    edges = []
    for c in itertools.combinations(range(n), k):
        m = _mask(c)
        if any(m & t == t for t in gens):
            edges.append(m)
    return SetFamily(n, k, tuple(edges))


def up_closure(masks, n: int) -> tuple:
    """All supersets within [n] of the given masks; monotone and idempotent."""
    if n > 22:
        raise ValueError("up-closure enumeration needs n <= 22")
    base = sorted(set(int(m) for m in masks))
    out = set()
    for x in range(1 << n):
        for m in base:
            if x & m == m:
                out.add(x)
                break
    return tuple(sorted(out))


def mu_p_masks(masks, n: int, p: float) -> float:
    return float(sum(p ** bin(m).count("1") * (1.0 - p) ** (n - bin(m).count("1"))
                     for m in masks))


# ---------------------------------------------------------------------------
# hypergraphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Hypergraph:
    """Edges over integer-labeled vertices; uniformity may vary (links)."""

    vertices: tuple
    edges: tuple = field(default=())

    def __post_init__(self):
        vs = tuple(sorted(set(self.vertices)))
        es = tuple(frozenset(e) for e in self.edges)
        if len(set(es)) != len(es):
            raise ValueError("repeated edges")
        for e in es:
            if not e:
                raise ValueError("empty edge")
            if not e <= set(vs):
                raise ValueError(f"edge {sorted(e)} uses unknown vertices")
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", es)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def max_edge_size(self) -> int:
        return max((len(e) for e in self.edges), default=0)

    def degree(self, v) -> int:
        return sum(1 for e in self.edges if v in e)

    def max_degree(self) -> int:
        return max((self.degree(v) for v in self.vertices), default=0)

    def delete_edge(self, e) -> "Hypergraph":
        e = frozenset(e)
        if e not in self.edges:
            raise ValueError("no such edge")
        return Hypergraph(self.vertices,
                          tuple(x for x in self.edges if x != e))

    def delete_vertex(self, v) -> "Hypergraph":
        if v not in self.vertices:
            raise ValueError("no such vertex")
        return Hypergraph(tuple(x for x in self.vertices if x != v),
                          tuple(e for e in self.edges if v not in e))

    def matchings(self, size: int):
        """All matchings (sets of pairwise disjoint edges) of exactly size."""
        for combo in itertools.combinations(self.edges, size):
            union = set()
            ok = True
            for e in combo:
                if union & e:
                    ok = False
                    break
                union |= e
            if ok:
                yield combo


def path_graph(num_edges: int) -> Hypergraph:
    verts = tuple(range(1, num_edges + 2))
    return Hypergraph(verts, tuple({i, i + 1} for i in range(1, num_edges + 1)))


def matching_graph(s: int, r: int = 2) -> Hypergraph:
    verts = tuple(range(1, s * r + 1))
    return Hypergraph(verts, tuple(set(range(i * r + 1, (i + 1) * r + 1))
                                   for i in range(s)))


def complete_graph(m: int) -> Hypergraph:
    verts = tuple(range(1, m + 1))
    return Hypergraph(verts, tuple({a, b} for a, b in
                                   itertools.combinations(verts, 2)))


# ---------------------------------------------------------------------------
# expansion and cover numbers
# ---------------------------------------------------------------------------

def expand(G: Hypergraph, k: int) -> Hypergraph:
    """The k-expansion G+(k): each edge gains its own fresh vertices,
    labeled base + i*k + j for edge index i and slot j."""
    if k < G.max_edge_size:
        raise ValueError(f"k = {k} below the largest edge size "
                         f"{G.max_edge_size}")
    for v in G.vertices:
        if not isinstance(v, int):
            raise ValueError("expansion needs integer vertex labels")
    base = max(G.vertices, default=0) + 1
    new_edges = []
    new_verts = list(G.vertices)
    for i, e in enumerate(sorted(G.edges, key=sorted)):
        fresh = [base + i * k + j for j in range(k - len(e))]
        new_verts.extend(fresh)
        new_edges.append(set(e) | set(fresh))
    return Hypergraph(tuple(new_verts), tuple(new_edges))


def _min_transversal(edges) -> tuple:
    """(tau, witness): minimum set meeting every edge at least once."""
    edges = [frozenset(e) for e in edges]
    if not edges:
        return 0, frozenset()
    # one vertex per edge is always a transversal
    best = [frozenset(sorted(e)[0] for e in edges)]

    def dfs(S):
        if len(S) >= len(best[0]):
            return
        uncovered = [e for e in edges if not e & S]
        if not uncovered:
            best[0] = frozenset(S)
            return
        # branch on a smallest uncovered edge
        e = min(uncovered, key=len)
        for v in sorted(e):
            dfs(S | {v})

    dfs(frozenset())
    return len(best[0]), best[0]


def _min_crosscut(edges) -> tuple:
    """(cc, witness): minimum S with |E cap S| = 1 for every edge; the
    search picks one representative per edge, which is exhaustive since a
    minimal crosscut contains nothing outside the edges."""
    edges = [frozenset(e) for e in edges]
    if not edges:
        return 0, frozenset()
    best = [None]

    def dfs(i, S):
        if best[0] is not None and len(S) >= len(best[0]):
            return
        if i == len(edges):
            best[0] = frozenset(S)
            return
        hit = len(edges[i] & S)
        if hit > 1:
            return
        if hit == 1:
            dfs(i + 1, S)
            return
        for v in sorted(edges[i]):
            if all(len(e & (S | {v})) <= 1 for e in edges):
                dfs(i + 1, S | {v})

    dfs(0, frozenset())
    # one private expansion vertex per edge always works, so a crosscut
    # exists whenever this is called on an expansion
    if best[0] is None:
        raise ValueError("no crosscut exists for these edges")
    return len(best[0]), best[0]


def cover_numbers(G: Hypergraph, k: int | None = None) -> dict:
    """tau(G) and cc(G) with witnesses; cc computed on G+(k), default
    k = r+1 (its value is independent of the choice for k >= r+1)."""
    if not G.edges:
        raise ValueError("cover numbers need a nonempty hypergraph")
    r = G.max_edge_size
    if k is None:
        k = r + 1
    if k < r + 1:
        raise ValueError("crosscuts need k >= r+1")
    tau, tau_set = _min_transversal(G.edges)
    cc, cc_set = _min_crosscut(expand(G, k).edges)
    if tau > cc:
        raise AssertionError("transversal exceeded crosscut")
    return {"tau": tau, "cc": cc,
            "tau_witness": tuple(sorted(tau_set)),
            "cc_witness": tuple(sorted(cc_set))}


def _tau_cc(G: Hypergraph) -> tuple:
    """Bare (tau, cc) with the empty-graph convention tau = cc = 0."""
    if not G.edges:
        return 0, 0
    nums = cover_numbers(G)
    return nums["tau"], nums["cc"]


# ---------------------------------------------------------------------------
# compressions and shadows
# ---------------------------------------------------------------------------

def compress(F: SetFamily, i: int, j: int) -> SetFamily:
    """C_{i,j}(F) = {C_{i,j}(F)} cup {F: C_{i,j}(F) in F}, where C_{i,j}
    moves j to i in sets containing j but not i. Preserves |F|."""
    if i == j:
        raise ValueError("compression needs i != j")
    if not (0 <= i < F.n and 0 <= j < F.n):
        raise ValueError("coordinates out of range")
    present = set(F.edges)

    def move(e):
        if (e >> j) & 1 and not (e >> i) & 1:
            return (e & ~(1 << j)) | (1 << i)
        return e

    out = {move(e) for e in present} | {e for e in present if move(e) in present}
    if len(out) != len(present):
        raise AssertionError("compression changed the family size")
    return SetFamily(F.n, F.k, tuple(out))


def shadow(F: SetFamily, ell: int | None = None,
           fat: tuple | None = None) -> SetFamily:
    """Plain ell-shadow (all ell-subsets of edges), or with fat=(r, c) the
    c-fat r-shadow {A: mu(F^A_A) >= c}."""
    if (ell is None) == (fat is None):
        raise ValueError("pass exactly one of ell= or fat=")
    if ell is not None:
        if not 0 <= ell <= F.k:
            raise ValueError("shadow level must be within 0..k")
        out = set()
        for e in F.edges:
            for sub in itertools.combinations(_bits(e), ell):
                out.add(_mask(sub))
        return SetFamily(F.n, ell, tuple(out))
    r, c = fat
    if not 0 <= r <= F.k:
        raise ValueError("fat shadow level must be within 0..k")
    out = []
    for combo in itertools.combinations(range(F.n), r):
        A = _mask(combo)
        if F.link_measure(A, A) + 1e-12 >= c:
            out.append(A)
    return SetFamily(F.n, r, tuple(out))


# ---------------------------------------------------------------------------
# pseudorandomness
# ---------------------------------------------------------------------------

def _subsets_up_to(n: int, a: int):
    for size in range(a + 1):
        yield from (map(_mask, itertools.combinations(range(n), size)))


def pseudorandomness_report(F: SetFamily, a: int, r: int, eps: float,
                            delta: float, p: float | None = None) -> dict:
    """Exhaustive uncapturability and globalness over |J| <= a, plus the
    p-biased restriction variant mu_p(f_{J->1}) <= mu_p(f) + delta over
    |J| <= r on the family's indicator (default p = k/n). Equality at a
    threshold is reported as a boundary case, not silently decided."""
    budget = sum(math.comb(F.n, s) for s in range(max(a, r) + 1))
    if budget > MAX_SUBSET_ENUM:
        raise ValueError("subset enumeration budget exceeded")
    if p is None:
        p = F.k / F.n

    uncap_witness, glob_witness, boundary = None, None, []
    for J in _subsets_up_to(F.n, a):
        away = F.link_measure(0, J)
        if abs(away - eps) <= 1e-12:
            boundary.append(("uncapturable", J, away))
        if away < eps - 1e-12 and uncap_witness is None:
            uncap_witness = J
        full = F.link_measure(J, J)
        if abs(full - eps) <= 1e-12:
            boundary.append(("global", J, full))
        if full > eps + 1e-12 and glob_witness is None:
            glob_witness = J

    mu_p_f = float(sum(p ** (F.k) * (1.0 - p) ** (F.n - F.k)
                       for _ in F.edges))
    p_witness = None
    for J in _subsets_up_to(F.n, r):
        nj = bin(J).count("1")
        restricted = float(sum(
            p ** (F.k - nj) * (1.0 - p) ** (F.n - nj - (F.k - nj))
            for e in F.edges if e & J == J))
        if restricted > mu_p_f + delta + 1e-12:
            p_witness = J
            break

    return {
        "a": a, "r": r, "eps": eps, "delta": delta, "p": p,
        "uncapturable": {"holds": uncap_witness is None,
                         "witness": uncap_witness},
        "global": {"holds": glob_witness is None, "witness": glob_witness},
        "p_global": {"holds": p_witness is None, "witness": p_witness,
                     "mu_p": mu_p_f},
        "boundary_cases": boundary,
    }


def junta_extract(F: SetFamily, beta: float) -> tuple:
    """J = {i: mu(F^i_i) > beta} and the residual F^empty_J. When
    |J| < n/2k the residual is asserted (1, 2 beta)-global; otherwise a
    warning reports that the conclusion is not guaranteed."""
    J_bits = [i for i in range(F.n)
              if F.link_measure(1 << i, 1 << i) > beta]
    J = _mask(J_bits)
    residual = F.link(0, J)
    hypothesis = F.k >= 1 and len(J_bits) < F.n / (2 * F.k)
    if hypothesis:
        # (1, 2 beta)-global: every |J'| <= 1 link small; the empty link
        # is the average of the singleton ones for uniform families
        for i in range(residual.n):
            m = residual.link_measure(1 << i, 1 << i)
            if m > 2 * beta + 1e-12:
                raise AssertionError(
                    f"residual link {i} has measure {m} > 2 beta")
        if residual.mu() > 2 * beta + 1e-12:
            raise AssertionError("residual measure exceeds 2 beta")
    else:
        warnings.warn("high-degree set too large for the globalness "
                      "conclusion; residual returned unchecked")
    return tuple(J_bits), residual


# ---------------------------------------------------------------------------
# cross containment
# ---------------------------------------------------------------------------

def contains_cross(families, H: Hypergraph):
    """Search for an injection phi: V(H) -> [n] with phi(e_i) in F_i, over
    all assignments of H's edges to the families. Returns the embedding or
    None; the search is exhaustive."""
    s = len(H.edges)
    if len(families) != s:
        raise ValueError("need one family per edge")
    if s == 0:
        return {"phi": {}, "assignment": ()}
    n = families[0].n
    if any(f.n != n for f in families):
        raise ValueError("families must share a ground set")
    if len(H.vertices) > n:
        return None
    edge_list = list(H.edges)
    edge_sets = [set(f.edges) for f in families]

    verts = sorted(H.vertices, key=lambda v: -H.degree(v))
    isolated = [v for v in verts if H.degree(v) == 0]
    verts = [v for v in verts if H.degree(v) > 0]

    any_size_match = False
    for pi in itertools.permutations(range(s)):
        if any(len(edge_list[pi[i]]) != families[i].k for i in range(s)):
            continue
        any_size_match = True
        # fam_of[e] = family index that edge e must land in
        fam_of = {pi[i]: i for i in range(s)}
        phi = {}
        used = set()

        def ok_after(v):
            for ei, e in enumerate(edge_list):
                if v in e and all(u in phi for u in e):
                    img = _mask(phi[u] for u in e)
                    if img not in edge_sets[fam_of[ei]]:
                        return False
            return True

        def dfs(idx):
            if idx == len(verts):
                return True
            v = verts[idx]
            for target in range(n):
                if target in used:
                    continue
                phi[v] = target
                used.add(target)
                if ok_after(v) and dfs(idx + 1):
                    return True
                del phi[v]
                used.discard(target)
            return False

        if dfs(0):
            spare = iter(t for t in range(n) if t not in used)
            for v in isolated:
                phi[v] = next(spare)
            return {"phi": dict(phi), "assignment": tuple(pi)}
    if not any_size_match:
        raise ValueError("edge sizes match no assignment of families")
    return None


def family_contains(F: SetFamily, H: Hypergraph) -> bool:
    return contains_cross([F] * len(H.edges), H) is not None


# ---------------------------------------------------------------------------
# exact Turan numbers
# ---------------------------------------------------------------------------

def turan_exact(G: Hypergraph, k: int, n: int) -> tuple:
    """ex(n, G+(k)) by branch and bound over lexicographic k-sets, seeded
    with the star and crosscut-star constructions as incumbents."""
    H = expand(G, k)
    total = math.comb(n, k)
    if total > MAX_TURAN_SETS:
        raise ValueError("exact-search budget exceeded: too many candidate sets")
    if len(H.vertices) > n:
        # no room for any copy: the complete family is extremal
        return total, [SetFamily.complete(n, k)]

    candidates = [_mask(c) for c in itertools.combinations(range(n), k)]
    tau, cc = _tau_cc(G)

    def is_free(edges):
        return not family_contains(SetFamily(n, k, tuple(edges)), H)

    incumbents = []
    if tau >= 1:
        star = Star(n, k, _mask(range(tau - 1))).family()
        if is_free(star.edges):
            incumbents.append(list(star.edges))
    if cc >= 1:
        one_point = [m for m in candidates
                     if bin(m & _mask(range(cc - 1))).count("1") == 1]
        if is_free(one_point):
            incumbents.append(one_point)

    best_size = max((len(x) for x in incumbents), default=0)
    witnesses = [tuple(sorted(x)) for x in incumbents if len(x) == best_size]

    def dfs(idx, chosen):
        nonlocal best_size, witnesses
        if len(chosen) + (len(candidates) - idx) < best_size:
            return
        if idx == len(candidates):
            if len(chosen) > best_size:
                best_size, witnesses = len(chosen), [tuple(chosen)]
            elif len(chosen) == best_size and tuple(chosen) not in witnesses \
                    and len(witnesses) < 4:
                witnesses.append(tuple(chosen))
            return
        cand = candidates[idx]
        chosen.append(cand)
        if is_free(chosen):
            dfs(idx + 1, chosen)
        chosen.pop()
        dfs(idx + 1, chosen)

    dfs(0, [])
    return best_size, [SetFamily(n, k, w) for w in witnesses]


# ---------------------------------------------------------------------------
# criticality
# ---------------------------------------------------------------------------

def _max_bounded_graph(a1: int, a2: int) -> tuple:
    """F_{a1 a2}: a graph with the most edges subject to max degree < a1
    and matching number < a2 (exact search on a sufficient vertex pool).
    Returns (num_edges, edge tuple on integer labels)."""
    if a1 <= 1 or a2 <= 1:
        return 0, ()
    # any such graph has a vertex cover of size <= 2(a2-1), each covering
    # < a1 edges, so 2(a1-1)(a2-1) edges and twice as many vertices suffice
    cap_edges = 2 * (a1 - 1) * (a2 - 1)
    pool = min(4 * (a1 - 1) * (a2 - 1) + 2, 12)
    cand = list(itertools.combinations(range(1, pool + 1), 2))

    def ok(edges):
        deg = {}
        for e in edges:
            for v in e:
                deg[v] = deg.get(v, 0) + 1
                if deg[v] >= a1:
                    return False
        g = Hypergraph(tuple(range(1, pool + 1)), tuple(set(e) for e in edges))
        return next(g.matchings(a2), None) is None

    best = [0, ()]

    def dfs(idx, chosen):
        if len(chosen) > best[0]:
            best[0], best[1] = len(chosen), tuple(chosen)
        if len(chosen) >= cap_edges or idx == len(cand):
            return
        if len(chosen) + (len(cand) - idx) <= best[0]:
            return
        e = cand[idx]
        chosen.append(e)
        if ok(chosen):
            dfs(idx + 1, chosen)
        chosen.pop()
        dfs(idx + 1, chosen)

    dfs(0, [])
    return best[0], best[1]


def criticality_classify(G: Hypergraph, n: int | None = None,
                         k: int | None = None) -> dict:
    """Criticality report: the per-edge condition
    cc(G-e) = tau(G-e) < tau(G) = cc(G), the (a1, a2) generalization
    (vertex deletions scanned by degree, matchings by size), and the
    extremal construction built when n, k are supplied."""
    if not G.edges:
        raise ValueError("classification needs a nonempty hypergraph")
    tau, cc = _tau_cc(G)
    report = {"tau": tau, "cc": cc, "tau_equals_cc": tau == cc,
              "critical": False, "critical_edge": None,
              "a1": None, "a2": None, "f_a1a2": None, "family": None}

    for e in G.edges:
        t2, c2 = _tau_cc(G.delete_edge(e))
        if c2 == t2 < tau == cc:
            report["critical"] = True
            report["critical_edge"] = tuple(sorted(e))
            break

    if tau != cc:
        return report

    max_deg = G.max_degree()
    for a1 in range(1, max_deg + 2):
        drop = any(G.degree(x) <= a1
                   and _tau_cc(G.delete_vertex(x))[1] < cc
                   for x in G.vertices)
        stable = all(_tau_cc(G.delete_vertex(x))[0] == tau
                     for x in G.vertices if G.degree(x) < a1)
        if drop and stable:
            report["a1"] = a1
            break

    for a2 in range(1, G.num_edges + 1):
        drop = any(_tau_cc(Hypergraph(G.vertices,
                                      tuple(e for e in G.edges
                                            if e not in M)))[1] < cc
                   for size in range(1, a2 + 1)
                   for M in G.matchings(size))
        stable = all(_tau_cc(Hypergraph(G.vertices,
                                        tuple(e for e in G.edges
                                              if e not in M)))[0] == tau
                     for size in range(1, a2)
                     for M in G.matchings(size))
        if drop and stable:
            report["a2"] = a2
            break

    if report["a1"] is not None and report["a2"] is not None:
        m, edges = _max_bounded_graph(report["a1"], report["a2"])
        report["f_a1a2"] = {"num_edges": m, "edges": edges}
        if n is not None and k is not None:
            # cc - 1 singletons, then the bounded graph on fresh vertices
            gens = [1 << i for i in range(cc - 1)]
            used = cc - 1
            relabel = {}
            for e in edges:
                for v in e:
                    if v not in relabel:
                        relabel[v] = used
                        used += 1
            gens.extend(_mask(relabel[v] for v in e) for e in edges)
            if used > n:
                raise ValueError("n too small for the extremal construction")
            report["family"] = generated_family(n, k, gens)
    return report
