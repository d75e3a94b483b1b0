"""Named verification runs over the building posets of F_q^n.

Each ``cmd_*`` function takes a :class:`RunConfig` and returns a list of
:class:`CheckReport` (one per verified instance).  Reports are plain data and
serialize to JSON; everything except the ``timing`` block is deterministic.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import asdict, dataclass, field

from . import homology as hz
from .buildings import (
    build_filtration,
    build_S,
    build_T,
    canonical_line_and_hyperplane,
    claim_isomorphism_witnesses,
    forgetful_map,
    line_hyperplane_choices,
    lower_link_set,
    manifest_line,
    restrict_S,
    tits_size,
    upper_link_set,
)
from .complexes import format_complex
from .ff_linalg import PrimeField, Subspace, enumerate_subspaces, subspace_span
from .poset import (
    FinitePoset,
    check_morse_decomposition,
    fiber,
    format_poset,
    height,
    is_cohen_macaulay,
    opposite,
    order_complex,
)

FORMAT_VERSION = "steinlab-run/1"
CACHE_VERSION = 1
CHECKS = ("solomon-tits", "charney", "theorem31", "corollary32",
          "surjectivity", "morse")


class ResourceCapExceeded(Exception):
    pass


@dataclass
class RunConfig:
    q: int
    n: int
    rank_v: int | None = None
    rank_k: int | None = None
    basis_v: list | None = None
    basis_k: list | None = None
    check: str | None = None
    cache_dir: str | None = None
    out: str | None = None
    all_subspaces: bool = False
    sweep_lh: bool = False
    modular_check: bool = True
    cm_links: bool | None = None
    max_seconds: float | None = None
    max_mb: int | None = None
    workers: int = 1

    def __post_init__(self):
        PrimeField(self.q)
        if self.n < 2:
            raise ValueError("n must be at least 2")
        for tag in ("v", "k"):
            basis = getattr(self, f"basis_{tag}")
            if basis is not None:
                s = subspace_span(basis, self.n, self.q)
                if not 0 < s.rank < self.n:
                    raise ValueError(f"{tag.upper()} must be proper and nonzero")

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("cache_dir")
        return d


@dataclass
class CheckReport:
    check: str
    params: dict
    passed: bool
    homology: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    witness: dict | None = None
    timing: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def sub_to_json(s: Subspace) -> list:
    return [list(r) for r in s.basis]


class Lab:
    """Shared state for a run: memoized posets, the homology cache, the clock."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.field = PrimeField(cfg.q)
        self.deadline = (time.monotonic() + cfg.max_seconds) if cfg.max_seconds else None
        self.cache_hits = 0
        self._memo: dict = {}

    def tick(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise ResourceCapExceeded(f"time cap of {self.cfg.max_seconds}s exceeded")

    def T(self, n=None):
        n = n or self.cfg.n
        key = ("T", n)
        if key not in self._memo:
            self._memo[key] = build_T(n, self.field)
        return self._memo[key]

    def S(self, n=None):
        n = n or self.cfg.n
        key = ("S", n)
        if key not in self._memo:
            self._memo[key] = build_S(n, self.field)
        return self._memo[key]

    # -- cache ------------------------------------------------------------

    def _cache_path(self, manifest: str, suffix: str) -> str | None:
        if not self.cfg.cache_dir:
            return None
        h = hashlib.sha256(f"{CACHE_VERSION}|{manifest}".encode()).hexdigest()[:24]
        return os.path.join(self.cfg.cache_dir, f"v{CACHE_VERSION}", h + suffix)

    def _write_atomic(self, path: str, text: str):
        os.makedirs(os.path.dirname(path), exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)

    def homology(self, manifest: str, poset: FinitePoset) -> tuple[hz.HomologySummary, int]:
        """Homology of the order complex of ``poset`` and the complex's dimension."""
        self.tick()
        path = self._cache_path(manifest, ".hom")
        if path and os.path.exists(path):
            with open(path) as fh:
                lines = fh.read().splitlines()
            if lines and lines[0] == manifest:
                self.cache_hits += 1
                dim = int(lines[1].split()[1])
                return hz.HomologySummary.from_lines("\n".join(lines[2:])), dim
        c = order_complex(poset)
        h = hz.homology(hz.boundaries(c), modular_check=self.cfg.modular_check)
        if path:
            self._write_atomic(path, f"{manifest}\ndim {c.dimension}\n{h.to_lines()}")
            self._write_atomic(path[:-4] + ".poset", f"{manifest}\n{format_poset(poset)}")
            self._write_atomic(path[:-4] + ".complex", f"{manifest}\n{format_complex(c)}")
        self.tick()
        return h, c.dimension

    def spherical(self, manifest: str, poset: FinitePoset, d: int):
        h, dim = self.homology(manifest, poset)
        return hz.summary_is_spherical(h, dim, d), h, dim

    def cm_default(self) -> bool:
        if self.cfg.cm_links is not None:
            return self.cfg.cm_links
        return tits_size(self.cfg.n, self.cfg.q) <= tits_size(3, 3)


def _params(cfg: RunConfig, **extra) -> dict:
    p = {"q": cfg.q, "n": cfg.n}
    p.update(extra)
    return p


def _concentration_witness(h: hz.HomologySummary, dim: int, d: int) -> dict:
    return {"expected_degree": d, "complex_dimension": dim,
            "nonzero_degrees": h.nonzero_degrees(),
            "torsion": {str(k): v for k, v in h.torsion.items() if v}}


def select_subspaces(cfg: RunConfig, ranks, basis=None, all_of_rank=False) -> list[Subspace]:
    """Explicit basis if given, else the first (or every) subspace of each rank."""
    if basis is not None:
        return [subspace_span(basis, cfg.n, cfg.q)]
    out = []
    for k in ranks:
        subs = enumerate_subspaces(cfg.n, cfg.q, k)
        out.extend(subs if all_of_rank else subs[:1])
    return out


def _timed(fn):
    def run(cfg: RunConfig, lab: Lab | None = None) -> list[CheckReport]:
        lab = lab or Lab(cfg)
        t0 = time.monotonic()
        hits0 = lab.cache_hits
        try:
            reports = fn(cfg, lab)
        except (ResourceCapExceeded, MemoryError) as exc:
            reports = [CheckReport(fn.__name__.removeprefix("cmd_").replace("_", "-"),
                                   _params(cfg), False,
                                   witness={"partial": True, "reason": str(exc) or "memory cap exceeded"})]
        wall = time.monotonic() - t0
        for r in reports:
            r.timing = {"wall_seconds": round(wall, 3), "cache_hits": lab.cache_hits - hits0}
        return reports
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_timed
def cmd_solomon_tits(cfg: RunConfig, lab: Lab) -> list[CheckReport]:
    """T_M is (n-2)-spherical, optionally Cohen-Macaulay through all chain links."""
    n, q = cfg.n, cfg.q
    t = lab.T()
    ok, h, dim = lab.spherical(manifest_line("T", q, n), t.poset, n - 2)
    rep = CheckReport("solomon-tits", _params(cfg), ok, homology={"T": h.to_dict()})
    rep.details["elements"] = len(t)
    rep.details["top_betti"] = h.betti.get(n - 2, 0)
    if not ok:
        rep.witness = _concentration_witness(h, dim, n - 2)
    if lab.cm_default():
        cm, chain = is_cohen_macaulay(t.poset, n - 2)
        rep.details["cohen_macaulay"] = cm
        if not cm:
            rep.passed = False
            rep.witness = {"offending_chain": [sub_to_json(s) for s in chain]}
    return [rep]


@_timed
def cmd_charney(cfg: RunConfig, lab: Lab) -> list[CheckReport]:
    """S_M, S_M(<=, >=L) and S_M(<=H, >=) are (n-2)-spherical."""
    n, q = cfg.n, cfg.q
    s = lab.S()
    line = enumerate_subspaces(n, q, 1)[0]
    hyper = enumerate_subspaces(n, q, n - 1)[0]
    cases = [
        ("S", manifest_line("S", q, n), s.poset, {}),
        ("S(<=,>=L)", manifest_line("S", q, n, v=line), restrict_S(s, v_bound=line),
         {"L": sub_to_json(line)}),
        ("S(<=H,>=)", manifest_line("S", q, n, k=hyper), restrict_S(s, k_bound=hyper),
         {"H": sub_to_json(hyper)}),
    ]
    out = []
    for name, man, poset, extra in cases:
        ok, h, dim = lab.spherical(man, poset, n - 2)
        rep = CheckReport("charney", _params(cfg, poset=name, **extra), ok,
                          homology={name: h.to_dict()},
                          details={"elements": len(poset), "top_betti": h.betti.get(n - 2, 0)})
        if not ok:
            rep.witness = _concentration_witness(h, dim, n - 2)
        out.append(rep)
    return out


def _restriction_suite(cfg: RunConfig, lab: Lab, name: str, use_k: bool) -> list[CheckReport]:
    n, q = cfg.n, cfg.q
    s = lab.S()
    if use_k:
        coranks = [cfg.rank_k] if cfg.rank_k is not None else range(1, n)
        bounds = select_subspaces(cfg, [n - c for c in coranks], cfg.basis_k, cfg.all_subspaces)
    else:
        ranks = [cfg.rank_v] if cfg.rank_v is not None else range(1, n)
        bounds = select_subspaces(cfg, ranks, cfg.basis_v, cfg.all_subspaces)
    out = []
    seen: dict = {}
    for b in bounds:
        k = n - b.rank if use_k else b.rank
        d = n - k - 1
        if use_k:
            poset = restrict_S(s, k_bound=b)
            man = manifest_line("S", q, n, k=b)
        else:
            poset = restrict_S(s, v_bound=b)
            man = manifest_line("S", q, n, v=b)
        ok, h, dim = lab.spherical(man, poset, d)
        tag = "K" if use_k else "V"
        rep = CheckReport(name, _params(cfg, k=k, **{tag: sub_to_json(b)}), ok,
                          homology={tag: h.to_dict()},
                          details={"sphere_dim": d, "elements": len(poset),
                                   "betti": h.betti.get(d, 0)})
        if not ok:
            rep.witness = _concentration_witness(h, dim, d)
        # every subspace of a given rank lies in one GL_n orbit
        if k in seen and seen[k] != h.to_dict():
            rep.passed = False
            rep.witness = {"orbit_mismatch": True, "rank": k}
        seen.setdefault(k, h.to_dict())
        out.append(rep)
    return out


@_timed
def cmd_theorem31(cfg: RunConfig, lab: Lab) -> list[CheckReport]:
    """S_M(<=, >=V) is (n-k-1)-spherical for rank-k V."""
    return _restriction_suite(cfg, lab, "theorem31", use_k=False)


@_timed
def cmd_corollary32(cfg: RunConfig, lab: Lab) -> list[CheckReport]:
    """S_M(<=K, >=) is (n-k-1)-spherical for corank-k K."""
    return _restriction_suite(cfg, lab, "corollary32", use_k=True)


@_timed
def cmd_surjectivity(cfg: RunConfig, lab: Lab) -> list[CheckReport]:
    """(P,Q) -> Q induces a surjection on reduced H_{n-2} over the integers.

    En route: the map is monotone, the target is Cohen-Macaulay (when enabled),
    each fiber below V equals S_M(<=, >=V), ht(V) = n-k-1 and the fiber is
    ht(V)-spherical.
    """
    n, q = cfg.n, cfg.q
    s, t = lab.S(), lab.T()
    f = forgetful_map(s, t)
    top = opposite(t.poset)
    rep = CheckReport("surjectivity", _params(cfg), True)
    rep.details["monotone"] = f.is_monotone()
    if not rep.details["monotone"]:
        rep.passed = False
        rep.witness = {"non_monotone_pair": [repr(x) for x in f.monotonicity_violation()]}
        return [rep]
    if lab.cm_default():
        cm, chain = is_cohen_macaulay(top, n - 2)
        rep.details["target_cohen_macaulay"] = cm
        if not cm:
            rep.passed = False
            rep.witness = {"offending_chain": [sub_to_json(x) for x in chain]}
    heights = top.heights()
    ranks = [cfg.rank_v] if cfg.rank_v is not None else range(1, n)
    vs = select_subspaces(cfg, ranks, cfg.basis_v, cfg.all_subspaces)
    fibers = []
    for v in vs:
        lab.tick()
        k = v.rank
        fb = fiber(f, v)
        same = set(fb.elements) == set(restrict_S(s, v_bound=v).elements)
        ht = height(top, v)
        assert ht == heights[top.index[v]]
        ok, h, _ = lab.spherical(manifest_line("S", q, n, v=v), fb, ht)
        good = same and ht == n - k - 1 and ok
        fibers.append({"V": sub_to_json(v), "k": k, "height": ht, "fiber_matches": same,
                       "spherical": ok, "betti": h.betti.get(ht, 0)})
        if not good and rep.witness is None:
            rep.passed = False
            rep.witness = {"fiber": fibers[-1], "homology": h.to_dict()}
    rep.details["fibers"] = fibers
    lab.tick()
    scc = hz.boundaries(order_complex(s.poset))
    tcc = hz.boundaries(order_complex(top))
    fmap = hz.induced_chain_map(f, scc, tcc)
    lab.tick()
    res = hz.surjective_on_homology(fmap, scc, tcc, n - 2)
    rep.details.update(source_cycle_rank=res.source_cycle_rank,
                       target_cycle_rank=res.target_cycle_rank,
                       image_rank=res.image_rank, cokernel=res.cokernel)
    if not res.surjective:
        rep.passed = False
        rep.witness = {"cokernel": res.cokernel}
    return [rep]


def morse_instance(cfg: RunConfig, lab: Lab, v: Subspace, line=None, hyper=None) -> CheckReport:
    n, q = cfg.n, cfg.q
    k = v.rank
    st = build_filtration(n, lab.field, v, line, hyper, split=lab.S())
    x = st.x
    d = n - k - 1
    params = _params(cfg, k=k, V=sub_to_json(v), L=sub_to_json(st.line),
                     H=sub_to_json(st.hyperplane))
    rep = CheckReport("morse", params, True)
    failures = []

    def sph(poset, dim):
        lab.tick()
        c = order_complex(poset)
        h = hz.complex_homology(c, modular_check=cfg.modular_check)
        return hz.summary_is_spherical(h, c.dimension, dim), h

    antichains = {str(i): x.is_antichain(st.layers[i]) for i in st.layers}
    if not all(antichains.values()):
        failures.append({"claim": "antichain", "layers": antichains})
    ok, h = sph(x.induced(st.base), d)
    claim1 = {"sphere_dim": d, "spherical": ok, "betti": h.betti.get(d, 0)}
    if not ok:
        failures.append({"claim": 1, "homology": h.to_dict()})

    claim2, claim3 = [], []
    for i in range(-1, st.last + 1):
        prev = st.stage(i - 1)
        for a in sorted(st.layers[i], key=repr):
            up = upper_link_set(x, a) & prev
            ok2, h2 = sph(x.induced(up), i)
            low = lower_link_set(x, a) & prev
            ok3, h3 = sph(x.induced(low), n - k - i - 3)
            claim2.append(ok2)
            claim3.append(ok3)
            if not ok2:
                failures.append({"claim": 2, "layer": i, "element": repr(a),
                                 "homology": h2.to_dict()})
            if not ok3:
                failures.append({"claim": 3, "layer": i, "element": repr(a),
                                 "homology": h3.to_dict()})

    claim4 = {}
    for j in range(-1, st.last + 1):
        lab.tick()
        xj = x.induced(st.stage(j))
        mr = check_morse_decomposition(xj, st.stage(j - 1), d)
        claim4[str(j)] = {"hypotheses": mr.hypotheses_hold, "spherical": mr.whole_spherical}
        if not mr.passed:
            failures.append({"claim": 4, "stage": j, "antichain": mr.antichain,
                             "base_spherical": mr.base_spherical,
                             "link_failures": [repr(e) for e in mr.link_failures],
                             "spherical": mr.whole_spherical})

    wit = claim_isomorphism_witnesses(st)
    if not wit.ok:
        bad = [c for c in [wit.base_iso] + wit.upper_isos + wit.lower_isos if not c.ok]
        failures.append({"claim": "isomorphisms",
                         "bad": [(c.name, repr(c.element), c.domain_size, c.codomain_size)
                                 for c in bad],
                         "upper_identity": [repr(a) for a, hld in wit.upper_link_identity if not hld],
                         "lower_identity": [repr(a) for a, hld in wit.lower_link_identity if not hld]})
    rep.details = {
        "elements": len(x),
        "base_size": len(st.base),
        "layer_sizes": {str(i): len(st.layers[i]) for i in st.layers},
        "antichains": antichains,
        "claim1": claim1,
        "claim2_ok": all(claim2),
        "claim3_ok": all(claim3),
        "claim4": claim4,
        "link_identities": all(hh for _, hh in wit.upper_link_identity + wit.lower_link_identity),
        "isomorphisms": (1 + len(wit.upper_isos) + len(wit.lower_isos)),
        "uncovered_without_layer_minus_one": len(st.literal_gap()),
    }
    if failures:
        rep.passed = False
        rep.witness = {"failures": failures}
    return rep


@_timed
def cmd_morse(cfg: RunConfig, lab: Lab) -> list[CheckReport]:
    """Every claim of the filtration argument for S_M(<=, >=V), rank(V) >= 2."""
    n = cfg.n
    ranks = [cfg.rank_v] if cfg.rank_v is not None else range(2, n)
    vs = [v for v in select_subspaces(cfg, ranks, cfg.basis_v, cfg.all_subspaces)
          if v.rank >= 2]
    out = []
    for v in vs:
        choices = (list(line_hyperplane_choices(v)) if cfg.sweep_lh
                   else [canonical_line_and_hyperplane(v)])
        for line, hyper in choices:
            out.append(morse_instance(cfg, lab, v, line, hyper))
    return out


COMMANDS = {
    "solomon-tits": cmd_solomon_tits,
    "charney": cmd_charney,
    "theorem31": cmd_theorem31,
    "corollary32": cmd_corollary32,
    "surjectivity": cmd_surjectivity,
    "morse": cmd_morse,
}


def _run_one(args):
    name, cfg = args
    return [r.to_dict() for r in COMMANDS[name](cfg)]


def run_checks(cfg: RunConfig, names) -> list[dict]:
    """Run the named checks, in parallel processes when ``cfg.workers > 1``."""
    names = list(names)
    if cfg.workers > 1 and len(names) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            results = list(ex.map(_run_one, [(nm, cfg) for nm in names]))
    else:
        lab = Lab(cfg)
        results = [[r.to_dict() for r in COMMANDS[nm](cfg, lab)] for nm in names]
    return [r for batch in results for r in batch]


def cmd_report(reports: list[dict], config: dict | None = None) -> dict:
    """Merge report dicts into one document with a summary table."""
    rows = {}
    for r in reports:
        p = r["params"]
        key = (r["check"], p.get("q"), p.get("n"), p.get("k"))
        row = rows.setdefault(key, {"check": key[0], "q": key[1], "n": key[2], "k": key[3],
                                    "instances": 0, "passed": 0})
        row["instances"] += 1
        row["passed"] += bool(r["passed"])
    table = sorted(rows.values(), key=lambda x: (x["check"], x["q"], x["n"],
                                                 -1 if x["k"] is None else x["k"]))
    return {
        "format": FORMAT_VERSION,
        "config": config or {},
        "reports": reports,
        "summary": table,
        "all_passed": all(r["passed"] for r in reports),
    }


def summary_table(doc: dict) -> str:
    lines = [f"{'check':<14}{'q':>3}{'n':>3}{'k':>4}  {'pass/total':>10}  status"]
    for row in doc["summary"]:
        k = "-" if row["k"] is None else row["k"]
        status = "PASS" if row["passed"] == row["instances"] else "FAIL"
        lines.append(f"{row['check']:<14}{row['q']:>3}{row['n']:>3}{k:>4}  "
                     f"{row['passed']:>4}/{row['instances']:<5}  {status}")
    return "\n".join(lines)


def strip_timing(doc: dict) -> dict:
    """Copy of a run document without timing fields, for reproducibility checks."""
    doc = json.loads(json.dumps(doc))
    for r in doc.get("reports", []):
        r.pop("timing", None)
    return doc


__all__ = [
    "RunConfig", "CheckReport", "Lab", "ResourceCapExceeded", "COMMANDS", "CHECKS",
    "cmd_solomon_tits", "cmd_charney", "cmd_theorem31", "cmd_corollary32",
    "cmd_surjectivity", "cmd_morse", "cmd_report", "morse_instance", "run_checks",
    "select_subspaces", "summary_table", "strip_timing",
]
