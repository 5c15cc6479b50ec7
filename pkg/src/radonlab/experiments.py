"""Batch experiments: seeded, reproducible runs over the laboratory's claims,
emitting metric records, CSV rows, and plot series.

Every Monte Carlo estimate is keyed by (seed, stream, partition) so records
are byte-identical across reruns and worker counts.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dyadic import (
    admissible_constant,
    harmonic_params,
    interp_bound,
    maximal_params,
    min_interp_sum,
    normalize_params,
    proof_operator_bounds,
    proof_t0,
    proof_t1,
)
from .fixtures import Fixture, content_hash, load_fixture
from .knapp import (
    DimensionTriple,
    admissible_region,
    default_epsilons,
    knapp_sets,
    knapp_sweep,
    knapp_vertex,
    sharpness_verdict,
    slope_fit,
    to_operator_point,
)
from .lattice import LatticeSet, strip_annulus_measure
from .mc import box_volume, mc_run, uniform_in_box
from .models import (
    bracket_nondegeneracy_asymmetric,
    bracket_nondegeneracy_symmetric,
    get_model,
)
from .curvature import transport_flow_difference
from .poly import MultiPoly, PolyVectorField
from .sublevel import det2_phi, mc_sublevel
from .transforms import (
    AveragingOperator,
    check_generalized_ttt,
    exponents_from_sublevel,
    random_box_pair,
    sublevel_sharpness_criterion,
    ttt_form,
    refine,
)

EXPERIMENTS = ("triangle", "knapp", "sublevel", "ttt", "marc", "bracket",
               "oracle-refresh")

C_STRIP = 2.0 * (2.0 + math.pi)   # per-annulus determinant strip constant

CANONICAL_MODELS = ("maximal_r5", "maximal_c5", "harmonic_r8",
                    "asymmetric:2", "asymmetric:3")


@dataclass
class RunConfig:
    experiment: str
    model: str = "maximal_r5"
    seed: int = 20250809
    budget: int = 200_000
    epsilons: tuple[float, ...] | None = None
    alphas: tuple[float, ...] | None = None
    pairs: int = 20
    points: tuple[str, ...] | None = None   # "3/4,3/4"-style verdict points
    output_dir: str = "lab_out"
    workers: int = 1

    KNOWN_KEYS = ("experiment", "model", "seed", "budget", "epsilons", "alphas",
                  "pairs", "points", "output_dir", "workers")

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; "
                             f"choose from {EXPERIMENTS}")
        if self.budget < 10 ** 3:
            raise ValueError("budget must be at least 10^3")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    def hash(self) -> str:
        payload = {
            "experiment": self.experiment, "model": self.model,
            "seed": self.seed, "budget": self.budget,
            "epsilons": self.epsilons, "alphas": self.alphas,
            "pairs": self.pairs, "points": self.points,
        }
        body = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha1(body).hexdigest()


def metric(value, stderr=0.0, units="", seed=None, budget=None, fixture=None):
    out = {"value": value, "stderr": stderr, "units": units}
    if seed is not None:
        out["seed"] = seed
    if budget is not None:
        out["budget"] = budget
    if fixture is not None:
        out["fixture"] = fixture
    return out


@dataclass
class ResultRecord:
    experiment: str
    config_hash: str
    metrics: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    row_columns: list = field(default_factory=list)
    violations: int = 0
    warnings: list = field(default_factory=list)
    series: list | None = None
    series_labels: tuple = ("x", "y", "")


def _frac_str(q: tuple[Fraction, Fraction]) -> str:
    return f"{q[0].numerator}/{q[0].denominator},{q[1].numerator}/{q[1].denominator}"


def _parse_point(text: str) -> tuple[Fraction, Fraction]:
    a, b = text.split(",")
    return Fraction(a), Fraction(b)


# ---------------------------------------------------------------------------
# triangle
# ---------------------------------------------------------------------------

def run_triangle(cfg: RunConfig) -> ResultRecord:
    rec = ResultRecord("triangle", cfg.hash())
    rec.row_columns = ["model", "n_L", "n_R", "ell", "vertex", "operator_point",
                       "sublevel_match", "sharp_criterion"]
    for mid in CANONICAL_MODELS:
        m = get_model(mid)
        dims = DimensionTriple(*m.dimension_triple)
        vertex = knapp_vertex(dims)
        op_pt = to_operator_point(vertex)
        match = sharp = ""
        if m.sublevel_exponents is not None:
            match = exponents_from_sublevel(m.sublevel_exponents) == vertex
            sharp = sublevel_sharpness_criterion(m.sublevel_exponents,
                                                 m.dimension_triple)
            if not match or not sharp:
                rec.violations += 1
        rec.metrics[f"{mid}.vertex"] = metric(_frac_str(vertex), units="rational")
        rec.metrics[f"{mid}.operator_point"] = metric(_frac_str(op_pt), units="rational")
        if match != "":
            rec.metrics[f"{mid}.sublevel_match"] = metric(bool(match))
            rec.metrics[f"{mid}.sharp_criterion"] = metric(bool(sharp))
        rec.rows.append([mid, *m.dimension_triple, _frac_str(vertex),
                         _frac_str(op_pt), match, sharp])
    for d_r in range(1, 7):
        dims = DimensionTriple(2 * d_r, d_r + 1, d_r)
        vertex = knapp_vertex(dims)
        expect = (Fraction(d_r + 1, d_r + 2), Fraction(2, d_r + 2))
        if vertex != expect:
            rec.violations += 1
        rec.metrics[f"asym_family.d{d_r}.vertex"] = metric(_frac_str(vertex),
                                                           units="rational")
    return rec


# ---------------------------------------------------------------------------
# knapp
# ---------------------------------------------------------------------------

def _default_points(model) -> list[tuple[Fraction, Fraction]]:
    v = knapp_vertex(DimensionTriple(*model.dimension_triple))
    exterior = (v[0] + Fraction(1, 8), v[1] + Fraction(1, 8))
    centroid = ((1 + v[0]) / 3, (1 + v[1]) / 3)
    return [exterior, v, centroid]


def run_knapp(cfg: RunConfig) -> ResultRecord:
    rec = ResultRecord("knapp", cfg.hash())
    model = get_model(cfg.model)
    eps = tuple(cfg.epsilons) if cfg.epsilons else default_epsilons(model)
    rows = knapp_sweep(model, eps, cfg.budget, cfg.seed, workers=cfg.workers)
    rec.row_columns = ["model", "eps", "measF", "measG", "B", "stderrB", "seed"]
    rec.rows = [[cfg.model, r.eps, r.meas_f, r.meas_g, r.pairing,
                 r.pairing_stderr, r.seed] for r in rows]
    rec.series = [[r.eps, r.pairing] for r in rows]
    rec.series_labels = ("eps", "pairing", f"knapp pairing sweep: {cfg.model}")

    es = [r.eps for r in rows]
    for name, vals in [("measF", [r.meas_f for r in rows]),
                       ("measG", [r.meas_g for r in rows]),
                       ("B", [r.pairing for r in rows])]:
        slope, r2 = slope_fit(es, vals, min_points=min(4, len(es)))
        rec.metrics[f"slope_{name}"] = metric(slope, units="log2/log2",
                                              seed=cfg.seed, budget=cfg.budget)
        rec.metrics[f"slope_{name}_r2"] = metric(r2)

    points = ([_parse_point(p) for p in cfg.points] if cfg.points
              else _default_points(model))
    for q in points:
        res = sharpness_verdict(model, q[0], q[1], rows)
        key = f"verdict[{_frac_str(q)}]"
        rec.metrics[key] = metric(res.verdict, units=res.position)
        rec.metrics[key + ".ratio_slope"] = metric(res.ratio_slope)
        if res.position == "interior" and res.verdict == "violated":
            rec.violations += 1

    if cfg.model == "maximal_r5" and any(abs(e - 2 ** -4) < 1e-12 for e in es):
        try:
            fx = load_fixture("knapp_b_maximal_eps16")
            row = rows[[abs(e - 2 ** -4) < 1e-12 for e in es].index(True)]
            sigma = math.hypot(row.pairing_stderr, fx["stderr"])
            ok = abs(row.pairing - fx["value"]) <= 4 * sigma
            rec.metrics["fixture_b_eps16"] = metric(bool(ok), fixture=fx["hash"])
            if not ok:
                rec.violations += 1
        except FileNotFoundError as err:
            raise
    return rec


# ---------------------------------------------------------------------------
# sublevel
# ---------------------------------------------------------------------------

def strip_fixture_params(n: int = 20) -> list[dict]:
    rng = np.random.default_rng(2024)
    out = []
    for _ in range(n):
        r1 = float(rng.uniform(0.0, 1.5))
        out.append({"r1": r1, "r2": r1 + float(rng.uniform(0.1, 1.5)),
                    "w": float(rng.uniform(0.02, 1.0))})
    return out


def strip_mc_oracle(params: dict, samples: int, seed: int, workers: int = 1):
    r2 = params["r2"]
    box = np.array([[-r2, r2], [-r2, r2]])

    def batch(rng, n):
        pts = uniform_in_box(rng, box, n)
        r = np.linalg.norm(pts, axis=1)
        return ((np.abs(pts[:, 1]) <= params["w"])
                & (r >= params["r1"]) & (r < r2)).astype(float)

    return mc_run(batch, samples, seed, scale=box_volume(box), workers=workers)


def _disk(spacing=1 / 32):
    return LatticeSet.ball([0.0, 0.0], 1.0, spacing)


def run_sublevel(cfg: RunConfig) -> ResultRecord:
    rec = ResultRecord("sublevel", cfg.hash())
    rec.row_columns = ["check", "key", "value", "bound_or_ref", "stderr", "ok"]

    # closed-form strip areas against the frozen high-budget oracles
    strip_bad = 0
    for i, params in enumerate(strip_fixture_params()):
        fx = load_fixture(f"strip_annulus_mc_{i:02d}")
        exact = strip_annulus_measure(params["r1"], params["r2"], params["w"])
        ok = abs(exact - fx["value"]) <= 4 * fx["stderr"]
        strip_bad += not ok
        rec.rows.append(["strip", i, exact, fx["value"], fx["stderr"], ok])
    rec.metrics["strip_oracle_violations"] = metric(strip_bad, units="count")
    rec.violations += strip_bad

    # determinant sublevel mass fixture (unit disks, alpha = 0.1)
    fx = load_fixture("sublevel_disk_det")
    disk = _disk()
    est = mc_sublevel(det2_phi, 0.1, disk, disk, max(cfg.budget, 10 ** 5),
                      cfg.seed, workers=cfg.workers)
    sigma = math.hypot(est.stderr, fx["stderr"])
    ok = abs(est.value - fx["value"]) <= 4 * sigma
    rec.metrics["disk_det_fixture"] = metric(bool(ok), stderr=sigma,
                                             seed=cfg.seed, fixture=fx["hash"])
    rec.violations += not ok

    # per-annulus bounds on the (i, j) grid
    grid_bad = 0
    annuli = {i: LatticeSet.annulus(2, i, spacing=2.0 ** i / 16)
              for i in range(-4, 3)}
    stream = 0
    for i in range(-4, 3):
        for j in range(-4, 3):
            alpha = 0.1 * 2.0 ** (i + j)
            est = mc_sublevel(det2_phi, alpha, annuli[i], annuli[j],
                              max(cfg.budget // 2, 10 ** 4), cfg.seed,
                              workers=cfg.workers, stream=stream)
            stream += 1
            bound = C_STRIP * alpha * min(2.0 ** (i - j) * annuli[j].measure,
                                          2.0 ** (j - i) * annuli[i].measure)
            ok = est.value <= bound + 4 * est.stderr
            grid_bad += not ok
            rec.rows.append(["per_annulus", f"{i},{j}", est.value, bound,
                             est.stderr, ok])
    rec.metrics["per_annulus_violations"] = metric(grid_bad, units="count",
                                                   seed=cfg.seed, budget=cfg.budget)
    rec.violations += grid_bad

    # end-to-end bound: adversarial aligned annuli plus random pairs
    c_total = C_STRIP * admissible_constant(maximal_params())
    ring = annuli[0]
    alphas = tuple(cfg.alphas) if cfg.alphas else tuple(2.0 ** (-k) for k in range(1, 7))
    adv_bad = 0
    adv_vals = []
    for k, alpha in enumerate(alphas):
        est = mc_sublevel(det2_phi, alpha, ring, ring, cfg.budget, cfg.seed,
                          workers=cfg.workers, stream=100 + k)
        bound = c_total * alpha * math.sqrt(ring.measure * ring.measure)
        ok = est.value <= bound + 4 * est.stderr
        adv_bad += not ok
        adv_vals.append(est.value)
        rec.rows.append(["adversarial", alpha, est.value, bound, est.stderr, ok])
    slope, r2 = slope_fit(alphas, adv_vals, min_points=min(4, len(alphas)))
    rec.metrics["alpha_slope"] = metric(slope, units="log2/log2", seed=cfg.seed,
                                        budget=cfg.budget)
    rec.metrics["alpha_slope_r2"] = metric(r2)
    if abs(slope - 1.0) > 0.1:
        rec.violations += 1
    rec.series = [[a, v] for a, v in zip(alphas, adv_vals)]
    rec.series_labels = ("alpha", "sublevel mass", "adversarial determinant sublevel")

    rng = np.random.default_rng(cfg.seed)
    rand_bad = 0
    for k in range(cfg.pairs):
        boxes = []
        for _ in range(int(rng.integers(1, 4))):
            lo = rng.uniform(-1.5, 0.9, size=2)
            side = rng.uniform(0.3, 1.0, size=2)
            boxes.append(np.column_stack([lo, lo + side]))
        e_l = LatticeSet.from_boxes(boxes, 1 / 16, np.array([[-2.0, 2.0]] * 2))
        boxes = []
        for _ in range(int(rng.integers(1, 4))):
            lo = rng.uniform(-1.5, 0.9, size=2)
            side = rng.uniform(0.3, 1.0, size=2)
            boxes.append(np.column_stack([lo, lo + side]))
        e_r = LatticeSet.from_boxes(boxes, 1 / 16, np.array([[-2.0, 2.0]] * 2))
        if e_l.measure == 0 or e_r.measure == 0:
            continue
        alpha = 0.1
        est = mc_sublevel(det2_phi, alpha, e_l, e_r,
                          max(cfg.budget // 2, 10 ** 4), cfg.seed,
                          workers=cfg.workers, stream=200 + k)
        bound = c_total * alpha * math.sqrt(e_l.measure * e_r.measure)
        ok = est.value <= bound + 4 * est.stderr
        rand_bad += not ok
        rec.rows.append(["random_pair", k, est.value, bound, est.stderr, ok])
    rec.metrics["random_pair_violations"] = metric(rand_bad, units="count",
                                                   seed=cfg.seed)
    rec.violations += rand_bad
    return rec


# ---------------------------------------------------------------------------
# ttt
# ---------------------------------------------------------------------------

def run_ttt(cfg: RunConfig) -> ResultRecord:
    rec = ResultRecord("ttt", cfg.hash())
    model = get_model(cfg.model)
    op = AveragingOperator(model, nt=9)
    rng = np.random.default_rng(cfg.seed)
    rec.row_columns = ["pair", "pairing", "lhs", "rhs", "margin", "stderr",
                       "budget", "ok"]
    bad = 0
    min_slack = math.inf
    for k in range(cfg.pairs):
        f, g = random_box_pair(model, rng)
        budget = cfg.budget
        for stage in range(4):
            chk = check_generalized_ttt(op, f, g, budget, cfg.seed,
                                        workers=cfg.workers,
                                        stream=16 * k + stage)
            if chk.rhs > 0 and chk.stderr <= 0.01 * chk.rhs:
                break
            budget *= 4
        ok = chk.holds
        bad += not ok
        if chk.rhs > 0:
            min_slack = min(min_slack, chk.rhs / max(chk.lhs, 1e-300))
        rec.rows.append([k, chk.pairing, chk.lhs, chk.rhs, chk.margin,
                         chk.stderr, budget, ok])
    rec.metrics["violations"] = metric(bad, units="count", seed=cfg.seed,
                                       budget=cfg.budget)
    rec.metrics["pairs"] = metric(cfg.pairs, units="count")
    rec.metrics["min_rhs_over_lhs"] = metric(min_slack)
    rec.violations += bad

    if cfg.model == "maximal_r5":
        fx = load_fixture("ttt_maximal_boxes")
        f, g = random_box_pair(model, np.random.default_rng(fx["params"]["pair_seed"]))
        rp = refine(op, f, g)
        est = ttt_form(op, f, g, rp.f_refined, rp.g_refined,
                       max(cfg.budget, fx["samples"] // 10), cfg.seed,
                       workers=cfg.workers, stream=9999)
        sigma = math.hypot(est.stderr, fx["stderr"])
        ok = abs(est.value - fx["value"]) <= 4 * sigma
        rec.metrics["fixture_ttt"] = metric(bool(ok), stderr=sigma,
                                            fixture=fx["hash"])
        rec.violations += not ok
    return rec


# ---------------------------------------------------------------------------
# marc
# ---------------------------------------------------------------------------

def _random_seq_dict(rng, lo=-20, hi=20, density=0.4):
    from .dyadic import DyadicSeq

    data = {}
    for i in range(lo, hi + 1):
        if rng.random() < density:
            data[i] = float(rng.exponential(2.0))
    return DyadicSeq(data)


def run_marc(cfg: RunConfig) -> ResultRecord:
    rec = ResultRecord("marc", cfg.hash())
    rec.row_columns = ["family", "pair", "lhs", "rhs", "c_times_rhs", "ok"]
    n_pairs = max(cfg.pairs, 100)
    for family, params in (("maximal", maximal_params()),
                           ("harmonic", harmonic_params())):
        c = admissible_constant(params)
        fx = load_fixture(f"marc_constant_{family}")
        const_ok = abs(c - fx["value"]) < 1e-12
        rec.metrics[f"constant_{family}"] = metric(c, fixture=fx["hash"])
        rec.violations += not const_ok

        rng = np.random.default_rng(cfg.seed)
        bad = 0
        for k in range(n_pairs):
            f = _random_seq_dict(rng)
            g = _random_seq_dict(rng)
            lhs = min_interp_sum(params, f, g)
            rhs = interp_bound(params, f, g)
            ok = lhs <= c * rhs * (1 + 1e-12)
            bad += not ok
            if k < 10:
                rec.rows.append([family, k, lhs, rhs, c * rhs, ok])
        rec.metrics[f"violations_{family}"] = metric(bad, units="count",
                                                     seed=cfg.seed)
        rec.violations += bad

        # proof-operator bounds on random sequences
        norm = normalize_params(params)
        bounds = proof_operator_bounds(norm)
        t_bad = 0
        support = range(-60, 61)
        for _ in range(100):
            e = _random_seq_dict(rng)
            if not e.data:
                continue
            s = float(rng.uniform(-3, 3))
            t0e = proof_t0(norm, s, e, support)
            t1e = proof_t1(norm, s, e, support)
            e_inf, e_one = max(e.data.values()), e.total()
            if t0e.data and max(t0e.data.values()) > bounds["t0_inf"] * e_inf * (1 + 1e-12):
                t_bad += 1
            if t0e.total() > bounds["t0_one"] * e_one * (1 + 1e-12):
                t_bad += 1
            if t1e.data and max(t1e.data.values()) > bounds["t1_inf"] * e_inf * (1 + 1e-12):
                t_bad += 1
            if t1e.total() > bounds["t1_one"] * e_one * (1 + 1e-12):
                t_bad += 1
        rec.metrics[f"t_bound_violations_{family}"] = metric(t_bad, units="count")
        rec.violations += t_bad
    return rec


# ---------------------------------------------------------------------------
# bracket
# ---------------------------------------------------------------------------

def run_bracket(cfg: RunConfig) -> ResultRecord:
    rec = ResultRecord("bracket", cfg.hash())
    rec.row_columns = ["check", "key", "value", "ok"]
    rng = np.random.default_rng(cfg.seed)

    m5 = get_model("maximal_r5")
    fails = 0
    for k in range(50):
        pt = np.concatenate([rng.normal(size=5), rng.uniform(-1, 1, size=2)])
        v = rng.normal(size=2)
        vp = rng.normal(size=2)
        while abs(v[0] * vp[1] - v[1] * vp[0]) < 1e-3:
            vp = rng.normal(size=2)
        ok1, _ = bracket_nondegeneracy_symmetric(m5.frames, pt, v, vp)
        ok2, _ = bracket_nondegeneracy_symmetric(m5.frames, pt, v, vp,
                                                 swap_roles=True)
        fails += (not ok1) + (not ok2)
        rec.rows.append(["symmetric", k, f"{ok1}/{ok2}", ok1 and ok2])
    rec.metrics["symmetric_condition_failures"] = metric(fails, units="count",
                                                         seed=cfg.seed)
    rec.violations += fails

    for d_r in (2, 3):
        m = get_model(f"asymmetric:{d_r}")
        fails = 0
        for k in range(25):
            pt = rng.normal(size=m.ambient_dim)
            ok = bracket_nondegeneracy_asymmetric(m.frames, pt)
            fails += not ok
            rec.rows.append([f"asymmetric:{d_r}", k, ok, ok])
        rec.metrics[f"asymmetric_{d_r}_failures"] = metric(fails, units="count")
        rec.violations += fails

    # transported-derivative checks
    from .models import BilinearModel, scalar_product_q

    bil = BilinearModel(scalar_product_q(2))
    p = bil.incidence([0.3], [0.1, 0.4, -0.2], [0.6, -0.3], [0.2, 0.5])
    disc = max(transport_flow_difference(p, xr, h=0.25)[2]
               for xr in bil.frames.right)
    rec.metrics["bilinear_discrepancy"] = metric(disc)
    rec.violations += disc != 0.0

    dim = m5.ambient_dim
    t1 = MultiPoly.variable(dim, 5)
    v_field = PolyVectorField.from_dict(
        dim, {2: t1 * t1, 3: t1 * MultiPoly.variable(dim, 6)})
    p5 = m5.incidence([0.4, 0.3], [0.1, -0.2], [-0.3, 0.5], np.zeros(5))
    hs = [2.0 ** (-j) for j in range(3, 9)]
    discs = [transport_flow_difference(p5, v_field, h)[2] for h in hs]
    order, _ = slope_fit(hs, discs)
    rec.metrics["quadratic_field_order"] = metric(order, units="log2/log2")
    rec.violations += order < 0.9
    return rec


# ---------------------------------------------------------------------------
# oracle refresh
# ---------------------------------------------------------------------------

def oracle_specs() -> list[dict]:
    specs = []
    for i, params in enumerate(strip_fixture_params()):
        specs.append({"name": f"strip_annulus_mc_{i:02d}", "kind": "strip",
                      "params": params, "seed": 52000 + i, "samples": 10 ** 7})
    specs.append({"name": "sublevel_disk_det", "kind": "disk_det",
                  "params": {"alpha": 0.1, "spacing": 1 / 32},
                  "seed": 60001, "samples": 10 ** 8})
    specs.append({"name": "ttt_maximal_boxes", "kind": "ttt",
                  "params": {"pair_seed": 7}, "seed": 31415, "samples": 2 * 10 ** 6})
    specs.append({"name": "knapp_b_maximal_eps16", "kind": "knapp_b",
                  "params": {"eps": 2 ** -4}, "seed": 2718, "samples": 2 * 10 ** 6})
    specs.append({"name": "marc_constant_maximal", "kind": "marc_constant",
                  "params": {"family": "maximal"}, "seed": 0, "samples": 0})
    specs.append({"name": "marc_constant_harmonic", "kind": "marc_constant",
                  "params": {"family": "harmonic"}, "seed": 0, "samples": 0})
    return specs


def compute_oracle(spec: dict, workers: int = 1) -> Fixture:
    kind = spec["kind"]
    if kind == "strip":
        est = strip_mc_oracle(spec["params"], spec["samples"], spec["seed"],
                              workers=workers)
        return Fixture(spec["name"], est.value, est.stderr, spec["seed"],
                       spec["samples"], spec["params"])
    if kind == "disk_det":
        disk = _disk(spec["params"]["spacing"])
        est = mc_sublevel(det2_phi, spec["params"]["alpha"], disk, disk,
                          spec["samples"], spec["seed"], workers=workers)
        return Fixture(spec["name"], est.value, est.stderr, spec["seed"],
                       spec["samples"], spec["params"])
    if kind == "ttt":
        model = get_model("maximal_r5")
        op = AveragingOperator(model, nt=9)
        f, g = random_box_pair(model, np.random.default_rng(spec["params"]["pair_seed"]))
        rp = refine(op, f, g)
        est = ttt_form(op, f, g, rp.f_refined, rp.g_refined, spec["samples"],
                       spec["seed"], workers=workers)
        return Fixture(spec["name"], est.value, est.stderr, spec["seed"],
                       spec["samples"], spec["params"])
    if kind == "knapp_b":
        model = get_model("maximal_r5")
        op = AveragingOperator(model)
        pair = knapp_sets(model, spec["params"]["eps"])
        from .transforms import bilinear_form

        est = bilinear_form(op, pair.f, pair.g, spec["samples"], spec["seed"],
                            workers=workers)
        return Fixture(spec["name"], est.value, est.stderr, spec["seed"],
                       spec["samples"], spec["params"])
    if kind == "marc_constant":
        params = (maximal_params() if spec["params"]["family"] == "maximal"
                  else harmonic_params())
        return Fixture(spec["name"], admissible_constant(params), 0.0, 0, 0,
                       spec["params"])
    raise ValueError(f"unknown oracle kind {kind!r}")


RUNNERS = {
    "triangle": run_triangle,
    "knapp": run_knapp,
    "sublevel": run_sublevel,
    "ttt": run_ttt,
    "marc": run_marc,
    "bracket": run_bracket,
}
