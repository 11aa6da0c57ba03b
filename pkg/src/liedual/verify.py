"""Invariant suite behind ``liedual verify``.

Each check returns ``{"name", "status", "value", "tolerance", "detail"}`` with
``status`` one of ``pass``, ``fail`` or ``skip``. Checks that need a frequency
margin the band cannot provide are skipped rather than failed.
"""
from __future__ import annotations

import math

import numpy as np

from . import groups as grp
from . import multipliers as mult
from . import reps
from . import sobolev as sob
from . import symbols as sym
from .fields import interior
from .fourier import forward_transform, inverse_transform, plancherel_norm_sq, rule_for_band

DEFAULTS = {
    "orthogonality": 1e-10,
    "plancherel": 1e-10,
    "intertwiner": 1e-10,
    "generator_fd": 1e-8,
    "casimir": 1e-10,
    "leibniz": 1e-12,
    "isometry": 1e-8,
    "annihilation": 1e-10,
    "opnorm": 1e-8,
    "heat_mass": 1e-10,
    "heat_symmetry": 1e-10,
    "bi_invariance": 1e-10,
    "triangle": 1e-10,
}

# q1 / |x|^2 ranges per simple factor
_WEIGHT_RANGE = {"su2": (0.19, 0.51), "torus": (0.79, 2.01)}


def _result(name, value, tol, status=None, detail=""):
    if status is None:
        status = "pass" if value <= tol else "fail"
    return {"name": name, "status": status, "value": float(value) if value is not None else None,
            "tolerance": tol, "detail": detail}


def _skip(name, tol, why):
    return _result(name, None, tol, "skip", why)


def check_bi_invariance(G, rng, tol, n=200):
    g = grp.random_elements(G, n, rng)
    h = grp.random_elements(G, n, rng)
    conj = grp.batch_multiply(G, grp.batch_multiply(G, h, g), grp.batch_inverse(G, h))
    err = np.max(np.abs(grp.batch_distance(G, conj) - grp.batch_distance(G, g)))
    return _result("bi_invariance", err, tol)


def check_triangle(G, rng, tol, n=200):
    g = grp.random_elements(G, n, rng)
    h = grp.random_elements(G, n, rng)
    gh = grp.batch_distance(G, grp.batch_multiply(G, g, h))
    excess = np.max(gh - grp.batch_distance(G, g) - grp.batch_distance(G, h))
    return _result("triangle", max(float(excess), 0.0), tol)


def check_orthogonality(G, band, tol):
    rule = rule_for_band(G, band)
    cols = []
    for p in reps.enumerate_band(G, band):
        T = reps.rep_table(rule, p)
        cols.append(math.sqrt(reps.dim(G, p)) * T.reshape(rule.size, -1))
    A = np.concatenate(cols, axis=1)
    gram = (A.conj().T * rule.weights) @ A
    err = np.max(np.abs(gram - np.eye(gram.shape[0])))
    return _result("orthogonality", err, tol, detail=f"{gram.shape[0]} coefficients, {rule.size} nodes")


def check_plancherel(G, band, rng, tol, count=20):
    rule = rule_for_band(G, band)
    worst = 0.0
    for _ in range(count):
        c = sym.random_symbol(G, band, rng=rng)
        f = inverse_transform(c, rule)
        lhs = f.l2_norm_sq()
        rhs = plancherel_norm_sq(c)
        back = forward_transform(f, band)
        worst = max(worst, abs(lhs - rhs) / rhs,
                    max(np.max(np.abs(back.entry(p) - c.entry(p))) for p in c.domain) / math.sqrt(rhs))
    return _result("plancherel", worst, tol)


def check_intertwiner(G, band, rng, tol, samples=3):
    g = grp.random_elements(G, samples, rng)
    worst = 0.0
    for phi in reps.fundamental_set(G):
        Fphi = reps.evaluate_batch(G, phi, g)
        for pi in reps.enumerate_band(G, band):
            dec = reps.decompose_fund_tensor(G, phi, pi)
            U = dec.intertwiner
            Fpi = reps.evaluate_batch(G, pi, g)
            for k in range(samples):
                lhs = U @ np.kron(Fphi[k], Fpi[k]) @ U.conj().T
                rhs = np.zeros_like(lhs)
                for rho, off in zip(dec.summands, dec.offsets):
                    d = reps.dim(G, rho)
                    rhs[off:off + d, off:off + d] = reps.evaluate_batch(
                        G, rho, grp.batch_take(G, g, slice(k, k + 1)))[0]
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return _result("intertwiner", worst, tol)


def check_generators(G, band, tol, t=1e-5):
    worst = 0.0
    labels = reps.enumerate_band(G, band)
    for j in range(G.dim):
        c = np.zeros(G.dim)
        c[j] = t
        gp, gm = grp.exp_map(G, c), grp.exp_map(G, -c)
        for p in labels:
            fd = (reps.evaluate(G, p, gp) - reps.evaluate(G, p, gm)) / (2 * t)
            X = reps.infinitesimal(G, p, j)
            worst = max(worst, float(np.max(np.abs(fd - X))) / max(1.0, float(np.max(np.abs(X)))))
    return _result("generator_fd", worst, tol)


def check_casimir(G, band, tol):
    worst = 0.0
    for p in reps.enumerate_band(G, band):
        C = reps.casimir_operator(G, [reps.infinitesimal(G, p, j) for j in range(G.dim)])
        lam = reps.casimir_eigenvalue(G, p)
        worst = max(worst, float(np.max(np.abs(C - lam * np.eye(C.shape[0])))) / (1 + lam))
    return _result("casimir", worst, tol)


def _has_interior(G, band, steps):
    return bool(interior(G, reps.enumerate_band(G, band), steps))


def check_leibniz(G, band, rng, tol, pairs=5, symbol=None):
    if not _has_interior(G, band if symbol is None else symbol.band, 1):
        return _skip("leibniz", tol, "band has no margin-1 interior")
    worst = 0.0
    for _ in range(pairs):
        if symbol is None:
            s1 = sym.random_symbol(G, band, rng=rng, margin=1)
            s2 = sym.random_symbol(G, band, rng=rng, margin=1)
        else:
            s1 = symbol if symbol.margin >= 1 else symbol.with_margin(1)
            s2 = sym.random_symbol(G, symbol.band, rng=rng, margin=1)
        for phi in reps.fundamental_set(G):
            for pi in interior(G, s1.domain, 1):
                worst = max(worst, sym.leibniz_residual(phi, s1, s2, pi, relative=True))
        if symbol is not None:
            break
    return _result("leibniz", worst, tol)


def check_isometry(G, band, s, rng, tol, count=2):
    name = f"isometry_s{s}"
    if not _has_interior(G, band, s):
        return _skip(name, tol, f"band has no margin-{s} interior")
    worst = 0.0
    for _ in range(count):
        sigma = sym.random_symbol(G, band, rng=rng, margin=s)
        if not sigma.entries:
            return _skip(name, tol, "empty interior")
        a = sob.hs_norm_diffside(sigma, s)
        b = sob.hs_norm_kernelside(sigma, s, weight="qs")
        worst = max(worst, abs(a - b) / max(a, 1e-300))
    return _result(name, worst, tol)


def check_annihilation(G, band, tol):
    if not _has_interior(G, band, 2):
        return _skip("annihilation", tol, "band has no margin-2 interior")
    worst = 0.0
    for j in range(G.dim):
        rep = sym.annihilation_test(sym.fourier_of_X(G, band, (j,)), 2, tol)
        worst = max(worst, rep.max_norm)
    return _result("annihilation", worst, tol, detail="Delta^alpha F(X_j), |alpha| = 2")


def check_opnorm(G, band, rng, tol, count=3):
    worst = 0.0
    for _ in range(count):
        sigma = sym.random_symbol(G, band, rng=rng)
        A = sym.op_matrix(sigma)
        worst = max(worst, abs(np.linalg.norm(A, 2) - sym.linf_norm(sigma)) / sym.linf_norm(sigma))
    return _result("opnorm", worst, tol)


def check_heat(G, tol_mass, tol_sym, t=1.0):
    band = mult.heat_band(G, t)
    rule = rule_for_band(G, band)
    p = mult.heat_kernel(G, t, band=band, rule=rule)
    mass = abs(p.integral() - 1.0)
    inv = grp.batch_inverse(G, rule.nodes)
    p_inv = mult.heat_on_rule(G, t, grp.QuadratureRule(G, inv, rule.weights, None, None), band)
    symm = float(np.max(np.abs(p.values - p_inv.values)))
    pos = float(np.min(p.values.real))
    out = [_result("heat_mass", mass, tol_mass),
           _result("heat_symmetry", symm, tol_sym),
           _result("heat_positivity", pos, 0.0, "pass" if pos > 0 else "fail", f"min p_t = {pos:.6g}")]
    return out


def _weight_range(G):
    if G.kind == "product":
        rs = [_weight_range(F) for F in G.factors]
        return min(r[0] for r in rs), max(r[1] for r in rs)
    return _WEIGHT_RANGE[G.kind]


def check_weight_equivalence(G, band):
    rule = rule_for_band(G, band)
    r2 = grp.batch_distance(G, rule.nodes) ** 2
    q = sob.q1_values(rule).values
    mask = r2 > 1e-12
    ratio = q[mask] / r2[mask]
    lo, hi = _weight_range(G)
    ok = bool(ratio.min() >= lo and ratio.max() <= hi)
    return {"name": "weight_equivalence", "status": "pass" if ok else "fail",
            "value": [float(ratio.min()), float(ratio.max())], "tolerance": [lo, hi], "detail": ""}


def run_suite(G, band, seed=0, tolerances=None, symbol=None):
    tol = dict(DEFAULTS)
    if tolerances:
        tol.update({k: v for k, v in tolerances.items() if k in tol})
    rng = np.random.default_rng(seed)
    results = [
        check_bi_invariance(G, rng, tol["bi_invariance"]),
        check_triangle(G, rng, tol["triangle"]),
        check_orthogonality(G, band, tol["orthogonality"]),
        check_plancherel(G, band, rng, tol["plancherel"]),
        check_intertwiner(G, band, rng, tol["intertwiner"]),
        check_generators(G, band, tol["generator_fd"]),
        check_casimir(G, band, tol["casimir"]),
        check_leibniz(G, band, rng, tol["leibniz"]),
    ]
    for s in (1, 2, 3):
        results.append(check_isometry(G, band, s, rng, tol["isometry"]))
    results.append(check_annihilation(G, band, tol["annihilation"]))
    results.append(check_opnorm(G, band, rng, tol["opnorm"]))
    results.extend(check_heat(G, tol["heat_mass"], tol["heat_symmetry"]))
    results.append(check_weight_equivalence(G, band))
    if symbol is not None:
        r = check_leibniz(symbol.group, symbol.band, rng, tol["leibniz"], symbol=symbol)
        r["name"] = "leibniz_input_symbol"
        results.append(r)
    counts = {k: sum(r["status"] == k for r in results) for k in ("pass", "fail", "skip")}
    return {"group": G.to_json(), "band": band, "seed": seed, "results": results,
            "summary": counts, "all_pass": counts["fail"] == 0}
