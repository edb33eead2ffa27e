"""Command-line driver: evaluation, scans, experiments, verification.

Artifacts are JSON reports and RFC-4180 CSV tables.  Every artifact
embeds the form, its class-group data, the seed and budgets used, and a
fingerprint of the canonical config serialization, so identical configs
reproduce byte-identical outputs.

Exit codes: 0 success, 1 check failure, 2 usage error.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import sys

import numpy as np

from .quadforms import (
    QuadForm,
    build_class_group,
    characters,
    epstein_coefficients,
    reduce_form,
    split_prime_class_counts,
)
from .epstein import (
    EpsteinEvaluator,
    eval_lattice_oracle,
    fe_relative_residual,
)
from .lfunc import HeckeFamily, decomposition_residual, rep_count_oracle
from .zeros import (
    Rectangle,
    count_strip,
    domination_abscissa,
    find_zeros,
    first_zero_right_of,
    scan_line,
    winding_count,
)
from .jensen import detect_linearity, jensen_profile, zero_frequency
from .randmodel import (
    DensityMethod,
    DensityTarget,
    TorusModel,
    check_class_sum_condition,
    check_moment_bound,
    estimate_density,
    predicted_constant,
)


# -- plumbing ---------------------------------------------------------------


def _parse_form(text):
    try:
        a, b, c = (int(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"form must be 'a,b,c' integers, got {text!r}")
    Q = QuadForm(a, b, c)
    if not Q.is_positive_definite:
        raise ValueError(f"form {text} is not positive definite")
    return Q


def _parse_complex(text):
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"expected 're' or 're,im', got {text!r}")


def _fingerprint(config):
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _char_fingerprint(group):
    table = [[str(a) for a in ch.angles] for ch in characters(group)]
    return hashlib.sha256(json.dumps(table).encode()).hexdigest()[:16]


def _meta(Q, seed, budgets):
    group = build_class_group(Q.discriminant)
    config = {
        "form": [Q.a, Q.b, Q.c],
        "seed": seed,
        "budgets": budgets,
    }
    return {
        "form": [Q.a, Q.b, Q.c],
        "discriminant": Q.discriminant,
        "h": group.h,
        "w": group.w,
        "character_table": _char_fingerprint(group),
        "seed": seed,
        "budgets": budgets,
        "config_fingerprint": _fingerprint(config),
    }


def _jsonable(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj).__name__}")


def _emit_json(payload, path=None):
    text = json.dumps(payload, indent=2, sort_keys=True, default=_jsonable)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_csv(header, rows, path=None):
    buf = io.StringIO()
    w = csv.writer(buf)  # RFC 4180: CRLF line endings, '.' decimals
    w.writerow(header)
    w.writerows(rows)
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


# -- subcommands ------------------------------------------------------------


def cmd_eval(args):
    Q = _parse_form(args.form)
    s = _parse_complex(args.s)
    ev = EpsteinEvaluator(Q)
    v = ev.value(s)
    out = _meta(Q, None, {})
    out.update(
        {
            "s": [s.real, s.imag],
            "value": [v.real, v.imag],
            "error_bound": float(np.max(ev.error_bound(np.atleast_1d(s)))),
            "fe_relative_residual": fe_relative_residual(Q, s),
        }
    )
    if args.oracle:
        ref, tail = eval_lattice_oracle(Q, s, args.oracle_radius)
        out["oracle"] = [ref.real, ref.imag]
        out["oracle_tail_bound"] = tail
        out["oracle_abs_diff"] = abs(v - ref)
    _emit_json(out, args.json)
    return 0


def cmd_decompose(args):
    Q = _parse_form(args.form)
    s = _parse_complex(args.s)
    group = build_class_group(Q.discriminant)
    fam = HeckeFamily(group)
    co = epstein_coefficients(group, Q)
    terms = []
    for aj, ch in zip(co.a_list, co.chars):
        lv = complex(fam.eval_L(ch, np.array([s]))[0])
        terms.append(
            {
                "a_j": aj,
                "character_angles": [str(a) for a in ch.angles],
                "L_value": [lv.real, lv.imag],
            }
        )
    out = _meta(Q, None, {})
    out.update(
        {
            "s": [s.real, s.imag],
            "terms": terms,
            "residual": float(decomposition_residual(group, Q, np.array([s]))[0]),
        }
    )
    _emit_json(out, args.json)
    return 0


def cmd_zeros(args):
    Q = _parse_form(args.form)
    ev = EpsteinEvaluator(Q)
    budgets = {"T": args.T, "sigma1": args.sigma1, "sigma2": args.sigma2}
    if args.line is not None:
        budgets.update({"line": args.line, "tol": args.tol})
        recs = scan_line(ev, args.line, args.T, args.tol)
        total = len(recs)
    else:
        sc = count_strip(ev, args.sigma1, args.sigma2, args.T)
        recs, total = sc.zero_list, sc.winding_count
    rows = [
        [
            repr(r.location.real),
            repr(r.location.imag),
            repr(r.residual),
            r.certified,
        ]
        for r in recs
    ]
    if args.csv or not args.json:
        _emit_csv(["re", "im", "residual", "certified"], rows, args.csv)
    if args.json or not args.csv:
        out = _meta(Q, None, budgets)
        out.update(
            {
                "count": total,
                "zeros": [
                    [r.location.real, r.location.imag] for r in recs
                ],
            }
        )
        _emit_json(out, args.json)
    return 0


def cmd_jensen(args):
    Q = _parse_form(args.form)
    try:
        lo, hi, step = (float(x) for x in args.sigma_range.split(":"))
    except ValueError:
        raise ValueError("--sigma-range must be lo:hi:step")
    x = _parse_complex(args.x)
    ev = EpsteinEvaluator(Q)
    prof = jensen_profile(ev, lo, hi, args.T, x=x, spacing=step)
    rows = [
        [repr(float(s)), repr(float(p)), repr(float(e)), repr(float(d)),
         repr(float(d2))]
        for s, p, e, d, d2 in zip(
            prof.sigma_grid, prof.phi, prof.phi_err, prof.dphi, prof.d2phi
        )
    ]
    _emit_csv(["sigma", "phi", "err", "dphi", "d2phi"], rows, args.csv)
    if lo > 1.0:
        rep = detect_linearity(prof)
        out = _meta(Q, None, {"T": args.T, "sigma_range": [lo, hi, step]})
        out.update(
            {
                "intervals": [list(iv) for iv in rep.intervals],
                "slope_match": rep.slope_match,
            }
        )
        _emit_json(out, args.json)
    return 0


def cmd_density(args):
    Q = _parse_form(args.form)
    target = (
        DensityTarget.RATIO_AT_MINUS_A if args.ratio else DensityTarget.E_AT_X
    )
    budgets = {"n": args.n, "samples": args.samples, "seed": args.seed}
    out = _meta(Q, args.seed, budgets)
    if args.constant:
        s1, s2 = args.constant
        c, err = predicted_constant(
            Q, s1, s2, n=args.n, target=target,
            n_points=args.samples, seed=args.seed,
        )
        out.update({"c_pred": c, "c_pred_err": err, "strip": [s1, s2]})
    else:
        model = TorusModel(Q, args.n, args.sigma)
        method = (
            DensityMethod.FOURIER_INVERSION
            if args.method == "fourier"
            else DensityMethod.WEIGHTED_KDE
        )
        de = estimate_density(
            model, _parse_complex(args.x), method, target,
            n_points=args.samples, seed=args.seed,
        )
        out.update(
            {
                "sigma": args.sigma,
                "x": [de.x.real, de.x.imag],
                "G": de.G,
                "G_err": de.G_err,
                "method": args.method,
                "samples_used": de.samples_used,
            }
        )
    _emit_json(out, args.json)
    return 0


# -- verify -----------------------------------------------------------------


def _check_class_group():
    g = build_class_group(-20)
    ok = (
        g.h == 2
        and g.w == 2
        and set(g.classes) == {QuadForm(1, 0, 5), QuadForm(2, 2, 3)}
        and build_class_group(-23).h == 3
    )
    return ok, {"h": g.h, "w": g.w}


def _check_rep_identity():
    worst = 0.0
    for D in (-20, -23):
        g = build_class_group(D)
        from .lfunc import LSeries

        for Q in g.classes:
            co = epstein_coefficients(g, Q)
            bs = [LSeries(g, ch).coefficients(2000) for ch in co.chars]
            for m in range(1, 2000):
                pred = sum(aj * b[m] for aj, b in zip(co.a_list, bs))
                worst = max(worst, abs(pred - rep_count_oracle(Q, m)))
    return worst < 1e-9, {"max_deviation": worst}


def _check_functional_equation():
    worst = 0.0
    for Q in (QuadForm(1, 0, 5), QuadForm(2, 2, 3)):
        for s in (0.3 + 7j, -0.5 + 21j, 1.7 + 53j):
            worst = max(worst, fe_relative_residual(Q, s))
    return worst < 1e-8, {"max_residual": worst}


def _check_decomposition():
    rng = np.random.default_rng(11)
    worst = 0.0
    for D in (-20, -23):
        g = build_class_group(D)
        for Q in g.classes:
            ss = rng.uniform(0.6, 3, 4) + 1j * rng.uniform(-40, 40, 4)
            worst = max(worst, float(np.max(decomposition_residual(g, Q, ss))))
    return worst < 1e-8, {"max_residual": worst}


def _check_equidistribution():
    g = build_class_group(-20)
    counts = split_prime_class_counts(g, 10**5)
    total = sum(counts.values())
    freqs = [counts.get(i, 0) / total for i in range(g.h)]
    ok = all(abs(f - 1.0 / g.h) < 0.03 for f in freqs)
    return ok, {"frequencies": freqs}


def _check_winding():
    ev = EpsteinEvaluator(QuadForm(1, 0, 5))
    recs, total, _m, _r = find_zeros(ev, Rectangle(-1.0, 2.0, 0.1, 30.0))
    ok = total == len(recs) == 22 and all(r.certified for r in recs)
    return ok, {"count": total}


def _check_moment_majorant():
    m = TorusModel(QuadForm(1, 0, 5), 4, 0.75)
    out = check_moment_bound(m, (1, 1), n_points=2**11, replicates=4)
    return out["passes"], {k: out[k] for k in ("exact", "majorant")}


def _check_class_sum():
    ok = True
    devs = {}
    for D in (-20, -23):
        out = check_class_sum_condition(build_class_group(D), n_samples=2000)
        ok &= out["half_fraction"] == 1.0
        devs[str(D)] = out["orthogonality_max_dev"]
    return ok, {"orthogonality_max_dev": devs}


_CHECKS = {
    "class-group": _check_class_group,
    "rep-identity": _check_rep_identity,
    "functional-equation": _check_functional_equation,
    "decomposition": _check_decomposition,
    "equidistribution": _check_equidistribution,
    "winding": _check_winding,
    "moment-majorant": _check_moment_majorant,
    "class-sum": _check_class_sum,
}


def cmd_verify(args):
    names = [args.only] if args.only else list(_CHECKS)
    unknown = [n for n in names if n not in _CHECKS]
    if unknown:
        raise ValueError(f"unknown check(s): {unknown}; have {list(_CHECKS)}")
    checks = []
    for name in names:
        try:
            passed, details = _CHECKS[name]()
        except Exception as exc:  # captured per-check, not fatal
            passed, details = False, {"error": f"{type(exc).__name__}: {exc}"}
        checks.append({"name": name, "passed": passed, "details": details})
    out = _meta(QuadForm(1, 0, 5), args.seed, {"only": args.only})
    out.update(
        {
            "checks": checks,
            "passed": all(c["passed"] for c in checks),
        }
    )
    _emit_json(out, args.json)
    for c in checks:
        status = "ok  " if c["passed"] else "FAIL"
        print(f"[{status}] {c['name']}", file=sys.stderr)
    return 0 if out["passed"] else 1


# -- experiments ------------------------------------------------------------


def _exp_count_vs_predict(args, Q, ev):
    sc = count_strip(ev, args.sigma1, args.sigma2, args.T)
    rate = sc.winding_count / args.T
    c, cerr = predicted_constant(
        Q, args.sigma1, args.sigma2, n=args.n, n_points=args.samples,
        seed=args.seed,
    )
    rows = [[repr(args.T), sc.winding_count, repr(rate), repr(c), repr(cerr),
             repr(rate / c if c else math.inf)]]
    return ["T", "count", "rate", "c_pred", "c_pred_err", "ratio"], rows, {
        "count": sc.winding_count,
        "rate": rate,
        "c_pred": c,
        "c_pred_err": cerr,
    }


def _exp_zero_free_map(args, Q, ev):
    prof = jensen_profile(ev, args.sigma1, args.sigma2, args.T_phi)
    rep = detect_linearity(prof)
    rows = []
    for (lo, hi, slope), match in zip(rep.intervals, rep.slope_match):
        wc = winding_count(ev, Rectangle(lo, hi, 0.0, args.T))
        rows.append([repr(lo), repr(hi), repr(slope), match, wc])
    return ["sigma_lo", "sigma_hi", "slope", "matched_n", "winding"], rows, {
        "intervals": [list(iv) for iv in rep.intervals],
        "slope_match": rep.slope_match,
    }


def _exp_sigma_q_lower_bound(args, Q, ev):
    sd = domination_abscissa(Q)
    sigma1 = max(args.sigma1, 1.0 + 1e-3)  # stay right of the pole
    rec = first_zero_right_of(
        ev, sigma1, args.T, sigma2=min(args.sigma2, sd)
    )
    rows = []
    found = rec is not None
    if found:
        rows.append(
            [repr(rec.location.real), repr(rec.location.imag),
             repr(rec.residual), rec.certified]
        )
    return ["re", "im", "residual", "certified"], rows, {
        "domination_abscissa": sd,
        "found": found,
        "sigma_lower_bound": rec.location.real if found else None,
    }


def _exp_line_scan(args, Q, ev):
    rows = []
    rates = []
    for T in (args.T / 4, args.T / 2, args.T):
        hits = scan_line(ev, args.sigma1, T, args.tol)
        rates.append(len(hits) / T)
        rows.append([repr(T), len(hits), repr(len(hits) / T)])
    return ["T", "count", "rate"], rows, {"rates": rates}


_EXPERIMENTS = {
    "CountVsPredict": _exp_count_vs_predict,
    "ZeroFreeMap": _exp_zero_free_map,
    "SigmaQLowerBound": _exp_sigma_q_lower_bound,
    "LineScan": _exp_line_scan,
}


def cmd_experiment(args):
    if args.name not in _EXPERIMENTS:
        raise ValueError(
            f"unknown experiment {args.name!r}; have {list(_EXPERIMENTS)}"
        )
    Q = _parse_form(args.form)
    ev = EpsteinEvaluator(Q)
    header, rows, summary = _EXPERIMENTS[args.name](args, Q, ev)
    budgets = {
        "T": args.T, "sigma1": args.sigma1, "sigma2": args.sigma2,
        "n": args.n, "samples": args.samples,
    }
    _emit_csv(header, rows, args.csv)
    out = _meta(Q, args.seed, budgets)
    out.update({"experiment": args.name, "summary": summary})
    _emit_json(out, args.json)
    return 0


# -- parser -----------------------------------------------------------------


def _build_parser():
    p = argparse.ArgumentParser(
        prog="epzeta",
        description="Epstein zeta toolkit: evaluation, zeros, Jensen "
        "functions, random-model densities.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(fn=fn)
        sp.add_argument("--form", default="1,0,5", help="a,b,c")
        sp.add_argument("--json", default=None, help="JSON output path")
        return sp

    sp = add("eval", cmd_eval, help="evaluate E(s, Q)")
    sp.add_argument("--s", required=True, help="re,im")
    sp.add_argument("--oracle", action="store_true")
    sp.add_argument("--oracle-radius", type=int, default=400)

    sp = add("decompose", cmd_decompose, help="E = sum_j a_j L(s, chi_j)")
    sp.add_argument("--s", required=True, help="re,im")

    sp = add("zeros", cmd_zeros, help="count/refine zeros in a strip")
    sp.add_argument("--sigma1", type=float, default=0.6)
    sp.add_argument("--sigma2", type=float, default=0.9)
    sp.add_argument("--T", type=float, default=50.0)
    sp.add_argument("--line", type=float, default=None)
    sp.add_argument("--tol", type=float, default=1e-3)
    sp.add_argument("--csv", default=None, help="CSV output path")

    sp = add("jensen", cmd_jensen, help="Jensen profile on a sigma grid")
    sp.add_argument("--sigma-range", required=True, help="lo:hi:step")
    sp.add_argument("--T", type=float, default=200.0)
    sp.add_argument("--x", default="0", help="re,im")
    sp.add_argument("--csv", default=None)

    sp = add("density", cmd_density, help="torus-model density G_sigma")
    sp.add_argument("--sigma", type=float, default=0.75)
    sp.add_argument("--x", default="0", help="re,im")
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--method", choices=["kde", "fourier"], default="kde")
    sp.add_argument("--samples", type=int, default=2**12)
    sp.add_argument("--ratio", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument(
        "--constant", nargs=2, type=float, metavar=("S1", "S2"), default=None
    )

    sp = add("verify", cmd_verify, help="run the self-check suite")
    sp.add_argument("--only", default=None)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("experiment", cmd_experiment, help="reproducible experiments")
    sp.add_argument("name", choices=list(_EXPERIMENTS))
    sp.add_argument("--sigma1", type=float, default=0.6)
    sp.add_argument("--sigma2", type=float, default=0.9)
    sp.add_argument("--T", type=float, default=100.0)
    sp.add_argument("--T-phi", type=float, default=100.0)
    sp.add_argument("--tol", type=float, default=1e-3)
    sp.add_argument("--n", type=int, default=6)
    sp.add_argument("--samples", type=int, default=2**12)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--csv", default=None)

    return p


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
