"""Command line entry point: bound, oracle, decompose, table, verify."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import bounds_clt as bc
from . import bounds_rs as br
from . import cf, harness, lattice
from .errors import ArtifactError, DomainError
from .special import INV_SQRT2PI, TAIL_EPSILON


class UsageError(DomainError):
    exit_code = 2


# parameter plumbing

def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    if "," in text:
        try:
            return [float(v) for v in text.split(",")]
        except ValueError:
            pass
    return text


def _extra_params(tokens, where) -> dict:
    out, i = {}, 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--") or len(tok) < 3:
            raise UsageError(f"{where}: unexpected argument {tok!r}")
        key = tok[2:].replace("-", "_")
        if "=" in key:
            key, val = key.split("=", 1)
            out[key] = _parse_value(val)
            i += 1
        elif i + 1 < len(tokens) and not (tokens[i + 1].startswith("--") and len(tokens[i + 1]) > 2
                                          and not _is_number(tokens[i + 1])):
            out[key] = _parse_value(tokens[i + 1])
            i += 2
        else:
            out[key] = True
            i += 1
    return out


def _is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


class Params:
    """Dict wrapper that names the offending field in every error."""

    def __init__(self, data: dict, where: str):
        self.data = dict(data)
        self.where = where
        self.used = set()

    def get(self, key, default=None, kind=float, aliases=()):
        for k in (key,) + tuple(aliases):
            if k in self.data:
                self.used.add(k)
                val = self.data[k]
                try:
                    if kind is None:
                        return val
                    if kind is list:
                        return [float(v) for v in (val if isinstance(val, list) else [val])]
                    if kind is bool:
                        return val if isinstance(val, bool) else str(val).lower() in ("1", "true", "yes")
                    return kind(val)
                except (TypeError, ValueError):
                    raise UsageError(f"{self.where}.{k}: cannot read {val!r} as {kind.__name__}")
        return default

    def need(self, key, kind=float, aliases=()):
        val = self.get(key, None, kind, aliases)
        if val is None:
            raise UsageError(f"{self.where}.{key}: required field is missing")
        return val

    def check_unused(self):
        extra = sorted(set(self.data) - self.used)
        if extra:
            raise UsageError(f"{self.where}.{extra[0]}: unknown field")


def _summand(P: Params, standard=False) -> br.SummandMoments:
    delta = P.get("delta", 1.0)
    beta = P.need("beta", aliases=("beta3",))
    if standard:
        return br.SummandMoments(0.0, 1.0, beta, delta)
    return br.SummandMoments(P.get("a", 0.0), P.need("beta2"), beta, delta, P.get("central"))


def _profile(P: Params) -> bc.MomentProfile:
    delta = P.get("delta", 1.0)
    if "summands" in P.data:
        pairs = P.need("summands", kind=None)
        return bc.MomentProfile.general([tuple(map(float, p)) for p in pairs], delta)
    return bc.MomentProfile.iid(P.get("sigma2", 1.0), P.need("beta", aliases=("beta3",)),
                                P.need("n", kind=int), delta)


def _dist(P: Params, eps: float, key="dist", params_key="params", convolve=True):
    name = P.need(key, kind=str)
    params = P.get(params_key, {}, kind=None)
    if isinstance(params, str):
        params = _parse_value(params)
    n = P.get("n", None, kind=int) if convolve else None
    if name == "sym_bernoulli_sum":
        P.used.update({"standardize", params_key})
        return harness.sym_bernoulli_sum(n or 1)
    if name in harness.standard_laws():
        d = harness.standard_laws()[name]
    else:
        try:
            d = lattice.from_spec({"family": name, "params": params, "tail_epsilon": eps})
        except DomainError as exc:
            raise UsageError(f"{P.where}.{key}: {exc}")
    if n and n > 1:
        d = lattice.self_convolve(d, n)
    if P.get("standardize", True, kind=bool):
        d = d.standardized()
    return d


def _summands(P: Params, eps: float):
    X = _dist(P, eps, convolve=False)
    n = P.need("n", kind=int)
    return [X] * n


def _op_result(res):
    if isinstance(res, bc.BoundResult):
        out = res.to_dict()
    elif hasattr(res, "_asdict"):
        out = {k: (float(v) if isinstance(v, (int, float)) else v) for k, v in res._asdict().items()}
    else:
        out = {"value": float(res)}
    out["provenance"] = "computed"
    return out


def _bound(op: str, P: Params, eps: float):
    if op == "poisson_sum":
        return br.poisson_sum_bound(P.need("lambda", aliases=("lam",)), _summand(P))
    if op == "pb_sum":
        if "p" in P.data:
            pb = br.PBParams.from_p(P.need("p", kind=list))
        else:
            pb = br.PBParams.from_summary(P.need("lambda", aliases=("lam",)), P.need("theta"),
                                          P.get("equal", False, kind=bool))
        return br.pb_sum_bound(pb, _summand(P), P.get("s", None, kind=list))
    if op == "poisson_sum_lower":
        return br.poisson_sum_lower(P.get("delta", 1.0), P.get("gamma"))
    if op == "mixed_poisson":
        return br.mixed_poisson_bound(_summand(P, True), P.need("E_lambda_inv_pow"), P.get("delta_t", 0.0))
    if op == "student_limit":
        return br.student_limit_bounds(P.need("r"), P.need("t"), _summand(P, True),
                                       P.get("mode", "student", kind=str))
    if op == "nb_limit":
        return br.nb_limit_bounds(P.get("r", 1.0), P.need("p"), _summand(P, True),
                                  P.get("mode", "sym_gamma", kind=str))
    if op == "bdnc_sum":
        y = br.IndexMoments(P.need("EY"), P.get("EY2"), P.get("EY_half"), P.get("EY_full"))
        return br.bdnc_sum_bound(P.need("lambda", aliases=("lam",)), y, _summand(P),
                                 P.get("mode", "general", kind=str))
    if op == "nb_index_moments":
        return br.nb_index_moments(P.need("r"), P.need("p"), P.get("delta", 1.0))
    if op == "poisson_coupling_tv":
        return br.poisson_coupling_tv(P.need("p", kind=list))
    if op == "insurance":
        if "rates" in P.data:
            rates = P.need("rates", kind=list)
        else:
            base = P.need("rate_base")
            rates = lambda k: base ** k  # noqa: E731
        return br.insurance_tail_estimate(P.need("t"), P.need("a"), P.need("sigma2"), P.need("beta3"),
                                          rates, P.need("threshold"))
    if op == "berry_esseen":
        return bc.berry_esseen_uniform(_profile(P), P.get("variant", "best", kind=str),
                                       P.get("s", None, kind=list))
    if op == "nonuniform":
        return bc.nonuniform_bound(_profile(P), P.get("x", 0.0), "nagaev_bikelis",
                                   P.get("s", None, kind=list))
    if op == "be_cf_constant":
        return bc.be_cf_constant(P.get("b", 2.0), P.get("d", 0.75), P.get("optimize", False, kind=bool))
    if op == "osipov_constant":
        return bc.osipov_constant(P.get("C0", 0.5583))
    if op == "osipov":
        return bc.osipov(_summands(P, eps), P.get("epsilon", 1.0), P.get("C0", 0.5583),
                         P.get("constant", None, kind=None))
    if op == "katz_petrov":
        dists = _summands(P, eps)
        g = P.get("g", "abs", kind=str)
        gfun = bc.GClassFunction(abs, name="|x|") if g == "abs" else bc.g_lower(math.sqrt(len(dists)))
        return bc.katz_petrov(dists, gfun, P.get("A"))
    if op == "lower_bound":
        return bc.lower_bounds(P.need("kind", kind=str), n=P.get("n", None, kind=int),
                               m=P.get("m", None, kind=int), gamma=P.get("gamma"),
                               delta=P.get("delta"), p=P.get("p"))
    if op == "zeta1":
        variant = P.get("variant", "mean_metric_constant", kind=str)
        if variant == "lower_psi":
            return bc.zeta1_bounds(None, variant, delta=P.get("delta", 1.0), pp=P.need("p"))
        return bc.zeta1_bounds(None, "mean_metric_constant", delta=P.need("delta"))
    if op == "zeta_high":
        return bc.zeta_high_bounds(_profile(P), P.get("order", "two", kind=str))
    if op == "extremal_two_point":
        return bc.extremal_two_point(P.need("rho"))
    if op in ("feller", "prawitz"):
        d = _dist(P, eps)
        f = cf.lattice_cf(d)
        if op == "feller":
            return cf.feller_bound(f, cf.cf_catalog("normal"), INV_SQRT2PI, P.get("T", 10.0), P.get("b", 2.0))
        if P.get("optimize", False, kind=bool):
            return cf.optimize_prawitz(f)
        return cf.prawitz_rho_bound(f, P.get("T", 10.0), P.get("t0", 0.5))
    raise UsageError(f"bound.op: unknown operation {op!r}")


BOUND_OPS = ("poisson_sum", "pb_sum", "poisson_sum_lower", "mixed_poisson", "student_limit", "nb_limit",
             "bdnc_sum", "nb_index_moments", "poisson_coupling_tv", "insurance", "berry_esseen",
             "nonuniform", "be_cf_constant", "osipov_constant", "osipov", "katz_petrov", "lower_bound",
             "zeta1", "zeta_high", "extremal_two_point", "feller", "prawitz")


# verbs

def cmd_bound(args, extra):
    data = {}
    if args.spec:
        with open(args.spec) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"spec: invalid JSON ({exc})")
        if not isinstance(doc, dict):
            raise UsageError("spec: top level must be an object")
        data.update(doc.get("params", {}))
        args.op = args.op or doc.get("op")
    data.update(_extra_params(extra, "bound"))
    if not args.op:
        raise UsageError("bound.op: required field is missing")
    P = Params(data, "bound.params")
    res = _bound(args.op, P, args.tail_epsilon)
    P.check_unused()
    out = {"op": args.op}
    out.update(_op_result(res))
    return out, 0


def cmd_oracle(args, extra):
    P = Params(_extra_params(extra, "oracle"), "oracle")
    P.data.update({"dist": args.dist, "params": args.params})
    P.data["n"] = args.n
    P.data["standardize"] = not args.raw
    if args.n is None:
        del P.data["n"]
    d = _dist(P, args.tail_epsilon)
    ref = None
    if args.ref:
        R = Params({"dist": args.ref, "params": args.ref_params, "standardize": not args.raw}, "oracle.ref")
        ref = _dist(R, args.tail_epsilon)
    P.check_unused()
    if args.metric == "kolmogorov":
        val, err = lattice.kolmogorov_distance(d, ref, with_error=True)
    elif args.metric == "tv":
        if ref is None:
            raise UsageError("oracle.ref: total variation needs a reference law")
        val, err = lattice.tv_distance(d, ref, with_error=True)
    elif args.metric == "zeta1":
        val, err = lattice.zeta1_distance(d), d.tail_mass_bound
    else:
        if args.x is None:
            raise UsageError("oracle.x: point distance needs x")
        val, err = lattice.point_distance(d, args.x), d.tail_mass_bound
    return {"metric": args.metric, "value": val, "error_bar": err, "provenance": "exact"}, 0


def cmd_decompose(args, extra):
    params = _extra_params(extra, "decompose")
    try:
        d = lattice.from_spec({"family": args.family, "params": params, "tail_epsilon": args.tail_epsilon})
    except DomainError as exc:
        raise UsageError(f"decompose.params: {exc}")
    res = lattice.bdnc_decompose(d, args.n_terms)
    x, w = res.y_dist.atoms()
    k = min(args.show, w.size)
    return {"lambda": res.lambda_, "is_bdnc": res.is_bdnc, "min_gamma": res.min_gamma,
            "y_support": [int(v) for v in x[:k]], "y_weights": [float(v) for v in w[:k]],
            "notes": list(res.notes), "provenance": "computed"}, 0


def cmd_table(args, extra):
    spec = None
    if args.spec:
        with open(args.spec) as fh:
            spec = json.load(fh)
    cols, rows = harness.render_table(args.id, spec)
    return {"table": args.id, "columns": cols, "rows": rows}, 0


def cmd_verify(args, extra):
    rep = harness.run_verify(args.suite, args.seed, args.tolerance)
    out = rep.to_dict()
    if not args.all_checks:
        out["checks"] = [c for c in out["checks"] if not c["passed"]]
    return out, 0 if rep.passed else 1


# output

def _to_csv(out: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if "rows" in out and "columns" in out:
        w.writerow(out["columns"])
        for r in out["rows"]:
            w.writerow(["" if r.get(c) is None else r.get(c) for c in out["columns"]])
    elif "checks" in out:
        cols = ["name", "computed", "expected", "passed", "margin", "provenance", "note"]
        w.writerow(cols)
        for c in out["checks"]:
            w.writerow([c[k] for k in cols])
    else:
        keys = list(out)
        w.writerow(keys)
        w.writerow([json.dumps(out[k]) if isinstance(out[k], (list, dict)) else out[k] for k in keys])
    return buf.getvalue()


def _json_default(o):
    if hasattr(o, "item"):
        return o.item()
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(type(o).__name__)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--tolerance", type=float, default=argparse.SUPPRESS)
    common.add_argument("--tail-epsilon", type=float, default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="artifact", parents=[common], allow_abbrev=False,
                                description="Normal approximation bounds and exact lattice oracles.")
    sub = p.add_subparsers(dest="verb", required=True)

    b = sub.add_parser("bound", parents=[common], allow_abbrev=False, help="evaluate a bound; extra --key value pairs are parameters")
    b.add_argument("--op", choices=BOUND_OPS)
    b.add_argument("--spec", help="JSON file {\"op\": ..., \"params\": {...}}")

    o = sub.add_parser("oracle", parents=[common], allow_abbrev=False, help="exact lattice distances")
    o.add_argument("--metric", choices=("kolmogorov", "tv", "zeta1", "point"), default="kolmogorov")
    o.add_argument("--dist", required=True)
    o.add_argument("--params", default="{}")
    o.add_argument("--n", type=int)
    o.add_argument("--x", type=float)
    o.add_argument("--ref")
    o.add_argument("--ref-params", default="{}")
    o.add_argument("--raw", action="store_true", help="do not standardize")

    d = sub.add_parser("decompose", parents=[common], allow_abbrev=False, help="compound-Poisson decomposition of an integer law")
    d.add_argument("--family", required=True)
    d.add_argument("--n-terms", type=int)
    d.add_argument("--show", type=int, default=10)

    t = sub.add_parser("table", parents=[common], allow_abbrev=False, help="render a constant table")
    t.add_argument("id", choices=("t2_1", "t2_2", "t2_3", "t2_4", "t2_5", "t3_gamma", "custom"))
    t.add_argument("--spec")

    v = sub.add_parser("verify", parents=[common], allow_abbrev=False, help="run a verification suite")
    v.add_argument("suite", choices=harness.SUITES + ("all",))
    v.add_argument("--all-checks", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    for name, default in (("format", "json"), ("seed", 0), ("tolerance", None), ("tail_epsilon", TAIL_EPSILON)):
        if not hasattr(args, name):
            setattr(args, name, default)
    if extra and args.verb not in ("bound", "decompose", "oracle"):
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    handler = {"bound": cmd_bound, "oracle": cmd_oracle, "decompose": cmd_decompose,
               "table": cmd_table, "verify": cmd_verify}[args.verb]
    try:
        out, status = handler(args, extra)
    except ArtifactError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": "UsageError", "message": str(exc)}), file=sys.stderr)
        return 2
    if args.format == "csv":
        sys.stdout.write(_to_csv(out))
    else:
        sys.stdout.write(json.dumps(out, sort_keys=True, default=_json_default) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
