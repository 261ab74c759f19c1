"""Batch front end: load an instance file, run one command, report.

Every command reads a JSON instance file, works on exact rationals, and
either prints a readable report or, with --json, the raw report dict of
the underlying module. Exit codes: 0 when the run completed (whatever the
verdicts say), 2 when a precondition was violated (bad file, infeasible
point, malformed flag), 3 when a desk-scale resource cap was hit.
"""

import argparse
import json
import random
import re
import sys

from .exceptions import PolystatError, PreconditionError, ResourceLimitError
from .geometry import limiting_normal_cone, tangent_cone
from .problems import (
    BilevelForms,
    CcmpClosedForms,
    EmopForms,
    GridOracleConfig,
    OracleOnlyProgram,
    ccmp_cross_check,
    load_instance,
    oracle_relate,
)
from .rational import rat, rat_str
from .stationarity import (
    CQ_KINDS,
    STATIONARITY_KINDS,
    StationarityReport,
    build_derived,
    check_cq,
    check_stationarity,
    pipeline,
)


# ---------------------------------------------------------------------------
# flag parsing helpers


def _parse_vector(text, flag):
    if text is None:
        raise PreconditionError("the %s command needs --%s" % flag)
    parts = [p.strip() for p in str(text).split(",")]
    try:
        return tuple(rat(p) for p in parts)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise PreconditionError(
            "could not parse --%s value %r: %s" % (flag[1], text, exc)
        )


def _parse_box(text):
    pairs = []
    for segment in str(text).split(","):
        lo, sep, hi = segment.strip().partition("..")
        if not sep:
            raise PreconditionError(
                "box segments look like lo..hi, got %r" % segment.strip()
            )
        try:
            pairs.append((rat(lo.strip()), rat(hi.strip())))
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise PreconditionError(
                "could not parse box segment %r: %s" % (segment.strip(), exc)
            )
    return pairs


def _parse_step(text):
    try:
        return rat(str(text).strip())
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise PreconditionError("could not parse --grid-step %r: %s" % (text, exc))


def _expect_dim(vec, dim, what):
    if len(vec) != dim:
        raise PreconditionError(
            "%s needs %d coordinates, got %d" % (what, dim, len(vec))
        )
    return vec


def _require_engine(program, command):
    if isinstance(program, OracleOnlyProgram):
        raise PreconditionError(
            "instance %r is oracle-only; the %s command needs polyhedral "
            "data (use relate)" % (program.name, command)
        )


# ---------------------------------------------------------------------------
# readable rendering


def _vec(values):
    return "(" + ", ".join(rat_str(v) for v in values) + ")"


def _vec_strs(values):
    return "(" + ", ".join(values) + ")"


def _linear(coeffs):
    terms = []
    for i, c in enumerate(coeffs):
        if rat(c) == 0:
            continue
        mag = rat_str(abs(rat(c)))
        name = "x%d" % (i + 1)
        body = name if mag == "1" else "%s %s" % (mag, name)
        terms.append(("-" if rat(c) < 0 else "+", body))
    if not terms:
        return "0"
    sign, body = terms[0]
    out = body if sign == "+" else "-" + body
    for sign, body in terms[1:]:
        out += " %s %s" % (sign, body)
    return out


def _piece_lines(piece, indent="    "):
    data = piece.to_json()
    lines = []
    for row, rhs in zip(data["A"], data["b"]):
        lines.append("%s%s <= %s" % (indent, _linear(row), rhs))
    for row, rhs in zip(data["E"], data["d"]):
        lines.append("%s%s = %s" % (indent, _linear(row), rhs))
    if not lines:
        lines.append("%s(all of R^%d)" % (indent, data["dim"]))
    return lines


def _union_lines(obj, label):
    pieces = obj.pieces if hasattr(obj, "pieces") else [obj]
    lines = ["%s: %d piece(s)" % (label, len(pieces))]
    for k, piece in enumerate(pieces):
        lines.append("  piece %d:" % k)
        lines.extend(_piece_lines(piece))
    return lines


def _witness_text(witnesses):
    parts = []
    for key in ("lambda", "grad", "zeta", "mu", "nu", "xi"):
        val = witnesses.get(key)
        if val is not None:
            parts.append("%s=%s" % (key, _vec_strs(val)))
    return " ".join(parts) if parts else "(none)"


def _verdict_lines(vj):
    lines = [
        "kind: %s" % vj["kind"],
        "holds: %s" % ("yes" if vj["holds"] else "no"),
    ]
    if vj.get("stratum") is not None:
        lines.append("stratum: %s" % vj["stratum"])
    lines.append("witnesses: %s" % _witness_text(vj["witnesses"]))
    certs = vj.get("certificates") or []
    lines.append("certificates: %s" % (", ".join(certs) if certs else "(none)"))
    return lines


def _report_lines(rj):
    lines = ["kind: %s (per multiplier stratum)" % rj["kind"]]
    for vj in rj["per_stratum"]:
        lines.append(
            "  %-14s holds=%-3s %s"
            % (
                vj.get("stratum") or "-",
                "yes" if vj["holds"] else "no",
                _witness_text(vj["witnesses"]),
            )
        )
    lines.append("holds on some stratum: %s" % ("yes" if rj["exists_holds"] else "no"))
    lines.append("holds on every stratum: %s" % ("yes" if rj["forall_holds"] else "no"))
    return lines


# ---------------------------------------------------------------------------
# commands


def _cmd_check(args, program, forms):
    _require_engine(program, "check")
    kind = args.kind
    if kind not in STATIONARITY_KINDS and kind not in CQ_KINDS:
        raise PreconditionError(
            "unknown kind %r; stationarity kinds are %s and qualification "
            "kinds are %s"
            % (kind, ", ".join(STATIONARITY_KINDS), ", ".join(CQ_KINDS))
        )
    point = _expect_dim(
        _parse_vector(args.point, ("check", "point")), program.n, "--point"
    )
    lam = None
    if args.lam is not None:
        lam = _expect_dim(
            _parse_vector(args.lam, ("check", "lambda")), program.m, "--lambda"
        )
    derived = build_derived(program)
    if kind in STATIONARITY_KINDS:
        result = check_stationarity(program, point, kind, lam=lam, derived=derived)
    else:
        result = check_cq(program, point, kind, lam=lam, derived=derived)
    payload = result.to_json()
    head = ["command: check", "problem: %s" % program.name, "point: %s" % _vec(point)]
    if isinstance(result, StationarityReport):
        return payload, head + _report_lines(payload)
    return payload, head + _verdict_lines(payload)


def _cmd_pipeline(args, program, forms):
    _require_engine(program, "pipeline")
    point = _expect_dim(
        _parse_vector(args.point, ("pipeline", "point")), program.n, "--point"
    )
    payload = pipeline(program, point)
    lines = [
        "command: pipeline",
        "problem: %s" % program.name,
        "point: %s" % _vec_strs(payload["point"]),
        "multiplier strata (%d):" % len(payload["strata"]),
    ]
    for row in payload["strata"]:
        lines.append("  %-14s at %s" % (row["stratum"], _vec_strs(row["point"])))
    st = payload["stationarity"]
    lines.append("stationarity:")
    lines.append(
        "  implicit: %s" % ("holds" if st["implicit"]["holds"] else "fails")
    )
    for name in ("fuzzy", "explicit"):
        rj = st[name]
        lines.append(
            "  %s: some stratum %s, every stratum %s"
            % (
                name,
                "yes" if rj["exists_holds"] else "no",
                "yes" if rj["forall_holds"] else "no",
            )
        )
    q = payload["qualifications"]
    lines.append("qualifications:")
    for name in ("mordukhovich_i", "sigma"):
        lines.append(
            "  %s: %s" % (name, "holds" if q[name]["holds"] else "fails")
        )
    cq_names = (
        "mordukhovich_ii",
        "mordukhovich_iii",
        "abstract_cq",
        "mr_cq",
        "strong_cq",
        "inc_lambda",
    )
    lines.append(
        "  per stratum (%s):" % ", ".join(cq_names)
    )
    for row in q["per_stratum"]:
        flags = " ".join(
            "yes" if row[name]["holds"] else "no " for name in cq_names
        )
        lines.append("    %-14s %s" % (row["stratum"], flags))
    lines.append(
        "intermediate map locally bounded: %s"
        % ("yes" if payload["intermediate_locally_bounded"] else "no")
    )
    lines.append("implication edges:")
    for edge in payload["edges"]:
        where = ("@" + edge["stratum"]) if edge.get("stratum") else ""
        kind = " (equality)" if edge.get("equality") else ""
        lines.append(
            "  %s->%s%s%s certificate=%s certified=%s"
            % (
                edge["from"],
                edge["to"],
                where,
                kind,
                edge["certificate"],
                "yes" if edge["certified"] else "no",
            )
        )
    lines.append("sufficiency branches:")
    for br in payload["branches"]:
        lines.append(
            "  %-8s certified=%-3s requires: %s"
            % (br["id"], "yes" if br["certified"] else "no", ", ".join(br["requires"]))
        )
    conv = payload["convex"]
    if conv["applicable"]:
        lines.append(
            "convex program: stationarity certifies a global minimizer: %s"
            % ("yes" if conv["certified_global"] else "no")
        )
    else:
        lines.append("convex program: no")
    bad = [row["edge"] for row in payload["consistency"] if not row["sound"]]
    lines.append(
        "implication soundness: %s"
        % ("all certified edges consistent" if not bad else "VIOLATED: " + ", ".join(bad))
    )
    return payload, lines


def _characteristic_set(program, forms):
    if isinstance(forms, CcmpClosedForms):
        return "sparsity-set", forms.d_kappa, forms.instance.n
    if isinstance(forms, BilevelForms):
        return (
            "complementarity-graph",
            forms.complementarity_graph,
            2 * forms.instance.m,
        )
    if isinstance(forms, EmopForms):
        return "vector-feasible-set", forms.gamma, forms.gamma.dim
    _require_engine(program, "cones")
    derived = build_derived(program)
    return "solution-map-graph", derived.K.graph, program.n + program.m


def _cmd_cones(args, program, forms):
    label, obj, dim = _characteristic_set(program, forms)
    point = _expect_dim(_parse_vector(args.point, ("cones", "point")), dim, "--point")
    tangent = tangent_cone(obj, point)
    normal = limiting_normal_cone(obj, point)
    payload = {
        "set": label,
        "point": [rat_str(v) for v in point],
        "tangent": tangent.to_json(),
        "normal": normal.to_json(),
    }
    lines = [
        "command: cones",
        "problem: %s" % program.name,
        "set: %s" % label,
        "point: %s" % _vec(point),
    ]
    lines.extend(_union_lines(tangent, "tangent cone"))
    lines.extend(_union_lines(normal, "limiting normal cone"))
    return payload, lines


def _cmd_coderiv(args, program, forms):
    _require_engine(program, "coderiv")
    derived = build_derived(program)
    mapping = derived.H
    total = mapping.n_in + mapping.n_out
    point = _expect_dim(
        _parse_vector(args.point, ("coderiv", "point")),
        total,
        "--point (a graph point: input then output coordinates)",
    )
    data = mapping.coderivative_at(point[: mapping.n_in], point[mapping.n_in :])
    payload = {
        "map": "implicit residual",
        "n_in": mapping.n_in,
        "n_out": mapping.n_out,
        "point": [rat_str(v) for v in point],
        "coordinates": "output direction first, then the resulting input normal",
        "graph": data.graph.to_json(),
    }
    lines = [
        "command: coderiv",
        "problem: %s" % program.name,
        "map: implicit residual (%d -> %d)" % (mapping.n_in, mapping.n_out),
        "graph point: %s" % _vec(point),
        "coordinates: (direction in R^%d, normal in R^%d)"
        % (mapping.n_out, mapping.n_in),
    ]
    lines.extend(_union_lines(data.graph, "coderivative graph"))
    return payload, lines


def _cmd_relate(args, program, forms):
    config = GridOracleConfig(_parse_box(args.box), _parse_step(args.grid_step), args.radius)
    payload = oracle_relate(program, config)
    lines = [
        "command: relate",
        "problem: %s" % program.name,
        "grid: box %s step %s radius %d"
        % (
            ", ".join("%s..%s" % (rat_str(lo), rat_str(hi)) for lo, hi in config.box),
            rat_str(config.step),
            config.radius,
        ),
    ]
    if payload["no_data"]:
        lines.append("no feasible grid points in the box")
        return payload, lines
    for side, title in (("reduced", "reduced (base space)"), ("lifted", "lifted (pairs)")):
        block = payload[side]
        locs = [r["point"] for r in block["points"] if r["local_min"]]
        globs = [r["point"] for r in block["points"] if r["global_min"]]
        lines.append(
            "%s: evaluated %d, feasible %d"
            % (title, block["evaluated"], block["feasible"])
        )
        lines.append(
            "  grid-local minimizers: %s"
            % (", ".join(_vec_strs(p) for p in locs) if locs else "(none)")
        )
        lines.append(
            "  grid-global minimizers: %s"
            % (", ".join(_vec_strs(p) for p in globs) if globs else "(none)")
        )
    corr = payload["correspondence"]
    lines.append(
        "global minimizers agree across the two problems: %s"
        % ("yes" if corr["globals_agree"] else "no")
    )
    desc = payload["descent"]
    lines.append(
        "descent property (base-local implies pair-local): %s"
        % ("holds" if desc["holds"] else "VIOLATED")
    )
    for row in desc["violations"]:
        lines.append(
            "  violation: z=%s lambda=%s"
            % (_vec_strs(row["z"]), _vec_strs(row["lambda"]))
        )
    if payload["gaps"]:
        lines.append("pair-local points whose base point is not base-local:")
        for row in payload["gaps"]:
            lines.append(
                "  z=%s lambda=%s" % (_vec_strs(row["z"]), _vec_strs(row["lambda"]))
            )
    else:
        lines.append("pair-local points whose base point is not base-local: (none)")
    return payload, lines


def _cmd_crosscheck(args, program, forms):
    if not isinstance(forms, CcmpClosedForms):
        raise PreconditionError(
            "crosscheck compares cardinality closed forms with the engine; "
            "instance %r has none" % program.name
        )
    instance = forms.instance
    if args.point is not None:
        points = [
            _expect_dim(
                _parse_vector(args.point, ("crosscheck", "point")),
                instance.n,
                "--point",
            )
        ]
    else:
        from itertools import product as _product

        points = [
            z
            for z in _product((-1, 0, 1), repeat=instance.n)
            if forms.d_kappa.contains(z)
        ]
    rows = [ccmp_cross_check(instance, z) for z in points]
    payload = {
        "problem": program.name,
        "points": rows,
        "all_ok": all(r["ok"] for r in rows),
    }
    lines = [
        "command: crosscheck",
        "problem: %s" % program.name,
        "sweep: %d feasible point(s)" % len(rows),
    ]
    for r in rows:
        lines.append(
            "  %-14s cone=%-3s multipliers=%-3s explicit=%-3s %s"
            % (
                _vec_strs(r["point"]),
                "yes" if r["cone_match"] else "NO",
                "yes" if r["multiplier_match"] else "NO",
                "yes" if r["explicit_match"] else "NO",
                "ok" if r["ok"] else "MISMATCH",
            )
        )
    lines.append(
        "all closed-form/engine equalities pass: %s"
        % ("yes" if payload["all_ok"] else "NO")
    )
    return payload, lines


_DISPATCH = {
    "check": _cmd_check,
    "pipeline": _cmd_pipeline,
    "cones": _cmd_cones,
    "coderiv": _cmd_coderiv,
    "relate": _cmd_relate,
    "crosscheck": _cmd_crosscheck,
}


# ---------------------------------------------------------------------------
# argument wiring


_NEGATIVE_VALUE = re.compile(r"^-\d[\d/.,]*$")


def _allow_negative_values(parser):
    # vectors and boxes may start with a minus sign ("-1,0", "-3..3");
    # keep argparse from reading those as option names (the --flag=value
    # form always works regardless)
    if hasattr(parser, "_negative_number_matcher"):
        parser._negative_number_matcher = _NEGATIVE_VALUE


def build_parser():
    parser = argparse.ArgumentParser(
        prog="polystat",
        description=(
            "Exact polyhedral verification of stationarity systems, "
            "constraint qualifications, cones, coderivatives, and grid "
            "oracles for implicitly constrained programs."
        ),
    )
    _allow_negative_values(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        _allow_negative_values(p)
        p.add_argument(
            "--problem", required=True, help="path to a JSON instance file"
        )
        p.add_argument(
            "--json",
            action="store_true",
            help="emit the raw report dict as JSON instead of a table",
        )
        p.add_argument(
            "--seed",
            type=int,
            default=None,
            help="seed for any sampled subroutine (echoed for reproducibility)",
        )

    p = sub.add_parser(
        "check", help="decide one stationarity system or qualification at a point"
    )
    common(p)
    p.add_argument("--point", required=True, help="base point, comma-separated rationals")
    p.add_argument(
        "--kind",
        required=True,
        help="one of %s or a qualification: %s"
        % (", ".join(STATIONARITY_KINDS), ", ".join(CQ_KINDS)),
    )
    p.add_argument(
        "--lambda",
        dest="lam",
        default=None,
        help="multiplier, comma-separated rationals (default: sweep strata)",
    )

    p = sub.add_parser(
        "pipeline", help="run every check at a point and wire up the implications"
    )
    common(p)
    p.add_argument("--point", required=True, help="base point, comma-separated rationals")

    p = sub.add_parser(
        "cones", help="tangent and limiting normal cone of the instance's set"
    )
    common(p)
    p.add_argument("--point", required=True, help="point in the set")

    p = sub.add_parser(
        "coderiv", help="coderivative of the implicit residual map at a graph point"
    )
    common(p)
    p.add_argument(
        "--point", required=True, help="graph point: input then output coordinates"
    )

    p = sub.add_parser(
        "relate", help="grid oracle relating base and lifted minimizers"
    )
    common(p)
    p.add_argument(
        "--box",
        default="-3..3",
        help="bounds lo..hi, comma-separated per coordinate or one pair for all",
    )
    p.add_argument("--grid-step", default="1/100", help="grid spacing, a rational")
    p.add_argument(
        "--radius", type=int, default=2, help="locality radius in grid steps"
    )

    p = sub.add_parser(
        "crosscheck", help="closed forms against the engine on a cardinality instance"
    )
    common(p)
    p.add_argument(
        "--point",
        default=None,
        help="single point to check (default: sweep {-1,0,1}^n)",
    )

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.seed is not None:
        random.seed(args.seed)
    try:
        program, forms = load_instance(args.problem)
        payload, lines = _DISPATCH[args.command](args, program, forms)
    except PreconditionError as exc:
        print("precondition violated: %s" % exc, file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print("resource limit hit: %s" % exc, file=sys.stderr)
        return 3
    except PolystatError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        if args.seed is not None:
            lines.insert(0, "seed: %d" % args.seed)
        print("\n".join(lines))
    return 0


if __name__ == "__main__":
    sys.exit(main())
