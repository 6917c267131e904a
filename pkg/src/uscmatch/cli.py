"""Command-line front end: ``uscmatch <command> FILE [options]``.

Exit codes: 0 on success, 1 when ``--strict`` is given and the verdict is
negative (unstable, condition violated, asymmetric relations), 2 on bad
input or usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import conditions, mechanisms, quasilinear, stability
from .core import Market, Matching
from .generate import GeneratorConfig, SamplingBudgetExhausted, generate_usc_instance
from .instance import (
    InstanceDocument,
    InstanceError,
    load_instance,
    matching_to_dict,
    parse_matching,
    serialize_instance,
)
from .school import SchoolRule, verify_theorem2


class _Usage(Exception):
    pass


def _witness_text(market: Market, wit: Optional[conditions.RelationWitness]) -> str:
    if wit is None:
        return ""
    w, w2 = market.workers[wit.w], market.workers[wit.w2]
    return f"{w} is a {wit.kind} to {w2} (X = {{{', '.join(market.names(wit.subset))}}})"


def _witness_json(market: Market, wit: Optional[conditions.RelationWitness]):
    if wit is None:
        return None
    return {
        "w": market.workers[wit.w],
        "w2": market.workers[wit.w2],
        "kind": wit.kind,
        "subset": market.names(wit.subset),
    }


def _verdict_json(market: Market, v: Optional[conditions.Verdict]):
    if v is None:
        return None
    return {"holds": v.holds, "clause": v.clause, "witness": _witness_json(market, v.witness)}


def _need_market(doc: InstanceDocument) -> Market:
    if doc.market is None:
        raise _Usage("this command needs a market (firms, workers, preferences)")
    return doc.market


def _matching_text(market: Market, matching: Matching) -> str:
    parts = [f"{f}: {{{', '.join(ws)}}}" for f, ws in market.describe(matching).items()]
    return "  ".join(parts)


def cmd_check(doc: InstanceDocument, args) -> tuple[object, str, bool]:
    market = _need_market(doc)
    report = conditions.condition_report(market)
    data = {
        "firms": [
            {
                "firm": r.firm,
                "substitutes": _verdict_json(market, r.substitutes),
                "usc": _verdict_json(market, r.usc),
                "sscc": _verdict_json(market, r.sscc),
                "demand_type": sorted(r.demand_type),
            }
            for r in report.firms
        ],
        "demand_type": sorted(report.demand_type),
        "non_unimodular_witness": None if report.determinant_witness is None else {
            "vectors": [list(v) for v in report.determinant_witness[0]],
            "determinant": report.determinant_witness[1],
        },
    }
    fmt = lambda v: "-" if v is None else ("yes" if v.holds else "NO")  # noqa: E731
    rows = [("firm", "substitutes", "USC", "SSCC")]
    rows += [(r.firm, fmt(r.substitutes), fmt(r.usc), fmt(r.sscc)) for r in report.firms]
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    lines = ["  ".join(c.ljust(wd) for c, wd in zip(row, widths)).rstrip() for row in rows]
    for r in report.firms:
        for label, v in (("substitutes", r.substitutes), ("USC", r.usc), ("SSCC", r.sscc)):
            if v is not None and not v.holds:
                lines.append(f"{r.firm} violates {label} {v.clause}: {_witness_text(market, v.witness)}")
    lines.append(f"demand type: {sorted(report.demand_type)}")
    if report.determinant_witness is not None:
        vecs, det = report.determinant_witness
        lines.append(f"not unimodular: det{list(vecs)} = {det}")
    return data, "\n".join(lines), report.all_usc


def cmd_da(doc: InstanceDocument, args) -> tuple[object, str, bool]:
    market = _need_market(doc)
    if args.one_stage:
        groups = (market.all_workers,)
    elif args.stages is not None:
        groups = mechanisms.coarsen(market.groups, args.stages)
    else:
        groups = market.groups
    matching, trace = mechanisms.multi_stage_da(market, groups)
    stable = stability.is_stable(market, matching)
    data = {
        "stages": [market.names(g) for g in groups],
        "rounds": trace.to_records(market),
        "matching": market.describe(matching),
        "late_rejections": [
            {"stage": r.stage, "round": r.round, "worker": market.workers[r.worker],
             "firm": market.firms[r.firm]}
            for r in trace.late_rejections
        ],
        "stable": stable,
    }
    text = mechanisms.render_trace(market, trace)
    text += f"\n\nmatching: {_matching_text(market, matching)}\nstable: {'yes' if stable else 'no'}"
    if not stable:
        bc = stability.find_blocking_coalition(market, matching)
        if bc is not None:
            text += f"\nblocking coalition: {market.firms[bc.firm]} with {{{', '.join(market.names(bc.workers))}}}"
    return data, text, stable


def _stability_json(market: Market, matching: Matching) -> dict:
    ir, why = stability.is_individually_rational(market, matching)
    bc = stability.find_blocking_coalition(market, matching)
    return {
        "matching": market.describe(matching),
        "individually_rational": ir,
        "ir_violation": why,
        "blocking_coalition": None if bc is None else {
            "firm": market.firms[bc.firm], "workers": market.names(bc.workers)
        },
        "stable": ir and bc is None,
    }


def cmd_stable(doc: InstanceDocument, args) -> tuple[object, str, bool]:
    market = _need_market(doc)
    if args.verify:
        with open(args.verify, encoding="utf-8") as fh:
            matching = parse_matching(market, fh.read())
        data = _stability_json(market, matching)
        lines = [f"matching: {_matching_text(market, matching)}",
                 f"individually rational: {'yes' if data['individually_rational'] else 'no'}"]
        if data["ir_violation"]:
            lines.append(f"  {data['ir_violation']}")
        if data["blocking_coalition"]:
            bc = data["blocking_coalition"]
            lines.append(f"blocking coalition: {bc['firm']} with {{{', '.join(bc['workers'])}}}")
        lines.append(f"stable: {'yes' if data['stable'] else 'no'}")
        return data, "\n".join(lines), data["stable"]
    found = stability.enumerate_stable_matchings(market)
    data = {"stable_matchings": [matching_to_dict(market, m) for m in found], "count": len(found)}
    lines = [f"{len(found)} stable matching(s)"]
    lines += [f"  {_matching_text(market, m)}" for m in found]
    return data, "\n".join(lines), bool(found)


def cmd_school(doc: InstanceDocument, args) -> tuple[object, str, bool]:
    market = _need_market(doc)
    rules = doc.school_rules
    if not rules:
        raise _Usage("instance has no school block")
    data: dict = {"usc": {}, "mechanisms": {}}
    lines = []
    ok = True
    for name, rule in rules.items():
        v = verify_theorem2(rule)
        ok &= v.holds
        data["usc"][name] = _verdict_json(market, v)
        lines.append(f"{name}: USC {'holds' if v.holds else 'FAILS ' + _witness_text(market, v.witness)}")
    for label, run in (("one-stage", mechanisms.one_stage_da), ("two-stage", mechanisms.multi_stage_da)):
        matching, trace = run(market)
        data["mechanisms"][label] = _stability_json(market, matching)
        data["mechanisms"][label]["rounds"] = trace.to_records(market)
        lines += ["", f"{label} DA", mechanisms.render_trace(market, trace)]
        bc = data["mechanisms"][label]["blocking_coalition"]
        lines.append(f"stable: {'yes' if bc is None else 'no'}")
        if bc is not None:
            lines.append(f"blocking coalition: {bc['firm']} with {{{', '.join(bc['workers'])}}}")
    ok &= data["mechanisms"]["two-stage"]["stable"]
    return data, "\n".join(lines), ok


def _parse_query(text: str, names: Sequence[str]) -> tuple[Fraction, ...]:
    values = {}
    for part in text.split(","):
        key, sep, val = part.partition("=")
        if not sep or key.strip() not in names:
            raise _Usage(f"bad salary query {text!r}; expected e.g. {names[0]}=1,...")
        values[key.strip()] = Fraction(val.strip())
    if set(values) != set(names):
        raise _Usage(f"salary query must set every worker: {', '.join(names)}")
    return tuple(values[n] for n in names)


def _bundle(v: quasilinear.Valuation, mask: int) -> str:
    return "{" + ", ".join(v.names[i] for i in range(v.n_workers) if mask >> i & 1) + "}"


def cmd_ql(doc: InstanceDocument, args) -> tuple[object, str, bool]:
    if not doc.quasilinear:
        raise _Usage("instance has no quasilinear block")
    out, lines, ok = [], [], True
    for k, block in enumerate(doc.quasilinear):
        v = block.valuation
        label = block.name or f"valuation {k}"
        entry: dict = {"name": block.name}
        lines.append(f"{label}:")
        if args.relations or args.theorem3:
            sym, table = quasilinear.verify_theorem3(v)
            ok &= sym
            entry["symmetric"] = sym
            entry["relations"] = [
                {"w": v.names[w], "w2": v.names[w2], "kind": kind, "holds": wit is not None,
                 "witness": None if wit is None else {
                     "high": [str(x) for x in wit.high], "low": [str(x) for x in wit.low]}}
                for (w, w2, kind), wit in table.cells.items()
            ]
            if args.relations:
                for (w, w2, kind), wit in table.cells.items():
                    if wit is not None:
                        lines.append(
                            f"  {v.names[w]} is a {kind} to {v.names[w2]}: "
                            f"demand of {v.names[w2]} flips between "
                            f"p={tuple(str(x) for x in wit.high)} and p'={tuple(str(x) for x in wit.low)}"
                        )
            lines.append(f"  relations symmetric: {'yes' if sym else 'NO'}")
        else:
            queries = [_parse_query(args.demand, v.names)] if args.demand else block.queries
            entry["demand"] = []
            for p in queries:
                d = quasilinear.demand(v, p)
                entry["demand"].append({
                    "salaries": [str(x) for x in p],
                    "bundles": [[v.names[i] for i in range(v.n_workers) if b >> i & 1] for b in d.bundles],
                    "surplus": str(d.surplus),
                })
                lines.append(
                    f"  D({', '.join(str(x) for x in p)}) = "
                    f"{{{', '.join(_bundle(v, b) for b in d.bundles)}}}  surplus {d.surplus}"
                )
        out.append(entry)
    return out, "\n".join(lines), ok


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--strict", action="store_true",
                        help="exit 1 when the verdict is negative")

    parser = argparse.ArgumentParser(prog="uscmatch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="classify firm preferences")
    p.add_argument("file")

    p = sub.add_parser("da", parents=[common], help="run deferred acceptance with traces")
    p.add_argument("file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--stages", type=int, help="number of stages (later groups merge into the last)")
    g.add_argument("--one-stage", action="store_true")

    p = sub.add_parser("stable", parents=[common], help="verify or enumerate stable matchings")
    p.add_argument("file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--enumerate", action="store_true")
    g.add_argument("--verify", metavar="MATCHING_FILE")

    p = sub.add_parser("school", parents=[common], help="controlled school choice report")
    p.add_argument("file")

    p = sub.add_parser("ql", parents=[common], help="quasi-linear demand and relations")
    p.add_argument("file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--demand", metavar="QUERY", help="salaries, e.g. s=6,u=2")
    g.add_argument("--relations", action="store_true")
    g.add_argument("--theorem3", action="store_true")

    p = sub.add_parser("generate", parents=[common], help="write a random instance")
    p.add_argument("config", help="generator config JSON file")
    p.add_argument("--output", "-o")
    return parser


COMMANDS = {
    "check": cmd_check,
    "da": cmd_da,
    "stable": cmd_stable,
    "school": cmd_school,
    "ql": cmd_ql,
}


def run_cli(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "generate":
            with open(args.config, encoding="utf-8") as fh:
                cfg = GeneratorConfig.from_json(fh.read())
            text = serialize_instance(generate_usc_instance(cfg))
            if args.output:
                with open(args.output, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                out.write(text)
            return 0
        doc = load_instance(args.file)
        data, text, ok = COMMANDS[args.command](doc, args)
    except InstanceError as exc:
        for err in exc.errors:
            print(f"error: {err}", file=sys.stderr)
        return 2
    except (_Usage, OSError, ValueError, TypeError, SamplingBudgetExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        out.write(json.dumps(data, indent=2, default=str) + "\n")
    else:
        out.write(text + "\n")
    return 1 if args.strict and not ok else 0


def main() -> None:
    sys.exit(run_cli())
