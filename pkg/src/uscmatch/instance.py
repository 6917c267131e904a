"""JSON instance files: parsing, validation and serialization.

Layout::

    {
      "firms": ["f1", "f2"],
      "workers": ["s", "u"],
      "groups": [["s"], ["u"]],
      "worker_prefs": {"s": ["f1", "f2"], "u": ["f2", "f1"]},
      "firm_prefs": {"f1": [["s", "u"], ["s"]], "f2": [["s"], ["u"]]},
      "school": {"f1": {"priority": [...], "capacity": 2, "ceiling": "1/2"}},
      "quasilinear": {"workers": [...], "valuations": {"": "0", "s": "5"}, "queries": [...]}
    }

A firm takes its choice rule from ``school`` when it appears there and from
``firm_prefs`` otherwise.  ``quasilinear`` may also be a list of such blocks,
each with an optional ``name``.  A file holding only quasilinear blocks may
omit the market fields.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any, Optional

from .core import Market, Matching, RankedChoice, validate_instance
from .quasilinear import Valuation
from .school import SchoolRule


class InstanceError(ValueError):
    """Problems found while reading an instance; ``errors`` lists each one."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass
class QuasilinearBlock:
    valuation: Valuation
    name: Optional[str] = None
    queries: list[tuple[Fraction, ...]] = field(default_factory=list)


@dataclass
class InstanceDocument:
    market: Optional[Market] = None
    quasilinear: list[QuasilinearBlock] = field(default_factory=list)

    @property
    def school_rules(self) -> dict[str, SchoolRule]:
        if self.market is None:
            return {}
        return {
            f: cf for f, cf in zip(self.market.firms, self.market.choices)
            if isinstance(cf, SchoolRule)
        }

    def valuation(self, name: Optional[str] = None) -> Valuation:
        for block in self.quasilinear:
            if name is None or block.name == name:
                return block.valuation
        raise KeyError(name)


def _names(value: Any, path: str, errors: list[str]) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        errors.append(f"{path}: expected a list of names")
        return []
    if len(set(value)) != len(value):
        errors.append(f"{path}: duplicate names")
    return value


def _resolve(names: list[str], table: dict[str, int], path: str, errors: list[str]) -> list[int]:
    out = []
    for name in names:
        if name not in table:
            errors.append(f"{path}: unknown name {name!r}")
        else:
            out.append(table[name])
    return out


def _rational(value: Any, path: str, errors: list[str]) -> Optional[Fraction]:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        errors.append(f"{path}: expected an integer or a rational string like \"1/2\"")
        return None
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        errors.append(f"{path}: {value!r} is not a rational number")
        return None


def _parse_market(data: dict, errors: list[str]) -> Optional[Market]:
    firms = _names(data.get("firms"), "firms", errors)
    workers = _names(data.get("workers"), "workers", errors)
    fidx = {f: i for i, f in enumerate(firms)}
    widx = {w: i for i, w in enumerate(workers)}
    n = len(workers)

    groups = []
    raw_groups = data.get("groups", [workers])
    if not isinstance(raw_groups, list):
        errors.append("groups: expected a list of name lists")
        raw_groups = []
    for k, g in enumerate(raw_groups):
        ids = _resolve(_names(g, f"groups[{k}]", errors), widx, f"groups[{k}]", errors)
        groups.append(sum(1 << i for i in set(ids)))

    raw_wp = data.get("worker_prefs", {})
    if not isinstance(raw_wp, dict):
        errors.append("worker_prefs: expected an object")
        raw_wp = {}
    for name in raw_wp:
        if name not in widx:
            errors.append(f"worker_prefs.{name}: unknown worker")
    worker_prefs = []
    for w in workers:
        path = f"worker_prefs.{w}"
        worker_prefs.append(tuple(_resolve(_names(raw_wp.get(w, []), path, errors), fidx, path, errors)))

    school = data.get("school", {})
    if not isinstance(school, dict):
        errors.append("school: expected an object")
        school = {}
    raw_fp = data.get("firm_prefs", {})
    if not isinstance(raw_fp, dict):
        errors.append("firm_prefs: expected an object")
        raw_fp = {}
    for name in list(raw_fp) + list(school):
        if name not in fidx:
            errors.append(f"{'school' if name in school else 'firm_prefs'}.{name}: unknown firm")

    within = groups[0] if groups else 0
    choices = []
    for f in firms:
        if f in school:
            choices.append(_parse_rule(school[f], f"school.{f}", widx, within, n, errors))
            continue
        path = f"firm_prefs.{f}"
        ranked_raw = raw_fp.get(f)
        if not isinstance(ranked_raw, list) or not ranked_raw:
            errors.append(f"{path}: firm has no ranked subsets")
            ranked_raw = []
        ranked = []
        for j, subset in enumerate(ranked_raw):
            ids = _resolve(_names(subset, f"{path}[{j}]", errors), widx, f"{path}[{j}]", errors)
            ranked.append(sum(1 << i for i in set(ids)))
        choices.append(RankedChoice(ranked, n))

    if errors:
        return None
    market = Market(tuple(firms), tuple(workers), tuple(groups), tuple(worker_prefs), tuple(choices))
    errors.extend(validate_instance(market))
    return market


def _parse_rule(raw: Any, path: str, widx: dict[str, int], within: int, n: int,
                errors: list[str]) -> SchoolRule:
    if not isinstance(raw, dict):
        errors.append(f"{path}: expected an object")
        return SchoolRule(list(range(n)), 1, 1, within)
    priority = _resolve(_names(raw.get("priority"), f"{path}.priority", errors),
                        widx, f"{path}.priority", errors)
    capacity = raw.get("capacity")
    if isinstance(capacity, bool) or not isinstance(capacity, int):
        errors.append(f"{path}.capacity: expected an integer")
        capacity = 1
    ceiling = _rational(raw.get("ceiling", "1"), f"{path}.ceiling", errors)
    return SchoolRule(priority, capacity, ceiling if ceiling is not None else 1, within)


def _parse_quasilinear(raw: Any, path: str, errors: list[str]) -> Optional[QuasilinearBlock]:
    if not isinstance(raw, dict):
        errors.append(f"{path}: expected an object")
        return None
    workers = _names(raw.get("workers"), f"{path}.workers", errors)
    table = raw.get("valuations")
    if not isinstance(table, dict):
        errors.append(f"{path}.valuations: expected an object")
        return None
    parsed = {}
    for key, val in table.items():
        q = _rational(val, f"{path}.valuations[{key!r}]", errors)
        if q is not None:
            parsed[key] = q
    try:
        valuation = Valuation.from_mapping(workers, parsed)
    except ValueError as exc:
        errors.append(f"{path}.valuations: {exc}")
        return None
    queries = []
    for j, q in enumerate(raw.get("queries", [])):
        qpath = f"{path}.queries[{j}]"
        if not isinstance(q, dict) or set(q) != set(workers):
            errors.append(f"{qpath}: expected a salary for every worker")
            continue
        vec = [_rational(q[w], f"{qpath}.{w}", errors) for w in workers]
        if None not in vec:
            queries.append(tuple(vec))
    return QuasilinearBlock(valuation, raw.get("name"), queries)


def parse_instance(text: str) -> InstanceDocument:
    """Parse and validate an instance; raises :class:`InstanceError` listing every problem."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError([f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"])
    if not isinstance(data, dict):
        raise InstanceError(["top level: expected an object"])
    errors: list[str] = []
    doc = InstanceDocument()
    has_market = any(k in data for k in ("firms", "workers", "firm_prefs", "school"))
    if has_market or "quasilinear" not in data:
        doc.market = _parse_market(data, errors)
    raw_ql = data.get("quasilinear")
    if raw_ql is not None:
        blocks = raw_ql if isinstance(raw_ql, list) else [raw_ql]
        for j, raw in enumerate(blocks):
            path = f"quasilinear[{j}]" if isinstance(raw_ql, list) else "quasilinear"
            block = _parse_quasilinear(raw, path, errors)
            if block is not None:
                doc.quasilinear.append(block)
    if errors:
        raise InstanceError(errors)
    return doc


def load_instance(path: str) -> InstanceDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def fixture_names() -> list[str]:
    return sorted(
        p.name for p in resources.files("uscmatch.data").iterdir() if p.name.endswith(".json")
    )


def load_fixture(name: str) -> InstanceDocument:
    """Load one of the bundled example instances, e.g. ``"example1.json"``."""
    if not name.endswith(".json"):
        name += ".json"
    return parse_instance(resources.files("uscmatch.data").joinpath(name).read_text("utf-8"))


def _market_dict(market: Market) -> dict:
    out: dict[str, Any] = {
        "firms": list(market.firms),
        "workers": list(market.workers),
        "groups": [market.names(g) for g in market.groups],
        "worker_prefs": {
            w: [market.firms[f] for f in market.worker_prefs[i]]
            for i, w in enumerate(market.workers)
        },
    }
    firm_prefs, school = {}, {}
    for f, cf in zip(market.firms, market.choices):
        if isinstance(cf, SchoolRule):
            school[f] = {
                "priority": [market.workers[w] for w in cf.priority],
                "capacity": cf.capacity,
                "ceiling": str(cf.ceiling),
            }
        elif isinstance(cf, RankedChoice):
            firm_prefs[f] = [market.names(s) for s in cf.ranked]
        else:
            raise TypeError(f"cannot serialize choice function of type {type(cf).__name__}")
    if firm_prefs:
        out["firm_prefs"] = firm_prefs
    if school:
        out["school"] = school
    return out


def _ql_dict(block: QuasilinearBlock) -> dict:
    v = block.valuation
    out: dict[str, Any] = {}
    if block.name is not None:
        out["name"] = block.name
    out["workers"] = list(v.names)
    out["valuations"] = v.to_mapping()
    if block.queries:
        out["queries"] = [
            {w: str(x) for w, x in zip(v.names, q)} for q in block.queries
        ]
    return out


def instance_to_dict(doc: InstanceDocument) -> dict:
    out = _market_dict(doc.market) if doc.market is not None else {}
    if len(doc.quasilinear) == 1 and doc.quasilinear[0].name is None:
        out["quasilinear"] = _ql_dict(doc.quasilinear[0])
    elif doc.quasilinear:
        out["quasilinear"] = [_ql_dict(b) for b in doc.quasilinear]
    return out


def serialize_instance(doc: InstanceDocument) -> str:
    return json.dumps(instance_to_dict(doc), indent=2) + "\n"


def matching_to_dict(market: Market, matching: Matching) -> dict[str, list[str]]:
    return {market.firms[f]: market.names(h) for f, h in enumerate(matching.holdings())}


def parse_matching(market: Market, text: str) -> Matching:
    """Read a matching written as ``{"firm": ["worker", ...]}``; unlisted workers are unmatched."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError([f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"])
    errors: list[str] = []
    if not isinstance(data, dict):
        raise InstanceError(["matching: expected an object mapping firms to worker lists"])
    fidx = {f: i for i, f in enumerate(market.firms)}
    widx = {w: i for i, w in enumerate(market.workers)}
    holdings = [0] * market.n_firms
    seen = 0
    for fname, wnames in data.items():
        if fname not in fidx:
            errors.append(f"matching.{fname}: unknown firm")
            continue
        for w in _resolve(_names(wnames, f"matching.{fname}", errors), widx, f"matching.{fname}", errors):
            if seen >> w & 1:
                errors.append(f"matching.{fname}: {market.workers[w]} is assigned twice")
            seen |= 1 << w
            holdings[fidx[fname]] |= 1 << w
    if errors:
        raise InstanceError(errors)
    return Matching.from_holdings(holdings, market.n_workers)

