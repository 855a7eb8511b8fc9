"""File formats: egonet samples (JSON lines), census CSVs, estimate JSON.

Egonet sample layout::

    {"n_prime": 5, "design": {...}, "labeled": true, "categories": ["F", "M"]}
    {"ego": 17, "neighbors": [3, 9], "edges": [[3, 9]], "attrs": {"17": "F", ...}, "count": 2}
    ...

Labeled records list global neighbor ids. Unlabeled records give only
``"size"`` (the neighbor count) and write their edges over local indices,
``0`` for the ego and ``1..size`` for neighbors. Edges between the ego and
its neighbors may be omitted. ``count`` (draw multiplicity) is optional.
"""
from __future__ import annotations

import csv
import json
import logging
from typing import Mapping

from .cliques import Census
from .designs import SamplingDesign, uis, wis
from .graph import Egonet, EgonetSample, GraphFormatError

log = logging.getLogger(__name__)


def _id(x):
    """JSON object keys arrive as strings; integer-looking ids become ints."""
    if isinstance(x, str):
        try:
            return int(x)
        except ValueError:
            return x
    return x


def design_to_json(d: SamplingDesign | None):
    if d is None:
        return None
    out = {"kind": d.kind, "replacement": "with" if d.replacement else "without",
           "draws": d.draws, "N": d.N}
    if d.weights is not None:
        out["weight_mode"] = d.weight_mode
    return out


def design_from_json(obj, weights=None) -> SamplingDesign | None:
    if not obj:
        return None
    repl = obj.get("replacement", "without")
    repl = repl if isinstance(repl, bool) else repl == "with"
    if obj.get("kind", "uis") == "uis":
        return uis(int(obj["N"]), int(obj["draws"]), repl)
    if weights is None:
        raise ValueError("weighted design in sample header needs a weight source")
    return wis(weights, int(obj["draws"]), repl, N=int(obj["N"]),
               proportional=obj.get("weight_mode") == "proportional")


def write_egonet_sample(sample: EgonetSample, path) -> None:
    labels = list(sample.category_labels) if sample.category_labels else None
    header = {"n_prime": sample.n_prime, "design": design_to_json(sample.design),
              "labeled": sample.labeled}
    if labels:
        header["categories"] = labels
    with open(path, "w") as fh:
        fh.write(json.dumps(header) + "\n")
        for e in sample.egonets:
            rec: dict = {"ego": _plain(e.ego_id)}
            if e.labeled:
                rec["neighbors"] = [_plain(v) for v in e.neighbors]
            else:
                rec["size"] = e.degree
            rec["edges"] = [[_plain(a), _plain(b)] for a, b in e.edges]
            if e.attrs is not None:
                rec["attrs"] = {str(_plain(k)): labels[c - 1] if labels else c for k, c in e.attrs.items()}
            if sample.multiplicity is not None:
                rec["count"] = int(sample.multiplicity[e.ego_id])
            fh.write(json.dumps(rec) + "\n")


def _plain(x):
    return x.item() if hasattr(x, "item") else x


def read_egonet_sample(path, design: SamplingDesign | None = None, weights=None) -> EgonetSample:
    """Read an egonet sample; duplicate ego records are collapsed.

    ``design`` overrides the header's design. Attribute labels are mapped to
    categories ``1..p`` using the header's ``categories`` list, or else in
    order of first appearance.
    """
    with open(path) as fh:
        lines = [ln for ln in fh if ln.strip()]
    if not lines:
        raise GraphFormatError(f"{path}: empty egonet file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path}: line 1: {exc}") from None
    if "n_prime" not in header:
        raise GraphFormatError(f"{path}: first line must be a header with n_prime")
    labels = list(header.get("categories") or [])
    code = {lab: k for k, lab in enumerate(labels, 1)}
    egonets: dict = {}
    counts: dict = {}
    labeled_flags = set()
    for lineno, line in enumerate(lines[1:], 2):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"{path}: line {lineno}: {exc}") from None
        if "ego" not in rec:
            raise GraphFormatError(f"{path}: line {lineno}: record without ego")
        ego = _id(rec["ego"])
        labeled = "neighbors" in rec
        labeled_flags.add(labeled)
        if len(labeled_flags) > 1:
            raise GraphFormatError(f"{path}: line {lineno}: mixed labeled and unlabeled records")
        if labeled:
            nbrs = tuple(_id(v) for v in rec["neighbors"])
        else:
            nbrs = tuple(range(1, int(rec["size"]) + 1))
        edges = tuple((_id(a), _id(b)) for a, b in rec.get("edges", ()))
        attrs = None
        if "attrs" in rec:
            attrs = {}
            for k, lab in rec["attrs"].items():
                if isinstance(lab, int) and not labels:
                    attrs[_id(k)] = lab
                    continue
                if lab not in code:
                    labels.append(lab)
                    code[lab] = len(labels)
                attrs[_id(k)] = code[lab]
        e = Egonet(ego, nbrs, edges, labeled, attrs)
        e.adjacency()  # validates edge endpoints
        counts[ego] = counts.get(ego, 0) + int(rec.get("count", 1))
        if ego in egonets:
            log.warning("%s: line %d: duplicate ego %r collapsed", path, lineno, ego)
            continue
        egonets[ego] = e
    if not egonets:
        raise GraphFormatError(f"{path}: no egonet records")
    if "labeled" in header and bool(header["labeled"]) != labeled_flags.pop():
        raise GraphFormatError(f"{path}: header labeled flag disagrees with records")
    n_prime = int(header["n_prime"])
    if design is None:
        design = design_from_json(header.get("design"), weights)
    multiplicity = counts if sum(counts.values()) == n_prime else None
    return EgonetSample(n_prime, tuple(egonets.values()), design, multiplicity,
                        tuple(str(x) for x in labels) or None, {"path": str(path)})


def write_census(c: Census, order_path, composition_path=None) -> None:
    with open(order_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["order", "count"])
        for i, k in sorted(c.order_counts.items()):
            w.writerow([i, k])
    if composition_path is not None and c.composition_counts is not None:
        with open(composition_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["composition", "count"])
            for u, k in sorted(c.composition_counts.items()):
                w.writerow([format_composition(u), k])


def format_composition(u) -> str:
    return "|".join(str(x) for x in u)


def parse_composition(s: str) -> tuple:
    return tuple(int(x) for x in s.split("|"))


def read_census(order_path, composition_path=None) -> Census:
    """Load a precomputed truth written by :func:`write_census`."""
    with open(order_path, newline="") as fh:
        orders = {int(r["order"]): int(r["count"]) for r in csv.DictReader(fh)}
    comps = None
    if composition_path is not None:
        with open(composition_path, newline="") as fh:
            comps = {parse_composition(r["composition"]): int(r["count"]) for r in csv.DictReader(fh)}
    return Census(orders, comps)


def estimates_to_json(estimates: Mapping, sample: EgonetSample, seed=None, categories=None) -> str:
    recs = []
    for t, est in sorted(estimates.items(), key=lambda kv: (isinstance(kv[0], tuple), kv[0])):
        r = est.to_record(sample.n, sample.n_prime, seed)
        if isinstance(t, tuple):
            r["composition"] = format_composition(t)
        recs.append(r)
    out = {"estimates": recs}
    if categories:
        out["categories"] = list(categories)
    return json.dumps(out, indent=1)
