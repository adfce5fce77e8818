"""Run scenario files: build a family, execute analyses, write reports.

A scenario is a JSON object validated against ``schema/scenario.schema.json``::

    {
      "schema_version": 1,
      "p": 2,
      "family": {"name": "rotating", "params": {"step": 0.01}, "prefix_length": 200},
      "analyses": [{"kind": "theorem1", "eps": 0.1}]
    }

Each analysis ends ``ok`` or ``refused``; refusals carry the violated
inequality.  Invalid input raises :class:`ScenarioError` before any file is
written.
"""
from __future__ import annotations

import copy
import csv
import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from ..ambient import AmbientSpace, CompactCover, greedy_net
from ..bfspace import almost_order_bounded_gap, bfs_from_dict, nontight_divergence_witness
from ..bochner import traversal
from ..converse import tightness_from_nets, ui_from_net
from ..criteria import (
    certify_tightness, certify_ui, geometric_grid, outside_measures, scalar_compactness_report,
    tail_norms, ui_curve, ui_curve_csv,
)
from ..errors import RefusalError
from ..extraction import diagonal_extract, lemma_extract, theorem1_extract
from ..measure import LpNorm, MeasureSpace
from .families import dyadic_space, make_family
from .remark import remark_family, remark_scalar_image_check

SCHEMA_VERSION = 1

EXIT_OK, EXIT_ERROR, EXIT_INVALID, EXIT_REFUSED = 0, 1, 2, 3


class ScenarioError(ValueError):
    """The scenario file is malformed; ``path`` locates the offending entry."""

    def __init__(self, message, path="$"):
        self.path = path
        super().__init__(f"{path}: {message}")


def load_schema():
    text = resources.files("lpcompact").joinpath("schema/scenario.schema.json").read_text()
    return json.loads(text)


def _json_path(parts):
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def validate(config):
    """Raise :class:`ScenarioError` at the first (deepest-path) schema violation."""
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(config), key=lambda e: (-len(e.absolute_path),
                                                                   list(map(str, e.absolute_path))))
    if errors:
        e = errors[0]
        raise ScenarioError(e.message, _json_path(e.absolute_path))


def to_jsonable(obj):
    """Plain Python containers with finite floats; infinities become strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report):
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True) + "\n"


@dataclass
class ScenarioRun:
    report: dict
    csv_files: dict

    @property
    def refused(self):
        return any(a["status"] == "refused" for a in self.report["analyses"])

    @property
    def exit_code(self):
        return EXIT_REFUSED if self.refused else EXIT_OK


def _build(config):
    fam_cfg = config["family"]
    name, params = fam_cfg["name"], fam_cfg.get("params", {})
    if name == "remark":
        _, _, family = remark_family(params.get("resolution", 0.05))
        return family
    space = None
    if "space" in config:
        s = config["space"]
        if "weights" in s:
            space = MeasureSpace(s["weights"], normalize=s.get("normalized", True))
        elif "atoms" in s:
            space = MeasureSpace.uniform(s["atoms"])
        else:
            space = dyadic_space(s["dyadic"])
    ambient = AmbientSpace.from_dict(config["ambient"]) if "ambient" in config else None
    return make_family(name, params, space, ambient)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _pooled_cover(prefix, radius, max_centers=None):
    """Greedy net of all values taken by the prefix, optionally truncated."""
    pts = np.unique(prefix.pooled_values(), axis=0)
    if radius > 0:
        cover = greedy_net(prefix.ambient, pts, radius)
    else:
        cover = CompactCover(prefix.ambient, pts, 0.0)
    if max_centers is not None and len(cover) > max_centers:
        cover = CompactCover(prefix.ambient, cover.centers[:max_centers], cover.radius)
    return cover


def _given_or_pooled_cover(prefix, a, default_radius):
    radius = float(a.get("cover_radius", default_radius))
    if "centers" in a:
        c = np.asarray(a["centers"], dtype=np.float64)
        if c.ndim != 2 or c.shape[1] != prefix.ambient.dim:
            raise ScenarioError(f"centers must be rows of length {prefix.ambient.dim}")
        return CompactCover(prefix.ambient, c, radius)
    return _pooled_cover(prefix, radius, a.get("max_centers"))


def _need(a, key, where):
    if key not in a:
        raise ScenarioError(f"'{key}' is required for {a['kind']}", where)
    return a[key]


class _Context:
    def __init__(self, config, family):
        self.config = config
        self.family = family
        self.prefix = family.prefix(config["family"]["prefix_length"])
        self.p = float(config.get("p", 2.0))
        self.lp = LpNorm(self.p)
        E_cfg = config.get("E", {"kind": "lq", "q": self.p})
        self.E = bfs_from_dict(self.prefix.space, E_cfg)

    def norm(self, a):
        return self.E if a.get("use_E") else self.lp


def _ui_modulus(ctx, a, where):
    radii = np.asarray(a.get("radii", geometric_grid(64.0, 13)), dtype=np.float64)
    vals = ui_curve(ctx.prefix, ctx.norm(a), radii)
    result = {"radii": radii, "ui_modulus": vals}
    # per-member tails at each radius show whether the modulus decays along the prefix
    result["member_tails_at_index_radius"] = [
        float(tail_norms(ctx.prefix.take([k]), ctx.norm(a), float(k + 1))[0])
        for k in range(len(ctx.prefix))
    ]
    return result, {"ui_modulus.csv": ui_curve_csv(radii, vals)}


def _tightness_deficiency(ctx, a, where):
    cover = _given_or_pooled_cover(ctx.prefix, a, 0.0)
    out = outside_measures(ctx.prefix, cover)
    result = {"cover": cover, "deficiency": float(out.max()), "per_member": out}
    return result, {"tightness_deficiency.csv": _csv(
        ["index", "outside_measure"], zip(ctx.prefix.indices.tolist(), out))}


def _scalar_report(ctx, a, where):
    rep = scalar_compactness_report(ctx.prefix, ctx.norm(a), eps_grid=a.get("eps_grid"))
    return rep.to_dict(), {"scalar_report.csv": rep.to_csv()}


def _covering_numbers(ctx, a, where):
    grid = np.asarray(a.get("eps_grid", geometric_grid()), dtype=np.float64)
    tr = traversal(ctx.prefix, ctx.norm(a))
    counts = [tr.covering_number(e) for e in grid]
    result = {"eps_grid": grid, "covering_numbers": counts}
    return result, {"covering_numbers.csv": _csv(["eps", "covering_number"], zip(grid, counts))}


def _certify_ui(ctx, a, where):
    cert = certify_ui(ctx.prefix, ctx.norm(a), float(_need(a, "r", where)))
    return cert.to_dict(), {}


def _certify_tightness(ctx, a, where):
    cert = certify_tightness(ctx.prefix, _given_or_pooled_cover(ctx.prefix, a, 0.0))
    return cert.to_dict(), {}


def _ui_from_net(ctx, a, where):
    return ui_from_net(ctx.prefix, ctx.norm(a), float(_need(a, "eps", where))).to_dict(), {}


def _tightness_from_nets(ctx, a, where):
    cert = tightness_from_nets(ctx.prefix, ctx.norm(a), float(_need(a, "eps", where)),
                               a.get("n_max"))
    return cert.to_dict(), {}


def _theorem1(ctx, a, where):
    eps = float(_need(a, "eps", where))
    norm = ctx.norm(a)
    r = float(a.get("r", max(float(ctx.prefix.pointwise_norms.max()), 1e-300)))
    ui = certify_ui(ctx.prefix, norm, r)
    tight = certify_tightness(ctx.prefix, _given_or_pooled_cover(ctx.prefix, a, eps / 4.0))
    cert = theorem1_extract(ctx.prefix, norm, eps, ui, tight, a.get("lemma_eps"),
                            a.get("eps_prime"))
    result = {"ui_certificate": ui, "tightness_certificate": tight, **cert.to_dict()}
    rows = [(q["pair"][0], q["pair"][1], q["distance"], q["six_eps_line"]) for q in cert.pair_table]
    return result, {"theorem1_pairs.csv": _csv(["i", "j", "distance", "six_eps_line"], rows)}


def _lemma(ctx, a, where):
    eps = float(_need(a, "eps", where))
    cover = _given_or_pooled_cover(ctx.prefix, a, eps / 2.0)
    cert = lemma_extract(ctx.prefix, cover, ctx.norm(a), eps, a.get("eps_prime"))
    return cert.to_dict(), {}


def _diagonal(ctx, a, where):
    return diagonal_extract(ctx.prefix, ctx.norm(a), _need(a, "schedule", where)).to_dict(), {}


def _witness(ctx, a, where):
    rec = nontight_divergence_witness(ctx.prefix, ctx.E, float(_need(a, "eps0", where)),
                                      float(_need(a, "delta0", where)))
    return rec.to_dict(), {}


def _almost_order_bounded(ctx, a, where):
    interval, residual = almost_order_bounded_gap(ctx.prefix, ctx.E,
                                                  float(_need(a, "eps", where)))
    return {"center": interval.center, "slack": interval.slack, "residual": residual}, {}


def _remark(ctx, a, where):
    rec = remark_scalar_image_check(a.get("c", [3.0, 4.0]), a.get("y", 5.0),
                                    a.get("resolution", 1e-2))
    return rec.to_dict(), {}


ANALYSES = {
    "ui_modulus": _ui_modulus,
    "tightness_deficiency": _tightness_deficiency,
    "scalar_report": _scalar_report,
    "covering_numbers": _covering_numbers,
    "certify_ui": _certify_ui,
    "certify_tightness": _certify_tightness,
    "ui_from_net": _ui_from_net,
    "tightness_from_nets": _tightness_from_nets,
    "theorem1": _theorem1,
    "lemma": _lemma,
    "diagonal": _diagonal,
    "witness": _witness,
    "almost_order_bounded": _almost_order_bounded,
    "remark": _remark,
}


def run_scenario(config, out_dir=None, fmt="json"):
    """Validate, run every analysis, and optionally write the report files.

    Returns a :class:`ScenarioRun`.  With ``out_dir`` set, ``report.json``
    (``fmt="json"``) and the CSV curve files are written there, and nothing
    is written when validation fails.
    """
    if fmt not in ("json", "csv"):
        raise ScenarioError(f"unknown format {fmt!r}")
    config = copy.deepcopy(config)
    validate(config)
    try:
        family = _build(config)
        ctx = _Context(config, family)
    except (ValueError, IndexError, TypeError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(str(exc), "$.family") from exc

    entries, files = [], {}
    for k, a in enumerate(config["analyses"]):
        where = f"$.analyses[{k}]"
        entry = {"kind": a["kind"], "params": a}
        try:
            result, csvs = ANALYSES[a["kind"]](ctx, a, where)
        except RefusalError as exc:
            entry.update(status="refused", reason=str(exc), error_type=type(exc).__name__)
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError(str(exc), where) from exc
        else:
            entry.update(status="ok", result=result)
            for fname, text in csvs.items():
                files[f"{k:02d}_{fname}"] = text
        entries.append(entry)

    report = {
        "schema_version": SCHEMA_VERSION,
        "scenario": config,
        "family": family.describe(),
        "space": ctx.prefix.space.to_dict(),
        "ambient": ctx.prefix.ambient.to_dict(),
        "prefix_length": len(ctx.prefix),
        "analyses": entries,
    }
    report["status"] = "refused" if any(e["status"] == "refused" for e in entries) else "ok"
    report = to_jsonable(report)
    run = ScenarioRun(report, files)
    if out_dir is not None:
        write_outputs(run, out_dir, fmt)
    return run


def write_outputs(run, out_dir, fmt="json"):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        (out / "report.json").write_text(dumps(run.report))
    for name, text in sorted(run.csv_files.items()):
        (out / name).write_text(text)
    return out


def load_scenario(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"not valid JSON: {exc.msg} (line {exc.lineno})") from exc
