"""Command line entry point.

Exit codes: 0 when every verdict matches what was expected, 1 on a
mismatch or failed check, 2 when the input cannot be read or parsed.
"""
from __future__ import annotations

import sys
import time
from typing import Dict, List, Optional, Tuple

import click

from . import catalog
from .calculus import CalculusSpec, certify
from .de_core import DEData, check_operator_relations, check_system_c, classify_iterated_ore
from .errors import DoubleOreError, MissingRule, NotOrientable, UnsupportedCalculusShape
from .presentation_io import Presentation, emit_report, make_report, parse_presentation
from .rewrite import build_rewrite_system
from .smoothness import smoothness_report

OK, MISMATCH, INPUT_ERROR = 0, 1, 2


# --- report sections ------------------------------------------------------------

def _key(k) -> str:
    return ":".join(str(x) for x in k)


def system_c_section(data: DEData) -> dict:
    rep = check_system_c(data)
    nonzero = rep.nonzero()
    printed = {k: v for k, v in rep.printed_residuals.items() if not v.is_zero()}
    return {
        "verdict": "double_extension" if rep.is_double_extension else "not_double_extension",
        "residuals": [[_key(k), v.text()] for k, v in sorted(nonzero.items())],
        "det_sigma": rep.detSigma.text(),
        "det_sigma_status": rep.detSigma.status(),
        "det_m": rep.detM.text(),
        "printed_transcription": {
            "differs_at": [_key(k) for k in rep.discrepancies],
            "residuals": [[_key(k), v.text()] for k, v in sorted(printed.items())],
        },
    }


def operator_relations_section(data: DEData, degree: int) -> dict:
    rep = check_operator_relations(data, degree)
    A = data.alphabet
    rows = []
    for name, bad in sorted(rep.nonzero().items()):
        for m, r in bad:
            label = A.word_text(m) if name != "sigma_hom" else "sigma%d%d" % m if m[1] else "delta%d" % m[0]
            rows.append([name, label, r.text()])
    printed = [[A.word_text(m), r.text()] for m, r in zip(rep.monomials, rep.printed_delta_delta) if r]
    return {
        "verdict": "zero_residuals" if rep.all_zero else "nonzero_residuals",
        "degree_bound": degree,
        "residuals": rows,
        "printed_delta_delta_residuals": printed,
    }


def confluence_section(p: Presentation) -> dict:
    try:
        system = build_rewrite_system(p)
    except (NotOrientable, MissingRule) as exc:
        return {"verdict": "not_orientable", "residuals": [], "message": str(exc)}
    rep = system.check_confluence()
    A = system.alphabet
    return {
        "verdict": "confluent" if rep.all_resolved else "unresolved",
        "rules": system.rule_table(),
        "overlaps": len(rep.overlaps),
        "residuals": [[A.word_text(o.word), o.left.text(), o.right.text()] for o in rep.unresolved()],
    }


def ore_section(data: DEData) -> dict:
    c = classify_iterated_ore(data)
    return {
        "verdict": sorted(c.verdict),
        "sigma12_zero": c.sigma12_zero,
        "sigma21_zero_p11_zero": c.sigma21_zero_p11_zero,
        "m12_zero": c.m12_zero,
        "m21_zero_q11_zero": c.m21_zero_q11_zero,
        "m_invertible": c.m_invertible,
    }


def smoothness_section(p: Presentation) -> dict:
    return smoothness_report(p).as_dict()


def calculus_section(p: Presentation, connect_bound: int = 6, integral_bound: int = 3,
                     twists: str = "derived") -> dict:
    spec = CalculusSpec.from_presentation(p, twists=twists, witness=bool(p.witness))
    return certify(spec, connect_bound, integral_bound).as_dict(spec.alphabet.names)


def _use_system_c(data: DEData) -> bool:
    return data.trimmed and data.graded and len(data.base) == 2


def verify_de_sections(p: Presentation, degree: int) -> Tuple[Dict[str, dict], bool]:
    if p.de is None:
        raise ValueError("the presentation has no de block")
    data = p.de
    checks = {}
    if _use_system_c(data):
        checks["system_c"] = system_c_section(data)
        checks["operator_relations"] = operator_relations_section(data, 2)
        checks["ore_classification"] = ore_section(data)
        sc = checks["system_c"]["verdict"] == "double_extension"
        op = checks["operator_relations"]["verdict"] == "zero_residuals"
        ok = sc and op
    else:
        checks["operator_relations"] = operator_relations_section(data, degree)
        ok = checks["operator_relations"]["verdict"] == "zero_residuals"
    return checks, ok


# --- catalog sweep -------------------------------------------------------------

def _instance_label(entry) -> str:
    if not entry.bindings:
        return entry.id
    inner = ",".join(f"{k}={v}" for k, v in sorted(entry.bindings.items()))
    return f"{entry.id}[{inner}]"


def check_entry(entry) -> dict:
    """Compare one catalog entry against its tabulated profile."""
    p = entry.presentation
    out: Dict[str, object] = {}
    problems: List[str] = []
    if entry.data is not None and _use_system_c(entry.data):
        sc = system_c_section(entry.data)
        op = operator_relations_section(entry.data, 2)
        out["system_c"] = {k: sc[k] for k in ("verdict", "residuals", "det_sigma")}
        if sc["verdict"] != "double_extension":
            problems.append("system_c")
        if (op["verdict"] == "zero_residuals") != (sc["verdict"] == "double_extension"):
            problems.append("checker_disagreement")
        ore = ore_section(entry.data)
        out["ore_classification"] = ore["verdict"]
        if entry.expected_ore is not None:
            extra = catalog.computed_extra(entry.id, entry.bindings)
            if set(ore["verdict"]) != set(entry.expected_ore) | extra:
                problems.append("ore_classification")
    elif entry.data is not None:
        op = operator_relations_section(entry.data, 3)
        out["operator_relations"] = op["verdict"]
        if op["verdict"] != "zero_residuals":
            problems.append("operator_relations")
    conf = confluence_section(p)
    out["confluence"] = conf["verdict"]
    if conf["verdict"] != "confluent":
        problems.append("confluence")
    sm = smoothness_report(p)
    out["smoothness"] = sm.as_dict()["pattern"]
    if entry.expected_pattern is not None and (sm.pattern != entry.expected_pattern or sm.conditional):
        problems.append("smoothness")
    out["annotations"] = list(entry.annotations)
    out["mismatches"] = problems
    out["verdict"] = "match" if not problems else "mismatch"
    return out


def catalog_sections(family: str) -> Dict[str, dict]:
    if family.lower() == "all":
        ids = list(catalog.FAMILY_IDS)
    else:
        ids = [catalog.canonical_id(family)]
    checks = {}
    for fid in ids:
        for entry in catalog.expand_instances(catalog.load_family(fid)):
            checks[_instance_label(entry)] = check_entry(entry)
        for sid, vals, clauses in catalog.SPECIAL_ORE:
            if sid != fid:
                continue
            entry = catalog.load_family(fid, vals)
            got = set(ore_section(entry.data)["verdict"])
            extra = catalog.computed_extra(fid, vals)
            checks[_instance_label(entry)] = {
                "verdict": "match" if got == set(clauses) | extra else "mismatch",
                "ore_classification": sorted(got),
                "expected": sorted(clauses),
                "computed_extra": sorted(extra),
            }
    return checks


# --- commands ------------------------------------------------------------------

def _load(path: str) -> Presentation:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_presentation(fh.read())
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror}")
    except DoubleOreError as exc:
        raise _InputError(f"{path}: {exc}")


class _InputError(Exception):
    pass


def _emit(p: Optional[Presentation], checks, t0: float, fmt: str, ok: bool) -> None:
    report = make_report(p, checks, (time.perf_counter() - t0) * 1000)
    click.echo(emit_report(report, fmt).decode(), nl=False)
    sys.exit(OK if ok else MISMATCH)


def _run(fn):
    """Map input errors to exit code 2."""
    try:
        fn()
    except (_InputError, DoubleOreError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(INPUT_ERROR)


format_option = click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json",
                             show_default=True, help="Report format.")


@click.group()
@click.version_option(package_name="doubleore")
def main():
    """Exact checks for double Ore extensions and their calculi."""


@main.command("verify-de")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--degree", default=3, show_default=True,
              help="Degree bound for the operator relations on untrimmed data.")
@format_option
def verify_de(path, degree, fmt):
    """System C, or the operator relations when tails are present."""
    def go():
        t0 = time.perf_counter()
        p = _load(path)
        if p.de is None:
            raise _InputError(f"{path}: no 'de' block")
        checks, ok = verify_de_sections(p, degree)
        _emit(p, checks, t0, fmt, ok)
    _run(go)


@main.command()
@click.argument("path", type=click.Path(dir_okay=False))
@format_option
def confluence(path, fmt):
    """Resolve every length-3 overlap of the rewriting rules."""
    def go():
        t0 = time.perf_counter()
        p = _load(path)
        sec = confluence_section(p)
        _emit(p, {"confluence": sec}, t0, fmt, sec["verdict"] == "confluent")
    _run(go)


@main.command()
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--expect", type=click.Choice(["four_term_mixing", "lone_generator", "none"]),
              help="Fail unless this pattern is found. Defaults to meta expect_pattern.")
@format_option
def smoothness(path, expect, fmt):
    """Look for the two relation patterns that rule out smoothness."""
    def go():
        t0 = time.perf_counter()
        p = _load(path)
        sec = smoothness_section(p)
        want = expect or p.meta.get("expect_pattern")
        _emit(p, {"smoothness": sec}, t0, fmt, want is None or sec["pattern"] == want)
    _run(go)


@main.command()
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--connect-bound", default=6, show_default=True, type=click.IntRange(0))
@click.option("--integral-bound", default=3, show_default=True, type=click.IntRange(0))
@click.option("--twists", type=click.Choice(["derived", "stored"]), default="derived", show_default=True,
              help="Read the twists off the relations or use the presentation's table.")
@format_option
def calculus(path, connect_bound, integral_bound, twists, fmt):
    """Build the twisted calculus and try to certify it."""
    def go():
        t0 = time.perf_counter()
        p = _load(path)
        try:
            sec = calculus_section(p, connect_bound, integral_bound, twists)
        except UnsupportedCalculusShape as exc:
            raise _InputError(str(exc))
        _emit(p, {"calculus": sec}, t0, fmt, sec["verdict"] == "certified")
    _run(go)


@main.group("catalog")
def catalog_group():
    """The tabulated families and worked examples."""


@catalog_group.command("check")
@click.option("--family", default="all", show_default=True, help="A..Z, an example id, or all.")
@format_option
def catalog_check(family, fmt):
    """Compare catalog entries with their tabulated profiles."""
    def go():
        t0 = time.perf_counter()
        checks = catalog_sections(family)
        ok = all(c["verdict"] == "match" for c in checks.values())
        _emit(None, checks, t0, fmt, ok)
    _run(go)


@catalog_group.command("export")
@click.argument("fid")
def catalog_export(fid):
    """Print an entry in the presentation format."""
    _run(lambda: click.echo(catalog.export_family(fid), nl=False))


@catalog_group.command("list")
def catalog_list():
    """Print the ids of all entries."""
    for fid in catalog.ALL_IDS:
        click.echo(fid)


if __name__ == "__main__":
    main()
