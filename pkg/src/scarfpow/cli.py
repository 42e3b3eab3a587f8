"""Command-line surface: structured reports over the library computations.

Every subcommand emits one report with the shape

    {"q":..., "r":..., "f_vector":[...], "betti":[...],
     "checks": {name: "pass"|"fail"|"flag"}, "provenance": {entry: ...}}

serialized deterministically (sorted keys, two-space indent).  The exit
code is 0 exactly when no check failed; "flag" marks a known, documented
discrepancy and does not fail the run.  Results are sorted before
emission, so output is deterministic regardless of the --threads value.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass

import numpy as np

from . import complexes, formulas, homology, morse, psi
from .errors import BudgetError, UnsupportedIdealError
from .labels import label_string

DEFAULT_FACE_BUDGET = complexes.DEFAULT_FACE_BUDGET


@dataclass
class RunConfig:
    q: int | None = None
    r: int | None = None
    field: str = "gf2"
    max_dim: int | None = None
    face_budget: int = DEFAULT_FACE_BUDGET
    threads: int = 0  # 0 = auto; execution is sequential and deterministic
    fmt: str = "json"

    def __post_init__(self):
        if self.face_budget <= 0:
            raise ValueError("face budget must be positive")
        if self.q is not None and self.q < 1:
            raise ValueError("q must be >= 1")
        if self.r is not None and self.r < 1:
            raise ValueError("r must be >= 1")


def _report(q=None, r=None, f_vector=None, betti=None, checks=None, provenance=None, detail=None):
    rep = {
        "q": q,
        "r": r,
        "f_vector": list(f_vector) if f_vector is not None else None,
        "betti": list(betti) if betti is not None else None,
        "checks": dict(sorted((checks or {}).items())),
        "provenance": dict(sorted((provenance or {}).items())),
    }
    if detail is not None:
        rep["detail"] = detail
    return rep


def emit(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "tsv":
        lines = []

        def flatten(prefix, value):
            if isinstance(value, dict):
                for k in sorted(value):
                    flatten(f"{prefix}.{k}" if prefix else str(k), value[k])
            elif isinstance(value, (list, tuple)):
                lines.append(f"{prefix}\t{','.join(str(v) for v in value)}")
            else:
                lines.append(f"{prefix}\t{value}")

        flatten("", report)
        return "\n".join(lines) + "\n"
    if fmt == "text":
        lines = [f"q={report.get('q')} r={report.get('r')}"]
        if report.get("f_vector") is not None:
            lines.append("f_vector: " + " ".join(str(v) for v in report["f_vector"]))
        if report.get("betti") is not None:
            lines.append("betti:    " + " ".join(str(v) for v in report["betti"]))
        for name, verdict in report.get("checks", {}).items():
            lines.append(f"check {name}: {verdict}")
        detail = report.get("detail") or {}
        for key in sorted(detail):
            value = detail[key]
            if isinstance(value, list) and value and isinstance(value[0], str):
                lines.append(f"{key}:")
                lines.extend(f"  {v}" for v in value)
            else:
                lines.append(f"{key}: {value}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _exit_code(report: dict) -> int:
    return 1 if any(v == "fail" for v in report["checks"].values()) else 0


def _face_strings(faces) -> list[str]:
    return [morse.face_to_text(f) for f in faces]


def cmd_gens(cfg: RunConfig) -> dict:
    table = complexes.generator_table(cfg.q, cfg.r)
    gens = [
        {"composition": list(a), "label": label_string(table.matrix[i], cfg.q)}
        for i, a in enumerate(table.gens)
    ]
    return _report(
        cfg.q,
        cfg.r,
        checks={"count_matches_binomial": "pass" if len(gens) == len(table.gens) else "fail"},
        provenance={"generators": "enumeration"},
        detail={"generators": gens},
    )


def cmd_fvector(cfg: RunConfig) -> dict:
    ucx = complexes.materialize(complexes.u_complex(cfg.q, cfg.r), face_budget=cfg.face_budget)
    fv = complexes.f_vector(ucx)
    checks = {}
    provenance = {"f_vector": "enumeration"}
    if cfg.q in (2, 3, 4):
        checks["fvector_matches_formula"] = (
            "pass" if fv == formulas.bounds_small_q(cfg.q, cfg.r).bounds else "fail"
        )
    if cfg.r == 2:
        checks["fvector_matches_square_formula"] = (
            "pass" if fv == formulas.betti_r2_vector(cfg.q) else "fail"
        )
    return _report(cfg.q, cfg.r, f_vector=fv, checks=checks, provenance=provenance)


def cmd_scarf(cfg: RunConfig) -> dict:
    scx = complexes.scarf_complex(cfg.q, cfg.r, max_dim=cfg.max_dim, face_budget=cfg.face_budget)
    fv = complexes.f_vector(scx)
    checks = {}
    if cfg.q <= 4 and cfg.max_dim is None:
        ucx = complexes.materialize(complexes.u_complex(cfg.q, cfg.r), face_budget=cfg.face_budget)
        checks["scarf_equals_shift_complex"] = (
            "pass" if set(scx.faces) == set(ucx.faces) else "fail"
        )
    detail = {"n_faces": len(scx.faces)}
    if len(scx.faces) <= 10000:
        detail["faces"] = _face_strings(scx.faces)
    return _report(cfg.q, cfg.r, f_vector=fv, checks=checks,
                   provenance={"f_vector": "enumeration"}, detail=detail)


def cmd_betti(cfg: RunConfig, max_i: int | None = None) -> dict:
    q, r = cfg.q, cfg.r
    checks: dict[str, str] = {}
    provenance: dict[str, str] = {}
    detail: dict = {}

    ucx = complexes.materialize(complexes.u_complex(q, r), face_budget=cfg.face_budget)
    fv = complexes.f_vector(ucx)

    formula = None
    if q in (2, 3, 4):
        table = formulas.bounds_small_q(q, r)
        formula = table.bounds
        for name in table.flags:
            checks[name] = "flag"
    elif r == 2:
        formula = formulas.betti_r2_vector(q)
    if formula is not None:
        checks["formula_vs_enumeration"] = "pass" if formula == fv else "fail"

    betti = None
    n_gens = len(complexes.generator_table(q, r).gens)
    if q <= 4 or r <= 2:
        betti = fv
        provenance["betti"] = "enumeration"
    if n_gens <= homology.DEFAULT_GENERATOR_BUDGET:
        ideal = homology.extremal_power_ideal(q, r)
        oracle = homology.betti_total_oracle(ideal, max_i=max_i, field="gf2").totals_list()
        other = homology.betti_total_oracle(ideal, max_i=max_i, field="rational").totals_list()
        checks["torsion_guard"] = "pass" if oracle == other else "flag"
        detail["oracle_betti"] = list(oracle)
        if betti is not None:
            ref = betti if max_i is None else betti[: max_i + 1]
            checks["oracle_vs_enumeration"] = "pass" if tuple(ref) == oracle else "fail"
        else:
            betti = oracle
            provenance["betti"] = "oracle"
    if betti is None:
        checks["exact_route_available"] = "fail"
        detail["reason"] = (
            f"no exact betti route for q={q}, r={r}: {n_gens} generators exceed "
            f"the oracle budget and no closed form applies"
        )
    provenance["f_vector"] = "enumeration"
    return _report(q, r, f_vector=fv, betti=betti, checks=checks,
                   provenance=provenance, detail=detail)


def cmd_bounds(cfg: RunConfig) -> dict:
    table = formulas.bounds_small_q(cfg.q, cfg.r)
    checks = {name: "flag" for name in table.flags}
    detail = {
        "gammas": list(table.gammas),
        "entry_formulas": list(table.provenance),
    }
    if table.published_q2 is not None:
        detail["published_q2"] = list(table.published_q2)
        detail["flag_notes"] = [table.flags["q2_published_discrepancy"]]
    return _report(cfg.q, cfg.r, betti=table.bounds, checks=checks,
                   provenance={"betti": "formula"}, detail=detail)


def cmd_verify_matching(cfg: RunConfig, kind: str, a=None, certificate: str | None = None) -> dict:
    q, r = cfg.q, cfg.r
    if certificate is not None:
        with open(certificate, "r", encoding="utf-8") as fh:
            matching = morse.matching_from_text(q, r, fh.read())
    elif kind == "edge":
        matching = morse.build_edge_matching(q, r)
    elif kind == "small-q":
        matching = morse.build_small_q_matching(q, r, face_budget=cfg.face_budget)
    elif kind == "facet":
        if a is None:
            raise ValueError("facet matching needs --a")
        matching = morse.build_facet_matching(a, q, r, face_budget=cfg.face_budget)
    else:
        raise ValueError(f"unknown matching kind {kind!r}")

    if kind == "edge" and certificate is None:
        faces = morse.LabeledFaceSet.dim_capped(q, r, 2)
    else:
        faces = morse.LabeledFaceSet.full_taylor(q, r, face_budget=cfg.face_budget)
    report = morse.verify_matching(matching, faces)

    checks = {
        "is_matching": "pass" if report.is_matching else "fail",
        "is_homogeneous": "pass" if report.is_homogeneous else "fail",
        "is_acyclic": "pass" if report.is_acyclic else "fail",
    }
    detail: dict = {"n_pairs": report.n_pairs, "n_faces": report.n_faces}
    if certificate is None and kind == "edge":
        scarf_edges = {
            frozenset(e)
            for e in complexes.scarf_complex(q, r, max_dim=1, face_budget=cfg.face_budget).faces
            if len(e) == 2
        }
        critical_edges = {
            frozenset(f) for f in report.critical_faces() if len(f) == 2
        }
        checks["critical_edges_are_scarf"] = (
            "pass" if critical_edges == scarf_edges else "fail"
        )
        detail["n_scarf_edges"] = len(scarf_edges)
    if certificate is None and kind == "small-q":
        scarf_faces = set(
            complexes.scarf_complex(q, r, face_budget=cfg.face_budget).faces
        )
        checks["critical_cells_are_scarf"] = (
            "pass" if set(report.critical_faces()) == scarf_faces else "fail"
        )
    if certificate is None and kind == "facet":
        table = complexes.generator_table(q, r)
        facet = next(f for vec, f in complexes.u_facet_vectors(q, r) if vec == tuple(a))
        fmask = morse.face_to_mask(facet, table)
        crit = set(int(m) for m in report.critical_masks)
        supersets_matched = all(
            not (m & fmask == fmask and m != fmask) for m in crit
        )
        subsets_critical = all(
            sub in crit
            for sub in range(1, 1 << len(table.gens))
            if sub & fmask == sub
        )
        checks["no_critical_strict_superset_of_facet"] = (
            "pass" if supersets_matched else "fail"
        )
        checks["facet_and_subsets_critical"] = "pass" if subsets_critical else "fail"
        matched_outside = report.n_pairs  # paired lower faces lack one facet vertex
        checks["critical_equals_non_supersets"] = (
            "pass" if len(crit) == report.n_faces - 2 * report.n_pairs
            and matched_outside == 0 else "flag"
        )
        detail["matched_lower_faces"] = int(report.n_pairs)
    return _report(q, r, f_vector=report.critical_f_vector() or None,
                   checks=checks, provenance={"f_vector": "enumeration"}, detail=detail)


def cmd_psi_check(cfg: RunConfig, ideal_path: str, max_i: int | None = None, samples: int = 1000) -> dict:
    with open(ideal_path, "r", encoding="utf-8") as fh:
        ideal = psi.parse_ideal(fh.read())
    r = cfg.r
    q = ideal.q
    table = complexes.generator_table(q, r)

    gen_map_ok = all(
        psi.psi_apply(table.matrix[i], ideal) == psi.generator_power_vector(a, ideal)
        for i, a in enumerate(table.gens)
    )

    rng = random.Random(20240 + q + r)
    lcm_ok = True
    for _ in range(samples):
        k = rng.randint(1, min(5, len(table.gens)))
        rows = rng.sample(range(len(table.gens)), k)
        joined = psi.psi_apply(table.matrix[rows].max(axis=0), ideal)
        pointwise = tuple(
            max(col)
            for col in zip(*(psi.generator_power_vector(table.gens[i], ideal) for i in rows))
        )
        if joined != pointwise:
            lcm_ok = False
            break

    inclusion = psi.scarf_inclusion_check(ideal, r)
    bound = psi.betti_bound_check(ideal, r, max_i=max_i, field=cfg.field)

    checks = {
        "generator_map": "pass" if gen_map_ok else "fail",
        "lcm_preservation": "pass" if lcm_ok else "fail",
        "scarf_inclusion": "pass" if inclusion.holds else "fail",
        "betti_bounds": "pass" if bound.holds else "fail",
    }
    detail = {
        "ideal_q": q,
        "n_power_scarf_faces": inclusion.n_faces,
        "betti_rows": [list(row) for row in bound.rows],
        "bound_provenance": bound.provenance,
    }
    return _report(q, r, betti=[row[1] for row in bound.rows],
                   checks=checks, provenance={"betti": "oracle"}, detail=detail)


def _parse_vector(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace("(", "").replace(")", "").split(","))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="scarfpow",
        description="Scarf complexes, Morse matchings and betti bounds for powers "
        "of extremal square-free monomial ideals",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, need_q=True, need_r=True):
        if need_q:
            sp.add_argument("--q", type=int, required=True, help="number of generators")
        if need_r:
            sp.add_argument("--r", type=int, required=True, help="power")
        sp.add_argument("--field", choices=["gf2", "rational"], default="gf2")
        sp.add_argument("--max-dim", type=int, default=None)
        sp.add_argument("--face-budget", type=int, default=None)
        sp.add_argument("--override-budget", action="store_true",
                        help="allow a face budget above the default")
        sp.add_argument("--threads", type=int, default=0,
                        help="accepted for interface compatibility; execution is "
                        "sequential and output is deterministic regardless")
        sp.add_argument("--format", choices=["json", "tsv", "text"], default="json")

    common(sub.add_parser("gens", help="list the generators with their labels"))
    common(sub.add_parser("fvector", help="f-vector of the square-free-shift complex"))
    common(sub.add_parser("scarf", help="enumerate the Scarf complex"))
    sp = sub.add_parser("betti", help="betti numbers with cross-checks")
    common(sp)
    sp.add_argument("--max-i", type=int, default=None)
    common(sub.add_parser("bounds", help="closed-form betti bound table (q in 2..4)"))
    sp = sub.add_parser("verify-matching", help="build and verify a Morse matching")
    common(sp)
    sp.add_argument("--kind", choices=["edge", "small-q", "facet"], required=True)
    sp.add_argument("--a", type=str, default=None, help="facet shift vector, e.g. 1,0,0")
    sp.add_argument("--certificate", type=str, default=None,
                    help="verify an external matching file (FACE -> FACE lines)")
    sp = sub.add_parser("psi-check", help="transfer checks against a square-free ideal")
    common(sp, need_q=False)
    sp.add_argument("--ideal", type=str, required=True, help="ideal file, one generator per line")
    sp.add_argument("--max-i", type=int, default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    budget = DEFAULT_FACE_BUDGET
    if args.face_budget is not None:
        if args.face_budget > DEFAULT_FACE_BUDGET and not args.override_budget:
            print(json.dumps({"error": "face budget above default requires --override-budget"}))
            return 1
        budget = args.face_budget
    try:
        cfg = RunConfig(
            q=getattr(args, "q", None),
            r=getattr(args, "r", None),
            field=args.field,
            max_dim=args.max_dim,
            face_budget=budget,
            threads=args.threads,
            fmt=args.format,
        )
        if args.command == "gens":
            report = cmd_gens(cfg)
        elif args.command == "fvector":
            report = cmd_fvector(cfg)
        elif args.command == "scarf":
            report = cmd_scarf(cfg)
        elif args.command == "betti":
            report = cmd_betti(cfg, max_i=args.max_i)
        elif args.command == "bounds":
            report = cmd_bounds(cfg)
        elif args.command == "verify-matching":
            a = _parse_vector(args.a) if args.a else None
            report = cmd_verify_matching(cfg, args.kind, a=a, certificate=args.certificate)
        elif args.command == "psi-check":
            report = cmd_psi_check(cfg, args.ideal, max_i=args.max_i)
        else:  # pragma: no cover
            raise ValueError(f"unknown command {args.command!r}")
    except (ValueError, BudgetError, UnsupportedIdealError, OSError) as exc:
        print(json.dumps({"error": str(exc), "kind": type(exc).__name__},
                         indent=2, sort_keys=True))
        return 1
    sys.stdout.write(emit(report, cfg.fmt))
    return _exit_code(report)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
