"""Command-line interface and run orchestration with content-addressed caching.

Subcommands: theta, isom, genus, extremal-form, classify, table,
check-maximal, design.  All outputs are JSON / CSV / Markdown with exact
rational entries rendered as "p/q" strings; cache artifacts are written with
sorted keys so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from maxlat.genus import (
    GenusRecord,
    StopRule,
    construct_seed,
    enumerate_genus,
    is_maximal,
    is_maximal_at,
    theorem31_check,
)
from maxlat.intmat import factorize
from maxlat.modforms import dim_star, extremal_form, theta_basis
from maxlat.qforms import Lattice, adjoint
from maxlat.qseries import QSeries
from maxlat.shells import minimum, theta_series


# ---------------------------------------------------------------------------
# serialization helpers (exact, byte-stable)
# ---------------------------------------------------------------------------


def _fr(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def _parse_fr(s: "str | None") -> "Fraction | None":
    if s is None:
        return None
    return Fraction(s)


def qseries_to_obj(s: QSeries) -> dict:
    return {
        "denom": s.denom,
        "prec": s.prec,
        "coeffs": {str(n): _fr(a) for n, a in sorted(s.coeffs.items()) if a},
    }


def _dump(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _load_lattice(path: str) -> Lattice:
    text = Path(path).read_text()
    obj = json.loads(text)
    if isinstance(obj, list):
        return Lattice(obj)
    return Lattice.from_json(text)


def _content_key(*parts) -> str:
    return hashlib.sha256(repr(parts).encode()).hexdigest()[:16]


def _parse_stop(spec: "str | None") -> "StopRule | None":
    if spec is None or spec == "closure":
        return None
    kind, _, val = spec.partition("=")
    if kind == "rank":
        return StopRule.rank(int(val))
    if kind == "classes":
        return StopRule.class_budget(int(val))
    raise SystemExit(f"unknown stop rule: {spec!r} (use closure, rank=R or classes=K)")


# ---------------------------------------------------------------------------
# genus cache: one JSON per class plus a manifest keyed by content hash
# ---------------------------------------------------------------------------


def _stop_tag(stop: "StopRule | None") -> str:
    if stop is None:
        return "closure"
    return f"{stop.kind}={stop.target}" if stop.target else stop.kind


def cached_genus(
    seed: Lattice,
    q: "int | None" = None,
    stop: "StopRule | None" = None,
    cache_dir: "str | Path | None" = None,
    progress: "callable | None" = None,
) -> GenusRecord:
    """enumerate_genus with an on-disk cache keyed by (seed Gram, q, stop)."""
    if cache_dir is None:
        return enumerate_genus(seed, q=q, stop=stop, progress=progress)
    cache = Path(cache_dir)
    key = _content_key(seed.gram, q, _stop_tag(stop))
    manifest_path = cache / f"genus-{key}.json"
    if manifest_path.exists():
        man = json.loads(manifest_path.read_text())
        classes = []
        for fname in man["class_files"]:
            obj = json.loads((cache / fname).read_text())
            classes.append((Lattice(obj["gram"]), obj["aut"]))
        return GenusRecord(
            seed=seed,
            neighbor_prime=man["q"],
            classes=classes,
            mass_sum=Fraction(man["mass"]),
            complete=man["complete"],
            method=man["method"],
            target_mass=_parse_fr(man.get("target_mass")),
        )
    rec = enumerate_genus(seed, q=q, stop=stop, progress=progress)
    class_files = []
    for i, (L, aut) in enumerate(rec.classes):
        fname = f"genus-{key}-class{i:03d}.json"
        _dump({"gram": L.gram_rows(), "aut": aut}, cache / fname)
        class_files.append(fname)
    _dump(
        {
            "seed_hash": _content_key(seed.gram),
            "seed": seed.gram_rows(),
            "level": seed.level,
            "dim": seed.dim,
            "q": rec.neighbor_prime,
            "stop": _stop_tag(stop),
            "complete": rec.complete,
            "method": rec.method,
            "mass": _fr(rec.mass_sum),
            "target_mass": None if rec.target_mass is None else _fr(rec.target_mass),
            "class_number": rec.class_number,
            "class_files": class_files,
        },
        manifest_path,
    )
    return rec


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_theta(args) -> int:
    L = _load_lattice(args.lattice)
    target = adjoint(L, L.level) if args.adjoint else L
    s = theta_series(target, args.prec)
    print(json.dumps(qseries_to_obj(s), sort_keys=True, indent=2))
    return 0


def _cmd_isom(args) -> int:
    from maxlat.isometry import are_isometric

    A = _load_lattice(args.a)
    B = _load_lattice(args.b)
    U = are_isometric(A, B)
    if U is None:
        print("distinct")
        return 1
    print(json.dumps({"witness": [[int(x) for x in row] for row in U]}, sort_keys=True))
    return 0


def _resolve_seed(args) -> Lattice:
    if getattr(args, "lattice", None):
        return _load_lattice(args.lattice)
    return construct_seed(args.level, args.dim)


def _cmd_genus(args) -> int:
    seed = _resolve_seed(args)
    stop = _parse_stop(args.stop)
    rec = cached_genus(seed, q=args.q, stop=stop, cache_dir=args.cache)
    out = {
        "level": seed.level,
        "dim": seed.dim,
        "q": rec.neighbor_prime,
        "class_number": rec.class_number,
        "mass": _fr(rec.mass_sum),
        "target_mass": None if rec.target_mass is None else _fr(rec.target_mass),
        "complete": rec.complete,
        "mass_certified": rec.mass_certified,
        "method": rec.method,
        "aut_orders": [a for _L, a in rec.classes],
    }
    if args.json:
        print(json.dumps(out, sort_keys=True, indent=2))
    else:
        print(
            f"level {out['level']} dim {out['dim']}: h = {out['class_number']} "
            f"(mass {out['mass']}, {'complete' if out['complete'] else 'partial'}, "
            f"method {out['method']}, certified {out['mass_certified']})"
        )
    return 0


def _cmd_extremal_form(args) -> int:
    N, k = args.level, args.weight
    m = 2 * k
    d = dim_star(N, k).dim_full
    prec = args.prec or (2 * d + 4)
    if args.source == "genus":
        from maxlat.classify import star_basis

        if N in (2, 3):
            basis = star_basis(N, k, None, prec)
        else:
            stop = _parse_stop(args.stop) or StopRule.rank(d)
            rec = cached_genus(construct_seed(N, m), q=args.q, stop=stop, cache_dir=args.cache)
            basis, _rank = theta_basis(rec.lattices(), N, k, prec)
    else:
        from maxlat.modforms import newform_star_basis

        basis = newform_star_basis(N, k, prec, data_dir=args.data_dir)
    ext = extremal_form(N, k, basis)
    print(json.dumps(qseries_to_obj(ext), sort_keys=True, indent=2))
    return 0


def _row_cells(row) -> list[str]:
    h = str(row.class_number) if row.complete else "."
    return [
        str(row.N),
        str(row.m),
        h,
        str(row.h_ext),
        str(row.min_adjoint) + ("*" if row.flagged else ""),
        "yes" if row.mass_certified else "no",
    ]


def _cmd_table(args) -> int:
    from maxlat.classify import table_row

    stop = _parse_stop(args.stop)
    rec = None
    if args.cache:
        rec = cached_genus(construct_seed(args.level, args.dim), q=args.q, stop=stop,
                           cache_dir=args.cache)
    row = table_row(args.level, args.dim, record=rec, q=args.q, stop=stop)
    cells = _row_cells(row)
    if args.format == "csv":
        print("N,m,h,h_ext,min,mass_certified")
        print(",".join(cells))
    else:
        print("| N | m | h | h_ext | min | mass certified |")
        print("|---|---|---|-------|-----|----------------|")
        print("| " + " | ".join(cells) + " |")
    if row.flagged:
        print(
            f"note: no class attains the extremal form; min column is the "
            f"hypothetical extremal minimum {row.min_adjoint}",
            file=sys.stderr,
        )
    return 0


def _cmd_classify(args) -> int:
    from maxlat.classify import design_strength, is_dual_extremal, table_row

    if args.genus_dir:
        cache = Path(args.genus_dir)
        manifests = sorted(cache.glob("genus-*.json"))
        manifests = [p for p in manifests if "class" not in p.stem.split("-")[-1]]
        if not manifests:
            raise SystemExit(f"no genus manifests under {cache}")
        man = json.loads(manifests[0].read_text())
        seed = Lattice(man["seed"])
        rec = cached_genus(seed, q=man["q"], stop=_parse_stop(man["stop"]), cache_dir=cache)
        N, m = seed.level, seed.dim
        row = table_row(N, m, record=rec)
    else:
        N, m = args.level, args.dim
        row = table_row(N, m, q=args.q, stop=_parse_stop(args.stop))
        rec = row.record
    certs = []
    for i, (L, aut) in enumerate(rec.classes):
        adj = adjoint(L, N)
        th = theta_series(adj, row.dim_space + 2)
        certs.append(
            {
                "index": i,
                "aut_order": aut,
                "theta_prefix": [
                    _fr(th.coeff_at_q(n)) for n in range(row.dim_space + 2)
                ],
                "dual_extremal": is_dual_extremal(L, row.extremal),
                "min_adjoint": minimum(adj),
                "design_strength_min_shell": design_strength(L) if m <= 12 else None,
            }
        )
    out = {
        "level": N,
        "dim": m,
        "triple": {"h": row.class_number, "h_ext": row.h_ext, "min": row.min_adjoint},
        "flagged": row.flagged,
        "complete": row.complete,
        "mass_certified": row.mass_certified,
        "extremal_form": qseries_to_obj(row.extremal),
        "classes": certs,
    }
    print(json.dumps(out, sort_keys=True, indent=2))
    return 0


def _cmd_check_maximal(args) -> int:
    L = _load_lattice(args.lattice)
    level = L.level
    primes = sorted(factorize(level))
    overall = is_maximal(L)
    print(f"det {L.det}  level {level}  maximal {overall}")
    for p in primes:
        line = f"  p={p}: maximal_at {is_maximal_at(L, p)}"
        if args.crosscheck:
            line += f"  theta_criterion {theorem31_check(L, p, args.prec)}"
        print(line)
    return 0 if overall else 1


def _cmd_design(args) -> int:
    from maxlat.classify import design_strength

    L = _load_lattice(args.lattice)
    t = design_strength(L, norm=args.norm, max_strength=args.max_strength)
    print(f"strength {t}")
    return 0


def _add_level_dim(p, *, lattice_opt=True):
    p.add_argument("--level", "-N", type=int)
    p.add_argument("--dim", "-m", type=int)
    if lattice_opt:
        p.add_argument("--lattice", help="JSON Gram file (overrides --level/--dim seed)")
    p.add_argument("--q", type=int, default=None, help="neighbor prime")
    p.add_argument("--stop", default=None, help="closure | rank=R | classes=K")
    p.add_argument("--cache", default=None, help="genus cache directory")


def main(argv: "list[str] | None" = None) -> int:
    ap = argparse.ArgumentParser(prog="maxlat", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theta", help="theta series of a lattice (or its rescaled dual)")
    p.add_argument("--lattice", required=True)
    p.add_argument("--prec", type=int, default=20)
    p.add_argument("--adjoint", action="store_true")
    p.set_defaults(fn=_cmd_theta)

    p = sub.add_parser("isom", help="isometry test: prints a witness matrix or 'distinct'")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(fn=_cmd_isom)

    p = sub.add_parser("genus", help="enumerate the genus of a maximal even lattice")
    _add_level_dim(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_genus)

    p = sub.add_parser("extremal-form", help="extremal form of the trace-killed space")
    p.add_argument("--level", "-N", type=int, required=True)
    p.add_argument("--weight", "-k", type=int, required=True)
    p.add_argument("--source", choices=("genus", "newforms"), default="genus")
    p.add_argument("--prec", type=int, default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--stop", default=None)
    p.add_argument("--cache", default=None)
    p.add_argument("--data-dir", default=None, help="newform data directory override")
    p.set_defaults(fn=_cmd_extremal_form)

    p = sub.add_parser("table", help="one classification table row")
    _add_level_dim(p, lattice_opt=False)
    p.add_argument("--format", choices=("md", "csv"), default="md")
    p.set_defaults(fn=_cmd_table)

    p = sub.add_parser("classify", help="per-class certificates for a genus")
    _add_level_dim(p, lattice_opt=False)
    p.add_argument("--genus-dir", default=None, help="classify a cached genus directory")
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("check-maximal", help="maximality of an even lattice, per prime")
    p.add_argument("--lattice", required=True)
    p.add_argument("--crosscheck", action="store_true", help="also run the theta criterion")
    p.add_argument("--prec", type=int, default=10)
    p.set_defaults(fn=_cmd_check_maximal)

    p = sub.add_parser("design", help="spherical design strength of a shell")
    p.add_argument("--lattice", required=True)
    p.add_argument("--norm", type=int, default=None)
    p.add_argument("--max-strength", type=int, default=13)
    p.set_defaults(fn=_cmd_design)

    args = ap.parse_args(argv)
    return args.fn(args)


# ---------------------------------------------------------------------------
# pipeline orchestration
# ---------------------------------------------------------------------------


def run_pipeline(config: dict) -> dict:
    """Run genus → extremal form → certificates → table row for one (N, m).

    config keys: level, dim, out_dir; optional q, stop ("closure"|"rank=R"|
    "classes=K"), cache_dir (defaults inside out_dir).  Artifacts are keyed
    by content hash; reruns reuse the cache and rewrite identical bytes.
    """
    from maxlat.classify import design_strength, is_dual_extremal, table_row

    N, m = config["level"], config["dim"]
    out_dir = Path(config["out_dir"])
    cache_dir = Path(config.get("cache_dir") or out_dir / "cache")
    stop = _parse_stop(config.get("stop"))
    q = config.get("q")
    seed = construct_seed(N, m)
    rec = cached_genus(seed, q=q, stop=stop, cache_dir=cache_dir)
    row = table_row(N, m, record=rec)
    key = _content_key(seed.gram, q, _stop_tag(stop))

    ext_path = out_dir / f"extremal-{N}-{m}-{key}.json"
    _dump(qseries_to_obj(row.extremal), ext_path)

    certs = []
    for i, (L, aut) in enumerate(rec.classes):
        certs.append(
            {
                "index": i,
                "aut_order": aut,
                "dual_extremal": is_dual_extremal(L, row.extremal),
                "design_strength_min_shell": design_strength(L) if m <= 12 else None,
            }
        )
    cert_path = out_dir / f"certificates-{N}-{m}-{key}.json"
    _dump(
        {
            "level": N,
            "dim": m,
            "triple": {"h": row.class_number, "h_ext": row.h_ext, "min": row.min_adjoint},
            "flagged": row.flagged,
            "complete": row.complete,
            "mass_certified": row.mass_certified,
            "classes": certs,
        },
        cert_path,
    )

    table_path = out_dir / f"table-{N}-{m}-{key}.md"
    cells = _row_cells(row)
    table_path.parent.mkdir(parents=True, exist_ok=True)
    table_path.write_text(
        "| N | m | h | h_ext | min | mass certified |\n"
        "|---|---|---|-------|-----|----------------|\n"
        "| " + " | ".join(cells) + " |\n"
    )
    return {
        "extremal_form": str(ext_path),
        "certificates": str(cert_path),
        "table": str(table_path),
        "cache_manifest": str(cache_dir / f"genus-{key}.json"),
    }


if __name__ == "__main__":
    raise SystemExit(main())
