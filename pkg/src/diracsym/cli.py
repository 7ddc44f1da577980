"""Command-line entry point.

Every subcommand prints a JSON run report on stdout and writes its tables
as CSV files into ``--out-dir``. Exit status: 0 when the command ran (the
report says which assertions passed), 1 for usage or configuration
errors, 2 for numerical failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import config, generators, io, radial, slab
from .catalog import build_candidate, classify
from .errors import CertificateError, DomainError, NumericalFailure, UsageError

log = logging.getLogger("diracsym")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

CSV_HELP = {
    "algebra-verify": "algebra.csv: name, passed, certificate",
    "verify-generators": ("generators.csv: index, px, py, pz, su2_residual, commutator_residual,"
                          " hermiticity_residual, control_su2_residual,"
                          " control_commutator_residual"),
    "solve1d": ("spectrum.csv: index, E, p_plus_weight, block_label, node_count\n"
                "doublets.csv: E_a, E_b, splitting"),
    "scan-breaking": "scan.csv: epsilon, max_splitting",
    "oracle-compare": ("oracle-compare.csv: index, E_oracle, oracle_multiplicity, E_solver,"
                       " solver_multiplicity, relative_deviation"),
    "solve-radial": ("radial-spectrum.csv: kappa, n, E, l, l_tilde\n"
                     "radial-doublets.csv: n, kappa_a, kappa_b, E_a, E_b, splitting,"
                     " relative_splitting"),
}

COLUMN_NOTES = """\
columns:
  E                   energy eigenvalue
  p_plus_weight       |P+ psi|^2 of the normalised state, P+ = (I + O)/2
  block_label         +1/-1 sector of the conserved local generator
  node_count          sign changes of the decoupled component (P+ psi for
                      spin scenarios, P- psi for pseudospin)
  E_a, E_b, splitting paired levels from opposite sectors and |E_a - E_b|
  epsilon             breaking strength, max_splitting the largest doublet
                      splitting at that strength
  kappa, n, l, l_tilde
                      radial channel, node count (of G, or of F under
                      pseudospin symmetry), orbital and pseudo-orbital l
  *_residual          max-abs residuals per sampled momentum; control_*
                      are the deliberately broken checks
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class Report:
    def __init__(self, command: str, cfg, seed: int, scale: float):
        self.doc = {"command": command, "config_digest": io.digest(cfg), "seed": seed,
                    "tolerance_scale": scale, "assertions": {}, "residuals": {},
                    "files": [], "result": {}}
        self.scale = scale

    def below(self, name, value, threshold):
        limit = threshold * self.scale
        ok = bool(np.isfinite(value) and value < limit)
        self.doc["assertions"][name] = {"passed": ok, "value": float(value),
                                        "threshold": limit, "relation": "<"}
        return ok

    def at_least(self, name, value, threshold):
        ok = bool(np.isfinite(value) and value >= threshold)
        self.doc["assertions"][name] = {"passed": ok, "value": float(value),
                                        "threshold": threshold, "relation": ">="}
        return ok

    def holds(self, name, ok, value=None):
        self.doc["assertions"][name] = {"passed": bool(ok), "value": value, "relation": "is"}
        return bool(ok)

    def residual(self, name, value):
        self.doc["residuals"][name] = None if value is None else float(value)

    def file(self, entry):
        self.doc["files"].append(entry)

    def finish(self):
        self.doc["passed"] = all(a["passed"] for a in self.doc["assertions"].values())
        return self.doc


# --------------------------------------------------------------------------
# commands


def cmd_algebra_verify(args, out: Path) -> dict:
    rep = Report("algebra-verify", {}, args.seed, args.tolerance_scale)
    checks = generators.identity_suite()
    for c in checks:
        rep.holds(c["name"], c["passed"], c["certificate"])
    rep.file(io.write_csv(out / "algebra.csv", ["name", "passed", "certificate"],
                          [(c["name"], c["passed"], c["certificate"]) for c in checks]))
    rep.doc["result"] = {"checks": len(checks)}
    return rep.finish()


def cmd_classify(args, out: Path) -> dict:
    cand = build_candidate(args.kind, args.axis)
    report = classify(cand).to_json()
    rep = Report("classify", {"kind": args.kind, "axis": args.axis}, args.seed,
                 args.tolerance_scale)
    rep.holds("certified", True)
    rep.doc["result"] = report
    return rep.finish()


def cmd_verify_generators(args, out: Path) -> dict:
    cfg = {"kind": args.kind, "variant": args.variant, "samples": args.samples,
           "axis": args.axis}
    rep = Report("verify-generators", cfg, args.seed, args.tolerance_scale)
    res = generators.verify_generators(args.kind, args.variant, args.samples, args.seed,
                                       args.axis)
    su2 = res["max_su2_residual"]
    if su2 is not None:
        rep.below("su2_residual", su2, 1e-12)
        rep.at_least("control_su2_residual", res["min_control_su2_residual"], 0.1)
        rep.at_least("control_commutator_residual", res["min_control_commutator_residual"], 0.1)
    rep.below("commutator_residual", res["max_commutator_residual"], 1e-12)
    rep.below("hermiticity_residual", res["max_hermiticity_residual"], 1e-13)
    for key in ("max_su2_residual", "max_commutator_residual", "max_hermiticity_residual",
                "min_control_su2_residual", "min_control_commutator_residual"):
        rep.residual(key, res[key])
    rows = [(i, r["px"], r["py"], r["pz"], r["su2_residual"], r["commutator_residual"],
             r["hermiticity_residual"], r["control_su2_residual"],
             r["control_commutator_residual"]) for i, r in enumerate(res["rows"])]
    header = CSV_HELP["verify-generators"].split(": ", 1)[1].split(", ")
    rep.file(io.write_csv(out / "generators.csv", header, rows))
    rep.doc["result"] = {k: res[k] for k in ("kind", "axis", "variant", "group", "samples",
                                             "max_su2_residual", "max_commutator_residual")}
    return rep.finish()


def _pair_tol(cfg):
    return float(cfg.get("pairing_tolerance", slab.PAIR_REL_TOL))


def cmd_solve1d(args, out: Path) -> dict:
    cfg = config.load(args.config, config.SOLVE1D_SCHEMA)
    rep = Report("solve1d", cfg, args.seed, args.tolerance_scale)
    grid, coupling, profile, k, window, _ = config.build_slab(cfg)
    asm = slab.assemble(grid, profile, coupling, k)
    spec = slab.eigensolve(asm, window)
    d = spec.doublets
    rep.below("hermiticity_residual", asm.hermiticity_residual, 1e-12)
    rep.holds("sectors_balanced", d.balanced, len(d.unmatched))
    if profile.scenario.symmetric and spec.levels:
        rep.below("doublet_splitting_over_span", d.max_splitting / max(spec.span, 1e-300), 1e-9)
    rep.residual("max_splitting", d.max_splitting)
    rep.residual("span", spec.span)
    rep.file(io.write_csv(out / "spectrum.csv",
                          ["index", "E", "p_plus_weight", "block_label", "node_count"],
                          [(i, lv.E, lv.p_plus_weight, lv.block_label, lv.node_count)
                           for i, lv in enumerate(spec.levels)]))
    rep.file(io.write_csv(out / "doublets.csv", ["E_a", "E_b", "splitting"],
                          [(p.E_a, p.E_b, p.splitting) for p in d.pairs]))
    rep.doc["result"] = {"levels": len(spec.levels), "doublets": len(d.pairs),
                         "generator_leakage": asm.leakage,
                         "sector_blocks_real": [s.real for s in asm.sectors]}
    return rep.finish()


def cmd_scan_breaking(args, out: Path) -> dict:
    cfg = config.load(args.config, config.SCAN_SCHEMA)
    rep = Report("scan-breaking", cfg, args.seed, args.tolerance_scale)
    grid, coupling, profile, k, window, (shape, dshape) = config.build_slab(cfg)
    if not profile.scenario.symmetric:
        raise UsageError("scan-breaking needs a spin or pseudospin base scenario")
    strengths = [float(x) for x in cfg["strengths"]]
    scan = slab.breaking_scan(profile, shape, strengths, grid, coupling, k, window,
                              dshape=dshape, workers=args.workers)
    order = np.argsort(scan.strengths, kind="stable")
    eps = [scan.strengths[i] for i in order]
    split = [scan.max_splitting[i] for i in order]
    spans = [scan.spans[i] for i in order]
    i0 = eps.index(0.0)
    rep.below("zero_strength_splitting_over_span", split[i0] / max(spans[i0], 1e-300), 1e-9)
    nonzero = [(e, s) for e, s in zip(eps, split) if e > 0]
    rep.holds("strictly_increasing", all(b > a for a, b in zip(split[i0:], split[i0 + 1:])),
              split)
    if len(nonzero) >= 2:
        (e1, s1), (e2, s2) = nonzero[:2]
        ratio = s2 / s1 if s1 > 0 else float("nan")
        scaled = ratio / (e2 / e1) if s1 > 0 else float("nan")
        ok = bool(np.isfinite(scaled) and 0.75 <= scaled <= 1.25)
        rep.doc["assertions"]["first_order_ratio"] = {
            "passed": ok, "value": ratio, "threshold": [0.75 * e2 / e1, 1.25 * e2 / e1],
            "relation": "in"}
    rep.residual("slope", scan.slope)
    rep.file(io.write_csv(out / "scan.csv", ["epsilon", "max_splitting"], zip(eps, split)))
    rep.doc["result"] = {"strengths": eps, "max_splitting": split, "slope": scan.slope}
    return rep.finish()


def cmd_oracle_compare(args, out: Path) -> dict:
    cfg = config.load(args.config, config.ORACLE_SCHEMA)
    rep = Report("oracle-compare", cfg, args.seed, args.tolerance_scale)
    grid, coupling, profile, k, window, _ = config.build_slab(cfg)
    if not profile.scenario.symmetric:
        raise UsageError("oracle undefined off-condition")
    tol = _pair_tol(cfg)
    ocfg = cfg.get("oracle", {})
    roots = slab.schrodinger_oracle(profile, coupling, grid, k, cfg.get("level_count", 10),
                                    window, samples=ocfg.get("samples", 400),
                                    kinetic=ocfg.get("kinetic", "fd8"),
                                    extra_levels=ocfg.get("extra_levels", 6))
    spec = slab.eigensolve(slab.assemble(grid, profile, coupling, k), window, vectors=False)
    C = profile.scenario.constant
    scale = max(abs(window[0]), abs(window[1]))
    # E = C solves the decoupled equation trivially (free complementary component)
    trivial = lambda E: abs(E - C) <= 1e-9 * scale  # noqa: E731
    oc = [c for c in slab.cluster_levels(roots, tol) if not trivial(c[0])]
    top = max(c[0] for c in oc) if oc else window[0]
    sc = [c for c in slab.cluster_levels(spec.energies, tol)
          if not trivial(c[0]) and c[0] <= top * (1 + tol) + tol]
    rows, used, devs, mult_ok = [], set(), [], True
    factor = 2 * grid.lattice_doubling
    for i, (Eo, mo) in enumerate(oc):
        if not sc:
            raise NumericalFailure("no solver levels in window to compare")
        j = int(np.argmin([abs(Es - Eo) for Es, _ in sc]))
        Es, ms = sc[j]
        used.add(j)
        dev = abs(Es - Eo) / abs(Eo)
        devs.append(dev)
        mult_ok &= ms == factor * mo
        rows.append((i, Eo, mo, Es, ms, dev))
    tolerance = float(cfg.get("tolerance", 1e-6))
    rep.below("max_relative_deviation", max(devs) if devs else float("nan"), tolerance)
    rep.holds("multiplicity_doubled", mult_ok, f"expected {factor} x oracle multiplicity")
    rep.holds("no_unmatched_solver_levels", len(used) == len(sc), len(sc) - len(used))
    rep.residual("max_relative_deviation", max(devs) if devs else None)
    header = CSV_HELP["oracle-compare"].split(": ", 1)[1].split(", ")
    rep.file(io.write_csv(out / "oracle-compare.csv", header, rows))
    rep.doc["result"] = {"oracle_levels": [c[0] for c in oc], "solver_levels": [c[0] for c in sc]}
    return rep.finish()


def _radial_oracle_symmetry(cfg):
    """Symmetry whose oscillator formula applies to this config, or None."""
    sym = cfg["symmetry"]
    sig, dlt = cfg["sigma"], cfg["delta"]

    def is_zero(p):
        return p["form"] == "zero" or (p["form"] == "constant"
                                       and p.get("params", {}).get("value", 0.0) == 0.0)

    if sym == "spin" and is_zero(dlt) and sig["form"] == "quadratic":
        return "spin", sig.get("params", {}).get("a", 1.0)
    if sym == "pseudospin" and is_zero(sig) and dlt["form"] == "quadratic":
        return "pseudospin", dlt.get("params", {}).get("a", 1.0)
    return None


def cmd_solve_radial(args, out: Path) -> dict:
    cfg = config.load(args.config, config.RADIAL_SCHEMA)
    rep = Report("solve-radial", cfg, args.seed, args.tolerance_scale)
    pots, grid, window = config.build_radial(cfg)
    kappas = list(dict.fromkeys(int(k) for k in cfg["kappas"]))
    states = {k: radial.solve_channel(pots, k, window, grid, samples=cfg.get("samples", 400))
              for k in kappas}
    mode = cfg["symmetry"] if cfg["symmetry"] != "none" else cfg.get("doublet_mode", "spin")
    pairs, missing = radial.doublet_report(states, mode)
    all_states = [s for k in sorted(states) for s in states[k]]
    if all_states:
        res1 = max(radial.first_order_residual(s, pots, grid) for s in all_states)
        rep.below("first_order_residual", res1, 1e-7)
        rep.residual("first_order_residual", res1)
    if cfg["symmetry"] != "none":
        if pairs:
            rep.below("max_relative_splitting", max(p.relative for p in pairs), 1e-8)
    elif pairs:
        thr = float(cfg.get("control_threshold", 1e-3 * config.well_depth(pots, grid)))
        rep.at_least("min_partner_splitting", min(p.splitting for p in pairs), thr)
    orc = _radial_oracle_symmetry(cfg)
    if orc and all_states:
        sym, a = orc
        dev = max(abs(s.E - radial.oscillator_oracle(a, pots.m, s.n, s.kappa, sym))
                  / abs(s.E) for s in all_states)
        rep.below("oracle_relative_deviation", dev, 1e-8)
        rep.residual("oracle_relative_deviation", dev)
    rep.holds("partners_found", not missing, [list(m) for m in missing])
    rep.file(io.write_csv(out / "radial-spectrum.csv", ["kappa", "n", "E", "l", "l_tilde"],
                          [(s.kappa, s.n, s.E, s.channel.l, s.channel.l_tilde)
                           for s in all_states]))
    rep.file(io.write_csv(out / "radial-doublets.csv",
                          ["n", "kappa_a", "kappa_b", "E_a", "E_b", "splitting",
                           "relative_splitting"],
                          [(p.n, p.kappa_a, p.kappa_b, p.E_a, p.E_b, p.splitting, p.relative)
                           for p in pairs]))
    rep.doc["result"] = {"states": len(all_states), "pairs": len(pairs)}
    return rep.finish()


COMMANDS = {
    "algebra-verify": cmd_algebra_verify,
    "classify": cmd_classify,
    "verify-generators": cmd_verify_generators,
    "solve1d": cmd_solve1d,
    "scan-breaking": cmd_scan_breaking,
    "oracle-compare": cmd_oracle_compare,
    "solve-radial": cmd_solve_radial,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="RNG seed (default 7)")
    common.add_argument("--out-dir", default=argparse.SUPPRESS,
                        help="directory for CSV outputs (default: current directory)")
    common.add_argument("--tolerance-scale", type=float, default=argparse.SUPPRESS,
                        help="multiply every upper-bound tolerance by this factor")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    p = _Parser(prog="diracsym", parents=[common],
                description="Spin and pseudospin symmetry checks for Dirac Hamiltonians.",
                epilog=COLUMN_NOTES, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_,
                              epilog=CSV_HELP.get(name, "") + "\n\n" + COLUMN_NOTES,
                              formatter_class=argparse.RawDescriptionHelpFormatter)

    add("algebra-verify", "exact Clifford and projector identities")
    c = add("classify", "symmetry classification of a coupling")
    c.add_argument("--kind", required=True)
    c.add_argument("--axis", default=None, help="x, y, z or 'a,b,c'")
    g = add("verify-generators", "SU(2) and commutator checks at random momenta")
    g.add_argument("--kind", required=True)
    g.add_argument("--variant", default="minus", choices=["minus", "plus"])
    g.add_argument("--samples", type=int, default=100)
    g.add_argument("--axis", default=None)
    for name, help_ in (("solve1d", "four-spinor slab spectrum"),
                        ("scan-breaking", "doublet splitting versus breaking strength"),
                        ("oracle-compare", "slab spectrum versus the decoupled oracle"),
                        ("solve-radial", "radial bound states and partner splittings")):
        s = add(name, help_)
        s.add_argument("--config", required=True, help="JSON scenario file")
        if name == "scan-breaking":
            s.add_argument("--workers", type=int, default=1,
                           help="threads for independent strengths (results keep input order)")
    return p


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    command = next((a for a in argv if a in COMMANDS), None)
    try:
        args = build_parser().parse_args(argv)
        args.seed = getattr(args, "seed", generators.DEFAULT_SEED)
        args.tolerance_scale = getattr(args, "tolerance_scale", 1.0)
        if not args.tolerance_scale > 0:
            raise UsageError("--tolerance-scale must be positive")
        if getattr(args, "verbose", False):
            logging.basicConfig(level=logging.INFO, stream=sys.stderr)
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be >= 1")
        out = Path(getattr(args, "out_dir", "."))
        t0 = time.perf_counter()
        doc = COMMANDS[args.command](args, out)
        log.info("%s finished in %.2f s", args.command, time.perf_counter() - t0)
    except (UsageError, CertificateError, DomainError) as exc:
        return _fail(command, exc, EXIT_USAGE)
    except NumericalFailure as exc:
        return _fail(command, exc, EXIT_NUMERIC, exc.diagnostics)
    except np.linalg.LinAlgError as exc:
        return _fail(command, exc, EXIT_NUMERIC)
    print(io.to_json(doc))
    return EXIT_OK


def _fail(command, exc, code, diagnostics=None) -> int:
    doc = {"command": command, "status": "error", "error": str(exc), "exit_code": code}
    cond = getattr(exc, "condition", None)
    if cond:
        doc["condition"] = cond
    if diagnostics:
        doc["diagnostics"] = diagnostics
    print(io.to_json(doc))
    print(f"error: {exc}", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
