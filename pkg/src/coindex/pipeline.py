"""End-to-end certification pipeline and the ``coindex`` command line.

``certify_infinite_index`` wires the stages together: dataset
verification, congruence probes, the kernel stage (Cayley table, orbit,
Schreier generators), Reidemeister-Schreier presentation and
abelianization, the subgroup image rank, and the verdict.  Every stage
logs exact integers into a machine-readable report
(schema "coindex-report/1").
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import abelian as ab
from . import congruence as cg
from ._kernels import backend_name
from .eiszeta import PaperDataset, builtin_dataset, evaluate_matrix_word
from .ffq import MatFq2, make_reduction, reduce_matrix
from .reidemeister import rs_rewrite, subgroup_presentation
from .toddcoxeter import Completed, Exceeded, TCConfig, coset_enumerate
from .words import exponent_vector, parse_word, substitute

REPORT_SCHEMA = "coindex-report/1"

#: nnz above which dumped matrices go to a sidecar file instead of inline
MATRIX_INLINE_LIMIT = 4096


@dataclass(frozen=True)
class CertifyConfig:
    kernel_modulus: int | None = 7
    probe_moduli: tuple[int, ...] = (2,)
    tc_limit: int = 1_000_000
    run_tc: bool = False
    closure_cap: int = 200_000
    multi_cap: int = 2_000_000
    rank_check_primes: tuple[int, ...] = (1_073_741_789, 1_073_741_783, 1_073_741_741)
    threads: int = 1

    def to_json_obj(self) -> dict:
        return {
            "kernel_modulus": self.kernel_modulus,
            "probe_moduli": list(self.probe_moduli),
            "tc_limit": self.tc_limit,
            "run_tc": self.run_tc,
            "closure_cap": self.closure_cap,
            "multi_cap": self.multi_cap,
            "rank_check_primes": list(self.rank_check_primes),
            "threads": self.threads,
        }


@dataclass
class CertificateReport:
    dataset: str
    config: CertifyConfig
    stages: dict = field(default_factory=dict)
    verdict: str = "inconclusive"
    bound: int | None = None
    error: dict | None = None
    timings: dict = field(default_factory=dict)
    backend: str = ""

    def to_json_obj(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "dataset": self.dataset,
            "backend": self.backend,
            "config": self.config.to_json_obj(),
            "stages": self.stages,
            "verdict": {"kind": self.verdict, "bound": self.bound},
            "error": self.error,
            "timings": self.timings,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_obj(), indent=indent, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"dataset: {self.dataset}   backend: {self.backend}"]
        for name, data in self.stages.items():
            lines.append(f"[{name}]")
            for k, v in data.items():
                lines.append(f"    {k}: {v}")
        if self.error:
            lines.append(f"error in stage {self.error['stage']}: {self.error['message']}")
        lines.append(f"verdict: {self.verdict}"
                     + (f" (bound {self.bound})" if self.bound is not None else ""))
        return "\n".join(lines)


def certify_infinite_index(cfg: CertifyConfig = CertifyConfig(),
                           dataset: PaperDataset | None = None,
                           matrix_dump: str | None = None) -> CertificateReport:
    """Run the full certification pipeline; never raises on stage failure.

    A failed stage leaves verdict "inconclusive" with a partial report.
    ``matrix_dump`` names a report path stem; when given, the kernel
    relation matrix is attached inline below MATRIX_INLINE_LIMIT nonzeros
    and streamed to a sidecar file above it.
    """
    ds = dataset if dataset is not None else builtin_dataset()
    report = CertificateReport(dataset=ds.name, config=cfg, backend=backend_name())
    stage = "dataset_verification"
    best_bound = 1
    try:
        t0 = time.perf_counter()
        ds.verify()
        reduced = ds.reduced_presentation()
        report.stages[stage] = {
            "s_generators": len(ds.s_gens),
            "gamma_generators": len(ds.gamma_gens),
            "relators": len(ds.swan_presentation.relators),
            "reduced_generators": list(reduced.gen_names),
            "reduced_relators": len(reduced.relators),
            "words_verified": True,
            "relators_verified": True,
        }
        report.timings[stage] = round(time.perf_counter() - t0, 6)

        stage = "congruence_probe"
        t0 = time.perf_counter()
        if cfg.probe_moduli:
            per = _probe_moduli(ds, cfg)
            combined = cg.multi_modulus_bound(cfg.probe_moduli, ds.s_gens,
                                              ds.gamma_gens, cap=cfg.multi_cap)
            best_bound = max(best_bound, combined.bound)
            report.stages[stage] = {
                "per_modulus": [m.to_json_obj() for m in per],
                "combined_order_gamma": combined.order_gamma,
                "combined_order_s": combined.order_s,
                "combined_bound": combined.bound,
            }
        else:
            report.stages[stage] = {"per_modulus": [], "combined_bound": 1}
        report.timings[stage] = round(time.perf_counter() - t0, 6)

        if cfg.kernel_modulus is not None:
            stage = "kernel"
            t0 = time.perf_counter()
            f = make_reduction(cfg.kernel_modulus)
            gamma_red = cg.FiniteMatGroup(
                f, {k: reduce_matrix(ds.gamma_gens[k], f) for k in reduced.gen_names})
            table = cg.cayley_coset_table(gamma_red, cap=cfg.closure_cap)
            s_red = cg.reduce_group(ds.s_gens, f)
            order_s = cg.closure_order(s_red, cfg.closure_cap)
            orbit = cg.orbit_stabilizer_schreier(s_red.gens, MatFq2.identity(f))
            index_n = table.n_cosets
            best_bound = max(best_bound, index_n // order_s)
            report.stages[stage] = {
                "modulus": cfg.kernel_modulus,
                "ramified": f.ramified,
                "index_of_N": index_n,
                "order_phi_S": order_s,
                "orbit_length": len(orbit.points),
                "schreier_count": len(orbit.schreier_gens),
            }
            report.timings[stage] = round(time.perf_counter() - t0, 6)

            stage = "abelian"
            t0 = time.perf_counter()
            rs = subgroup_presentation(reduced, table)
            relmat = ab.relation_matrix(rs.presentation)
            inv = ab.abelian_invariants(rs.presentation)
            mod_ranks = {p: ab.rank_mod_p(relmat, p) for p in cfg.rank_check_primes}
            relation_rank = rs.presentation.n_gens - inv.free_rank
            sub_rows = _subgroup_rows(ds, orbit, rs, table)
            sub_rank = ab.subgroup_image_rank(relmat, sub_rows)
            report.stages[stage] = {
                "n_generators": rs.presentation.n_gens,
                "n_relators": len(rs.presentation.relators),
                "relation_rank": relation_rank,
                "free_rank": inv.free_rank,
                "torsion": list(inv.torsion),
                "subgroup_rows": sub_rows.rows,
                "subgroup_rank": sub_rank,
                "rank_checks_mod_p": {str(p): r for p, r in mod_ranks.items()},
                "rank_checks_consistent": all(r == relation_rank for r in mod_ranks.values()),
            }
            report.timings[stage] = round(time.perf_counter() - t0, 6)
            if matrix_dump is not None:
                report.stages[stage]["relation_matrix"] = _attach_matrix(
                    relmat, matrix_dump)

            if sub_rank < inv.free_rank:
                report.verdict = "infinite"
                report.bound = None
            else:
                report.verdict = "bounded_below"
                report.bound = best_bound
        else:
            report.verdict = "bounded_below"
            report.bound = best_bound

        stage = "todd_coxeter"
        t0 = time.perf_counter()
        if cfg.run_tc:
            sub_words = [ds.m_words[k] for k in ds.m_words]
            result = coset_enumerate(reduced, sub_words, TCConfig(max_cosets=cfg.tc_limit))
            if isinstance(result, Completed):
                report.stages[stage] = {"status": "completed", "index": result.index,
                                        "max_cosets": cfg.tc_limit}
            else:
                report.stages[stage] = {
                    "status": "exceeded",
                    "cosets_defined": result.cosets_allocated,
                    "cosets_alive": result.cosets_alive,
                    "max_cosets": cfg.tc_limit,
                }
            report.timings[stage] = round(time.perf_counter() - t0, 6)
        else:
            report.stages[stage] = {"status": "skipped"}
    except Exception as exc:  # stage failure -> inconclusive partial report
        report.verdict = "inconclusive"
        report.bound = None
        report.error = {"stage": stage, "message": str(exc)}
    return report


def _probe_moduli(ds: PaperDataset, cfg: CertifyConfig) -> list[cg.ModulusReport]:
    def one(p: int) -> cg.ModulusReport:
        f = make_reduction(p)
        gamma_f = cg.reduce_group(ds.gamma_gens, f)
        s_f = cg.reduce_group(ds.s_gens, f)
        og = cg.bsgs_order(gamma_f)
        os_ = cg.bsgs_order(s_f)
        return cg.ModulusReport(p=f.p, degree=f.degree, zeta_image=tuple(f.zeta),
                                order_gamma=og, order_s=os_, index_bound=og // os_)

    if cfg.threads > 1 and len(cfg.probe_moduli) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(one, cfg.probe_moduli))
    return [one(p) for p in cfg.probe_moduli]


def _subgroup_rows(ds: PaperDataset, orbit: cg.SchreierOrbit, rs, table) -> ab.IntMat:
    """Exponent vectors of the rewritten Schreier generators of S meet N."""
    m_images = {i: ds.m_words[name] for i, name in enumerate(orbit.alphabet)}
    rows = []
    for w in orbit.schreier_gens:
        ambient = substitute(w, m_images)
        rewritten = rs_rewrite(ambient, table, rs.transversal)
        ev = exponent_vector(rewritten, rs.presentation.n_gens)
        rows.append({i: v for i, v in enumerate(ev) if v})
    return ab.IntMat.from_rows(rows, rs.presentation.n_gens)


def _attach_matrix(m: ab.IntMat, dump_stem: str) -> dict:
    if m.nnz <= MATRIX_INLINE_LIMIT:
        return m.to_json_obj()
    sidecar = f"{dump_stem}.relmat.json"
    m.save(sidecar)
    return {"rows": m.rows, "cols": m.cols, "nnz": m.nnz, "sidecar": sidecar}


# ---------------------------------------------------------------------------
# Command line


def _load_dataset(arg: str) -> PaperDataset:
    if arg == "builtin":
        return builtin_dataset()
    return PaperDataset.load(arg)


def _fq_json(m) -> list:
    return m.to_json_obj()


def _cmd_eval(args) -> int:
    ds = _load_dataset(args.dataset)
    alphabet = ds.swan_presentation.gen_names
    word = parse_word(args.word, alphabet)
    mat = evaluate_matrix_word(word, ds.gamma_gens, alphabet)
    print(json.dumps(mat.to_json_obj()))
    return 0


def _cmd_reduce(args) -> int:
    ds = _load_dataset(args.dataset)
    f = make_reduction(args.p)
    if args.gen is not None:
        try:
            mat = ds.gamma_gens.get(args.gen) or ds.s_gens[args.gen]
        except KeyError:
            print(f"unknown generator {args.gen!r}", file=sys.stderr)
            return 2
    else:
        alphabet = ds.swan_presentation.gen_names
        mat = evaluate_matrix_word(parse_word(args.word, alphabet),
                                   ds.gamma_gens, alphabet)
    print(json.dumps(reduce_matrix(mat, f).to_json_obj()))
    return 0


def _cmd_bound(args) -> int:
    ds = _load_dataset(args.dataset)
    moduli = [int(p) for p in args.moduli.split(",")] if args.moduli else []
    result = cg.multi_modulus_bound(moduli, ds.s_gens, ds.gamma_gens, cap=args.cap)
    out = {
        "moduli": moduli,
        "per_modulus": [m.to_json_obj() for m in result.per_modulus],
        "combined_order_gamma": result.order_gamma,
        "combined_order_s": result.order_s,
        "bound": result.bound,
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _cmd_tc(args) -> int:
    ds = _load_dataset(args.dataset)
    if args.presentation is not None:
        from .words import Presentation

        with open(args.presentation) as fh:
            pres = Presentation.from_json_obj(json.load(fh))
        sub = [parse_word(w, pres.gen_names) for w in (args.subgroup or [])]
    else:
        pres = ds.reduced_presentation()
        if args.subgroup:
            sub = [parse_word(w, pres.gen_names) for w in args.subgroup]
        else:
            sub = [ds.m_words[k] for k in ds.m_words]
    result = coset_enumerate(pres, sub, TCConfig(max_cosets=args.limit))
    if isinstance(result, Completed):
        out = {"status": "completed", "index": result.index,
               "cosets_defined": result.table.n_cosets,
               "cosets_alive": result.index, "max_cosets": args.limit}
    else:
        out = {"status": "exceeded", "cosets_defined": result.cosets_allocated,
               "cosets_alive": result.cosets_alive, "max_cosets": args.limit}
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _cmd_certify(args) -> int:
    ds = _load_dataset(args.dataset)
    kernel = None if args.kernel_modulus in ("none", "skip") else int(args.kernel_modulus)
    moduli = tuple(int(p) for p in args.moduli.split(",")) if args.moduli else ()
    cfg = CertifyConfig(kernel_modulus=kernel, probe_moduli=moduli,
                        tc_limit=args.tc_limit, run_tc=args.with_tc,
                        threads=args.threads)
    dump = args.report if (args.report and args.dump_matrices) else None
    report = certify_infinite_index(cfg, ds, matrix_dump=dump)
    text = report.to_json() if args.format == "json" else report.to_text()
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report.to_json() + "\n")
    print(text)
    if report.error is not None:
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="coindex",
        description="Congruence-image bounds and infinite-index certification "
                    "for a subgroup of GL2 over the Eisenstein integers.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_dataset(p):
        p.add_argument("--dataset", default="builtin",
                       help="dataset JSON path or 'builtin'")

    p = sub.add_parser("eval", help="evaluate a word over the ambient generators")
    add_dataset(p)
    p.add_argument("--word", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("reduce", help="reduce a generator or word modulo a prime")
    add_dataset(p)
    p.add_argument("--p", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gen")
    g.add_argument("--word")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("bound", help="congruence index bounds over prime moduli")
    add_dataset(p)
    p.add_argument("--moduli", default="2", help="comma-separated primes, may be empty")
    p.add_argument("--cap", type=int, default=2_000_000)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("tc", help="bounded Todd-Coxeter coset enumeration")
    add_dataset(p)
    p.add_argument("--limit", type=int, default=1_000_000)
    p.add_argument("--presentation", help="presentation JSON path (default: reduced builtin)")
    p.add_argument("--subgroup", nargs="*",
                   help="subgroup generator words (default: the builtin subgroup words)")
    p.set_defaults(func=_cmd_tc)

    p = sub.add_parser("certify", help="run the full certification pipeline")
    add_dataset(p)
    p.add_argument("--kernel-modulus", default="7",
                   help="prime for the kernel stage, or 'none' to skip")
    p.add_argument("--moduli", default="2", help="probe moduli (comma-separated, may be empty)")
    p.add_argument("--tc-limit", type=int, default=1_000_000)
    p.add_argument("--with-tc", action="store_true",
                   help="include the coset-enumeration stage in the report")
    p.add_argument("--report", help="write the JSON report to this path")
    p.add_argument("--dump-matrices", action="store_true",
                   help="attach the relation matrix (sidecar file when large)")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_certify)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
