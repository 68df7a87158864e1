"""Command line entry point: ``walker <command> spec.json``.

Exit status: 0 when every check passes, 1 when a check fails, 2 for an
invalid spec or input, 3 for an internal inconsistency.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import specfile
from .curvature import Geometry, ricci_kernel_check
from .distribution import (is_involutive, is_parallel, is_totally_isotropic, orthogonal_complement,
                           transverse_connection)
from .errors import InconsistencyError, NotParallelError, SpecError, WalkerError
from .foliation import (PATH_TOL, GroupRepresentation, build_mc_form, deformation_scan, develop, mc_check,
                        path_independence_check)
from .koszul import koszul_connection, walker_check_invariant
from .liealg import ClassificationLabel, LieAlgebra, classify, jacobi_check, structure_algebra
from .metric import is_strict
from .report import INFO, Report
from .symexpr import DEFAULT_SEED, evaluate, zero_tolerance
from .verdict import Confidence, Verdict

COMMANDS = ("check", "curvature", "classify", "develop", "deform")

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_INCONSISTENT = 0, 1, 2, 3


# tensor printouts -------------------------------------------------------------

def _idx(*indices) -> str:
    return ",".join(str(i + 1) for i in indices)


def _curvature_tensors(geo: Geometry) -> dict:
    n = geo.g.n
    gamma = {f"Gamma^{k + 1}_{_idx(i, j)}": x for (k, i, j), x in geo.connection.nonzero().items() if i <= j}
    riem = {f"R^{l + 1}_{_idx(k, i, j)}": x for (l, k, i, j), x in geo.riemann.nonzero().items() if i < j}
    ric = {f"Ric_{_idx(i, j)}": x for (i, j), x in geo.ricci.nonzero().items() if i <= j}
    inv = geo.invariants
    return {
        "dimension": n,
        "metric": geo.g.rows_as_text(),
        "inverse": geo.inverse.rows_as_text(),
        "christoffel": gamma,
        "riemann": riem,
        "ricci": ric,
        "scal": geo.scalar,
        "invariants": {"scal": inv.scal, "ric_squared": inv.ric_squared, "kretschmann": inv.kretschmann},
    }


def _values_at(geo: Geometry, point) -> dict:
    def each(d):
        return {k: evaluate(x, point) for k, x in d.items()}
    t = _curvature_tensors(geo)
    return {"point": point, "metric": geo.g.at(point), "inverse": geo.inverse.at(point),
            "christoffel": each(t["christoffel"]), "riemann": each(t["riemann"]),
            "ricci": each(t["ricci"]), "scal": evaluate(t["scal"], point),
            "invariants": each(t["invariants"])}


def _classification(label: ClassificationLabel) -> dict:
    return {"model": label.model, "label": label.describe(), "derived_series": list(label.derived),
            "lower_central_series": list(label.lower_central),
            "nilpotency_step": label.nilpotency_step, "derived_length": label.derived_length,
            "completely_solvable": label.completely_solvable,
            "completely_solvable_confidence": label.completely_solvable_verdict.confidence.value}


def _brackets(L: LieAlgebra) -> list[str]:
    return L.describe_brackets() or ["abelian"]


# walker metrics ----------------------------------------------------------------

class _WalkerRun:
    def __init__(self, doc: specfile.SpecDocument, report: Report, rng):
        self.doc = doc
        self.report = report
        self.rng = rng
        with report.timed("build"):
            self.g = specfile.build_metric(doc)
        self.geo = Geometry(self.g, rng)
        self.D = None
        self.algebra = None

    def curvature(self):
        rep = self.report
        with rep.timed("curvature"):
            rep.tensors.update(_curvature_tensors(self.geo))

    def inverse_note(self):
        if self.doc.kind != "walker3":
            return
        rows = self.geo.inverse.rows_as_text()
        self.report.info("inverse_metric_entries", "g^11 = -f, g^13 = 1, g^22 = eps, g^33 = 0",
                         **{"g^11": rows[0][0], "g^33": rows[2][2],
                            "note": "the entry equal to -f is g^11; g^33 vanishes, so g^33 = -f does not hold"})

    def curvature_summary(self):
        rep = self.report
        rep.add("ricci_flat", self.geo.ricci.is_zero(self.rng), "Ric = 0", level=INFO)
        rep.add("flat", self.geo.riemann.is_zero(self.rng), "R = 0", level=INFO)

    def distribution(self):
        rep = self.report
        with rep.timed("distribution"):
            self.D = D = specfile.distribution_for(self.doc, self.g, self.rng)
            rep.tensors["distribution"] = [str(X) for X in D.fields]
            rep.add("totally_isotropic", is_totally_isotropic(D, self.g, self.rng), "g(X, Y) = 0 for X, Y in D")
            self.parallel = rep.add("parallel", is_parallel(D, self.g, self.rng, self.geo.connection),
                                    "nabla_V X lies in D for X in D")
            rep.add("involutive", is_involutive(D, self.rng), "[X, Y] lies in D for X, Y in D")
            rep.add("ricci_kernel", ricci_kernel_check(self.g, D, self.rng, self.geo.ricci),
                    "Ric(X, V) = 0 for X in D")
            if self.g.spec is not None and self.doc.data.get("distribution") is None:
                rep.add("strict", is_strict(self.g, self.rng),
                        "b block independent of the D coordinates", level=INFO)
            self._complement_note()
            self._transverse()

    def _complement_note(self):
        perp = orthogonal_complement(self.D, self.g, self.rng)
        n = self.g.n
        diag = {"span": [str(X) for X in perp.fields], "rank": perp.rank, "dimension": n}
        if self.doc.kind == "walker3" and perp.rank < n:
            diag["note"] = f"D^perp has rank {perp.rank} < {n}, so D^perp = TM does not hold"
        self.report.info("orthogonal_complement", "D^perp = {V : g(V, X) = 0 for X in D}", **diag)

    def _transverse(self):
        if not self.parallel:
            return
        complement = specfile.complement_for(self.doc, self.D)
        if complement is None:
            self.report.info("transverse_connection", "nabla^T_X Ybar = (nabla_X Y) mod D",
                             note="no complement declared for a non-coordinate distribution")
            return
        T = transverse_connection(self.g, self.D, complement, self.rng, self.geo.connection)
        self.report.add("transverse_connection_well_defined", T.lift_check,
                        "(nabla_X Y) mod D does not depend on the lift of Ybar")
        labels = [f"X{a + 1}" for a in range(self.D.rank)] + [f"Y{b + 1}" for b in range(len(complement))]
        self.report.tensors["transverse_connection"] = {
            f"nabla^T_{labels[a]} Y{b + 1} [Y{c + 1}]": x for (a, b, c), x in T.nonzero().items()}

    def structure(self, required: bool = False):
        rep = self.report
        if self.D is None:
            self.D = specfile.distribution_for(self.doc, self.g, self.rng)
        with rep.timed("structure_algebra"):
            try:
                L = structure_algebra(self.D.fields, self.g, self.rng)
            except NotParallelError as exc:
                if required:
                    raise SpecError(f"no structure algebra: {exc}") from None
                rep.info("structure_algebra", "[X_i, X_j] = c^k_ij X_k for a parallel frame",
                         note=f"spanning fields are not parallel ({exc}); the metric is not strict "
                              "for this frame")
                return None
            except WalkerError as exc:
                rep.add("structure_constants_constant", _failed(str(exc)),
                        "[X_i, X_j] = c^k_ij X_k with constant c")
                return None
        rep.add("structure_constants_constant", L.constancy, "[X_i, X_j] = c^k_ij X_k with constant c")
        rep.add("jacobi", jacobi_check(L), "cyclic sum of [[X_i, X_j], X_k] vanishes")
        label = classify(L, self.rng)
        rep.info("classification", "model type of the structure algebra",
                 label.completely_solvable_verdict.confidence.value, **_classification(label))
        rep.tensors["structure_algebra"] = _brackets(L)
        self.algebra = L
        return L

    def maurer_cartan(self):
        complement = specfile.complement_for(self.doc, self.D)
        if complement is None:
            raise SpecError("a complement is required to build the Maurer-Cartan form")
        omega = build_mc_form(self.D.fields, complement, self.algebra, self.rng)
        self.report.tensors["maurer_cartan_form"] = omega.describe()
        self.report.add("maurer_cartan", mc_check(omega, self.rng), "d omega + 1/2 [omega ^ omega] = 0")
        return omega


def _failed(detail: str) -> Verdict:
    return Verdict(False, Confidence.EXACT, None, detail)


def _walker_check(run: _WalkerRun):
    run.curvature()
    run.inverse_note()
    run.curvature_summary()
    run.distribution()
    if run.structure() is not None:
        if specfile.complement_for(run.doc, run.D) is not None:
            run.maurer_cartan()


# development --------------------------------------------------------------------

def _develop_curves(report: Report, doc, omega, rep_matrices, rng):
    curves = specfile.curves(doc, omega.chart)
    if not curves:
        raise SpecError("develop needs at least one curve")
    box = doc.data.get("domain")
    if box is not None:
        for k, c in enumerate(curves):
            if not c.inside(box):
                raise SpecError(f"curve {k + 1} leaves the declared domain")
    path_tol = doc.tolerances.get("path", PATH_TOL)
    step = doc.data.get("step")
    results = []
    with report.timed("develop"):
        for k, c in enumerate(curves):
            res = develop(omega, c, rep_matrices, step)
            entry = {"curve": k + 1, "matrix": np.round(res.matrix, 12).tolist(), "steps": res.steps}
            if res.vector is not None:
                entry["vector"] = [round(x, 12) for x in res.vector]
            if res.exact_vector is not None:
                entry["exact_vector"] = res.exact_vector
            results.append(entry)
        report.tensors["develop"] = results
        for k in range(len(curves) - 1):
            a1, b1 = curves[k].endpoints()
            a2, b2 = curves[k + 1].endpoints()
            if np.allclose(a1, a2) and np.allclose(b1, b2):
                v = path_independence_check(omega, curves[k], curves[k + 1], rep_matrices, path_tol, step)
                report.add(f"path_independent[{k + 1},{k + 2}]", v,
                           "develop(curve) depends only on the endpoints")


# Lie groups ---------------------------------------------------------------------

def _subspace_name(s, L: LieAlgebra) -> str:
    if all(isinstance(x, int) for x in s):
        return "span{" + ",".join(L.labels[i] for i in s) + "}"
    return "span{" + ",".join("(" + ",".join(str(x) for x in v) + ")" for v in s) + "}"


def _lie_check(doc, report: Report, rng, command: str):
    L = specfile.lie_algebra(doc)
    report.tensors["brackets"] = _brackets(L)
    if not report.add("jacobi", jacobi_check(L), "cyclic sum of [[e_i, e_j], e_k] vanishes"):
        return
    label = classify(L, rng)
    report.info("classification", "model type of the algebra",
                label.completely_solvable_verdict.confidence.value, **_classification(label))
    if command == "classify":
        return
    if command == "check" and "metric" in doc.data:
        g = specfile.invariant_metric(doc, L)
        conn = koszul_connection(L, g)
        report.add("torsion_free", conn.torsion_check(), "nabla_U V - nabla_V U = [U, V]")
        report.add("metric_compatible", conn.compatibility_check(),
                   "g(nabla_U V, W) + g(V, nabla_U W) = 0")
        report.tensors["koszul_connection"] = conn.describe() or ["all coefficients vanish"]
        for s in specfile.subspaces(doc, L):
            name = _subspace_name(s, L)
            w = walker_check_invariant(L, g, s, conn, rng)
            report.add(f"isotropic[{name}]", w.isotropic, "g vanishes on the subspace")
            report.add(f"parallel[{name}]", w.parallel, "nabla_{e_i} v stays in the subspace")
            if w.subalgebra is not None:
                report.info(f"subalgebra[{name}]", "bracket closure of the subspace",
                            brackets=_brackets(w.subalgebra), **_classification(w.classification))
    if "form" in doc.data:
        omega = specfile.maurer_cartan_form(doc, L, rng)
        report.tensors["maurer_cartan_form"] = omega.describe()
        report.add("maurer_cartan", mc_check(omega, rng), "d omega + 1/2 [omega ^ omega] = 0")
        if command == "develop" or (command == "check" and "curves" in doc.data):
            _develop_curves(report, doc, omega, specfile.representation(doc, L), rng)
    elif command == "develop":
        raise SpecError("develop on a lie_group spec needs a 'form'")


# deformation ---------------------------------------------------------------------

def _deform(doc, report: Report, rng):
    family = specfile.deformation_family(doc)
    grid = specfile.grid(doc)
    with report.timed("scan"):
        scan = deformation_scan(family, grid, rng)
    rows = []
    for row in scan.rows:
        report.add(f"jacobi[t={row.t:g}]", row.jacobi, "cyclic sum of [[e_i, e_j], e_k] vanishes")
        entry = {"t": row.t, "jacobi": row.jacobi.value}
        if row.classification is not None:
            entry.update(model=row.classification.model, label=row.classification.describe())
        rows.append(entry)
    report.tensors["scan"] = rows
    report.tensors["transitions"] = [{"from_t": a, "to_t": b, "from": x, "to": y}
                                     for a, b, x, y in scan.transitions]


# orchestration --------------------------------------------------------------------

def run(command: str, doc: specfile.SpecDocument, seed: int | None = None, tol: float | None = None,
        at: str | None = None, timings: bool = False) -> Report:
    """Execute one command on a loaded spec document."""
    if command not in COMMANDS:
        raise SpecError(f"unknown command {command!r}")
    seed = seed if seed is not None else (doc.seed if doc.seed is not None else DEFAULT_SEED)
    tol = tol if tol is not None else doc.tolerances.get("zero")
    report = Report(doc.kind, command, seed, record_timings=timings)
    rng = np.random.default_rng(seed)
    if tol is None:
        _dispatch(command, doc, report, rng, at)
    else:
        with zero_tolerance(tol):
            _dispatch(command, doc, report, rng, at)
    return report


def _dispatch(command, doc, report, rng, at):
    kind = doc.kind
    if at is not None and command != "curvature":
        raise SpecError("--at applies to the curvature command only")
    if kind in specfile.WALKER_KINDS:
        walker = _WalkerRun(doc, report, rng)
        if command == "check":
            _walker_check(walker)
        elif command == "curvature":
            walker.curvature()
            if at is not None:
                point = specfile.point(at, walker.g.chart)
                report.tensors["at"] = _values_at(walker.geo, point)
        elif command == "classify":
            walker.structure(required=True)
        elif command == "develop":
            walker.structure(required=True)
            omega = walker.maurer_cartan()
            _develop_curves(report, doc, omega, GroupRepresentation.builtin(walker.algebra), rng)
        else:
            raise SpecError(f"{command} needs a deformation spec")
    elif kind == "lie_group":
        if command in ("curvature", "deform"):
            raise SpecError(f"{command} does not apply to a lie_group spec")
        _lie_check(doc, report, rng, command)
    else:
        if command not in ("check", "deform"):
            raise SpecError(f"{command} does not apply to a deformation spec")
        _deform(doc, report, rng)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="walker", description="Check Walker metrics, structure "
                                "algebras, Maurer-Cartan forms and deformation families.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("spec", help="path to a JSON spec document")
    p.add_argument("--json", action="store_true", help="print the machine-readable report")
    p.add_argument("--seed", type=int, default=None, help=f"random seed (default {DEFAULT_SEED})")
    p.add_argument("--at", default=None, metavar="x1=..,x2=..",
                   help="evaluate curvature tensors at a point")
    p.add_argument("--tol", type=float, default=None, help="zero-test tolerance (default 1e-9)")
    p.add_argument("--timings", action="store_true", help="record per-stage wall-clock times")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        doc = specfile.load(args.spec)
        report = run(args.command, doc, args.seed, args.tol, args.at, args.timings)
    except InconsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (WalkerError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(report.to_json() if args.json else report.render())
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
