"""End-to-end check of a scenario and the report it produces."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from . import __version__
from .compatibility import CompatReport, scenario_pairwise_check
from .model import (ObstructionRecord, UnderlyingModel, build_model, demonstrate_obstruction,
                    model_to_dict, verify_born_agreement, verify_model_laws,
                    verify_update_diagram)
from .scenario import Scenario, wave_chains
from .states import sequential_distribution

__all__ = ["STATUS_COMPATIBLE", "STATUS_INCOMPATIBLE", "STATUS_INPUT_ERROR",
           "STATUS_VERIFICATION_FAILURE", "RunReport", "run_check", "probe_states",
           "render_text", "render_structured"]

STATUS_COMPATIBLE = 0
STATUS_INCOMPATIBLE = 1
STATUS_INPUT_ERROR = 2
STATUS_VERIFICATION_FAILURE = 3

WAVE_TOL = 1e-12


@dataclass
class RunReport:
    scenario_id: str
    status: int
    compat: CompatReport
    model: UnderlyingModel | None = None
    obstruction: ObstructionRecord | None = None
    verifications: dict = field(default_factory=dict)
    demo: dict | None = None
    seed: int = 0
    version: str = __version__
    timing: dict = field(default_factory=dict)
    problems: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return self.compat.verdict

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "scenario": self.scenario_id,
            "status": self.status,
            "verdict": self.verdict,
            "compat": self.compat.to_dict(),
            "witness": None if self.compat.witness is None else self.compat.witness.to_dict(),
            "model": None if self.model is None else model_to_dict(self.model),
            "obstruction": None if self.obstruction is None else self.obstruction.to_dict(),
            "verifications": {k: v.to_dict() for k, v in self.verifications.items()},
            "demo": self.demo,
            "problems": list(self.problems),
            "seed": self.seed,
            "version": self.version,
        }
        if timing:
            out["timing"] = dict(self.timing)
        return out


def probe_states(scenario: Scenario, n_random: int | None = None, seed: int | None = None) -> dict:
    """Declared probe states followed by seeded random ones (``random[i]``)."""
    states = dict(scenario.probe_states)
    for i, s in enumerate(scenario.random_states(n_random, seed)):
        states[f"random[{i}]"] = s
    return states


def _wave_section(scenario: Scenario) -> dict:
    rows = wave_chains(scenario)
    ok = all(abs(r["p_VN"] - r["p_N"]) <= WAVE_TOL and abs(r["p_NV"] - r["N_times_Vn"]) <= WAVE_TOL
             for r in rows)
    unequal = [r["n"] for r in rows if abs(r["p_VN"] - r["p_NV"]) > WAVE_TOL]
    return {"kind": "wave", "construction": scenario.metadata, "chains": rows,
            "chains_match": ok, "order_dependent_at": unequal}


def run_check(scenario: Scenario, *, n_states: int | None = None, seed: int | None = None,
              tol_compat: float | None = None, tol_model: float | None = None) -> RunReport:
    """Decide compatibility, then build and verify the model or explain the obstruction.

    Status 0: compatible and every verification passed. Status 1: an
    incompatible pair was found and its witness recomputes. Status 3: an
    internal inconsistency (a verification or witness recomputation failed).
    """
    start = time.perf_counter()
    opts = scenario.options
    tol_compat = opts.tol_compat if tol_compat is None else tol_compat
    tol_model = opts.tol_model if tol_model is None else tol_model
    seed = scenario.seed if seed is None else seed
    n_states = opts.random_states if n_states is None else n_states

    compat = scenario_pairwise_check(scenario, tol_compat)
    report = RunReport(scenario.id, STATUS_COMPATIBLE, compat, seed=seed)

    if compat.compatible:
        model = build_model(scenario, probe_states(scenario, n_states, seed),
                            tol_compat=tol_compat, cap=opts.sample_space_cap)
        report.model = model
        report.verifications = {
            "born": verify_born_agreement(model, tol=tol_model),
            "diagram": verify_update_diagram(model, tol=tol_model),
            "laws": verify_model_laws(model, tol=tol_model, seed=seed),
        }
        for name, v in report.verifications.items():
            if not v.passed:
                report.status = STATUS_VERIFICATION_FAILURE
                report.problems.append(f"{name} verification failed: {v.max_deviation:.3g}")
    else:
        report.status = STATUS_INCOMPATIBLE
        report.obstruction = demonstrate_obstruction(
            scenario, n_states=n_states, seed=seed, tol_compat=tol_compat, tol_model=tol_model,
            cap=opts.sample_space_cap)
        w = compat.witness
        a, b = scenario.observable(w.pair[0]), scenario.observable(w.pair[1])
        alpha, beta = w.values
        p_ab = sequential_distribution(w.psi, (a, alpha), (b, beta))
        p_ba = sequential_distribution(w.psi, (b, beta), (a, alpha))
        tol = max(a.tol, b.tol)
        if (w.violation <= tol_compat or abs(p_ab - w.p_ab) > tol or abs(p_ba - w.p_ba) > tol
                or abs(abs(p_ab - p_ba) - w.violation) > tol):
            report.status = STATUS_VERIFICATION_FAILURE
            report.problems.append("witness does not recompute")

    if scenario.metadata.get("demo") == "wave":
        report.demo = _wave_section(scenario)
    report.timing = {"seconds": time.perf_counter() - start}
    return report


def render_structured(report: RunReport, timing: bool = True) -> str:
    return json.dumps(report.to_dict(timing=timing), indent=2, sort_keys=True)


def render_text(report: RunReport) -> str:
    lines = [f"scenario: {report.scenario_id}",
             f"verdict:  {report.verdict} (status {report.status})"]
    for p in report.compat.pairs:
        mark = "ok " if p.compatible else "BAD"
        lines.append(f"  [{mark}] {p.pair[0]} / {p.pair[1]}  {p.method} margin {p.margin:.3e}")
    if report.model is not None:
        space = report.model.space
        lines.append(f"model: {space.size} points over ({', '.join(space.names)}), "
                     f"{len(report.model.measures)} states")
        for name, mu in report.model.measures.items():
            if name.startswith("random["):
                continue
            support = [(tuple(pt), float(p)) for pt, p in zip(space.points, mu.pmf) if p > 1e-12]
            lines.append(f"  {name}: " + ", ".join(
                "(" + ",".join(f"{x:g}" for x in pt) + f"): {p:.6g}" for pt, p in support))
    for name, v in report.verifications.items():
        lines.append(f"verify {name:8s} {'PASS' if v.passed else 'FAIL'}  "
                     f"max deviation {v.max_deviation:.3e} (tol {v.tolerance:g}, {v.checks} checks)")
    if report.obstruction is not None:
        o = report.obstruction
        w = o.witness
        lines.append(f"witness: {w.pair[0]}={w.values[0]:g}, {w.pair[1]}={w.values[1]:g}")
        lines.append(f"  p_ab = {w.p_ab:.12g}  p_ba = {w.p_ba:.12g}  violation = {w.violation:.12g}")
        lines.append(f"  {o.statement}")
        if o.attempted:
            lines.append("  fixed-order construction breaks: " + (", ".join(o.violated_laws) or "nothing"))
    if report.demo is not None:
        d = report.demo
        lines.append("wave demo (V first vs N first, on psi_plus):")
        for r in d["chains"]:
            lines.append(f"  n={r['n']:g}: P[V=+v,N=n]={r['p_VN']:.6g} (P[N=n]={r['p_N']:.6g})  "
                         f"P[N=n,V=+v]={r['p_NV']:.6g} (P[N=n]*P_n[V=+v]={r['N_times_Vn']:.6g})")
        lines.append(f"  chains match: {d['chains_match']}; order-dependent at n in {d['order_dependent_at']}")
    for p in report.problems:
        lines.append(f"PROBLEM: {p}")
    lines.append(f"seed {report.seed}, version {report.version}")
    return "\n".join(lines)
