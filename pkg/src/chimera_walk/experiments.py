"""Config-driven experiments with plot-ready CSV/JSON artifacts.

Every run writes a manifest carrying the resolved config, its hash, the
package version and wall time, so a run can be reproduced exactly from
its output directory.  Given the same config and seed the CSV outputs
are byte-identical.
"""
from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path

import numpy as np

from . import __version__
from .adiabatic import (Schedule, adiabatic_evolve, adiabatic_evolve_converged,
                        default_site_energies, target_hamiltonian)
from .dynamics import (classical_ctrw, evolve, fourier2d, limiting_distribution,
                       project_family, transition_probability)
from .errors import ChimeraWalkError, ConfigError
from .graphs import (BOUNDARIES, VARIANTS, ChimeraGraph, RowColConstraint,
                     VertexCoord, build_chimera, diminish, enhance,
                     graph_to_json, isolate_vertices)
from .operators import hamiltonian, symmetry_set
from .spectral import (eigensolve, enumerate_labels, label_eigenstates,
                       localized_state, spectral_diff, verify_spectrum)

__all__ = ["EXPERIMENTS", "run", "compare_fields", "load_config"]

EXPERIMENTS = ("walk", "classical", "limiting", "spectrum", "labels",
               "broken_diff", "fourier", "adiabatic", "distance")


def compare_fields(field_a, field_b) -> float:
    """1-norm distance between two probability fields."""
    a = np.asarray(getattr(field_a, "values", field_a))
    b = np.asarray(getattr(field_b, "values", field_b))
    if a.shape != b.shape:
        raise ValueError(f"field length mismatch: {a.shape} vs {b.shape}")
    return float(np.abs(a - b).sum())


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

def load_config(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"config is not valid JSON: {exc}") from exc


def _require(cfg: dict, key: str, types, path: str):
    if key not in cfg:
        raise ConfigError(f"{path}.{key}", "required field is missing")
    value = cfg[key]
    if not isinstance(value, types):
        raise ConfigError(f"{path}.{key}",
                          f"expected {types}, got {type(value).__name__}")
    return value


def _positive_int(cfg: dict, key: str, path: str) -> int:
    value = _require(cfg, key, int, path)
    if isinstance(value, bool) or value < 1:
        raise ConfigError(f"{path}.{key}", f"must be a positive integer, got {value}")
    return value


def _coord(raw, g: ChimeraGraph, path: str) -> VertexCoord:
    if (not isinstance(raw, (list, tuple)) or len(raw) != 3
            or not all(isinstance(x, int) for x in raw)):
        raise ConfigError(path, f"expected [m, n, mu], got {raw!r}")
    c = VertexCoord(*raw)
    try:
        g.coords_to_index(c)
    except Exception as exc:
        raise ConfigError(path, str(exc)) from exc
    return c


def build_graph(graph_cfg: dict, seed_override: int | None = None) -> ChimeraGraph:
    """Build the graph described by the config's graph section."""
    path = "graph"
    M = _positive_int(graph_cfg, "M", path)
    N = _positive_int(graph_cfg, "N", path)
    L = _positive_int(graph_cfg, "L", path)
    boundary = graph_cfg.get("boundary", "reflecting")
    if boundary not in BOUNDARIES:
        raise ConfigError("graph.boundary", f"must be one of {BOUNDARIES}")
    variant = graph_cfg.get("variant", "plain")
    if variant not in VARIANTS:
        raise ConfigError("graph.variant", f"must be one of {VARIANTS}")

    g = build_chimera(M, N, L, boundary)
    if variant == "plain":
        return g
    if variant == "enhanced":
        return enhance(g)

    # diminished: explicit broken list takes precedence over random sampling
    if "broken" in graph_cfg:
        coords = [_coord(c, g, f"graph.broken[{i}]")
                  for i, c in enumerate(graph_cfg["broken"])]
        return isolate_vertices(g, coords)
    fraction = _require(graph_cfg, "fraction", (int, float), path)
    seed = seed_override if seed_override is not None else \
        _require(graph_cfg, "seed", int, path)
    constraint = None
    if graph_cfg.get("constraint") is not None:
        ccfg = graph_cfg["constraint"]
        mode = _require(ccfg, "mode", str, "graph.constraint")
        if mode not in ("avoid", "require"):
            raise ConfigError("graph.constraint.mode", "must be 'avoid' or 'require'")
        constraint = RowColConstraint(
            mode,
            _positive_int(ccfg, "m", "graph.constraint"),
            _positive_int(ccfg, "n", "graph.constraint"),
        )
    try:
        return diminish(g, float(fraction), seed, constraint)
    except ValueError as exc:
        raise ConfigError("graph.fraction", str(exc)) from exc


# ---------------------------------------------------------------------------
# artifact writers
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    return repr(float(x))


def write_field_csv(path: Path, g: ChimeraGraph, values: np.ndarray) -> None:
    lines = ["index,m,n,mu,value"]
    for i, val in enumerate(values):
        m, n, mu = g.index_to_coords(i)
        lines.append(f"{i},{m},{n},{mu},{_fmt(val)}")
    path.write_text("\n".join(lines) + "\n")


def cell_aggregates(g: ChimeraGraph, values: np.ndarray) -> dict:
    """Per-cell sum and max over the intracell index, split by side."""
    grid = np.asarray(values).reshape(g.M, g.N, 2 * g.L)
    halves = {"left": grid[:, :, :g.L], "right": grid[:, :, g.L:]}
    return {
        side: {
            "sum": block.sum(axis=2).tolist(),
            "max": block.max(axis=2).tolist(),
        }
        for side, block in halves.items()
    }


def write_heatmap_json(path: Path, g: ChimeraGraph, values: np.ndarray,
                       extra: dict | None = None) -> None:
    payload = {
        "M": g.M, "N": g.N, "L": g.L,
        "vertex_values": [float(x) for x in values],
        "cells": cell_aggregates(g, values),
    }
    if extra:
        payload.update(extra)
    path.write_text(json.dumps(payload))


def write_spectrum_csv(path: Path, eig) -> None:
    group_id = np.empty(eig.dim, dtype=int)
    for gi, gr in enumerate(eig.groups):
        group_id[gr] = gi
    lines = ["index,eigenvalue,group"]
    for i in range(eig.dim):
        lines.append(f"{i},{_fmt(eig.eigenvalues[i])},{group_id[i]}")
    path.write_text("\n".join(lines) + "\n")


def write_spectrum_pair_csv(path: Path, eig_a, eig_b) -> None:
    lines = ["index,eigenvalue_base,eigenvalue_broken,shift"]
    for i in range(eig_a.dim):
        a, b = eig_a.eigenvalues[i], eig_b.eigenvalues[i]
        lines.append(f"{i},{_fmt(a)},{_fmt(b)},{_fmt(b - a)}")
    path.write_text("\n".join(lines) + "\n")


def write_labels_csv(path: Path, labeled) -> None:
    group_id = np.empty(labeled.dim, dtype=int)
    for gi, gr in enumerate(labeled.groups):
        group_id[gr] = gi
    lines = ["index,energy,group,family,branch,lattice,s"]
    for i, lab in enumerate(labeled.labels):
        lattice = ";".join(str(x) for x in lab.lattice)
        svec = ";".join(_fmt(x) for x in lab.s)
        lines.append(f"{i},{_fmt(lab.energy)},{group_id[i]},{lab.family},"
                     f"{lab.branch},{lattice},{svec}")
    path.write_text("\n".join(lines) + "\n")


def write_momentum_csv(path: Path, grid: np.ndarray) -> None:
    lines = ["k,kp,value"]
    for k in range(grid.shape[0]):
        for kp in range(grid.shape[1]):
            lines.append(f"{k},{kp},{_fmt(grid[k, kp])}")
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def _graph_and_h(cfg: dict, seed_override=None):
    g = build_graph(_require(cfg, "graph", dict, "<root>"), seed_override)
    weights = cfg.get("weights", {})
    j = float(weights.get("j", 1.0))
    k = float(weights.get("k", 1.0))
    try:
        return g, hamiltonian(g, j, k)
    except ValueError as exc:
        raise ConfigError("weights", str(exc)) from exc


def _v0(cfg: dict, g: ChimeraGraph) -> VertexCoord:
    return _coord(_require(cfg, "v0", (list, tuple), "<root>"), g, "v0")


def _time(cfg: dict) -> float:
    t = _require(cfg, "t", (int, float), "<root>")
    if t < 0:
        raise ConfigError("t", f"time must be >= 0, got {t}")
    return float(t)


def _run_probability_field(cfg, out, seed, kind):
    g, h = _graph_and_h(cfg, seed)
    v0 = _v0(cfg, g)
    if kind == "walk":
        fld = transition_probability(h, v0, _time(cfg))
    elif kind == "classical":
        fld = classical_ctrw(h, v0, _time(cfg))
    else:
        fld = limiting_distribution(h, v0)
    write_field_csv(out / "field.csv", g, fld.values)
    write_heatmap_json(out / "heatmap.json", g, fld.values, {"kind": fld.kind})
    return {"kind": fld.kind, "total": fld.total,
            "max_vertex": int(np.argmax(fld.values))}


def _run_spectrum(cfg, out, seed):
    g, h = _graph_and_h(cfg, seed)
    eig = eigensolve(h)
    write_spectrum_csv(out / "spectrum.csv", eig)
    results = {"states": eig.dim, "distinct_levels": len(eig.groups),
               "closed_form": None}
    try:
        labels = enumerate_labels(g.variant, g.boundary, g.M, g.N, g.L)
    except ChimeraWalkError:
        return results
    report = verify_spectrum(labels, eig)
    results["closed_form"] = {
        "labels": report.n_labels,
        "count_match": report.count_match,
        "max_deviation": report.max_deviation,
    }
    return results


def _run_labels(cfg, out, seed):
    g, h = _graph_and_h(cfg, seed)
    labeled = label_eigenstates(eigensolve(h), symmetry_set(g), g)
    write_labels_csv(out / "labels.csv", labeled)
    families = {}
    for lab in labeled.labels:
        families[lab.family] = families.get(lab.family, 0) + 1
    return {"states": labeled.dim, "families": families}


def _run_broken_diff(cfg, out, seed):
    g_broken = build_graph(_require(cfg, "graph", dict, "<root>"), seed)
    if g_broken.variant != "diminished":
        raise ConfigError("graph.variant", "broken_diff needs a diminished graph")
    base = build_chimera(g_broken.M, g_broken.N, g_broken.L, g_broken.boundary)
    weights = cfg.get("weights", {})
    j, k = float(weights.get("j", 1.0)), float(weights.get("k", 1.0))
    eig_a = eigensolve(hamiltonian(base, j, k))
    eig_b = eigensolve(hamiltonian(g_broken, j, k))
    diff = spectral_diff(eig_a, eig_b)
    write_spectrum_pair_csv(out / "spectrum.csv", eig_a, eig_b)

    best = None
    for energy, vertex, peak, ipr in diff.localization:
        if best is None or peak > best[2]:
            best = (energy, vertex, peak, ipr)
    if best is not None:
        gi = diff.localization.index(best)
        group = eig_b.groups[diff.changed_groups_b[gi]]
        state, vertex, peak = localized_state(eig_b, group)
        write_heatmap_json(out / "heatmap.json", g_broken, state,
                           {"kind": "eigenstate", "energy": best[0]})
    return {
        "max_shift": diff.max_shift,
        "groups_base": len(diff.groups_a),
        "groups_broken": len(diff.groups_b),
        "changed_groups": len(diff.changed_groups_a),
        "changed_fraction": diff.changed_group_fraction,
        "localization": [
            {"energy": e, "vertex": v, "peak": p, "ipr": i}
            for e, v, p, i in sorted(diff.localization,
                                     key=lambda r: -r[2])[:10]
        ],
    }


def _run_fourier(cfg, out, seed):
    g, h = _graph_and_h(cfg, seed)
    state = evolve(h, _v0(cfg, g), _time(cfg))
    side = cfg.get("side", "left")
    reduction = cfg.get("reduction", "sum")
    family = cfg.get("project_family")
    vec = state.amplitudes
    if family is not None:
        labeled = label_eigenstates(eigensolve(h), symmetry_set(g), g)
        vec = project_family(labeled, vec, family)
    try:
        grid = fourier2d(vec, g, side, reduction)
    except ValueError as exc:
        raise ConfigError("reduction", str(exc)) from exc
    write_momentum_csv(out / "field.csv", grid)
    (out / "heatmap.json").write_text(json.dumps(
        {"M": g.M, "N": g.N, "kind": "momentum",
         "momentum": grid.tolist()}))
    marginal = grid.sum(axis=1)
    return {"side": side, "reduction": reduction,
            "dominant_k": int(np.argmax(marginal))}


def _run_adiabatic(cfg, out, seed):
    g, h = _graph_and_h(cfg, seed)
    ops = symmetry_set(g)
    y = float(cfg.get("y", np.pi))
    z = float(cfg.get("z", 2.0))
    h_prime = target_hamiltonian(h, ops, y, z)
    site = default_site_energies(h.dim)
    v0 = g.coords_to_index(_coord(cfg.get("v0", [1, 1, 1]), g, "v0"))
    times = cfg.get("times", [1.0, 10.0, 100.0, 1000.0])
    steps_cfg = cfg.get("steps")

    labeled = label_eigenstates(eigensolve(h), symmetry_set(g), g)
    modes = eigensolve(h_prime)
    # match each target mode to a labeled walk mode by overlap
    overlap = np.abs(labeled.eigenvectors.T @ modes.eigenvectors)
    mode_label = [labeled.labels[int(np.argmax(overlap[:, c]))]
                  for c in range(modes.dim)]

    lines = ["T,steps,mode,mode_energy,fidelity"]
    summary = []
    for t_total in times:
        if steps_cfg:
            res = adiabatic_evolve(Schedule(float(t_total), int(steps_cfg), site,
                                            y, z), h_prime, v0, modes)
        else:
            res = adiabatic_evolve_converged(float(t_total), site, h_prime, v0)
        for mode in range(res.fidelities.size):
            lines.append(f"{_fmt(t_total)},{res.steps},{mode},"
                         f"{_fmt(res.modes.eigenvalues[mode])},"
                         f"{_fmt(res.fidelities[mode])}")
        lab = mode_label[res.dominant_mode]
        summary.append({
            "T": float(t_total), "steps": res.steps,
            "max_fidelity": res.max_fidelity,
            "dominant_mode": res.dominant_mode,
            "dominant_family": lab.family,
            "dominant_lattice": list(lab.lattice),
            "fidelity_sum": float(res.fidelities.sum()),
        })
    (out / "fidelities.csv").write_text("\n".join(lines) + "\n")
    return {"sweep": summary, "nondegenerate": len(modes.groups) == h.dim}


def _run_distance(cfg, out, seed):
    g_broken = build_graph(_require(cfg, "graph", dict, "<root>"), seed)
    if g_broken.variant != "diminished":
        raise ConfigError("graph.variant", "distance needs a diminished graph")
    base = build_chimera(g_broken.M, g_broken.N, g_broken.L, g_broken.boundary)
    weights = cfg.get("weights", {})
    j, k = float(weights.get("j", 1.0)), float(weights.get("k", 1.0))
    v0 = _v0(cfg, base)
    fld_base = limiting_distribution(hamiltonian(base, j, k), v0)
    fld_broken = limiting_distribution(hamiltonian(g_broken, j, k), v0)
    write_field_csv(out / "field.csv", g_broken, fld_broken.values)
    write_field_csv(out / "field_baseline.csv", base, fld_base.values)
    write_heatmap_json(out / "heatmap.json", g_broken, fld_broken.values,
                       {"kind": "limiting"})
    return {
        "distance": compare_fields(fld_base, fld_broken),
        "broken": sorted(list(g_broken.index_to_coords(i))
                         for i in g_broken.broken),
    }


_RUNNERS = {
    "walk": lambda c, o, s: _run_probability_field(c, o, s, "walk"),
    "classical": lambda c, o, s: _run_probability_field(c, o, s, "classical"),
    "limiting": lambda c, o, s: _run_probability_field(c, o, s, "limiting"),
    "spectrum": _run_spectrum,
    "labels": _run_labels,
    "broken_diff": _run_broken_diff,
    "fourier": _run_fourier,
    "adiabatic": _run_adiabatic,
    "distance": _run_distance,
}


def run(config: dict, out_dir=None, seed: int | None = None) -> dict:
    """Run one experiment; returns the manifest written to the output dir."""
    experiment = config.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigError("experiment", f"must be one of {EXPERIMENTS}, "
                          f"got {experiment!r}")
    resolved = dict(config)
    if seed is not None and "graph" in resolved:
        resolved = json.loads(json.dumps(resolved))
        resolved["graph"]["seed"] = seed
    out = Path(out_dir if out_dir is not None else resolved.get("out", "."))
    out.mkdir(parents=True, exist_ok=True)

    started = time.perf_counter()
    results = _RUNNERS[experiment](resolved, out, seed)
    wall = time.perf_counter() - started

    canonical = json.dumps(resolved, sort_keys=True)
    manifest = {
        "experiment": experiment,
        "config": resolved,
        "config_sha256": hashlib.sha256(canonical.encode()).hexdigest(),
        "package_version": __version__,
        "results": results,
        "timing": {"wall_time_s": wall, "created_unix": time.time()},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1))
    return manifest


def export_graph(g: ChimeraGraph, path) -> None:
    Path(path).write_text(graph_to_json(g))
