"""Command-line front end.

    drivenwalk simulate|eigen|search|oracle CONFIG [CONFIG ...] [--out DIR] [--jobs N]

Each config produces a directory OUT/<config stem>/ of comma-delimited
tables plus a manifest.json holding the resolved configuration, the
eigenfrequencies and mismatches, and the tool version. Outputs are
deterministic: rerunning a command yields byte-identical files, and running
any command on the resolved config embedded in a manifest reproduces the
original outputs.

Exit codes: 0 success, 2 config error, 3 detection mismatch (search with
ground truth), 4 numerical-integrity failure.

Config arguments may name bundled experiments (line5_matched,
line5_mismatched, search11) instead of paths.
"""

import argparse
import concurrent.futures
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import SearchConfig, WalkConfig, bundled_config_path, load_config, \
    BUNDLED_CONFIGS
from .engine import InjectionSchedule, injection_vector, make_walk_operator, \
    run_driven_walk
from .errors import ConfigError, NumericalIntegrityError
from .kernels import BACKEND
from .lattice import Torus2D
from .search import build_search_instance, exclusion_zone, localized_mode_check, \
    run_search
from .spectral import eigendecompose, frequency_cluster, matched_injection_phase, \
    matched_mode_index, mismatch_profile, analytic_mode_intensity

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISMATCH = 3
EXIT_NUMERICAL = 4

ORACLE_TOL = 1e-8


def _fmt(x) -> str:
    """Shortest round-trip decimal form; keeps output byte-stable."""
    return repr(float(x))


def _write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _write_manifest(path: Path, payload: dict):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _manifest_base(command: str, document: dict) -> dict:
    return {
        "tool": "drivenwalk",
        "version": __version__,
        "kernel_backend": BACKEND,
        "command": command,
        "resolved_config": document,
    }


# ---------------------------------------------------------------------------
# resolution shared by simulate / eigen / oracle

class _ResolvedWalk:
    """Operator, injection and eigendata for a walk or search config."""

    def __init__(self, cfg):
        if isinstance(cfg, SearchConfig):
            target, placed = _resolve_target(cfg)
            self.instance = build_search_instance(
                cfg.side, cfg.central, target, alpha=cfg.alpha, steps=cfg.steps)
            self.topology = self.instance.lattice
            self.operator = self.instance.operator
            self.base = self.instance.injection_base
            self.steps = self.instance.steps
            self.phi = 0.0
            self.matched_mode = None
            document = _deep_copy(cfg.document)
            document["search"]["steps"] = self.steps
            if placed:
                # record the effective seed, not the placement itself, so a
                # rerun from the manifest redoes the same draw
                document["seed"] = 0 if cfg.seed is None else cfg.seed
            self.placed_target = target if placed else None
            self.document = document
            self.ground_truth = cfg.target
        else:
            self.instance = None
            self.topology = cfg.topology
            self.operator = make_walk_operator(cfg.topology, cfg.coins,
                                               cfg.flip_flop)
            self.base = injection_vector(cfg.topology, cfg.injection_vertex,
                                         cfg.injection_weights, cfg.amplitude)
            self.steps = cfg.steps
            self.matched_mode = None
            self.document = _deep_copy(cfg.document)
            self.ground_truth = None
            self.placed_target = None
            self._resolve_phase(cfg)
        self.eigen = eigendecompose(self.operator)
        if self.matched_pending:
            if self._matched_request == "auto":
                try:
                    j = matched_mode_index(self.eigen, self.base)
                except ValueError as exc:
                    raise ConfigError("injection.weights", str(exc)) from None
            else:
                j = self._matched_request
            self.matched_mode = j
            self.phi = matched_injection_phase(self.eigen, j)
            self.document["injection"]["matched_mode"] = j
        self.profile = mismatch_profile(self.eigen, self.phi, self.base)

    matched_pending = False

    def _resolve_phase(self, cfg: WalkConfig):
        if cfg.phase_mode == "constant":
            self.phi = 0.0
        elif cfg.phase_mode == "explicit":
            self.phi = float(cfg.phi)
        else:
            self.matched_pending = True
            self._matched_request = cfg.matched_mode
            self.phi = None

    def schedule(self) -> InjectionSchedule:
        return InjectionSchedule.phased(self.base, self.phi, self.steps)


def _deep_copy(doc):
    return json.loads(json.dumps(doc))


def _resolve_target(cfg: SearchConfig):
    """Ground-truth target, or a seeded random placement outside the zone."""
    if cfg.target is not None:
        return cfg.target, False
    lattice = Torus2D(cfg.side, cfg.side)
    zone = set(exclusion_zone(lattice, cfg.central))
    rng = np.random.default_rng(0 if cfg.seed is None else cfg.seed)
    while True:
        v = int(rng.integers(lattice.vertex_count))
        if v not in zone:
            return lattice.vertex_coords(v), True


# ---------------------------------------------------------------------------
# subcommand runners (one config each)

def _run_simulate(cfg, out_dir: Path) -> int:
    resolved = _ResolvedWalk(cfg)
    want_eigen = (isinstance(cfg, WalkConfig)
                  and "eigenmode" in cfg.output_series)
    record = run_driven_walk(resolved.operator, resolved.schedule(),
                             eigen=resolved.eigen if want_eigen else None)

    steps = resolved.steps
    t_col = [str(t) for t in range(1, steps + 1)]
    v_names = [f"v{v}" for v in range(resolved.topology.vertex_count)]
    _write_csv(out_dir / "physical.csv", ["t"] + v_names,
               ([t_col[i]] + [_fmt(x) for x in record.vertex_intensity[i]]
                for i in range(steps)))
    outputs = ["physical.csv"]
    if want_eigen:
        m_names = [f"m{j}" for j in range(resolved.eigen.size)]
        _write_csv(out_dir / "eigenmode.csv", ["t"] + m_names,
                   ([t_col[i]] + [_fmt(x) for x in record.eigenmode_intensity[i]]
                    for i in range(steps)))
        outputs.append("eigenmode.csv")

    manifest = _manifest_base("simulate", resolved.document)
    manifest["eigenfrequencies"] = [float(w) for w in resolved.eigen.frequencies]
    manifest["mismatches"] = [float(d) for d in resolved.profile.deltas]
    manifest["injection_phase"] = float(resolved.phi)
    if resolved.matched_mode is not None:
        manifest["matched_mode"] = int(resolved.matched_mode)
    manifest["outputs"] = outputs
    _write_manifest(out_dir / "manifest.json", manifest)
    return EXIT_OK


def _run_eigen(cfg, out_dir: Path) -> int:
    resolved = _ResolvedWalk(cfg)
    eigen = resolved.eigen
    topology = resolved.topology
    _write_csv(out_dir / "frequencies.csv", ["j", "omega"],
               ([str(j), _fmt(w)] for j, w in enumerate(eigen.frequencies)))

    d = topology.coin_dim
    v_names = [f"v{v}" for v in range(topology.vertex_count)]

    def weight_rows():
        for j in range(eigen.size):
            vec = eigen.transform[j]
            prob = (vec.real ** 2 + vec.imag ** 2)
            per_vertex = prob.reshape(topology.vertex_count, d).sum(axis=1)
            yield [str(j)] + [_fmt(x) for x in per_vertex]

    _write_csv(out_dir / "weights.csv", ["j"] + v_names, weight_rows())

    manifest = _manifest_base("eigen", resolved.document)
    manifest["eigenfrequencies"] = [float(w) for w in eigen.frequencies]
    manifest["mismatches"] = [float(x) for x in resolved.profile.deltas]
    manifest["injection_phase"] = float(resolved.phi)
    if resolved.instance is not None:
        report = localized_mode_check(resolved.instance, eigen)
        manifest["localized_mode"] = {
            "marked_fraction": report.fraction,
            "min_abs_frequency": report.min_abs_frequency,
            "coupling_intensity": report.coupling_intensity,
            "subspace_dimension": report.subspace_dimension,
        }
    manifest["outputs"] = ["frequencies.csv", "weights.csv"]
    _write_manifest(out_dir / "manifest.json", manifest)
    return EXIT_OK


def _run_search(cfg, out_dir: Path) -> int:
    if not isinstance(cfg, SearchConfig):
        raise ConfigError("search", "the search command needs a [search] config")
    resolved = _ResolvedWalk(cfg)
    instance = resolved.instance
    eigen = resolved.eigen
    result = run_search(instance)

    record = run_driven_walk(instance.operator,
                             InjectionSchedule.constant(instance.injection_base,
                                                        instance.steps),
                             eigen=eigen)
    zero = frequency_cluster(eigen, 0.0)
    matched_series = record.eigenmode_intensity[:, zero].sum(axis=1)
    # the two frequency clusters nearest zero, one on each side of it
    abs_freq = np.abs(eigen.frequencies)
    nonzero = np.setdiff1d(np.arange(eigen.size), zero)
    if nonzero.size:
        gap = abs_freq[nonzero].min()
        near_idx = nonzero[np.abs(abs_freq[nonzero] - gap) <= 1e-9]
        mismatched_series = record.eigenmode_intensity[:, near_idx].sum(axis=1)
    else:
        mismatched_series = np.zeros(instance.steps)

    _write_csv(out_dir / "series.csv",
               ["t", "matched_mode", "mismatched_modes", "central_vertex",
                "target_vertex"],
               ([str(t + 1), _fmt(matched_series[t]), _fmt(mismatched_series[t]),
                 _fmt(result.central_series[t]), _fmt(result.target_series[t])]
                for t in range(instance.steps)))

    lattice = instance.lattice
    _write_csv(out_dir / "intensity_map.csv", ["x", "y", "intensity"],
               ([str(v % lattice.nx), str(v // lattice.nx),
                 _fmt(result.intensity_map[v])]
                for v in range(lattice.vertex_count)))

    ground_truth = resolved.ground_truth
    match = None if ground_truth is None else \
        (tuple(result.detected_vertex) == tuple(ground_truth))
    payload = {
        "detected_vertex": list(result.detected_vertex),
        "ground_truth": None if ground_truth is None else list(ground_truth),
        "match": match,
        "marked_intensity": result.marked_intensity,
        "contrast": result.contrast if np.isfinite(result.contrast) else None,
        "steps_run": result.steps_run,
        "degraded_confidence": result.degraded_confidence,
        "alpha": instance.alpha,
    }
    with open(out_dir / "result.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")

    manifest = _manifest_base("search", resolved.document)
    manifest["eigenfrequencies"] = [float(w) for w in eigen.frequencies]
    manifest["mismatches"] = [float(x) for x in resolved.profile.deltas]
    manifest["injection_phase"] = 0.0
    if resolved.placed_target is not None:
        manifest["placed_target"] = list(resolved.placed_target)
    manifest["outputs"] = ["series.csv", "intensity_map.csv", "result.json"]
    _write_manifest(out_dir / "manifest.json", manifest)

    if match is False:
        return EXIT_MISMATCH
    return EXIT_OK


def _run_oracle(cfg, out_dir: Path) -> int:
    resolved = _ResolvedWalk(cfg)
    record = run_driven_walk(resolved.operator, resolved.schedule(),
                             eigen=resolved.eigen)
    profile = resolved.profile
    steps = resolved.steps
    n = resolved.eigen.size

    analytic = np.zeros((steps, n))
    t_axis = np.arange(1, steps + 1)
    for j in range(n):
        analytic[:, j] = analytic_mode_intensity(profile.couplings[j],
                                                 profile.deltas[j], t_axis)
    simulated = record.eigenmode_intensity if steps else np.zeros((0, n))
    deviation = float(np.abs(simulated - analytic).max()) if steps else 0.0

    def rows():
        for t in range(steps):
            for j in range(n):
                yield [str(t + 1), str(j), _fmt(simulated[t, j]),
                       _fmt(analytic[t, j])]

    _write_csv(out_dir / "oracle.csv", ["t", "mode", "simulated", "analytic"],
               rows())

    manifest = _manifest_base("oracle", resolved.document)
    manifest["eigenfrequencies"] = [float(w) for w in resolved.eigen.frequencies]
    manifest["mismatches"] = [float(x) for x in profile.deltas]
    manifest["injection_phase"] = float(resolved.phi)
    manifest["max_abs_deviation"] = deviation
    manifest["tolerance"] = ORACLE_TOL
    manifest["outputs"] = ["oracle.csv"]
    _write_manifest(out_dir / "manifest.json", manifest)

    if deviation > ORACLE_TOL:
        print(f"oracle deviation {deviation:.3e} exceeds {ORACLE_TOL:.1e}",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


_RUNNERS = {
    "simulate": _run_simulate,
    "eigen": _run_eigen,
    "search": _run_search,
    "oracle": _run_oracle,
}


def _resolve_config_arg(arg: str) -> Path:
    path = Path(arg)
    if path.exists():
        return path
    if arg in BUNDLED_CONFIGS:
        return bundled_config_path(arg)
    return path  # load_config reports the read failure


def run_one(command: str, config_arg: str, out_base: str) -> int:
    """Run one subcommand on one config; returns the exit code."""
    path = _resolve_config_arg(config_arg)
    try:
        cfg = load_config(path)
        out_dir = Path(out_base) / path.stem
        out_dir.mkdir(parents=True, exist_ok=True)
        return _RUNNERS[command](cfg, out_dir)
    except ConfigError as exc:
        print(f"config error in {path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalIntegrityError as exc:
        print(f"numerical integrity failure for {path}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="drivenwalk",
        description="Driven discrete-time quantum walk simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("simulate", "run a driven walk and write intensity time series"),
        ("eigen", "write the spectrum and eigenvector vertex weights"),
        ("search", "run the marked-vertex search protocol"),
        ("oracle", "compare simulated eigenmode intensities to closed forms"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("configs", nargs="+", metavar="CONFIG",
                       help="config file path or bundled name "
                            f"({', '.join(BUNDLED_CONFIGS)})")
        p.add_argument("--out", default=".",
                       help="base output directory (default: current)")
        p.add_argument("--jobs", type=int, default=1,
                       help="run this many configs concurrently")

    args = parser.parse_args(argv)
    jobs = max(1, args.jobs)
    if jobs == 1 or len(args.configs) == 1:
        codes = [run_one(args.command, c, args.out) for c in args.configs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_one, args.command, c, args.out)
                       for c in args.configs]
            codes = [f.result() for f in futures]
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())
