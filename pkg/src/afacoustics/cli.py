"""Command-line front end: simulations, convergence studies, stability scans.

Configuration comes from ``key=value`` files (``--config``) with full
command-line override; every output run writes a JSON manifest listing the
effective configuration and all produced files.

Exit codes: 0 success, 2 configuration error, 3 solution blow-up,
4 stability bracket error.
"""

from __future__ import annotations

import argparse
import csv
import json
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .evolution import KINDS, EvolutionConfig
from .grid import build_grid, eoc, l1_error
from .problems import cross_section, get_problem, vortex_diagnostics
from .scheme import BlowUpError, SchemeConfig, run, write_snapshot
from .stability import BracketError, analyze, assemble_B, eigenvalues, max_cfl
from .problems import Problem

PROBLEMS = ("example1", "example2", "example3", "example4")


class ConfigError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def read_config(path) -> dict:
    out = {}
    for ln, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected key=value, got {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def parse_op_spec(spec: str, default_cfl=None):
    """'kind[:delta[:nu]][@cfl]' -> (EvolutionConfig kwargs, cfl)."""
    if "@" in spec:
        spec, cfl_txt = spec.split("@", 1)
        cfl = float(cfl_txt)
    else:
        cfl = default_cfl
    parts = spec.split(":")
    kind = parts[0]
    if kind not in KINDS:
        raise ConfigError(f"unknown operator {kind!r}; valid kinds: {', '.join(KINDS)}")
    kw = {"kind": kind}
    if len(parts) > 1:
        kw["delta"] = float(parts[1])
    if len(parts) > 2:
        kw["nu"] = float(parts[2])
    if len(parts) > 3:
        raise ConfigError(f"too many parameters in operator spec {spec!r}")
    return kw, cfl


def op_tag(cfg: EvolutionConfig) -> str:
    tag = cfg.kind
    if "delta" in cfg.kind:
        tag += f"_{cfg.delta:g}"
    if "deltanu" in cfg.kind:
        tag += f"_{cfg.nu:g}"
    return tag


#: marker for settings that must come from the CLI or the config file
REQUIRED = object()


def _merge(args: argparse.Namespace, keys: dict) -> dict:
    """CLI flags override config-file values override built-in defaults."""
    file_cfg = read_config(args.config) if args.config else {}
    unknown = set(file_cfg) - set(keys)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    out = {}
    for key, default in keys.items():
        cli_val = getattr(args, key.replace("-", "_"), None)
        if cli_val is not None:
            out[key] = cli_val
        elif key in file_cfg:
            out[key] = file_cfg[key]
        else:
            out[key] = default
    missing = [k for k, v in out.items() if v is REQUIRED]
    if missing:
        raise ConfigError(f"missing required settings: {missing}")
    return out


def _as_bool(v) -> bool:
    return v if isinstance(v, bool) else str(v).lower() in ("1", "true", "yes")


def build_evolution(cfg: dict) -> EvolutionConfig:
    try:
        return EvolutionConfig(kind=cfg["op"], delta=float(cfg["delta"]),
                               nu=float(cfg["nu"]), n_quad=int(cfg["nquad"]),
                               c=float(cfg["c"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _problem(cfg: dict) -> Problem:
    name = cfg["problem"]
    if name not in PROBLEMS:
        raise ConfigError(f"unknown problem {name!r}; valid: {', '.join(PROBLEMS)}")
    return get_problem(name, c=float(cfg["c"]))


class Manifest:
    def __init__(self, out_dir: Path, name: str, command: str, config: dict):
        self.path = out_dir / f"{name}_manifest.json"
        self.data = {
            "command": command,
            "config": {k: str(v) for k, v in config.items()},
            "versions": {"python": platform.python_version(),
                         "numpy": np.__version__,
                         "afacoustics": __version__},
            "outputs": [],
            "summary": {},
        }
        self._t0 = time.perf_counter()

    def add_output(self, path: Path):
        self.data["outputs"].append(path.name)

    def write(self):
        self.data["wall_time_s"] = round(time.perf_counter() - self._t0, 3)
        self.path.write_text(json.dumps(self.data, indent=2, sort_keys=True))
        for name in self.data["outputs"]:
            assert (self.path.parent / name).exists()


def cmd_run(args) -> int:
    cfg = _merge(args, {
        "problem": REQUIRED, "recon": "af", "op": "eg2", "delta": 0.0,
        "nu": 0.0, "nquad": 8, "cfl": REQUIRED, "nx": REQUIRED, "ny": None,
        "tend": REQUIRED, "c": 1.0, "cweno-eps": 1.0, "out-dir": "out",
        "snapshots": "", "name": None,
    })
    problem = _problem(cfg)
    nx = int(cfg["nx"])
    ny = int(cfg["ny"]) if cfg["ny"] is not None else nx
    grid = build_grid(nx, ny, problem.extents, problem.bc)
    scheme = SchemeConfig(evolution=build_evolution(cfg), recon=cfg["recon"],
                          cfl=float(cfg["cfl"]), cweno_eps=float(cfg["cweno-eps"]))
    t_end = float(cfg["tend"])
    snaps = [float(s) for s in str(cfg["snapshots"]).split(",") if s]
    out_dir = Path(cfg["out-dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    name = cfg["name"] or f"run_{cfg['problem']}_{op_tag(scheme.evolution)}"
    manifest = Manifest(out_dir, name, "run", cfg)

    def dump(state):
        path = out_dir / f"{name}_t{state.time:g}.csv"
        write_snapshot(state, grid, path)
        manifest.add_output(path)

    final = run(problem, grid, scheme, t_end, snapshot_times=snaps,
                on_snapshot=dump)
    dump(final)
    summary = {"t_end": t_end, "max_abs": float(np.abs(final.avg).max())}
    if problem.has_exact:
        summary["l1_errors"] = l1_error(final, problem, grid)
    if cfg["problem"] == "example3":
        diag = vortex_diagnostics(final, grid)
        summary["max_speed"] = diag["max_speed"]
        path = out_dir / f"{name}_profile.csv"
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["r", "speed"])
            for r, s in diag["profile"]:
                wr.writerow([_fmt(r), _fmt(s)])
        manifest.add_output(path)
    if cfg["problem"] == "example4":
        for which in ("y0", "diag"):
            s, vals = cross_section(final, grid, which)
            path = out_dir / f"{name}_xsec_{which}.csv"
            with open(path, "w", newline="") as fh:
                wr = csv.writer(fh)
                wr.writerow(["s", "p", "u", "v"])
                for k in range(len(s)):
                    wr.writerow([_fmt(s[k]), _fmt(vals[0, k]),
                                 _fmt(vals[1, k]), _fmt(vals[2, k])])
            manifest.add_output(path)
    manifest.data["summary"] = summary
    manifest.write()
    print(f"{name}: finished at t = {t_end:g}; outputs in {out_dir}")
    return 0


def cmd_converge(args) -> int:
    cfg = _merge(args, {
        "problem": REQUIRED, "recon": "af", "op": None, "ops": None,
        "delta": 0.0, "nu": 0.0, "nquad": 8, "cfl": None, "tend": REQUIRED,
        "c": 1.0, "cweno-eps": 1.0, "resolutions": "64,128,256",
        "out-dir": "out", "name": None,
    })
    problem = _problem(cfg)
    if not problem.has_exact:
        raise ConfigError(f"{cfg['problem']} has no exact solution to converge against")
    resolutions = [int(r) for r in str(cfg["resolutions"]).split(",")]
    if cfg["ops"]:
        specs = [parse_op_spec(s, default_cfl=cfg["cfl"])
                 for s in str(cfg["ops"]).split(",")]
    else:
        if cfg["op"] is None:
            raise ConfigError("need --op or ops=... in the config")
        specs = [({"kind": cfg["op"], "delta": float(cfg["delta"]),
                   "nu": float(cfg["nu"])}, cfg["cfl"])]
    out_dir = Path(cfg["out-dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    name = cfg["name"] or f"converge_{cfg['problem']}_t{float(cfg['tend']):g}"
    manifest = Manifest(out_dir, name, "converge", cfg)

    from .scheme import convergence_study

    for kw, cfl in specs:
        if cfl is None:
            raise ConfigError(f"no CFL given for operator {kw['kind']}")
        evo = EvolutionConfig(n_quad=int(cfg["nquad"]), c=float(cfg["c"]), **kw)
        scheme = SchemeConfig(evolution=evo, recon=cfg["recon"], cfl=float(cfl),
                              cweno_eps=float(cfg["cweno-eps"]))
        report = convergence_study(problem, scheme, resolutions, float(cfg["tend"]))
        tag = op_tag(evo)
        path = out_dir / f"{name}_{tag}.csv"
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["nx", "ny", "l1_p", "l1_u", "l1_v",
                         "eoc_p", "eoc_u", "eoc_v"])
            for k, (nx, ny) in enumerate(report.resolutions):
                row = [nx, ny] + [_fmt(report.errors[v][k]) for v in "puv"]
                row += ["" if k == 0 else f"{report.orders[v][k - 1]:.4f}"
                        for v in "puv"]
                wr.writerow(row)
        manifest.add_output(path)
        print(f"[{tag} @ CFL {float(cfl):g}]")
        for k, (nx, _) in enumerate(report.resolutions):
            line = f"  {nx:4d}^2  " + "  ".join(
                f"{v}: {report.errors[v][k]:.4e}" for v in "puv")
            if k > 0:
                line += "   eoc " + "/".join(
                    f"{report.orders[v][k - 1]:.3f}" for v in "puv")
            print(line)
        manifest.data["summary"][tag] = {
            "errors_p": report.errors["p"], "errors_u": report.errors["u"],
            "errors_v": report.errors["v"], "eoc_p": report.orders["p"]}
    manifest.write()
    return 0


def cmd_stability(args) -> int:
    cfg = _merge(args, {
        "op": REQUIRED, "deltas": "", "nus": "", "nquad": 8, "c": 1.0,
        "m": 20, "cfl-lo": 0.05, "cfl-hi": 0.8, "tol": 5e-4,
        "out-dir": "out", "name": None,
    })
    if cfg["op"] not in KINDS:
        raise ConfigError(f"unknown operator {cfg['op']!r}; valid kinds: {', '.join(KINDS)}")
    deltas = [float(d) for d in str(cfg["deltas"]).split(",") if d] or [0.0]
    nus = [float(n) for n in str(cfg["nus"]).split(",") if n] or [0.0]
    m = int(cfg["m"])
    out_dir = Path(cfg["out-dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    name = cfg["name"] or f"stability_{cfg['op']}"
    manifest = Manifest(out_dir, name, "stability", cfg)
    path = out_dir / f"{name}_cfl.csv"
    rows = []
    for delta in deltas:
        for nu in nus:
            def make(cfl, _d=delta, _n=nu):
                evo = EvolutionConfig(kind=cfg["op"], delta=_d, nu=_n,
                                      n_quad=int(cfg["nquad"]), c=float(cfg["c"]))
                return SchemeConfig(evolution=evo, cfl=cfl)
            star = max_cfl(make, m, float(cfg["cfl-lo"]), float(cfg["cfl-hi"]),
                           tol=float(cfg["tol"]))
            rows.append((cfg["op"], delta, nu, star))
            print(f"{cfg['op']} delta={delta:g} nu={nu:g}: max CFL = {star:.4f}")
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["operator", "delta", "nu", "cfl_max"])
        for row in rows:
            wr.writerow([row[0], f"{row[1]:g}", f"{row[2]:g}", f"{row[3]:.6f}"])
    manifest.add_output(path)
    manifest.data["summary"]["cfl_max"] = {
        f"{r[0]}:{r[1]:g}:{r[2]:g}": r[3] for r in rows}
    manifest.write()
    return 0


def cmd_eigs(args) -> int:
    cfg = _merge(args, {
        "op": REQUIRED, "delta": 0.0, "nu": 0.0, "nquad": 8, "c": 1.0,
        "cfl": REQUIRED, "m": 20, "dense": False, "out-dir": "out",
        "name": None,
    })
    evo = build_evolution(cfg)
    scheme = SchemeConfig(evolution=evo, cfl=float(cfg["cfl"]))
    m = int(cfg["m"])
    out_dir = Path(cfg["out-dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    name = cfg["name"] or f"eigs_{op_tag(evo)}_cfl{float(cfg['cfl']):g}"
    manifest = Manifest(out_dir, name, "eigs", cfg)
    if _as_bool(cfg["dense"]):
        eig = eigenvalues(assemble_B(scheme, m))
        rho = float(np.abs(eig).max())
    else:
        rep = analyze(scheme, m)
        eig, rho = rep.eigenvalues, rep.spectral_radius
    path = out_dir / f"{name}_eigs.csv"
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["re", "im"])
        for lam in eig:
            wr.writerow([_fmt(lam.real), _fmt(lam.imag)])
    manifest.add_output(path)
    manifest.data["summary"] = {"spectral_radius": rho,
                                "stable": bool(rho <= 1 + 1e-9)}
    manifest.write()
    print(f"{name}: rho = {rho:.12f} ({'stable' if rho <= 1 + 1e-9 else 'unstable'})")
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="afac",
        description="Third-order Active Flux solver for 2D linear acoustics")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value configuration file")
        p.add_argument("--out-dir", dest="out_dir")
        p.add_argument("--name")
        p.add_argument("--c", type=float)
        p.add_argument("--nquad", type=int)
        p.add_argument("--cweno-eps", dest="cweno_eps", type=float)

    p = sub.add_parser("run", help="single simulation with snapshot dumps")
    common(p)
    p.add_argument("--problem")
    p.add_argument("--recon", choices=("af", "cweno"))
    p.add_argument("--op")
    p.add_argument("--delta", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--cfl", type=float)
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--tend", type=float)
    p.add_argument("--snapshots")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("converge", help="L1 error / EOC table over resolutions")
    common(p)
    p.add_argument("--problem")
    p.add_argument("--recon", choices=("af", "cweno"))
    p.add_argument("--op")
    p.add_argument("--ops", help="comma list of kind[:delta[:nu]]@cfl specs")
    p.add_argument("--delta", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--cfl", type=float)
    p.add_argument("--tend", type=float)
    p.add_argument("--resolutions")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("stability", help="max admissible CFL by bisection")
    common(p)
    p.add_argument("--op")
    p.add_argument("--deltas", help="comma list of delta values")
    p.add_argument("--nus", help="comma list of nu values")
    p.add_argument("--m", type=int)
    p.add_argument("--cfl-lo", dest="cfl_lo", type=float)
    p.add_argument("--cfl-hi", dest="cfl_hi", type=float)
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("eigs", help="eigenvalue cloud of the update matrix")
    common(p)
    p.add_argument("--op")
    p.add_argument("--delta", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--cfl", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--dense", action="store_true", default=None,
                   help="dense LAPACK eigensolve instead of the symbol path")
    p.set_defaults(func=cmd_eigs)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return 3
    except BracketError as exc:
        print(f"bracket error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
