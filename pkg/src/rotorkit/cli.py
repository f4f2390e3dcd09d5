"""Command-line entry point: rotorkit {run,list,optimize,accumulate,focal}."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ExperimentConfig
from .errors import ConfigError, RotorError
from .pulses import PulseEnvelope
from .runner import run
from .scenarios import CATALOG, list_scenarios

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _config_for_run(args) -> ExperimentConfig:
    if args.config and args.scenario:
        raise ConfigError("give either a config file or --scenario, not both")
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}") from None
        cfg = ExperimentConfig.from_json(text)
    elif args.scenario:
        if args.scenario not in CATALOG:
            raise ConfigError(f"scenario: unknown {args.scenario!r}; see `rotorkit list`")
        cfg = CATALOG[args.scenario].config()
    else:
        raise ConfigError("nothing to run: pass a config file or --scenario")
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _print_file(manifest, name: str):
    path = Path(manifest.output_dir) / name
    if path.exists():
        sys.stdout.write(path.read_text())


def cmd_run(args) -> int:
    cfg = _config_for_run(args)
    manifest = run(cfg, args.output)
    print(manifest.to_json())
    return EXIT_OK


def cmd_list(args) -> int:
    items = list_scenarios()
    if args.json:
        print(json.dumps([{"name": s.name, "engine": s.engine, "description": s.description, "config": s.config().to_dict()} for s in items], indent=2))
    else:
        for s in items:
            print(f"{s.name:14s} {s.engine:12s} {s.description}")
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = ExperimentConfig(
        scenario="optimize",
        engine="classical2d",
        P=args.P,
        n_kicks=args.kicks,
        temperatures=[args.temperature],
        restarts=args.restarts,
        maxfev=args.maxfev,
        seed=args.seed,
        n_particles=args.particles,
        output_dir=f"rotorkit-out/optimize-n{args.kicks}",
    )
    manifest = run(cfg, args.output)
    _print_file(manifest, "result.json")
    return EXIT_OK


def cmd_accumulate(args) -> int:
    cfg = ExperimentConfig(
        scenario="accumulate",
        engine=args.engine,
        P=args.P,
        n_kicks=args.kicks,
        temperatures=args.temperature or [0.0],
        n_particles=args.particles,
        seed=args.seed,
        basis=args.basis,
        grid=args.grid,
        revival_shift=args.revival_shift,
        output_dir=f"rotorkit-out/accumulate-{args.engine}",
    )
    manifest = run(cfg, args.output)
    _print_file(manifest, "trace.csv")
    return EXIT_OK


def _focal_window(pulse: PulseEnvelope, tau0, tau_end) -> list[float]:
    if tau_end is None:
        if tau0 is not None:
            raise ConfigError("--tau0 needs --tau-end")
        return []
    if tau0 is None:
        tau0 = (pulse.support() or (0.0, 0.0))[0]
    return [tau0, tau_end]


def cmd_focal(args) -> int:
    if args.pulse == "gaussian":
        pulse = PulseEnvelope.gaussian(args.amplitude, args.width, args.center)
    elif args.pulse == "delta":
        pulse = PulseEnvelope.delta(args.amplitude, args.center)
    else:
        pulse = PulseEnvelope.step(args.amplitude, args.width, args.center)
    cfg = ExperimentConfig(
        scenario="focal",
        engine=args.engine,
        pulse=pulse.to_dict(),
        tau_range=_focal_window(pulse, args.tau0, args.tau_end),
        output_dir="rotorkit-out/focal",
    )
    manifest = run(cfg, args.output)
    _print_file(manifest, "focal.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rotorkit", description="Kicked-rotor focusing and squeezing toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a config file or a built-in scenario")
    r.add_argument("config", nargs="?", help="JSON config file")
    r.add_argument("--scenario", help="built-in scenario name, e.g. figure:1b")
    r.add_argument("--seed", type=int)
    r.add_argument("--output", help="output directory")
    r.set_defaults(func=cmd_run)

    ls = sub.add_parser("list", help="list built-in scenarios")
    ls.add_argument("--json", action="store_true", help="print default configs as JSON")
    ls.set_defaults(func=cmd_list)

    o = sub.add_parser("optimize", help="optimize delays between identical kicks")
    o.add_argument("--kicks", type=int, required=True)
    o.add_argument("--temperature", type=float, default=0.0, help="sigma_omega of the thermal spread")
    o.add_argument("--restarts", type=int, default=20)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--P", type=float, default=1.0)
    o.add_argument("--maxfev", type=int, default=3000)
    o.add_argument("--particles", type=int, default=100_000)
    o.add_argument("--output")
    o.set_defaults(func=cmd_optimize)

    a = sub.add_parser("accumulate", help="kick at each successive minimum of O")
    a.add_argument("--engine", choices=["quantum2d", "classical2d"], default="quantum2d")
    a.add_argument("--P", type=float, required=True)
    a.add_argument("--kicks", type=int, required=True)
    a.add_argument("--temperature", type=float, action="append", help="repeat for several temperatures")
    a.add_argument("--particles", type=int, default=20_000)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--basis", type=int)
    a.add_argument("--grid", type=int, default=4096)
    a.add_argument("--revival-shift", action="store_true")
    a.add_argument("--output")
    a.set_defaults(func=cmd_accumulate)

    f = sub.add_parser("focal", help="focal times from the linearized equation")
    f.add_argument("--pulse", choices=["gaussian", "delta", "step"], default="gaussian")
    f.add_argument("--amplitude", type=float, required=True)
    f.add_argument("--width", type=float, default=0.0)
    f.add_argument("--center", type=float, default=0.0)
    f.add_argument("--tau0", type=float, default=None)
    f.add_argument("--tau-end", type=float, default=None)
    f.add_argument("--engine", choices=["quantum2d", "classical2d", "classical3d", "quantum3d"], default="quantum3d")
    f.add_argument("--output")
    f.set_defaults(func=cmd_focal)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as e:
        # Engine-level argument checks (e.g. a malformed pulse) are config problems too.
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except RotorError as e:
        print(f"numerical error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
