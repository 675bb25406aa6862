"""``hk`` command line driver.

Exit codes: 0 on success, 2 on a configuration error, 3 on a numerical
failure (non-finite states, boundary mass, singular frames and so on).
"""

import argparse
import sys
from pathlib import Path

from . import experiments as ex
from .config import load_config
from .errors import ConfigError, HKError
from .flow import integrate_nodes
from .io import write_trajectories, write_wavefunction

COMMANDS = {
    "identity": ex.run_identity,
    "propagate": ex.run_propagate,
    "converge": ex.run_converge,
    "compare": ex.run_compare,
    "reference": ex.run_reference,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="hk", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="flat JSON run configuration")
    parser.add_argument("--out", default=".", help="output directory for CSV/JSON files")
    parser.add_argument("--threads", type=int, default=None, help="worker threads (overrides config)")
    return parser


def _eps_tag(eps):
    return f"{eps:g}".replace(".", "p")


def run(command, config, out, threads=None):
    cfg = load_config(config)
    if threads is not None:
        cfg.threads = threads
        cfg = load_config(cfg)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    outputs = {}
    if command in ("propagate", "reference"):
        table = COMMANDS[command](cfg, outputs=outputs)
    else:
        table = COMMANDS[command](cfg)
    table.write_csv(out / f"{command}.csv")
    if table.summary:
        ex.write_summary(table, out / f"{command}_summary.json")
    for eps, (setup, psi, _) in outputs.items():
        name = cfg.method if command == "propagate" else "reference"
        write_wavefunction(psi, out / f"psi_{name}_eps{_eps_tag(eps)}.csv")
        if cfg.dump_trajectories and setup.grid.dim == 1:
            q, p = setup.grid.nodes()
            bundle = integrate_nodes(setup.model, q, p, setup.t_final, cfg.dt, store_stride=10)
            write_trajectories(bundle, out / f"trajectories_eps{_eps_tag(eps)}.csv")
    return table


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        table = run(args.command, args.config, args.out, args.threads)
    except ConfigError as exc:
        print(f"hk: configuration error: {exc}", file=sys.stderr)
        return 2
    except (HKError, ArithmeticError, FloatingPointError) as exc:
        print(f"hk: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    for row in table.sorted_rows():
        print(",".join(row.as_list()))
    return 0


if __name__ == "__main__":
    sys.exit(main())
