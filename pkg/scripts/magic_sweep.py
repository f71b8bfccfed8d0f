"""Measures of magic along the line from the maximally mixed state to |T><T|.

Writes the sweep table as CSV and, if matplotlib is importable, a plot.

    python3 scripts/magic_sweep.py --n 1 --points 41 --out results/magic_sweep_n1
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass
from pathlib import Path

from resource_gauges import cli
from resource_gauges.measures import SolverConfig
from resource_gauges.theories import MagicQubits


@dataclass
class SweepConfig:
    n: int = 1
    points: int = 21
    out: Path = Path("results/magic_sweep")
    plot: bool = True


def run(cfg: SweepConfig) -> Path:
    spec = cli.SweepSpec.magic_t_mix(cfg.n, cfg.points)
    t0 = time.perf_counter()
    rows = cli.run_sweep(spec, MagicQubits(cfg.n), SolverConfig())
    print(f"{cfg.points} points, {time.perf_counter() - t0:.1f}s")
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    table = cfg.out.with_suffix(".csv")
    table.write_text(cli.sweep_csv(spec, rows))
    print(f"wrote {table}")
    if cfg.plot:
        try:
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            return table
        fig, ax = plt.subplots(figsize=(6, 4))
        alphas = [r[0] for r in rows]
        for j, name in enumerate(spec.measure_names, start=1):
            ax.plot(alphas, [r[j] for r in rows], label=name)
        ax.set_xlabel("alpha")
        ax.set_ylabel("value")
        ax.set_title(f"(1 - alpha) I/d + alpha |T><T|, n = {cfg.n}")
        ax.legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(cfg.out.with_suffix(".png"), dpi=150)
        print(f"wrote {cfg.out.with_suffix('.png')}")
    return table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--points", type=int, default=21)
    ap.add_argument("--out", type=Path, default=Path("results/magic_sweep"))
    ap.add_argument("--no-plot", action="store_true")
    a = ap.parse_args()
    run(SweepConfig(a.n, a.points, a.out, not a.no_plot))


if __name__ == "__main__":
    main()
