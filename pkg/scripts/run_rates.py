"""Run one or more rate configs and print the fitted log-log slopes.

    python3 scripts/run_rates.py scripts/configs/*.json
"""

import argparse
import sys
from pathlib import Path

from gammachaos import experiments


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("configs", nargs="+")
    ap.add_argument("--outdir", default=None, help="override the directory of output.path")
    args = ap.parse_args(argv)
    for path in args.configs:
        cfg = experiments.ExperimentConfig.from_json(path)
        report = experiments.run(cfg)
        print(f"== {path} ({cfg.family}, nu = {cfg.nu:g})")
        for s in report.series:
            slope = "n/a" if s.fit is None else f"{s.fit.slope:+.4f} (r2 {s.fit.r_squared:.6f})"
            print(f"  {s.metric:<24} slope {slope}   last {s.points[-1][1]:.6g}")
        if cfg.output_path:
            base = Path(cfg.output_path)
            if args.outdir:
                base = Path(args.outdir) / base.name
            base.parent.mkdir(parents=True, exist_ok=True)
            for fmt in cfg.formats:
                experiments.emit(report, fmt, base.with_suffix("." + fmt))
    return 0


if __name__ == "__main__":
    sys.exit(main())
