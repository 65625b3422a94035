"""Run ``wavepatterns verify`` on every scenario in scenarios/ and summarize.

    python scripts/run_references.py --out out/references
"""
import argparse
import pathlib
import sys

from wavepatterns import cli

ROOT = pathlib.Path(__file__).resolve().parents[1]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--out", default="out/references")
    p.add_argument("--override", action="append", default=[])
    args = p.parse_args(argv)
    codes = {}
    for path in sorted((ROOT / "scenarios").glob("*.yaml")):
        print(f"== {path.stem}")
        extra = [a for o in args.override for a in ("--override", o)]
        codes[path.stem] = cli.main(["verify", "--scenario", str(path),
                                     "--out", str(pathlib.Path(args.out) / path.stem), *extra])
    for name, code in codes.items():
        print(f"{name}: exit {code}")
    return max(codes.values(), default=0)


if __name__ == "__main__":
    sys.exit(main())
