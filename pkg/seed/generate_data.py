"""Synthetic instance generator: random frameworks and reduced 3-CNFs."""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from reduction.af import to_apx  # noqa: E402
from reduction.hardness import random_af, random_threecnf, threesat_to_af  # noqa: E402

TIERS = {
    "dev": 10,
    "functional": 100,
    "performance": 1000,
}
MAX_VARS = 8


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Generate synthetic argumentation instances")
    parser.add_argument("tier", choices=TIERS.keys())
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--arguments", type=int, default=8, help="Arguments per random framework")
    parser.add_argument("--density", type=float, default=0.25, help="Attack probability per ordered pair")
    parser.add_argument(
        "--output",
        type=Path,
        default=Path("seed/output"),
        help="Directory where instance files will be written",
    )
    return parser.parse_args()


def main() -> None:
    args = parse_args()
    count = TIERS[args.tier]
    output_dir = args.output / args.tier
    output_dir.mkdir(parents=True, exist_ok=True)

    manifest_path = output_dir / "manifest.csv"
    with manifest_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["file", "kind", "arguments", "attacks", "seed"])
        for index in range(count):
            seed = args.seed + index
            af = random_af(args.arguments, args.density, seed)
            name = f"random_{index:04d}.apx"
            (output_dir / name).write_text(to_apx(af))
            writer.writerow([name, "random", af.n, len(af.attacks), seed])

            num_vars = 1 + index % MAX_VARS
            phi = random_threecnf(num_vars, 2 * num_vars, seed)
            cnf_name = f"phi_{index:04d}.cnf"
            lines = [f"p cnf {phi.num_vars} {len(phi.clauses)}"]
            lines += [" ".join([*map(str, clause), "0"]) for clause in phi.clauses]
            (output_dir / cnf_name).write_text("\n".join(lines) + "\n")
            writer.writerow([cnf_name, "3cnf", phi.num_vars, len(phi.clauses), seed])

            reduced, _ = threesat_to_af(phi)
            reduced_name = f"phi_{index:04d}.apx"
            (output_dir / reduced_name).write_text(to_apx(reduced))
            writer.writerow([reduced_name, "reduced", reduced.n, len(reduced.attacks), seed])

    print(f"Generated {count} instance groups in {output_dir}")


if __name__ == "__main__":
    main()
