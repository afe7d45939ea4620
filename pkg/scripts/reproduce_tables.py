"""
Desk-scale reproduction of both simulation tables.
Writes table1/table2 CSV and JSON files into an output directory.
"""

import sys
from pathlib import Path

# Add parent directory to path to import foldkit modules
sys.path.append(str(Path(__file__).parent.parent))

from foldkit.cli.commands import cmd_bench
from foldkit.config import settings
from foldkit.core.exceptions import FoldkitError


def print_cells(report):
    """Print the mean distance of every cell, one p block at a time."""
    frame = report.to_frame("mean")
    for p in report.p_list:
        block = frame[frame["p"] == p].drop(columns="p")
        print(f"\n📊 pL = pR = {p}")
        print(block.to_string(index=False, float_format=lambda v: f"{v:.3f}"))


def main():
    """Run table 1 and table 2 with the default grid."""
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("results")
    replications = int(sys.argv[2]) if len(sys.argv) > 2 else 100

    print("=" * 60)
    print("🚀 foldkit - Simulation Tables")
    print("=" * 60)
    print(f"\nOutput: {out_dir}")
    print(f"Replications per cell: {replications}")
    print(f"Workers: {settings.n_jobs} (set FOLDKIT_N_JOBS to change)\n")

    for table in (1, 2):
        print(f"🧠 Table {table}...")
        try:
            report = cmd_bench(table, replications, seed=table, out_dir=str(out_dir))
        except FoldkitError as e:
            print(f"❌ Table {table} failed: {e}")
            sys.exit(e.exit_code)
        print_cells(report)
        flagged = [c for c in report.cells if c.flagged]
        if flagged:
            print(f"\n⚠️  {len(flagged)} cells had more than 1% failed replications")

    print("\n" + "=" * 60)
    print("✅ Tables written!")
    print("=" * 60)


if __name__ == "__main__":
    main()
