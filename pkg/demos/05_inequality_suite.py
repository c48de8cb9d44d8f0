"""Run one bound-checking scenario through the library and print the report.

The same pipeline backs the command line (`spectralab run/verify`); here the
reports are inspected in memory.  Every inequality is evaluated with its
raw left/right-hand sides so the margins are visible, not just verdicts.
"""

from collections import defaultdict

from spectralab import run_scenario
from spectralab.reporting import parse_config

CONFIG = """
scenario.name = hemisphere_demo
chart.id = stereographic_sphere
chart.params = 1.0
eta.kind = radial_quadratic
eta.params = 0.2
tensor.kind = metric
mesh.resolutions = 8 16
eigen.k_max = 9
checks = all
appendix.c = 1 2
constants.resolution = 32
"""

run = run_scenario(parse_config(CONFIG), write=False)
print(f"exit code: {run.exit_code} "
      f"({sum(1 for r in run.reports if not r.skipped)} checks evaluated)\n")

worst = defaultdict(lambda: (0.0, None))
for report in run.reports:
    if report.skipped or report.rhs <= 0:
        continue
    if report.ratio > worst[report.name][0]:
        worst[report.name] = (report.ratio, report)

print(f"{'check':<34s} {'tightest ratio':>14s} {'at k':>4s} {'holds':>6s}")
for name in sorted(worst):
    ratio, report = worst[name]
    print(f"{name:<34s} {ratio:>14.4f} {report.k:>4d} {str(report.holds):>6s}")
