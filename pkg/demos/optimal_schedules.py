"""
Optimal offline schedules on a multi-option menu
================================================

The offline optimum OPT(t) is a small dynamic program.  Its budgeted
variant BOPT(v) covers as many days as a budget allows; both algorithms
are built from these two pieces.
"""

from fractions import Fraction

from skirent import INF, Instance, bopt, build_opt_table, options_from_pairs

# a day pass, a weekly pass, a monthly pass and buying outright
menu = Instance(options_from_pairs([(1, 1), (7, 5), (30, 18), (INF, 60)]), horizon=120)
table = build_opt_table(menu)

for t in (1, 6, 7, 20, 30, 95, 120):
    sched = table.schedule(t)
    names = [("buy" if menu.options[i].duration == INF else f"{menu.options[i].duration}d")
             for i in sched.options]
    print(f"OPT({t:3d}) = {table.value(t)!s:>3}  via {names}")

# first day on which buying outright is (one of) the cheapest ways
break_even = next(t for t in range(1, menu.horizon + 1) if table.value(t) == table.buy_cost)
print("buying is optimal from day", break_even)

# the budgeted variant: largest t with OPTVAL(t) <= budget
for budget in (Fraction(9, 2), 17, 40, 60):
    sched = bopt(table, budget)
    print(f"BOPT({budget}) covers {sched.covered_days} days for {sched.total_cost}")
