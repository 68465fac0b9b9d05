"""Verify the operator inequalities K_{ax} >= s T_{ax} + t_{ax} I behind the
analytic bound.

For each angle theta the dephasing channel coefficient follows its closed
rule, the shifts (t0, t1) are the largest values keeping all four operators
positive semidefinite, and the smallest eigenvalue margin is checked to be
nonnegative across a dense sweep. The intercept t = min_theta (t0 + t1)
equals (2 - sqrt(2))/2, attained at the corner angles 0 and pi/4.
"""

import math

from steerbound import inequality_margin, t_constraints
from steerbound.selftest import (
    S_OPTIMAL,
    T_OPTIMAL,
    dephasing_coefficient,
    theta_grid,
)


def main():
    print(f"s = (1+sqrt(2))/4 = {S_OPTIMAL:.9f}")
    worst = (math.inf, 0.0)
    t_min = (math.inf, 0.0)
    for theta in theta_grid(20_000):
        theta = float(theta)
        t0, t1 = t_constraints(S_OPTIMAL, theta)
        c = dephasing_coefficient(theta, S_OPTIMAL)
        margin = inequality_margin(S_OPTIMAL, t0, t1, theta, c)
        if margin < worst[0]:
            worst = (margin, theta)
        if t0 + t1 < t_min[0]:
            t_min = (t0 + t1, theta)

    print(f"worst eigenvalue margin : {worst[0]:.3e} at theta = {worst[1]:.6f}")
    print(f"intercept t             : {t_min[0]:.9f} at theta = {t_min[1]:.6f}")
    print(f"closed form (2-sqrt2)/2 : {T_OPTIMAL:.9f}")
    print(f"boundary pi/4           : {math.pi / 4:.6f}")

    status = "verified" if worst[0] >= -1e-10 else "FAILED"
    print(f"\noperator inequality {status} on a 20000-point sweep")


if __name__ == "__main__":
    main()
