# Sub-Gaussian tails, twice: the bounded-difference tail of a single
# composed statistic against exp(-2 t^2 / swing), and the swapped-coordinate
# process tail of a member pair against exp(-s^2 / (8 (L^2 + M^2) d^2)).

import numpy as np

from unibound import (
    bounded_difference_tail,
    closed_form_constants,
    finite_space,
    iid_law,
    lookup_member,
    mean_statistic,
    random_lookup_class,
    sample,
    sample_variance_statistic,
    squared_swing_sum,
    stream,
    swap_process_probe,
    uniform_on,
)

bits = finite_space([("0", 0.0), ("1", 1.0)])

# mean of 25 fair bits: one-coordinate changes move the mean by exactly 1/25,
# so the swing sum is 1/25 for every sample point
n = 25
law = iid_law(uniform_on(bits), n)
member = lookup_member("id", bits, {"0": 0.0, "1": 1.0})
stat = mean_statistic(n)
swing = squared_swing_sum(stat, member, bits, seed=1)
print(f"swing sum of the mean on bits: {swing.sup_norm:.6f} "
      f"({'exact' if swing.sup_is_exact else 'sampled lower bound'})")

tail = bounded_difference_tail(law, stat, member, np.linspace(0.0, 0.45, 10), 100_000, seed=2)
print(f"expected value {tail.expected_value:.4f}")
print(f"{'t':>6s} {'empirical':>10s} {'bound':>10s}")
for i, t in enumerate(tail.t_grid):
    print(f"{t:6.2f} {tail.empirical[i]:10.5f} {tail.bound[i]:10.5f}")
print("violations beyond 4 binomial stderr:", int(tail.violations.sum()))

# swapped-coordinate process for the variance on a 5-point support
space = finite_space([(str(j), j / 4.0) for j in range(5)])
law10 = iid_law(uniform_on(space), 10)
fc = random_lookup_class(space, 8, seed=3)
variance = sample_variance_statistic(10)
constants = closed_form_constants(variance)
x = sample(law10, stream(4, "x"))
x_alt = sample(law10, stream(4, "x-alt"))
probe = swap_process_probe(
    x, x_alt, fc.members[0], fc.members[1], variance, constants,
    np.linspace(0.02, 0.3, 8), draws=100_000, seed=5,
)
print(f"\nprocess probe for members ({probe.f_label}, {probe.g_label})")
print(f"image distance d = {probe.distance:.4f}")
print(f"process mean {probe.process_mean:.2e} (4 stderr {4 * probe.process_stderr:.2e}) "
      f"-> zero-mean {'ok' if probe.zero_mean_ok else 'VIOLATED'}")
print(f"{'s':>6s} {'empirical':>10s} {'bound':>10s}")
for i, s in enumerate(probe.s_grid):
    print(f"{s:6.2f} {probe.empirical[i]:10.5f} {probe.bound[i]:10.5f}")
print("tail violations:", int(probe.violations.sum()))
