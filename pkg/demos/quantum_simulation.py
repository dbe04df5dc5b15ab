"""
Simulating the k-query algorithm
================================

The state after the queries lives on R_k, so it is simulated directly in
that basis. Measuring in the Fourier basis recovers the secret with
probability |R_k| / q^J, whatever the secret is.
"""
import numpy as np

from polyquery import ff_make, enumerate_range
from polyquery import qsim

f = ff_make(5)
rs = enumerate_range(f, 2, 2, 2)
secret = np.array([1, 4, 0, 2, 3, 3])

state = qsim.prepare_state(rs)
state = qsim.apply_phase_queries(state, secret)
print("state norm:", state.norm)
print("P(correct) simulated:", qsim.measure_fourier(state, secret))
print("P(correct) exact:    ", qsim.success_prob_formula(rs), float(qsim.success_prob_formula(rs)))

# the same number for every secret
report = qsim.simulate(rs, rng=1)
print("spread over", report["secrets_tested"], "secrets:", report["c_independence_maxdev"])

# no algorithm does better: the post-query states span at most |R_k| dimensions
for k in (1, 2):
    rank, bound = qsim.gram_rank_bound(ff_make(2), 2, 1, k)
    print(f"q=2 n=2 d=1 k={k}: Gram rank {rank}, |R_k| = {bound}")
