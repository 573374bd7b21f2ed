"""Six frequencies from five samples per channel.

With the amplitude of every sinusoid shared across channels, the SLRA can
identify more frequencies than there are samples. The half-dimension ``n``
is grown until the recovered Toeplitz matrix drops rank, then root-MUSIC
reads the frequencies off it. ANM on the same data cannot get past N - 1.
"""

import numpy as np

from caspectral import (
    SpectralModel,
    anm_solve,
    estimate_rank,
    identifiability_sweep,
    matched_rmse,
    synthesize,
    uniform_frequencies,
)
from caspectral.signals import Observation

N, L, K = 5, 100, 6
rng = np.random.default_rng(3)
f_true = uniform_frequencies(K)
model = SpectralModel(f_true, rng.uniform(0.5, 1.5, K), rng.uniform(0, 2 * np.pi, (K, L)), N)
X = synthesize(model)

est, results = identifiability_sweep(X, full_output=True)
for res in results:
    print(f"n={res.n}: rank(T t) = {estimate_rank(res.t)}, iterations {res.iterations}")
print("true     ", np.round(f_true, 6))
print("estimated", np.round(est.frequencies, 6))
print(f"matched RMSE {matched_rmse(est.frequencies, f_true):.2e}")
# the Toeplitz powers of the decomposition are the amplitudes b_k
order = np.argsort(f_true)
print("amplitudes", np.round(model.amplitudes[order], 4))
print("powers    ", np.round(est.powers, 4))

anm = anm_solve(Observation(np.arange(1, N + 1), X, N))
print(f"ANM: rank(T t) = {estimate_rank(anm.t)} of {N}, so no Vandermonde decomposition")
