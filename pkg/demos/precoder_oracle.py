"""Closed-form MF/ZF metrics next to a link-level simulation of the same channel."""
import numpy as np

from mimodeploy import precoding as pc
from mimodeploy import channel as ch

rng = np.random.default_rng(7)
M, K = 64, 4
z = rng.standard_normal((M, K, 2))
G = (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2)
cfg = pc.TransmitConfig.from_db(10.0, K, M)
eye = ch.CorrelationMatrix.identity(M)
P = [ch.error_covariance(np.array([1.0]), eye) for _ in range(K)]

mf = pc.mf_expected_sinr(G, P, 1.0, cfg).values
zf = pc.zf_expected_snr(pc.zf_normalization(G), P, 1.0, cfg).values
mf_sim = pc.empirical_sinr_oracle(G, G, "mf", cfg, 20_000, rng).values
zf_sim = pc.empirical_sinr_oracle(G, G, "zf", cfg, 20_000, rng).values

print("user   MF formula  MF simulated   ZF formula  ZF simulated   (dB)")
for i in range(K):
    print(f"{i:4d}   {mf[i]:10.3f}  {mf_sim[i]:12.3f}   {zf[i]:10.3f}  {zf_sim[i]:12.3f}")

# perfect CSI: ZF leaves no cross-user leakage at all
d, leak, noise = pc.link_powers(G, G, "zf", cfg, 2000, rng)
print("\nZF interference / desired:", (leak / d).max())

# imperfect CSI costs ZF far more than MF at this SNR
for xi in (1.0, 0.9, 0.7):
    Ghat = xi * G + np.sqrt(1 - xi ** 2) * (rng.standard_normal((M, K))
                                             + 1j * rng.standard_normal((M, K))) / np.sqrt(2)
    a = pc.mf_expected_sinr(Ghat, P, xi, cfg).values.mean()
    b = pc.zf_expected_snr(pc.zf_normalization(Ghat), P, xi, cfg).values.mean()
    print(f"xi={xi:.1f}: mean MF {a:6.2f} dB, mean ZF {b:6.2f} dB")
