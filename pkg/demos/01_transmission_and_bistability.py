# %% [markdown]
# # Transmission of a driven Kerr resonator
#
# A resonator with a Kerr nonlinearity pulls its own resonance towards lower
# frequency as photons accumulate. Below the critical reduced drive the
# transmission dip just leans over; beyond it the steady state has three
# roots and the measured curve depends on the sweep direction.

# %%
import numpy as np
from _plotting import plt, save

from kerrkit.resonator import (
    XI_CRIT,
    ResonatorParams,
    frequency_grid,
    photon_roots,
    power_for_xi,
    simulate_trace,
)

device = ResonatorParams.from_quality(95.1e9, 2e4, 2.901e4, 0.3, -1210.0)
print(f"f0 = {device.f0_hz / 1e9:.3f} GHz, Q = {device.q_loaded:.0f}, linewidth = {device.linewidth_hz / 1e6:.3f} MHz")
print(f"critical reduced drive xi_c = {XI_CRIT:.6f}")

# %% [markdown]
# ## A power ladder
#
# `power_for_xi` converts a reduced drive into incident power. The dip
# minimum moves down in frequency as the drive grows.

# %%
f = frequency_grid(device, 8, 4001)
ladder = {}
for frac in (0.0, 0.5, 0.9, 1.5):
    xi = frac * XI_CRIT
    p_in = power_for_xi(device, xi) if frac else 0.0
    up = simulate_trace(device, f, p_in, sweep_direction="up")
    down = simulate_trace(device, f, p_in, sweep_direction="down")
    ladder[frac] = (up, down)
    f_min = f[np.argmin(np.abs(up.s21))]
    gap = np.max(np.abs(up.s21 - down.s21))
    print(f"xi/xi_c = {frac:3.1f}  dip at {(f_min - device.f0_hz) / device.linewidth_hz:+.3f} linewidths, "
          f"max |up - down| = {gap:.3f}")

# %% [markdown]
# Only the last rung exceeds the threshold, and only there do the two sweep
# directions disagree. Inside that hysteresis window the cubic has three
# positive roots; the middle one is unstable.

# %%
delta = np.linspace(-1.6, -0.6, 6)
n, count = photon_roots(delta, np.full_like(delta, 1.5 * XI_CRIT))
for d, c, row in zip(delta, count, n):
    print(f"delta = {d:+.1f}: {c} root(s)  {np.round(row[:c], 4)}")

# %%
if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    x = (f - device.f0_hz) / device.linewidth_hz
    for frac, (up, down) in ladder.items():
        (line,) = ax.plot(x, np.abs(up.s21), label=f"xi/xi_c = {frac}")
        if frac > 1:
            ax.plot(x, np.abs(down.s21), "--", color=line.get_color(), label="downward sweep")
    ax.set_xlabel("detuning (linewidths)")
    ax.set_ylabel("|S21|")
    ax.legend()
    save(fig, "transmission_ladder.png")
