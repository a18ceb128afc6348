# %% [markdown]
# # Temperature dependence and film materials
#
# Thermal quasiparticles add conduction loss and shift the resonance down as
# the temperature rises. The film's critical temperature and sheet
# resistance set both its gap and its kinetic inductance.

# %%
from importlib.resources import files

import numpy as np
from _plotting import plt, save

from kerrkit.bcs import BcsParams, mattis_bardeen, temperature_sweep
from kerrkit.materials import NBN_UNIVERSAL, fit_universal, load_films, sheet_inductance, universal_tc

params = BcsParams(tc_k=13.5, alpha=0.9, q_i_max=3e4, f0_hz=95.1e9)

# %% [markdown]
# ## Quality factor and frequency versus temperature
#
# At low temperature the ceiling `q_i_max` dominates; above roughly a fifth
# of Tc the conduction loss takes over.

# %%
temps = np.linspace(0.02, 0.5, 13) * params.tc_k
sweep = temperature_sweep(params, temps)
print(" T (K)      Qi      f0(T)/f0(0)")
for t, q, r in zip(temps, sweep["qi"], sweep["f0_ratio"]):
    print(f"{t:6.2f}  {q:9.0f}  {r:.8f}")

s = mattis_bardeen(0.3 * params.tc_k, params.f0_hz, params.tc_k)
print(f"sigma2/sigma1 at 0.3 Tc: {s.ratio:.3e}")

# %% [markdown]
# ## Film table and the universal relation
#
# The bundled table lists thickness, Tc and normal-state resistivity. A
# power law in sheet resistance captures how Tc drops as films get thinner.

# %%
films = load_films(files("kerrkit") / "data" / "nbn_films.csv")
fit = fit_universal(films)
print(f"fitted A = {fit.a_coeff:.0f} +/- {fit.a_err:.0f}, B = {fit.b_exp:.3f} +/- {fit.b_err:.3f}")
print(f"reference A = {NBN_UNIVERSAL.a_coeff:.0f}, B = {NBN_UNIVERSAL.b_exp:.3f}")
for film in films[:5]:
    print(f"d = {film.thickness_nm:5.1f} nm  Tc = {film.tc_k:5.2f} K  "
          f"Lk = {sheet_inductance(film) * 1e12:6.1f} pH/sq")

# %%
if plt is not None:
    fig, (a, b) = plt.subplots(1, 2, figsize=(9, 3.5))
    a.semilogy(temps / params.tc_k, sweep["qi"])
    a.set_xlabel("T / Tc")
    a.set_ylabel("Qi")
    r_sq = np.array([f.r_sq for f in films])
    grid = np.geomspace(r_sq.min(), r_sq.max(), 100)
    b.loglog(r_sq, [f.tc_k for f in films], "o")
    b.loglog(grid, universal_tc(grid, fit))
    b.set_xlabel("sheet resistance (ohm/sq)")
    b.set_ylabel("Tc (K)")
    save(fig, "temperature_and_films.png")
