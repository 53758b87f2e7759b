#!/usr/bin/env python3
"""Regenerate the embedded interaction tables under crates/core/data/.

Photoelectric mass coefficients come from the Elam/Ravel/Sieber tables as
packaged by xraydb (valid to 800 keV; extended above that by log-log
extrapolation of the last two table points). Compton is the free-electron
Klein-Nishina cross section, pair production the Geant4 Bethe-Heitler
parameterisation (nuclear + triplet). Stopping powers: ICRU-37 collision
formula for e-/e+ with an approximate radiative term, Bethe formula for
muons and protons blended with a low-energy velocity-proportional branch.
Density-effect corrections use the Sternheimer-Peierls general parameters.

usage: python3 tools/gen_tables.py  (requires: pip install xraydb numpy)
"""

import math
import os
import warnings

import numpy as np
import xraydb

warnings.filterwarnings("ignore")

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "data")
VERSION = "1"

# symbol -> (Z, standard atomic weight)
ELEMENTS = {
    "H": (1, 1.008), "C": (6, 12.011), "N": (7, 14.007), "O": (8, 15.999),
    "Na": (11, 22.990), "Mg": (12, 24.305), "Al": (13, 26.982),
    "Si": (14, 28.085), "K": (19, 39.098), "Ca": (20, 40.078),
    "Fe": (26, 55.845), "Ga": (31, 69.723), "As": (33, 74.922),
}

# elemental mean excitation energies (eV), ICRU-37/49
I_ELEM = {
    "H": 19.2, "C": 78.0, "N": 82.0, "O": 95.0, "Na": 149.0, "Mg": 156.0,
    "Al": 166.0, "Si": 173.0, "K": 190.0, "Ca": 191.0, "Fe": 286.0,
    "Ga": 334.0, "As": 347.0,
}


def by_atoms(counts):
    total = sum(n * ELEMENTS[s][1] for s, n in counts.items())
    return {s: n * ELEMENTS[s][1] / total for s, n in counts.items()}


# name -> (density g/cm3, mass fractions, mean excitation override eV or None)
MATERIALS = {
    "Si": (2.329, {"Si": 1.0}, 173.0),
    "SiC": (3.21, by_atoms({"Si": 1, "C": 1}), None),
    "SiO2": (2.20, by_atoms({"Si": 1, "O": 2}), 139.2),
    "Al2O3": (3.98, by_atoms({"Al": 2, "O": 3}), 145.2),
    "GaN": (6.15, by_atoms({"Ga": 1, "N": 1}), None),
    "GaAs": (5.3176, by_atoms({"Ga": 1, "As": 1}), 384.9),
    # NIST "Concrete, Ordinary"
    "concrete": (2.3, {
        "H": 0.010000, "C": 0.001000, "O": 0.529107, "Na": 0.016000,
        "Mg": 0.002000, "Al": 0.033872, "Si": 0.337021, "K": 0.013000,
        "Ca": 0.044000, "Fe": 0.014000}, 135.2),
    "Al": (2.699, {"Al": 1.0}, 166.0),
}

N_A = 6.02214076e23
ME = 0.51099895  # MeV
RE = 2.8179403262e-13  # cm
K_BETHE = 0.307075  # MeV cm2/mol
MMU = 105.6583755
MP = 938.27208816
ALPHA = 1.0 / 137.035999


def z_over_a(frac):
    return sum(w * ELEMENTS[s][0] / ELEMENTS[s][1] for s, w in frac.items())


def mean_excitation(frac, override):
    if override is not None:
        return override
    za = z_over_a(frac)
    ln_i = sum(w * ELEMENTS[s][0] / ELEMENTS[s][1] * math.log(I_ELEM[s])
               for s, w in frac.items()) / za
    return math.exp(ln_i)


def density_params(rho, frac, i_ev):
    """Sternheimer-Peierls (1971) general parameters for condensed media."""
    plasma = 28.816 * math.sqrt(rho * z_over_a(frac))  # eV
    cbar = 2.0 * math.log(i_ev / plasma) + 1.0
    if i_ev < 100.0:
        x1 = 2.0
        x0 = 0.2 if cbar < 3.681 else 0.326 * cbar - 1.0
    else:
        x1 = 3.0
        x0 = 0.2 if cbar < 5.215 else 0.326 * cbar - 1.5
    k = 3.0
    a = (cbar - 4.606 * x0) / (x1 - x0) ** k
    return cbar, x0, x1, a, k


def delta(bg, params):
    cbar, x0, x1, a, k = params
    x = math.log10(bg)
    if x < x0:
        return 0.0
    if x < x1:
        return 4.606 * x - cbar + a * (x1 - x) ** k
    return 4.606 * x - cbar


def radiation_length(frac):
    inv = 0.0
    for s, w in frac.items():
        z, a = ELEMENTS[s]
        x0 = 716.4 * a / (z * (z + 1) * math.log(287.0 / math.sqrt(z)))
        inv += w / x0
    return 1.0 / inv


def klein_nishina(e_kev):
    k = e_kev / (ME * 1e3)
    l = math.log1p(2 * k)
    s = ((1 + k) / k**2 * (2 * (1 + k) / (1 + 2 * k) - l / k)
         + l / (2 * k) - (1 + 3 * k) / (1 + 2 * k) ** 2)
    return 2 * math.pi * RE**2 * s  # cm2 per electron


# Geant4 G4BetheHeitlerModel::ComputeCrossSectionPerAtom coefficients (microbarn)
PA = [8.7842e+2, -1.9625e+3, 1.2949e+3, -2.0028e+2, 1.2575e+1, -2.8333e-1]
PB = [-1.0342e+1, 1.7692e+1, -8.2381, 1.3063, -9.0815e-2, 2.3586e-3]
PC = [-4.5263e+2, 1.1161e+3, -8.6749e+2, 2.1773e+2, -2.0467e+1, 6.5372e-1]


def pair_per_atom(e_kev, z):
    e = e_kev / 1e3
    if e <= 2 * ME:
        return 0.0
    lim = 1.5
    x = math.log(max(e, lim) / ME)
    f1 = sum(c * x**i for i, c in enumerate(PA))
    f2 = sum(c * x**i for i, c in enumerate(PB))
    f3 = sum(c * x**i for i, c in enumerate(PC))
    xs = (z + 1.0) * z * (f1 + f2 * z + f3 / z)
    if e < lim:
        t = (e - 2 * ME) / (lim - 2 * ME)
        xs *= t * t
    return max(xs, 0.0) * 1e-30  # microbarn -> cm2


def photo_mass(el, e_kev):
    """Elam photoabsorption (cm2/g); above 790 keV extrapolated log-log."""
    top = 790e3
    if e_kev * 1e3 <= top:
        return float(xraydb.mu_elam(el, [e_kev * 1e3], kind="photo")[0])
    e1, e2 = 600e3, top
    v1, v2 = xraydb.mu_elam(el, [e1, e2], kind="photo")
    slope = math.log(v2 / v1) / math.log(e2 / e1)
    return float(v2 * (e_kev * 1e3 / e2) ** slope)


def photon_grid(frac):
    grid = list(np.logspace(0, 4, 4 * 40 + 1))
    for s in frac:
        for edge in xraydb.xray_edges(s).values():
            ek = edge.energy / 1e3
            if 1.0 < ek < 1e4 and edge.energy > 1000:
                grid += [ek * (1 - 1e-6), ek]
    return sorted(set(round(g, 9) for g in grid))


def electron_stopping(t, za, i_mev, params, x0, positron):
    tau = t / ME
    g = tau + 1
    b2 = 1 - 1 / g**2
    bg = math.sqrt(tau * (tau + 2))
    if positron:
        y = tau + 2
        f = 2 * math.log(2) - b2 / 12 * (23 + 14 / y + 10 / y**2 + 4 / y**3)
    else:
        f = 1 - b2 + (tau**2 / 8 - (2 * tau + 1) * math.log(2)) / (tau + 1) ** 2
    bracket = math.log(tau**2 * (tau + 2) / (2 * (i_mev / ME) ** 2)) + f - delta(bg, params)
    col = K_BETHE / 2 * za / b2 * bracket
    rad = (t + ME) / x0 * t / (t + 7.0)
    return col + rad


def heavy_stopping(t, mass, za, i_mev, params):
    g = 1 + t / mass
    b2 = 1 - 1 / g**2
    bg2 = b2 * g * g
    r = ME / mass
    tmax = 2 * ME * bg2 / (1 + 2 * g * r + r * r)
    arg = 2 * ME * bg2 * tmax / i_mev**2
    bethe = K_BETHE * za / b2 * (0.5 * math.log(arg) - b2 - delta(math.sqrt(bg2), params) / 2)
    # low-energy branch at equal velocity, proton-equivalent energy in MeV
    tp = t * MP / mass
    low = 2525.0 * (za / 0.49848) * tp**0.45
    if bethe <= 0:
        high = float("inf")
    else:
        high = bethe
    tb = 2.0
    if tp < tb:
        g_b = 1 + tb / MP
        b2_b = 1 - 1 / g_b**2
        bg2_b = b2_b * g_b * g_b
        tmax_b = 2 * ME * bg2_b / (1 + 2 * g_b * ME / MP + (ME / MP) ** 2)
        s_b = K_BETHE * za / b2_b * (0.5 * math.log(2 * ME * bg2_b * tmax_b / i_mev**2) - b2_b)
        high = s_b * (tb / tp) ** 0.8
    return 1.0 / (1.0 / low + 1.0 / high)


def fmt(v):
    return f"{v:.6e}"


def main():
    os.makedirs(OUT, exist_ok=True)
    with open(os.path.join(OUT, "materials.csv"), "w") as fh:
        fh.write(f"# radbkg material catalog v{VERSION}; generated by tools/gen_tables.py\n")
        fh.write("# density g/cm3; mean excitation eV; composition as element:mass_fraction\n")
        fh.write("name,density,mean_excitation_ev,composition\n")
        for name, (rho, frac, i_over) in MATERIALS.items():
            comp = " ".join(f"{s}:{w:.9f}" for s, w in frac.items())
            fh.write(f"{name},{rho},{mean_excitation(frac, i_over):.4f},{comp}\n")

    for name, (rho, frac, i_over) in MATERIALS.items():
        za = z_over_a(frac)
        grid = photon_grid(frac)
        path = os.path.join(OUT, f"{name}_attenuation.csv")
        with open(path, "w") as fh:
            fh.write(f"# material={name} kind=attenuation species=photon "
                     "units=keV;cm2/g;cm2/g;cm2/g\n")
            fh.write("# columns: energy,photoelectric,compton,pair; pair is zero below 1022 keV\n")
            fh.write("# provenance: photoelectric = Elam/Ravel/Sieber via xraydb 4.5.8 "
                     "(log-log extrapolated above 790 keV); compton = Klein-Nishina free "
                     "electron; pair = Geant4 Bethe-Heitler parameterisation; "
                     f"table v{VERSION}\n")
            for e in grid:
                pe = sum(w * photo_mass(s, e) for s, w in frac.items())
                co = N_A * za * klein_nishina(e)
                pa = sum(w * N_A / ELEMENTS[s][1] * pair_per_atom(e, ELEMENTS[s][0])
                         for s, w in frac.items())
                fh.write(f"{e:.9g},{fmt(pe)},{fmt(co)},{fmt(pa) if pa > 0 else '0'}\n")

        i_ev = mean_excitation(frac, i_over)
        params = density_params(rho, frac, i_ev)
        x0 = radiation_length(frac)
        i_mev = i_ev * 1e-6
        path = os.path.join(OUT, f"{name}_stopping.csv")
        with open(path, "w") as fh:
            fh.write(f"# material={name} kind=stopping species=e-;e+;mu;p "
                     "units=MeV;MeV*cm2/g;MeV*cm2/g;MeV*cm2/g;MeV*cm2/g\n")
            fh.write("# columns: energy,electron,positron,muon,proton (total mass stopping power)\n")
            fh.write(f"# provenance: ICRU-37 collision + approximate radiative (X0={x0:.3f} g/cm2) "
                     f"for e-/e+; Bethe with Sternheimer-Peierls density effect (I={i_ev:.1f} eV) "
                     f"for mu/p, low-energy velocity branch; table v{VERSION}\n")
            for t in np.logspace(-2, 5, 7 * 40 + 1):
                cols = [
                    electron_stopping(t, za, i_mev, params, x0, False),
                    electron_stopping(t, za, i_mev, params, x0, True),
                    heavy_stopping(t, MMU, za, i_mev, params),
                    heavy_stopping(t, MP, za, i_mev, params),
                ]
                fh.write(f"{t:.9g}," + ",".join(fmt(c) for c in cols) + "\n")


if __name__ == "__main__":
    main()
