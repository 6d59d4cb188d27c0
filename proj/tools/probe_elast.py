#!/usr/bin/env python3
"""Probe the two m*-elasticity mismatches: step-size bias and conventions."""
import sys
sys.path.insert(0, "tools")
from make_oracles import (mp, mpf, table1, social_base, planner_base, derived,
                          m_star_waiting, set_param, get_param)

p0 = table1()
sp0 = social_base()
pl0 = planner_base()


def mstar_of(name, v, z_fixed=None):
    p, sp = set_param(p0, sp0, name, v)
    d = derived(p)
    if z_fixed is not None:
        # interpret the perturbation as holding disposable capital fixed:
        # solve with wealth adjusted so z0 stays at the base value
        w = z_fixed - d["H"]
    else:
        w = p["w0"]
    m, _ = m_star_waiting(p, d, sp, pl0, w)
    return m


d0 = derived(p0)
z_base = p0["w0"] + d0["H"]

for name in ("s_sub", "P", "eta", "K", "rho", "Y"):
    v0 = get_param(p0, sp0, pl0, name)
    m0 = mstar_of(name, v0)
    print(f"--- {name} (m0 = {mp.nstr(m0, 8)}) ---")
    for h in (mpf("1e-6"), mpf("0.005"), mpf("0.01"), mpf("0.02"), mpf("0.05")):
        mp_ = mstar_of(name, v0 * (1 + h))
        mm_ = mstar_of(name, v0 * (1 - h))
        e = (mp_ - mm_) / (2 * h * m0)
        print(f"  w-fixed   h={float(h):7.4f}  e = {mp.nstr(e, 6)}")
    for h in (mpf("1e-6"), mpf("0.01")):
        mp_ = mstar_of(name, v0 * (1 + h), z_fixed=z_base)
        mm_ = mstar_of(name, v0 * (1 - h), z_fixed=z_base)
        e = (mp_ - mm_) / (2 * h * m0)
        print(f"  z-fixed   h={float(h):7.4f}  e = {mp.nstr(e, 6)}")

# hours sensitivity
for hours in ("8720", "8766"):
    p = dict(p0, hours=mpf(hours))
    d = derived(p)
    for name in ("s_sub", "eta"):
        v0 = get_param(p, sp0, pl0, name)
        h = mpf("1e-6")

        def f(v):
            pp, sp = set_param(p, sp0, name, v)
            dd = derived(pp)
            m, _ = m_star_waiting(pp, dd, sp, pl0, pp["w0"])
            return m

        e = (f(v0 * (1 + h)) - f(v0 * (1 - h))) / (2 * h * f(v0))
        print(f"hours={hours} exact-ish {name}: {mp.nstr(e, 6)}")
