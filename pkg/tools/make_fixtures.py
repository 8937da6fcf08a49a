"""Regenerate the shipped FCIDUMP fixtures.

Needs pyscf, which is not a runtime dependency of qcwb:

    pip install pyscf
    python tools/make_fixtures.py src/qcwb/data

Each fixture is a CASCI effective Hamiltonian (frozen-core one-body
operator, active-space two-body integrals, core energy) of ethylene in the
6-31G basis at its experimental geometry. The active spaces follow the
(2/2), (6/4), (10/6) ladder: the highest n_e/2 occupied RHF orbitals plus
the LUMO, so (2/2) is the pi/pi* pair.
"""

import sys
from pathlib import Path

import numpy as np
from pyscf import gto, mcscf, scf
from pyscf.tools import fcidump

ACTIVE_SPACES = [(2, 2), (6, 4), (10, 6)]


def ethylene(r_cc=1.339, r_ch=1.087, angle_hcc=121.3):
    z = r_cc / 2
    a = np.deg2rad(angle_hcc)
    y, dz = r_ch * np.sin(a), r_ch * np.cos(a)
    return [
        ["C", (0.0, 0.0, z)], ["C", (0.0, 0.0, -z)],
        ["H", (0.0, y, z - dz)], ["H", (0.0, -y, z - dz)],
        ["H", (0.0, y, -z + dz)], ["H", (0.0, -y, -z + dz)],
    ]


def main(outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    mol = gto.M(atom=ethylene(), basis="6-31g", unit="angstrom", verbose=0)
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    for n_e, n_o in ACTIVE_SPACES:
        mc = mcscf.CASCI(mf, n_o, n_e)
        h1, ecore = mc.get_h1eff()
        h2 = mc.get_h2eff()
        name = outdir / f"ethylene_{n_e}e{n_o}o.fcidump"
        fcidump.from_integrals(str(name), h1, h2, n_o, n_e, nuc=ecore, tol=1e-14,
                               float_format=" %.17g")
        e_cas = mc.kernel()[0]
        print(f"{name.name}: E_HF={mf.e_tot:.10f} E_CASCI={e_cas:.10f}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/qcwb/data")
