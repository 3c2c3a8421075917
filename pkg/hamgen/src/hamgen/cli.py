"""Command-line front end.

    hamgen --molecule <name|file.xyz> [--basis STO-6G] [--scan lo:hi:n]
           --out <dir> [--seed <n>]

Built-in parametric molecules: H2, H4, LiH (bond length or chain spacing is
the scanned coordinate), plus `rotated-h4`, which emits the randomly rotated
and stretched H4 ensemble (STO-3G) together with a labels file of FCI
energies.  A manifest.json listing every emitted bundle is written last.
"""

from __future__ import annotations

import argparse
import json
import pathlib
import sys

import numpy as np

from . import __version__, bundles
from .basis import SUPPORTED_BASES, BasisError
from .scf import SCFError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

DEFAULT_LENGTHS = {"H2": 0.74, "H4": 1.0, "LiH": 1.595}


def _builtin_request(name, basis, r):
    if name == "H2":
        return bundles.diatomic_request("H2", ("H", "H"), r, basis)
    if name == "LiH":
        return bundles.diatomic_request("LiH", ("Li", "H"), r, basis)
    if name == "H4":
        return bundles.h_chain_request(4, r, basis)
    raise KeyError(name)


def _read_xyz(path):
    lines = pathlib.Path(path).read_text().splitlines()
    try:
        n = int(lines[0].split()[0])
        geom = []
        for line in lines[2:2 + n]:
            el, x, y, z = line.split()[:4]
            geom.append((el, (float(x), float(y), float(z))))
        if len(geom) != n:
            raise ValueError("truncated coordinate block")
    except (IndexError, ValueError) as e:
        raise ValueError(f"malformed xyz file {path}: {e}") from None
    return tuple(geom)


def _parse_scan(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"scan spec {text!r} is not lo:hi:n")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 1 or hi < lo:
        raise ValueError(f"scan spec {text!r} is out of order or empty")
    return lo, hi, n


def _slug(name):
    return "".join(c if c.isalnum() or c in "._-" else "_" for c in name)


def build_parser():
    p = argparse.ArgumentParser(prog="hamgen", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--molecule", required=True,
                   help="built-in name (H2, H4, LiH, rotated-h4) or .xyz path")
    p.add_argument("--basis", default="STO-6G", choices=SUPPORTED_BASES)
    p.add_argument("--scan", default=None,
                   help="bond-length grid lo:hi:n (Angstrom); for rotated-h4 "
                        "this is the stretch range and sample count")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0,
                   help="RNG seed (rotated-h4 orientations)")
    p.add_argument("--version", action="version",
                   version=f"hamgen {__version__}")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    emitted, failures = [], []
    labels = None
    try:
        if args.molecule == "rotated-h4":
            lo, hi, n = _parse_scan(args.scan or "1.0:1.8:8")
            bs, labels = bundles.rotated_h4_dataset(n, (lo, hi), args.seed)
        elif args.molecule in DEFAULT_LENGTHS:
            if args.scan:
                lo, hi, n = _parse_scan(args.scan)
                grid = np.linspace(lo, hi, n)
                bs, fails = bundles.generate_scan(
                    lambda r: _builtin_request(args.molecule, args.basis, r),
                    grid)
                failures = fails
            else:
                bs = [bundles.generate(_builtin_request(
                    args.molecule, args.basis, DEFAULT_LENGTHS[args.molecule]))]
        else:
            if args.scan:
                print("error: --scan requires a built-in parametric molecule",
                      file=sys.stderr)
                return EXIT_USAGE
            geom = _read_xyz(args.molecule)
            name = pathlib.Path(args.molecule).stem
            bs = [bundles.generate(bundles.MoleculeRequest(
                name=name, geometry=geom, basis=args.basis))]
    except (ValueError, OSError, BasisError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (SCFError, bundles.GenerationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL

    manifest = {"generator": f"hamgen {__version__}", "bundles": [],
                "failures": [{"value": v, "error": m} for v, m in failures]}
    for i, b in enumerate(bs):
        fname = f"{_slug(b.request.name)}.json"
        b.write(out / fname)
        manifest["bundles"].append({
            "file": fname,
            "name": b.request.name,
            "basis": b.request.basis,
            "n_qubits": b.n_qubits,
            "hf": b.hf_energy,
            "fci": b.fci_energy,
            "provenance": b.provenance,
        })
        print(f"{fname}: {b.n_qubits} qubits, hf {b.hf_energy:.8f}, "
              f"fci {b.fci_energy:.8f}")
    if labels is not None:
        with open(out / "labels.json", "w") as fh:
            json.dump({"fci_energies": labels,
                       "files": [m["file"] for m in manifest["bundles"]]},
                      fh, indent=1)
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1)
    for v, m in failures:
        print(f"scan point {v}: FAILED ({m})", file=sys.stderr)
    return EXIT_OK if bs and not failures else EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
