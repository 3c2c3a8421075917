"""Bundle generation: schema shape, self-checks, scans, rotated ensembles."""

import json

import numpy as np
import pytest

import hamgen
from hamgen import bundles, fci


@pytest.fixture(scope="module")
def h2_bundle():
    return hamgen.generate(
        hamgen.diatomic_request("H2", ("H", "H"), 0.74, basis="STO-3G"))


def test_document_schema(h2_bundle):
    doc = json.loads(h2_bundle.document)
    assert doc["format_version"] == 1
    assert doc["n_qubits"] == 4
    assert doc["hf_bitstring"] == [1, 1, 0, 0]
    assert doc["atom_qubit_map"] == [[0, 1], [2, 3]]
    assert set(doc["energies"]) == {"hf", "fci"}
    assert len(doc["geometry"]) == 2
    for t in doc["terms"]:
        assert set(t) == {"c", "p"}
        for token in t["p"].split():
            assert token[0] in "XYZ" and 0 <= int(token[1:]) < 4
    # exactly one identity term carrying the constant part
    assert sum(1 for t in doc["terms"] if t["p"] == "") == 1


def test_h2_sto3g_term_count_and_energies(h2_bundle):
    doc = json.loads(h2_bundle.document)
    assert len(doc["terms"]) == 15
    assert h2_bundle.fci_energy < h2_bundle.hf_energy
    # correlation energy of minimal-basis H2 is ~20 mHa
    assert h2_bundle.hf_energy - h2_bundle.fci_energy == \
        pytest.approx(0.0205, abs=5e-3)


def test_recorded_energies_reproducible(h2_bundle):
    doc = json.loads(h2_bundle.document)
    terms = {}
    for t in doc["terms"]:
        label = ["I"] * doc["n_qubits"]
        for token in t["p"].split():
            label[int(token[1:])] = token[0]
        terms[tuple(label)] = t["c"]
    assert fci.ground_energy(terms, doc["n_qubits"]) == \
        pytest.approx(doc["energies"]["fci"], abs=1e-10)
    assert fci.diagonal_energy(terms, doc["n_qubits"], doc["hf_bitstring"]) \
        == pytest.approx(doc["energies"]["hf"], abs=1e-10)


def test_provenance_block(h2_bundle):
    prov = h2_bundle.provenance
    assert prov["generator"].startswith("hamgen")
    assert prov["scf_iterations"] >= 1
    assert prov["n_terms"] == 15
    assert prov["fci_sector_energy"] == pytest.approx(
        prov["fci_energy"], abs=1e-8)


def test_request_validation():
    with pytest.raises(Exception, match="basis"):
        hamgen.MoleculeRequest("X", (("H", (0, 0, 0)),), basis="cc-pVDZ")
    with pytest.raises(bundles.GenerationError, match="singlet"):
        hamgen.MoleculeRequest("X", (("H", (0, 0, 0)),), spin_multiplicity=3)


def test_scan_contract():
    bs, fails = hamgen.generate_scan(
        lambda r: hamgen.diatomic_request("H2", ("H", "H"), r, "STO-3G"),
        [0.6, 0.9, 1.2])
    assert len(bs) == 3 and not fails
    maps = {json.dumps(json.loads(b.document)["atom_qubit_map"]) for b in bs}
    assert len(maps) == 1   # shared ordering across the scan
    with pytest.raises(bundles.GenerationError, match="empty"):
        hamgen.generate_scan(lambda r: None, [])


def test_scan_continues_past_failures():
    # r = 0 puts both atoms on the same point: singular overlap
    bs, fails = hamgen.generate_scan(
        lambda r: hamgen.diatomic_request("H2", ("H", "H"), r, "STO-3G"),
        [0.0, 0.74])
    assert len(bs) == 1 and len(fails) == 1
    assert fails[0][0] == 0.0


def test_rotated_h4_reproducible_and_invariant():
    b1, l1 = hamgen.rotated_h4_dataset(2, (1.5, 1.5), seed=8)
    b2, l2 = hamgen.rotated_h4_dataset(2, (1.5, 1.5), seed=8)
    # same seed: identical geometries
    g1 = json.loads(b1[0].document)["geometry"]
    g2 = json.loads(b2[0].document)["geometry"]
    assert g1 == g2
    # two samples differ only by rigid motion at equal stretch
    assert l1[0] == pytest.approx(l1[1], abs=1e-8)
    assert l1 == pytest.approx(l2, abs=0)


def test_rotated_h4_stretch_edges():
    _, labels = hamgen.rotated_h4_dataset(3, (1.2, 1.8), seed=0)
    assert len(labels) == 3
    bsets, _ = hamgen.rotated_h4_dataset(1, (1.2, 1.8), seed=0)
    assert "1.2000" in bsets[0].request.name   # lower edge exactly once
    with pytest.raises(bundles.GenerationError):
        hamgen.rotated_h4_dataset(0, (1.2, 1.8), seed=0)
