import dataclasses
import json

import numpy as np
import pytest

from cvmkit import datasets
from cvmkit.errors import CvmError
from cvmkit.regression import fit_hierarchy
from cvmkit.simulate import (
    CellTarget,
    GroundTruth,
    InconsistentTargetsError,
    NodeTarget,
    TableTargets,
    calibrate_to_tables,
    canonical_targets,
    generate_market,
    load_truth,
    save_truth,
    truth_from_records,
    truth_records,
)
from cvmkit.survey import node_mean, survey_text
from cvmkit.tree import parse_tree_spec

TREE = parse_tree_spec(
    """\
tree: t
root: value
node: value | Value | root | a b
node: a | A | attribute |
node: b | B | attribute |
"""
)


def tiny_truth(seed=99, internal_noise=0.8, leaf_noise=1.5, n=400):
    return GroundTruth(
        tree=TREE,
        name="tiny",
        seed=seed,
        own_supplier="us",
        n_per_supplier={"us": n, "them": n},
        coefficients={"value": {"a": 0.6, "b": 0.4}},
        intercepts={"value": 0.0},
        leaf_means={"us": {"a": 6.0, "b": 5.0}, "competitors": {"a": 5.5, "b": 5.5}},
        noise_sd={"value": internal_noise, "a": leaf_noise, "b": leaf_noise},
        willingness_link={r: (r - 1) / 9 for r in range(1, 11)},
    )


def test_generation_is_deterministic():
    truth = tiny_truth()
    first = generate_market(truth)
    second = generate_market(truth)
    assert first.respondents == second.respondents
    reseeded = generate_market(dataclasses.replace(truth, seed=truth.seed + 1))
    assert reseeded.respondents != first.respondents


def test_sample_shape_and_ranges():
    sample = generate_market(tiny_truth(n=50))
    assert len(sample) == 100
    assert sample.suppliers() == ["us", "them"]
    ids = [r.id for r in sample.respondents]
    assert len(set(ids)) == len(ids)
    for r in sample.respondents:
        for node, rating in r.node_ratings.items():
            assert 1 <= rating <= 10, (node, rating)
        for rating in r.outcome_ratings.values():
            assert 0 <= rating <= 10
        assert r.role == "decision_maker"  # default share is 1.0


def test_decision_maker_share_mixes_roles():
    truth = dataclasses.replace(tiny_truth(n=200), decision_maker_share=0.5)
    sample = generate_market(truth)
    roles = {r.role for r in sample.respondents}
    assert roles == {"decision_maker", "user"}
    share = sum(r.role == "decision_maker" for r in sample.respondents) / len(sample)
    assert 0.4 < share < 0.6


def test_zero_count_supplier_is_absent():
    truth = tiny_truth(n=30)
    truth.n_per_supplier = {"us": 0, "them": 30}
    sample = generate_market(truth)
    assert len(sample) == 30
    assert sample.suppliers() == ["them"]


def test_class_shift_moves_internal_means():
    base = tiny_truth(n=800)
    shifted = base.copy()
    shifted.class_shift = {"us": {"value": 0.8}}
    lifted = generate_market(shifted)
    plain = generate_market(base)
    own_ids = {r.id for r in lifted.respondents if r.supplier == "us"}
    keep = lambda s: [r for r in s.respondents if r.id in own_ids]
    lifted_mean = np.mean([r.node_ratings["value"] for r in keep(lifted)])
    plain_mean = np.mean([r.node_ratings["value"] for r in keep(plain)])
    assert lifted_mean - plain_mean == pytest.approx(0.8, abs=0.15)


def test_validate_catches_structural_mistakes():
    cases = [
        lambda t: t.coefficients.pop("value"),
        lambda t: t.coefficients["value"].pop("a"),
        lambda t: t.intercepts.pop("value"),
        lambda t: t.leaf_means["us"].pop("a"),
        lambda t: t.leaf_means["us"].__setitem__("a", 12.0),
        lambda t: t.noise_sd.pop("b"),
        lambda t: t.noise_sd.__setitem__("a", -1.0),
        lambda t: t.willingness_link.pop(5),
        lambda t: t.willingness_link.__setitem__(9, 0.1),  # breaks monotonicity
        lambda t: t.n_per_supplier.__setitem__("us", -5),
        lambda t: setattr(t, "halo_sd", -0.5),
        lambda t: setattr(t, "outcome_threshold", 0),
        lambda t: setattr(t, "decision_maker_share", 1.5),
    ]
    for mutate in cases:
        truth = tiny_truth().copy()
        mutate(truth)
        with pytest.raises(CvmError):
            truth.validate()


def test_truth_records_round_trip(tmp_path):
    truth = tiny_truth()
    truth.class_shift = {"us": {"value": 0.2}}
    truth.halo_sd = 0.7
    restored = truth_from_records(truth_records(truth))
    assert restored.coefficients == truth.coefficients
    assert restored.leaf_means == truth.leaf_means
    assert restored.willingness_link == truth.willingness_link
    assert restored.class_shift == truth.class_shift
    assert restored.halo_sd == truth.halo_sd
    assert generate_market(restored).respondents == generate_market(truth).respondents

    path = tmp_path / "truth.json"
    save_truth(truth, path)
    first_bytes = path.read_bytes()
    save_truth(truth, path)
    assert path.read_bytes() == first_bytes
    assert generate_market(load_truth(path)).respondents == generate_market(truth).respondents


def test_rounding_is_the_only_error_in_a_noiseless_market():
    # no internal noise, no halo: the parent is exactly the rounded linear
    # rule of its children, so the fit recovers the plan up to rounding
    truth = tiny_truth(internal_noise=0.0, leaf_noise=1.8, n=2500)
    sample = generate_market(truth)
    hierarchy = fit_hierarchy(sample, TREE)
    fit = hierarchy.models["value"].fit
    assert fit.coefficients["a"] == pytest.approx(0.6, abs=0.03)
    assert fit.coefficients["b"] == pytest.approx(0.4, abs=0.03)
    assert fit.intercept == pytest.approx(0.0, abs=0.2)
    assert fit.r_squared > 0.9


def test_planted_coefficients_recovered_within_three_standard_errors():
    hits = 0
    for seed in (11, 12, 13):
        truth = tiny_truth(seed=seed, internal_noise=0.8, n=2000)
        sample = generate_market(truth)
        fit = fit_hierarchy(sample, TREE).models["value"].fit
        # classical standard errors, recomputed here from the raw columns
        rows = [
            (r.node_ratings["value"], r.node_ratings["a"], r.node_ratings["b"])
            for r in sample.respondents
        ]
        data = np.asarray(rows, dtype=float)
        x = np.column_stack([np.ones(len(data)), data[:, 1], data[:, 2]])
        xtx_inv = np.linalg.inv(x.T @ x)
        se = np.sqrt(fit.residual_sd**2 * np.diag(xtx_inv))
        for planted, name, s in ((0.6, "a", se[1]), (0.4, "b", se[2])):
            if abs(fit.coefficients[name] - planted) <= 3 * s:
                hits += 1
    assert hits >= 5  # 6 checks; a single 3-sigma miss is tolerable


def test_calibration_nudges_a_nearby_market_onto_its_targets():
    initial = tiny_truth(internal_noise=0.6, n=600)
    targets = TableTargets(
        initial=initial,
        cells=(
            CellTarget("value", "a", 60, 6.1, 5.4, 113),
            CellTarget("value", "b", 40, 5.1, 5.6, 91),
        ),
        nodes=(NodeTarget("value", 5.7, 5.5, 104),),
    )
    truth = calibrate_to_tables(targets, max_rounds=120)
    sample = generate_market(truth)
    own = [r for r in sample.respondents if r.supplier == "us"]
    comp = [r for r in sample.respondents if r.supplier != "us"]
    for node, want_own, want_comp in (("a", 6.1, 5.4), ("b", 5.1, 5.6), ("value", 5.7, 5.5)):
        own_mean = np.mean([r.node_ratings[node] for r in own])
        comp_mean = np.mean([r.node_ratings[node] for r in comp])
        assert round(own_mean, 1) == want_own
        assert round(comp_mean, 1) == want_comp
    weights = fit_hierarchy(sample, TREE).models["value"].impact_weights
    assert weights == {"a": 60, "b": 40}


def test_contradictory_relative_is_rejected():
    tree = datasets.automobile_tree()
    targets = canonical_targets(tree)
    broken = dataclasses.replace(
        targets,
        cells=tuple(
            dataclasses.replace(c, relative=50) if c.child == "quality" else c
            for c in targets.cells
        ),
    )
    with pytest.raises(InconsistentTargetsError, match="quality"):
        calibrate_to_tables(broken)


def test_decreasing_loyalty_targets_are_rejected():
    tree = datasets.automobile_tree()
    targets = canonical_targets(tree)
    broken = dataclasses.replace(targets, loyalty_points=((7.3, 0.8), (7.8, 0.63)))
    with pytest.raises(InconsistentTargetsError, match="loyalty"):
        calibrate_to_tables(broken)


def test_recalibration_reproduces_the_bundled_truth():
    tree = datasets.automobile_tree()
    truth = calibrate_to_tables(canonical_targets(tree))
    shipped = json.loads(datasets.fixture_text("market_truth.json"))
    assert truth_records(truth) == shipped


def test_bundled_survey_regenerates_byte_for_byte():
    truth = datasets.market_truth()
    regenerated = survey_text(generate_market(truth))
    assert regenerated == datasets.fixture_text("market_survey.csv")


def test_bundled_truth_matches_its_survey_statistics(halves):
    own, _ = halves
    truth = datasets.market_truth()
    assert truth.n_per_supplier == {"our_co": 1000, "comp_a": 500, "comp_b": 500}
    assert node_mean(own, truth.tree.root).mean == pytest.approx(7.297, abs=1e-12)
