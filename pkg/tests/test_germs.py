"""Curve germs: construction, evaluation, reparametrization, series oracle,
and the germ JSON format."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from lnegerm import (
    DomainError,
    InputError,
    ReparametrizationError,
    WeightedMaxNorm,
    germ_set,
    germset_from_json,
    germset_to_json,
    load_germ_file,
    puiseux_branch,
    sample_cloud,
    symbolic_separation_order,
)
from lnegerm.germs import merge_coincident, reparametrize_by_distance


def line(direction, label="line", t_max=1.0):
    d = np.asarray(direction, dtype=float)
    return puiseux_branch([(1, d / np.linalg.norm(d))], t_max, label)


class TestBranchConstruction:
    def test_exponents_sorted_and_fractional(self):
        b = puiseux_branch([((3, 2), (0, 1)), (1, (1, 0))], 1.0, "b")
        assert [e for e, _ in b.terms] == [Fraction(1), Fraction(3, 2)]

    def test_rejects_nonincreasing_exponents(self):
        with pytest.raises(InputError):
            puiseux_branch([(1, (1, 0)), (1, (0, 1))], 1.0, "b")

    def test_rejects_zero_coefficient(self):
        with pytest.raises(InputError):
            puiseux_branch([(1, (0.0, 0.0))], 1.0, "b")

    def test_rejects_nonpositive_t_max(self):
        with pytest.raises(InputError):
            puiseux_branch([(1, (1, 0))], 0.0, "b")

    def test_eval_at_zero_is_origin(self):
        b = puiseux_branch([((1, 2), (1, 0)), (2, (0, 3))], 1.0, "b")
        assert np.allclose(b.eval(0.0), 0.0)

    def test_eval_outside_domain(self):
        b = line((1, 0))
        with pytest.raises(DomainError):
            b.eval(1.5)


class TestReparametrization:
    def test_param_at_radius_inverts_norm(self):
        b = puiseux_branch([(1, (1, 0)), (2, (0, 2))], 1.0, "b")
        for r in (0.5, 0.1, 1e-3):
            s = b.param_at_radius(r)
            assert math.isclose(float(np.linalg.norm(b.eval(s))), r, rel_tol=1e-12)

    def test_param_at_radius_max_norm(self):
        b = line((1, 1))
        norm = WeightedMaxNorm((1.0, 1.0))
        s = b.param_at_radius(0.25, norm)
        p = b.eval(s)
        assert math.isclose(float(np.max(np.abs(p))), 0.25, rel_tol=1e-12)

    def test_points_land_on_spheres(self):
        b = puiseux_branch([(1, (1, 0)), ((3, 2), (0, 1))], 1.0, "b")
        scales = [0.2, 0.1, 0.05]
        pts = reparametrize_by_distance(b, scales)
        assert np.allclose(np.linalg.norm(pts, axis=1), scales, rtol=1e-9)

    def test_radius_beyond_reach(self):
        b = line((1, 0), t_max=0.1)
        with pytest.raises(DomainError):
            b.param_at_radius(0.5)


class TestSeparationOrder:
    def test_tangent_parabolas_order_two(self):
        b1 = puiseux_branch([(1, (1, 0)), (2, (0, 1))], 1.0, "b1")
        b2 = puiseux_branch([(1, (1, 0)), (2, (0, 2))], 1.0, "b2")
        sep = symbolic_separation_order(b1, b2)
        assert not sep.infinite
        assert sep.order == Fraction(2)

    def test_cusp_pair_order_three_halves(self):
        b1 = puiseux_branch([(1, (1, 0)), ((3, 2), (0, 1))], 1.0, "b1")
        b2 = puiseux_branch([(1, (1, 0)), ((3, 2), (0, -1))], 1.0, "b2")
        assert symbolic_separation_order(b1, b2).order == Fraction(3, 2)

    def test_transverse_lines_order_one(self):
        sep = symbolic_separation_order(line((1, 0), "a"), line((0, 1), "b"))
        assert sep.order == Fraction(1)

    def test_identical_branches_flagged_infinite(self):
        b1 = line((1, 0), "a")
        b2 = line((1, 0), "b")
        sep = symbolic_separation_order(b1, b2)
        assert sep.infinite
        assert sep.undecided_beyond is not None


class TestSampling:
    def test_cloud_meets_spacing_bound(self):
        germ = germ_set(
            branches=(line((1, 0), "a"), line((0, 1), "b")), label="cross"
        )
        cloud = sample_cloud(germ, 0.5, 16)
        assert cloud.spacing == 0.5 / 16
        assert np.all(np.linalg.norm(cloud.points, axis=1) <= cloud.scale)
        assert set(cloud.tip_index) == {"a", "b"}

    def test_origin_shared_across_pieces(self):
        germ = germ_set(
            branches=(line((1, 0), "a"), line((0, 1), "b")), label="cross"
        )
        cloud = sample_cloud(germ, 0.5, 16)
        origins = [
            i
            for i, p in enumerate(cloud.points)
            if np.linalg.norm(p) < 1e-12
        ]
        assert len(origins) == 1
        assert cloud.labels[origins[0]] == {"a", "b"}

    def test_density_floor(self):
        germ = germ_set(branches=(line((1, 0)),), label="l")
        with pytest.raises(InputError):
            sample_cloud(germ, 0.5, 4)

    def test_merge_coincident_unions_labels(self):
        pts = np.array([[0.0, 0.0], [1e-12, 0.0], [1.0, 0.0]])
        merged, labels, params, remap = merge_coincident(
            pts, [{"a"}, {"b"}, {"a"}], [{"a": 0.0}, {"b": 0.0}, {"a": 1.0}], 1e-9
        )
        assert len(merged) == 2
        assert labels[remap[0]] == {"a", "b"}


class TestGermJson:
    def test_round_trip(self):
        germ = germ_set(
            branches=(
                puiseux_branch([(1, (1, 0)), ((3, 2), (0, -1))], 0.7, "b"),
            ),
            label="g",
        )
        back = germset_from_json(germset_to_json(germ))
        assert back.label == "g"
        assert back.branches[0].t_max == 0.7
        for (e1, c1), (e2, c2) in zip(back.branches[0].terms, germ.branches[0].terms):
            assert e1 == e2
            assert np.array_equal(c1, c2)

    def test_exponents_must_be_integer_pairs(self):
        data = {
            "label": "g",
            "ambient_dim": 2,
            "branches": [
                {
                    "label": "b",
                    "t_max": 1.0,
                    "terms": [{"exp": [1.5, 1], "coeff": [1.0, 0.0]}],
                }
            ],
        }
        with pytest.raises(InputError):
            germset_from_json(data)

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(InputError):
            load_germ_file(path)

    def test_duplicate_labels_rejected(self):
        with pytest.raises(InputError):
            germ_set(branches=(line((1, 0), "a"), line((0, 1), "a")), label="g")
