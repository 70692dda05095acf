import numpy as np
import pytest

from tau_spectra.asymptotics import (
    ERROR_FLOOR,
    predicted_outliers,
    projection_residual,
    symmetry_class,
    table_rows,
    validation_row,
)
from tau_spectra.errors import DomainError, EmptyReportError
from tau_spectra.spectral_solver import solve
from tau_spectra.tau_core import TauParams


def rel(a, b):
    return abs(a - b) / abs(b)


class TestPredicted:
    def test_examples(self):
        assert predicted_outliers(TauParams(8, 3, 0.5)) == pytest.approx([10 / 3])
        assert predicted_outliers(TauParams(8, 4, -2)) == pytest.approx([4.25, -2.5])
        assert predicted_outliers(TauParams(8, 0.5, 0.9)) == []

    def test_single_value_for_equal_corners(self):
        assert predicted_outliers(TauParams(8, 1.6, 1.6)) == pytest.approx([1.6 + 1 / 1.6])

    def test_outside_interval(self):
        for e in (1.01, -1.01, 5, -7):
            for x in predicted_outliers(TauParams(4, e, 0)):
                assert abs(x) > 2


class TestProjection:
    def test_identity(self):
        u = np.array([1.0, -2, 3])
        assert projection_residual(u, u) == pytest.approx(0, abs=1e-15)

    def test_orthogonal(self):
        assert projection_residual([0, 1, 0], [5, 0, 0]) == pytest.approx(1)

    def test_zero_u(self):
        with pytest.raises(DomainError):
            projection_residual([1, 2], [0, 0])

    def test_scale_invariant_in_u(self):
        x = np.array([0.3, 0.4, -0.2])
        u = np.array([1.0, 2.0, 2.0])
        assert projection_residual(x, u) == pytest.approx(projection_residual(x, -7 * u), rel=1e-14)


class TestSymmetryClass:
    def test_examples(self):
        assert symmetry_class([1, 2, 1]) == "symmetric"
        assert symmetry_class([1, 0, -1]) == "antisymmetric"
        assert symmetry_class([1, 2, 3]) == "neither"

    def test_zero(self):
        with pytest.raises(DomainError):
            symmetry_class([0, 0])

    def test_equal_corner_outliers(self):
        out = solve(TauParams(16, 1.6, 1.6)).outliers()
        assert sorted(symmetry_class(p.vector) for p in out) == ["antisymmetric", "symmetric"]


class TestValidationRow:
    def test_single_outlier(self):
        r = validation_row(TauParams(8, 3, 0.5))
        assert r.references == ("v",)
        assert 3.0e-8 <= r.abs_errors[0] <= 3.6e-8
        assert 2.5e-5 <= r.projection_residuals[0] <= 3.5e-5

    def test_opposite_sign_outliers(self):
        r = validation_row(TauParams(8, 4, -2))
        assert r.references == ("v", "w")
        assert r.computed[0][0] == pytest.approx(4.2499999950887285, rel=1e-12)
        assert r.computed[1][0] == pytest.approx(-2.4999484772090417, rel=1e-12)
        for got, ref in zip(r.abs_errors, (4.9e-9, 5.2e-5)):
            assert rel(got, ref) < 0.2
        for got, ref in zip(r.projection_residuals, (2.3e-5, 5.9e-3)):
            assert rel(got, ref) < 0.2

    def test_equal_corner_pair(self):
        r = validation_row(TauParams(8, 1.6, 1.6))
        assert r.computed[0][0] == pytest.approx(2.2447548446486838, rel=1e-12)
        assert r.computed[1][0] == pytest.approx(2.1991364375014231, rel=1e-12)
        assert r.classes == ("symmetric", "antisymmetric")
        assert r.references == ("v+w", "v-w")

    def test_one_large_corner_on_right(self):
        r = validation_row(TauParams(10, 0.2, -3))
        assert r.references == ("w",)
        assert r.predicted[0] == pytest.approx(-3 - 1 / 3)

    def test_empty(self):
        with pytest.raises(EmptyReportError):
            validation_row(TauParams(8, 0.5, -0.9))

    def test_len(self):
        assert len(validation_row(TauParams(8, 4, -2))) == 2


class TestTables:
    def test_floor(self):
        rows = table_rows(1, [8, 16, 32])
        assert [r["n"] for r in rows] == [8, 16, 32]
        assert all(r["error"] >= ERROR_FLOOR for r in rows)
        assert rows[1]["error"] <= 1e-14

    def test_monotone_decrease(self):
        rows = table_rows(1, [8, 16])
        assert rows[0]["error"] / max(rows[1]["error"], 1e-300) > 1e6
        assert rows[1]["residual"] < rows[0]["residual"]

    def test_equal_corner_rows(self):
        expected = {
            8: ((2.2447548446486838, 2.1991364375014231), (2.1e-2, 1.2e-2)),
            16: ((2.2255116405185864, 2.2244808853312168), (5.9e-4, 4.9e-4)),
            32: ((2.2250002793612006, 2.2249997206340419), (2.9e-7, 2.9e-7)),
        }
        rows = table_rows(3, [8, 16, 32])
        for n, (values, residuals) in expected.items():
            got = [r for r in rows if r["n"] == n]
            assert [r["outlier"] for r in got] == pytest.approx(values, rel=1e-12)
            assert [r["reference"] for r in got] == ["v+w", "v-w"]
            for r, ref in zip(got, residuals):
                assert rel(r["residual"], ref) < 0.2

    def test_unknown_table(self):
        with pytest.raises(DomainError):
            table_rows(4, [8])


def test_separation_from_bulk():
    for e, f in ((3, 0.5), (4, -2), (-2.5, 0.3)):
        for n in (16, 32):
            p = TauParams(n, e, f)
            target = e + 1 / e
            gap = abs(target) - 2
            pairs = solve(p).pairs
            nearest = min(pairs, key=lambda q: abs(q.lam - target))
            for q in pairs:
                if q is not nearest:
                    assert abs(q.lam - target) >= gap - 0.01


def test_equal_corners_converge_together():
    for n in (8, 16, 32, 64):
        out = solve(TauParams(n, 1.6, 1.6)).outliers()
        assert len(out) == 2
        assert {symmetry_class(p.vector) for p in out} == {"symmetric", "antisymmetric"}
    out = solve(TauParams(64, 1.6, 1.6)).outliers()
    assert abs(out[0].lam - out[1].lam) < 1e-12
