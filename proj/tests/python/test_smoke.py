"""Smoke tests for the python extension module."""

import math

import pytest

import semid

FIG2 = "var Z X Y\nZ -> X\nX -> Y\nX <-> Y\n"
FIG1 = "var X W Z Y\nX -> W\nX -> Z\nW -> Y\nZ -> Y\nX <-> Z\nW <-> Y\n"


def test_parse_and_serialize_round_trip():
    d = semid.parse_model(FIG2)
    assert d.variables == ["Z", "X", "Y"]
    assert len(d) == 3
    assert d.serialize() == FIG2
    again = semid.parse_model(d.serialize())
    assert again.variables == d.variables


def test_build_diagram_and_errors():
    d = semid.build_diagram(["A", "B"], directed=[("A", "B")])
    assert d.directed_edges == [(0, 1)]
    with pytest.raises(semid.ModelError):
        semid.build_diagram(["A", "B"], directed=[("B", "A")])
    with pytest.raises(semid.ModelError):
        semid.parse_model("A -> B\n")


def test_classification_and_paths():
    d = semid.parse_model(FIG2)
    cls = semid.classify(d, "Y")
    assert cls == {"parents": ["X"], "non_parents": ["Z"], "error_correlated": ["X"]}
    assert semid.active_path_exists(d, "Z", "Y", given=["X"])
    assert semid.accessory_set(d, "Y") == {
        "sources": ["Z"],
        "ends": ["X"],
        "paths": ["Z -> X"],
    }


def test_equations_layout():
    d = semid.parse_model(FIG2)
    assert semid.equations(d, "Y") == [
        "(Z): b(Y,Z|X) = -b(X,Z)*a{Y,X}",
        "(X): b(Y,X|Z) = c{Y,X} + a{Y,X}",
    ]


def test_identification_statuses():
    d = semid.parse_model(FIG1)
    results = semid.identify(d)["results"]
    status = {
        (c["target"], c["source"]): c["status"]
        for r in results
        for c in r["coefficients"]
    }
    assert status[("W", "X")] == "identified"
    assert status[("Z", "X")] == "undecided_by_criterion"
    assert status[("Y", "W")] == "identified"
    assert status[("Y", "Z")] == "identified"
    report = semid.identify_report(d)
    assert report.count("IDENTIFIED") == 3
    assert report.count("UNDECIDED") == 1


def test_oracle_round_trip():
    d = semid.parse_model(FIG2)
    params = semid.random_parameterization(d, seed=7)
    sigma = semid.implied_covariance(
        d, params["coefficients"], params["error_covariance"]
    )
    for i in range(3):
        assert math.isclose(sigma[i][i], 1.0, abs_tol=1e-9)
    estimates = semid.evaluate_coefficients(d, sigma)
    assert math.isclose(
        estimates["Y<-X"], params["coefficients"][2][1], rel_tol=1e-8
    )
    beta = semid.partial_regression(d, sigma, "X", "Z")
    assert math.isclose(beta, sigma[1][0] / sigma[0][0], rel_tol=1e-12)


def test_gram_schmidt_reconstruction():
    psi = [[1.0, 0.3, 0.0], [0.3, 1.0, 0.2], [0.0, 0.2, 1.0]]
    alphas, variances = semid.gram_schmidt_alphas(psi)
    n = 3
    rebuilt = [[0.0] * n for _ in range(n)]
    lower = [
        [1.0 if i == j else (alphas[i][j] if j < i else 0.0) for j in range(n)]
        for i in range(n)
    ]
    for i in range(n):
        for j in range(n):
            rebuilt[i][j] = sum(
                lower[i][k] * variances[k] * lower[j][k] for k in range(n)
            )
    for i in range(n):
        for j in range(n):
            assert math.isclose(rebuilt[i][j], psi[i][j], abs_tol=1e-12)


def test_certification():
    d = semid.parse_model(FIG1)
    report = semid.certify(d, trials=50, seed=1)
    assert report["passed"]
    assert report["max_regression_identity_residual"] < 1e-8
    assert all(claim["passed"] for claim in report["claims"])
