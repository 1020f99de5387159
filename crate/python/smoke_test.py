"""Smoke test for the qdarwin extension module.

Build and install first, e.g.

    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/qdarwin-*.whl
"""

import math

import qdarwin


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


def main():
    # a Haar state: Schmidt symmetry and MI(S:rest) = 2 H(S)
    psi = qdarwin.haar_random_pure_state(5, seed=3)
    assert len(psi) == 32
    assert close(sum(abs(a) ** 2 for a in psi), 1.0, 1e-12)
    h = qdarwin.marginal_entropy(psi, [0])
    assert close(h, qdarwin.marginal_entropy(psi, [1, 2, 3, 4]))
    assert close(qdarwin.mutual_information(psi, [0], [1, 2, 3, 4]), 2 * h)

    assert close(qdarwin.page_mean_entropy(2, 4), 0.5095238095238095, 1e-14)

    curve = qdarwin.haar_average_pip(8)
    assert len(curve) == 9 and curve.provenance == "analytic"
    assert curve.antisymmetry_defect() < 1e-10

    sampled = qdarwin.sampled_average_pip(3, samples=20, seed=1)
    assert sampled.provenance == "montecarlo"
    assert all(s is not None for s in sampled.stderr_bits)

    ghz = qdarwin.unimodal_pip(4, math.inf)
    assert ghz.mean_bits == [0.0, 1.0, 1.0, 1.0, 2.0]

    assert close(qdarwin.entropy_h(0.5, 1.0), 0.495842258021443, 1e-12)
    assert close(qdarwin.poisson_mean_entropy(1), 0.397715726853315, 1e-12)

    profile = qdarwin.DecoherenceProfile([math.inf, math.inf, 0.0, 0.0])
    exact = qdarwin.empirical_average_pip(profile)
    assert exact.mean_bits == qdarwin.bimodal_average_pip(4, 2, math.inf).mean_bits

    d_r = qdarwin.critical_d(0.5, math.inf, 0.5)
    assert close(d_r, 0.497065618257646, 1e-9)

    diluted = qdarwin.DecoherenceProfile.bimodal(20, 8, math.inf)
    report = qdarwin.redundancy_partition(diluted, 0.1)
    assert report.r_partition == 8 and report.redundancy() == 7
    for part in report.parts:
        assert diluted.subset_mutual_information(part) >= 0.45 * 2 * math.log(2) - 1e-12

    try:
        qdarwin.critical_d(0.5, 1.0, 1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("delta outside (0, 1) must raise")

    print("qdarwin", qdarwin.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
