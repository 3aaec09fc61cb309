import math
import warnings

import mpmath
import numpy as np
import pytest
from scipy import special

from hausdorffcs.errors import ConvergenceError, DomainError
from hausdorffcs.meijer import (
    ContourConfig,
    ContourResult,
    MeijerGSpec,
    convolution_kernels,
    delta_list,
    eval_convolution,
    eval_mellin_barnes,
    mellin_barnes_values,
)

FAMILY_GRID = [(2, 1), (3, 1), (3, 2), (4, 1)]


def mp_meijer(spec: MeijerGSpec) -> float:
    upper, lower = spec.reduced()
    mpmath.mp.dps = 30
    return float(mpmath.meijerg([[], list(upper)], [list(lower), []], spec.argument))


@pytest.mark.parametrize(
    "k, a, expected",
    [
        (1, 0.0, [0.0]),
        (2, 0.0, [0.0, 0.5]),
        (3, 0.0, [0.0, 1.0 / 3.0, 2.0 / 3.0]),
        (2, 0.25, [0.125, 0.625]),
    ],
)
def test_delta_list(k, a, expected):
    assert delta_list(k, a) == pytest.approx(expected, abs=1e-15)
    assert len(delta_list(k, a)) == k


@pytest.mark.parametrize("k", [0, -1, 1.5])
def test_delta_list_rejects_bad_k(k):
    with pytest.raises(DomainError):
        delta_list(k, 0.0)


class TestMeijerGSpec:
    def test_of_family_shape(self):
        spec = MeijerGSpec.of_family(3, 2, 0.25, 0.7)
        assert spec.k == 3 and spec.l == 2
        assert spec.upper_present == pytest.approx((0.125, 0.625))
        assert spec.lower_present == pytest.approx((0.0, 1.0 / 3.0, 2.0 / 3.0))
        assert spec.upper_absent == () and spec.lower_absent == ()

    def test_reduced_cancels_matching_gammas(self):
        upper, lower = MeijerGSpec.of_family(2, 1, 0.0, 1.0).reduced()
        assert upper == ()
        assert lower == pytest.approx((0.5,))

        upper, lower = MeijerGSpec.of_family(3, 2, 0.0, 1.0).reduced()
        assert upper == pytest.approx((0.5,))
        assert lower == pytest.approx((1.0 / 3.0, 2.0 / 3.0))

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(upper_absent=(1.0,), lower_present=(0.0,)),
            dict(lower_present=(0.0,), lower_absent=(1.0,)),
            dict(lower_present=()),
            dict(upper_present=(0.0, 0.5), lower_present=(0.0, 0.5)),
            dict(lower_present=(0.5,), argument=0.0),
            dict(lower_present=(0.5,), argument=float("inf")),
        ],
    )
    def test_invalid_shapes(self, kwargs):
        with pytest.raises(DomainError):
            MeijerGSpec(**kwargs)


@pytest.mark.parametrize(
    "kwargs",
    [dict(abscissa=0.0), dict(half_height=-1.0), dict(nodes=32), dict(tol=0.0)],
)
def test_contour_config_validation(kwargs):
    with pytest.raises(DomainError):
        ContourConfig(**kwargs)


class TestMellinBarnes:
    def test_single_gamma(self):
        result = eval_mellin_barnes(MeijerGSpec(lower_present=(0.5,), argument=1.0))
        assert isinstance(result, ContourResult)
        assert result.value == pytest.approx(math.exp(-1.0), rel=1e-10)
        assert float(result) == result.value
        assert result.value == pytest.approx(0.3678794412, abs=1e-10)
        assert result.error < 1e-9 * result.value

    def test_two_gamma_bessel_example(self):
        z = 0.1
        result = eval_mellin_barnes(MeijerGSpec(lower_present=(1.0 / 3.0, 2.0 / 3.0), argument=z))
        expected = 2.0 * math.sqrt(z) * special.kv(1.0 / 3.0, 2.0 * math.sqrt(z))
        assert result.value == pytest.approx(expected, rel=1e-9)

    def test_family_k2_l1_is_elementary(self):
        z = 0.25
        result = eval_mellin_barnes(MeijerGSpec.of_family(2, 1, 0.0, z))
        assert result.value == pytest.approx(math.sqrt(z) * math.exp(-z), rel=1e-10)

    @pytest.mark.parametrize("b1, b2", [(0.5, 0.2), (1.0 / 3.0, 2.0 / 3.0), (0.0, 0.5), (0.75, 0.25)])
    @pytest.mark.parametrize("z", [0.01, 0.3, 2.0, 10.0])
    def test_bessel_reduction(self, b1, b2, z):
        result = eval_mellin_barnes(MeijerGSpec(lower_present=(b1, b2), argument=z))
        expected = 2.0 * z ** (0.5 * (b1 + b2)) * special.kv(b1 - b2, 2.0 * math.sqrt(z))
        assert result.value == pytest.approx(expected, rel=1e-8)

    @pytest.mark.parametrize("k, l", FAMILY_GRID)
    @pytest.mark.parametrize("nu", [0.0, 0.25, 0.5])
    @pytest.mark.parametrize("z", [1e-3, 0.05, 1.0, 5.0])
    def test_against_arbitrary_precision(self, k, l, nu, z):  # noqa: E741
        spec = MeijerGSpec.of_family(k, l, nu, z)
        assert eval_mellin_barnes(spec).value == pytest.approx(mp_meijer(spec), rel=1e-8)

    def test_half_height_doubling_within_error_estimate(self):
        spec = MeijerGSpec.of_family(3, 1, 0.0, 0.5)
        short = eval_mellin_barnes(spec, ContourConfig(half_height=20.0, adaptive=False))
        tall = eval_mellin_barnes(spec, ContourConfig(half_height=40.0, adaptive=False))
        assert short.half_height == 20.0 and tall.half_height == 40.0
        assert abs(short.value - tall.value) <= short.error

    def test_truncated_contour_raises(self):
        spec = MeijerGSpec.of_family(2, 1, 0.0, 1.0)
        with pytest.raises(ConvergenceError) as info:
            eval_mellin_barnes(spec, ContourConfig(half_height=1.0, adaptive=False))
        assert info.value.error_estimate > 0.0

    def test_saddle_moves_abscissa_for_large_argument(self):
        result = eval_mellin_barnes(MeijerGSpec.of_family(2, 1, 0.0, 50.0))
        assert result.abscissa == pytest.approx(50.0)
        assert result.value == pytest.approx(math.sqrt(50.0) * math.exp(-50.0), rel=1e-9)

    def test_underflow_returns_zero(self):
        result = eval_mellin_barnes(MeijerGSpec.of_family(2, 1, 0.0, 1e4))
        assert result.value == 0.0
        assert result.error == 0.0

    def test_vectorised_values(self):
        z = np.array([[0.1, 0.2], [0.4, 0.8]])
        values = mellin_barnes_values(2, 1, 0.0, z)
        assert values.shape == z.shape
        np.testing.assert_allclose(values, np.sqrt(z) * np.exp(-z), rtol=1e-10)


class TestConvolution:
    def test_kernels(self):
        kernels = convolution_kernels(3, 1, 0.0)
        # the beta kernel with vanishing order is the identity and is dropped
        assert [kernel.is_beta for kernel in kernels] == [False, False]
        assert [kernel.power for kernel in kernels] == pytest.approx([1.0 / 3.0, 2.0 / 3.0])

        kernels = convolution_kernels(3, 2, 0.25)
        assert [kernel.is_beta for kernel in kernels] == [True, True, False]
        assert kernels[0].order == pytest.approx(0.125)
        assert kernels[1].order == pytest.approx((0.25 + 1.0 / 3.0) / 2.0)

    @pytest.mark.parametrize("z", [0.1, 1.0, 3.0])
    def test_single_gamma_kernel(self, z):
        assert eval_convolution(1, 0, 0.0, z) == pytest.approx(math.exp(-z), rel=1e-12)

    def test_two_gamma_kernels(self):
        value = eval_convolution(2, 0, 0.0, 1.0)
        assert value == pytest.approx(math.sqrt(math.pi) * math.exp(-2.0), rel=1e-7)
        assert value == pytest.approx(0.2398755, abs=1e-7)

    def test_against_mellin_barnes(self):
        z = 0.05
        value = eval_convolution(3, 1, 0.0, z)
        assert value == pytest.approx(eval_mellin_barnes(MeijerGSpec.of_family(3, 1, 0.0, z)).value, rel=1e-6)
        assert value == pytest.approx(2.0 * math.sqrt(z) * special.kv(1.0 / 3.0, 2.0 * math.sqrt(z)), rel=1e-6)

    def test_beta_kernel_chain(self):
        z = np.array([0.2, 1.0])
        values = eval_convolution(2, 1, 0.5, z)
        assert values.shape == (2,)
        # Delta(1, 1/2) cancels against Delta(2, 0), leaving exp(-z)
        np.testing.assert_allclose(values, np.exp(-z), rtol=1e-7)

    @pytest.mark.parametrize(
        "k, l, nu, z",
        [(3, 2, 0.25, 1.0), (3, 2, 0.5, 0.01), (3, 1, 0.0, 1e-3), (3, 1, 0.5, 10.0), (4, 1, 0.0, 1e-3)],
    )
    def test_grid_corners(self, k, l, nu, z):  # noqa: E741
        with warnings.catch_warnings():
            warnings.simplefilter("error", RuntimeWarning)
            value = eval_convolution(k, l, nu, z)
        assert value > 0.0
        assert value == pytest.approx(mp_meijer(MeijerGSpec.of_family(k, l, nu, z)), rel=1e-6)

    def test_beta_pair_at_unit_argument(self):
        assert eval_convolution(3, 2, 0.25, 1.0) == pytest.approx(0.37982, abs=1e-5)

    def test_small_argument_gamma_pair(self):
        z = 1e-3
        exact = 2.0 * math.sqrt(z) * special.kv(1.0 / 3.0, 2.0 * math.sqrt(z))
        assert eval_convolution(3, 1, 0.0, z) == pytest.approx(exact, rel=1e-6)
        assert exact == pytest.approx(0.22764180, rel=1e-7)

    @pytest.mark.parametrize(
        "args",
        [(2, 1, -0.5, 1.0), (2, 2, 0.0, 1.0), (1, 2, 0.0, 1.0), (2, 1, 0.0, 0.0), (2, 1, 0.0, -1.0)],
    )
    def test_domain(self, args):
        with pytest.raises(DomainError):
            eval_convolution(*args)


@pytest.mark.slow
@pytest.mark.parametrize("k, l", FAMILY_GRID)
@pytest.mark.parametrize("nu", [0.0, 0.25, 0.5])
def test_backend_equivalence_grid(k, l, nu):  # noqa: E741
    z = np.geomspace(1e-3, 10.0, 20)
    convolution = eval_convolution(k, l, nu, z)
    contour = mellin_barnes_values(k, l, nu, z)
    assert np.all(convolution >= -1e-14)
    np.testing.assert_allclose(convolution, contour, rtol=1e-6)
