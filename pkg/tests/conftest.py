import numpy as np
import pytest

from rotorllc import harmonic, kernels, llc, plant, reduction


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    kernels.warmup()


@pytest.fixture(scope="session")
def default_params():
    return plant.default_params()


@pytest.fixture(scope="session")
def default_trim(default_params):
    return plant.trim_plant(default_params)


@pytest.fixture(scope="session")
def default_lti(default_params):
    return harmonic.assemble_lti(default_params.ltp_model(), 4, 0, 2)


@pytest.fixture(scope="session")
def default_reduced(default_lti):
    return reduction.residualize(default_lti, reduction.default_partition(default_lti))


@pytest.fixture(scope="session")
def default_controller(default_reduced, default_trim):
    return llc.LlcController.from_models(llc.MpcConfig(), default_reduced, default_trim)


def random_ltp(rng, n_max=4, order_max=2, n_inputs_max=3, stable=False):
    """Random small LTP model for oracle comparisons."""
    n = int(rng.integers(1, n_max))
    nu = int(rng.integers(1, n_inputs_max))
    order = int(rng.integers(0, order_max + 1))
    f = rng.standard_normal((2 * order + 1, n, n))
    if stable:
        f[0] -= (2.0 + np.abs(f[0]).sum(axis=1).max()) * np.eye(n)
    return plant.LtpModel(
        f_table=f,
        g_table=rng.standard_normal((2 * order + 1, n, nu)),
        p_table=rng.standard_normal((2 * order + 1, 1, n)),
        r_table=rng.standard_normal((2 * order + 1, 1, nu)),
        omega=27.0,
        state_labels=tuple(f"s{i}" for i in range(n)),
        input_labels=tuple(f"u{i}" for i in range(nu)),
        output_labels=("y",),
    )
